use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = io::stdout();
    let err = io::stderr();
    let code = loopk::commands::main_with_args(std::env::args_os(), &mut out.lock(), &mut err.lock());
    ExitCode::from(code as u8)
}
