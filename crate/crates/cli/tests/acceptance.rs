//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! followed by the failing sub-checks, and exits non-zero if any criterion
//! failed.

use std::process::{Command, ExitCode};

use loopk::checks::{self, Check, Engines, TypeFilter, CRITERIA};
use loopk::commands::{report_scans, Io};
use loopk::render::Format;
use loopk_core::positivity::{check_positive, Failure, ScanReport};
use loopk_core::{cartan::build_root_system, laurent::LaurentPoly};

const BIN: &str = env!("CARGO_BIN_EXE_loopk");

fn check(criterion: u32, name: &str, r: Result<String, String>) -> Check {
    let (passed, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check { criterion, name: name.into(), passed, detail }
}

/// Every computed table, checked against `ℓ(w) ≤ ℓ(u) + ℓ(v)` as written.
fn stated_vanishing_bound(engines: &mut Engines) -> Vec<Check> {
    checks::COMMUTATIVITY_LENGTHS
        .iter()
        .map(|&(label, max_len)| {
            let r = engines.get(label).and_then(|c| checks::stated_bound_violations(c, max_len)).and_then(|v| {
                if v.is_empty() {
                    Ok(format!("no label longer than l(u)+l(v) up to length {max_len}"))
                } else {
                    Err(format!("{} violation(s), first: {}", v.len(), v[0]))
                }
            });
            check(7, &format!("stated vanishing bound [{label}]"), r)
        })
        .collect()
}

fn run_bin(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(BIN).args(args).env_remove("LOOPK_CACHE_DIR").output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout, out.stderr)
}

/// The scan command exits 0 on a clean scan, and a report carrying a FAIL
/// yields exit code 1 with the witness printed.
fn scan_harness() -> Vec<Check> {
    let clean = {
        let (code, out, _) = run_bin(&["scan", "--type", "A1", "--max-len", "8"]);
        if code == 0 {
            Ok(format!("exit 0, {} bytes of report", out.len()))
        } else {
            Err(format!("exit {code}"))
        }
    };

    let failing = (|| {
        let rs = build_root_system("A1").map_err(|e| e.to_string())?;
        let coeff = LaurentPoly::one_minus(rs.simple_root(1));
        // 1 - e^α with even sign is -x1
        let verdict = check_positive(&rs, &coeff, 0);
        let report = ScanReport {
            kind: "conv".into(),
            type_label: "A1".into(),
            pairs: 1,
            constants: 1,
            failures: vec![Failure {
                left: "[0]".into(),
                right: "[0]".into(),
                target: "[0,1,0]".into(),
                coeff: coeff.to_string(),
                sign_exponent: 0,
                verdict,
            }],
            ..Default::default()
        };
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = report_scans(&mut Io { out: &mut out, err: &mut err }, Format::Table, &[report]);
        let out = String::from_utf8(out).map_err(|e| e.to_string())?;
        let err = String::from_utf8(err).map_err(|e| e.to_string())?;
        if code != 1 {
            return Err(format!("exit {code} for a failing report"));
        }
        if !out.contains("FAIL (conv) [0] x [0] -> [0,1,0]") || !out.contains("-x1") || !err.contains("positivity FAIL") {
            return Err(format!("witness missing from output: {out:?} / {err:?}"));
        }
        Ok("exit 1 with witness".to_string())
    })();

    vec![check(8, "scan command exit on clean input", clean), check(8, "failing report aborts with witness", failing)]
}

fn determinism() -> Vec<Check> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut artifacts = Vec::new();
    for (i, jobs) in ["1", "4"].iter().enumerate() {
        let (code, out, err) = run_bin(&["--format", "json", "--jobs", jobs, "selftest"]);
        let path = dir.path().join(format!("selftest-{i}.json"));
        std::fs::write(&path, &out).expect("artifact written");
        artifacts.push((code, std::fs::read(&path).expect("artifact read"), String::from_utf8_lossy(&err).into_owned()));
    }
    let r = if artifacts[0].1.is_empty() {
        Err("empty artifact".into())
    } else if artifacts[0].1 != artifacts[1].1 {
        Err("selftest artifacts differ between runs".into())
    } else if artifacts[0].0 != artifacts[1].0 {
        Err(format!("exit codes differ: {} vs {}", artifacts[0].0, artifacts[1].0))
    } else {
        Ok(format!("{} identical bytes (exit {})", artifacts[0].1.len(), artifacts[0].0))
    };
    vec![check(10, "selftest JSON byte-identical across runs", r)]
}

fn main() -> ExitCode {
    let filter = TypeFilter::default();
    let mut engines = Engines::default();
    let mut all_ok = true;
    for n in 1..=10u32 {
        let mut results = match CRITERIA.iter().find(|(k, _)| *k == n) {
            Some((_, f)) => f(&mut engines, &filter),
            None => Vec::new(),
        };
        match n {
            7 => results.extend(stated_vanishing_bound(&mut engines)),
            8 => results.extend(scan_harness()),
            10 => results.extend(determinism()),
            _ => {}
        }
        let failed: Vec<&Check> = results.iter().filter(|c| !c.passed).collect();
        let ok = !results.is_empty() && failed.is_empty();
        all_ok &= ok;
        println!(
            "criterion {n}: {} ({} of {} checks passed)",
            if ok { "PASS" } else { "FAIL" },
            results.len() - failed.len(),
            results.len()
        );
        for c in failed {
            println!("    failed: {}: {}", c.name, c.detail);
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
