use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_loopk");

fn loopk(cache: &std::path::Path, args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("LOOPK_CACHE_DIR", cache).output().unwrap()
}

#[test]
fn cached_output_matches_fresh_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--format", "json", "conv", "--type", "A2", "--u", "1,0", "--v", "2,0"];
    let fresh = Command::new(BIN).args(args).env_remove("LOOPK_CACHE_DIR").output().unwrap();
    assert!(fresh.status.success());

    let first = loopk(dir.path(), &args);
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = loopk(dir.path(), &args);
    assert_eq!(first.stdout, fresh.stdout);
    assert_eq!(second.stdout, fresh.stdout);
    assert!(second.stderr.is_empty());
}

#[test]
fn corrupt_cache_file_is_replaced() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["conv", "--type", "A1", "--u", "0", "--v", "0"];
    let good = loopk(dir.path(), &args);
    let path = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    fs::write(&path, "truncated").unwrap();

    let again = loopk(dir.path(), &args);
    assert!(again.status.success());
    assert_eq!(again.stdout, good.stdout);
    assert!(String::from_utf8_lossy(&again.stderr).contains("recomputing"));
    let third = loopk(dir.path(), &args);
    assert!(third.stderr.is_empty());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(loopk(dir.path(), &["conv", "--type", "Z9", "--u", "0", "--v", "0"]).status.code(), Some(2));
    assert_eq!(loopk(dir.path(), &["qk", "--type", "A1", "--x", "1", "--y", "1", "--depth", "1"]).status.code(), Some(2));
    assert_eq!(loopk(dir.path(), &["roots", "--type", "A2"]).status.code(), Some(0));
}
