#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/two_mode.toml");

pub fn fixture_text() -> String {
    std::fs::read_to_string(FIXTURE).unwrap()
}

pub fn pedreach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pedreach")).args(args).output().unwrap()
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = pedreach(args);
    assert!(
        out.status.success(),
        "pedreach {args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes `text` as a config in `dir` and returns its path.
pub fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Generates the fixture corpus into `dir`, returning the CSV path.
pub fn generate(dir: &Path, config: &Path) -> PathBuf {
    let csv = dir.join("corpus.csv");
    run_ok(&["generate", "--config", s(config), "--out", s(&csv)]);
    csv
}

/// Replaces the line starting with `key =` (first occurrence), or prepends it.
pub fn with_key(text: &str, key: &str, value: &str) -> String {
    let prefix = format!("{key} =");
    let mut done = false;
    let mut lines: Vec<String> = text
        .lines()
        .map(|l| {
            if !done && l.starts_with(&prefix) {
                done = true;
                format!("{key} = {value}")
            } else {
                l.to_string()
            }
        })
        .collect();
    if !done {
        lines.insert(0, format!("{key} = {value}"));
    }
    lines.join("\n") + "\n"
}
