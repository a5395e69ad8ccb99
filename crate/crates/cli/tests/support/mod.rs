//! Helpers for driving the `sparsegnn` binary from integration tests.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_sparsegnn");

/// Runs the binary with `args` and a clean thread environment.
pub fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

pub fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("SPARSEGNN_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("failed to spawn sparsegnn")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Panics with both streams when the exit code differs from `code`.
pub fn expect_code(o: &Output, code: i32) {
    assert_eq!(
        o.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout(o),
        stderr(o)
    );
}

/// The value after `prefix` on the first stdout line that starts with it.
pub fn field<'a>(out: &'a str, prefix: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(prefix)).map(str::trim)
}

/// Per-epoch stats parsed from a `--stats` file without using the library.
#[derive(Debug)]
pub struct StatsFile {
    /// `(epoch, loss text, accuracy, epoch ms)`; the loss is kept as written
    /// so that equal strings mean bitwise-equal losses.
    pub epochs: Vec<(usize, String, f64, f64)>,
    pub footers: Vec<(String, String)>,
}

impl StatsFile {
    pub fn read(path: &Path) -> StatsFile {
        let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("epoch,loss,train_accuracy,epoch_time_ms"));
        let mut epochs = Vec::new();
        let mut footers = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            match f.as_slice() {
                [e, loss, acc, t] => epochs.push((
                    e.parse().unwrap(),
                    loss.to_string(),
                    acc.parse().unwrap(),
                    t.parse().unwrap(),
                )),
                [k, v] => footers.push((k.to_string(), v.to_string())),
                _ => panic!("unexpected stats line '{line}'"),
            }
        }
        StatsFile { epochs, footers }
    }

    pub fn footer(&self, key: &str) -> &str {
        self.footers
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .unwrap_or_else(|| panic!("no '{key}' footer"))
    }

    pub fn count(&self, key: &str) -> usize {
        self.footer(key).parse().unwrap()
    }

    pub fn losses(&self) -> Vec<&str> {
        self.epochs.iter().map(|e| e.1.as_str()).collect()
    }
}

/// One parsed row of a tuning report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub k: usize,
    pub trusted_ms: String,
    pub specialized_ms: String,
    pub speedup: f64,
}

/// Parses a tuning report into its rows and `key,value` footers.
pub fn read_report(path: &Path) -> (Vec<ReportRow>, Vec<(String, String)>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,t_trusted_ms,t_specialized_ms,speedup"));
    let mut rows = Vec::new();
    let mut footers = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        match f.as_slice() {
            [k, t, s, speedup] if footers.is_empty() => rows.push(ReportRow {
                k: k.parse().unwrap(),
                trusted_ms: t.to_string(),
                specialized_ms: s.to_string(),
                speedup: speedup.parse().unwrap(),
            }),
            _ => {
                let (k, v) = line
                    .split_once(',')
                    .unwrap_or_else(|| panic!("unexpected report line '{line}'"));
                footers.push((k.to_string(), v.to_string()));
            }
        }
    }
    (rows, footers)
}

/// Milliseconds with up to six decimals as whole nanoseconds.
pub fn ms_to_ns(s: &str) -> u64 {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    assert!(frac.len() <= 6, "'{s}' has more than six decimals");
    int.parse::<u64>().unwrap() * 1_000_000 + format!("{frac:0<6}").parse::<u64>().unwrap()
}
