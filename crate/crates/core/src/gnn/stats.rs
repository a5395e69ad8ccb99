//! Machine-readable training statistics, in the same CSV dialect as the
//! tuning report:
//!
//! ```text
//! epoch,loss,train_accuracy,epoch_time_ms
//! 1,1.3862943611198906,0.25,12.345678
//! ...
//! mean_epoch_ms,12.001234
//! transpose_builds,0
//! normalize_builds,1
//! cache_hits,100
//! ```
//!
//! Losses and accuracies use the shortest round-trip representation, so a
//! loaded file compares bitwise with the in-memory run.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use crate::autotune::report::{format_ms, parse_ms};
use crate::data::{read_file, write_file};
use crate::error::{Error, Result};

use super::train::mean_duration;
use super::{CacheCounters, EpochStats};

pub const STATS_HEADER: &str = "epoch,loss,train_accuracy,epoch_time_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct TrainStats {
    pub epochs: Vec<EpochStats>,
    pub mean_epoch_time: Duration,
    pub counters: CacheCounters,
}

impl TrainStats {
    pub fn new(epochs: Vec<EpochStats>, counters: CacheCounters) -> Self {
        let mean_epoch_time = mean_duration(epochs.iter().map(|s| s.epoch_time));
        TrainStats {
            epochs,
            mean_epoch_time,
            counters,
        }
    }
}

pub fn render_stats(stats: &TrainStats) -> String {
    let mut out = String::new();
    out.push_str(STATS_HEADER);
    out.push('\n');
    for s in &stats.epochs {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.epoch,
            s.loss,
            s.train_accuracy,
            format_ms(s.epoch_time)
        );
    }
    let _ = writeln!(out, "mean_epoch_ms,{}", format_ms(stats.mean_epoch_time));
    let _ = writeln!(out, "transpose_builds,{}", stats.counters.transpose_builds);
    let _ = writeln!(out, "normalize_builds,{}", stats.counters.normalize_builds);
    let _ = writeln!(out, "cache_hits,{}", stats.counters.cache_hits);
    out
}

pub fn save_stats(stats: &TrainStats, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_stats(stats))
}

pub fn load_stats(path: impl AsRef<Path>) -> Result<TrainStats> {
    let path = path.as_ref();
    parse_stats(&read_file(path)?, path)
}

/// Parses stats text; `path` is only used in error messages.
pub fn parse_stats(text: &str, path: impl AsRef<Path>) -> Result<TrainStats> {
    let path = path.as_ref();
    let err = |line: usize, msg: String| Error::parse(path, line, msg);

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, STATS_HEADER)) => {}
        Some((n, other)) => return Err(err(n, format!("expected header '{STATS_HEADER}', found '{other}'"))),
        None => return Err(err(1, "empty stats file".into())),
    }

    let mut epochs = Vec::new();
    let mut mean = None;
    let mut counters = CacheCounters::default();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let count = |v: &str| v.parse::<usize>().map_err(|_| err(n, format!("'{v}' is not a count")));
        let time = |v: &str| parse_ms(v).ok_or_else(|| err(n, format!("bad time '{v}'")));
        match fields.as_slice() {
            [epoch, loss, acc, t] => {
                let loss: f64 = loss.parse().map_err(|_| err(n, format!("bad loss '{loss}'")))?;
                let acc: f64 = acc.parse().map_err(|_| err(n, format!("bad accuracy '{acc}'")))?;
                if !(0.0..=1.0).contains(&acc) {
                    return Err(err(n, format!("accuracy {acc} outside [0, 1]")));
                }
                epochs.push(EpochStats {
                    epoch: count(epoch)?,
                    loss,
                    train_accuracy: acc,
                    epoch_time: time(t)?,
                });
            }
            ["mean_epoch_ms", v] => mean = Some(time(v)?),
            ["transpose_builds", v] => counters.transpose_builds = count(v)?,
            ["normalize_builds", v] => counters.normalize_builds = count(v)?,
            ["cache_hits", v] => counters.cache_hits = count(v)?,
            _ => return Err(err(n, format!("unrecognized line '{line}'"))),
        }
    }
    let mean_epoch_time = mean.unwrap_or_else(|| mean_duration(epochs.iter().map(|s| s.epoch_time)));
    Ok(TrainStats {
        epochs,
        mean_epoch_time,
        counters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let epochs = vec![
            EpochStats {
                epoch: 1,
                loss: 1.0 / 3.0,
                train_accuracy: 0.25,
                epoch_time: Duration::from_nanos(1_234_567),
            },
            EpochStats {
                epoch: 2,
                loss: 0.1 + 0.2,
                train_accuracy: 1.0,
                epoch_time: Duration::from_nanos(7),
            },
        ];
        let stats = TrainStats::new(
            epochs,
            CacheCounters {
                transpose_builds: 1,
                normalize_builds: 1,
                cache_hits: 1,
            },
        );
        let text = render_stats(&stats);
        assert_eq!(parse_stats(&text, "s.csv").unwrap(), stats);
    }

    #[test]
    fn bad_lines_carry_line_numbers() {
        let text = format!("{STATS_HEADER}\n1,0.5,0.5,1.0\n2,oops,0.5,1.0\n");
        let e = parse_stats(&text, "s.csv").unwrap_err().to_string();
        assert!(e.starts_with("s.csv:3:"), "{e}");
    }
}
