//! Tuning report file.
//!
//! ```text
//! k,t_trusted_ms,t_specialized_ms,speedup
//! 16,1.234567,0.912345,1.353179...
//! ...
//! best_k,32
//! vlen,8
//! simd_bits,256
//! cores,8
//! description,x86_64 avx2
//! graph_id,graph.mtx
//! skipped,48
//! ```
//!
//! Times are milliseconds with six decimals, i.e. whole nanoseconds, so a
//! save/load round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use crate::autotune::tuning::best_k;
use crate::autotune::{HardwareProfile, TuningEntry, TuningReport};
use crate::error::{Error, Result};

pub const REPORT_HEADER: &str = "k,t_trusted_ms,t_specialized_ms,speedup";

pub(crate) fn format_ms(d: Duration) -> String {
    let ns = d.as_nanos();
    format!("{}.{:06}", ns / 1_000_000, ns % 1_000_000)
}

pub(crate) fn parse_ms(s: &str) -> Option<Duration> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() || frac.len() > 6 || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let whole: u64 = int.parse().ok()?;
    let frac_ns: u64 = format!("{frac:0<6}").parse().ok()?;
    let ns = whole.checked_mul(1_000_000)?.checked_add(frac_ns)?;
    Some(Duration::from_nanos(ns))
}

fn single_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

pub fn render_report(r: &TuningReport) -> String {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for e in &r.entries {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            e.k,
            format_ms(e.t_trusted),
            format_ms(e.t_specialized),
            e.speedup
        );
    }
    let _ = writeln!(out, "best_k,{}", r.best_k);
    let _ = writeln!(out, "vlen,{}", r.profile.vlen);
    let _ = writeln!(out, "simd_bits,{}", r.profile.simd_bits);
    let _ = writeln!(out, "cores,{}", r.profile.cores);
    let _ = writeln!(out, "description,{}", single_line(&r.profile.description));
    let _ = writeln!(out, "graph_id,{}", single_line(&r.graph_id));
    for k in &r.skipped {
        let _ = writeln!(out, "skipped,{k}");
    }
    out
}

pub fn save_report(r: &TuningReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_report(r)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_report(path: impl AsRef<Path>) -> Result<TuningReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_report(&text, path)
}

/// Parses report text; `path` is only used in error messages.
pub fn parse_report(text: &str, path: impl AsRef<Path>) -> Result<TuningReport> {
    let path = path.as_ref();
    let err = |line: usize, msg: String| Error::parse(path, line, msg);

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, REPORT_HEADER)) => {}
        Some((n, other)) => return Err(err(n, format!("expected header '{REPORT_HEADER}', found '{other}'"))),
        None => return Err(err(1, "empty report".into())),
    }

    let mut entries = Vec::new();
    let mut best: Option<(usize, usize)> = None;
    let mut vlen = None;
    let mut simd_bits = None;
    let mut cores = 0;
    let mut description = String::new();
    let mut graph_id = String::new();
    let mut skipped = Vec::new();
    let mut last_line = 1;
    let mut in_footer = false;

    for (n, line) in lines {
        last_line = n;
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(',')
            .ok_or_else(|| err(n, format!("expected comma-separated fields, found '{line}'")))?;
        let count = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| err(n, format!("'{v}' is not a count")))
        };

        if let Ok(k) = key.parse::<usize>() {
            if in_footer {
                return Err(err(n, "data line after footer".into()));
            }
            let fields: Vec<&str> = rest.split(',').collect();
            if fields.len() != 3 {
                return Err(err(n, format!("expected 4 fields, found {}", fields.len() + 1)));
            }
            let t_trusted = parse_ms(fields[0]).ok_or_else(|| err(n, format!("bad time '{}'", fields[0])))?;
            let t_specialized = parse_ms(fields[1]).ok_or_else(|| err(n, format!("bad time '{}'", fields[1])))?;
            let speedup: f64 = fields[2]
                .parse()
                .map_err(|_| err(n, format!("bad speedup '{}'", fields[2])))?;
            if t_trusted.is_zero() || t_specialized.is_zero() || speedup.is_nan() || speedup <= 0.0 {
                return Err(err(n, "times and speedup must be positive".into()));
            }
            let entry = TuningEntry::new(k, t_trusted, t_specialized);
            if ((entry.speedup - speedup) / entry.speedup).abs() > 1e-9 {
                return Err(err(
                    n,
                    format!("speedup {speedup} does not match the times ({})", entry.speedup),
                ));
            }
            entries.push(TuningEntry { speedup, ..entry });
            continue;
        }

        in_footer = true;
        match key {
            "best_k" => best = Some((count(rest)?, n)),
            "vlen" => vlen = Some(count(rest)?),
            "simd_bits" => simd_bits = Some(count(rest)? as u32),
            "cores" => cores = count(rest)?,
            "description" => description = rest.to_string(),
            "graph_id" => graph_id = rest.to_string(),
            "skipped" => skipped.push(count(rest)?),
            other => return Err(err(n, format!("unknown footer key '{other}'"))),
        }
    }

    let (best_k_value, best_line) = best.ok_or_else(|| err(last_line, "missing best_k footer".into()))?;
    let vlen = vlen.ok_or_else(|| err(last_line, "missing vlen footer".into()))?;
    if ![4, 8, 16].contains(&vlen) {
        return Err(err(last_line, format!("vlen {vlen} is not 4, 8 or 16")));
    }
    if best_k(&entries) != Some(best_k_value) {
        return Err(err(
            best_line,
            format!("best_k {best_k_value} is not the entry with the largest speedup"),
        ));
    }
    let simd_bits = simd_bits.unwrap_or(vlen as u32 * 32);
    if simd_bits as usize != vlen * 32 {
        return Err(err(
            last_line,
            format!("simd_bits {simd_bits} disagrees with vlen {vlen}"),
        ));
    }
    Ok(TuningReport {
        entries,
        best_k: best_k_value,
        profile: HardwareProfile {
            simd_bits,
            vlen,
            cores,
            description,
        },
        graph_id,
        skipped,
    })
}
