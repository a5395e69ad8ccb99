//! Whitespace-delimited, header-first text files.
//!
//! - features: `n k`, then `n` lines of `k` decimals
//! - labels: `n`, then `n` non-negative integers
//! - mask: `n`, then `n` values in `{0, 1}`

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::data::{read_file, write_file};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::DenseMatrix;

fn header<const N: usize>(text: &str, path: &Path) -> Result<[usize; N]> {
    let line = text.lines().next().unwrap_or("");
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != N {
        return Err(Error::parse(
            path,
            1,
            format!("header needs {N} numbers, found '{line}'"),
        ));
    }
    let mut out = [0; N];
    for (o, f) in out.iter_mut().zip(&fields) {
        *o = f
            .parse()
            .map_err(|_| Error::parse(path, 1, format!("bad header value '{f}'")))?;
    }
    Ok(out)
}

/// Tokens after the header line, each paired with its 1-based line number.
fn body_tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
}

fn last_line(text: &str) -> usize {
    text.lines().count().max(1)
}

pub fn parse_features<T: Scalar>(text: &str, path: impl AsRef<Path>) -> Result<DenseMatrix<T>> {
    let path = path.as_ref();
    let [n, k] = header::<2>(text, path)?;
    let mut data = Vec::with_capacity(n * k);
    let mut rows = 0;
    for (i, line) in text.lines().enumerate().skip(1) {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if rows == n {
            return Err(Error::parse(
                path,
                line_no,
                format!("header says {n} rows but more follow"),
            ));
        }
        let before = data.len();
        for t in line.split_whitespace() {
            data.push(
                t.parse::<T>()
                    .map_err(|_| Error::parse(path, line_no, format!("'{t}' is not a number")))?,
            );
        }
        if data.len() - before != k {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {k} values, found {}", data.len() - before),
            ));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::parse(
            path,
            last_line(text),
            format!("header says {n} rows, found {rows}"),
        ));
    }
    DenseMatrix::from_vec(n, k, data)
}

fn parse_list<V: FromStr>(text: &str, path: &Path, what: &str, accept: impl Fn(&V) -> bool) -> Result<Vec<V>> {
    let [n] = header::<1>(text, path)?;
    let mut out = Vec::with_capacity(n);
    for (line, t) in body_tokens(text) {
        if out.len() == n {
            return Err(Error::parse(
                path,
                line,
                format!("header says {n} {what} but more follow"),
            ));
        }
        match t.parse::<V>() {
            Ok(v) if accept(&v) => out.push(v),
            _ => return Err(Error::parse(path, line, format!("'{t}' is not a valid {what} value"))),
        }
    }
    if out.len() != n {
        return Err(Error::parse(
            path,
            last_line(text),
            format!("header says {n} {what}, found {}", out.len()),
        ));
    }
    Ok(out)
}

pub fn parse_labels(text: &str, path: impl AsRef<Path>) -> Result<Vec<usize>> {
    parse_list(text, path.as_ref(), "labels", |_| true)
}

pub fn parse_mask(text: &str, path: impl AsRef<Path>) -> Result<Vec<bool>> {
    let raw: Vec<u8> = parse_list(text, path.as_ref(), "mask", |v: &u8| *v <= 1)?;
    Ok(raw.into_iter().map(|v| v == 1).collect())
}

pub fn load_features<T: Scalar>(path: impl AsRef<Path>) -> Result<DenseMatrix<T>> {
    let path = path.as_ref();
    parse_features(&read_file(path)?, path)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    parse_labels(&read_file(path)?, path)
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    let path = path.as_ref();
    parse_mask(&read_file(path)?, path)
}

pub fn render_features<T: Scalar>(x: &DenseMatrix<T>) -> String {
    let mut out = format!("{} {}\n", x.n_rows(), x.n_cols());
    for i in 0..x.n_rows() {
        let row: Vec<String> = x.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn render_labels(labels: &[usize]) -> String {
    let mut out = format!("{}\n", labels.len());
    for l in labels {
        let _ = writeln!(out, "{l}");
    }
    out
}

pub fn render_mask(mask: &[bool]) -> String {
    let mut out = format!("{}\n", mask.len());
    for &m in mask {
        out.push_str(if m { "1\n" } else { "0\n" });
    }
    out
}

pub fn save_features<T: Scalar>(x: &DenseMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_features(x))
}

pub fn save_labels(labels: &[usize], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_labels(labels))
}

pub fn save_mask(mask: &[bool], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_mask(mask))
}
