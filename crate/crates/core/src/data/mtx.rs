//! Matrix Market coordinate files (`real`, `integer` or `pattern`;
//! `general` or `symmetric`).

use std::fmt::Write as _;
use std::path::Path;

use crate::data::{read_file, write_file};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

pub fn load_mtx<T: Scalar>(path: impl AsRef<Path>) -> Result<CsrMatrix<T>> {
    let path = path.as_ref();
    parse_mtx(&read_file(path)?, path)
}

/// Parses Matrix Market text. Indices are converted to 0-based, pattern
/// entries read as 1, symmetric files are mirrored (diagonal entries once)
/// and duplicates are summed.
pub fn parse_mtx<T: Scalar>(text: &str, path: impl AsRef<Path>) -> Result<CsrMatrix<T>> {
    let path = path.as_ref();
    let err = |line: usize, msg: String| Error::parse(path, line, msg);
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (n, banner) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(n, format!("bad Matrix Market header '{banner}'")));
    }
    if tokens[2] != "coordinate" {
        return Err(err(
            n,
            format!("unsupported format '{}', only coordinate is supported", tokens[2]),
        ));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(err(n, format!("unsupported field '{other}'"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(err(n, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (n, size_line) = body.next().ok_or_else(|| err(n, "missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(n, format!("bad size token '{t}'"))))
        .collect::<Result<_>>()?;
    let [rows, cols, entries] = dims[..] else {
        return Err(err(n, format!("size line needs 3 numbers, found {}", dims.len())));
    };
    if symmetric && rows != cols {
        return Err(err(n, format!("symmetric matrix must be square, got {rows}x{cols}")));
    }

    let per_line = if field == Field::Pattern { 2 } else { 3 };
    let mut triples = Vec::with_capacity(if symmetric { 2 * entries } else { entries });
    let mut seen = 0usize;
    let mut last = n;
    for (n, line) in body {
        last = n;
        if seen == entries {
            return Err(err(n, format!("more than the {entries} declared entries")));
        }
        let mut it = line.split_whitespace();
        let mut index = |limit: usize| -> Result<usize> {
            let t = it.next().ok_or_else(|| err(n, format!("expected {per_line} fields")))?;
            let i: usize = t.parse().map_err(|_| err(n, format!("bad index '{t}'")))?;
            if i == 0 || i > limit {
                return Err(err(n, format!("index {i} outside 1..={limit}")));
            }
            Ok(i - 1)
        };
        let (r, c) = (index(rows)?, index(cols)?);
        let value = if field == Field::Pattern {
            T::one()
        } else {
            let t = it.next().ok_or_else(|| err(n, "missing value".into()))?;
            t.parse::<T>().map_err(|_| err(n, format!("bad value '{t}'")))?
        };
        if it.next().is_some() {
            return Err(err(n, format!("expected {per_line} fields")));
        }
        triples.push((r, c, value));
        if symmetric && r != c {
            triples.push((c, r, value));
        }
        seen += 1;
    }
    if seen != entries {
        return Err(err(last, format!("expected {entries} entries, found {seen}")));
    }
    CsrMatrix::from_coo(rows, cols, &triples)
}

/// Writes a `real general` coordinate file. Values use the shortest
/// representation that parses back to the same bits.
pub fn render_mtx<T: Scalar>(m: &CsrMatrix<T>) -> String {
    let mut out = String::with_capacity(16 * m.nnz() + 64);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz());
    for (i, j, v) in m.to_coo() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
    }
    out
}

pub fn save_mtx<T: Scalar>(m: &CsrMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_mtx(m))
}
