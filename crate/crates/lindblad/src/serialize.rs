//! CSV blocks for operators and superoperators.
//!
//! ```text
//! # hfine-matrix kind=operator dim=2 labels=g,e stacking=column-major(index=row+dim*col)
//! row,col,re,im
//! 0,1,0.5,0
//! ```
//!
//! Only nonzero entries are written. For superoperators `dim` is the electron
//! dimension `d` and row/col index the `d^2` column-stacked vector space.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{LindbladError, Result};
use crate::operator::{CMatrix, ElectronBasis, Operator};
use crate::superop::Superoperator;

const MAGIC: &str = "# hfine-matrix";
const STACKING: &str = "column-major(index=row+dim*col)";

fn write_block(kind: &str, basis: &ElectronBasis, m: &CMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} kind={kind} dim={} labels={} stacking={STACKING}", basis.dim(), basis.labels().join(","));
    out.push_str("row,col,re,im\n");
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if z != Complex64::new(0.0, 0.0) {
                let _ = writeln!(out, "{r},{c},{:e},{:e}", z.re, z.im);
            }
        }
    }
    out
}

pub fn write_operator_csv(op: &Operator) -> String {
    write_block("operator", op.basis(), op.matrix())
}

pub fn write_superoperator_csv(s: &Superoperator) -> String {
    write_block("superoperator", s.basis(), s.matrix())
}

fn perr(line: usize, message: impl Into<String>) -> LindbladError {
    LindbladError::Parse { line, message: message.into() }
}

fn read_block(text: &str, expect_kind: &str) -> Result<(Arc<ElectronBasis>, CMatrix)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let rest = header.strip_prefix(MAGIC).ok_or_else(|| perr(1, "missing matrix header"))?;
    let mut kind = None;
    let mut dim = None;
    let mut labels = None;
    let mut stacking = None;
    for field in rest.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| perr(1, format!("malformed field '{field}'")))?;
        match k {
            "kind" => kind = Some(v),
            "dim" => dim = Some(v.parse::<usize>().map_err(|e| perr(1, format!("dim: {e}")))?),
            "labels" => labels = Some(v.split(',').map(str::to_owned).collect::<Vec<_>>()),
            "stacking" => stacking = Some(v),
            _ => return Err(perr(1, format!("unknown field '{k}'"))),
        }
    }
    if kind != Some(expect_kind) {
        return Err(perr(1, format!("expected kind={expect_kind}")));
    }
    if stacking != Some(STACKING) {
        return Err(perr(1, "unsupported stacking convention"));
    }
    let dim = dim.ok_or_else(|| perr(1, "missing dim"))?;
    let labels = labels.ok_or_else(|| perr(1, "missing labels"))?;
    if labels.len() != dim {
        return Err(perr(1, format!("{} labels for dim {dim}", labels.len())));
    }
    let basis = ElectronBasis::new(labels).map_err(|e| perr(1, e.to_string()))?;
    match lines.next() {
        Some((_, "row,col,re,im")) => {}
        Some((n, _)) => return Err(perr(n, "expected column header 'row,col,re,im'")),
        None => return Err(perr(2, "missing column header")),
    }
    let n = if expect_kind == "operator" { dim } else { dim * dim };
    let mut m = CMatrix::zeros(n, n);
    for (ln, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(perr(ln, format!("expected 4 fields, found {}", cols.len())));
        }
        let r: usize = cols[0].trim().parse().map_err(|e| perr(ln, format!("row: {e}")))?;
        let c: usize = cols[1].trim().parse().map_err(|e| perr(ln, format!("col: {e}")))?;
        let re: f64 = cols[2].trim().parse().map_err(|e| perr(ln, format!("re: {e}")))?;
        let im: f64 = cols[3].trim().parse().map_err(|e| perr(ln, format!("im: {e}")))?;
        if r >= n || c >= n {
            return Err(perr(ln, format!("index ({r},{c}) out of range for size {n}")));
        }
        if !re.is_finite() || !im.is_finite() {
            return Err(perr(ln, "non-finite entry"));
        }
        m[(r, c)] = Complex64::new(re, im);
    }
    Ok((basis, m))
}

pub fn read_operator_csv(text: &str) -> Result<Operator> {
    let (basis, m) = read_block(text, "operator")?;
    Operator::new(basis, m)
}

/// Parses a superoperator block. The dissipative flag is inferred from the
/// matrix being non-anti-Hermitian.
pub fn read_superoperator_csv(text: &str) -> Result<Superoperator> {
    let (basis, m) = read_block(text, "superoperator")?;
    let anti = (&m + m.adjoint()).iter().any(|z| z.norm() > 0.0);
    Superoperator::new(basis, m, anti)
}
