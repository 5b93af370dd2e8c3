//! The array `A(F^g, g ∈ R; W)`: a simple OA(q^{2n−1}, q^{2n−2}, q, 2) of index q^{2n−3}.

use std::collections::HashMap;
use std::fmt::Write as _;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::collineation::build_r;
use crate::error::{Error, Result};
use crate::family::{family_from_r, WSet};
use crate::field::{FieldCtx, FieldDescription, Fq2Element};
use crate::geometry::{BMParams, ParamsDescription};

/// Default cap on `N·k`.
pub const DEFAULT_ENTRY_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalArray {
    entries: Vec<Vec<u32>>,
    levels: u32,
    strength: u32,
    index: u64,
    level_map: Vec<Fq2Element>,
    params: BMParams,
}

/// Column set, symbol tuple and observed count of one failing cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub columns: Vec<usize>,
    pub symbols: Vec<u32>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrengthReport {
    pub strength: u32,
    /// `N / v^t`, or `None` if that is not an integer.
    pub expected: Option<u64>,
    pub column_sets: u64,
    pub violation_count: u64,
    /// First violations in column-set order, at most [`MAX_LISTED_VIOLATIONS`].
    pub violations: Vec<Violation>,
}

pub const MAX_LISTED_VIOLATIONS: usize = 64;

impl StrengthReport {
    pub fn passed(&self) -> bool {
        self.expected.is_some() && self.violation_count == 0
    }
}

fn tuple_code(row: &[u32], cols: &[usize], v: u64) -> u64 {
    cols.iter().fold(0, |acc, &c| acc * v + row[c] as u64)
}

fn decode(mut code: u64, t: usize, v: u64) -> Vec<u32> {
    let mut out = vec![0u32; t];
    for slot in out.iter_mut().rev() {
        *slot = (code % v) as u32;
        code /= v;
    }
    out
}

/// Checks every `t`-set of columns of an `N × k` array over `{0, …, v−1}`:
/// each of the `v^t` symbol tuples must occur exactly `N/v^t` times.
pub fn strength_report(entries: &[Vec<u32>], v: u32, t: u32) -> StrengthReport {
    let n_rows = entries.len() as u64;
    let k = entries.first().map_or(0, Vec::len);
    let t_us = t as usize;
    let v64 = v as u64;
    let cells = v64.pow(t);
    let expected = n_rows.is_multiple_of(cells).then(|| n_rows / cells);
    let sets: Vec<Vec<usize>> = (0..k).combinations(t_us).collect();
    let per_set: Vec<Vec<Violation>> = sets
        .par_iter()
        .map(|cols| {
            let mut counts = vec![0u64; cells as usize];
            for row in entries {
                counts[tuple_code(row, cols, v64) as usize] += 1;
            }
            counts
                .iter()
                .enumerate()
                .filter(|&(_, &c)| Some(c) != expected)
                .map(|(code, &c)| Violation {
                    columns: cols.clone(),
                    symbols: decode(code as u64, t_us, v64),
                    count: c,
                })
                .collect()
        })
        .collect();
    let violation_count = per_set.iter().map(|v| v.len() as u64).sum();
    StrengthReport {
        strength: t,
        expected,
        column_sets: sets.len() as u64,
        violation_count,
        violations: per_set.into_iter().flatten().take(MAX_LISTED_VIOLATIONS).collect(),
    }
}

/// No two rows coincide.
pub fn rows_distinct(entries: &[Vec<u32>]) -> bool {
    let mut sorted: Vec<&Vec<u32>> = entries.iter().collect();
    sorted.par_sort();
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Builds the array and verifies strength 2, index `q^{2n−3}` and simplicity
/// before returning it.
pub fn build_oa(ctx: &FieldCtx, params: &BMParams, budget: u128) -> Result<OrthogonalArray> {
    let n = params.n() as u32;
    let q = ctx.q() as u128;
    let n_rows = q.pow(2 * n - 1);
    let n_cols = q.pow(2 * n - 2);
    if n_rows * n_cols > budget {
        return Err(Error::BudgetExceeded { what: "orthogonal array entries", needed: n_rows * n_cols, budget });
    }
    let r = build_r(ctx, params)?;
    let forms = family_from_r(ctx, params, &r)?;
    let w = WSet::new(ctx, params.n());
    let level_map = ctx.t0_set().to_vec();
    let level: HashMap<Fq2Element, u32> = level_map.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
    let entries: Vec<Vec<u32>> = w
        .points()
        .par_iter()
        .map(|x| {
            forms
                .iter()
                .map(|f| {
                    let val = f.eval(ctx, x);
                    level.get(&val).copied().ok_or_else(|| {
                        Error::TheoremViolation(format!("value {} is not trace-zero", ctx.format(val)))
                    })
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<_>>()?;
    let oa = OrthogonalArray {
        entries,
        levels: ctx.q(),
        strength: 2,
        index: (q as u64).pow(2 * n - 3),
        level_map,
        params: params.clone(),
    };
    let report = oa.verify_strength(2);
    if !report.passed() || report.expected != Some(oa.index) {
        return Err(Error::TheoremViolation(format!(
            "array fails strength 2 with index {} ({} bad cells)",
            oa.index, report.violation_count
        )));
    }
    if !oa.verify_simple() {
        return Err(Error::TheoremViolation("array has repeated rows".into()));
    }
    Ok(oa)
}

impl OrthogonalArray {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn strength(&self) -> u32 {
        self.strength
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn entries(&self) -> &[Vec<u32>] {
        &self.entries
    }

    /// Symbol `i` stands for `level_map[i]` ∈ T0.
    pub fn level_map(&self) -> &[Fq2Element] {
        &self.level_map
    }

    pub fn params(&self) -> &BMParams {
        &self.params
    }

    pub fn verify_strength(&self, t: u32) -> StrengthReport {
        strength_report(&self.entries, self.levels, t)
    }

    pub fn verify_simple(&self) -> bool {
        rows_distinct(&self.entries)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.rows() * self.cols() * 3);
        for row in &self.entries {
            let _ = writeln!(s, "{}", row.iter().join(","));
        }
        s
    }

    pub fn sidecar(&self, ctx: &FieldCtx) -> OaSidecar {
        let csv = self.to_csv();
        OaSidecar {
            rows: self.rows(),
            cols: self.cols(),
            levels: self.levels,
            strength: self.strength,
            index: self.index,
            field: ctx.describe(),
            params: self.params.describe(ctx),
            epsilon: ctx.epsilon().index(),
            level_map: self.level_map.iter().map(|e| e.index()).collect(),
            level_map_text: self.level_map.iter().map(|&e| ctx.format(e)).collect(),
            simple: self.verify_simple(),
            csv_sha256: hex::encode(Sha256::digest(csv.as_bytes())),
        }
    }
}

/// JSON companion of the CSV export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OaSidecar {
    pub rows: usize,
    pub cols: usize,
    pub levels: u32,
    pub strength: u32,
    pub index: u64,
    pub field: FieldDescription,
    pub params: ParamsDescription,
    pub epsilon: u32,
    pub level_map: Vec<u32>,
    pub level_map_text: Vec<String>,
    pub simple: bool,
    pub csv_sha256: String,
}

/// Parses a CSV export back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<Vec<u32>>> {
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| Error::InvalidParams(format!("bad CSV entry {x:?}"))))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::auto_params;

    fn oa(n: usize, q: u32) -> (FieldCtx, OrthogonalArray) {
        let ctx = FieldCtx::new(q).unwrap();
        let params = auto_params(&ctx, n).unwrap();
        let a = build_oa(&ctx, &params, DEFAULT_ENTRY_BUDGET).unwrap();
        (ctx, a)
    }

    #[test]
    fn small_parameters() {
        for (n, q, rows, cols, idx) in [(2, 2, 8, 4, 2), (2, 3, 27, 9, 3), (3, 2, 32, 16, 8)] {
            let (_, a) = oa(n, q);
            assert_eq!((a.rows(), a.cols(), a.levels(), a.index()), (rows, cols, q, idx));
            assert!(a.verify_simple());
        }
    }

    #[test]
    fn strength_counts_n2_q3() {
        let (_, a) = oa(2, 3);
        let r = a.verify_strength(2);
        assert!(r.passed());
        assert_eq!(r.column_sets, 36);
        assert_eq!(r.expected, Some(3));
        let r1 = a.verify_strength(1);
        assert!(r1.passed());
        assert_eq!(r1.expected, Some(9));
    }

    #[test]
    fn constant_column_is_caught() {
        let (_, a) = oa(2, 3);
        let mut e = a.entries().to_vec();
        for row in e.iter_mut() {
            row.push(0);
        }
        let r = strength_report(&e, 3, 2);
        assert!(!r.passed());
        assert_eq!(r.violations[0].columns, vec![0, 9]);
        assert!(r.violations.iter().all(|v| v.count == 0 || v.count == 9));
    }

    #[test]
    fn duplicated_row_is_caught() {
        let (_, a) = oa(2, 2);
        let mut e = a.entries().to_vec();
        e[1] = e[0].clone();
        assert!(!rows_distinct(&e));
    }

    #[test]
    fn budget() {
        let ctx = FieldCtx::new(3).unwrap();
        let params = auto_params(&ctx, 2).unwrap();
        let err = build_oa(&ctx, &params, 100).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { needed: 243, .. }));
    }

    #[test]
    fn csv_round_trip_and_digest() {
        let (ctx, a) = oa(2, 3);
        let csv = a.to_csv();
        assert_eq!(parse_csv(&csv).unwrap(), a.entries());
        let s1 = serde_json::to_string(&a.sidecar(&ctx)).unwrap();
        let (ctx2, a2) = oa(2, 3);
        assert_eq!(s1, serde_json::to_string(&a2.sidecar(&ctx2)).unwrap());
        assert_eq!(a.sidecar(&ctx).csv_sha256.len(), 64);
        assert_eq!(a.level_map(), ctx.t0_set());
    }
}
