//! Evaluation codes from BM quasi-Hermitian varieties of PG(3, q²).
//!
//! Columns are indexed by `t = ψ(i)` with `ψ(0) = 0` and `ψ(i) = ω^i`, and the
//! `i`-th form uses the pair `(t + εt², t³ + εt⁴)`. Rows are the points of
//! `W = GF(q²)² × C` in lexicographic order.

use std::collections::HashSet;
use std::fmt::Write as _;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collineation::Collineation;
use crate::error::{Error, Result};
use crate::family::{AffineForm, WSet};
use crate::field::{FieldCtx, FieldDescription, Fq2Element};
use crate::geometry::{BMParams, ParamsDescription};
use crate::linalg::{determinant, inverse, mat_vec, vandermonde, Echelon};

/// Code dimension of the construction.
pub const K: usize = 5;

/// Default cap on the number of codewords enumerated.
pub const DEFAULT_CODEWORD_BUDGET: u128 = 10_000_000;

/// `ψ(i)` for `i = 0, …, q−1`.
pub fn psi_points(ctx: &FieldCtx) -> Vec<Fq2Element> {
    let w = ctx.subfield_primitive();
    (0..ctx.q() as u64)
        .map(|i| if i == 0 { Fq2Element::ZERO } else { ctx.pow(w, i) })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaSet {
    ts: Vec<Fq2Element>,
    pairs: Vec<(Fq2Element, Fq2Element)>,
    degraded: bool,
}

impl OmegaSet {
    /// Parameter `t = ψ(i)` of each pair.
    pub fn ts(&self) -> &[Fq2Element] {
        &self.ts
    }

    pub fn pairs(&self) -> &[(Fq2Element, Fq2Element)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Set when `q ≤ 4`, where the MDS statements do not apply.
    pub fn degraded(&self) -> bool {
        self.degraded
    }
}

pub fn omega_set(ctx: &FieldCtx) -> OmegaSet {
    let e = ctx.epsilon();
    let ts = psi_points(ctx);
    let pairs = ts
        .iter()
        .map(|&t| {
            let t2 = ctx.mul(t, t);
            let t3 = ctx.mul(t2, t);
            let t4 = ctx.mul(t3, t);
            (ctx.add(t, ctx.mul(e, t2)), ctx.add(t3, ctx.mul(e, t4)))
        })
        .collect();
    OmegaSet { ts, pairs, degraded: ctx.q() <= 4 }
}

/// Whether the rows `(1, ω_1, ω_2, ω_1^q, ω_2^q)` at the five indices are
/// linearly independent over GF(q²).
pub fn check_luc1(ctx: &FieldCtx, omega: &OmegaSet, idx: [usize; 5]) -> Result<bool> {
    if let Some(&i) = idx.iter().find(|&&i| i >= omega.len()) {
        return Err(Error::Precondition(format!("index {i} out of range for |Ω| = {}", omega.len())));
    }
    let m: Vec<Vec<Fq2Element>> = idx
        .iter()
        .map(|&i| {
            let (w1, w2) = omega.pairs[i];
            vec![Fq2Element::ONE, w1, w2, ctx.frobenius(w1), ctx.frobenius(w2)]
        })
        .collect();
    Ok(!determinant(ctx, &m).is_zero())
}

/// The form `F_i` attached to `(ω_1, ω_2)`.
pub fn omega_form(ctx: &FieldCtx, params: &BMParams, w1: Fq2Element, w2: Fq2Element) -> AffineForm {
    let two_a = ctx.add(params.a(), params.a());
    let two_aq = ctx.add(params.a_q(), params.a_q());
    let d = params.b_diff();
    let (lin_q, lin): (Vec<_>, Vec<_>) = [w1, w2]
        .iter()
        .map(|&w| {
            let wq = ctx.frobenius(w);
            let u = ctx.sub(ctx.mul(two_aq, wq), ctx.mul(d, w));
            let v = ctx.neg(ctx.add(ctx.mul(two_a, w), ctx.mul(d, wq)));
            (u, v)
        })
        .unzip();
    let shift = Collineation::new(vec![w1, w2, Fq2Element::ZERO], vec![Fq2Element::ZERO; 2])
        .expect("n = 3 shapes");
    AffineForm::from_parts(params.clone(), shift, lin_q, lin, Fq2Element::ZERO)
}

/// `C(F_1, …, F_q; W)` over T0.
#[derive(Clone, Debug)]
pub struct EvalCode {
    params: BMParams,
    omega: OmegaSet,
    forms: Vec<AffineForm>,
    domain: WSet,
    codewords: Vec<Vec<Fq2Element>>,
}

impl EvalCode {
    pub fn params(&self) -> &BMParams {
        &self.params
    }

    pub fn omega(&self) -> &OmegaSet {
        &self.omega
    }

    pub fn forms(&self) -> &[AffineForm] {
        &self.forms
    }

    pub fn domain(&self) -> &WSet {
        &self.domain
    }

    /// Codeword of the `j`-th point of `W`.
    pub fn codewords(&self) -> &[Vec<Fq2Element>] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Distinct points of `W` give distinct codewords.
    pub fn encoding_injective(&self) -> bool {
        let mut s: Vec<&Vec<Fq2Element>> = self.codewords.iter().collect();
        s.par_sort();
        s.windows(2).all(|w| w[0] != w[1])
    }
}

pub fn build_code(ctx: &FieldCtx, params: &BMParams, omega: &OmegaSet, budget: u128) -> Result<EvalCode> {
    if params.n() != 3 {
        return Err(Error::InvalidParams(format!("codes need n = 3, got n = {}", params.n())));
    }
    let size = (ctx.q() as u128).pow(5);
    if size > budget {
        return Err(Error::BudgetExceeded { what: "codewords", needed: size, budget });
    }
    let forms: Vec<AffineForm> = omega.pairs().iter().map(|&(w1, w2)| omega_form(ctx, params, w1, w2)).collect();
    let domain = WSet::new(ctx, 3);
    let codewords: Vec<Vec<Fq2Element>> = domain
        .points()
        .par_iter()
        .map(|x| forms.iter().map(|f| f.eval(ctx, x)).collect())
        .collect();
    if let Some(v) = codewords.iter().flatten().find(|&&v| !ctx.trace(v).is_zero()) {
        return Err(Error::TheoremViolation(format!("coordinate {} is not trace-zero", ctx.format(*v))));
    }
    Ok(EvalCode { params: params.clone(), omega: omega.clone(), forms, domain, codewords })
}

/// The point of `W` whose codeword is the sum of the codewords of `p1` and `p2`.
pub fn domain_sum(ctx: &FieldCtx, params: &BMParams, p1: &[Fq2Element], p2: &[Fq2Element]) -> Vec<Fq2Element> {
    let (x1, y1, z1) = (p1[0], p1[1], p1[2]);
    let (x2, y2, z2) = (p2[0], p2[1], p2[2]);
    let two_a = ctx.add(params.a(), params.a());
    let cross = ctx.add(ctx.mul(x1, x2), ctx.mul(y1, y2));
    let cross_q = ctx.add(ctx.mul(ctx.frobenius(x1), x2), ctx.mul(ctx.frobenius(y1), y2));
    let c = ctx.add(ctx.mul(two_a, cross), ctx.mul(params.b_diff(), cross_q));
    let z = ctx.sub(ctx.add(z1, z2), c);
    // shift by s ∈ GF(q) into C
    let (_, z_1) = ctx.decompose(z);
    vec![ctx.add(x1, x2), ctx.add(y1, y2), ctx.mul(ctx.epsilon(), z_1)]
}

/// A linear code over GF(q), stored as its full codeword list.
#[derive(Clone, Debug)]
pub struct FqLinearCode {
    length: usize,
    words: Vec<Vec<Fq2Element>>,
    basis: Echelon,
}

impl FqLinearCode {
    fn from_words(ctx: &FieldCtx, length: usize, words: Vec<Vec<Fq2Element>>) -> Self {
        let mut basis = Echelon::new();
        for w in &words {
            basis.insert(ctx, w);
        }
        FqLinearCode { length, words, basis }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.basis.rank()
    }

    pub fn words(&self) -> &[Vec<Fq2Element>] {
        &self.words
    }

    /// Reduced echelon generator matrix; `[I | P]` when the code is systematic
    /// on the leading coordinates.
    pub fn generator(&self) -> &[Vec<Fq2Element>] {
        self.basis.rows()
    }

    pub fn is_systematic(&self) -> bool {
        self.basis.is_systematic()
    }

    /// Generator rows as GF(q) labels, one row per line, space separated.
    pub fn generator_text(&self, ctx: &FieldCtx) -> String {
        let mut s = String::new();
        for row in self.generator() {
            let labels = row.iter().map(|&x| ctx.subfield_label(x).expect("entries lie in GF(q)"));
            let _ = writeln!(s, "{}", labels.format(" "));
        }
        s
    }

    /// Closure under addition and GF(q)-scaling. With `stride = 1` every
    /// pair is tested; larger strides sample pairs `(i, i·stride mod N)`.
    pub fn is_linear(&self, ctx: &FieldCtx, stride: usize) -> bool {
        let set: HashSet<&Vec<Fq2Element>> = self.words.iter().collect();
        if set.len() != self.words.len() {
            return false;
        }
        let n = self.words.len();
        let add_ok = (0..n).into_par_iter().all(|i| {
            let partners: Box<dyn Iterator<Item = usize>> = if stride <= 1 {
                Box::new(i..n)
            } else {
                Box::new(std::iter::once((i * stride + 1) % n))
            };
            partners.into_iter().all(|j| {
                let s: Vec<_> = self.words[i].iter().zip(&self.words[j]).map(|(&a, &b)| ctx.add(a, b)).collect();
                set.contains(&s)
            })
        });
        let scale_ok = self.words.par_iter().step_by(stride.max(1)).all(|w| {
            ctx.subfield().iter().all(|&l| {
                let s: Vec<_> = w.iter().map(|&x| ctx.mul(l, x)).collect();
                set.contains(&s)
            })
        });
        add_ok && scale_ok
    }
}

/// Divides every coordinate by θ.
pub fn scale_to_fq(ctx: &FieldCtx, code: &EvalCode) -> Result<FqLinearCode> {
    let words = scale_words(ctx, code.codewords().iter().map(|w| w.as_slice()))?;
    Ok(FqLinearCode::from_words(ctx, code.omega().len(), words))
}

fn scale_words<'a>(ctx: &FieldCtx, words: impl Iterator<Item = &'a [Fq2Element]>) -> Result<Vec<Vec<Fq2Element>>> {
    let theta_inv = ctx.inv(ctx.theta()).expect("theta is nonzero");
    words
        .map(|w| {
            w.iter()
                .map(|&x| {
                    let y = ctx.mul(x, theta_inv);
                    if ctx.is_in_subfield(y) {
                        Ok(y)
                    } else {
                        Err(Error::TheoremViolation(format!("{}/θ is outside GF(q)", ctx.format(x))))
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub length: usize,
    pub dimension: usize,
    pub min_distance: usize,
    /// Most zero coordinates on a nonzero codeword.
    pub max_zeros: usize,
    pub mds: bool,
}

/// Minimum weight over nonzero codewords.
pub fn min_distance(code: &FqLinearCode, budget: u128) -> Result<DistanceReport> {
    let size = code.words.len() as u128;
    if size > budget {
        return Err(Error::BudgetExceeded { what: "codewords", needed: size, budget });
    }
    let d = code
        .words
        .par_iter()
        .map(|w| w.iter().filter(|x| !x.is_zero()).count())
        .filter(|&wt| wt > 0)
        .min()
        .unwrap_or(0);
    let k = code.dimension();
    Ok(DistanceReport {
        length: code.length,
        dimension: k,
        min_distance: d,
        max_zeros: code.length - d,
        mds: k > 0 && d + k == code.length + 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsReport {
    pub codewords: usize,
    pub mismatches: usize,
    pub distinct_polynomials: usize,
    /// Every polynomial of degree ≤ 4 is hit.
    pub surjective: bool,
}

impl RsReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.surjective
    }
}

/// Coefficients `(f_0, …, f_4)` of the polynomial through the first five
/// coordinates, `f(ψ(i)) = c_i`.
pub fn interpolate(ctx: &FieldCtx, vinv: &[Vec<Fq2Element>], word: &[Fq2Element]) -> Vec<Fq2Element> {
    mat_vec(ctx, vinv, &word[..K])
}

fn poly_eval(ctx: &FieldCtx, coeffs: &[Fq2Element], t: Fq2Element) -> Fq2Element {
    coeffs.iter().rev().fold(Fq2Element::ZERO, |acc, &c| ctx.add(ctx.mul(acc, t), c))
}

/// Checks that each codeword is `(f(ψ(0)), …, f(ψ(q−1)))` for some `f` of
/// degree ≤ 4, and that all `q⁵` such `f` occur.
pub fn rs_equivalence_check(ctx: &FieldCtx, code: &FqLinearCode, omega: &OmegaSet) -> Result<RsReport> {
    let pts = omega.ts();
    if pts.len() < K || code.length() < pts.len() {
        return Err(Error::Precondition(format!("need at least {K} evaluation points")));
    }
    let vinv = inverse(ctx, &vandermonde(ctx, &pts[..K], K)).expect("distinct points");
    let polys: Vec<(Vec<Fq2Element>, bool)> = code
        .words()
        .par_iter()
        .map(|w| {
            let f = interpolate(ctx, &vinv, w);
            let ok = pts.iter().zip(w).skip(K).all(|(&t, &c)| poly_eval(ctx, &f, t) == c);
            (f, ok)
        })
        .collect();
    let mismatches = polys.iter().filter(|(_, ok)| !ok).count();
    let distinct: HashSet<&Vec<Fq2Element>> = polys.iter().map(|(f, _)| f).collect();
    let all = (ctx.q() as usize).pow(K as u32);
    Ok(RsReport {
        codewords: code.words().len(),
        mismatches,
        distinct_polynomials: distinct.len(),
        surjective: distinct.len() == all,
    })
}

/// `u = 2aε + (b^q − b)ε^q`; the leading coefficient in `t` of a codeword
/// at `(x, y, z)` is `((u·y)^q − u·y)/θ`.
pub fn leading_coefficient_multiplier(ctx: &FieldCtx, params: &BMParams) -> Fq2Element {
    let e = ctx.epsilon();
    let two_a = ctx.add(params.a(), params.a());
    ctx.add(ctx.mul(two_a, e), ctx.mul(params.b_diff(), ctx.frobenius(e)))
}

/// The extra coordinate `(u·y)^q − u·y` at the point `(x, y, z)`.
pub fn extension_coordinate(ctx: &FieldCtx, u: Fq2Element, point: &[Fq2Element]) -> Fq2Element {
    let uy = ctx.mul(u, point[1]);
    ctx.sub(ctx.frobenius(uy), uy)
}

/// Appends the evaluation at infinity, giving a `[q+1, 5, q−3]` code.
pub fn doubly_extend(ctx: &FieldCtx, code: &EvalCode) -> Result<FqLinearCode> {
    let u = leading_coefficient_multiplier(ctx, code.params());
    let raw: Vec<Vec<Fq2Element>> = code
        .codewords()
        .iter()
        .zip(code.domain().points())
        .map(|(w, p)| {
            let mut w = w.clone();
            w.push(extension_coordinate(ctx, u, p));
            w
        })
        .collect();
    let words = scale_words(ctx, raw.iter().map(|w| w.as_slice()))?;
    Ok(FqLinearCode::from_words(ctx, code.omega().len() + 1, words))
}

/// JSON metadata written next to an exported generator matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMetadata {
    pub q: u32,
    pub field: FieldDescription,
    pub params: ParamsDescription,
    pub epsilon: u32,
    pub theta: u32,
    /// `(ω_1, ω_2)` as element indices, in column order.
    pub omega: Vec<(u32, u32)>,
    /// `ψ(i)` as GF(q) labels.
    pub evaluation_points: Vec<u32>,
    pub degraded: bool,
    pub doubly_extended: bool,
    pub distance: DistanceReport,
    pub systematic: bool,
    pub rs_equivalence: Option<RsReport>,
}
