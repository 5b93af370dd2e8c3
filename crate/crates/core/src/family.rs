//! The family `{F^g : g ∈ R}` of forms whose affine zero sets pairwise meet in
//! exactly `q^{2n−2}` points, and the separation property on `W`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collineation::{act_on_form, build_r, Collineation, RSet};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq2Element};
use crate::geometry::{affine_tuples, quadratic_part, tuples_over, BMParams};

/// An affine form
/// `X_n^q − X_n + Σ_{i<n} [a^q X_i^{2q} − a X_i² − (b^q−b) X_i^{q+1} + u_i X_i^q + v_i X_i] + c`.
///
/// Every image `F^g` of the base form `F` of `B_{a,b}` has this shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    params: BMParams,
    transform: Collineation,
    lin_q: Vec<Fq2Element>,
    lin: Vec<Fq2Element>,
    constant: Fq2Element,
}

impl AffineForm {
    /// The form `F` of `B_{a,b}` itself.
    pub fn base(params: &BMParams) -> Self {
        let k = params.n() - 1;
        AffineForm {
            params: params.clone(),
            transform: Collineation::identity(params.n()),
            lin_q: vec![Fq2Element::ZERO; k],
            lin: vec![Fq2Element::ZERO; k],
            constant: Fq2Element::ZERO,
        }
    }

    pub(crate) fn from_parts(
        params: BMParams,
        transform: Collineation,
        lin_q: Vec<Fq2Element>,
        lin: Vec<Fq2Element>,
        constant: Fq2Element,
    ) -> Self {
        AffineForm { params, transform, lin_q, lin, constant }
    }

    pub fn params(&self) -> &BMParams {
        &self.params
    }

    /// The collineation `g` with `self = F^g`.
    pub fn transform(&self) -> &Collineation {
        &self.transform
    }

    /// Coefficient of `X_{i+1}^q`.
    pub fn coeff_xq(&self, i: usize) -> Fq2Element {
        self.lin_q[i]
    }

    /// Coefficient of `X_{i+1}`.
    pub fn coeff_x(&self, i: usize) -> Fq2Element {
        self.lin[i]
    }

    pub fn constant(&self) -> Fq2Element {
        self.constant
    }

    /// The form with `X_n` dropped, evaluated at `(x_1, …, x_{n−1})`.
    pub fn eval_head(&self, ctx: &FieldCtx, head: &[Fq2Element]) -> Fq2Element {
        let mut acc = ctx.add(quadratic_part(ctx, &self.params, head), self.constant);
        for (i, &x) in head.iter().enumerate() {
            let t = ctx.add(ctx.mul(self.lin_q[i], ctx.frobenius(x)), ctx.mul(self.lin[i], x));
            acc = ctx.add(acc, t);
        }
        acc
    }

    /// Value at the affine point `(x_1, …, x_n)`.
    pub fn eval(&self, ctx: &FieldCtx, x: &[Fq2Element]) -> Fq2Element {
        let n = self.params.n();
        let xn = x[n - 1];
        ctx.add(ctx.sub(ctx.frobenius(xn), xn), self.eval_head(ctx, &x[..n - 1]))
    }

    /// Affine zeros, lexicographic.
    pub fn zero_set(&self, ctx: &FieldCtx) -> Vec<Vec<Fq2Element>> {
        let mut out = Vec::new();
        for head in affine_tuples(ctx, self.params.n() - 1) {
            let mut roots = ctx.artin_schreier_roots(ctx.neg(self.eval_head(ctx, &head)));
            roots.sort();
            for r in roots {
                let mut x = head.clone();
                x.push(r);
                out.push(x);
            }
        }
        out
    }
}

/// `W = {(1, x_1, …, x_n) : x_n ∈ C}`, stored as affine coordinate vectors in
/// lexicographic order (transversal order in the last slot).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WSet {
    points: Vec<Vec<Fq2Element>>,
}

impl WSet {
    pub fn new(ctx: &FieldCtx, n: usize) -> Self {
        let mut points = Vec::new();
        for head in affine_tuples(ctx, n - 1) {
            for &c in ctx.transversal() {
                let mut x = head.clone();
                x.push(c);
                points.push(x);
            }
        }
        WSet { points }
    }

    pub fn points(&self) -> &[Vec<Fq2Element>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(ctx: &FieldCtx, x: &[Fq2Element]) -> bool {
        x.last().is_some_and(|c| ctx.transversal().contains(c))
    }
}

/// `{F^g : g ∈ R}` in R order.
pub fn family(ctx: &FieldCtx, params: &BMParams) -> Result<Vec<AffineForm>> {
    let r = build_r(ctx, params)?;
    family_from_r(ctx, params, &r)
}

pub fn family_from_r(ctx: &FieldCtx, params: &BMParams, r: &RSet) -> Result<Vec<AffineForm>> {
    let base = AffineForm::base(params);
    r.members()
        .par_iter()
        .map(|g| act_on_form(ctx, g, &base))
        .collect()
}

fn check_same_family(f1: &AffineForm, f2: &AffineForm) -> Result<()> {
    if f1.params != f2.params {
        return Err(Error::Precondition("forms come from different parameters".into()));
    }
    Ok(())
}

/// Number of affine points on both `V(F1)` and `V(F2)`.
///
/// Both forms are `X_n^q − X_n + h(x')`, so a common zero needs equal head
/// values, after which `x_n` ranges over the Artin–Schreier coset.
pub fn intersection_count(ctx: &FieldCtx, f1: &AffineForm, f2: &AffineForm) -> Result<u64> {
    check_same_family(f1, f2)?;
    let mut count = 0u64;
    for head in affine_tuples(ctx, f1.params.n() - 1) {
        let h1 = f1.eval_head(ctx, &head);
        if h1 == f2.eval_head(ctx, &head) {
            count += ctx.artin_schreier_roots(ctx.neg(h1)).len() as u64;
        }
    }
    Ok(count)
}

/// Head values of each form over all of GF(q²)^{n−1}.
fn head_tables(ctx: &FieldCtx, forms: &[AffineForm]) -> Vec<Vec<Fq2Element>> {
    let Some(first) = forms.first() else {
        return Vec::new();
    };
    let heads: Vec<Vec<Fq2Element>> = affine_tuples(ctx, first.params.n() - 1).collect();
    forms
        .par_iter()
        .map(|f| heads.iter().map(|h| f.eval_head(ctx, h)).collect())
        .collect()
}

/// Intersection counts of all unordered pairs `i < j`, in lexicographic pair order.
pub fn pairwise_counts(ctx: &FieldCtx, forms: &[AffineForm]) -> Result<Vec<u64>> {
    if let Some(f) = forms.first() {
        for g in forms {
            check_same_family(f, g)?;
        }
    }
    let tables = head_tables(ctx, forms);
    let fibre: Vec<u64> = tables
        .first()
        .map(|t| t.iter().map(|&h| ctx.artin_schreier_roots(ctx.neg(h)).len() as u64).collect())
        .unwrap_or_default();
    let k = forms.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    Ok(pairs
        .par_iter()
        .map(|&(i, j)| {
            tables[i]
                .iter()
                .zip(&tables[j])
                .zip(&fibre)
                .filter(|((a, b), _)| a == b)
                .map(|(_, &f)| if f == 0 { 0 } else { ctx.q() as u64 })
                .sum()
        })
        .collect())
}

/// `s_i = 2a(α_i − α'_i) + (b^q − b)(α_i^q − α'^q_i)`.
pub fn s_coefficients(
    ctx: &FieldCtx,
    params: &BMParams,
    g: &Collineation,
    g2: &Collineation,
) -> Vec<Fq2Element> {
    let two_a = ctx.add(params.a(), params.a());
    g.alpha_head()
        .iter()
        .zip(g2.alpha_head())
        .map(|(&x, &y)| {
            let d = ctx.sub(x, y);
            ctx.add(ctx.mul(two_a, d), ctx.mul(params.b_diff(), ctx.frobenius(d)))
        })
        .collect()
}

/// The first member of the family (in R order) taking different values at
/// the two points of `W`.
pub fn separating_g(
    ctx: &FieldCtx,
    forms: &[AffineForm],
    p: &[Fq2Element],
    p2: &[Fq2Element],
) -> Result<Collineation> {
    if p == p2 {
        return Err(Error::Precondition("the two points coincide".into()));
    }
    if !WSet::contains(ctx, p) || !WSet::contains(ctx, p2) {
        return Err(Error::Precondition("points must lie in W".into()));
    }
    forms
        .iter()
        .find(|f| f.eval(ctx, p) != f.eval(ctx, p2))
        .map(|f| f.transform().clone())
        .ok_or_else(|| Error::TheoremViolation("no member of R separates the two points".into()))
}

/// Row map `P ↦ (F^g(P))_{g ∈ R}` over `W`.
pub fn row_map(ctx: &FieldCtx, forms: &[AffineForm], w: &WSet) -> Vec<Vec<Fq2Element>> {
    w.points()
        .par_iter()
        .map(|x| forms.iter().map(|f| f.eval(ctx, x)).collect())
        .collect()
}

pub fn row_map_injective(rows: &[Vec<Fq2Element>]) -> bool {
    let mut sorted: Vec<&Vec<Fq2Element>> = rows.iter().collect();
    sorted.sort();
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Machine-readable summary of a family check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub n: usize,
    pub q: u32,
    pub family_size: usize,
    pub expected_family_size: u64,
    pub distinct_zero_sets: bool,
    pub expected_intersection: u64,
    /// intersection size ↦ number of unordered pairs
    pub pair_histogram: BTreeMap<u64, u64>,
    pub values_in_t0: bool,
    pub separation_ok: bool,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.family_size as u64 == self.expected_family_size
            && self.distinct_zero_sets
            && self.values_in_t0
            && self.separation_ok
            && self.pair_histogram.keys().all(|&k| k == self.expected_intersection)
    }
}

pub fn verify_family(ctx: &FieldCtx, params: &BMParams) -> Result<FamilyReport> {
    let n = params.n();
    let q = ctx.q() as u64;
    let forms = family(ctx, params)?;
    let mut zero_sets: Vec<Vec<Vec<Fq2Element>>> = forms.par_iter().map(|f| f.zero_set(ctx)).collect();
    zero_sets.sort();
    zero_sets.dedup();
    let mut pair_histogram = BTreeMap::new();
    for c in pairwise_counts(ctx, &forms)? {
        *pair_histogram.entry(c).or_insert(0) += 1;
    }
    let w = WSet::new(ctx, n);
    let rows = row_map(ctx, &forms, &w);
    let values_in_t0 = rows.iter().flatten().all(|&v| ctx.trace(v).is_zero());
    Ok(FamilyReport {
        n,
        q: ctx.q(),
        family_size: forms.len(),
        expected_family_size: q.pow(2 * n as u32 - 2),
        distinct_zero_sets: zero_sets.len() == forms.len(),
        expected_intersection: q.pow(2 * n as u32 - 2),
        pair_histogram,
        values_in_t0,
        separation_ok: row_map_injective(&rows),
    })
}

/// Number of `(X_1, …, X_{n−1})` with `tr(Σ s_i X_i) = 0`.
pub fn trace_zero_tuple_count(ctx: &FieldCtx, s: &[Fq2Element]) -> u64 {
    tuples_over(ctx.elements().collect(), s.len())
        .filter(|x| ctx.trace(ctx.dot(s, x)).is_zero())
        .count() as u64
}
