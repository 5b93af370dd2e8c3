//! Points of PG(n, q²), the BM quasi-Hermitian variety `M_{a,b}` and its
//! hyperplane intersection numbers.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq2Element};

/// Default cap on the number of points of PG(n, q²) a hyperplane scan may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// All `len`-tuples over GF(q²), lexicographic with the first coordinate most
/// significant.
pub fn affine_tuples(ctx: &FieldCtx, len: usize) -> impl Iterator<Item = Vec<Fq2Element>> + '_ {
    tuples_over(ctx.elements().collect(), len)
}

/// All `len`-tuples over `alphabet`, lexicographic in alphabet order.
pub fn tuples_over(alphabet: Vec<Fq2Element>, len: usize) -> impl Iterator<Item = Vec<Fq2Element>> {
    let base = alphabet.len() as u64;
    let total = base.checked_pow(len as u32).expect("tuple count overflows u64");
    (0..total).map(move |mut code| {
        let mut out = vec![Fq2Element::ZERO; len];
        for slot in out.iter_mut().rev() {
            *slot = alphabet[(code % base) as usize];
            code /= base;
        }
        out
    })
}

/// A point of PG(n, q²) in normalized homogeneous coordinates: the first
/// nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    coords: Vec<Fq2Element>,
}

impl ProjPoint {
    pub fn new(ctx: &FieldCtx, mut coords: Vec<Fq2Element>) -> Result<Self> {
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .copied()
            .ok_or_else(|| Error::Precondition("the zero vector is not a projective point".into()))?;
        if lead != Fq2Element::ONE {
            let inv = ctx.inv(lead).expect("nonzero");
            for c in coords.iter_mut() {
                *c = ctx.mul(*c, inv);
            }
        }
        Ok(ProjPoint { coords })
    }

    /// The affine point `(1, x_1, …, x_n)`.
    pub fn affine(x: &[Fq2Element]) -> Self {
        let mut coords = Vec::with_capacity(x.len() + 1);
        coords.push(Fq2Element::ONE);
        coords.extend_from_slice(x);
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[Fq2Element] {
        &self.coords
    }

    /// Projective dimension n.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// `(x_1, …, x_n)` when `x_0 ≠ 0`.
    pub fn affine_coords(&self) -> Option<&[Fq2Element]> {
        (self.coords[0] == Fq2Element::ONE).then(|| &self.coords[1..])
    }

    pub fn format(&self, ctx: &FieldCtx) -> String {
        let parts: Vec<String> = self.coords.iter().map(|&c| ctx.format(c)).collect();
        parts.join(" ")
    }
}

/// All points of PG(dim, q²), normalized.
pub fn projective_points(ctx: &FieldCtx, dim: usize) -> impl Iterator<Item = ProjPoint> + '_ {
    (0..=dim).flat_map(move |lead| {
        affine_tuples(ctx, dim - lead).map(move |tail| {
            let mut coords = vec![Fq2Element::ZERO; lead];
            coords.push(Fq2Element::ONE);
            coords.extend(tail);
            ProjPoint { coords }
        })
    })
}

/// `|PG(dim, q²)|`.
pub fn projective_space_size(q: u32, dim: usize) -> u128 {
    let big_q = q as u128 * q as u128;
    (0..=dim as u32).map(|i| big_q.pow(i)).sum()
}

/// Which condition certifies the parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "classical")]
    Classical,
    #[serde(rename = "QH1")]
    Qh1,
    #[serde(rename = "QH2")]
    Qh2,
    #[serde(rename = "QH3")]
    Qh3,
    #[serde(rename = "QH4")]
    Qh4,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Classical => "classical",
            Condition::Qh1 => "QH1",
            Condition::Qh2 => "QH2",
            Condition::Qh3 => "QH3",
            Condition::Qh4 => "QH4",
        };
        f.write_str(s)
    }
}

/// Validated parameters `(n, a, b)` of `B_{a,b}` ⊂ PG(n, q²).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMParams {
    n: usize,
    a: Fq2Element,
    b: Fq2Element,
    condition: Condition,
    a_q: Fq2Element,
    b_diff: Fq2Element,
}

impl BMParams {
    fn build(ctx: &FieldCtx, n: usize, a: Fq2Element, b: Fq2Element, condition: Condition) -> Self {
        BMParams {
            n,
            a,
            b,
            condition,
            a_q: ctx.frobenius(a),
            b_diff: ctx.sub(ctx.frobenius(b), b),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> Fq2Element {
        self.a
    }

    pub fn b(&self) -> Fq2Element {
        self.b
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    /// `a^q`.
    pub fn a_q(&self) -> Fq2Element {
        self.a_q
    }

    /// `b^q − b`.
    pub fn b_diff(&self) -> Fq2Element {
        self.b_diff
    }
}

/// Serializable form of [`BMParams`]; `a` and `b` are canonical element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsDescription {
    pub n: usize,
    pub a: u32,
    pub b: u32,
    pub a_text: String,
    pub b_text: String,
    pub condition: Condition,
}

impl BMParams {
    pub fn describe(&self, ctx: &FieldCtx) -> ParamsDescription {
        ParamsDescription {
            n: self.n,
            a: self.a.index(),
            b: self.b.index(),
            a_text: ctx.format(self.a),
            b_text: ctx.format(self.b),
            condition: self.condition,
        }
    }
}

fn check_shape(ctx: &FieldCtx, n: usize, b: Fq2Element) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("dimension n = {n} must be at least 2")));
    }
    if ctx.is_in_subfield(b) {
        return Err(Error::InvalidParams(format!("b = {} lies in GF(q)", ctx.format(b))));
    }
    Ok(())
}

/// The first of QH1–QH4 satisfied by `(n, a, b)`, if any.
pub fn qh_condition(ctx: &FieldCtx, n: usize, a: Fq2Element, b: Fq2Element) -> Option<Condition> {
    let q_odd = ctx.p() != 2;
    let n_odd = n % 2 == 1;
    if q_odd {
        let d = ctx.sub(ctx.frobenius(b), b);
        let disc = ctx.add(ctx.mul(ctx.from_prime(4), ctx.norm(a)), ctx.mul(d, d));
        if n_odd && !disc.is_zero() {
            return Some(Condition::Qh1);
        }
        if !n_odd && !disc.is_zero() && !ctx.is_square_in_subfield(disc) {
            return Some(Condition::Qh2);
        }
        None
    } else if n_odd {
        Some(Condition::Qh4)
    } else {
        // a^{q+1}/(b^q+b)^2 lies in GF(q); the trace condition is read over GF(2).
        let s = ctx.trace(b);
        let ratio = ctx.div(ctx.norm(a), ctx.mul(s, s)).expect("b outside GF(q) has nonzero trace in char 2");
        ctx.absolute_trace(ratio).is_zero().then_some(Condition::Qh3)
    }
}

/// Validates non-classical parameters (`a ≠ 0`).
pub fn validate_params(ctx: &FieldCtx, n: usize, a: Fq2Element, b: Fq2Element) -> Result<BMParams> {
    check_shape(ctx, n, b)?;
    if a.is_zero() {
        return Err(Error::InvalidParams(
            "a = 0 gives the classical variety; use classical_params".into(),
        ));
    }
    let condition = qh_condition(ctx, n, a, b).ok_or_else(|| {
        Error::InvalidParams(format!(
            "(n, a, b) = ({n}, {}, {}) satisfies none of QH1-QH4",
            ctx.format(a),
            ctx.format(b)
        ))
    })?;
    Ok(BMParams::build(ctx, n, a, b, condition))
}

/// Parameters of the classical (Hermitian) case `a = 0`.
pub fn classical_params(ctx: &FieldCtx, n: usize, b: Fq2Element) -> Result<BMParams> {
    check_shape(ctx, n, b)?;
    Ok(BMParams::build(ctx, n, Fq2Element::ZERO, b, Condition::Classical))
}

/// First valid non-classical pair in lexicographic `(a, b)` order.
pub fn scan_params(ctx: &FieldCtx, n: usize) -> Option<BMParams> {
    if n < 2 {
        return None;
    }
    ctx.elements()
        .skip(1)
        .flat_map(|a| ctx.elements().map(move |b| (a, b)))
        .find_map(|(a, b)| validate_params(ctx, n, a, b).ok())
}

/// [`scan_params`], falling back to the classical variety with the smallest
/// admissible `b` when no non-classical pair exists (n even and q ∈ {2, 3}).
pub fn auto_params(ctx: &FieldCtx, n: usize) -> Result<BMParams> {
    if let Some(p) = scan_params(ctx, n) {
        return Ok(p);
    }
    let b = ctx
        .elements()
        .find(|&b| !ctx.is_in_subfield(b))
        .expect("GF(q^2) is larger than GF(q)");
    classical_params(ctx, n, b)
}

/// `a^q Σ x_i^{2q} − a Σ x_i² − (b^q − b) Σ x_i^{q+1}` over the given
/// coordinates `x_1, …, x_{n−1}`.
pub fn quadratic_part(ctx: &FieldCtx, params: &BMParams, xs: &[Fq2Element]) -> Fq2Element {
    let mut acc = Fq2Element::ZERO;
    for &x in xs {
        let xq = ctx.frobenius(x);
        let t = ctx.sub(
            ctx.mul(params.a_q, ctx.mul(xq, xq)),
            ctx.mul(params.a, ctx.mul(x, x)),
        );
        acc = ctx.add(acc, ctx.sub(t, ctx.mul(params.b_diff, ctx.mul(xq, x))));
    }
    acc
}

/// The affine equation of `B_{a,b}` evaluated at `(x_1, …, x_n)`.
pub fn bab_affine_eval(ctx: &FieldCtx, params: &BMParams, x: &[Fq2Element]) -> Fq2Element {
    debug_assert_eq!(x.len(), params.n);
    let (head, last) = x.split_at(params.n - 1);
    let xn = last[0];
    ctx.add(ctx.sub(ctx.frobenius(xn), xn), quadratic_part(ctx, params, head))
}

/// Duplicate-free, sorted set of points of PG(n, q²).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    n: usize,
    points: Vec<ProjPoint>,
}

impl PointSet {
    pub fn new(n: usize, mut points: Vec<ProjPoint>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
        }
        points.sort();
        points.dedup();
        Ok(PointSet { n, points })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// One point per line, coordinates separated by spaces.
    pub fn export_text(&self, ctx: &FieldCtx) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&p.format(ctx));
            out.push('\n');
        }
        out
    }
}

/// Affine points of `B_{a,b}`, in lexicographic order of `(x_1, …, x_{n−1})`
/// and then of `x_n`.
pub fn affine_points(ctx: &FieldCtx, params: &BMParams) -> Vec<Vec<Fq2Element>> {
    let mut out = Vec::new();
    for head in affine_tuples(ctx, params.n - 1) {
        let rhs = ctx.neg(quadratic_part(ctx, params, &head));
        let mut roots = ctx.artin_schreier_roots(rhs);
        roots.sort();
        for xn in roots {
            let mut x = head.clone();
            x.push(xn);
            out.push(x);
        }
    }
    out
}

/// The Hermitian cone at infinity: points `(0, x_1, …, x_n)` with
/// `x_1^{q+1} + … + x_{n−1}^{q+1} = 0`, vertex `(0, …, 0, 1)`.
pub fn cone_at_infinity(ctx: &FieldCtx, n: usize) -> Vec<ProjPoint> {
    projective_points(ctx, n - 1)
        .filter(|p| {
            let c = p.coords();
            ctx.sum(c[..n - 1].iter().map(|&x| ctx.norm(x))).is_zero()
        })
        .map(|p| {
            let mut coords = vec![Fq2Element::ZERO];
            coords.extend_from_slice(p.coords());
            ProjPoint { coords }
        })
        .collect()
}

/// `M_{a,b} = (B_{a,b} ∖ Σ∞) ∪ F`.
pub fn bm_variety(ctx: &FieldCtx, params: &BMParams) -> PointSet {
    let mut points: Vec<ProjPoint> = affine_points(ctx, params)
        .iter()
        .map(|x| ProjPoint::affine(x))
        .collect();
    points.extend(cone_at_infinity(ctx, params.n));
    PointSet::new(params.n, points).expect("all points live in PG(n, q^2)")
}

fn sign(k: usize) -> i128 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `|H(n, q²)| = (q^{n+1} + (−1)^n)(q^n − (−1)^n)/(q² − 1)`.
pub fn hermitian_size(n: usize, q: u32) -> u128 {
    let q = q as i128;
    let v = (q.pow(n as u32 + 1) + sign(n)) * (q.pow(n as u32) - sign(n)) / (q * q - 1);
    v as u128
}

/// Size of a non-tangent hyperplane section of `H(n, q²)`.
pub fn secant_section_size(n: usize, q: u32) -> u128 {
    hermitian_size(n - 1, q)
}

/// Size of a tangent hyperplane section of `H(n, q²)`.
pub fn tangent_section_size(n: usize, q: u32) -> u128 {
    let qi = q as i128;
    let v = 1 + qi * qi * (qi.pow(n as u32 - 1) + sign(n)) * (qi.pow(n as u32 - 2) - sign(n))
        / (qi * qi - 1);
    v as u128
}

/// The expected two intersection numbers, ascending.
pub fn hermitian_characters(n: usize, q: u32) -> [u128; 2] {
    let (s, t) = (secant_section_size(n, q), tangent_section_size(n, q));
    [s.min(t), s.max(t)]
}

/// Multiset of hyperplane intersection sizes: size ↦ number of hyperplanes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum(pub BTreeMap<usize, usize>);

impl Spectrum {
    pub fn support(&self) -> Vec<usize> {
        self.0.keys().copied().collect()
    }

    pub fn hyperplanes(&self) -> usize {
        self.0.values().sum()
    }
}

/// Intersection sizes of `set` with every hyperplane of PG(n, q²).
pub fn character_spectrum(ctx: &FieldCtx, set: &PointSet, budget: u128) -> Result<Spectrum> {
    let total = projective_space_size(ctx.q(), set.n);
    if total > budget {
        return Err(Error::BudgetExceeded { what: "hyperplane enumeration", needed: total, budget });
    }
    let hyperplanes: Vec<ProjPoint> = projective_points(ctx, set.n).collect();
    let counts: Vec<usize> = hyperplanes
        .par_iter()
        .map(|u| {
            set.points
                .iter()
                .filter(|x| ctx.dot(u.coords(), x.coords()).is_zero())
                .count()
        })
        .collect();
    let mut spectrum = BTreeMap::new();
    for c in counts {
        *spectrum.entry(c).or_insert(0) += 1;
    }
    Ok(Spectrum(spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_numerology() {
        assert_eq!(hermitian_size(2, 3), 28);
        assert_eq!(hermitian_size(3, 3), 280);
        assert_eq!(hermitian_size(3, 2), 45);
        for q in [2, 3, 4, 5, 7] {
            assert_eq!(hermitian_size(2, q), (q as u128).pow(3) + 1);
            assert_eq!(hermitian_characters(2, q), [1, q as u128 + 1]);
        }
        assert_eq!(hermitian_characters(3, 3), [28, 37]);
        assert_eq!(hermitian_characters(3, 2), [9, 13]);
    }

    #[test]
    fn qh4_accepts_everything_for_odd_n_even_q() {
        let ctx = FieldCtx::new(2).unwrap();
        for a in ctx.elements().skip(1) {
            for b in ctx.elements().filter(|&b| !ctx.is_in_subfield(b)) {
                let p = validate_params(&ctx, 3, a, b).unwrap();
                assert_eq!(p.condition(), Condition::Qh4);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let ctx = FieldCtx::new(3).unwrap();
        let b_bad = ctx.from_prime(2);
        assert!(matches!(validate_params(&ctx, 2, Fq2Element::ONE, b_bad), Err(Error::InvalidParams(_))));
        let b = ctx.epsilon();
        assert!(matches!(validate_params(&ctx, 2, Fq2Element::ZERO, b), Err(Error::InvalidParams(_))));
        assert!(matches!(validate_params(&ctx, 1, Fq2Element::ONE, b), Err(Error::InvalidParams(_))));
        assert_eq!(classical_params(&ctx, 2, b).unwrap().condition(), Condition::Classical);
    }

    fn first_qh2_by_predicate(ctx: &FieldCtx) -> Option<(Fq2Element, Fq2Element)> {
        let q = ctx.q() as u64;
        let squares: Vec<_> = ctx.subfield().iter().map(|&s| ctx.mul(s, s)).collect();
        ctx.elements()
            .skip(1)
            .flat_map(|a| ctx.elements().map(move |b| (a, b)))
            .find(|&(a, b)| {
                if ctx.is_in_subfield(b) {
                    return false;
                }
                let d = ctx.sub(ctx.pow(b, q), b);
                let disc = ctx.add(ctx.mul(ctx.from_prime(4), ctx.pow(a, q + 1)), ctx.mul(d, d));
                !squares.contains(&disc)
            })
    }

    #[test]
    fn qh2_scan_matches_predicate() {
        // (b^q - b)^2 is always a non-square of GF(3) and 4a^{q+1} + (b^q - b)^2
        // is then 0 or 1, so no QH2 pair exists for q = 3.
        let ctx = FieldCtx::new(3).unwrap();
        assert_eq!(first_qh2_by_predicate(&ctx), None);
        assert_eq!(scan_params(&ctx, 2), None);
        assert_eq!(auto_params(&ctx, 2).unwrap().condition(), Condition::Classical);

        let ctx = FieldCtx::new(5).unwrap();
        let p = scan_params(&ctx, 2).unwrap();
        assert_eq!(Some((p.a(), p.b())), first_qh2_by_predicate(&ctx));
        assert_eq!(p.condition(), Condition::Qh2);
    }

    #[test]
    fn origin_on_variety_and_values_trace_zero() {
        let ctx = FieldCtx::new(2).unwrap();
        let params = scan_params(&ctx, 3).unwrap();
        assert!(bab_affine_eval(&ctx, &params, &[Fq2Element::ZERO; 3]).is_zero());
        let params = auto_params(&ctx, 2).unwrap();
        for x in affine_tuples(&ctx, 2) {
            assert!(ctx.trace(bab_affine_eval(&ctx, &params, &x)).is_zero());
        }
    }

    #[test]
    fn affine_zero_set_matches_direct_scan() {
        for (n, q) in [(2, 2), (2, 3), (3, 2)] {
            let ctx = FieldCtx::new(q).unwrap();
            let params = auto_params(&ctx, n).unwrap();
            let scan: Vec<_> = affine_tuples(&ctx, n)
                .filter(|x| bab_affine_eval(&ctx, &params, x).is_zero())
                .collect();
            let fast = affine_points(&ctx, &params);
            assert_eq!(scan, fast);
            assert_eq!(fast.len() as u64, (q as u64).pow(2 * n as u32 - 1));
        }
    }

    #[test]
    fn unital_sizes() {
        let ctx = FieldCtx::new(3).unwrap();
        let params = auto_params(&ctx, 2).unwrap();
        let m = bm_variety(&ctx, &params);
        assert_eq!(m.len(), 28);
        let at_infinity: Vec<_> = m.points().iter().filter(|p| p.affine_coords().is_none()).collect();
        assert_eq!(at_infinity.len(), 1);
        assert_eq!(
            at_infinity[0].coords(),
            &[Fq2Element::ZERO, Fq2Element::ZERO, Fq2Element::ONE]
        );

        let ctx = FieldCtx::new(5).unwrap();
        let params = scan_params(&ctx, 2).unwrap();
        assert_eq!(bm_variety(&ctx, &params).len(), 126);

        let ctx = FieldCtx::new(2).unwrap();
        let params = scan_params(&ctx, 3).unwrap();
        assert_eq!(bm_variety(&ctx, &params).len(), 45);
    }

    #[test]
    fn full_plane_is_constant() {
        let ctx = FieldCtx::new(2).unwrap();
        let all = PointSet::new(2, projective_points(&ctx, 2).collect()).unwrap();
        assert_eq!(all.len(), 21);
        let s = character_spectrum(&ctx, &all, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(s.0, BTreeMap::from([(5, 21)]));
    }

    #[test]
    fn spectrum_respects_budget() {
        let ctx = FieldCtx::new(3).unwrap();
        let set = PointSet::new(3, vec![]).unwrap();
        assert!(matches!(
            character_spectrum(&ctx, &set, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn normalization_commutes_with_scaling() {
        let ctx = FieldCtx::new(3).unwrap();
        for p in projective_points(&ctx, 2) {
            for s in ctx.elements().skip(1) {
                let scaled: Vec<_> = p.coords().iter().map(|&c| ctx.mul(s, c)).collect();
                assert_eq!(ProjPoint::new(&ctx, scaled).unwrap(), p);
            }
        }
        assert!(ProjPoint::new(&ctx, vec![Fq2Element::ZERO; 3]).is_err());
    }

    #[test]
    fn export_is_sorted_rows() {
        let ctx = FieldCtx::new(2).unwrap();
        let params = auto_params(&ctx, 2).unwrap();
        let text = bm_variety(&ctx, &params).export_text(&ctx);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "0:0 0:0 1:0");
    }
}
