//! Slow reference implementations used to cross-check the main code paths.
//!
//! Nothing here calls the table-driven arithmetic, the form coefficient
//! bookkeeping or the Artin–Schreier shortcut: elements are added digit by
//! digit on their indices, multiplied as polynomials, points are moved with
//! the explicit matrix, and forms are evaluated straight from their defining
//! expressions.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;

use crate::collineation::Collineation;
use crate::field::{FieldCtx, Fq2Element};
use crate::geometry::BMParams;

/// Arithmetic on raw indices.
#[derive(Clone, Copy)]
pub struct Naive<'a> {
    ctx: &'a FieldCtx,
}

impl<'a> Naive<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Self {
        Naive { ctx }
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.ctx
    }

    pub fn add(&self, x: Fq2Element, y: Fq2Element) -> Fq2Element {
        let p = self.ctx.p();
        let (mut a, mut b) = (x.index(), y.index());
        let (mut r, mut m) = (0u32, 1u32);
        while a > 0 || b > 0 {
            r += ((a % p + b % p) % p) * m;
            a /= p;
            b /= p;
            m *= p;
        }
        Fq2Element::from_index_unchecked(r)
    }

    pub fn neg(&self, x: Fq2Element) -> Fq2Element {
        let p = self.ctx.p();
        let mut a = x.index();
        let (mut r, mut m) = (0u32, 1u32);
        while a > 0 {
            r += ((p - a % p) % p) * m;
            a /= p;
            m *= p;
        }
        Fq2Element::from_index_unchecked(r)
    }

    pub fn sub(&self, x: Fq2Element, y: Fq2Element) -> Fq2Element {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Fq2Element, y: Fq2Element) -> Fq2Element {
        self.ctx.mul_poly(x, y)
    }

    pub fn pow(&self, x: Fq2Element, e: u64) -> Fq2Element {
        let mut acc = Fq2Element::ONE;
        for _ in 0..e {
            acc = self.mul(acc, x);
        }
        acc
    }

    pub fn frob(&self, x: Fq2Element) -> Fq2Element {
        self.pow(x, self.ctx.q() as u64)
    }

    pub fn inv(&self, x: Fq2Element) -> Option<Fq2Element> {
        let order = self.ctx.order();
        (1..order)
            .map(Fq2Element::from_index_unchecked)
            .find(|&y| self.mul(x, y) == Fq2Element::ONE)
    }

    pub fn trace(&self, x: Fq2Element) -> Fq2Element {
        self.add(x, self.frob(x))
    }

    pub fn two(&self) -> Fq2Element {
        self.add(Fq2Element::ONE, Fq2Element::ONE)
    }

    /// GF(q) as the fixed points of `x ↦ x^q`, ascending by index.
    pub fn subfield(&self) -> Vec<Fq2Element> {
        (0..self.ctx.order())
            .map(Fq2Element::from_index_unchecked)
            .filter(|&x| self.frob(x) == x)
            .collect()
    }
}

/// `X_n^q − X_n + Σ_{i<n} [a^q X_i^{2q} − a X_i² − (b^q − b) X_i^{q+1}]`.
pub fn base_form(nv: Naive, params: &BMParams, x: &[Fq2Element]) -> Fq2Element {
    let (a, b) = (params.a(), params.b());
    let aq = nv.frob(a);
    let bd = nv.sub(nv.frob(b), b);
    let n = x.len();
    let mut acc = nv.sub(nv.frob(x[n - 1]), x[n - 1]);
    for &xi in &x[..n - 1] {
        let xq = nv.frob(xi);
        acc = nv.add(acc, nv.mul(aq, nv.mul(xq, xq)));
        acc = nv.sub(acc, nv.mul(a, nv.mul(xi, xi)));
        acc = nv.sub(acc, nv.mul(bd, nv.mul(xq, xi)));
    }
    acc
}

/// `(1, x)·M` dehomogenized, with `M` the explicit matrix of `g`.
pub fn move_point(nv: Naive, g: &Collineation, x: &[Fq2Element]) -> Vec<Fq2Element> {
    let m = g.to_matrix();
    let mut row = vec![Fq2Element::ONE];
    row.extend_from_slice(x);
    let img: Vec<Fq2Element> = (0..row.len())
        .map(|j| row.iter().zip(&m).fold(Fq2Element::ZERO, |acc, (&r, mrow)| nv.add(acc, nv.mul(r, mrow[j]))))
        .collect();
    let inv0 = nv.inv(img[0]).expect("affine points stay affine");
    img[1..].iter().map(|&c| nv.mul(c, inv0)).collect()
}

/// `F^g(x) = F(g·x)`.
pub fn family_member(nv: Naive, params: &BMParams, g: &Collineation, x: &[Fq2Element]) -> Fq2Element {
    base_form(nv, params, &move_point(nv, g, x))
}

fn all_points(ctx: &FieldCtx, len: usize) -> Vec<Vec<Fq2Element>> {
    (0..len)
        .map(|_| (0..ctx.order()).map(Fq2Element::from_index_unchecked))
        .multi_cartesian_product()
        .collect()
}

/// Common affine zeros of `F^g1` and `F^g2`, by trying every point of AG(n, q²).
pub fn intersection_count(ctx: &FieldCtx, params: &BMParams, g1: &Collineation, g2: &Collineation) -> u64 {
    let nv = Naive::new(ctx);
    let n = params.n();
    let pts = if n == 1 { vec![vec![]] } else { all_points(ctx, n - 1) };
    pts.par_iter()
        .map(|head| {
            let mut c = 0;
            for z in 0..ctx.order() {
                let mut x = head.clone();
                x.push(Fq2Element::from_index_unchecked(z));
                if family_member(nv, params, g1, &x).is_zero() && family_member(nv, params, g2, &x).is_zero() {
                    c += 1;
                }
            }
            c
        })
        .sum()
}

/// `|M_{a,b}|`: affine zeros of `F` plus points `(0, x_1, …, x_n)` with
/// `Σ_{i<n} x_i^{q+1} = 0`.
pub fn variety_size(ctx: &FieldCtx, params: &BMParams) -> u64 {
    let nv = Naive::new(ctx);
    let n = params.n();
    let affine: u64 = all_points(ctx, n)
        .par_iter()
        .filter(|x| base_form(nv, params, x).is_zero())
        .count() as u64;
    let q1 = ctx.q() as u64 + 1;
    let at_infinity = all_points(ctx, n)
        .into_iter()
        .filter(|x| x.iter().any(|c| !c.is_zero()))
        .filter(|x| {
            let first = x.iter().find(|c| !c.is_zero()).copied().unwrap();
            first == Fq2Element::ONE
        })
        .filter(|x| x[..n - 1].iter().fold(Fq2Element::ZERO, |acc, &c| nv.add(acc, nv.pow(c, q1))).is_zero())
        .count() as u64;
    affine + at_infinity
}

/// Counts every ordered column pair and symbol pair with a plain triple loop;
/// returns the distinct counts seen.
pub fn strength2_counts(entries: &[Vec<u32>], v: u32) -> BTreeSet<u64> {
    let k = entries.first().map_or(0, Vec::len);
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut seen = BTreeSet::new();
            for s1 in 0..v {
                for s2 in 0..v {
                    let c = entries.iter().filter(|r| r[i] == s1 && r[j] == s2).count() as u64;
                    seen.insert(c);
                }
            }
            seen
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        })
}

/// The scaled code built straight from the displayed forms
/// `F_i(1, x, y, z)` and divided by `θ = ε^q − ε`. Rows follow `(x, y, z)`
/// with `z = ε·s` and `s` ascending by index.
pub fn scaled_code(ctx: &FieldCtx, params: &BMParams) -> Vec<Vec<Fq2Element>> {
    let nv = Naive::new(ctx);
    let (a, b) = (params.a(), params.b());
    let aq = nv.frob(a);
    let bd = nv.sub(nv.frob(b), b);
    let e = ctx.epsilon();
    let theta_inv = nv.inv(nv.sub(nv.frob(e), e)).unwrap();
    let omega = ctx.subfield_primitive();
    let q = ctx.q() as u64;
    let ts: Vec<Fq2Element> = (0..q).map(|i| if i == 0 { Fq2Element::ZERO } else { nv.pow(omega, i) }).collect();
    let pairs: Vec<(Fq2Element, Fq2Element)> = ts
        .iter()
        .map(|&t| {
            let w1 = nv.add(t, nv.mul(e, nv.pow(t, 2)));
            let w2 = nv.add(nv.pow(t, 3), nv.mul(e, nv.pow(t, 4)));
            (w1, w2)
        })
        .collect();
    let two = nv.two();
    let cs: Vec<Fq2Element> = nv.subfield().into_iter().map(|s| nv.mul(e, s)).collect();
    let everything: Vec<Fq2Element> = (0..ctx.order()).map(Fq2Element::from_index_unchecked).collect();
    let mut points = Vec::with_capacity(everything.len() * everything.len() * cs.len());
    for &x in &everything {
        for &y in &everything {
            for &z in &cs {
                points.push((x, y, z));
            }
        }
    }
    points
        .par_iter()
        .map(|&(x, y, z)| {
            let (xq, yq) = (nv.frob(x), nv.frob(y));
            let mut common = nv.sub(nv.frob(z), z);
            common = nv.add(common, nv.mul(aq, nv.add(nv.mul(xq, xq), nv.mul(yq, yq))));
            common = nv.sub(common, nv.mul(a, nv.add(nv.mul(x, x), nv.mul(y, y))));
            common = nv.sub(common, nv.mul(bd, nv.add(nv.mul(xq, x), nv.mul(yq, y))));
            pairs
                .iter()
                .map(|&(w1, w2)| {
                    let (w1q, w2q) = (nv.frob(w1), nv.frob(w2));
                    let mut v = common;
                    v = nv.add(v, nv.mul(nv.sub(nv.mul(nv.mul(two, aq), w1q), nv.mul(bd, w1)), xq));
                    v = nv.add(v, nv.mul(nv.sub(nv.mul(nv.mul(two, aq), w2q), nv.mul(bd, w2)), yq));
                    v = nv.sub(v, nv.mul(nv.add(nv.mul(nv.mul(two, a), w1), nv.mul(bd, w1q)), x));
                    v = nv.sub(v, nv.mul(nv.add(nv.mul(nv.mul(two, a), w2), nv.mul(bd, w2q)), y));
                    nv.mul(v, theta_inv)
                })
                .collect()
        })
        .collect()
}

/// Smallest nonzero Hamming weight.
pub fn min_weight(words: &[Vec<Fq2Element>]) -> usize {
    words
        .iter()
        .map(|w| w.iter().filter(|x| !x.is_zero()).count())
        .filter(|&c| c > 0)
        .min()
        .unwrap_or(0)
}

/// `g·p` for every `g` in `elements`, in order.
pub fn images(ctx: &FieldCtx, elements: &[Collineation], p: &[Fq2Element]) -> Vec<Vec<Fq2Element>> {
    let nv = Naive::new(ctx);
    elements.iter().map(|g| move_point(nv, g, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collineation::{apply_affine, group_elements};
    use crate::geometry::auto_params;

    #[test]
    fn naive_arithmetic_agrees() {
        for q in [4, 5, 9] {
            let ctx = FieldCtx::new(q).unwrap();
            let nv = Naive::new(&ctx);
            for x in ctx.elements() {
                for y in ctx.elements().step_by(3) {
                    assert_eq!(nv.add(x, y), ctx.add(x, y));
                    assert_eq!(nv.sub(x, y), ctx.sub(x, y));
                }
                assert_eq!(nv.frob(x), ctx.frobenius(x));
                assert_eq!(nv.inv(x), ctx.inv(x));
            }
            let mut s = ctx.subfield().to_vec();
            s.sort();
            assert_eq!(nv.subfield(), s);
        }
    }

    #[test]
    fn matrix_action_agrees() {
        let ctx = FieldCtx::new(3).unwrap();
        let nv = Naive::new(&ctx);
        for g in group_elements(&ctx, 2).step_by(11) {
            for x in all_points(&ctx, 2).iter().step_by(5) {
                assert_eq!(move_point(nv, &g, x), apply_affine(&ctx, &g, x));
            }
        }
    }

    #[test]
    fn naive_variety_size() {
        let ctx = FieldCtx::new(3).unwrap();
        let params = auto_params(&ctx, 2).unwrap();
        assert_eq!(variety_size(&ctx, &params), 28);
    }

    #[test]
    fn strength_counts() {
        let rows = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        assert_eq!(strength2_counts(&rows, 2), BTreeSet::from([1]));
        let rows = vec![vec![0, 0], vec![0, 0], vec![1, 0], vec![1, 1]];
        assert_eq!(strength2_counts(&rows, 2), BTreeSet::from([0, 1, 2]));
    }
}
