//! Dense linear algebra over GF(q²) (and so over its subfield GF(q)).

use crate::field::{FieldCtx, Fq2Element};

pub type Matrix = Vec<Vec<Fq2Element>>;

/// Determinant by Gaussian elimination.
pub fn determinant(ctx: &FieldCtx, m: &[Vec<Fq2Element>]) -> Fq2Element {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut det = Fq2Element::ONE;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Fq2Element::ZERO;
        };
        if piv != col {
            a.swap(piv, col);
            det = ctx.neg(det);
        }
        det = ctx.mul(det, a[col][col]);
        let inv = ctx.inv(a[col][col]).expect("pivot is nonzero");
        for r in col + 1..n {
            let f = ctx.mul(a[r][col], inv);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = ctx.mul(f, a[col][c]);
                a[r][c] = ctx.sub(a[r][c], t);
            }
        }
    }
    det
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(ctx: &FieldCtx, m: &[Vec<Fq2Element>]) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Fq2Element::ONE } else { Fq2Element::ZERO }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let inv = ctx.inv(a[col][col])?;
        for x in a[col].iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col];
            for c in 0..2 * n {
                let t = ctx.mul(f, a[col][c]);
                a[r][c] = ctx.sub(a[r][c], t);
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(ctx: &FieldCtx, m: &[Vec<Fq2Element>], v: &[Fq2Element]) -> Vec<Fq2Element> {
    m.iter().map(|row| ctx.dot(row, v)).collect()
}

/// Vandermonde matrix with rows `(1, t, t², …, t^{k−1})`.
pub fn vandermonde(ctx: &FieldCtx, points: &[Fq2Element], k: usize) -> Matrix {
    points
        .iter()
        .map(|&t| (0..k as u64).map(|e| ctx.pow(t, e)).collect())
        .collect()
}

/// Reduced row echelon basis, grown one vector at a time.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Vec<Fq2Element>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `v` against the current basis.
    pub fn reduce(&self, ctx: &FieldCtx, v: &[Fq2Element]) -> Vec<Fq2Element> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p];
            if !f.is_zero() {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = ctx.sub(*x, ctx.mul(f, y));
                }
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, ctx: &FieldCtx, v: &[Fq2Element]) -> bool {
        let mut v = self.reduce(ctx, v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = ctx.inv(v[p]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let f = row[p];
            if !f.is_zero() {
                for (x, &y) in row.iter_mut().zip(&v) {
                    *x = ctx.sub(*x, ctx.mul(f, y));
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, ctx: &FieldCtx, v: &[Fq2Element]) -> bool {
        self.reduce(ctx, v).iter().all(|x| x.is_zero())
    }

    pub fn rows(&self) -> &[Vec<Fq2Element>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Pivots sit in the leading columns, i.e. the basis is `[I | P]`.
    pub fn is_systematic(&self) -> bool {
        self.pivots.iter().enumerate().all(|(i, &p)| i == p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vandermonde_determinant_and_inverse() {
        let ctx = FieldCtx::new(7).unwrap();
        let pts: Vec<_> = (0..5).map(|i| ctx.from_prime(i)).collect();
        let v = vandermonde(&ctx, &pts, 5);
        let mut expected = Fq2Element::ONE;
        for i in 0..5 {
            for j in i + 1..5 {
                expected = ctx.mul(expected, ctx.sub(pts[j], pts[i]));
            }
        }
        assert_eq!(determinant(&ctx, &v), expected);
        let vi = inverse(&ctx, &v).unwrap();
        for i in 0..5 {
            let col: Vec<_> = (0..5).map(|r| vi[r][i]).collect();
            let e = mat_vec(&ctx, &v, &col);
            for (j, x) in e.into_iter().enumerate() {
                assert_eq!(x, if i == j { Fq2Element::ONE } else { Fq2Element::ZERO });
            }
        }
    }

    #[test]
    fn singular_matrix() {
        let ctx = FieldCtx::new(4).unwrap();
        let r = vec![ctx.element(3).unwrap(), ctx.element(5).unwrap()];
        let m = vec![r.clone(), r];
        assert!(determinant(&ctx, &m).is_zero());
        assert!(inverse(&ctx, &m).is_none());
    }

    #[test]
    fn echelon_rank() {
        let ctx = FieldCtx::new(3).unwrap();
        let e = |i| ctx.from_prime(i);
        let mut ech = Echelon::new();
        assert!(ech.insert(&ctx, &[e(0), e(1), e(2)]));
        assert!(ech.insert(&ctx, &[e(1), e(1), e(0)]));
        assert!(!ech.insert(&ctx, &[e(1), e(2), e(2)]));
        assert_eq!(ech.rank(), 2);
        assert!(ech.is_systematic());
        assert!(ech.contains(&ctx, &[e(2), e(0), e(2)]));
    }
}
