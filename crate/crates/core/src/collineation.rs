//! The collineation group `G` fixing `P∞ = (0, …, 0, 1)` and `Σ∞`, its
//! subgroup `Ψ` stabilizing `B_{a,b}`, and the section `R` indexing the
//! intersecting family.
//!
//! An element of `G` has the normalized matrix
//!
//! ```text
//! | 1  α_1 … α_{n−1}  α_n     |
//! | 0  1   …  0       β_1     |
//! | ⋮          ⋱      ⋮       |
//! | 0  0   …  1       β_{n−1} |
//! | 0  0   …  0       1       |
//! ```
//!
//! acting on row vectors, `P ↦ P·M`. Only the parameter vectors are stored.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::AffineForm;
use crate::field::{FieldCtx, Fq2Element};
use crate::geometry::{affine_tuples, bab_affine_eval, quadratic_part, BMParams, ProjPoint};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Collineation {
    alphas: Vec<Fq2Element>,
    betas: Vec<Fq2Element>,
}

impl Collineation {
    /// `alphas = (α_1, …, α_n)`, `betas = (β_1, …, β_{n−1})`.
    pub fn new(alphas: Vec<Fq2Element>, betas: Vec<Fq2Element>) -> Result<Self> {
        if alphas.len() < 2 || betas.len() + 1 != alphas.len() {
            return Err(Error::DimensionMismatch {
                expected: alphas.len().saturating_sub(1),
                got: betas.len(),
            });
        }
        Ok(Collineation { alphas, betas })
    }

    pub fn identity(n: usize) -> Self {
        Collineation {
            alphas: vec![Fq2Element::ZERO; n],
            betas: vec![Fq2Element::ZERO; n - 1],
        }
    }

    /// A central element: only `α_n` is nonzero. Acts as `x_n ↦ x_n + α_n`.
    pub fn centre(n: usize, alpha_n: Fq2Element) -> Self {
        let mut g = Self::identity(n);
        g.alphas[n - 1] = alpha_n;
        g
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Fq2Element] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Fq2Element] {
        &self.betas
    }

    pub fn alpha_n(&self) -> Fq2Element {
        self.alphas[self.n() - 1]
    }

    /// `(α_1, …, α_{n−1})`.
    pub fn alpha_head(&self) -> &[Fq2Element] {
        &self.alphas[..self.n() - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.alphas.iter().chain(&self.betas).all(|x| x.is_zero())
    }

    /// The dense `(n+1)×(n+1)` matrix.
    pub fn to_matrix(&self) -> Vec<Vec<Fq2Element>> {
        let n = self.n();
        let mut m = vec![vec![Fq2Element::ZERO; n + 1]; n + 1];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Fq2Element::ONE;
        }
        m[0][1..].copy_from_slice(&self.alphas);
        for (i, &b) in self.betas.iter().enumerate() {
            m[i + 1][n] = b;
        }
        m
    }

    /// Recovers the parameters from a matrix of the normalized shape.
    pub fn from_matrix(m: &[Vec<Fq2Element>]) -> Result<Self> {
        let size = m.len();
        if size < 3 || m.iter().any(|r| r.len() != size) {
            return Err(Error::Precondition("matrix must be square of size at least 3".into()));
        }
        let n = size - 1;
        for (i, row) in m.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let free = (i == 0 && j >= 1) || (j == n && (1..n).contains(&i));
                let expected = if i == j { Fq2Element::ONE } else { Fq2Element::ZERO };
                if !free && x != expected {
                    return Err(Error::Precondition(format!("entry ({i}, {j}) breaks the normalized shape")));
                }
            }
        }
        let betas = (1..n).map(|i| m[i][n]).collect();
        Collineation::new(m[0][1..].to_vec(), betas)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.n() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n(), got: n })
        }
    }
}

/// The collineation "apply `first`, then `second`", i.e. `M_first · M_second`.
pub fn compose(ctx: &FieldCtx, first: &Collineation, second: &Collineation) -> Result<Collineation> {
    second.check_dim(first.n())?;
    let n = first.n();
    let mut alphas: Vec<Fq2Element> = first
        .alphas
        .iter()
        .zip(&second.alphas)
        .map(|(&x, &y)| ctx.add(x, y))
        .collect();
    let cross = ctx.dot(first.alpha_head(), &second.betas);
    alphas[n - 1] = ctx.add(alphas[n - 1], cross);
    let betas = first
        .betas
        .iter()
        .zip(&second.betas)
        .map(|(&x, &y)| ctx.add(x, y))
        .collect();
    Ok(Collineation { alphas, betas })
}

pub fn inverse(ctx: &FieldCtx, g: &Collineation) -> Collineation {
    let n = g.n();
    let mut alphas: Vec<Fq2Element> = g.alphas.iter().map(|&x| ctx.neg(x)).collect();
    alphas[n - 1] = ctx.add(alphas[n - 1], ctx.dot(g.alpha_head(), &g.betas));
    let betas = g.betas.iter().map(|&x| ctx.neg(x)).collect();
    Collineation { alphas, betas }
}

/// `(x_1, …, x_n) ↦ (x_1 + α_1, …, x_{n−1} + α_{n−1}, x_n + α_n + Σ β_i x_i)`.
pub fn apply_affine(ctx: &FieldCtx, g: &Collineation, x: &[Fq2Element]) -> Vec<Fq2Element> {
    let n = g.n();
    let mut out: Vec<Fq2Element> = x[..n - 1]
        .iter()
        .zip(g.alpha_head())
        .map(|(&xi, &ai)| ctx.add(xi, ai))
        .collect();
    let shift = ctx.add(g.alpha_n(), ctx.dot(&x[..n - 1], &g.betas));
    out.push(ctx.add(x[n - 1], shift));
    out
}

/// Row-vector action `P ↦ P·M`, renormalized.
pub fn apply(ctx: &FieldCtx, g: &Collineation, p: &ProjPoint) -> Result<ProjPoint> {
    g.check_dim(p.dim())?;
    let n = g.n();
    let c = p.coords();
    let x0 = c[0];
    let mut out = Vec::with_capacity(n + 1);
    out.push(x0);
    for i in 0..n - 1 {
        out.push(ctx.add(c[i + 1], ctx.mul(x0, g.alphas[i])));
    }
    let last = ctx.add(
        ctx.add(c[n], ctx.mul(x0, g.alpha_n())),
        ctx.dot(&c[1..n], &g.betas),
    );
    out.push(last);
    ProjPoint::new(ctx, out)
}

/// `|G| = q^{2(2n−1)}`.
pub fn group_order(q: u32, n: usize) -> u128 {
    (q as u128).pow(2 * (2 * n as u32 - 1))
}

/// Every element of `G`, lexicographic in `(α_1, …, α_n, β_1, …, β_{n−1})`.
pub fn group_elements(ctx: &FieldCtx, n: usize) -> impl Iterator<Item = Collineation> + '_ {
    affine_tuples(ctx, 2 * n - 1).map(move |mut v| {
        let betas = v.split_off(n);
        Collineation { alphas: v, betas }
    })
}

/// `β_i = (b − b^q) α_i^q − 2a α_i`, the β forced on members of `Ψ`.
fn psi_beta(ctx: &FieldCtx, params: &BMParams, alpha: Fq2Element) -> Fq2Element {
    let two_a = ctx.add(params.a(), params.a());
    ctx.sub(
        ctx.mul(ctx.neg(params.b_diff()), ctx.frobenius(alpha)),
        ctx.mul(two_a, alpha),
    )
}

/// Membership in `Ψ`, the stabilizer of `B_{a,b}` in `G`.
pub fn in_psi(ctx: &FieldCtx, params: &BMParams, g: &Collineation) -> bool {
    if g.n() != params.n() {
        return false;
    }
    bab_affine_eval(ctx, params, &g.alphas).is_zero()
        && g
            .alpha_head()
            .iter()
            .zip(&g.betas)
            .all(|(&a, &b)| b == psi_beta(ctx, params, a))
}

/// All `q^{2n−1}` elements of `Ψ`, generated from its defining system.
pub fn psi_elements(ctx: &FieldCtx, params: &BMParams) -> Vec<Collineation> {
    let n = params.n();
    let mut out = Vec::new();
    for head in affine_tuples(ctx, n - 1) {
        let rhs = ctx.neg(quadratic_part(ctx, params, &head));
        let mut roots = ctx.artin_schreier_roots(rhs);
        roots.sort();
        let betas: Vec<Fq2Element> = head.iter().map(|&a| psi_beta(ctx, params, a)).collect();
        for an in roots {
            let mut alphas = head.clone();
            alphas.push(an);
            out.push(Collineation { alphas, betas: betas.clone() });
        }
    }
    out
}

/// The section `R`: one collineation with `β = 0` per `(α_1, …, α_{n−1})`,
/// with `α_n` the root in the transversal that puts the origin's image on
/// `B_{a,b}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSet {
    members: Vec<Collineation>,
}

impl RSet {
    pub fn members(&self) -> &[Collineation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Collineation> {
        self.members.iter()
    }

    /// Parameter vectors `(α_1, …, α_n)` as GF(p) digit vectors, for manifests.
    pub fn describe(&self, ctx: &FieldCtx) -> Vec<Vec<Vec<u32>>> {
        self.members
            .iter()
            .map(|g| g.alphas.iter().map(|&a| ctx.digits(a)).collect())
            .collect()
    }
}

pub fn build_r(ctx: &FieldCtx, params: &BMParams) -> Result<RSet> {
    let n = params.n();
    let heads: Vec<Vec<Fq2Element>> = affine_tuples(ctx, n - 1).collect();
    let members = heads
        .into_par_iter()
        .map(|head| {
            let rhs = ctx.neg(quadratic_part(ctx, params, &head));
            let an = ctx.unique_root_in_transversal(rhs).map_err(|_| {
                Error::TheoremViolation("right-hand side of the R equation has nonzero trace".into())
            })?;
            let mut alphas = head;
            alphas.push(an);
            Ok(Collineation { alphas, betas: vec![Fq2Element::ZERO; n - 1] })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RSet { members })
}

/// `F^g`, defined by `F^g(P) = F(g·P)`.
pub fn act_on_form(ctx: &FieldCtx, g: &Collineation, form: &AffineForm) -> Result<AffineForm> {
    let params = form.params();
    g.check_dim(params.n())?;
    let (a, a_q, bd) = (params.a(), params.a_q(), params.b_diff());
    let two = ctx.from_prime(2);
    let mut lin_q = Vec::with_capacity(g.n() - 1);
    let mut lin = Vec::with_capacity(g.n() - 1);
    let mut constant = ctx.add(form.constant(), bab_affine_eval(ctx, params, &g.alphas));
    for (i, (&al, &be)) in g.alpha_head().iter().zip(&g.betas).enumerate() {
        let al_q = ctx.frobenius(al);
        // substitution x_i -> x_i + α_i, x_n -> x_n + α_n + Σ β_i x_i in the base form
        let u = ctx.sub(
            ctx.add(ctx.frobenius(be), ctx.mul(two, ctx.mul(a_q, al_q))),
            ctx.mul(bd, al),
        );
        let v = ctx.neg(ctx.add(
            be,
            ctx.add(ctx.mul(two, ctx.mul(a, al)), ctx.mul(bd, al_q)),
        ));
        // the form's own linear part, transported
        let (fu, fv) = (form.coeff_xq(i), form.coeff_x(i));
        lin_q.push(ctx.add(u, fu));
        lin.push(ctx.add(v, fv));
        constant = ctx.add(constant, ctx.add(ctx.mul(fu, al_q), ctx.mul(fv, al)));
    }
    let transform = compose(ctx, g, form.transform())?;
    Ok(AffineForm::from_parts(params.clone(), transform, lin_q, lin, constant))
}
