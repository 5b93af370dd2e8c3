use std::collections::HashSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use quasiherm::collineation::{act_on_form, apply, apply_affine, build_r, compose, in_psi, inverse, Collineation, RSet};
use quasiherm::family::{family_from_r, separating_g, AffineForm, WSet};
use quasiherm::geometry::{auto_params, bab_affine_eval, bm_variety, BMParams, ProjPoint};
use quasiherm::mds::{build_code, domain_sum, omega_set, scale_to_fq, FqLinearCode, DEFAULT_CODEWORD_BUDGET};
use quasiherm::oa::{build_oa, DEFAULT_ENTRY_BUDGET};
use quasiherm::{FieldCtx, Fq2Element};

struct Fixture {
    ctx: FieldCtx,
    params: BMParams,
    r: RSet,
    forms: Vec<AffineForm>,
    w: WSet,
}

fn fixture(n: usize, q: u32) -> Fixture {
    let ctx = FieldCtx::new(q).unwrap();
    let params = auto_params(&ctx, n).unwrap();
    let r = build_r(&ctx, &params).unwrap();
    let forms = family_from_r(&ctx, &params, &r).unwrap();
    let w = WSet::new(&ctx, n);
    Fixture { ctx, params, r, forms, w }
}

fn f33() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(3, 3))
}

fn f24() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(2, 4))
}

struct CodeFixture {
    ctx: FieldCtx,
    params: BMParams,
    code: FqLinearCode,
    points: Vec<Vec<Fq2Element>>,
    set: HashSet<Vec<Fq2Element>>,
}

fn code7() -> &'static CodeFixture {
    static F: OnceLock<CodeFixture> = OnceLock::new();
    F.get_or_init(|| {
        let ctx = FieldCtx::new(7).unwrap();
        let params = auto_params(&ctx, 3).unwrap();
        let eval = build_code(&ctx, &params, &omega_set(&ctx), DEFAULT_CODEWORD_BUDGET).unwrap();
        let code = scale_to_fq(&ctx, &eval).unwrap();
        let points = eval.domain().points().to_vec();
        let set = code.words().iter().cloned().collect();
        CodeFixture { ctx, params, code, points, set }
    })
}

fn el(ctx: &FieldCtx, i: u32) -> Fq2Element {
    ctx.element((i % ctx.order()) as u64).unwrap()
}

fn group_element(ctx: &FieldCtx, n: usize, seeds: &[u32]) -> Collineation {
    let alphas = (0..n).map(|i| el(ctx, seeds[i])).collect();
    let betas = (0..n - 1).map(|i| el(ctx, seeds[n + i])).collect();
    Collineation::new(alphas, betas).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn subfield_and_transversal(q in prop::sample::select(vec![2u32, 3, 4, 5, 8, 9]), xi in 0u32..100) {
        let ctx = FieldCtx::new(q).unwrap();
        let x = el(&ctx, xi);
        prop_assert_eq!(ctx.is_in_subfield(x), ctx.frobenius(x) == x);
        let hits = ctx.transversal().iter().filter(|&&c| ctx.is_in_subfield(ctx.sub(x, c))).count();
        prop_assert_eq!(hits, 1);
    }

    #[test]
    fn variety_membership_matches_equation(xs in prop::collection::vec(0u32..81, 3)) {
        let f = f33();
        let x: Vec<_> = xs.iter().map(|&i| el(&f.ctx, i)).collect();
        let set = bm_variety(&f.ctx, &f.params);
        prop_assert_eq!(set.contains(&ProjPoint::affine(&x)), bab_affine_eval(&f.ctx, &f.params, &x).is_zero());
    }

    #[test]
    fn action_commutes_with_rescaling(seeds in prop::collection::vec(0u32..81, 5), xs in prop::collection::vec(0u32..81, 4), s in 1u32..81) {
        let f = f33();
        let ctx = &f.ctx;
        let g = group_element(ctx, 3, &seeds);
        let coords: Vec<_> = xs.iter().map(|&i| el(ctx, i)).collect();
        prop_assume!(coords.iter().any(|c| !c.is_zero()));
        let lambda = el(ctx, s);
        prop_assume!(!lambda.is_zero());
        let scaled: Vec<_> = coords.iter().map(|&c| ctx.mul(lambda, c)).collect();
        let p = ProjPoint::new(ctx, coords).unwrap();
        let ps = ProjPoint::new(ctx, scaled).unwrap();
        prop_assert_eq!(&p, &ps);
        prop_assert_eq!(apply(ctx, &g, &p).unwrap(), apply(ctx, &g, &ps).unwrap());
    }

    #[test]
    fn transformed_zero_set_is_preimage(seeds in prop::collection::vec(0u32..81, 5), xs in prop::collection::vec(0u32..81, 3)) {
        let f = f33();
        let ctx = &f.ctx;
        let g = group_element(ctx, 3, &seeds);
        let fg = act_on_form(ctx, &g, &AffineForm::base(&f.params)).unwrap();
        let x: Vec<_> = xs.iter().map(|&i| el(ctx, i)).collect();
        // x ∈ V(F^g) iff g·x ∈ V(F), i.e. V(F^g) = g^{-1} V(F)
        prop_assert_eq!(fg.eval(ctx, &x).is_zero(), bab_affine_eval(ctx, &f.params, &apply_affine(ctx, &g, &x)).is_zero());
        let back = apply_affine(ctx, &inverse(ctx, &g), &apply_affine(ctx, &g, &x));
        prop_assert_eq!(back, x);
    }

    #[test]
    fn distinct_r_members_give_distinct_varieties(i in 0usize..81, j in 0usize..81) {
        let f = f33();
        prop_assume!(i != j);
        let ctx = &f.ctx;
        let (g, h) = (&f.r.members()[i], &f.r.members()[j]);
        prop_assert!(!in_psi(ctx, &f.params, &compose(ctx, g, &inverse(ctx, h)).unwrap()));
        prop_assert_ne!(f.forms[i].zero_set(ctx), f.forms[j].zero_set(ctx));
    }

    #[test]
    fn family_values_on_w_are_trace_zero(g in 0usize..81, p in 0usize..243) {
        let f = f33();
        let v = f.forms[g].eval(&f.ctx, &f.w.points()[p]);
        prop_assert!(f.ctx.trace(v).is_zero());
    }

    #[test]
    fn points_of_w_are_separated(i in 0usize..64, j in 0usize..64) {
        let f = f24();
        prop_assume!(i != j);
        let (p, p2) = (&f.w.points()[i], &f.w.points()[j]);
        let g = separating_g(&f.ctx, &f.forms, p, p2).unwrap();
        let form = f.forms.iter().find(|x| x.transform() == &g).unwrap();
        prop_assert_ne!(form.eval(&f.ctx, p), form.eval(&f.ctx, p2));
    }

    #[test]
    fn code_is_closed_under_linear_combinations(i in 0usize..16807, j in 0usize..16807, l in 0usize..7) {
        let c = code7();
        let ctx = &c.ctx;
        let lambda = ctx.subfield()[l];
        let (u, v) = (&c.code.words()[i], &c.code.words()[j]);
        let comb: Vec<_> = u.iter().zip(v).map(|(&a, &b)| ctx.add(ctx.mul(lambda, a), b)).collect();
        prop_assert!(c.set.contains(&comb));
    }

    #[test]
    fn nonzero_codewords_have_at_most_four_zeros(i in 1usize..16807) {
        let c = code7();
        let w = &c.code.words()[i];
        prop_assert!(w.iter().filter(|x| x.is_zero()).count() <= 4);
    }

    #[test]
    fn domain_sum_adds_codewords(i in 0usize..16807, j in 0usize..16807) {
        let c = code7();
        let ctx = &c.ctx;
        let p3 = domain_sum(ctx, &c.params, &c.points[i], &c.points[j]);
        let k = c.points.iter().position(|p| *p == p3).unwrap();
        let sum: Vec<_> = c.code.words()[i].iter().zip(&c.code.words()[j]).map(|(&a, &b)| ctx.add(a, b)).collect();
        prop_assert_eq!(&c.code.words()[k], &sum);
    }
}

#[test]
fn oa_export_is_deterministic() {
    let once = || {
        let f = fixture(2, 4);
        let oa = build_oa(&f.ctx, &f.params, DEFAULT_ENTRY_BUDGET).unwrap();
        (oa.to_csv(), serde_json::to_string(&oa.sidecar(&f.ctx)).unwrap())
    };
    assert_eq!(once(), once());
}
