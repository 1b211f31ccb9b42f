use proptest::prelude::*;

use super::*;
use crate::diffmod::{BaseRing, PMatrix};
use crate::series::{parse_poly, ratq, PuiseuxPoly};
use crate::tropical::AffineFunctional;

fn p(s: &str) -> PuiseuxPoly {
    parse_poly(s, &["x", "y"]).unwrap()
}

fn base(kind: BaseKind) -> BaseRing {
    BaseRing::new(kind, 1)
}

fn e(kind: BaseKind, phi: &str) -> DiffModule {
    DiffModule::e_phi(&p(phi), base(kind)).unwrap()
}

fn sum(kind: BaseKind, phis: &[&str]) -> DiffModule {
    let parts: Vec<DiffModule> = phis.iter().map(|f| e(kind, f)).collect();
    DiffModule::direct_sum_all(&parts).unwrap()
}

fn w(a: i64, b: i64) -> [Rat; 2] {
    [rat(a), rat(b)]
}

fn lin(a: i64, b: i64) -> PLFunction {
    PLFunction::new(vec![AffineFunctional::linear(rat(a), rat(b))])
}

fn pm(rows: &[&[&str]]) -> PMatrix {
    rows.iter().map(|r| r.iter().map(|s| p(s)).collect()).collect()
}

/// Mixes the two summands of a rank-2 module with a unipotent gauge.
fn mixed(m: &DiffModule, entry: &str) -> DiffModule {
    let g = pm(&[&["1", entry], &["0", "1"]]);
    let mut gi = g.clone();
    gi[0][1] = -&g[0][1];
    m.gauge(&g, &gi).unwrap()
}

fn counterexample() -> Vec<&'static str> {
    vec!["x^-3*y^-3", "x^-3*y^-3 + x^-1", "x^-2*y^-2", "x^-2*y^-2 + y^-1"]
}

#[test]
fn scales_of_exponentials() {
    assert_eq!(scale_multiset_at(&e(BaseKind::R22, "x^-3*y^-3"), &w(1, 1), 0).unwrap(), vec![rat(6)]);
    let s = sum(BaseKind::R22, &["x^-1", "y^-1"]);
    assert_eq!(scale_multiset_at(&s, &w(2, 3), 0).unwrap(), vec![rat(3), rat(2)]);
    let reg = DiffModule::trivial(base(BaseKind::R21), 3);
    assert_eq!(scale_multiset_at(&reg, &ratpair(1, 3, 2, 5), 0).unwrap(), vec![rat(0); 3]);
}

fn ratpair(a: i64, b: i64, c: i64, d: i64) -> [Rat; 2] {
    [ratq(a, b), ratq(c, d)]
}

#[test]
fn gauge_mixing_preserves_scales() {
    let s = sum(BaseKind::R22, &["x^-1", "y^-2"]);
    let m = mixed(&s, "x + y");
    assert!(m.check_flat());
    assert_eq!(m.blocks().len(), 1);
    for r in [w(1, 1), w(2, 3), w(3, 1), w(1, 0), w(0, 1)] {
        assert_eq!(scale_multiset_at(&m, &r, 0).unwrap(), scale_multiset_at(&s, &r, 0).unwrap(), "at {r:?}");
    }
}

#[test]
fn zero_and_negative_weights_are_rejected() {
    let m = e(BaseKind::R21, "x^-1");
    assert!(matches!(scale_multiset_at(&m, &w(0, 0), 0), Err(Error::InvalidWeight(_))));
    assert!(matches!(scale_multiset_at(&m, &w(-1, 1), 0), Err(Error::InvalidWeight(_))));
    assert!(matches!(scale_multiset_with(&m, &w(0, 1), Derivation::X, 0), Err(Error::InvalidWeight(_))));
}

#[test]
fn profile_of_single_exponential() {
    let prof = irregularity_profile(&e(BaseKind::R22, "x^-3*y^-3 + x^-1"), &IrregOptions::default()).unwrap();
    assert_eq!(prof.partials, vec![lin(3, 3)]);
}

#[test]
fn profile_of_counterexample() {
    let m = sum(BaseKind::R22, &counterexample());
    let prof = irregularity_profile(&m, &IrregOptions::default()).unwrap();
    assert_eq!(prof.top(), &lin(10, 10));
    let phis: Vec<PuiseuxPoly> = counterexample().iter().map(|s| p(s)).collect();
    let oracle = profile_of_exponentials(&phis, &Budget::default()).unwrap();
    assert_eq!(prof.partials, oracle);
}

#[test]
fn criterion_on_counterexample() {
    let m = sum(BaseKind::R22, &counterexample());
    let v = criterion_check(&m, &IrregOptions::default()).unwrap();
    assert_eq!(v.verdict, Verdict::GoodAfterPullback);
    assert_eq!(v.top.function, lin(10, 10));
    assert_eq!(v.end_top.function, lin(26, 26));
    let bad = v.first_nonlinear_end().unwrap();
    assert_eq!(bad.index, 9);
    let expect = lin(24, 24).combine_sum(&PLFunction::new(vec![
        AffineFunctional::linear(rat(1), rat(0)),
        AffineFunctional::linear(rat(0), rat(1)),
    ]));
    assert_eq!(bad.function, expect);
    // the brute-force differences agree with the module computation
    let phis: Vec<PuiseuxPoly> = counterexample().iter().map(|s| p(s)).collect();
    let diffs: Vec<PuiseuxPoly> = phis.iter().flat_map(|a| phis.iter().map(move |b| a - b)).collect();
    let oracle = profile_of_exponentials(&diffs, &Budget::default()).unwrap();
    let computed: Vec<PLFunction> = v.end_statuses.iter().map(|s| s.function.clone()).collect();
    assert_eq!(computed, oracle);
}

#[test]
fn criterion_fails_for_turning_point() {
    let m = e(BaseKind::R21, "y*x^-1");
    let v = criterion_check(&m, &IrregOptions::default()).unwrap();
    assert_eq!(v.verdict, Verdict::Fails);
    let expect = PLFunction::new(vec![AffineFunctional::zero(), AffineFunctional::linear(rat(1), rat(-1))]);
    assert_eq!(v.top.function, expect);
    assert!(!v.top.linearity.witnesses.is_empty());
}

#[test]
fn regular_module_is_good() {
    let m = DiffModule::trivial(base(BaseKind::R22), 2);
    let v = criterion_check(&m, &IrregOptions::default()).unwrap();
    assert_eq!(v.verdict, Verdict::GoodAfterPullback);
    assert_eq!(v.top.function, PLFunction::zero());
    assert_eq!(v.end_top.function, PLFunction::zero());
}

#[test]
fn drop_affine() {
    let parts: Vec<DiffModule> = counterexample().iter().map(|f| e(BaseKind::R22, f)).collect();
    assert_eq!(drop_affine_check(&parts, &IrregOptions::default()).unwrap(), vec![true; 4]);
    let single = vec![e(BaseKind::R22, "x^-2*y^-1")];
    assert_eq!(drop_affine_check(&single, &IrregOptions::default()).unwrap(), vec![true]);
    let bad = vec![e(BaseKind::R22, "x^-1 + y^-1")];
    assert!(matches!(drop_affine_check(&bad, &IrregOptions::default()), Err(Error::Precondition(_))));
}

#[test]
fn coordinate_derivations_underestimate_interior_scales() {
    let c = cross_derivation(&e(BaseKind::R22, "x^-1"), &w(1, 1), 0).unwrap();
    assert_eq!(c.via_x, vec![rat(1)]);
    assert_eq!(c.via_y, vec![rat(0)]);
    assert!(!c.identical());
    assert!(c.consistent());
    let m = mixed(&sum(BaseKind::R22, &["x^-1", "y^-1"]), "x");
    let c = cross_derivation(&m, &w(2, 3), 0).unwrap();
    assert_eq!(c.absolute, vec![rat(3), rat(2)]);
    assert!(c.consistent());
}

#[test]
fn axis_regularity_matches_first_difference() {
    let o = HltOptions::default();
    let at = ratq(7, 3);
    let turning = e(BaseKind::R21, "y*x^-1");
    assert_eq!(axis_regularity(&turning, &at, &o).unwrap(), [false, true]);
    let prof = irregularity_profile(&turning, &IrregOptions::default()).unwrap();
    assert_ne!(prof.partial(1), &PLFunction::zero());
    let reg = mixed(&DiffModule::trivial(base(BaseKind::R22), 2), "x^-1*y");
    assert_eq!(axis_regularity(&reg, &at, &o).unwrap(), [true, true]);
    assert_eq!(irregularity_profile(&reg, &IrregOptions::default()).unwrap().partial(1), &PLFunction::zero());
}

#[test]
fn nonincreasing_in_second_weight_over_r21() {
    let m = sum(BaseKind::R21, &["y*x^-2", "x^-1 + y^2*x^-3"]);
    let prof = irregularity_profile(&m, &IrregOptions::default()).unwrap();
    for f in &prof.partials {
        for (a, b) in [(1, 2), (1, 5), (3, 1), (2, 2)] {
            assert!(f.eval(&w(a, b + 1)) <= f.eval(&w(a, b)));
        }
    }
}

#[test]
fn refined_concavity_when_linear() {
    let m = sum(BaseKind::R22, &counterexample());
    let prof = irregularity_profile(&m, &IrregOptions::default()).unwrap();
    let d = prof.rank;
    for l in 1..d {
        if !prof.partial(l).is_linear_on_cone().linear {
            continue;
        }
        for r in [w(1, 1), w(1, 3), w(4, 1), w(0, 1), w(1, 0)] {
            let prev = if l == 1 { Rat::zero() } else { prof.partial(l - 1).eval(&r) };
            let v = prof.partial(l).eval(&r) * rat(2) - prof.partial(l + 1).eval(&r) - prev;
            assert!(!v.is_negative());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scales_are_homogeneous(a in 1i64..9, b in 0i64..9, k in 1i64..7, q in 1i64..5) {
        let m = mixed(&sum(BaseKind::R22, &["x^-2*y^-1", "y^-3"]), "y");
        let r = [rat(a), rat(b)];
        let lam = ratq(k, q);
        let lr = [&r[0] * &lam, &r[1] * &lam];
        let s1: Vec<Rat> = scale_multiset_at(&m, &r, 0).unwrap().iter().map(|x| x * &lam).collect();
        prop_assert_eq!(s1, scale_multiset_at(&m, &lr, 0).unwrap());
    }

    #[test]
    fn exponential_scale_is_capped_gauss_norm(i in -4i64..3, j in -4i64..3, a in 0i64..7, b in 0i64..7) {
        prop_assume!(a + b > 0);
        let phi = PuiseuxPoly::mono_int(2, i, j, rat(1));
        let m = DiffModule::e_phi(&phi, base(BaseKind::R22)).unwrap();
        let r = [rat(a), rat(b)];
        let g = phi.gauss_log_norm(&r).unwrap();
        let expect = if g.is_positive() { g } else { Rat::zero() };
        prop_assert_eq!(scale_multiset_at(&m, &r, 0).unwrap(), vec![expect]);
    }
}
