use super::*;
use crate::diffmod::{BaseKind, BaseRing, DiffModule};
use crate::series::{parse_poly, ratq};
use proptest::prelude::*;

fn zx(s: &str) -> PuiseuxPoly {
    parse_poly(s, &["z"]).unwrap()
}

fn xy(s: &str) -> PuiseuxPoly {
    parse_poly(s, &["x", "y"]).unwrap()
}

fn z_euler() -> [Rat; 2] {
    [rat(1), rat(0)]
}

fn tp(cs: &[&str]) -> TwistedPoly<PuiseuxPoly> {
    TwistedPoly::new(cs.iter().map(|s| xy(s)).collect(), z_euler())
}

#[test]
fn commutation_rule() {
    let t = TwistedPoly::new(vec![PuiseuxPoly::zero(), PuiseuxPoly::one()], z_euler());
    let r = TwistedPoly::new(vec![zx("z^-1")], z_euler());
    let prod = t.twisted_mul(&r);
    assert_eq!(prod.coeffs(), &[zx("-z^-1"), zx("z^-1")]);
}

#[test]
fn constants_commute() {
    let a = tp(&["-2", "1"]);
    let b = tp(&["-3", "1"]);
    assert_eq!(a.twisted_mul(&b), tp(&["6", "-5", "1"]));
}

#[test]
fn associativity_sample() {
    let a = tp(&["x^-1", "1"]);
    let b = tp(&["y*x^-2", "x", "1"]);
    let c = tp(&["3 + x^-3", "1"]);
    assert_eq!(a.twisted_mul(&b).twisted_mul(&c), a.twisted_mul(&b.twisted_mul(&c)));
}

#[test]
fn polygons() {
    let r1 = [rat(1), rat(0)];
    let np = newton_polygon(&tp(&["-x^-2", "1"]), &r1);
    assert_eq!(np.slopes, vec![(rat(-2), 1)]);
    let np = newton_polygon(&tp(&["0", "0", "1"]), &r1);
    assert_eq!(np.slopes, vec![(rat(0), 2)]);
    // (-1,-1) lies above the chord from (-2,0) to (0,-3)
    let np = newton_polygon(&tp(&["x^-3", "-x^-1", "1"]), &r1);
    assert_eq!(np.slopes, vec![(ratq(-3, 2), 2)]);
    assert_eq!(np.log_scales(), vec![ratq(3, 2), ratq(3, 2)]);
    let np = newton_polygon(&tp(&["x^-3", "-x^-2", "1"]), &r1);
    assert_eq!(np.slopes, vec![(rat(-2), 1), (rat(-1), 1)]);
    assert_eq!(np.log_scales(), vec![rat(2), rat(1)]);
}

#[test]
fn cyclic_vector_rank_one() {
    let m = DiffModule::e_phi(&xy("x^-1*y^-2"), BaseRing::new(BaseKind::R22, 1)).unwrap();
    let w = [rat(1), rat(0)];
    let cv = cyclic_vector(&m, &w, 7).unwrap();
    assert_eq!(cv.tried, 1);
    assert_eq!(cv.poly.coeff(0), RationalFunction::poly(xy("x^-1*y^-2")));
}

#[test]
fn cyclic_vector_nilpotent() {
    let n = vec![vec![zx("0"), zx("0")], vec![zx("1"), zx("0")]];
    let m = DiffModule::new(BaseRing::new(BaseKind::Kz, 1), vec![n], None).unwrap();
    let cv = cyclic_vector(&m, &z_euler(), 0).unwrap();
    assert_eq!(cv.vector, vec![PuiseuxPoly::one(), PuiseuxPoly::zero()]);
    assert!(cv.poly.coeff(0).is_zero() && cv.poly.coeff(1).is_zero());
}

#[test]
fn cyclic_vector_direct_sum_polygon() {
    let base = BaseRing::new(BaseKind::R21, 1);
    let m = DiffModule::e_phi(&xy("x^-1"), base).unwrap().direct_sum(&DiffModule::e_phi(&xy("2*x^-1"), base).unwrap()).unwrap();
    let w = [rat(1), rat(0)];
    let cv = cyclic_vector(&m, &w, 0).unwrap();
    assert!(!cv.wronskian_det.is_zero());
    let np = newton_polygon(&cv.poly, &[rat(1), rat(0)]);
    assert_eq!(np.slopes, vec![(rat(-1), 2)]);
    // a different accepted candidate gives the same scales
    let cv2 = cyclic_vector_with(&m, &w, 0, 2).unwrap();
    assert_ne!(cv2.vector, cv.vector);
    assert_eq!(newton_polygon(&cv2.poly, &[rat(1), rat(0)]).log_scales(), np.log_scales());
}

#[test]
fn cyclic_vector_repeated_block() {
    let base = BaseRing::new(BaseKind::R21, 1);
    let e = DiffModule::e_phi(&xy("x^-1"), base).unwrap();
    let m = e.direct_sum(&e).unwrap();
    let cv = cyclic_vector(&m, &[rat(1), rat(0)], 3).unwrap();
    assert!(cv.tried > 3);
    assert_eq!(newton_polygon(&cv.poly, &[rat(1), rat(0)]).log_scales(), vec![rat(1), rat(1)]);
}

fn series_poly(cs: &[&str]) -> TwistedPoly<TruncatedSeries> {
    TwistedPoly::new(cs.iter().map(|s| TruncatedSeries::exact(zx(s))).collect(), z_euler())
}

#[test]
fn slope_factor_two_slopes() {
    // (T - z^-1)(T - 1)
    let p = series_poly(&["z^-1", "-1 - z^-1", "1"]);
    let fs = slope_factor(&p, 8).map_err(|e| e.to_string()).unwrap();
    assert_eq!(fs.len(), 2);
    let prod = fs[0].twisted_mul(&fs[1]);
    for i in 0..=2 {
        let diff = prod.coeff(i).c_sub(&p.coeff(i)).with_precision(rat(8));
        assert!(diff.is_zero_to_precision(), "coefficient {i}: {}", diff.render(&["z"]));
    }
    assert_eq!(newton_polygon(&fs[0], &[rat(1)]).log_scales(), vec![rat(1)]);
    assert_eq!(newton_polygon(&fs[1], &[rat(1)]).log_scales(), vec![rat(0)]);
}

#[test]
fn slope_factor_single_slope() {
    let p = series_poly(&["-z^-2", "0", "1"]);
    assert_eq!(slope_factor(&p, 8).unwrap().len(), 1);
}

#[test]
fn slope_factor_three_slopes() {
    let a = series_poly(&["-z^-3", "1"]);
    let b = series_poly(&["z^-1 + 2", "1"]);
    let c = series_poly(&["-1/2 + z", "1"]);
    let p = a.twisted_mul(&b).twisted_mul(&c);
    let fs = slope_factor(&p, 10).unwrap();
    assert_eq!(fs.len(), 3);
    let prod = fs[0].twisted_mul(&fs[1]).twisted_mul(&fs[2]);
    for i in 0..=3 {
        assert!(prod.coeff(i).c_sub(&p.coeff(i)).with_precision(rat(10)).is_zero_to_precision());
    }
}

fn arb_coeff() -> impl Strategy<Value = PuiseuxPoly> {
    prop::collection::vec((-3i64..=3, -4i64..=1, -4i64..=1), 0..3).prop_map(|ts| {
        let mut p = PuiseuxPoly::zero();
        for (c, a, b) in ts {
            p = &p + &PuiseuxPoly::mono_int(2, a, b, rat(c));
        }
        p.with_poles([true, true])
    })
}

fn arb_monic() -> impl Strategy<Value = Vec<PuiseuxPoly>> {
    (1usize..=3).prop_flat_map(|d| prop::collection::vec(arb_coeff(), d))
}

fn merged(a: &NewtonPolygon, b: &NewtonPolygon) -> Vec<Rat> {
    let mut v = a.log_scales();
    v.extend(b.log_scales());
    v.sort_by(|x, y| y.cmp(x));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn polygon_is_multiplicative(la in arb_monic(), lb in arb_monic(), r1 in 1i64..4, r2 in 0i64..4, w1 in 1i64..3, w2 in 0i64..3) {
        let w = [rat(w1), rat(w2)];
        let a = TwistedPoly::monic(la, w.clone());
        let b = TwistedPoly::monic(lb, w);
        let r = [rat(r1), rat(r2)];
        let prod = a.twisted_mul(&b);
        let np = newton_polygon(&prod, &r);
        prop_assert_eq!(np.log_scales(), merged(&newton_polygon(&a, &r), &newton_polygon(&b, &r)));
    }
}
