use super::*;
use crate::diffmod::{BaseKind, BaseRing, DiffModule, PMatrix};
use crate::error::Error;
use crate::series::{parse_poly, rat, ratq, PuiseuxPoly, Rat};

fn z(s: &str) -> PuiseuxPoly {
    parse_poly(s, &["z"]).unwrap()
}

fn kz(h: u32) -> BaseRing {
    BaseRing::new(BaseKind::Kz, h)
}

fn module(h: u32, rows: &[&[&str]]) -> DiffModule {
    let m: PMatrix = rows.iter().map(|r| r.iter().map(|e| z(e)).collect()).collect();
    DiffModule::new(kz(h), vec![m], None).unwrap()
}

/// Module of the relation `T^k + sum R_i T^i` in the basis `v, Dv, ...`.
fn companion(h: u32, r: &[&str]) -> DiffModule {
    let k = r.len();
    let mut m: PMatrix = vec![vec![PuiseuxPoly::zero().with_arity(1); k]; k];
    for i in 0..k {
        if i + 1 < k {
            m[i + 1][i] = z("1");
        }
        m[i][k - 1] = -&z(r[i]);
    }
    DiffModule::new(kz(h), vec![m], None).unwrap()
}

fn opts() -> HltOptions {
    HltOptions::default()
}

fn sorted(mut v: Vec<Rat>) -> Vec<Rat> {
    v.sort();
    v
}

fn const_lattice(a: &[&[i64]]) -> Lattice {
    let d = a.len();
    let conn: PMatrix = a.iter().map(|r| r.iter().map(|&x| PuiseuxPoly::constant(rat(x)).with_arity(1)).collect()).collect();
    let basis: PMatrix = (0..d)
        .map(|i| (0..d).map(|j| PuiseuxPoly::constant(rat((i == j) as i64)).with_arity(1)).collect())
        .collect();
    Lattice { basis, connection: conn, precision: None }
}

#[test]
fn regularity_of_basic_modules() {
    let irr = DiffModule::e_phi(&z("z^-1"), kz(1)).unwrap();
    assert!(!is_regular(&irr, &opts()).unwrap().regular);
    assert!(!polygon_regular(&irr, 0).unwrap());

    let five = module(1, &[&["5"]]);
    let r = is_regular(&five, &opts()).unwrap();
    assert!(r.regular);
    assert_eq!(r.exponents, vec![rat(0)]);

    let nil = module(1, &[&["0", "1"], &["0", "0"]]);
    assert_eq!(exponents(&nil, &opts()).unwrap(), vec![rat(0), rat(0)]);
}

#[test]
fn regular_but_unstable_standard_lattice() {
    // the standard lattice has a pole, but z^-1 e_2 rescales it away
    let m = module(1, &[&["0", "z^-1"], &["0", "1"]]);
    assert!(!standard_lattice(&m).is_stable());
    let r = is_regular(&m, &opts()).unwrap();
    assert!(r.regular);
    assert!(polygon_regular(&m, 0).unwrap());
    assert!(r.lattice.unwrap().is_tau_normalized().unwrap());
}

#[test]
fn shearing_moves_selected_eigenvalues() {
    let l = const_lattice(&[&[0, 0], &[0, 1]]);
    let s = shear(&l, &[rat(0)]).unwrap();
    assert_eq!(sorted(s.eigenvalues().unwrap()), vec![rat(1), rat(1)]);
    let back = shear_down(&s, &[rat(1)]).unwrap();
    assert_eq!(sorted(back.eigenvalues().unwrap()), vec![rat(0), rat(0)]);
}

#[test]
fn preparation_reaches_unit_interval() {
    let m = module(2, &[&["1/2", "0"], &["0", "0"]]);
    let r = is_regular(&m, &opts()).unwrap();
    // in w = z^(1/2) the residue doubles to {1, 0}, which shears down to {0, 0}
    assert_eq!(sorted(r.exponents), vec![rat(0), rat(0)]);
    let m1 = module(1, &[&["1/2", "0"], &["0", "0"]]);
    assert_eq!(exponents(&m1, &opts()).unwrap(), vec![rat(0), ratq(1, 2)]);
    let m2 = module(1, &[&["-7/3", "1"], &["0", "5"]]);
    assert_eq!(exponents(&m2, &opts()).unwrap(), vec![rat(0), ratq(2, 3)]);
}

#[test]
fn fractional_part_section() {
    assert_eq!(tau(&ratq(-1, 3)), ratq(2, 3));
    assert_eq!(tau(&ratq(7, 2)), ratq(1, 2));
    for a in 1..6 {
        for n in -9..10 {
            assert!(tau_check(&ratq(n, 4), a), "tau check failed at {n}/4, a = {a}");
        }
    }
}

fn phis(parts: &[HltSummand]) -> Vec<String> {
    let mut v: Vec<String> = parts.iter().map(|p| p.phi.to_string_with(&["z"])).collect();
    v.sort();
    v
}

#[test]
fn decomposition_of_exponential_and_sum() {
    let e = DiffModule::e_phi(&z("z^-2"), kz(1)).unwrap();
    let parts = hlt_decompose(&e, &opts()).unwrap();
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0].phi, z("z^-2"));
    assert_eq!(parts[0].rank, 1);

    let s = DiffModule::e_phi(&z("z^-1"), kz(1)).unwrap().direct_sum(&DiffModule::e_phi(&z("2*z^-1"), kz(1)).unwrap()).unwrap();
    let parts = hlt_decompose(&s, &opts()).unwrap();
    assert_eq!(phis(&parts), phis(&[parts[0].clone(), parts[1].clone()]));
    let got: Vec<PuiseuxPoly> = parts.iter().map(|p| p.phi.clone()).collect();
    assert!(got.contains(&z("z^-1")) && got.contains(&z("2*z^-1")));
}

#[test]
fn decomposition_of_factored_relation() {
    // (T + z^-1)(T + 2 z^-1) = T^2 + 3 z^-1 T + 2 z^-2 - 2 z^-1
    let m = companion(1, &["2*z^-2 - 2*z^-1", "3*z^-1"]);
    let parts = hlt_decompose(&m, &opts()).unwrap();
    let got: Vec<PuiseuxPoly> = parts.iter().map(|p| p.phi.clone()).collect();
    assert_eq!(got.len(), 2);
    assert!(got.contains(&z("z^-1")) && got.contains(&z("2*z^-1")), "{got:?}");
    assert!(parts.iter().all(|p| p.h == 1 && p.rank == 1));
}

#[test]
fn decomposition_with_ramification() {
    // T^2 - z^-1: solutions exp(+-2 z^(-1/2))
    let m = companion(1, &["-z^-1", "0"]);
    let parts = hlt_decompose(&m, &opts()).unwrap();
    assert_eq!(parts.len(), 2);
    assert!(parts.iter().all(|p| p.h == 2 && p.rank == 1));
    let got: Vec<PuiseuxPoly> = parts.iter().map(|p| p.phi.clone()).collect();
    assert!(got.contains(&z("2*z^(-1/2)")) && got.contains(&z("-2*z^(-1/2)")), "{got:?}");
    assert!(parts.iter().all(|p| p.exponents == vec![ratq(1, 2)]), "{:?}", parts[0].exponents);
}

#[test]
fn regular_module_decomposes_trivially() {
    let m = module(1, &[&["1/3", "z"], &["0", "0"]]);
    let parts = hlt_decompose(&m, &opts()).unwrap();
    assert_eq!(parts.len(), 1);
    assert!(parts[0].phi.is_zero());
    assert_eq!(parts[0].rank, 2);
}

#[test]
fn fundamental_solution_solves_system() {
    let m = module(1, &[&["1/3 + z", "z^2"], &["2*z", "-z"]]);
    let r = is_regular(&m, &opts()).unwrap();
    let l = r.lattice.unwrap();
    let u = fundamental_solution(&l, 8).unwrap();
    let res = solution_residual(&l, &u, 8);
    assert!(res.iter().flatten().all(|e| e.is_zero()));
}

#[test]
fn resonant_lattice_is_singular() {
    let l = const_lattice(&[&[0, 0], &[0, 1]]);
    match fundamental_solution(&l, 4) {
        Err(Error::SingularSylvester { order }) => assert_eq!(order, rat(1)),
        other => panic!("expected a singular system, got {other:?}"),
    }
    // with a nonzero coupling term the obstruction is real
    let mut l = l;
    l.connection[1][0] = z("z");
    assert!(fundamental_solution(&l, 4).is_err());
}

#[test]
fn lattice_growth_oracle() {
    let id: PMatrix = vec![vec![z("1")]];
    for a in 1..4 {
        let e = DiffModule::e_phi(&z(&format!("z^-{a}")), kz(1)).unwrap();
        for s in 1..9 {
            assert_eq!(irreg_lattice_oracle(&e, &id, s).unwrap(), a * s as i64);
        }
        assert_eq!(irregularity_limit(&e, &id, 12).unwrap().limit, Some(rat(a)));
    }
    let reg = module(1, &[&["1/2", "1"], &["0", "0"]]);
    let id2: PMatrix = vec![vec![z("1"), z("0")], vec![z("0"), z("1")]];
    assert_eq!(irregularity_limit(&reg, &id2, 12).unwrap().limit, Some(rat(0)));
    // two slopes of 1/2 each
    let m = companion(1, &["-z^-1", "0"]);
    assert_eq!(irregularity_limit(&m, &id2, 16).unwrap().limit, Some(rat(1)));
}

#[test]
fn dm_lattices() {
    let reg = module(1, &[&["-5/2", "0"], &["0", "4/3"]]);
    let dm = dm_lattice(&reg, &opts()).unwrap();
    assert_eq!(sorted(dm.exponents.clone()), vec![ratq(1, 3), ratq(1, 2)]);
    assert!(dm.lattice.is_tau_normalized().unwrap());
    // z^3 e_1, z^-1 e_2 span the lattice; rescaling by units does not change it
    let b1 = dm.lattice.basis.clone();
    let scaled: PMatrix = b1.iter().map(|r| r.iter().map(|e| e * &z("2 + z")).collect()).collect();
    assert!(same_lattice(&b1, &scaled));
    let shifted: PMatrix = b1.iter().map(|r| r.iter().map(|e| e * &z("z")).collect()).collect();
    assert!(!same_lattice(&b1, &shifted));

    let tw = DiffModule::e_phi(&z("z^-1"), kz(1)).unwrap().tensor(&module(1, &[&["1/4"]])).unwrap();
    let dm = dm_lattice(&tw, &opts()).unwrap();
    assert_eq!(dm.exponents, vec![ratq(1, 4)]);
    assert_eq!(dm.twists[0].1, z("z^-1"));

    let ram = companion(1, &["-z^-1", "0"]);
    assert!(matches!(dm_lattice(&ram, &opts()), Err(Error::UnsupportedGeneralCase(_))));
}
