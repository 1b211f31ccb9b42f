//! Fundamental solution matrices of regulating lattices.

use num_traits::Zero;

use super::lattice::{trunc, Lattice};
use crate::diffmod::{pmat_mul, pmat_sub, PMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::series::{rat, PuiseuxPoly, Rat};

fn coeff_matrix(a: &PMatrix, j: i64) -> Matrix<Rat> {
    a.iter().map(|r| r.iter().map(|e| e.coeff(&[rat(j), rat(0)])).collect()).collect()
}

/// Solves `A U + w dU/dw = U A_0` for `U = sum U_e w^e`, `U_0 = I`, modulo
/// `w^n`.  Each `U_e` comes from the Sylvester system
/// `e U_e + A_0 U_e - U_e A_0 = -sum_{j >= 1} A_j U_(e-j)`.
pub fn fundamental_solution(l: &Lattice, n: i64) -> Result<PMatrix> {
    if !l.is_stable() {
        return Err(Error::Precondition("fundamental solutions need a stable lattice".into()));
    }
    if let Some(p) = l.precision {
        if p < n {
            return Err(Error::PrecisionExhausted(format!("connection known modulo w^{p}, need w^{n}")));
        }
    }
    let d = l.rank();
    let a: Vec<Matrix<Rat>> = (0..n).map(|j| coeff_matrix(&l.connection, j)).collect();
    let mut us: Vec<Matrix<Rat>> = vec![linalg::identity(d)];
    for e in 1..n {
        let mut rhs: Matrix<Rat> = linalg::zeros(d, d);
        for j in 1..=e as usize {
            if a[j].iter().flatten().all(|x| x.is_zero()) {
                continue;
            }
            rhs = linalg::mat_sub(&rhs, &linalg::mat_mul(&a[j], &us[e as usize - j]));
        }
        // vectorized operator on U (row-major index i*d + k)
        let er = rat(e);
        let mut op: Matrix<Rat> = linalg::zeros(d * d, d * d);
        for i in 0..d {
            for k in 0..d {
                let row = i * d + k;
                op[row][row] += &er;
                for t in 0..d {
                    op[row][t * d + k] += &a[0][i][t];
                    op[row][i * d + t] -= &a[0][t][k];
                }
            }
        }
        let b: Vec<Rat> = (0..d * d).map(|x| rhs[x / d][x % d].clone()).collect();
        let sol = linalg::solve(&op, &b).ok_or(Error::SingularSylvester { order: er.clone() })?;
        us.push((0..d).map(|i| (0..d).map(|k| sol[i * d + k].clone()).collect()).collect());
    }
    let mut u: PMatrix = vec![vec![PuiseuxPoly::zero(); d]; d];
    for (e, ue) in us.iter().enumerate() {
        for i in 0..d {
            for k in 0..d {
                if !ue[i][k].is_zero() {
                    u[i][k] = &u[i][k] + &PuiseuxPoly::mono_int(1, e as i64, 0, ue[i][k].clone());
                }
            }
        }
    }
    Ok(u)
}

/// `A U + w dU/dw - U A_0` modulo `w^n`; zero for a correct solution.
pub fn solution_residual(l: &Lattice, u: &PMatrix, n: i64) -> PMatrix {
    let a0: PMatrix = l.connection.iter().map(|r| r.iter().map(|e| PuiseuxPoly::constant(e.constant_term()).with_arity(1)).collect()).collect();
    let au = pmat_mul(&l.connection, u);
    let du: PMatrix = u.iter().map(|r| r.iter().map(|e| e.euler(&[rat(1), rat(0)])).collect()).collect();
    let lhs: PMatrix = au.iter().zip(&du).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect();
    let res = pmat_sub(&lhs, &pmat_mul(u, &a0));
    res.iter().map(|r| r.iter().map(|e| trunc(e, Some(n))).collect()).collect()
}
