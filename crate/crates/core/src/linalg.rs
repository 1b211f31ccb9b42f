//! Small exact linear algebra: Gaussian elimination over fields (Q and
//! univariate rational functions) and fraction-free Bareiss determinants over
//! Laurent polynomial rings.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::series::{PuiseuxPoly, Rat, RatFunc, UPoly};

pub type Matrix<T> = Vec<Vec<T>>;

/// Minimal field interface for elimination routines.
pub trait Field: Clone + PartialEq + Debug {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(&self, o: &Self) -> Self;
    fn f_sub(&self, o: &Self) -> Self;
    fn f_mul(&self, o: &Self) -> Self;
    fn f_neg(&self) -> Self;
    fn f_inv(&self) -> Self;
}

impl Field for Rat {
    fn f_zero() -> Self {
        Rat::zero()
    }
    fn f_one() -> Self {
        Rat::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_neg(&self) -> Self {
        -self
    }
    fn f_inv(&self) -> Self {
        self.recip()
    }
}

impl Field for RatFunc {
    fn f_zero() -> Self {
        RatFunc::zero()
    }
    fn f_one() -> Self {
        RatFunc::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn f_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn f_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn f_neg(&self) -> Self {
        self.neg()
    }
    fn f_inv(&self) -> Self {
        self.inv()
    }
}

pub fn identity<T: Field>(n: usize) -> Matrix<T> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::f_one() } else { T::f_zero() }).collect()).collect()
}

pub fn zeros<T: Field>(r: usize, c: usize) -> Matrix<T> {
    vec![vec![T::f_zero(); c]; r]
}

pub fn mat_mul<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    let mut out: Matrix<T> = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].f_is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].f_is_zero() {
                    out[i][j] = out[i][j].f_add(&a[i][l].f_mul(&b[l][j]));
                }
            }
        }
    }
    out
}

pub fn mat_add<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.f_add(y)).collect()).collect()
}

pub fn mat_sub<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.f_sub(y)).collect()).collect()
}

pub fn mat_scale<T: Field>(a: &Matrix<T>, c: &T) -> Matrix<T> {
    a.iter().map(|r| r.iter().map(|x| x.f_mul(c)).collect()).collect()
}

pub fn transpose<T: Clone>(a: &Matrix<T>) -> Matrix<T> {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_vec<T: Field>(a: &Matrix<T>, v: &[T]) -> Vec<T> {
    a.iter()
        .map(|r| r.iter().zip(v).fold(T::f_zero(), |acc, (x, y)| acc.f_add(&x.f_mul(y))))
        .collect()
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref<T: Field>(m: &mut Matrix<T>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].f_is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].f_inv();
        for j in c..cols {
            m[r][j] = m[r][j].f_mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].f_is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = f.f_mul(&m[r][j]);
                    m[i][j] = m[i][j].f_sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Field>(m: &Matrix<T>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the right kernel `{v : m v = 0}`.
pub fn nullspace<T: Field>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.clone();
    let piv = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::f_zero(); cols];
            v[f] = T::f_one();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = a[r][f].f_neg();
            }
            v
        })
        .collect()
}

pub fn inverse<T: Field>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let n = m.len();
    let mut a: Matrix<T> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { T::f_one() } else { T::f_zero() }));
            row
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Unique solution of `a x = b`, if `a` is square and invertible.
pub fn solve<T: Field>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut m: Matrix<T> = a.iter().zip(b).map(|(r, x)| {
        let mut row = r.clone();
        row.push(x.clone());
        row
    }).collect();
    let piv = rref(&mut m);
    if piv.len() != n || piv.last() != Some(&(n - 1)) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

pub fn det<T: Field>(m: &Matrix<T>) -> T {
    let n = m.len();
    let mut a = m.clone();
    let mut d = T::f_one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].f_is_zero()) else { return T::f_zero() };
        if p != c {
            a.swap(p, c);
            d = d.f_neg();
        }
        d = d.f_mul(&a[c][c]);
        let inv = a[c][c].f_inv();
        for i in c + 1..n {
            if a[i][c].f_is_zero() {
                continue;
            }
            let f = a[i][c].f_mul(&inv);
            for j in c..n {
                let t = f.f_mul(&a[c][j]);
                a[i][j] = a[i][j].f_sub(&t);
            }
        }
    }
    d
}

/// Characteristic polynomial `det(t I - A)` (Faddeev–LeVerrier).
pub fn charpoly(a: &Matrix<Rat>) -> UPoly {
    let n = a.len();
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = Rat::one();
    let mut mk: Matrix<Rat> = zeros(n, n);
    for k in 1..=n {
        let mut next = mat_mul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        mk = next;
        let amk = mat_mul(a, &mk);
        let tr: Rat = (0..n).map(|i| amk[i][i].clone()).sum();
        c[n - k] = -tr / Rat::from_integer((k as i64).into());
    }
    UPoly::new(c)
}

/// Fraction-free determinant over the Laurent polynomial ring.
pub fn bareiss_det(m: &Matrix<PuiseuxPoly>) -> PuiseuxPoly {
    let n = m.len();
    if n == 0 {
        return PuiseuxPoly::one();
    }
    let mut a = m.clone();
    let mut sign = false;
    let mut prev = PuiseuxPoly::one();
    for k in 0..n - 1 {
        // Pick the sparsest nonzero pivot to limit expression swell.
        let p = (k..n).filter(|&i| !a[i][k].is_zero()).min_by_key(|&i| a[i][k].len());
        let Some(p) = p else { return PuiseuxPoly::zero() };
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.exact_div(&prev).expect("Bareiss division must be exact");
            }
            a[i][k] = PuiseuxPoly::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{parse_poly, rat};

    fn rm(v: &[&[i64]]) -> Matrix<Rat> {
        v.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn inverse_and_det() {
        let a = rm(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert_eq!(det(&a), rat(1));
        assert!(inverse(&rm(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn kernel() {
        let a = rm(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = nullspace(&a);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(mat_vec(&a, &v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn charpoly_matches_det() {
        let a = rm(&[&[1, 2, 0], &[0, 3, 1], &[4, 0, 5]]);
        let p = charpoly(&a);
        for t in -3..4 {
            let tm: Matrix<Rat> =
                (0..3).map(|i| (0..3).map(|j| if i == j { rat(t) - &a[i][j] } else { -a[i][j].clone() }).collect()).collect();
            assert_eq!(p.eval(&rat(t)), det(&tm));
        }
    }

    #[test]
    fn bareiss_matches_expansion() {
        let e = |s: &str| parse_poly(s, &["x", "y"]).unwrap();
        let m = vec![
            vec![e("x^-1 + y"), e("2"), e("x*y")],
            vec![e("1"), e("y^-1"), e("x")],
            vec![e("x^2"), e("3*y"), e("1 - x")],
        ];
        let d = bareiss_det(&m);
        let cof = |a: &PuiseuxPoly, b: &PuiseuxPoly, c: &PuiseuxPoly, dd: &PuiseuxPoly| &(a * dd) - &(b * c);
        let expect = &(&(&m[0][0] * &cof(&m[1][1], &m[1][2], &m[2][1], &m[2][2]))
            - &(&m[0][1] * &cof(&m[1][0], &m[1][2], &m[2][0], &m[2][2])))
            + &(&m[0][2] * &cof(&m[1][0], &m[1][1], &m[2][0], &m[2][1]));
        assert_eq!(d, expect);
    }
}
