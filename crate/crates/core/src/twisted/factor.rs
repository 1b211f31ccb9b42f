//! Slope factorization over `Q((z))` by successive approximation.

use num_traits::Zero;

use super::{newton_polygon, TwistedPoly};
use crate::error::{Error, Result};
use crate::series::{rat, PuiseuxPoly, Rat, TruncatedSeries};

const MAX_ITERATIONS: usize = 2000;

fn trunc(p: &PuiseuxPoly, n: &Rat) -> PuiseuxPoly {
    TruncatedSeries::new(p.clone(), n.clone()).into_body()
}

/// Product coefficient list of `A * Q` modulo `z^n`.
fn product(a: &[PuiseuxPoly], q: &[PuiseuxPoly], w: &[Rat; 2], n: &Rat) -> Vec<PuiseuxPoly> {
    // q is known to have nonnegative valuation, a may have poles: give each
    // factor enough room that the product is correct modulo z^n
    let lift = |v: &[PuiseuxPoly], other: &[PuiseuxPoly]| -> Vec<TruncatedSeries> {
        let low = other
            .iter()
            .filter_map(|c| TruncatedSeries::exact(c.clone()).valuation())
            .min()
            .unwrap_or_else(Rat::zero)
            .min(Rat::zero());
        v.iter().map(|c| TruncatedSeries::new(c.clone(), n - &low)).collect()
    };
    let ta = TwistedPoly::new(lift(a, q), w.clone());
    let tq = TwistedPoly::new(lift(q, a), w.clone());
    let prod = ta.twisted_mul(&tq);
    (0..a.len() + q.len() - 1).map(|i| trunc(prod.coeff(i).body(), n)).collect()
}

/// Factors a monic `P` into single-sloped monic factors `P = P_1 ... P_m`
/// (log-scales decreasing from left to right), correct modulo `z^n`.
pub fn slope_factor(p: &TwistedPoly<TruncatedSeries>, n: i64) -> Result<Vec<TwistedPoly<TruncatedSeries>>> {
    if !p.is_monic() {
        return Err(Error::Precondition("slope factorization needs a monic polynomial".into()));
    }
    let np = newton_polygon(p, &[rat(1)]);
    if np.slopes.len() <= 1 {
        return Ok(vec![p.clone()]);
    }
    let k = np.slopes.last().unwrap().1;
    let (a, q) = split_right(p, k, n)?;
    let mut out = slope_factor(&a, n)?;
    out.push(q);
    Ok(out)
}

/// Splits `P = A Q` with `deg Q = k`, where `Q` carries the `k` smallest
/// log-scales.
fn split_right(
    p: &TwistedPoly<TruncatedSeries>,
    k: usize,
    n: i64,
) -> Result<(TwistedPoly<TruncatedSeries>, TwistedPoly<TruncatedSeries>)> {
    let d = p.degree();
    let w = p.weights().clone();
    let target = rat(n);
    if let Some(pr) = p.coeffs().iter().filter_map(|c| c.precision()).min() {
        if *pr < target {
            return Err(Error::PrecisionExhausted(format!("coefficients known only modulo z^{pr}")));
        }
    }
    let pole = p
        .coeffs()
        .iter()
        .filter_map(|c| c.valuation())
        .map(|v| if v < Rat::zero() { -v } else { Rat::zero() })
        .max()
        .unwrap_or_else(Rat::zero);
    let slack = pole * rat(d as i64) + rat(4);
    let work = &target + &slack;
    let check = &target + &(slack / rat(2));
    let pc: Vec<PuiseuxPoly> = (0..=d).map(|i| trunc(p.coeff(i).body(), &work)).collect();

    let mut q: Vec<PuiseuxPoly> = vec![PuiseuxPoly::zero(); k];
    q.push(PuiseuxPoly::one());
    let mut a: Vec<PuiseuxPoly> = (k..=d).map(|j| pc[j].clone()).collect();
    // the lowest coefficient of the cofactor only moves at higher order, so
    // its initial inverse keeps the iteration contracting
    let a0inv = TruncatedSeries::exact(a[0].clone())
        .inverse(&work)
        .map_err(|_| Error::NonConvergence("leading cofactor coefficient vanished".into()))?;
    for _ in 0..MAX_ITERATIONS {
        let prod = product(&a, &q, &w, &work);
        let resid: Vec<PuiseuxPoly> = (0..=d).map(|i| &pc[i] - &prod[i]).collect();
        if resid.iter().all(|r| trunc(r, &check).is_zero()) {
            let q = q.iter().map(|c| TruncatedSeries::new(c.clone(), target.clone())).collect();
            let a = a.iter().map(|c| TruncatedSeries::new(c.clone(), target.clone())).collect();
            return Ok((TwistedPoly::new(a, w.clone()), TwistedPoly::new(q, w)));
        }
        for m in 0..k {
            if !resid[m].is_zero() {
                q[m] = trunc(&(&q[m] + &(a0inv.body() * &resid[m])), &work);
            }
        }
        for m in k..d {
            a[m - k] = trunc(&(&a[m - k] + &resid[m]), &work);
        }
    }
    Err(Error::NonConvergence(format!("slope factor did not stabilize modulo z^{n}")))
}
