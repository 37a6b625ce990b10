//! Bernoulli relative entropy, its linear lower envelope, and their inverses.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, lit, Real};

const MAX_BISECTION_STEPS: usize = 200;

fn check_prob<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x.is_nan() || x < T::zero() || x > T::one() {
        return Err(Error::OutOfDomain {
            name,
            value: as_f64(x),
            domain: "[0, 1]",
        });
    }
    Ok(())
}

fn check_budget<T: Real>(c: T) -> Result<()> {
    if c.is_nan() || c < T::zero() {
        return Err(Error::OutOfDomain {
            name: "c",
            value: as_f64(c),
            domain: "[0, inf]",
        });
    }
    Ok(())
}

/// `x ln(x / y)` with `0 ln 0 = 0`.
fn xlogxy<T: Real>(x: T, y: T) -> T {
    if x == T::zero() {
        T::zero()
    } else if y == T::zero() {
        T::infinity()
    } else {
        x * (x / y).ln()
    }
}

/// `d(q || p)`, the relative entropy between Bernoulli(q) and Bernoulli(p).
pub fn binary_kl<T: Real>(q: T, p: T) -> Result<T> {
    check_prob("q", q)?;
    check_prob("p", p)?;
    Ok(binary_kl_unchecked(q, p))
}

pub(crate) fn binary_kl_unchecked<T: Real>(q: T, p: T) -> T {
    let v = xlogxy(q, p) + xlogxy(T::one() - q, T::one() - p);
    v.max(T::zero())
}

/// `d_gamma(q || p) = gamma q - ln(1 - p + p e^gamma)`; can be negative.
pub fn binary_kl_gamma<T: Real>(q: T, p: T, gamma: T) -> Result<T> {
    check_prob("q", q)?;
    check_prob("p", p)?;
    if gamma.is_nan() {
        return Err(Error::OutOfDomain {
            name: "gamma",
            value: f64::NAN,
            domain: "real numbers",
        });
    }
    Ok(binary_kl_gamma_unchecked(q, p, gamma))
}

pub(crate) fn binary_kl_gamma_unchecked<T: Real>(q: T, p: T, gamma: T) -> T {
    if gamma > T::zero() {
        // ln(1 - p + p e^g) = g + ln(p + (1 - p) e^-g)
        gamma * q - gamma - (p + (T::one() - p) * (-gamma).exp()).ln()
    } else {
        gamma * q - (p * gamma.exp_m1()).ln_1p()
    }
}

/// Largest `mu` in `[s, 1]` with `d(s || mu) <= c`, by bisection.
pub fn binary_kl_inverse_upper<T: Real>(s: T, c: T) -> Result<T> {
    check_prob("s", s)?;
    check_budget(c)?;
    if c == T::zero() {
        return Ok(s);
    }
    monotone_sup(s, T::one(), |mu| binary_kl_unchecked(s, mu) <= c)
}

/// `min(1, s + sqrt(2 s c) + 2 c)`, an explicit upper bound on the exact inverse.
pub fn binary_kl_inverse_relaxed<T: Real>(s: T, c: T) -> Result<T> {
    check_prob("s", s)?;
    check_budget(c)?;
    let two: T = lit(2.0);
    Ok((s + (two * s * c).sqrt() + two * c).min(T::one()))
}

/// Bisection for the supremum of `{x in [lo, hi] : ok(x)}` when `ok` holds on a prefix
/// of the interval and `ok(lo)` is true. Returns the feasible end of the final bracket.
pub(crate) fn monotone_sup<T: Real>(lo: T, hi: T, ok: impl Fn(T) -> bool) -> Result<T> {
    if ok(hi) {
        return Ok(hi);
    }
    let tol = T::bisection_tolerance();
    let (mut lo, mut hi) = (lo, hi);
    let half: T = lit(0.5);
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            return Ok(lo);
        }
        let mid = lo + (hi - lo) * half;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::BisectionCap(MAX_BISECTION_STEPS))
}
