use crate::bounds::query::{domain, nonneg, BoundQuery, BoundValue};
use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Gap bound for noisy iterative algorithms, `sqrt((sigma^2 / n) sum_t eta_t^2 L^2 / rho_t^2)`.
///
/// Components: `info_quadratic` is `sum_t eta_t^2 L^2 / (2 rho_t^2)`; with `d` set,
/// `info_log` is `sum_t (d/2) ln(1 + eta_t^2 L^2 / (d rho_t^2))` and `log_form` the bound it gives.
pub fn pjl_iterative_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let sigma = q.req_sigma()?;
    let l = q.req_lipschitz()?;
    let eta = q.eta.as_ref().ok_or(Error::MissingField("eta"))?;
    let rho = q.rho.as_ref().ok_or(Error::MissingField("rho"))?;
    if eta.len() != rho.len() {
        return Err(Error::Alignment(format!(
            "{} step sizes for {} noise levels",
            eta.len(),
            rho.len()
        )));
    }
    if eta.is_empty() {
        return Err(Error::Empty("step-size schedule"));
    }
    let two: T = lit(2.0);
    let half: T = lit(0.5);
    let d = match q.d {
        Some(0) => return Err(domain("d", T::zero(), "d >= 1")),
        Some(d) => Some(T::from_u64(d).unwrap()),
        None => None,
    };
    let mut quad = T::zero();
    let mut logf = T::zero();
    for (&e, &r) in eta.iter().zip(rho) {
        nonneg("eta", e)?;
        nonneg("rho", r)?;
        let signal = e * e * l * l;
        if signal == T::zero() {
            continue;
        }
        if r == T::zero() {
            return Err(domain("rho", r, "rho_t > 0 wherever eta_t L > 0"));
        }
        let ratio = signal / (r * r);
        quad = quad + ratio * half;
        if let Some(d) = d {
            logf = logf + d * half * (ratio / d).ln_1p();
        }
    }
    let v = (two * sigma * sigma * quad / n).sqrt();
    let mut b = BoundValue::new(BoundId::PjlIterative.as_str(), v, false).with("info_quadratic", quad);
    if d.is_some() {
        b = b
            .with("info_log", logf)
            .with("log_form", (two * sigma * sigma * logf / n).sqrt());
    }
    Ok(b)
}

/// SGLD schedule `eta_t = 1/t`, `rho_t = sqrt(eta_t / beta)` for `t = 1..=steps`.
pub fn sgld_schedule<T: Real>(steps: usize, beta: T) -> (Vec<T>, Vec<T>) {
    let eta: Vec<T> = (1..=steps).map(|t| T::from_usize(t).unwrap().recip()).collect();
    let rho = eta.iter().map(|&e| (e / beta).sqrt()).collect();
    (eta, rho)
}

/// The SGLD corollary for `T = n k` steps with `eta_t = 1/t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgldCorollary<T> {
    /// `sqrt((beta sigma^2 L^2 / n) H_{nk})`.
    pub value: T,
    /// `H_{nk} = sum_{t <= nk} 1/t`.
    pub harmonic: T,
    /// `sqrt((beta sigma^2 L^2 / n)(ln n + ln k + 1))`.
    pub relaxed: T,
}

pub fn sgld_corollary<T: Real>(n: u64, k: u64, beta: T, sigma: T, lipschitz: T) -> Result<SgldCorollary<T>> {
    if n == 0 || k == 0 {
        return Err(Error::OutOfDomain {
            name: "n k",
            value: (n * k) as f64,
            domain: "n, k >= 1",
        });
    }
    if !(beta > T::zero()) {
        return Err(domain("beta", beta, "(0, inf)"));
    }
    let steps = n * k;
    let harmonic = (1..=steps)
        .rev()
        .fold(T::zero(), |acc, t| acc + T::from_u64(t).unwrap().recip());
    let nf = T::from_u64(n).unwrap();
    let kf = T::from_u64(k).unwrap();
    let scale = beta * sigma * sigma * lipschitz * lipschitz / nf;
    Ok(SgldCorollary {
        value: (scale * harmonic).sqrt(),
        harmonic,
        relaxed: (scale * (nf.ln() + kf.ln() + T::one())).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn query(n: u64, sigma: f64, l: f64, eta: Vec<f64>, rho: Vec<f64>) -> BoundQuery<f64> {
        BoundQuery::new(n).sigma(sigma).lipschitz(l).eta(eta).rho(rho)
    }

    #[test]
    fn pjl_examples() {
        let q = query(10, 1.0, 0.0, vec![0.5, 0.25], vec![1.0, 1.0]);
        assert_eq!(pjl_iterative_bound(&q).unwrap().value, 0.0);
        let q = query(1, 1.0, 1.0, vec![1.0], vec![1.0]);
        assert_eq!(pjl_iterative_bound(&q).unwrap().value, 1.0);
        let q = query(1, 1.0, 1.0, vec![1.0], vec![0.0]);
        assert!(pjl_iterative_bound(&q).is_err());
        let q = query(1, 1.0, 1.0, vec![0.0], vec![0.0]);
        assert_eq!(pjl_iterative_bound(&q).unwrap().value, 0.0);
    }

    #[test]
    fn sgld_schedule_matches_corollary() {
        let (n, k, beta, sigma, l) = (32u64, 2u64, 3.0, 0.7, 1.5);
        let (eta, rho) = sgld_schedule((n * k) as usize, beta);
        let b = pjl_iterative_bound(&query(n, sigma, l, eta, rho).d(1)).unwrap();
        let c = sgld_corollary(n, k, beta, sigma, l).unwrap();
        assert_abs_diff_eq!(b.value, c.value, epsilon = 1e-12);
        assert!(c.value <= c.relaxed);
        assert!(b.components["log_form"] <= b.value);
        assert!(c.harmonic <= (n as f64).ln() + (k as f64).ln() + 1.0);
    }
}
