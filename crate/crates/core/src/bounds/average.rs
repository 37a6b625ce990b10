use crate::bounds::query::{domain, nonneg, BoundQuery, BoundValue, Info};
use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::info::{binary_kl_inverse_relaxed, binary_kl_inverse_upper};
use crate::scalar::{lit, Real};

fn value<T: Real>(id: BoundId, v: T) -> BoundValue<T> {
    BoundValue::new(id.as_str(), v, id.unit_loss())
}

/// `sqrt(2 sigma^2 I(W; Z^n) / n)`.
pub fn avg_mi_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let sigma = q.req_sigma()?;
    let info = q.req_info()?;
    let two: T = lit(2.0);
    Ok(value(BoundId::AvgMi, (two * sigma * sigma * info / n).sqrt()))
}

/// `(1/n) sum_i sqrt(2 sigma^2 I(W; Z_i))`.
pub fn samplewise_mi_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let sigma = q.req_sigma()?;
    let infos = q.req_info_list()?;
    let two: T = lit(2.0);
    let sum = infos
        .iter()
        .fold(T::zero(), |acc, &i| acc + (two * sigma * sigma * i).sqrt());
    let total = infos.iter().fold(T::zero(), |a, &b| a + b);
    Ok(value(BoundId::SamplewiseMi, sum / n).with("info_sum", total))
}

/// Population-loss bound `d^-1(train, info / n)`, with the relaxed inverse as a component.
pub fn binary_kl_avg_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let train = q.req_train()?;
    let budget = q.req_info()? / n;
    let exact = binary_kl_inverse_upper(train, budget)?;
    let relaxed = binary_kl_inverse_relaxed(train, budget)?;
    Ok(value(BoundId::BinaryKlAvg, exact)
        .with("budget", budget)
        .with("relaxed", relaxed))
}

/// `L W` for a full-sample Wasserstein term, or `(L/n) sum_i W_i` for per-sample terms.
pub fn wasserstein_gap_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let l = q.req_lipschitz()?;
    let v = match q.info.as_ref().ok_or(Error::MissingField("info"))? {
        Info::Scalar(w) => l * nonneg("info", *w)?,
        Info::PerSample(ws) => {
            if let Some(n) = q.n {
                if n as usize != ws.len() {
                    return Err(Error::Alignment(format!(
                        "{} per-sample info values for n = {n}",
                        ws.len()
                    )));
                }
            }
            if ws.is_empty() {
                return Err(Error::Empty("per-sample Wasserstein list"));
            }
            let mut sum = T::zero();
            for &w in ws {
                sum = sum + nonneg("info", w)?;
            }
            l * sum / T::from_usize(ws.len()).unwrap()
        }
    };
    Ok(value(BoundId::WassersteinGap, v))
}

/// `sigma_beta * info^(1/alpha)` for an f_alpha-divergence (total variation at alpha = 1).
pub fn tv_gap_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let sb = nonneg("sigma-beta", q.sigma_beta.ok_or(Error::MissingField("sigma-beta"))?)?;
    let alpha = q.alpha.ok_or(Error::MissingField("alpha"))?;
    if !(alpha >= T::one()) {
        return Err(domain("alpha", alpha, "[1, inf)"));
    }
    let info = q.req_info()?;
    Ok(value(BoundId::TvGap, sb * info.powf(alpha.recip())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn avg_mi_examples() {
        let q = BoundQuery::new(10).sigma(0.5).info(0.0);
        assert_eq!(avg_mi_bound(&q).unwrap().value, 0.0);
        let n = 40u64;
        let q = BoundQuery::new(n).sigma(0.5).info(n as f64 * LN_2);
        assert_abs_diff_eq!(avg_mi_bound(&q).unwrap().value, (LN_2 / 2.0).sqrt(), epsilon = 1e-15);
        let q = BoundQuery::new(100).sigma(1.0).info(0.5);
        assert_abs_diff_eq!(avg_mi_bound(&q).unwrap().value, 0.1, epsilon = 1e-15);
        assert_eq!(
            avg_mi_bound(&BoundQuery::<f64>::new(3).info(1.0)).unwrap_err(),
            Error::MissingField("sigma")
        );
    }

    #[test]
    fn samplewise_mi_examples() {
        let q = BoundQuery::new(3).sigma(1.0).info_per_sample(vec![0.0; 3]);
        assert_eq!(samplewise_mi_bound(&q).unwrap().value, 0.0);
        let q = BoundQuery::new(2).sigma(0.5).info_per_sample(vec![0.02, 0.08]);
        assert_abs_diff_eq!(samplewise_mi_bound(&q).unwrap().value, 0.15, epsilon = 1e-15);
        let n = 50u64;
        let nf = n as f64;
        let per = 0.5 * (nf / (nf - 1.0)).ln();
        let q = BoundQuery::new(n).sigma(1.0).info_per_sample(vec![per; n as usize]);
        assert_abs_diff_eq!(
            samplewise_mi_bound(&q).unwrap().value,
            (nf / (nf - 1.0)).ln().sqrt(),
            epsilon = 1e-12
        );
        let bad = BoundQuery::new(3).sigma(1.0).info_per_sample(vec![0.1; 2]);
        assert!(matches!(samplewise_mi_bound(&bad), Err(Error::Alignment(_))));
    }

    #[test]
    fn binary_kl_avg_examples() {
        let q = BoundQuery::new(20).train(0.0).info(1.0);
        let b = binary_kl_avg_bound(&q).unwrap();
        assert_abs_diff_eq!(b.value, 0.048_770_575_499_286_05, epsilon = 1e-10);
        assert_abs_diff_eq!(b.components["relaxed"], 0.1, epsilon = 1e-15);
        let q = BoundQuery::new(20).train(0.3).info(0.0);
        assert_eq!(binary_kl_avg_bound(&q).unwrap().value, 0.3);
        let q = BoundQuery::new(1).train(0.1).info(0.36799);
        assert_abs_diff_eq!(binary_kl_avg_bound(&q).unwrap().value, 0.5, epsilon = 1e-4);
    }

    #[test]
    fn wasserstein_examples() {
        let q = BoundQuery::<f64>::default().lipschitz(3.0).info(0.0);
        assert_eq!(wasserstein_gap_bound(&q).unwrap().value, 0.0);
        let q = BoundQuery::new(4)
            .lipschitz(2.0)
            .info_per_sample(vec![0.1, 0.1, 0.2, 0.2]);
        assert_abs_diff_eq!(wasserstein_gap_bound(&q).unwrap().value, 0.3, epsilon = 1e-15);
        let q = BoundQuery::<f64>::default().lipschitz(2.0).info(0.25);
        assert_eq!(wasserstein_gap_bound(&q).unwrap().value, 0.5);
    }

    #[test]
    fn tv_gap_examples() {
        let q = BoundQuery::<f64>::default().sigma_beta(1.0).alpha(1.0).info(0.0);
        assert_eq!(tv_gap_bound(&q).unwrap().value, 0.0);
        let q = BoundQuery::<f64>::default().sigma_beta(1.0).alpha(1.0).info(0.4);
        assert_abs_diff_eq!(tv_gap_bound(&q).unwrap().value, 0.4, epsilon = 1e-15);
        let q = BoundQuery::<f64>::default().sigma_beta(1.0).alpha(2.0).info(0.25);
        assert_abs_diff_eq!(tv_gap_bound(&q).unwrap().value, 0.5, epsilon = 1e-15);
    }
}
