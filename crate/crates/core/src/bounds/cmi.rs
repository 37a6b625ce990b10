use crate::bounds::query::{domain, BoundQuery, BoundValue};
use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::info::{binary_kl_unchecked, monotone_sup};
use crate::scalar::{as_f64, lit, Real};

fn value<T: Real>(id: BoundId, v: T) -> BoundValue<T> {
    BoundValue::new(id.as_str(), v, id.unit_loss())
}

/// `sqrt(2 info / n)` for info in {CMI, e-CMI, f-CMI, e-MI, ld-MI}.
pub fn cmi_slow_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let info = q.req_info()?;
    let two: T = lit(2.0);
    Ok(value(BoundId::CmiSlow, (two * info / n).sqrt()))
}

/// Left-hand side of `lambda (1 - gamma) + (e^lambda - 1 - lambda)(1 + gamma^2) <= 0`.
pub fn cmi_fast_constraint<T: Real>(gamma: T, lambda: T) -> T {
    lambda * (T::one() - gamma) + (lambda.exp_m1() - lambda) * (T::one() + gamma * gamma)
}

/// `gamma train + info / (lambda n)` for feasible `(gamma, lambda)`.
pub fn cmi_fast_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let gamma = q.gamma.ok_or(Error::MissingField("gamma"))?;
    let lambda = q.lambda.ok_or(Error::MissingField("lambda"))?;
    if !(gamma > T::zero()) {
        return Err(domain("gamma", gamma, "(0, inf)"));
    }
    if !(lambda > T::zero()) {
        return Err(domain("lambda", lambda, "(0, inf)"));
    }
    let train = q.req_train()?;
    let info = q.req_info()?;
    let c = cmi_fast_constraint(gamma, lambda);
    if c > T::zero() {
        return Err(Error::Infeasible {
            reason: "lambda (1 - gamma) + (e^lambda - 1 - lambda)(1 + gamma^2) must be <= 0".into(),
            constraint: as_f64(c),
        });
    }
    Ok(value(BoundId::CmiFast, gamma * train + info / (lambda * n)).with("constraint", c))
}

/// `info / (n ln 2)` for interpolating learners.
pub fn cmi_interpolating_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    if let Some(t) = q.train_loss {
        if t != T::zero() {
            return Err(domain("train", t, "{0} (interpolating learner)"));
        }
    }
    let info = q.req_info()?;
    Ok(value(BoundId::CmiInterpolating, info / (n * T::LN_2())))
}

/// Largest `pop` with `d(train || (train + pop) / 2) <= info / n`.
pub fn cmi_binary_kl_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let train = q.req_train()?;
    let budget = q.req_info()? / n;
    let half: T = lit(0.5);
    let pop = if budget == T::zero() {
        train
    } else {
        monotone_sup(train, T::one(), |pop| {
            binary_kl_unchecked(train, (train + pop) * half) <= budget
        })?
    };
    Ok(value(BoundId::CmiBinaryKl, pop).with("budget", budget))
}

/// `(1/n) sum_i sqrt(2 I_i)` with `I_i` the CMI of `S_i` given the pair of index `i`
/// ([`BoundId::SamplewiseCmi`]) or given the whole supersample ([`BoundId::SamplewiseCmiSupersample`]).
pub fn samplewise_cmi_bound<T: Real>(q: &BoundQuery<T>, id: BoundId) -> Result<BoundValue<T>> {
    if !matches!(id, BoundId::SamplewiseCmi | BoundId::SamplewiseCmiSupersample) {
        return Err(Error::Config(format!("{id} is not a samplewise CMI bound")));
    }
    let n = q.req_n_t()?;
    let infos = q.req_info_list()?;
    let two: T = lit(2.0);
    let sum = infos.iter().fold(T::zero(), |acc, &i| acc + (two * i).sqrt());
    Ok(value(id, sum / n))
}

/// `((n + 1) / n) sqrt(info / 2)` with info the leave-one-out e-MI.
pub fn loo_cmi_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let info = q.req_info()?;
    let half: T = lit(0.5);
    Ok(value(BoundId::LooCmi, (n + T::one()) / n * (info * half).sqrt()))
}

fn slack<T: Real>() -> T {
    T::sum_tolerance()
}

/// Population loss of an interpolating learner with binary loss, `(1/n) sum_i I(Delta_i; S_i) / ln 2`.
pub fn interp_identity_ldmi<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let infos = q.req_info_list()?;
    let cap = T::LN_2();
    if let Some((i, &v)) = infos.iter().enumerate().find(|(_, &v)| v > cap + slack()) {
        return Err(Error::ImpossibleMeasurement(format!(
            "ld-MI at index {i} is {v}, above ln 2"
        )));
    }
    let sum = infos.iter().fold(T::zero(), |a, &b| a + b.min(cap));
    Ok(value(BoundId::InterpIdentityLdmi, sum / (n * cap)))
}

/// Population loss of an interpolating learner with binary loss, `loo-e-MI / ln(n + 1)`.
pub fn interp_identity_loo<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let info = q.req_info()?;
    let cap = (n + T::one()).ln();
    if info > cap + slack() {
        return Err(Error::ImpossibleMeasurement(format!(
            "loo-e-MI is {info}, above ln(n + 1) = {cap}"
        )));
    }
    Ok(value(BoundId::InterpIdentityLoo, info.min(cap) / cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn slow_examples() {
        assert_eq!(cmi_slow_bound(&BoundQuery::new(7).info(0.0)).unwrap().value, 0.0);
        let b = cmi_slow_bound(&BoundQuery::new(30).info(30.0 * LN_2)).unwrap();
        assert_abs_diff_eq!(b.value, (2.0 * LN_2).sqrt(), epsilon = 1e-15);
        assert!(b.vacuous);
        let b = cmi_slow_bound(&BoundQuery::new(100).info(0.5)).unwrap();
        assert_abs_diff_eq!(b.value, 0.1, epsilon = 1e-15);
        assert!(!b.vacuous);
    }

    #[test]
    fn fast_examples() {
        assert_abs_diff_eq!(
            cmi_fast_constraint(2.0, 0.1),
            -0.074_145_409_621_761_89,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cmi_fast_constraint(1.0, 0.1),
            0.010_341_836_151_295_247,
            epsilon = 1e-12
        );
        let q = BoundQuery::new(100).train(0.1).info(1.0).gamma(2.0).lambda(0.1);
        assert_abs_diff_eq!(cmi_fast_bound(&q).unwrap().value, 0.2 + 0.1, epsilon = 1e-15);
        match cmi_fast_bound(&q.clone().gamma(1.0)) {
            Err(Error::Infeasible { constraint, .. }) => {
                assert_abs_diff_eq!(constraint, 0.010_341_836_151_295_247, epsilon = 1e-12)
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        // tiny lambda stays feasible for gamma > 1 while the bound blows up
        let q = BoundQuery::new(100).train(0.1).info(1.0).gamma(1.5).lambda(1e-9);
        assert!(cmi_fast_bound(&q).unwrap().value > 1e6);
    }

    #[test]
    fn interpolating_examples() {
        let n = 100u64;
        let b = cmi_interpolating_bound(&BoundQuery::new(n).info(n as f64 * LN_2)).unwrap();
        assert_eq!(b.value, 1.0);
        assert_eq!(
            cmi_interpolating_bound(&BoundQuery::new(n).info(0.0)).unwrap().value,
            0.0
        );
        let b = cmi_interpolating_bound(&BoundQuery::new(n).info(LN_2 * n as f64 / 4.0)).unwrap();
        assert_abs_diff_eq!(b.value, 0.25, epsilon = 1e-15);
        assert!(cmi_interpolating_bound(&BoundQuery::new(n).train(0.1).info(1.0)).is_err());
    }

    #[test]
    fn binary_kl_examples() {
        let b = cmi_binary_kl_bound(&BoundQuery::new(10).train(0.2).info(0.0)).unwrap();
        assert_eq!(b.value, 0.2);
        let b = cmi_binary_kl_bound(&BoundQuery::new(20).train(0.0).info(1.0)).unwrap();
        assert_abs_diff_eq!(b.value, 2.0 * -(-0.05f64).exp_m1(), epsilon = 1e-9);
        assert_abs_diff_eq!(b.value, 0.097_541_150_998_571_97, epsilon = 1e-9);
        let b = cmi_binary_kl_bound(&BoundQuery::new(1).train(0.0).info(5.0)).unwrap();
        assert_eq!(b.value, 1.0);
    }

    #[test]
    fn samplewise_examples() {
        let q = BoundQuery::new(2).info_per_sample(vec![0.005, 0.02]);
        let b = samplewise_cmi_bound(&q, BoundId::SamplewiseCmi).unwrap();
        assert_abs_diff_eq!(b.value, (0.1 + 0.2) / 2.0, epsilon = 1e-15);
        let b = samplewise_cmi_bound(&q, BoundId::SamplewiseCmiSupersample).unwrap();
        assert_eq!(b.name, "samplewise_cmi_supersample");
        assert!(samplewise_cmi_bound(&q, BoundId::CmiSlow).is_err());
    }

    #[test]
    fn loo_examples() {
        assert_eq!(loo_cmi_bound(&BoundQuery::new(5).info(0.0)).unwrap().value, 0.0);
        let n = 9u64;
        let b = loo_cmi_bound(&BoundQuery::new(n).info(10f64.ln())).unwrap();
        assert_abs_diff_eq!(b.value, 10.0 / 9.0 * (10f64.ln() / 2.0).sqrt(), epsilon = 1e-15);
        let b = loo_cmi_bound(&BoundQuery::new(99).info(0.02)).unwrap();
        assert_abs_diff_eq!(b.value, 100.0 / 99.0 * 0.1, epsilon = 1e-15);
    }

    #[test]
    fn identity_examples() {
        let q = BoundQuery::new(4).info_per_sample(vec![0.0; 4]);
        assert_eq!(interp_identity_ldmi(&q).unwrap().value, 0.0);
        let q = BoundQuery::new(4).info_per_sample(vec![LN_2; 4]);
        assert_abs_diff_eq!(interp_identity_ldmi(&q).unwrap().value, 1.0, epsilon = 1e-15);
        let q = BoundQuery::new(4).info_per_sample(vec![0.25 * LN_2; 4]);
        assert_abs_diff_eq!(interp_identity_ldmi(&q).unwrap().value, 0.25, epsilon = 1e-15);
        let q = BoundQuery::new(2).info_per_sample(vec![0.1, 0.8]);
        assert!(matches!(interp_identity_ldmi(&q), Err(Error::ImpossibleMeasurement(_))));

        let n = 9u64;
        assert_eq!(interp_identity_loo(&BoundQuery::new(n).info(0.0)).unwrap().value, 0.0);
        assert_eq!(
            interp_identity_loo(&BoundQuery::new(n).info(10f64.ln())).unwrap().value,
            1.0
        );
        let b = interp_identity_loo(&BoundQuery::new(n).info(0.25 * 10f64.ln())).unwrap();
        assert_abs_diff_eq!(b.value, 0.25, epsilon = 1e-15);
        assert!(interp_identity_loo(&BoundQuery::new(n).info(3.0)).is_err());
    }
}
