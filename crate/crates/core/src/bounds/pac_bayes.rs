use crate::bounds::query::{domain, BoundQuery, BoundValue};
use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::info::binary_kl_inverse_upper;
use crate::scalar::{lit, Real};

fn value<T: Real>(id: BoundId, v: T) -> BoundValue<T> {
    BoundValue::new(id.as_str(), v, id.unit_loss())
}

fn req_n_at_least_two<T: Real>(q: &BoundQuery<T>) -> Result<T> {
    let n = q.req_n()?;
    if n < 2 {
        return Err(domain("n", T::from_u64(n).unwrap(), "n >= 2"));
    }
    Ok(T::from_u64(n).unwrap())
}

/// `sqrt(2 sigma^2 (info + ln(sqrt(n)/delta)) / (n - 1))`, with a negative radicand clamped to 0.
fn subgaussian_penalty<T: Real>(n: T, sigma: T, delta: T, info: T) -> T {
    let two: T = lit(2.0);
    let radicand = info + (n.sqrt() / delta).ln();
    (two * sigma * sigma * radicand.max(T::zero()) / (n - T::one())).sqrt()
}

/// `train + sqrt(2 sigma^2 (KL + ln(sqrt(n)/delta)) / (n - 1))`.
pub fn pac_bayes_subgaussian_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = req_n_at_least_two(q)?;
    let sigma = q.req_sigma()?;
    let delta = q.req_delta()?;
    let info = q.req_info()?;
    let train = q.req_train()?;
    let pen = subgaussian_penalty(n, sigma, delta, info);
    Ok(value(BoundId::PacBayesSubgaussian, train + pen).with("penalty", pen))
}

/// Same shape as the PAC-Bayes bound, but `info` is a realized information density and may be negative.
pub fn single_draw_subgaussian_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = req_n_at_least_two(q)?;
    let sigma = q.req_sigma()?;
    let delta = q.req_delta()?;
    let info = q.req_info_signed()?;
    let train = q.req_train()?;
    let pen = subgaussian_penalty(n, sigma, delta, info);
    Ok(value(BoundId::SingleDrawSubgaussian, train + pen).with("penalty", pen))
}

/// `d^-1(train, (KL + ln(2 sqrt(n)/delta)) / (2n))`.
pub fn mls_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let delta = q.req_delta()?;
    let train = q.req_train()?;
    let info = q.req_info()?;
    let two: T = lit(2.0);
    let budget = (info + (two * n.sqrt() / delta).ln()) / (two * n);
    let v = binary_kl_inverse_upper(train, budget)?;
    Ok(value(BoundId::Mls, v).with("budget", budget))
}

/// Largest `p` with `d_gamma(train || p) <= (KL + ln(1/delta)) / n` for a fixed `gamma`.
///
/// Only `gamma < 0` gives an informative bound; for `gamma >= 0` every `p` near 1 is feasible
/// and the value is 1, flagged vacuous.
pub fn catoni_parametric_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let gamma = q.gamma.ok_or(Error::MissingField("gamma"))?;
    if !gamma.is_finite() {
        return Err(domain("gamma", gamma, "finite reals"));
    }
    let delta = q.req_delta()?;
    let train = q.req_train()?;
    let info = q.req_info()?;
    let budget = (info + delta.recip().ln()) / n;
    if gamma >= T::zero() {
        let mut b = value(BoundId::CatoniParametric, T::one()).with("budget", budget);
        b.vacuous = true;
        return Ok(b);
    }
    // 1 + p (e^g - 1) >= exp(g q - B)
    let num = -(gamma * train - budget).exp_m1();
    let den = -gamma.exp_m1();
    let p = num / den;
    if p < T::zero() {
        let mut b = value(BoundId::CatoniParametric, T::one())
            .with("budget", budget)
            .with("infeasible", T::one());
        b.vacuous = true;
        return Ok(b);
    }
    Ok(value(BoundId::CatoniParametric, p.min(T::one())).with("budget", budget))
}

/// Minimum of the Catoni bound over a grid of `gamma` values.
///
/// Heuristic: the minimum is taken after seeing the data and no union-bound correction is
/// applied, so the result does not carry the confidence level of a fixed-`gamma` bound.
pub fn catoni_grid_search<T: Real>(q: &BoundQuery<T>, grid: &[T]) -> Result<BoundValue<T>> {
    let mut best: Option<(T, BoundValue<T>)> = None;
    for &g in grid {
        let mut qg = q.clone();
        qg.gamma = Some(g);
        let b = catoni_parametric_bound(&qg)?;
        if best.as_ref().is_none_or(|(_, cur)| b.value < cur.value) {
            best = Some((g, b));
        }
    }
    let (g, b) = best.ok_or(Error::Empty("catoni gamma grid"))?;
    Ok(b.with("gamma", g).with("heuristic", T::one()))
}

/// `lambda train + lambda (KL + ln(1/delta)) / (2 n (1 - 1/lambda))` for `lambda > 1`.
pub fn catoni_fast_rate_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let lambda = q.lambda.ok_or(Error::MissingField("lambda"))?;
    if !(lambda > T::one()) {
        return Err(domain("lambda", lambda, "(1, inf)"));
    }
    let delta = q.req_delta()?;
    let train = q.req_train()?;
    let info = q.req_info()?;
    let two: T = lit(2.0);
    let pen = lambda * (info + delta.recip().ln()) / (two * n * (T::one() - lambda.recip()));
    Ok(value(BoundId::CatoniFastRate, lambda * train + pen).with("penalty", pen))
}

/// `sqrt((2 sigma^2 / m) ln(2/delta) (alpha (alpha - 1) D_alpha)^(1/alpha))`.
pub fn renyi_pacbayes_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let m = q.req_u64(q.m, "m")?;
    if m == 0 {
        return Err(domain("m", T::zero(), "m >= 1"));
    }
    let m = T::from_u64(m).unwrap();
    let alpha = q.alpha.ok_or(Error::MissingField("alpha"))?;
    if !(alpha > T::one()) || !alpha.is_finite() {
        return Err(Error::Unsupported {
            name: "alpha",
            value: alpha.to_f64().unwrap_or(f64::NAN),
            reason: "the Rényi bound needs a finite order alpha > 1",
        });
    }
    let sigma = q.req_sigma()?;
    let delta = q.req_delta()?;
    let info = q.req_info()?;
    let two: T = lit(2.0);
    let factor = (alpha * (alpha - T::one()) * info).powf(alpha.recip());
    let v = (two * sigma * sigma / m * (two / delta).ln() * factor).sqrt();
    Ok(value(BoundId::RenyiPacbayes, v).with("renyi_factor", factor))
}

/// Single-draw bound from alpha-mutual information (`alpha = inf`: maximal leakage).
///
/// With `conditional`, the loss is taken in `[0, 1]` and `info` is the conditional
/// alpha-mutual information given the supersample.
pub fn alpha_mi_single_draw_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n_t()?;
    let alpha = q.alpha.ok_or(Error::MissingField("alpha"))?;
    if alpha.is_nan() || alpha <= T::one() {
        return Err(Error::Unsupported {
            name: "alpha",
            value: alpha.to_f64().unwrap_or(f64::NAN),
            reason: "single-draw alpha-MI bounds need alpha > 1",
        });
    }
    let delta = q.req_delta()?;
    let info = q.req_info()?;
    let two: T = lit(2.0);
    let scale = if q.conditional {
        two / n
    } else {
        let s = q.req_sigma()?;
        two * s * s / n
    };
    let radicand = if alpha.is_infinite() {
        info + (two / delta).ln()
    } else {
        info + two.ln() + alpha / (alpha - T::one()) * delta.recip().ln()
    };
    let v = (scale * radicand).sqrt();
    Ok(BoundValue::new(BoundId::AlphaMiSingleDraw.as_str(), v, q.conditional))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::binary_kl_inverse_upper;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pac_bayes_examples() {
        let n = 10_001u64;
        let nf = n as f64;
        let q = BoundQuery::new(n)
            .sigma(0.5)
            .delta(1.0 / nf.sqrt())
            .info(0.0)
            .train(0.2);
        assert_abs_diff_eq!(
            pac_bayes_subgaussian_bound(&q).unwrap().value,
            0.2 + (0.5 * nf.ln() / (nf - 1.0)).sqrt(),
            epsilon = 1e-12
        );
        let q = BoundQuery::new(1_000_000)
            .sigma(0.5)
            .delta(0.999_999)
            .info(0.0)
            .train(0.0);
        assert!(pac_bayes_subgaussian_bound(&q).unwrap().value < 1e-2);
        // sqrt((1 + ln(sqrt(101)/0.05)) / 200)
        let q = BoundQuery::new(101).sigma(0.5).delta(0.05).info(1.0).train(0.1);
        let b = pac_bayes_subgaussian_bound(&q).unwrap();
        assert_abs_diff_eq!(b.components["penalty"], 0.177_528_765_725_087_77, epsilon = 1e-12);
        assert_abs_diff_eq!(b.value, 0.277_528_765_725_087_8, epsilon = 1e-12);
        let q = BoundQuery::new(1).sigma(0.5).delta(0.05).info(1.0).train(0.1);
        assert!(pac_bayes_subgaussian_bound(&q).is_err());
    }

    #[test]
    fn single_draw_examples() {
        let base = BoundQuery::new(101).sigma(0.5).delta(0.05).train(0.1);
        let zero = single_draw_subgaussian_bound(&base.clone().info(0.0)).unwrap().value;
        let pb = pac_bayes_subgaussian_bound(&base.clone().info(0.0)).unwrap().value;
        assert_eq!(zero, pb);
        let neg = single_draw_subgaussian_bound(&base.clone().info(-1.0)).unwrap();
        assert_abs_diff_eq!(neg.components["penalty"], 0.146_684_909_448_358_4, epsilon = 1e-12);
        let pos = single_draw_subgaussian_bound(&base.clone().info(1.0)).unwrap().value;
        assert!(neg.value < pos);
        assert!(pac_bayes_subgaussian_bound(&base.info(-1.0)).is_err());
    }

    #[test]
    fn mls_examples() {
        let n = 100u64;
        let q = BoundQuery::new(n).delta(0.1).train(0.0).info(0.0);
        let expect = -(-(20.0f64 / 0.1).ln() / 200.0).exp_m1();
        assert_abs_diff_eq!(mls_bound(&q).unwrap().value, expect, epsilon = 1e-10);
        let q = BoundQuery::new(n).delta(0.1).train(0.0).info(2.0);
        let b = mls_bound(&q).unwrap();
        assert_abs_diff_eq!(b.components["budget"], 0.036_491_586_832_740_18, epsilon = 1e-12);
        assert_abs_diff_eq!(b.value, 0.035_833_794_446_244_99, epsilon = 1e-9);
        let q = BoundQuery::new(100_000_000).delta(0.1).train(0.3).info(1.0);
        assert_abs_diff_eq!(mls_bound(&q).unwrap().value, 0.3, epsilon = 1e-3);
    }

    #[test]
    fn catoni_examples() {
        let q = BoundQuery::new(100).delta(0.1).train(0.0).info(1.0);
        let g0 = catoni_parametric_bound(&q.clone().gamma(0.0)).unwrap();
        assert_eq!(g0.value, 1.0);
        assert!(g0.vacuous);
        let b = catoni_parametric_bound(&q.clone().gamma(-0.5)).unwrap();
        assert_abs_diff_eq!(b.components["budget"], 0.033_025_850_929_940_46, epsilon = 1e-12);
        assert_abs_diff_eq!(b.value, 0.082_564_125_162_774_96, epsilon = 1e-12);
        // the solved p sits on the constraint boundary
        let d = crate::info::binary_kl_gamma(0.0, b.value, -0.5).unwrap();
        assert_abs_diff_eq!(d, b.components["budget"], epsilon = 1e-12);
    }

    #[test]
    fn catoni_grid_approaches_exact_inverse() {
        let q = BoundQuery::new(100).delta(0.1).train(0.05).info(1.0);
        let grid: Vec<f64> = (1..=4000).map(|i| -0.01 * i as f64).collect();
        let best = catoni_grid_search(&q, &grid).unwrap();
        let budget = best.components["budget"];
        let exact = binary_kl_inverse_upper(0.05, budget).unwrap();
        assert!(best.value >= exact - 1e-9);
        assert_abs_diff_eq!(best.value, exact, epsilon = 1e-4);
        // the Catoni budget differs from twice the MLS budget by ln(2 sqrt(n)) / n
        let mls = mls_bound(&q).unwrap().components["budget"];
        assert_abs_diff_eq!(budget, 2.0 * mls - (20.0f64).ln() / 100.0, epsilon = 1e-15);
    }

    #[test]
    fn fast_rate_examples() {
        let q = BoundQuery::new(100).delta(0.1).train(0.0).info(1.0).lambda(2.0);
        assert_abs_diff_eq!(
            catoni_fast_rate_bound(&q).unwrap().value,
            2.0 * (1.0 + 10f64.ln()) / 100.0,
            epsilon = 1e-15
        );
        let q = BoundQuery::new(100).delta(0.1).train(0.05).info(1.0).lambda(2.0);
        assert_abs_diff_eq!(
            catoni_fast_rate_bound(&q).unwrap().value,
            0.166_051_701_859_880_9,
            epsilon = 1e-12
        );
        let q = BoundQuery::new(100)
            .delta(0.1)
            .train(0.05)
            .info(1.0)
            .lambda(1.0 + 1e-12);
        assert!(catoni_fast_rate_bound(&q).unwrap().value > 1e6);
        let q = BoundQuery::new(100).delta(0.1).train(0.05).info(1.0).lambda(1.0);
        assert!(catoni_fast_rate_bound(&q).is_err());
    }

    #[test]
    fn renyi_examples() {
        let q = BoundQuery::<f64>::default().m(100).alpha(2.0).sigma(0.5).delta(0.1);
        assert_eq!(renyi_pacbayes_bound(&q.clone().info(0.0)).unwrap().value, 0.0);
        assert_abs_diff_eq!(
            renyi_pacbayes_bound(&q.clone().info(0.5)).unwrap().value,
            0.122_387_341_534_040_82,
            epsilon = 1e-12
        );
        assert!(renyi_pacbayes_bound(&q.clone().alpha(1.0).info(0.5)).is_err());
        // the order-dependent factor tends to 1 as alpha grows
        let far = renyi_pacbayes_bound(&q.alpha(1e6).info(0.5)).unwrap().value;
        assert_abs_diff_eq!(far, (0.005 * 20f64.ln()).sqrt(), epsilon = 1e-3);
    }

    #[test]
    fn alpha_mi_examples() {
        let n = 50u64;
        let q = BoundQuery::new(n).sigma(0.5).delta(0.1);
        let k = 4.0f64;
        let inf = alpha_mi_single_draw_bound(&q.clone().alpha(f64::INFINITY).info(k.ln())).unwrap();
        assert_abs_diff_eq!(inf.value, (0.5 / 50.0 * (k.ln() + 20f64.ln())).sqrt(), epsilon = 1e-12);
        let big = alpha_mi_single_draw_bound(&q.clone().alpha(1e4).info(k.ln())).unwrap();
        assert_abs_diff_eq!(big.value, inf.value, epsilon = 1e-4);
        // delta = 2 e^-x, alpha = 2: radicand = info + ln 2 + 2 (x - ln 2)
        let x = 3.0f64;
        let q2 = BoundQuery::new(n)
            .sigma(1.0)
            .delta(2.0 * (-x).exp())
            .alpha(2.0)
            .info(0.0);
        let v = alpha_mi_single_draw_bound(&q2).unwrap().value;
        assert_abs_diff_eq!(v, (2.0 / 50.0 * (2.0 * x - 2f64.ln())).sqrt(), epsilon = 1e-12);
        let c =
            alpha_mi_single_draw_bound(&BoundQuery::new(n).delta(0.1).alpha(2.0).info(0.3).conditional(true)).unwrap();
        assert_abs_diff_eq!(
            c.value,
            (2.0 / 50.0 * (0.3 + 2f64.ln() + 2.0 * 10f64.ln())).sqrt(),
            epsilon = 1e-12
        );
        assert!(alpha_mi_single_draw_bound(&q.alpha(0.9).info(0.1)).is_err());
    }
}
