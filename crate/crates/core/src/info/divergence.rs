//! Divergences between two distributions on a common finite support.

use crate::error::{Error, Result};
use crate::info::dist::{align, DiscreteDist, Nats};
use crate::scalar::{as_f64, lit, Real};

/// `sum p_i ln(p_i / q_i)` over the aligned supports of `p` and `q`.
fn kl_aligned<T: Real>(p: &[T], q: &[T]) -> Nats<T> {
    let mut total = T::zero();
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == T::zero() {
            continue;
        }
        if qi == T::zero() {
            return Nats::infinity();
        }
        total = total + pi * (pi / qi).ln();
    }
    Nats::from_raw(total)
}

/// Relative entropy `D(p || q)`; infinite when `p` is not absolutely continuous w.r.t. `q`.
pub fn kl<T: Real>(p: &DiscreteDist<T>, q: &DiscreteDist<T>) -> Result<Nats<T>> {
    let (p, q) = align(p, q)?;
    Ok(kl_aligned(&p, &q))
}

/// Jeffreys divergence `D(p || q) + D(q || p)`.
pub fn symmetrized_kl<T: Real>(p: &DiscreteDist<T>, q: &DiscreteDist<T>) -> Result<Nats<T>> {
    let (p, q) = align(p, q)?;
    let forward = kl_aligned(&p, &q).value();
    let backward = kl_aligned(&q, &p).value();
    Ok(Nats::from_raw(forward + backward))
}

pub fn total_variation<T: Real>(p: &DiscreteDist<T>, q: &DiscreteDist<T>) -> Result<T> {
    let (p, q) = align(p, q)?;
    let sum = p.iter().zip(&q).fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
    Ok((sum * lit(0.5)).min(T::one()))
}

/// 1-Wasserstein distance under the discrete metric, which coincides with total variation.
pub fn wasserstein1_discrete_metric<T: Real>(p: &DiscreteDist<T>, q: &DiscreteDist<T>) -> Result<T> {
    total_variation(p, q)
}

fn check_kl_value<T: Real>(klv: T) -> Result<()> {
    if klv.is_nan() || klv < T::zero() {
        return Err(Error::OutOfDomain {
            name: "kl",
            value: as_f64(klv),
            domain: "[0, inf]",
        });
    }
    Ok(())
}

/// Pinsker's bound `sqrt(kl / 2)` on total variation. Not capped at 1.
pub fn pinsker_bound<T: Real>(klv: T) -> Result<T> {
    check_kl_value(klv)?;
    Ok((klv * lit(0.5)).sqrt())
}

/// Bretagnolle-Huber bound `sqrt(1 - exp(-kl))` on total variation.
pub fn bh_bound<T: Real>(klv: T) -> Result<T> {
    check_kl_value(klv)?;
    if klv.is_infinite() {
        return Ok(T::one());
    }
    Ok((-(-klv).exp_m1()).sqrt())
}

/// Rényi divergence of order `alpha` (`alpha > 0`, `alpha != 1`).
pub fn renyi_divergence<T: Real>(p: &DiscreteDist<T>, q: &DiscreteDist<T>, alpha: T) -> Result<Nats<T>> {
    if !(alpha > T::zero()) || alpha == T::one() || alpha.is_nan() {
        return Err(Error::Unsupported {
            name: "alpha",
            value: as_f64(alpha),
            reason: "Rényi order must be positive and different from 1",
        });
    }
    let (p, q) = align(p, q)?;
    if alpha.is_infinite() {
        // D_inf = ln max p/q
        let mut best = T::neg_infinity();
        for (&pi, &qi) in p.iter().zip(&q) {
            if pi == T::zero() {
                continue;
            }
            if qi == T::zero() {
                return Ok(Nats::infinity());
            }
            best = best.max((pi / qi).ln());
        }
        return Ok(Nats::from_raw(best));
    }
    // log-sum-exp of alpha ln p_i + (1 - alpha) ln q_i
    let mut logs = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(&q) {
        if pi == T::zero() {
            continue;
        }
        if qi == T::zero() {
            if alpha > T::one() {
                return Ok(Nats::infinity());
            }
            continue;
        }
        logs.push(alpha * pi.ln() + (T::one() - alpha) * qi.ln());
    }
    if logs.is_empty() {
        // disjoint supports with alpha < 1
        return Ok(Nats::infinity());
    }
    let m = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let s = logs.iter().fold(T::zero(), |acc, &l| acc + (l - m).exp());
    Ok(Nats::from_raw((m + s.ln()) / (alpha - T::one())))
}

/// 1-Wasserstein distance between two equal-size empirical measures on the real line.
pub fn wasserstein1_1d<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Empty("wasserstein1_1d needs samples"));
    }
    if xs.len() != ys.len() {
        return Err(Error::Alignment(format!(
            "{} samples versus {} samples",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "sample",
            value: f64::NAN,
            domain: "finite reals",
        });
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|u, v| u.partial_cmp(v).unwrap());
    b.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let total = a.iter().zip(&b).fold(T::zero(), |acc, (&u, &v)| acc + (u - v).abs());
    Ok(total / T::from_usize(a.len()).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(p: &[f64]) -> DiscreteDist<f64> {
        DiscreteDist::from_probs(p.to_vec()).unwrap()
    }

    // 0.1 ln 0.2 + 0.9 ln 1.8
    const KL_01_05: f64 = 0.368_064_207_168_497_1;
    // 0.5 ln 5 + 0.5 ln(5/9)
    const KL_05_01: f64 = 0.510_825_623_765_990_7;

    #[test]
    fn kl_examples() {
        assert_eq!(kl(&d(&[0.3, 0.7]), &d(&[0.3, 0.7])).unwrap().value(), 0.0);
        assert_abs_diff_eq!(
            kl(&d(&[1.0, 0.0]), &d(&[0.5, 0.5])).unwrap().value(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            kl(&d(&[0.1, 0.9]), &d(&[0.5, 0.5])).unwrap().value(),
            KL_01_05,
            epsilon = 1e-12
        );
        assert!(kl(&d(&[0.5, 0.5]), &d(&[1.0, 0.0])).unwrap().is_infinite());
    }

    #[test]
    fn symmetrized_examples() {
        assert_eq!(symmetrized_kl(&d(&[0.2, 0.8]), &d(&[0.2, 0.8])).unwrap().value(), 0.0);
        assert!(symmetrized_kl(&d(&[1.0, 0.0]), &d(&[0.5, 0.5])).unwrap().is_infinite());
        assert_abs_diff_eq!(
            symmetrized_kl(&d(&[0.1, 0.9]), &d(&[0.5, 0.5])).unwrap().value(),
            KL_01_05 + KL_05_01,
            epsilon = 1e-12
        );
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(total_variation(&d(&[0.1, 0.9]), &d(&[0.1, 0.9])).unwrap(), 0.0);
        assert_eq!(total_variation(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap(), 1.0);
        assert_abs_diff_eq!(
            total_variation(&d(&[0.1, 0.9]), &d(&[0.5, 0.5])).unwrap(),
            0.4,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            wasserstein1_discrete_metric(&d(&[0.1, 0.9]), &d(&[0.5, 0.5])).unwrap(),
            0.4,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pinsker_and_bh() {
        assert_eq!(pinsker_bound(0.0).unwrap(), 0.0);
        assert_eq!(bh_bound(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(pinsker_bound(0.02).unwrap(), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(bh_bound(0.02).unwrap(), 0.140_717_186_914_906_56, epsilon = 1e-12);
        assert!(pinsker_bound(f64::INFINITY).unwrap().is_infinite());
        assert_eq!(bh_bound(f64::INFINITY).unwrap(), 1.0);
        assert!(pinsker_bound(-0.1).is_err());
    }

    #[test]
    fn renyi_examples() {
        for alpha in [0.5, 2.0, 7.0] {
            assert_abs_diff_eq!(
                renyi_divergence(&d(&[0.3, 0.7]), &d(&[0.3, 0.7]), alpha)
                    .unwrap()
                    .value(),
                0.0,
                epsilon = 1e-15
            );
        }
        assert_abs_diff_eq!(
            renyi_divergence(&d(&[1.0, 0.0]), &d(&[0.5, 0.5]), 2.0).unwrap().value(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        for alpha in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert_abs_diff_eq!(
                renyi_divergence(&d(&[0.1, 0.9]), &d(&[0.5, 0.5]), alpha)
                    .unwrap()
                    .value(),
                KL_01_05,
                epsilon = 1e-5
            );
        }
        assert!(renyi_divergence(&d(&[0.5, 0.5]), &d(&[1.0, 0.0]), 2.0)
            .unwrap()
            .is_infinite());
        assert!(renyi_divergence(&d(&[0.5, 0.5]), &d(&[0.5, 0.5]), 1.0).is_err());
    }

    #[test]
    fn wasserstein_examples() {
        assert_eq!(wasserstein1_1d(&[1.0, 2.0], &[2.0, 1.0]).unwrap(), 0.0);
        assert_eq!(wasserstein1_1d(&[0.0], &[1.0]).unwrap(), 1.0);
        assert_eq!(wasserstein1_1d(&[0.0, 2.0], &[1.0, 3.0]).unwrap(), 1.0);
        assert!(wasserstein1_1d::<f64>(&[], &[]).is_err());
        assert!(wasserstein1_1d(&[0.0], &[1.0, 2.0]).is_err());
    }
}
