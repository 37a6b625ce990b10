//! Mutual information and its order-alpha generalizations on finite joints.

use crate::error::{Error, Result};
use crate::info::dist::{JointDist, Nats};
use crate::scalar::{as_f64, Real};

fn log_sum_exp<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    let xs: Vec<T> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() || m.is_infinite() {
        return m;
    }
    m + xs.iter().fold(T::zero(), |acc, &x| acc + (x - m).exp()).ln()
}

/// `I(X; Y) = D(P_XY || P_X P_Y)`.
pub fn mutual_information<T: Real>(j: &JointDist<T>) -> Nats<T> {
    let px = j.marginal_x();
    let py = j.marginal_y();
    let mut total = T::zero();
    for (row, &a) in j.rows().iter().zip(&px) {
        for (&pxy, &b) in row.iter().zip(&py) {
            if pxy > T::zero() {
                total = total + pxy * (pxy / (a * b)).ln();
            }
        }
    }
    Nats::from_raw(total)
}

/// Rows of the channel `P_{Y|X}` for inputs with positive mass, paired with `ln P_X(x)`.
fn channel_rows<T: Real>(j: &JointDist<T>) -> Vec<(T, Vec<T>)> {
    j.rows()
        .iter()
        .zip(j.marginal_x())
        .filter(|(_, px)| *px > T::zero())
        .map(|(row, px)| (px.ln(), row.iter().map(|&v| v / px).collect()))
        .collect()
}

/// `L(X -> Y) = ln sum_y max_x P_{Y|X}(y|x)`.
pub fn maximal_leakage<T: Real>(j: &JointDist<T>) -> Nats<T> {
    let rows = channel_rows(j);
    let cols = j.y_labels().len();
    let total = (0..cols).fold(T::zero(), |acc, y| {
        acc + rows.iter().map(|(_, r)| r[y]).fold(T::zero(), T::max)
    });
    Nats::from_raw(total.ln())
}

/// `ln sum_y (sum_x P_X(x) P_{Y|X}(y|x)^alpha)^{1/alpha}`.
fn log_sibson_sum<T: Real>(j: &JointDist<T>, alpha: T) -> T {
    let rows = channel_rows(j);
    let cols = j.y_labels().len();
    let per_y = (0..cols).map(|y| {
        let inner = log_sum_exp(
            rows.iter()
                .filter(|(_, r)| r[y] > T::zero())
                .map(|(lpx, r)| *lpx + alpha * r[y].ln()),
        );
        inner / alpha
    });
    log_sum_exp(per_y)
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha.is_nan() || alpha <= T::one() {
        return Err(Error::Unsupported {
            name: "alpha",
            value: as_f64(alpha),
            reason: "alpha-mutual information is implemented for alpha > 1 only",
        });
    }
    Ok(())
}

/// Order-alpha mutual information in Sibson's form, with `alpha = inf` giving the maximal leakage.
///
/// The outer sum runs over the outputs `Y`, so `I(X;Y) <= I_alpha <= L(X -> Y)`.
pub fn alpha_mutual_information<T: Real>(j: &JointDist<T>, alpha: T) -> Result<Nats<T>> {
    check_alpha(alpha)?;
    if alpha.is_infinite() {
        return Ok(maximal_leakage(j));
    }
    let v = alpha / (alpha - T::one()) * log_sibson_sum(j, alpha);
    Ok(Nats::from_raw(v))
}

/// Conditional order-alpha mutual information from the conditional joints `P_{XY|Z=z}`
/// and their weights `P_Z(z)`.
///
/// Computes `(1/(alpha-1)) ln sum_z P_Z(z) S_z^alpha`, where `S_z` is the Sibson sum of the
/// joint at `z`. At `alpha = inf` this is the conditional maximal leakage `max_z L_z`.
pub fn conditional_alpha_mutual_information<T: Real>(parts: &[(T, JointDist<T>)], alpha: T) -> Result<Nats<T>> {
    check_alpha(alpha)?;
    if parts.is_empty() {
        return Err(Error::Empty(
            "conditional alpha-MI needs at least one conditional joint",
        ));
    }
    let weights: Vec<T> = parts.iter().map(|(w, _)| *w).collect();
    if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
        return Err(Error::InvalidDistribution("negative conditioning weight".into()));
    }
    let total = weights.iter().fold(T::zero(), |a, &b| a + b);
    if (total - T::one()).abs() > T::sum_tolerance() {
        return Err(Error::InvalidDistribution(format!(
            "conditioning weights sum to {}, not 1",
            as_f64(total)
        )));
    }
    let live = parts.iter().filter(|(w, _)| *w > T::zero());
    if alpha.is_infinite() {
        let v = live.map(|(_, j)| maximal_leakage(j).value()).fold(T::zero(), T::max);
        return Ok(Nats::from_raw(v));
    }
    let v = log_sum_exp(live.map(|(w, j)| w.ln() + alpha * log_sibson_sum(j, alpha)));
    Ok(Nats::from_raw(v / (alpha - T::one())))
}
