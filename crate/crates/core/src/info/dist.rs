use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::{as_f64, Real};

/// A divergence or information value in nats. May be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Nats<T>(T);

impl<T: Real> Nats<T> {
    pub fn zero() -> Self {
        Nats(T::zero())
    }

    pub fn infinity() -> Self {
        Nats(T::infinity())
    }

    /// Wraps a computed value, absorbing negative round-off into zero.
    pub fn from_raw(value: T) -> Self {
        if value.is_nan() {
            return Nats(value);
        }
        Nats(value.max(T::zero()))
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// Finite probability vector with labelled atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist<T> {
    labels: Vec<String>,
    probs: Vec<T>,
}

fn check_probs<T: Real>(probs: &[T], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} has no atoms")));
    }
    let mut total = T::zero();
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < T::zero() {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} = {p} is not a nonnegative number"
            )));
        }
        total = total + p;
    }
    if (total - T::one()).abs() > T::sum_tolerance() {
        return Err(Error::InvalidDistribution(format!(
            "{what} sums to {}, not 1",
            as_f64(total)
        )));
    }
    Ok(())
}

fn default_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn check_distinct(labels: &[String], what: &str) -> Result<()> {
    let mut seen = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if let Some(j) = seen.insert(l.as_str(), i) {
            return Err(Error::InvalidDistribution(format!(
                "{what}: label {l:?} repeated at {j} and {i}"
            )));
        }
    }
    Ok(())
}

impl<T: Real> DiscreteDist<T> {
    pub fn new(labels: Vec<String>, probs: Vec<T>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        check_distinct(&labels, "distribution")?;
        check_probs(&probs, "distribution")?;
        Ok(Self { labels, probs })
    }

    /// Distribution over the labels `"0", "1", ...`.
    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        Self::new(default_labels(probs.len()), probs)
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("uniform over zero atoms".into()));
        }
        let p = T::one() / T::from_usize(k).unwrap();
        Self::from_probs(vec![p; k])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob_of(&self, label: &str) -> Option<T> {
        self.labels.iter().position(|l| l == label).map(|i| self.probs[i])
    }
}

/// Returns the probabilities of `p` and `q` listed in `p`'s label order.
pub(crate) fn align<T: Real>(p: &DiscreteDist<T>, q: &DiscreteDist<T>) -> Result<(Vec<T>, Vec<T>)> {
    if p.labels == q.labels {
        return Ok((p.probs.clone(), q.probs.clone()));
    }
    if p.len() != q.len() {
        return Err(Error::Alignment(format!("{} atoms versus {} atoms", p.len(), q.len())));
    }
    let index: HashMap<&str, usize> = q.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut qs = Vec::with_capacity(p.len());
    for l in &p.labels {
        match index.get(l.as_str()) {
            Some(&j) => qs.push(q.probs[j]),
            None => return Err(Error::Alignment(format!("label {l:?} missing from second argument"))),
        }
    }
    Ok((p.probs.clone(), qs))
}

/// Finite joint distribution; rows index X, columns index Y.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist<T> {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    probs: Vec<Vec<T>>,
}

impl<T: Real> JointDist<T> {
    pub fn new(x_labels: Vec<String>, y_labels: Vec<String>, probs: Vec<Vec<T>>) -> Result<Self> {
        if probs.len() != x_labels.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} rows for {} x labels",
                probs.len(),
                x_labels.len()
            )));
        }
        if probs.iter().any(|row| row.len() != y_labels.len()) {
            return Err(Error::InvalidDistribution(
                "every row must have one entry per y label".into(),
            ));
        }
        check_distinct(&x_labels, "joint x labels")?;
        check_distinct(&y_labels, "joint y labels")?;
        let flat: Vec<T> = probs.iter().flatten().copied().collect();
        check_probs(&flat, "joint distribution")?;
        Ok(Self {
            x_labels,
            y_labels,
            probs,
        })
    }

    pub fn from_matrix(probs: Vec<Vec<T>>) -> Result<Self> {
        let rows = probs.len();
        let cols = probs.first().map_or(0, Vec::len);
        Self::new(default_labels(rows), default_labels(cols), probs)
    }

    /// Joint law of X ~ `input` passed through the row-stochastic `channel`.
    pub fn from_channel(input: &[T], channel: &[Vec<T>]) -> Result<Self> {
        if input.len() != channel.len() {
            return Err(Error::InvalidDistribution(
                "channel needs one row per input symbol".into(),
            ));
        }
        for row in channel {
            check_probs(row, "channel row")?;
        }
        let probs = input
            .iter()
            .zip(channel)
            .map(|(&px, row)| row.iter().map(|&w| px * w).collect())
            .collect();
        Self::from_matrix(probs)
    }

    /// Product of two marginals.
    pub fn product(px: &DiscreteDist<T>, py: &DiscreteDist<T>) -> Self {
        let probs = px
            .probs()
            .iter()
            .map(|&a| py.probs().iter().map(|&b| a * b).collect())
            .collect();
        Self {
            x_labels: px.labels().to_vec(),
            y_labels: py.labels().to_vec(),
            probs,
        }
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.probs
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn marginal_x(&self) -> Vec<T> {
        self.probs
            .iter()
            .map(|row| row.iter().fold(T::zero(), |a, &b| a + b))
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.y_labels.len()];
        for row in &self.probs {
            for (o, &p) in out.iter_mut().zip(row) {
                *o = *o + p;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        assert!(DiscreteDist::<f64>::from_probs(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDist::<f64>::from_probs(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(DiscreteDist::<f64>::from_probs(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn rejects_repeated_labels() {
        let labels = vec!["a".to_string(), "a".to_string()];
        assert!(DiscreteDist::new(labels, vec![0.5f64, 0.5]).is_err());
    }

    #[test]
    fn aligns_by_label() {
        let p = DiscreteDist::new(vec!["a".into(), "b".into()], vec![0.25f64, 0.75]).unwrap();
        let q = DiscreteDist::new(vec!["b".into(), "a".into()], vec![0.6f64, 0.4]).unwrap();
        let (a, b) = align(&p, &q).unwrap();
        assert_eq!(a, vec![0.25, 0.75]);
        assert_eq!(b, vec![0.4, 0.6]);
        let r = DiscreteDist::new(vec!["a".into(), "c".into()], vec![0.5f64, 0.5]).unwrap();
        assert!(matches!(align(&p, &r), Err(Error::Alignment(_))));
    }

    #[test]
    fn joint_marginals() {
        let j = JointDist::from_matrix(vec![vec![0.1f64, 0.2], vec![0.3, 0.4]]).unwrap();
        let mx = j.marginal_x();
        let my = j.marginal_y();
        assert!((mx[0] - 0.3).abs() < 1e-15 && (mx[1] - 0.7).abs() < 1e-15);
        assert!((my[0] - 0.4).abs() < 1e-15 && (my[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let d = DiscreteDist::<f32>::from_probs(vec![0.1, 0.2, 0.7]).unwrap();
        assert_eq!(d.len(), 3);
    }
}
