use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{as_f64, Real};

/// A measured information value: one number, or one per training index.
#[derive(Debug, Clone, PartialEq)]
pub enum Info<T> {
    Scalar(T),
    PerSample(Vec<T>),
}

/// Inputs to a bound evaluator. Every field is optional; each bound asks for what it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundQuery<T> {
    pub n: Option<u64>,
    pub delta: Option<T>,
    pub sigma: Option<T>,
    pub info: Option<Info<T>>,
    pub train_loss: Option<T>,
    pub gamma: Option<T>,
    pub lambda: Option<T>,
    pub alpha: Option<T>,
    pub lipschitz: Option<T>,
    pub sigma_beta: Option<T>,
    pub m: Option<u64>,
    pub d_vc: Option<u64>,
    pub k: Option<u64>,
    pub d: Option<u64>,
    pub eta: Option<Vec<T>>,
    pub rho: Option<Vec<T>>,
    pub conditional: bool,
}

impl<T> Default for BoundQuery<T> {
    fn default() -> Self {
        Self {
            n: None,
            delta: None,
            sigma: None,
            info: None,
            train_loss: None,
            gamma: None,
            lambda: None,
            alpha: None,
            lipschitz: None,
            sigma_beta: None,
            m: None,
            d_vc: None,
            k: None,
            d: None,
            eta: None,
            rho: None,
            conditional: false,
        }
    }
}

macro_rules! setter {
    ($name:ident, $field:ident, $ty:ty) => {
        pub fn $name(mut self, v: $ty) -> Self {
            self.$field = Some(v);
            self
        }
    };
}

impl<T: Real> BoundQuery<T> {
    pub fn new(n: u64) -> Self {
        Self {
            n: Some(n),
            ..Self::default()
        }
    }

    setter!(delta, delta, T);
    setter!(sigma, sigma, T);
    setter!(train, train_loss, T);
    setter!(gamma, gamma, T);
    setter!(lambda, lambda, T);
    setter!(alpha, alpha, T);
    setter!(lipschitz, lipschitz, T);
    setter!(sigma_beta, sigma_beta, T);
    setter!(m, m, u64);
    setter!(d_vc, d_vc, u64);
    setter!(k, k, u64);
    setter!(d, d, u64);
    setter!(eta, eta, Vec<T>);
    setter!(rho, rho, Vec<T>);

    pub fn info(mut self, v: T) -> Self {
        self.info = Some(Info::Scalar(v));
        self
    }

    pub fn info_per_sample(mut self, v: Vec<T>) -> Self {
        self.info = Some(Info::PerSample(v));
        self
    }

    pub fn conditional(mut self, yes: bool) -> Self {
        self.conditional = yes;
        self
    }

    pub(crate) fn req_n(&self) -> Result<u64> {
        match self.n {
            None => Err(Error::MissingField("n")),
            Some(0) => Err(Error::OutOfDomain {
                name: "n",
                value: 0.0,
                domain: "n >= 1",
            }),
            Some(n) => Ok(n),
        }
    }

    pub(crate) fn req_n_t(&self) -> Result<T> {
        Ok(T::from_u64(self.req_n()?).unwrap())
    }

    pub(crate) fn req_delta(&self) -> Result<T> {
        let d = self.delta.ok_or(Error::MissingField("delta"))?;
        if !(d > T::zero() && d < T::one()) {
            return Err(domain("delta", d, "(0, 1)"));
        }
        Ok(d)
    }

    pub(crate) fn req_sigma(&self) -> Result<T> {
        nonneg("sigma", self.sigma.ok_or(Error::MissingField("sigma"))?)
    }

    pub(crate) fn req_train(&self) -> Result<T> {
        let t = self.train_loss.ok_or(Error::MissingField("train"))?;
        if !(t >= T::zero() && t <= T::one()) {
            return Err(domain("train", t, "[0, 1]"));
        }
        Ok(t)
    }

    pub(crate) fn req_lipschitz(&self) -> Result<T> {
        nonneg("lipschitz", self.lipschitz.ok_or(Error::MissingField("lipschitz"))?)
    }

    pub(crate) fn req_u64(&self, v: Option<u64>, name: &'static str) -> Result<u64> {
        v.ok_or(Error::MissingField(name))
    }

    fn raw_info(&self) -> Result<&Info<T>> {
        self.info.as_ref().ok_or(Error::MissingField("info"))
    }

    /// Scalar information value, checked to be nonnegative.
    pub(crate) fn req_info(&self) -> Result<T> {
        nonneg("info", self.req_info_signed()?)
    }

    /// Scalar information value; may be negative (realized information densities).
    pub(crate) fn req_info_signed(&self) -> Result<T> {
        match self.raw_info()? {
            Info::Scalar(v) if v.is_nan() => Err(domain("info", *v, "real numbers")),
            Info::Scalar(v) => Ok(*v),
            Info::PerSample(_) => Err(Error::Config(
                "this bound takes a single info value, not a per-sample list".into(),
            )),
        }
    }

    /// Per-sample information values, checked against `n` and to be nonnegative.
    pub(crate) fn req_info_list(&self) -> Result<Vec<T>> {
        let n = self.req_n()?;
        match self.raw_info()? {
            Info::PerSample(v) => {
                if v.len() as u64 != n {
                    return Err(Error::Alignment(format!(
                        "{} per-sample info values for n = {n}",
                        v.len()
                    )));
                }
                for &x in v {
                    nonneg("info", x)?;
                }
                Ok(v.clone())
            }
            Info::Scalar(_) => Err(Error::Config("this bound takes a per-sample info list".into())),
        }
    }
}

pub(crate) fn domain<T: Real>(name: &'static str, v: T, domain: &'static str) -> Error {
    Error::OutOfDomain {
        name,
        value: as_f64(v),
        domain,
    }
}

pub(crate) fn nonneg<T: Real>(name: &'static str, v: T) -> Result<T> {
    if v.is_nan() || v < T::zero() {
        return Err(domain(name, v, "[0, inf]"));
    }
    Ok(v)
}

/// An evaluated bound with its intermediate terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue<T> {
    pub name: String,
    pub value: T,
    pub vacuous: bool,
    pub components: BTreeMap<String, T>,
}

impl<T: Real> BoundValue<T> {
    pub(crate) fn new(name: &str, value: T, unit_loss: bool) -> Self {
        let vacuous = value.is_infinite() || (unit_loss && value > T::one());
        Self {
            name: name.to_string(),
            value,
            vacuous,
            components: BTreeMap::new(),
        }
    }

    pub(crate) fn with(mut self, key: &str, v: T) -> Self {
        self.components.insert(key.to_string(), v);
        self
    }
}
