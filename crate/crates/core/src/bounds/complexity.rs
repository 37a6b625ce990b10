use crate::bounds::query::{BoundQuery, BoundValue};
use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `d ln(2 e n / d)`, the f-CMI cap for a class of VC dimension `d` (needs `n > d >= 1`).
pub fn vc_fcmi_info_bound<T: Real>(n: u64, d_vc: u64) -> Result<T> {
    if d_vc == 0 || n <= d_vc {
        return Err(Error::OutOfDomain {
            name: "d-vc",
            value: d_vc as f64,
            domain: "1 <= d-vc < n",
        });
    }
    let n = T::from_u64(n).unwrap();
    let d = T::from_u64(d_vc).unwrap();
    let two = T::one() + T::one();
    Ok(d * (two * T::E() * n / d).ln())
}

/// `k ln(2n)`, the CMI cap for a compression scheme of size `k` (needs `n >= k >= 1`).
pub fn compression_cmi_info_bound<T: Real>(n: u64, k: u64) -> Result<T> {
    if k == 0 || k > n {
        return Err(Error::OutOfDomain {
            name: "k",
            value: k as f64,
            domain: "1 <= k <= n",
        });
    }
    let n = T::from_u64(n).unwrap();
    let two = T::one() + T::one();
    Ok(T::from_u64(k).unwrap() * (two * n).ln())
}

/// `sum_{i <= d} C(m, i)`, the Sauer-Shelah bound on the growth function.
pub fn sauer_shelah_count(m: u64, d_vc: u64) -> f64 {
    let top = d_vc.min(m);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for i in 0..top {
        term = term * (m - i) as f64 / (i + 1) as f64;
        sum += term;
    }
    sum.round()
}

/// The closed-form cap on [`sauer_shelah_count`]: `2^(d+1)` when `m < d + 1`, else `(e m / d)^d`.
pub fn sauer_shelah_cap(m: u64, d_vc: u64) -> f64 {
    if m < d_vc + 1 {
        2f64.powi(d_vc as i32 + 1)
    } else if d_vc == 0 {
        1.0
    } else {
        (std::f64::consts::E * m as f64 / d_vc as f64).powi(d_vc as i32)
    }
}

fn value<T: Real>(id: BoundId, v: T) -> BoundValue<T> {
    BoundValue::new(id.as_str(), v, id.unit_loss())
}

pub(crate) fn vc_fcmi_cap_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n()?;
    let d = q.req_u64(q.d_vc, "d-vc")?;
    Ok(value(BoundId::VcFcmiCap, vc_fcmi_info_bound(n, d)?))
}

pub(crate) fn compression_cmi_cap_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let n = q.req_n()?;
    let k = q.req_u64(q.k, "k")?;
    Ok(value(BoundId::CompressionCmiCap, compression_cmi_info_bound(n, k)?))
}

pub(crate) fn sauer_shelah_bound<T: Real>(q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    let m = q.req_u64(q.m, "m")?;
    let d = q.req_u64(q.d_vc, "d-vc")?;
    let count = T::from_f64(sauer_shelah_count(m, d)).unwrap();
    let cap = T::from_f64(sauer_shelah_cap(m, d)).unwrap();
    Ok(value(BoundId::SauerShelah, count).with("cap", cap))
}
