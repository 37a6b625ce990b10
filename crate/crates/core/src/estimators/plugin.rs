//! Plug-in (empirical) mutual information on small discrete alphabets.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::info::Nats;

/// Plug-in MI of the normalized contingency table `counts[x][y]`.
pub fn plug_in_mi(counts: &[Vec<u64>]) -> Result<Nats<f64>> {
    let cols = counts.first().map_or(0, Vec::len);
    if counts.is_empty() || cols == 0 {
        return Err(Error::Empty("contingency table"));
    }
    if counts.iter().any(|r| r.len() != cols) {
        return Err(Error::Alignment("contingency table rows differ in length".into()));
    }
    let rows: Vec<u128> = counts.iter().map(|r| r.iter().map(|&c| u128::from(c)).sum()).collect();
    let col_sums: Vec<u128> = (0..cols)
        .map(|j| counts.iter().map(|r| u128::from(r[j])).sum())
        .collect();
    let total: u128 = rows.iter().sum();
    if total == 0 {
        return Err(Error::Empty("contingency table with zero total count"));
    }
    let mut acc = 0.0;
    for (i, r) in counts.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let num = u128::from(c) * total;
            let den = rows[i] * col_sums[j];
            // Integer comparison makes product-form tables exactly zero.
            if num != den {
                acc += c as f64 * (num as f64 / den as f64).ln();
            }
        }
    }
    Ok(Nats::from_raw(acc / total as f64))
}

/// Assigns dense codes `0..k` to keys in sorted key order.
pub(crate) fn dense_codes<K: Ord>(keys: Vec<K>) -> (Vec<u32>, usize) {
    let mut map: BTreeMap<&K, u32> = BTreeMap::new();
    for k in &keys {
        map.entry(k).or_insert(0);
    }
    for (code, v) in map.values_mut().enumerate() {
        *v = code as u32;
    }
    let codes = keys.iter().map(|k| map[k]).collect();
    (codes, map.len())
}

/// Observations `(c, a, b)` with dense codes, for the plug-in estimate of `I(A; B | C)`.
#[derive(Debug, Clone)]
pub(crate) struct Coded {
    c: Vec<u32>,
    a: Vec<u32>,
    b: Vec<u32>,
    nc: usize,
    na: usize,
    nb: usize,
}

/// Plug-in conditional MI and the smallest total weight of an occupied conditioning bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CodedEstimate {
    pub value: f64,
    pub min_occupancy: f64,
}

impl Coded {
    pub fn new<C: Ord, A: Ord, B: Ord>(c: Vec<C>, a: Vec<A>, b: Vec<B>) -> Self {
        assert!(c.len() == a.len() && a.len() == b.len());
        let (c, nc) = dense_codes(c);
        let (a, na) = dense_codes(a);
        let (b, nb) = dense_codes(b);
        Self { c, a, b, nc, na, nb }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    /// Weighted plug-in `sum_c (w_c / W) I_c(A; B)`; `weights[j]` multiplies observation `j`.
    pub fn cmi(&self, weights: Option<&[u32]>) -> CodedEstimate {
        let (na, nb) = (self.na, self.nb);
        let cell = na * nb;
        let mut table = vec![0.0f64; self.nc * cell];
        for j in 0..self.len() {
            let w = weights.map_or(1.0, |w| f64::from(w[j]));
            if w > 0.0 {
                table[self.c[j] as usize * cell + self.a[j] as usize * nb + self.b[j] as usize] += w;
            }
        }
        let mut total = 0.0;
        let mut acc = 0.0;
        let mut min_occ = f64::INFINITY;
        let mut ra = vec![0.0; na];
        let mut rb = vec![0.0; nb];
        for block in table.chunks_exact(cell) {
            ra.iter_mut().for_each(|x| *x = 0.0);
            rb.iter_mut().for_each(|x| *x = 0.0);
            let mut wc = 0.0;
            for x in 0..na {
                for y in 0..nb {
                    let v = block[x * nb + y];
                    ra[x] += v;
                    rb[y] += v;
                    wc += v;
                }
            }
            if wc == 0.0 {
                continue;
            }
            min_occ = min_occ.min(wc);
            total += wc;
            for x in 0..na {
                for y in 0..nb {
                    let v = block[x * nb + y];
                    if v > 0.0 {
                        let num = v * wc;
                        let den = ra[x] * rb[y];
                        if num != den {
                            acc += v * (num / den).ln();
                        }
                    }
                }
            }
        }
        let value = if total > 0.0 { (acc / total).max(0.0) } else { 0.0 };
        CodedEstimate {
            value,
            min_occupancy: if min_occ.is_finite() { min_occ } else { 0.0 },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{mutual_information, JointDist};
    use approx::assert_abs_diff_eq;

    #[test]
    fn table_examples() {
        assert_eq!(plug_in_mi(&[vec![2, 4], vec![3, 6]]).unwrap().value(), 0.0);
        assert_abs_diff_eq!(
            plug_in_mi(&[vec![5, 0, 0], vec![0, 5, 0], vec![0, 0, 5]])
                .unwrap()
                .value(),
            3f64.ln(),
            epsilon = 1e-15
        );
        let v = plug_in_mi(&[vec![40, 10], vec![10, 40]]).unwrap().value();
        let joint = JointDist::from_matrix(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        assert_abs_diff_eq!(v, mutual_information(&joint).value(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.192_744_757_021_757_53, epsilon = 1e-12);
        assert!(plug_in_mi(&[]).is_err());
        assert!(plug_in_mi(&[vec![0, 0]]).is_err());
        assert!(plug_in_mi(&[vec![1, 0], vec![1]]).is_err());
    }

    #[test]
    fn coded_matches_table() {
        // 40/10/10/40 table spelled out as observations.
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (x, y, k) in [(0, 0, 40), (0, 1, 10), (1, 0, 10), (1, 1, 40)] {
            for _ in 0..k {
                a.push(x);
                b.push(y);
            }
        }
        let coded = Coded::new(vec![0u8; a.len()], a.clone(), b.clone());
        let est = coded.cmi(None);
        assert_abs_diff_eq!(est.value, 0.192_744_757_021_757_53, epsilon = 1e-12);
        assert_eq!(est.min_occupancy, 100.0);
        // doubling every weight changes nothing
        let w = vec![2u32; a.len()];
        assert_abs_diff_eq!(coded.cmi(Some(&w)).value, est.value, epsilon = 1e-15);
    }

    #[test]
    fn conditioning_averages_bins() {
        // bin 0: A = B (ln 2); bin 1: A independent of B (0); equal weights.
        let c = vec![0, 0, 0, 0, 1, 1, 1, 1];
        let a = vec![0, 1, 0, 1, 0, 0, 1, 1];
        let b = vec![0, 1, 0, 1, 0, 1, 0, 1];
        let est = Coded::new(c, a, b).cmi(None);
        assert_abs_diff_eq!(est.value, 0.5 * std::f64::consts::LN_2, epsilon = 1e-15);
        assert_eq!(est.min_occupancy, 4.0);
    }

    #[test]
    fn dense_codes_follow_key_order() {
        let (codes, k) = dense_codes(vec![30, 10, 30, 20]);
        assert_eq!(codes, vec![2, 0, 2, 1]);
        assert_eq!(k, 3);
    }
}
