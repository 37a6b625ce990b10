//! Plug-in estimates of the supersample and leave-one-out information quantities.

use crate::error::{Error, Result};
use crate::estimators::harness::{LooTrial, SupersampleTrial, Symbolic, TrialBatch};
use crate::estimators::plugin::Coded;
use crate::info::Nats;

/// Minimum trials per conditioning bin before an estimate counts as reliable.
pub const DEFAULT_OCCUPANCY_FLOOR: f64 = 25.0;

/// Loss grid used when a testbed does not declare one.
pub const DEFAULT_LOSS_LEVELS: u32 = 21;

/// What the conditional estimators condition on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    /// The realized pair `(Z_i, Z_{i+n})`.
    PerPair,
    /// The whole supersample.
    Supersample,
}

/// Which supersample quantity to estimate, per index `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `I(Delta_i; S_i)`.
    Ldmi,
    /// `I(Lambda_i, Lambda_{i+n}; S_i)`.
    Emi,
    /// `I(Lambda_i, Lambda_{i+n}; S_i | Z)`.
    Ecmi(Conditioning),
    /// `I(F_i, F_{i+n}; S_i | Z)` with `F` the predictions.
    Fcmi(Conditioning),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmiEstimate {
    pub per_index: Vec<f64>,
    pub total: f64,
    /// Smallest trial weight found in an occupied conditioning bin, over all indices.
    pub min_occupancy: f64,
    pub reliable: bool,
}

/// Per-index observations coded once so that bootstrap resamples only reweight trials.
#[derive(Debug, Clone)]
pub struct Prepared {
    quantity: Quantity,
    per_index: Vec<Coded>,
    m_trials: usize,
    floor: f64,
}

fn quantize(loss: f64, levels: u32) -> i64 {
    (loss * f64::from(levels - 1)).round() as i64
}

fn symbols<P: Symbolic>(z: &[P]) -> Result<Vec<u64>> {
    z.iter()
        .map(|p| p.symbol())
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::Unsupported {
            name: "conditioning",
            value: f64::NAN,
            reason: "conditional estimates need a finite data alphabet",
        })
}

fn quantized<P>(batch: &TrialBatch<SupersampleTrial<P>>) -> Result<Vec<Vec<i64>>> {
    let levels = batch.loss_levels.ok_or(Error::Unquantized)?;
    if levels < 2 {
        return Err(Error::Unquantized);
    }
    Ok(batch
        .trials
        .iter()
        .map(|t| t.losses.iter().map(|&l| quantize(l, levels)).collect())
        .collect())
}

fn conditioning_keys<P: Symbolic>(
    batch: &TrialBatch<SupersampleTrial<P>>,
    cond: Conditioning,
) -> Result<Vec<Vec<Vec<u64>>>> {
    let n = batch.n;
    let syms = batch
        .trials
        .iter()
        .map(|t| symbols(&t.z_tilde))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..n)
        .map(|i| {
            syms.iter()
                .map(|s| match cond {
                    Conditioning::PerPair => vec![s[i], s[i + n]],
                    Conditioning::Supersample => s.clone(),
                })
                .collect()
        })
        .collect())
}

fn membership<P>(batch: &TrialBatch<SupersampleTrial<P>>, i: usize) -> Vec<bool> {
    batch.trials.iter().map(|t| t.s[i]).collect()
}

/// Prepares `I(Delta_i; S_i)` or `I(Lambda pair; S_i)`; neither needs data symbols.
pub fn prepare_unconditional<P>(batch: &TrialBatch<SupersampleTrial<P>>, quantity: Quantity) -> Result<Prepared> {
    if !matches!(quantity, Quantity::Ldmi | Quantity::Emi) {
        return Err(Error::Config(format!("{quantity:?} needs data symbols")));
    }
    let q = quantized(batch)?;
    let n = batch.n;
    let per_index = (0..n)
        .map(|i| {
            let c = vec![0u8; q.len()];
            let b = membership(batch, i);
            match quantity {
                Quantity::Ldmi => Coded::new(c, q.iter().map(|l| l[i + n] - l[i]).collect(), b),
                Quantity::Emi => Coded::new(c, q.iter().map(|l| (l[i], l[i + n])).collect(), b),
                _ => unreachable!(),
            }
        })
        .collect();
    Ok(Prepared::new(quantity, per_index, batch.trials.len()))
}

/// Prepares any of the four quantities.
pub fn prepare<P: Symbolic>(batch: &TrialBatch<SupersampleTrial<P>>, quantity: Quantity) -> Result<Prepared> {
    let n = batch.n;
    let m = batch.trials.len();
    match quantity {
        Quantity::Ldmi | Quantity::Emi => prepare_unconditional(batch, quantity),
        Quantity::Ecmi(cond) => {
            let q = quantized(batch)?;
            let keys = conditioning_keys(batch, cond)?;
            let per_index = keys
                .into_iter()
                .enumerate()
                .map(|(i, c)| Coded::new(c, q.iter().map(|l| (l[i], l[i + n])).collect(), membership(batch, i)))
                .collect();
            Ok(Prepared::new(quantity, per_index, m))
        }
        Quantity::Fcmi(cond) => {
            let preds = batch
                .trials
                .iter()
                .map(|t| t.predictions.as_ref())
                .collect::<Option<Vec<_>>>()
                .ok_or(Error::Config("f-CMI needs a testbed that reports predictions".into()))?;
            let keys = conditioning_keys(batch, cond)?;
            let per_index = keys
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    Coded::new(
                        c,
                        preds.iter().map(|p| (p[i], p[i + n])).collect(),
                        membership(batch, i),
                    )
                })
                .collect();
            Ok(Prepared::new(quantity, per_index, m))
        }
    }
}

impl Prepared {
    fn new(quantity: Quantity, per_index: Vec<Coded>, m_trials: usize) -> Self {
        Self {
            quantity,
            per_index,
            m_trials,
            floor: DEFAULT_OCCUPANCY_FLOOR,
        }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn quantity(&self) -> Quantity {
        self.quantity
    }

    pub fn m_trials(&self) -> usize {
        self.m_trials
    }

    /// Estimate with trial `j` counted `weights[j]` times (all ones when `None`).
    pub fn estimate(&self, weights: Option<&[u32]>) -> CmiEstimate {
        let parts: Vec<_> = self.per_index.iter().map(|c| c.cmi(weights)).collect();
        let per_index: Vec<f64> = parts.iter().map(|p| p.value).collect();
        let min_occupancy = parts.iter().map(|p| p.min_occupancy).fold(f64::INFINITY, f64::min);
        let conditional = matches!(self.quantity, Quantity::Ecmi(_) | Quantity::Fcmi(_));
        CmiEstimate {
            total: per_index.iter().sum(),
            per_index,
            min_occupancy,
            reliable: !conditional || min_occupancy >= self.floor,
        }
    }
}

/// Per-index plug-in `I(Delta_i; S_i)` pooled over trials.
pub fn estimate_per_sample_ldmi<P>(batch: &TrialBatch<SupersampleTrial<P>>) -> Result<Vec<Nats<f64>>> {
    let est = prepare_unconditional(batch, Quantity::Ldmi)?.estimate(None);
    Ok(est.per_index.into_iter().map(Nats::from_raw).collect())
}

pub fn estimate_emi<P>(batch: &TrialBatch<SupersampleTrial<P>>) -> Result<CmiEstimate> {
    Ok(prepare_unconditional(batch, Quantity::Emi)?.estimate(None))
}

pub fn estimate_ecmi<P: Symbolic>(batch: &TrialBatch<SupersampleTrial<P>>, cond: Conditioning) -> Result<CmiEstimate> {
    Ok(prepare(batch, Quantity::Ecmi(cond))?.estimate(None))
}

pub fn estimate_fcmi<P: Symbolic>(batch: &TrialBatch<SupersampleTrial<P>>, cond: Conditioning) -> Result<CmiEstimate> {
    Ok(prepare(batch, Quantity::Fcmi(cond))?.estimate(None))
}

/// Leave-one-out e-MI, with the interpolating-learner entropy form when it applies.
#[derive(Debug, Clone, PartialEq)]
pub struct LooEstimate {
    /// Plug-in `I(Lambda; U)`.
    pub plug_in: f64,
    /// `L_hat ln(n + 1)` with `L_hat` the fraction of trials that err on the held-out point.
    /// Present only when every trial interpolates with binary loss.
    pub entropy_form: Option<f64>,
    pub pop_hat: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LooPrepared {
    coded: Coded,
    /// Held-out error bit per trial, when the support check passed.
    held_out_error: Option<Vec<bool>>,
    n: usize,
}

pub fn prepare_loo<P>(batch: &TrialBatch<LooTrial<P>>) -> Result<LooPrepared> {
    let levels = batch.loss_levels.ok_or(Error::Unquantized)?;
    if levels < 2 {
        return Err(Error::Unquantized);
    }
    let n = batch.n;
    let lambdas: Vec<Vec<i64>> = batch
        .trials
        .iter()
        .map(|t| t.losses.iter().map(|&l| quantize(l, levels)).collect())
        .collect();
    let interpolating = levels == 2
        && batch
            .trials
            .iter()
            .zip(&lambdas)
            .all(|(t, l)| l.iter().enumerate().all(|(j, &v)| j == t.u || v == 0));
    let held_out_error = interpolating.then(|| batch.trials.iter().zip(&lambdas).map(|(t, l)| l[t.u] == 1).collect());
    let u: Vec<usize> = batch.trials.iter().map(|t| t.u).collect();
    Ok(LooPrepared {
        coded: Coded::new(vec![0u8; u.len()], lambdas, u),
        held_out_error,
        n,
    })
}

impl LooPrepared {
    pub fn is_interpolating(&self) -> bool {
        self.held_out_error.is_some()
    }

    pub fn estimate(&self, weights: Option<&[u32]>) -> LooEstimate {
        let plug_in = self.coded.cmi(weights).value;
        let pop_hat = self.held_out_error.as_ref().map(|bits| {
            let (mut hit, mut all) = (0.0, 0.0);
            for (j, &b) in bits.iter().enumerate() {
                let w = weights.map_or(1.0, |w| f64::from(w[j]));
                all += w;
                if b {
                    hit += w;
                }
            }
            hit / all
        });
        LooEstimate {
            plug_in,
            entropy_form: pop_hat.map(|l| l * ((self.n + 1) as f64).ln()),
            pop_hat,
        }
    }
}

pub fn estimate_loo_emi<P>(batch: &TrialBatch<LooTrial<P>>) -> Result<LooEstimate> {
    Ok(prepare_loo(batch)?.estimate(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::harness::{run_loo_trials, run_supersample_trials, LearningProblem, TrainingView};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;

    fn batch(trials: Vec<SupersampleTrial<u8>>, n: usize, levels: Option<u32>) -> TrialBatch<SupersampleTrial<u8>> {
        TrialBatch {
            m_trials: trials.len(),
            trials,
            seed: 0,
            n,
            loss_levels: levels,
        }
    }

    impl Symbolic for u8 {
        fn symbol(&self) -> Option<u64> {
            Some(u64::from(*self))
        }
    }

    fn trial(s: bool, losses: [f64; 2]) -> SupersampleTrial<u8> {
        SupersampleTrial {
            z_tilde: vec![0, 1],
            s: vec![s],
            losses: losses.to_vec(),
            predictions: Some(vec![losses[0] as u64, losses[1] as u64]),
            population_loss: None,
        }
    }

    #[test]
    fn constant_losses_give_zero() {
        let b = batch((0..10).map(|j| trial(j % 2 == 0, [0.0, 0.0])).collect(), 1, Some(2));
        assert_eq!(estimate_per_sample_ldmi(&b).unwrap()[0].value(), 0.0);
        assert_eq!(estimate_emi(&b).unwrap().total, 0.0);
    }

    #[test]
    fn revealing_delta_gives_ln2() {
        // the test point always errs: Delta = +1 when S = 0 and -1 when S = 1
        let b = batch(
            (0..10)
                .map(|j| {
                    let s = j % 2 == 0;
                    trial(s, if s { [1.0, 0.0] } else { [0.0, 1.0] })
                })
                .collect(),
            1,
            Some(2),
        );
        assert_abs_diff_eq!(estimate_per_sample_ldmi(&b).unwrap()[0].value(), LN_2, epsilon = 1e-15);
        let e = estimate_fcmi(&b, Conditioning::PerPair).unwrap();
        assert_abs_diff_eq!(e.total, LN_2, epsilon = 1e-15);
        assert!(!e.reliable);
        assert!(
            prepare(&b, Quantity::Fcmi(Conditioning::PerPair))
                .unwrap()
                .with_floor(10.0)
                .estimate(None)
                .reliable
        );
    }

    #[test]
    fn unquantized_losses_are_rejected() {
        let b = batch(vec![trial(true, [0.0, 1.0])], 1, None);
        assert_eq!(estimate_per_sample_ldmi(&b).unwrap_err(), Error::Unquantized);
    }

    /// Labels are random per trial; the learner stores its training points and predicts label 0
    /// on anything it has not seen. Points are (feature, label) with features from `k` symbols.
    struct Lookup {
        k: u64,
    }

    impl Symbolic for (u64, u64) {
        fn symbol(&self) -> Option<u64> {
            Some(self.0 * 2 + self.1)
        }
    }

    impl LearningProblem for Lookup {
        type Env = Vec<u64>;
        type Point = (u64, u64);
        type Hypothesis = Vec<(u64, u64)>;

        fn sample_env(&self, rng: &mut ChaCha8Rng) -> Vec<u64> {
            (0..self.k)
                .map(|_| 1)
                .chain(std::iter::once(rng.random_range(0..2)))
                .collect()
        }

        fn sample_points(&self, env: &Vec<u64>, count: usize, rng: &mut ChaCha8Rng) -> Vec<(u64, u64)> {
            (0..count)
                .map(|_| {
                    let x = rng.random_range(0..self.k);
                    (x, env[x as usize])
                })
                .collect()
        }

        fn train(&self, data: TrainingView<'_, (u64, u64)>, _rng: &mut ChaCha8Rng) -> Vec<(u64, u64)> {
            data.iter().copied().collect()
        }

        fn loss(&self, h: &Vec<(u64, u64)>, z: &(u64, u64)) -> f64 {
            f64::from(self.predict(h, z).unwrap() != z.1)
        }

        fn predict(&self, h: &Vec<(u64, u64)>, z: &(u64, u64)) -> Option<u64> {
            Some(h.iter().find(|p| p.0 == z.0).map_or(0, |p| p.1))
        }

        fn loss_levels(&self) -> Option<u32> {
            Some(2)
        }
    }

    #[test]
    fn chain_holds_on_a_lookup_learner() {
        let b = run_supersample_trials(&Lookup { k: 6 }, 3, 4000, 11).unwrap();
        let ld: f64 = estimate_per_sample_ldmi(&b).unwrap().iter().map(|v| v.value()).sum();
        let emi = estimate_emi(&b).unwrap().total;
        let ecmi = estimate_ecmi(&b, Conditioning::PerPair).unwrap();
        let fcmi = estimate_fcmi(&b, Conditioning::PerPair).unwrap();
        assert!(ld <= emi + 1e-12);
        assert!(emi <= ecmi.total + 0.01);
        assert!(ecmi.total <= fcmi.total + 1e-12);
        assert!(fcmi.reliable);
        assert!(ld > 0.1);
    }

    #[test]
    fn loo_identity_on_lookup_learner() {
        let n = 9;
        let b = run_loo_trials(&Lookup { k: 12 }, n, 20_000, 3).unwrap();
        let e = estimate_loo_emi(&b).unwrap();
        let l = e.pop_hat.unwrap();
        assert_abs_diff_eq!(e.entropy_form.unwrap(), l * 10f64.ln(), epsilon = 1e-12);
        // plug-in and entropy form agree up to the empirical dependence of (B, U)
        assert!((e.plug_in - e.entropy_form.unwrap()).abs() < 0.01, "{e:?}");
    }

    #[test]
    fn loo_extremes() {
        let make = |err: bool| TrialBatch {
            trials: (0..20)
                .map(|j| {
                    let u = j % 4;
                    let mut losses = vec![0.0; 4];
                    if err {
                        losses[u] = 1.0;
                    }
                    LooTrial {
                        z_dot: vec![0u8; 4],
                        u,
                        losses,
                        population_loss: None,
                    }
                })
                .collect(),
            seed: 0,
            n: 3,
            m_trials: 20,
            loss_levels: Some(2),
        };
        let zero = estimate_loo_emi(&make(false)).unwrap();
        assert_eq!(zero.plug_in, 0.0);
        assert_eq!(zero.entropy_form, Some(0.0));
        let full = estimate_loo_emi(&make(true)).unwrap();
        assert_abs_diff_eq!(full.plug_in, 4f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(full.entropy_form.unwrap(), 4f64.ln(), epsilon = 1e-15);
    }
}
