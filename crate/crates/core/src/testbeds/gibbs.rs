//! Gibbs posterior on finite hypothesis and data spaces, solved by exhaustive enumeration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundId, BoundQuery};
use crate::error::{Error, Result};
use crate::estimators::{trial_rng, Interval, Stream};
use crate::info::DiscreteDist;
use crate::testbeds::report::TestbedReport;

/// Largest number of datasets enumerated.
pub const ENUMERATION_BUDGET: u128 = 300_000;

const MAX_SYMBOLS: usize = 8;
const MAX_N: usize = 6;
const RANDOM_POSTERIORS: usize = 32;
const LEMMA_DATASETS: usize = 16;
const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsProblem {
    /// `loss_table[w][z]`.
    pub loss_table: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
    pub data: Vec<f64>,
    pub lambda: f64,
    pub n: usize,
    /// Seeds the random competitor posteriors of the optimality check.
    #[serde(default)]
    pub seed: u64,
}

/// Exact quantities of one Gibbs problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsSolution {
    pub gap: f64,
    pub mutual_information: f64,
    pub lautum_information: f64,
    pub i_skl: f64,
    pub marginal: Vec<f64>,
    pub datasets: usize,
    /// Largest `|F(Gibbs) + Psi / lambda|` over the checked datasets.
    pub lemma_attainment_error: f64,
    /// Whether the Gibbs objective was at most every random competitor's on every checked dataset.
    pub lemma_optimal: bool,
}

impl GibbsProblem {
    fn validate(&self) -> Result<()> {
        let (nw, nz) = (self.prior.len(), self.data.len());
        if nw == 0 || nz == 0 {
            return Err(Error::Empty("hypothesis and data spaces must be nonempty"));
        }
        if nw > MAX_SYMBOLS || nz > MAX_SYMBOLS {
            return Err(Error::Config(format!(
                "at most {MAX_SYMBOLS} hypotheses and data symbols"
            )));
        }
        if self.n == 0 || self.n > MAX_N {
            return Err(Error::OutOfDomain {
                name: "n",
                value: self.n as f64,
                domain: "[1, 6]",
            });
        }
        DiscreteDist::from_probs(self.prior.clone())?;
        DiscreteDist::from_probs(self.data.clone())?;
        if self.loss_table.len() != nw || self.loss_table.iter().any(|r| r.len() != nz) {
            return Err(Error::Alignment(format!("loss table must be {nw} x {nz}")));
        }
        if self.loss_table.iter().flatten().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(Error::Config("losses must be finite and nonnegative".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "lambda",
                value: self.lambda,
                domain: "[0, inf)",
            });
        }
        let needed = (nz as u128).pow(self.n as u32);
        if needed > ENUMERATION_BUDGET {
            return Err(Error::EnumerationBudget {
                needed,
                budget: ENUMERATION_BUDGET,
            });
        }
        Ok(())
    }

    fn population_loss(&self, w: usize) -> f64 {
        self.loss_table[w].iter().zip(&self.data).map(|(l, p)| l * p).sum()
    }

    /// Datasets of `Z^n` in lexicographic order, with probabilities.
    fn datasets(&self) -> Vec<(Vec<usize>, f64)> {
        let nz = self.data.len();
        let count = nz.pow(self.n as u32);
        (0..count)
            .map(|mut k| {
                let mut d = vec![0; self.n];
                for slot in d.iter_mut().rev() {
                    *slot = k % nz;
                    k /= nz;
                }
                let p = d.iter().map(|&z| self.data[z]).product();
                (d, p)
            })
            .collect()
    }

    fn train_losses(&self, d: &[usize]) -> Vec<f64> {
        self.loss_table
            .iter()
            .map(|row| d.iter().map(|&z| row[z]).sum::<f64>() / d.len() as f64)
            .collect()
    }

    /// Gibbs posterior on the support of the prior, and the log-partition function.
    fn posterior(&self, train: &[f64]) -> (Vec<f64>, f64) {
        let logits: Vec<f64> = self
            .prior
            .iter()
            .zip(train)
            .map(|(&q, &l)| {
                if q > 0.0 {
                    q.ln() - self.lambda * l
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let psi = m + logits.iter().map(|&x| (x - m).exp()).sum::<f64>().ln();
        (logits.iter().map(|&x| (x - psi).exp()).collect(), psi)
    }

    /// `E_rho L_D + KL(rho || prior) / lambda`.
    fn objective(&self, rho: &[f64], train: &[f64]) -> f64 {
        let mut v = 0.0;
        for ((&r, &q), &l) in rho.iter().zip(&self.prior).zip(train) {
            if r > 0.0 {
                v += r * l + r * (r / q).ln() / self.lambda;
            }
        }
        v
    }

    pub fn solve(&self) -> Result<GibbsSolution> {
        self.validate()?;
        let nw = self.prior.len();
        let data = self.datasets();
        let posts: Vec<(Vec<f64>, f64, Vec<f64>)> = data
            .iter()
            .map(|(d, _)| {
                let train = self.train_losses(d);
                let (post, psi) = self.posterior(&train);
                (post, psi, train)
            })
            .collect();
        let mut marginal = vec![0.0; nw];
        for ((_, p), (post, _, _)) in data.iter().zip(&posts) {
            for (m, &x) in marginal.iter_mut().zip(post) {
                *m += p * x;
            }
        }
        let pop: Vec<f64> = (0..nw).map(|w| self.population_loss(w)).collect();
        let (mut gap, mut mi, mut lautum) = (0.0, 0.0, 0.0);
        for ((_, p), (post, _, train)) in data.iter().zip(&posts) {
            for w in 0..nw {
                if self.prior[w] == 0.0 {
                    continue;
                }
                let (a, b) = (post[w], marginal[w]);
                gap += p * a * (pop[w] - train[w]);
                let ratio = (a / b).ln();
                mi += p * a * ratio;
                lautum -= p * b * ratio;
            }
        }

        let mut attain: f64 = 0.0;
        let mut optimal = true;
        if self.lambda > 0.0 {
            let stride = (data.len() / LEMMA_DATASETS).max(1);
            for (k, (_, psi, train)) in posts.iter().enumerate().step_by(stride) {
                let post = &posts[k].0;
                let f_gibbs = self.objective(post, train);
                attain = attain.max((f_gibbs + psi / self.lambda).abs());
                let mut rng = trial_rng(self.seed, k as u64, Stream::Aux);
                for _ in 0..RANDOM_POSTERIORS {
                    let raw: Vec<f64> = self
                        .prior
                        .iter()
                        .map(|&q| if q > 0.0 { rng.random::<f64>() } else { 0.0 })
                        .collect();
                    let s: f64 = raw.iter().sum();
                    let rho: Vec<f64> = raw.iter().map(|x| x / s).collect();
                    if self.objective(&rho, train) < f_gibbs - 1e-12 {
                        optimal = false;
                    }
                }
            }
        }

        Ok(GibbsSolution {
            gap,
            mutual_information: mi.max(0.0),
            lautum_information: lautum.max(0.0),
            i_skl: (mi + lautum).max(0.0),
            marginal,
            datasets: data.len(),
            lemma_attainment_error: attain,
            lemma_optimal: optimal,
        })
    }
}

pub fn gibbs_run(p: &GibbsProblem) -> Result<TestbedReport> {
    let sol = p.solve()?;
    let mut r = TestbedReport::new("gibbs", p.n, p.seed, sol.datasets, serde_json::to_value(p).unwrap());
    r.empirical_gap = sol.gap;
    r.ci = Interval {
        lo: sol.gap,
        hi: sol.gap,
    };
    r.ci_level = 1.0;
    r.notes
        .push("gap computed by exact enumeration; interval is degenerate".into());
    r.oracle("gap", sol.gap);
    r.oracle("i_skl", sol.i_skl);
    r.oracle("mutual_information", sol.mutual_information);
    r.oracle("lautum_information", sol.lautum_information);
    r.oracle("lambda_times_gap", p.lambda * sol.gap);
    r.oracle("lemma_attainment_error", sol.lemma_attainment_error);
    let residual = (p.lambda * sol.gap - sol.i_skl).abs();
    r.oracle("identity_residual", residual);
    r.check("identity_gap_iskl", residual < IDENTITY_TOL);
    if p.lambda > 0.0 {
        r.check("identity_lemma_attained", sol.lemma_attainment_error < IDENTITY_TOL);
        r.check("lemma_gibbs_optimal", sol.lemma_optimal);
    }

    let (lo, hi) = p
        .loss_table
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let sigma = (hi - lo) / 2.0;
    let q = BoundQuery::new(p.n as u64).sigma(sigma).info(sol.mutual_information);
    r.eval_bound(BoundId::AvgMi, &q, "closed_form", Some(sol.mutual_information));
    Ok(r)
}
