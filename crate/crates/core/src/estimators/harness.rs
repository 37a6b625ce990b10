//! Supersample and leave-one-out trial generation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::rng::{trial_rng, Stream};

/// The training points handed to a learner. It exposes nothing else about the trial:
/// neither the membership bits nor the held-out points.
#[derive(Debug)]
pub struct TrainingView<'a, P> {
    points: Vec<&'a P>,
}

impl<'a, P> TrainingView<'a, P> {
    fn new(points: Vec<&'a P>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> &'a P {
        self.points[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a P> + '_ {
        self.points.iter().copied()
    }
}

/// A data-generating process together with a learning rule.
pub trait LearningProblem: Sync {
    /// Per-trial randomness shared by all points of a trial (for instance a random labeling).
    type Env: Send + Sync;
    type Point: Clone + Send + Sync;
    type Hypothesis: Send;

    fn sample_env(&self, rng: &mut ChaCha8Rng) -> Self::Env;

    fn sample_points(&self, env: &Self::Env, count: usize, rng: &mut ChaCha8Rng) -> Vec<Self::Point>;

    fn train(&self, data: TrainingView<'_, Self::Point>, rng: &mut ChaCha8Rng) -> Self::Hypothesis;

    fn loss(&self, h: &Self::Hypothesis, z: &Self::Point) -> f64;

    fn predict(&self, _h: &Self::Hypothesis, _z: &Self::Point) -> Option<u64> {
        None
    }

    /// Exact population loss of `h` under the trial's environment, when available.
    fn population_loss(&self, _h: &Self::Hypothesis, _env: &Self::Env) -> Option<f64> {
        None
    }

    /// Number of uniform loss levels on `[0, 1]`, when losses live on such a grid.
    fn loss_levels(&self) -> Option<u32> {
        None
    }
}

/// A data point drawn from a finite alphabet.
pub trait Symbolic {
    fn symbol(&self) -> Option<u64>;
}

/// One draw of the supersample construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SupersampleTrial<P> {
    pub z_tilde: Vec<P>,
    pub s: Vec<bool>,
    pub losses: Vec<f64>,
    pub predictions: Option<Vec<u64>>,
    pub population_loss: Option<f64>,
}

impl<P> SupersampleTrial<P> {
    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// Index into `z_tilde` of the `i`th training point.
    pub fn train_index(&self, i: usize) -> usize {
        i + usize::from(self.s[i]) * self.n()
    }

    pub fn train_loss(&self) -> f64 {
        let n = self.n();
        (0..n).map(|i| self.losses[self.train_index(i)]).sum::<f64>() / n as f64
    }

    pub fn test_loss(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| self.losses[(i + n) - usize::from(self.s[i]) * n])
            .sum::<f64>()
            / n as f64
    }

    /// `Delta_i = loss(z_{i+n}) - loss(z_i)`.
    pub fn loss_difference(&self, i: usize) -> f64 {
        self.losses[i + self.n()] - self.losses[i]
    }
}

/// One leave-one-out draw: `n + 1` points, the held-out index `u`, and losses on all points.
#[derive(Debug, Clone, PartialEq)]
pub struct LooTrial<P> {
    pub z_dot: Vec<P>,
    pub u: usize,
    pub losses: Vec<f64>,
    pub population_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatch<Tr> {
    pub trials: Vec<Tr>,
    pub seed: u64,
    pub n: usize,
    pub m_trials: usize,
    pub loss_levels: Option<u32>,
}

fn check_losses(losses: &[f64]) -> Result<()> {
    for (index, &value) in losses.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::LossRange { index, value });
        }
    }
    Ok(())
}

fn check_sizes(n: usize, m_trials: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty("n must be at least 1"));
    }
    if m_trials == 0 {
        return Err(Error::Empty("m_trials must be at least 1"));
    }
    Ok(())
}

/// Draws `m_trials` supersample trials. Trial `t` depends only on `(seed, t)`, and trials run
/// in parallel but are returned in index order.
pub fn run_supersample_trials<L: LearningProblem>(
    problem: &L,
    n: usize,
    m_trials: usize,
    seed: u64,
) -> Result<TrialBatch<SupersampleTrial<L::Point>>> {
    run_supersample_trials_inspect(problem, n, m_trials, seed, |_, _, _| ()).map(|(b, _)| b)
}

/// A supersample batch with one inspection result per trial.
pub type Inspected<P, R> = (TrialBatch<SupersampleTrial<P>>, Vec<R>);

/// As [`run_supersample_trials`], also returning `inspect(h, env, z_tilde)` for every trial.
pub fn run_supersample_trials_inspect<L, R, F>(
    problem: &L,
    n: usize,
    m_trials: usize,
    seed: u64,
    inspect: F,
) -> Result<Inspected<L::Point, R>>
where
    L: LearningProblem,
    R: Send,
    F: Fn(&L::Hypothesis, &L::Env, &[L::Point]) -> R + Sync,
{
    check_sizes(n, m_trials)?;
    let out: Vec<(SupersampleTrial<L::Point>, R)> = (0..m_trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut data_rng = trial_rng(seed, t, Stream::Data);
            let env = problem.sample_env(&mut data_rng);
            let z_tilde = problem.sample_points(&env, 2 * n, &mut data_rng);
            let mut bit_rng = trial_rng(seed, t, Stream::Bits);
            let s: Vec<bool> = (0..n).map(|_| bit_rng.random::<bool>()).collect();
            let view = TrainingView::new((0..n).map(|i| &z_tilde[i + usize::from(s[i]) * n]).collect());
            let h = problem.train(view, &mut trial_rng(seed, t, Stream::Learner));
            let losses: Vec<f64> = z_tilde.iter().map(|z| problem.loss(&h, z)).collect();
            check_losses(&losses)?;
            let predictions: Option<Vec<u64>> = z_tilde.iter().map(|z| problem.predict(&h, z)).collect();
            let population_loss = problem.population_loss(&h, &env);
            let extra = inspect(&h, &env, &z_tilde);
            Ok((
                SupersampleTrial {
                    z_tilde,
                    s,
                    losses,
                    predictions,
                    population_loss,
                },
                extra,
            ))
        })
        .collect::<Result<_>>()?;
    let (trials, extras) = out.into_iter().unzip();
    Ok((
        TrialBatch {
            trials,
            seed,
            n,
            m_trials,
            loss_levels: problem.loss_levels(),
        },
        extras,
    ))
}

/// Draws `m_trials` leave-one-out trials: `n + 1` points, a uniform held-out index `u`,
/// training on the other `n`.
pub fn run_loo_trials<L: LearningProblem>(
    problem: &L,
    n: usize,
    m_trials: usize,
    seed: u64,
) -> Result<TrialBatch<LooTrial<L::Point>>> {
    check_sizes(n, m_trials)?;
    let trials = (0..m_trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut data_rng = trial_rng(seed, t, Stream::Data);
            let env = problem.sample_env(&mut data_rng);
            let z_dot = problem.sample_points(&env, n + 1, &mut data_rng);
            let u = trial_rng(seed, t, Stream::Bits).random_range(0..=n);
            let view = TrainingView::new(
                z_dot
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != u)
                    .map(|(_, z)| z)
                    .collect(),
            );
            let h = problem.train(view, &mut trial_rng(seed, t, Stream::Learner));
            let losses: Vec<f64> = z_dot.iter().map(|z| problem.loss(&h, z)).collect();
            check_losses(&losses)?;
            let population_loss = problem.population_loss(&h, &env);
            Ok(LooTrial {
                z_dot,
                u,
                losses,
                population_loss,
            })
        })
        .collect::<Result<_>>()?;
    Ok(TrialBatch {
        trials,
        seed,
        n,
        m_trials,
        loss_levels: problem.loss_levels(),
    })
}
