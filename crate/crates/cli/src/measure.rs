use clap::Args;
use genbound::info::{self, DiscreteDist, JointDist};
use genbound::testbeds::fmt9;
use genbound::{Error, Result};

use crate::input;

/// Registry of measures: id, inputs, summary.
pub const MEASURES: &[(&str, &[&str], &str)] = &[
    ("kl", &["p", "q"], "KL divergence D(P||Q)"),
    ("symmetrized_kl", &["p", "q"], "D(P||Q) + D(Q||P)"),
    ("total_variation", &["p", "q"], "total variation distance"),
    (
        "wasserstein1_discrete_metric",
        &["p", "q"],
        "Wasserstein-1 under the discrete metric",
    ),
    (
        "renyi_divergence",
        &["p", "q", "alpha"],
        "Renyi divergence of order alpha",
    ),
    ("binary_kl", &["q", "p"], "KL between Bernoulli(q) and Bernoulli(p)"),
    (
        "binary_kl_gamma",
        &["q", "p", "gamma"],
        "gamma q - ln(1 - p + p e^gamma)",
    ),
    (
        "binary_kl_inverse_upper",
        &["s", "c"],
        "largest mu with binary_kl(s, mu) <= c",
    ),
    (
        "binary_kl_inverse_relaxed",
        &["s", "c"],
        "min(1, s + sqrt(2 s c) + 2 c)",
    ),
    ("pinsker_bound", &["klv"], "total variation cap sqrt(klv / 2)"),
    ("bh_bound", &["klv"], "total variation cap sqrt(1 - exp(-klv))"),
    ("mutual_information", &["joint"], "I(X; Y) of a joint table"),
    (
        "alpha_mutual_information",
        &["joint", "alpha"],
        "Sibson alpha-mutual information",
    ),
    ("maximal_leakage", &["joint"], "maximal leakage from X to Y"),
    (
        "wasserstein1_1d",
        &["xs", "ys"],
        "Wasserstein-1 between two empirical samples on the line",
    ),
];

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Measure id (see `genbound list measures`).
    pub id: String,
    /// Distribution or probability: `0.2,0.8`, `[0.2,0.8]` or `@file`.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// Joint table: `0.4,0.1;0.1,0.4`, `[[0.4,0.1],[0.1,0.4]]` or `@file`.
    #[arg(long)]
    pub joint: Option<String>,
    /// Order; `inf` accepted where defined.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
    /// A KL value in nats.
    #[arg(long)]
    pub klv: Option<String>,
    #[arg(long)]
    pub xs: Option<String>,
    #[arg(long)]
    pub ys: Option<String>,
}

fn need<'a>(v: &'a Option<String>, flag: &'static str) -> Result<&'a str> {
    v.as_deref().ok_or(Error::MissingField(flag))
}

impl MeasureArgs {
    fn dist(&self, flag: &'static str) -> Result<DiscreteDist<f64>> {
        let raw = if flag == "p" { &self.p } else { &self.q };
        DiscreteDist::from_probs(input::vector(need(raw, flag)?, flag)?)
    }

    fn scalar(&self, v: &Option<String>, flag: &'static str) -> Result<f64> {
        input::scalar(need(v, flag)?, flag)
    }

    fn joint(&self) -> Result<JointDist<f64>> {
        JointDist::from_matrix(input::matrix(need(&self.joint, "joint")?, "joint")?)
    }
}

pub fn evaluate(a: &MeasureArgs) -> Result<f64> {
    Ok(match a.id.as_str() {
        "kl" => info::kl(&a.dist("p")?, &a.dist("q")?)?.value(),
        "symmetrized_kl" => info::symmetrized_kl(&a.dist("p")?, &a.dist("q")?)?.value(),
        "total_variation" => info::total_variation(&a.dist("p")?, &a.dist("q")?)?,
        "wasserstein1_discrete_metric" => info::wasserstein1_discrete_metric(&a.dist("p")?, &a.dist("q")?)?,
        "renyi_divergence" => {
            info::renyi_divergence(&a.dist("p")?, &a.dist("q")?, a.scalar(&a.alpha, "alpha")?)?.value()
        }
        "binary_kl" => info::binary_kl(a.scalar(&a.q, "q")?, a.scalar(&a.p, "p")?)?,
        "binary_kl_gamma" => {
            info::binary_kl_gamma(a.scalar(&a.q, "q")?, a.scalar(&a.p, "p")?, a.scalar(&a.gamma, "gamma")?)?
        }
        "binary_kl_inverse_upper" => info::binary_kl_inverse_upper(a.scalar(&a.s, "s")?, a.scalar(&a.c, "c")?)?,
        "binary_kl_inverse_relaxed" => info::binary_kl_inverse_relaxed(a.scalar(&a.s, "s")?, a.scalar(&a.c, "c")?)?,
        "pinsker_bound" => info::pinsker_bound(a.scalar(&a.klv, "klv")?)?,
        "bh_bound" => info::bh_bound(a.scalar(&a.klv, "klv")?)?,
        "mutual_information" => info::mutual_information(&a.joint()?).value(),
        "alpha_mutual_information" => {
            info::alpha_mutual_information(&a.joint()?, a.scalar(&a.alpha, "alpha")?)?.value()
        }
        "maximal_leakage" => info::maximal_leakage(&a.joint()?).value(),
        "wasserstein1_1d" => info::wasserstein1_1d(
            &input::vector(need(&a.xs, "xs")?, "xs")?,
            &input::vector(need(&a.ys, "ys")?, "ys")?,
        )?,
        other => return Err(Error::Parse(format!("unknown measure {other:?}"))),
    })
}

pub fn run(a: &MeasureArgs) -> Result<()> {
    crate::emit(&format!("{}\n", fmt9(evaluate(a)?)))
}
