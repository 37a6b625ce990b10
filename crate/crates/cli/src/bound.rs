use clap::Args;
use genbound::bounds::{evaluate, BoundId, BoundQuery};
use genbound::testbeds::json_number;
use genbound::{Error, Result};
use serde_json::{json, Map, Value};

use crate::input;

/// Flags mirror the query fields; names match `list bounds`.
#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Bound id (see `genbound list bounds`).
    pub id: String,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Information in nats; a comma list for per-sample bounds.
    #[arg(long)]
    pub info: Option<String>,
    /// Empirical (training) loss in [0, 1].
    #[arg(long)]
    pub train: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lipschitz: Option<f64>,
    #[arg(long)]
    pub sigma_beta: Option<f64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub d_vc: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub d: Option<u64>,
    /// Step sizes, comma list.
    #[arg(long)]
    pub eta: Option<String>,
    /// Noise scales, comma list.
    #[arg(long)]
    pub rho: Option<String>,
    /// Use the conditional variant where one exists.
    #[arg(long)]
    pub conditional: bool,
}

pub fn query(id: BoundId, a: &BoundArgs) -> Result<BoundQuery<f64>> {
    let mut q = BoundQuery::<f64> {
        n: a.n,
        delta: a.delta,
        sigma: a.sigma,
        train_loss: a.train,
        gamma: a.gamma,
        lambda: a.lambda,
        alpha: a.alpha,
        lipschitz: a.lipschitz,
        sigma_beta: a.sigma_beta,
        m: a.m,
        d_vc: a.d_vc,
        k: a.k,
        d: a.d,
        conditional: a.conditional,
        ..BoundQuery::default()
    };
    if let Some(raw) = &a.info {
        let v = input::vector(raw, "info")?;
        q = if id.per_sample_info() {
            q.info_per_sample(v)
        } else if v.len() == 1 {
            q.info(v[0])
        } else {
            return Err(Error::Parse(format!(
                "{id} takes a single --info value, got {}",
                v.len()
            )));
        };
    }
    if let Some(raw) = &a.eta {
        q.eta = Some(input::vector(raw, "eta")?);
    }
    if let Some(raw) = &a.rho {
        q.rho = Some(input::vector(raw, "rho")?);
    }
    Ok(q)
}

pub fn render(v: &genbound::Bound) -> Value {
    let components: Map<String, Value> = v.components.iter().map(|(k, &x)| (k.clone(), json_number(x))).collect();
    json!({"value": json_number(v.value), "vacuous": v.vacuous, "components": components})
}

pub fn run(a: &BoundArgs) -> Result<()> {
    let id: BoundId = a.id.parse()?;
    let v = evaluate(id, &query(id, a)?)?;
    crate::emit(&format!("{}\n", render(&v)))
}
