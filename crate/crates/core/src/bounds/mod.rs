//! Closed-form generalization bounds, addressable by a stable string id.

mod average;
mod cmi;
mod complexity;
mod iterative;
mod pac_bayes;
mod query;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use average::{avg_mi_bound, binary_kl_avg_bound, samplewise_mi_bound, tv_gap_bound, wasserstein_gap_bound};
pub use cmi::{
    cmi_binary_kl_bound, cmi_fast_bound, cmi_fast_constraint, cmi_interpolating_bound, cmi_slow_bound,
    interp_identity_ldmi, interp_identity_loo, loo_cmi_bound, samplewise_cmi_bound,
};
pub use complexity::{compression_cmi_info_bound, sauer_shelah_cap, sauer_shelah_count, vc_fcmi_info_bound};
pub use iterative::{pjl_iterative_bound, sgld_corollary, sgld_schedule, SgldCorollary};
pub use pac_bayes::{
    alpha_mi_single_draw_bound, catoni_fast_rate_bound, catoni_grid_search, catoni_parametric_bound, mls_bound,
    pac_bayes_subgaussian_bound, renyi_pacbayes_bound, single_draw_subgaussian_bound,
};
pub use query::{BoundQuery, BoundValue, Info};

macro_rules! bound_ids {
    ($($variant:ident => $id:literal, unit: $unit:literal, req: [$($req:literal),*], opt: [$($opt:literal),*];)*) => {
        /// Registry key of a bound evaluator.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum BoundId {
            $($variant,)*
        }

        impl BoundId {
            pub const ALL: &'static [BoundId] = &[$(BoundId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(BoundId::$variant => $id,)*
                }
            }

            /// Query fields the evaluator cannot run without, named as on the command line.
            pub fn required_fields(self) -> &'static [&'static str] {
                match self {
                    $(BoundId::$variant => &[$($req),*],)*
                }
            }

            pub fn optional_fields(self) -> &'static [&'static str] {
                match self {
                    $(BoundId::$variant => &[$($opt),*],)*
                }
            }

            /// Whether the bound concerns a loss with values in `[0, 1]`, so values above 1 are vacuous.
            pub fn unit_loss(self) -> bool {
                match self {
                    $(BoundId::$variant => $unit,)*
                }
            }
        }

        impl FromStr for BoundId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($id => Ok(BoundId::$variant),)*
                    other => Err(Error::Parse(format!("unknown bound id {other:?}"))),
                }
            }
        }
    };
}

bound_ids! {
    AvgMi => "avg_mi", unit: false, req: ["n", "sigma", "info"], opt: [];
    SamplewiseMi => "samplewise_mi", unit: false, req: ["n", "sigma", "info"], opt: [];
    BinaryKlAvg => "binary_kl_avg", unit: true, req: ["n", "train", "info"], opt: [];
    PacBayesSubgaussian => "pac_bayes_subgaussian", unit: false, req: ["n", "sigma", "delta", "info", "train"], opt: [];
    Mls => "mls", unit: true, req: ["n", "delta", "train", "info"], opt: [];
    CatoniParametric => "catoni_parametric", unit: true, req: ["n", "gamma", "delta", "train", "info"], opt: [];
    CatoniFastRate => "catoni_fast_rate", unit: true, req: ["n", "lambda", "delta", "train", "info"], opt: [];
    RenyiPacbayes => "renyi_pacbayes", unit: false, req: ["m", "alpha", "sigma", "delta", "info"], opt: [];
    SingleDrawSubgaussian => "single_draw_subgaussian", unit: false, req: ["n", "sigma", "delta", "info", "train"], opt: [];
    AlphaMiSingleDraw => "alpha_mi_single_draw", unit: false, req: ["n", "alpha", "delta", "info", "sigma"], opt: ["conditional"];
    CmiSlow => "cmi_slow", unit: true, req: ["n", "info"], opt: [];
    CmiFast => "cmi_fast", unit: true, req: ["n", "gamma", "lambda", "train", "info"], opt: [];
    CmiInterpolating => "cmi_interpolating", unit: true, req: ["n", "info"], opt: ["train"];
    CmiBinaryKl => "cmi_binary_kl", unit: true, req: ["n", "train", "info"], opt: [];
    SamplewiseCmi => "samplewise_cmi", unit: true, req: ["n", "info"], opt: [];
    SamplewiseCmiSupersample => "samplewise_cmi_supersample", unit: true, req: ["n", "info"], opt: [];
    LooCmi => "loo_cmi", unit: true, req: ["n", "info"], opt: [];
    InterpIdentityLdmi => "interp_identity_ldmi", unit: true, req: ["n", "info"], opt: [];
    InterpIdentityLoo => "interp_identity_loo", unit: true, req: ["n", "info"], opt: [];
    WassersteinGap => "wasserstein_gap", unit: false, req: ["lipschitz", "info"], opt: ["n"];
    TvGap => "tv_gap", unit: false, req: ["sigma-beta", "alpha", "info"], opt: [];
    PjlIterative => "pjl_iterative", unit: false, req: ["n", "sigma", "lipschitz", "eta", "rho"], opt: ["d"];
    VcFcmiCap => "vc_fcmi_cap", unit: false, req: ["n", "d-vc"], opt: [];
    CompressionCmiCap => "compression_cmi_cap", unit: false, req: ["n", "k"], opt: [];
    SauerShelah => "sauer_shelah", unit: false, req: ["m", "d-vc"], opt: [];
}

impl BoundId {
    /// Whether `info` is a per-training-index list rather than one value.
    pub fn per_sample_info(self) -> bool {
        matches!(
            self,
            BoundId::SamplewiseMi
                | BoundId::SamplewiseCmi
                | BoundId::SamplewiseCmiSupersample
                | BoundId::InterpIdentityLdmi
        )
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evaluates the bound `id` on `q`.
pub fn evaluate<T: Real>(id: BoundId, q: &BoundQuery<T>) -> Result<BoundValue<T>> {
    use BoundId::*;
    match id {
        AvgMi => avg_mi_bound(q),
        SamplewiseMi => samplewise_mi_bound(q),
        BinaryKlAvg => binary_kl_avg_bound(q),
        PacBayesSubgaussian => pac_bayes_subgaussian_bound(q),
        Mls => mls_bound(q),
        CatoniParametric => catoni_parametric_bound(q),
        CatoniFastRate => catoni_fast_rate_bound(q),
        RenyiPacbayes => renyi_pacbayes_bound(q),
        SingleDrawSubgaussian => single_draw_subgaussian_bound(q),
        AlphaMiSingleDraw => alpha_mi_single_draw_bound(q),
        CmiSlow => cmi_slow_bound(q),
        CmiFast => cmi_fast_bound(q),
        CmiInterpolating => cmi_interpolating_bound(q),
        CmiBinaryKl => cmi_binary_kl_bound(q),
        SamplewiseCmi => samplewise_cmi_bound(q, SamplewiseCmi),
        SamplewiseCmiSupersample => samplewise_cmi_bound(q, SamplewiseCmiSupersample),
        LooCmi => loo_cmi_bound(q),
        InterpIdentityLdmi => interp_identity_ldmi(q),
        InterpIdentityLoo => interp_identity_loo(q),
        WassersteinGap => wasserstein_gap_bound(q),
        TvGap => tv_gap_bound(q),
        PjlIterative => pjl_iterative_bound(q),
        VcFcmiCap => complexity::vc_fcmi_cap_bound(q),
        CompressionCmiCap => complexity::compression_cmi_cap_bound(q),
        SauerShelah => complexity::sauer_shelah_bound(q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for &id in BoundId::ALL {
            assert_eq!(id.as_str().parse::<BoundId>().unwrap(), id);
        }
        assert!("nope".parse::<BoundId>().is_err());
    }

    #[test]
    fn missing_fields_are_named() {
        let q = BoundQuery::<f64>::new(10).train(0.1);
        assert_eq!(evaluate(BoundId::Mls, &q).unwrap_err(), Error::MissingField("delta"));
        let q = BoundQuery::<f64>::default().info(0.1);
        assert_eq!(evaluate(BoundId::CmiSlow, &q).unwrap_err(), Error::MissingField("n"));
    }
}
