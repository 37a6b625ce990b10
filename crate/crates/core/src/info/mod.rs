//! Finite-support information measures. All values are in nats.

mod binary;
mod dist;
mod divergence;
mod mutual;

pub use binary::{binary_kl, binary_kl_gamma, binary_kl_inverse_relaxed, binary_kl_inverse_upper};
pub(crate) use binary::{binary_kl_unchecked, monotone_sup};
pub use dist::{DiscreteDist, JointDist, Nats};
pub use divergence::{
    bh_bound, kl, pinsker_bound, renyi_divergence, symmetrized_kl, total_variation, wasserstein1_1d,
    wasserstein1_discrete_metric,
};
pub use mutual::{alpha_mutual_information, conditional_alpha_mutual_information, maximal_leakage, mutual_information};
