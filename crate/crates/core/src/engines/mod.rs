//! Probability engines: exhaustive enumeration, frontier DP and Monte Carlo.

mod dp;
mod enumerate;
mod mc;
mod model;
mod par;
mod prob;

pub use dp::{exact_reach_dp, exact_reach_dp_layers, float_reach_dp, frontier_width, DpOptions, DEFAULT_FRONTIER_CAP};
pub use enumerate::{count_events, exact_enumeration, fold_configs, ConfigSpace, EnumOptions, DEFAULT_FREE_EDGE_CAP};
pub use mc::{
    monte_carlo, monte_carlo_difference, z_value, DiffEstimate, MCEstimate, McOptions, Sampler, DEFAULT_CONFIDENCE,
};
pub use model::{conditioned_model, half, posts_exactly_model, EdgeModel};
pub use par::{fold_chunks, map_ordered, ExecPolicy};
pub use prob::{rational_string, rational_to_f64, ExactProb, RationalJson};
