//! Directed bunkbed percolation: graphs, events, exact and sampled
//! probability engines, and a suite of scripted verifications.

pub mod engines;
pub mod error;
pub mod events;
pub mod graph;
pub mod suite;
