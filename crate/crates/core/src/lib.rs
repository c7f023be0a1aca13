//! lateralsim: simulate enterprise networks and goal-directed adversary
//! campaigns, then train and evaluate a feed-forward model that ranks which
//! host the adversary is likely to compromise next.
//!
//! The crate is organized as a pipeline:
//!
//! - [`netsim`] generates randomized networks (subnets, hosts, users,
//!   privileges, exploits, access histories) from a seeded config.
//! - [`adversary`] walks a network with weighted heuristics and emits
//!   ordered compromise episodes.
//! - [`features`] turns episode prefixes into one-hot state/candidate
//!   vectors and labeled training examples.
//! - [`mlp`] is a from-scratch four-layer network with manual
//!   backpropagation and grouped-softmax inference over candidate hosts.
//! - [`evaluate`] computes the percentile-of-actual-next-host metric,
//!   aggregates it into per-step medians with 80% bands, and replays
//!   externally observed compromise sequences.
//! - [`pipeline`] orchestrates the stages from a single experiment config
//!   with manifest-tracked, seed-deterministic outputs.

pub mod adversary;
pub mod evaluate;
pub mod features;
pub mod mlp;
pub mod netsim;
pub mod pipeline;
pub mod seeding;
