// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Coherent chemical kinetics as quantum walks on graphs.
//!
//! Two-site Kraus maps ([`maps`]) and their generators ([`generators`]) are
//! combined over a reaction graph ([`network`]) to propagate density
//! operators ([`densop`]). [`radical_pair`] holds the radical-pair reaction
//! operators and their comparisons; [`scenario`] runs TOML-described
//! simulations.
//!
//! Site labels in the public API are 1-based, matching `ψ_1 … ψ_N`; matrix
//! indices are 0-based.

// `!(x >= 0.0)` rejects NaN along with negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod densop;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod maps;
pub mod network;
pub mod radical_pair;
pub mod scenario;
pub mod series;

pub use densop::{Basis, BasisLabel, DensityOperator, Occupation, TraceClass};
pub use error::{Error, Result};
pub use generators::{Generator, Liouvillian, StepGuard, TraceBehavior};
pub use maps::{KrausMap, MapParams};
pub use network::{BuiltinGraph, Edge, ReactionGraph};
pub use radical_pair::RPRates;
pub use series::TimeSeries;
