// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NonHermitian { defect: f64 },

    #[error("negative eigenvalue {min_eigenvalue:e}")]
    NegativeEigenvalue { min_eigenvalue: f64 },

    #[error("trace {trace} out of range")]
    TraceOutOfRange { trace: f64 },

    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("branch {index} out of range (map has {count} branches)")]
    BranchOutOfRange { index: usize, count: usize },

    #[error("bad site indices ({j}, {k}) for dimension {dim}")]
    BadIndices { j: usize, k: usize, dim: usize },

    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),

    #[error("bad rates: {0}")]
    BadRates(String),

    #[error("step too large: rate*dt = {rate_dt} exceeds {limit}")]
    StepTooLarge { rate_dt: f64, limit: f64 },

    #[error("matrix exponential did not converge")]
    NonConvergent,

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("coherence decay is not exponential (leakage {leakage:e} exceeds {tolerance:e})")]
    NotExponentialCoherenceDecay { leakage: f64, tolerance: f64 },

    #[error("sample {index} (t = {time}): {source}")]
    Sample {
        index: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
