// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

use crate::densop::DensityOperator;
use crate::error::{Error, Result};

/// Per-sample validity measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDiagnostics {
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
    /// `max |ρ − ρ†| / 2` removed by the post-propagation symmetrization.
    pub symmetrization: f64,
}

/// Sampled trajectory: strictly increasing times with one snapshot each.
#[derive(Debug, Clone, Default)]
pub struct TimeSeries {
    times: Vec<f64>,
    snapshots: Vec<DensityOperator>,
    diagnostics: Vec<SampleDiagnostics>,
}

impl TimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, state: DensityOperator, symmetrization: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(time > last) {
                return Err(Error::BadRates(format!(
                    "sample time {time} does not increase past {last}"
                )));
            }
        }
        let d = state.diagnostics();
        self.diagnostics.push(SampleDiagnostics {
            trace: d.trace,
            min_eigenvalue: d.min_eigenvalue,
            hermiticity_defect: d.hermiticity_defect,
            symmetrization,
        });
        self.times.push(time);
        self.snapshots.push(state);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[DensityOperator] {
        &self.snapshots
    }

    pub fn diagnostics(&self) -> &[SampleDiagnostics] {
        &self.diagnostics
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&DensityOperator> {
        self.snapshots.last()
    }
}

/// `samples` evenly spaced times on `[0, t_final]`, both ends included.
pub fn uniform_times(t_final: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![t_final],
        n => (0..n)
            .map(|i| t_final * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
