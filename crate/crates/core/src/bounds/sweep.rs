//! Seeded sweep checking every bound against measured first-passage times.

use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate_bounds, BoundReport, ReportOptions};
use crate::counterexamples::build_coupling;
use crate::error::{QslError, Result};
use crate::evolution::RotatedHamiltonianSystem;
use crate::random;

/// Which member of the conjugated class a sweep system is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemClass {
    /// `A = 0`: all five bounds apply, including Margolus-Levitin.
    Isolated,
    /// `A` from the geodesic coupling construction for the initial state.
    Coupled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub systems: usize,
    pub seed: u64,
    pub dim_min: usize,
    pub dim_max: usize,
    pub spectral_radius: f64,
    pub deltas: Vec<f64>,
    pub samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            systems: 200,
            seed: 0,
            dim_min: 2,
            dim_max: 6,
            spectral_radius: 5.0,
            deltas: (0..10).map(|k| k as f64 / 10.0).collect(),
            samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub system: usize,
    pub class: SystemClass,
    pub dim: usize,
    pub delta: f64,
    /// `None` when the fidelity never reached `delta` inside the search window.
    pub report: Option<BoundReport>,
    pub violations: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub config: SweepConfig,
    pub evaluated: usize,
    pub unreached: usize,
    pub violations: usize,
    pub records: Vec<SweepRecord>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Builds system `index` of the sweep; even indices are coupled, odd isolated.
pub fn sweep_system(config: &SweepConfig, index: usize) -> Result<(SystemClass, RotatedHamiltonianSystem)> {
    let mut rng = random::seeded(config.seed, index as u64);
    let dim = rand::Rng::random_range(&mut rng, config.dim_min..=config.dim_max);
    let h = random::hermitian(&mut rng, dim, config.spectral_radius);
    let u = random::state(&mut rng, dim);
    if index.is_multiple_of(2) {
        let a = build_coupling(&h, &u)?;
        Ok((SystemClass::Coupled, RotatedHamiltonianSystem::new(h, a, u)?))
    } else {
        Ok((SystemClass::Isolated, RotatedHamiltonianSystem::isolated(h, u)?))
    }
}

fn validate(config: &SweepConfig) -> Result<()> {
    if config.systems == 0 {
        return Err(QslError::DomainError("sweep needs at least one system".into()));
    }
    if config.dim_min < 2 || config.dim_max < config.dim_min {
        return Err(QslError::DomainError(format!(
            "invalid dimension range {}..={}",
            config.dim_min, config.dim_max
        )));
    }
    if !(config.spectral_radius > 0.0) || !config.spectral_radius.is_finite() {
        return Err(QslError::DomainError("spectral radius must be positive".into()));
    }
    if config.deltas.is_empty() {
        return Err(QslError::DomainError("sweep needs at least one fidelity".into()));
    }
    for &d in &config.deltas {
        super::check_fidelity(d)?;
    }
    if config.samples < 2 {
        return Err(QslError::DomainError("need at least 2 trajectory intervals".into()));
    }
    Ok(())
}

/// Runs every (system, δ) pair; records are in deterministic order.
pub fn validity_sweep(config: &SweepConfig) -> Result<SweepSummary> {
    validate(config)?;
    let options = ReportOptions {
        samples: config.samples,
        ..ReportOptions::default()
    };
    let per_system: Vec<Result<Vec<SweepRecord>>> = (0..config.systems)
        .into_par_iter()
        .map(|index| {
            let (class, sys) = sweep_system(config, index)?;
            config
                .deltas
                .iter()
                .map(|&delta| {
                    let report = match evaluate_bounds(&sys, delta, &options) {
                        Ok((report, _)) => Some(report),
                        Err(QslError::NotReached { .. }) => None,
                        Err(e) => return Err(e),
                    };
                    let violations = report.as_ref().map(BoundReport::violations).unwrap_or_default();
                    Ok(SweepRecord {
                        system: index,
                        class,
                        dim: sys.dim(),
                        delta,
                        report,
                        violations,
                    })
                })
                .collect()
        })
        .collect();

    let mut records = Vec::with_capacity(config.systems * config.deltas.len());
    for batch in per_system {
        records.extend(batch?);
    }
    let evaluated = records.iter().filter(|r| r.report.is_some()).count();
    let violations = records.iter().filter(|r| !r.violations.is_empty()).count();
    Ok(SweepSummary {
        config: config.clone(),
        evaluated,
        unreached: records.len() - evaluated,
        violations,
        records,
    })
}
