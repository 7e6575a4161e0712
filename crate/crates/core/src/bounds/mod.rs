//! Quantum speed limits and the measured evolution times they bound.
//!
//! Isolated-system bounds are evaluated from the instantaneous Hamiltonian
//! and state; closed-system bounds replace each denominator by its time
//! average over the evolution window `[0, τ(δ)]`.

mod alpha;
mod passage;
mod sweep;

use std::f64::consts::PI;

use serde::{Serialize, Serializer};

pub use alpha::{
    alpha, alpha_endpoint, alpha_minimum, alpha_objective, AlphaMinimum, ALPHA_BRACKET_POINTS, ALPHA_REFINE_WIDTH,
};
pub use passage::{default_coarse_samples, first_passage, first_passage_with, TOUCH_TOL};
pub use sweep::{validity_sweep, SweepConfig, SweepRecord, SweepSummary, SystemClass};

use crate::error::{QslError, Result};
use crate::evolution::{sample_at, sample_trajectory_with, RotatedHamiltonianSystem, SamplingOptions, Trajectory};
use crate::linalg::{HermitianOperator, PureState, DEFAULT_OCCUPATION_TOL};

/// Denominators at or below this value make a bound infinite.
pub const ZERO_SPEED: f64 = 1e-14;

/// Slack allowed when checking `bound ≤ τ`.
pub const VALIDITY_TOL: f64 = 1e-9;

/// A lower bound on an evolution time. Stationary inputs give `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Infinite,
}

impl Bound {
    /// `numerator / denominator`, with `0/x = 0` and `x/0 = ∞`.
    pub fn ratio(numerator: f64, denominator: f64) -> Bound {
        if numerator == 0.0 {
            Bound::Finite(0.0)
        } else if denominator <= ZERO_SPEED {
            Bound::Infinite
        } else {
            Bound::Finite(numerator / denominator)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Bound::Finite(v) => v,
            Bound::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Bound::Infinite)
    }

    /// True when the bound does not exceed `tau` by more than [`VALIDITY_TOL`].
    pub fn holds_for(self, tau: f64) -> bool {
        self.value() <= tau + VALIDITY_TOL
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => serializer.serialize_f64(*v),
            Bound::Infinite => serializer.serialize_str("Infinite"),
        }
    }
}

pub(crate) fn check_fidelity(delta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(QslError::DomainError(format!(
            "fidelity must lie in [0, 1], got {delta}"
        )))
    }
}

/// Fubini-Study distance `arccos √δ` between states with fidelity `δ`.
pub fn fubini_study_distance(delta: f64) -> Result<f64> {
    check_fidelity(delta)?;
    Ok(delta.sqrt().acos())
}

/// Energy statistics of a state, the ingredients of every bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyStatistics {
    pub mean: f64,
    pub uncertainty: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub occupied_count: usize,
}

impl EnergyStatistics {
    pub fn of(h: &HermitianOperator, s: &PureState) -> Result<Self> {
        let extrema = h.occupied_extrema(s, DEFAULT_OCCUPATION_TOL)?;
        Ok(Self {
            mean: h.expectation(s)?,
            uncertainty: h.variance(s)?.sqrt(),
            eps_min: extrema.eps_min,
            eps_max: extrema.eps_max,
            occupied_count: extrema.occupied_count,
        })
    }

    /// `⟨H − ε_min⟩`.
    pub fn norm_energy(&self) -> f64 {
        (self.mean - self.eps_min).max(0.0)
    }

    /// `⟨ε_max − H⟩`.
    pub fn dual_norm_energy(&self) -> f64 {
        (self.eps_max - self.mean).max(0.0)
    }

    pub fn bd_factor(&self) -> f64 {
        (self.norm_energy() * self.dual_norm_energy()).sqrt()
    }
}

/// Mandelstam-Tamm: `arccos √δ / ΔH`.
pub fn mt_isolated(h: &HermitianOperator, s: &PureState, delta: f64) -> Result<Bound> {
    let distance = fubini_study_distance(delta)?;
    Ok(Bound::ratio(distance, EnergyStatistics::of(h, s)?.uncertainty))
}

/// Margolus-Levitin: `α(δ) / ⟨H − ε_min⟩`.
pub fn ml_isolated(h: &HermitianOperator, s: &PureState, delta: f64) -> Result<Bound> {
    let numerator = alpha(delta)?;
    Ok(Bound::ratio(numerator, EnergyStatistics::of(h, s)?.norm_energy()))
}

/// Bhatia-Davies: `arccos √δ / sqrt(⟨ε_max − H⟩⟨H − ε_min⟩)`.
pub fn bd_isolated(h: &HermitianOperator, s: &PureState, delta: f64) -> Result<Bound> {
    let distance = fubini_study_distance(delta)?;
    Ok(Bound::ratio(distance, EnergyStatistics::of(h, s)?.bd_factor()))
}

/// Trapezoidal mean of `values` over `[times[0], times[last]]`.
pub fn time_average(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() {
        return Err(QslError::DimensionMismatch {
            expected: times.len(),
            found: values.len(),
        });
    }
    if times.len() < 2 {
        return Err(QslError::DomainError("time average needs at least 2 samples".into()));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(QslError::DomainError("sample times must be ascending".into()));
    }
    let span = times[times.len() - 1] - times[0];
    if !(span > 0.0) {
        return Err(QslError::DegenerateInterval);
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    Ok(integral / span)
}

fn trajectory_average(traj: &Trajectory, f: impl Fn(&crate::evolution::Sample) -> f64) -> Result<f64> {
    match traj.samples.as_slice() {
        [] => Err(QslError::DomainError("empty trajectory".into())),
        [only] => Ok(f(only)),
        _ => time_average(&traj.times(), &traj.column(f)),
    }
}

/// `⟨⟨ΔH_t⟩⟩` over the trajectory.
pub fn average_uncertainty(traj: &Trajectory) -> Result<f64> {
    trajectory_average(traj, |s| s.energy_uncertainty)
}

/// `⟨⟨sqrt(⟨ε_max;t − H_t⟩⟨H_t − ε_min;t⟩)⟩⟩` over the trajectory.
pub fn average_bd_factor(traj: &Trajectory) -> Result<f64> {
    trajectory_average(traj, |s| s.bd_factor())
}

/// `⟨⟨H_t − ε_min;t⟩⟩` over the trajectory.
pub fn average_norm_energy(traj: &Trajectory) -> Result<f64> {
    trajectory_average(traj, |s| s.norm_energy)
}

/// Closed-system Mandelstam-Tamm: `arccos √δ / ⟨⟨ΔH_t⟩⟩`, where the
/// trajectory is expected to span `[0, τ(δ)]`.
pub fn mt_closed(traj: &Trajectory, delta: f64) -> Result<Bound> {
    let distance = fubini_study_distance(delta)?;
    Ok(Bound::ratio(distance, average_uncertainty(traj)?))
}

/// Closed-system Bhatia-Davies bound over the trajectory window.
pub fn bd_closed(traj: &Trajectory, delta: f64) -> Result<Bound> {
    let distance = fubini_study_distance(delta)?;
    Ok(Bound::ratio(distance, average_bd_factor(traj)?))
}

/// The hypothetical closed-system Margolus-Levitin bound
/// `L / ⟨⟨H_t − ε_min;t⟩⟩` for a numerator `L`.
pub fn ml_closed_hypothesis(traj: &Trajectory, numerator: f64) -> Result<Bound> {
    Ok(Bound::ratio(numerator, average_norm_energy(traj)?))
}

/// All bounds for one run to fidelity `delta`, next to the measured time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub delta: f64,
    pub tau_actual: f64,
    pub mt: Bound,
    /// Present only for isolated evolutions (`A = 0`).
    pub ml: Option<Bound>,
    pub bd: Bound,
    pub mt_closed: Bound,
    pub bd_closed: Bound,
    pub avg_uncertainty: f64,
    pub avg_bd_factor: f64,
    pub avg_norm_energy: f64,
}

impl BoundReport {
    /// Names of bounds that exceed the measured time.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut named = vec![
            ("mt", self.mt),
            ("bd", self.bd),
            ("mt_closed", self.mt_closed),
            ("bd_closed", self.bd_closed),
        ];
        if let Some(ml) = self.ml {
            named.push(("ml", ml));
        }
        named
            .into_iter()
            .filter(|(_, b)| !b.holds_for(self.tau_actual))
            .map(|(name, _)| name)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// Intervals in the trajectory over `[0, τ]`.
    pub samples: usize,
    /// Search window for the first passage; defaults to [`search_horizon`].
    pub t_max: Option<f64>,
    pub sampling: SamplingOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            t_max: None,
            sampling: SamplingOptions::default(),
        }
    }
}

/// Default first-passage window, `4π / ΔH` at `t = 0`.
///
/// For evolutions with conserved `ΔH` the Mandelstam-Tamm bound puts every
/// first passage at or after `arccos √δ / ΔH ≤ π / (2ΔH)`, and geodesics
/// return to the initial state after `π / ΔH`.
pub fn search_horizon(sys: &RotatedHamiltonianSystem) -> Result<f64> {
    let uncertainty = EnergyStatistics::of(sys.hamiltonian(), sys.initial())?.uncertainty;
    if uncertainty <= ZERO_SPEED {
        return Err(QslError::DomainError(
            "initial state is stationary (zero energy uncertainty)".into(),
        ));
    }
    Ok(4.0 * PI / uncertainty)
}

/// Measures `τ(δ)`, samples the evolution over `[0, τ]` and evaluates every bound.
pub fn evaluate_bounds(
    sys: &RotatedHamiltonianSystem,
    delta: f64,
    options: &ReportOptions,
) -> Result<(BoundReport, Trajectory)> {
    check_fidelity(delta)?;
    let t_max = match options.t_max {
        Some(t) => t,
        None => search_horizon(sys)?,
    };
    let tau = first_passage(sys, delta, t_max)?;
    let traj = if tau > 0.0 {
        sample_trajectory_with(sys, tau, options.samples, &options.sampling)?
    } else {
        sample_at(sys, &[0.0], &options.sampling)?
    };
    let report = report_from_trajectory(sys, delta, tau, &traj)?;
    Ok((report, traj))
}

/// Builds the report from an already measured `τ` and a trajectory over `[0, τ]`.
pub fn report_from_trajectory(
    sys: &RotatedHamiltonianSystem,
    delta: f64,
    tau: f64,
    traj: &Trajectory,
) -> Result<BoundReport> {
    let (h, u) = (sys.hamiltonian(), sys.initial());
    Ok(BoundReport {
        delta,
        tau_actual: tau,
        mt: mt_isolated(h, u, delta)?,
        ml: if sys.is_isolated() {
            Some(ml_isolated(h, u, delta)?)
        } else {
            None
        },
        bd: bd_isolated(h, u, delta)?,
        mt_closed: mt_closed(traj, delta)?,
        bd_closed: bd_closed(traj, delta)?,
        avg_uncertainty: average_uncertainty(traj)?,
        avg_bd_factor: average_bd_factor(traj)?,
        avg_norm_energy: average_norm_energy(traj)?,
    })
}
