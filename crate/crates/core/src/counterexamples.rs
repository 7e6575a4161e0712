//! Closed-system constructions that refute a Margolus-Levitin type bound and
//! separate the Mandelstam-Tamm and Bhatia-Davies bounds.
//!
//! The refutation family lives on a two-dimensional subspace spanned by an
//! initial state `|u⟩` and a perpendicular `|v⟩`, with
//! `X = |u⟩⟨u| − |v⟩⟨v|`, `Z = |u⟩⟨v| + |v⟩⟨u|`, `Y = i(|u⟩⟨v| − |v⟩⟨u|)` and
//! `H_θ = μ(sin θ·Z − cos θ·X)`, `μ = E / (1 − cos θ)`.
//! The coupling `A_θ = μ sin θ·Z` makes the evolution a geodesic whose
//! normalized expected energy stays at `E` while `ΔH = E·cot(θ/2)` grows
//! without bound as `θ → 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    average_norm_energy, check_fidelity, evaluate_bounds, mt_closed, search_horizon, BoundReport, EnergyStatistics,
    ReportOptions,
};
use crate::error::{ensure_dim, QslError, Result};
use crate::evolution::{
    sample_trajectory_with, BlochFrame, Frame, RotatedHamiltonianSystem, SamplingOptions, Trajectory,
};
use crate::linalg::{CMatrix, HermitianOperator, PureState, DEFAULT_OCCUPATION_TOL};

/// Default relative margin used by [`choose_theta`].
pub const DEFAULT_MARGIN: f64 = 0.1;

/// Slack in the `τ < L/E` comparison.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Default initial Bloch vector for the circle trajectory: 60° from the x axis.
pub const DEFAULT_CIRCLE_POLAR: f64 = PI / 3.0;

/// The coupling `A = (H − ⟨H⟩)|u⟩⟨u| + |u⟩⟨u|(H − ⟨H⟩)`.
///
/// It satisfies `Aρ + ρA = A` and `[H − A, ρ] = 0` for `ρ = |u⟩⟨u|`.
pub fn build_coupling(h: &HermitianOperator, u: &PureState) -> Result<HermitianOperator> {
    ensure_dim(h.dim(), u.dim())?;
    let mean = h.expectation(u)?;
    let amp = u.amplitudes();
    // w = (H − ⟨H⟩)u, A = w u† + u w†
    let w = h.apply(u)? - amp.scale(mean);
    let outer = &w * amp.adjoint();
    HermitianOperator::new(&outer + outer.adjoint())
}

/// `μ(θ) = E / (1 − cos θ)`, with `1 − cos θ` evaluated as `2 sin²(θ/2)`.
pub fn family_scale(energy: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    energy / (2.0 * s * s)
}

fn check_family(energy: f64, theta: f64) -> Result<()> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(QslError::DomainError(format!(
            "energy scale must be positive, got {energy}"
        )));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(QslError::DomainError(format!("theta must lie in (0, π), got {theta}")));
    }
    Ok(())
}

/// One member `H_θ` of the refutation family.
#[derive(Debug, Clone)]
pub struct MlFamily {
    frame: BlochFrame,
    energy: f64,
    theta: f64,
    mu: f64,
}

/// Family member on `C²` with `|u⟩ = e₀`.
pub fn build_ml_family(energy: f64, theta: f64) -> Result<MlFamily> {
    MlFamily::new(energy, theta, &PureState::basis(2, 0)?)
}

impl MlFamily {
    /// Family member around an arbitrary `|u⟩` of dimension at least 2.
    pub fn new(energy: f64, theta: f64, u: &PureState) -> Result<Self> {
        check_family(energy, theta)?;
        Ok(Self {
            frame: BlochFrame::around(u)?,
            energy,
            theta,
            mu: family_scale(energy, theta),
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn frame(&self) -> &BlochFrame {
        &self.frame
    }

    fn outer(a: &PureState, b: &PureState) -> CMatrix {
        a.amplitudes() * b.amplitudes().adjoint()
    }

    pub fn x(&self) -> HermitianOperator {
        let (u, v) = (self.frame.u(), self.frame.v());
        HermitianOperator::new(Self::outer(u, u) - Self::outer(v, v)).expect("projector difference")
    }

    pub fn y(&self) -> HermitianOperator {
        let (u, v) = (self.frame.u(), self.frame.v());
        HermitianOperator::new((Self::outer(u, v) - Self::outer(v, u)) * Complex64::i())
            .expect("Hermitian by construction")
    }

    pub fn z(&self) -> HermitianOperator {
        let (u, v) = (self.frame.u(), self.frame.v());
        HermitianOperator::new(Self::outer(u, v) + Self::outer(v, u)).expect("Hermitian by construction")
    }

    /// `H_θ = μ(sin θ·Z − cos θ·X)`.
    pub fn hamiltonian(&self) -> HermitianOperator {
        let m = self.z().matrix().scale(self.theta.sin()) - self.x().matrix().scale(self.theta.cos());
        HermitianOperator::new(m.scale(self.mu)).expect("real combination of Hermitian operators")
    }

    /// Closed form `μ sin θ·Z` of the coupling for initial state `|u⟩`.
    pub fn coupling_closed_form(&self) -> HermitianOperator {
        self.z().scaled(self.mu * self.theta.sin())
    }

    /// `ΔH_θ = E·cot(θ/2)` in `|u⟩`.
    pub fn energy_uncertainty(&self) -> f64 {
        self.energy / (0.5 * self.theta).tan()
    }

    /// The geodesic evolution from `|u⟩`, with coupling built from `H_θ` and `|u⟩`.
    pub fn system(&self) -> Result<RotatedHamiltonianSystem> {
        self.system_from(self.frame.u().clone())
    }

    /// Same `H_θ` and `A_θ`, started from another state. The Bloch frame stays `(u, v)`.
    pub fn system_from(&self, initial: PureState) -> Result<RotatedHamiltonianSystem> {
        let h = self.hamiltonian();
        let a = build_coupling(&h, self.frame.u())?;
        let sys = RotatedHamiltonianSystem::new(h, a, initial)?;
        if sys.dim() == 2 {
            sys.with_bloch_frame(self.frame.clone())
        } else {
            Ok(sys)
        }
    }
}

/// `θ = 2·atan(1 / (c(1 + margin)))` with `c = arccos√δ / L`, so that
/// `cot(θ/2) = c(1 + margin) > c`.
pub fn choose_theta(delta: f64, numerator: f64, margin: f64) -> Result<f64> {
    check_fidelity(delta)?;
    if delta >= 1.0 {
        return Err(QslError::DomainError("delta = 1 needs no evolution time".into()));
    }
    if !(numerator > 0.0) || !numerator.is_finite() {
        return Err(QslError::DomainError(format!(
            "numerator must be positive, got {numerator}"
        )));
    }
    if !(margin > 0.0) || !margin.is_finite() {
        return Err(QslError::DomainError(format!("margin must be positive, got {margin}")));
    }
    let c = delta.sqrt().acos() / numerator;
    Ok(2.0 * (1.0 / (c * (1.0 + margin))).atan())
}

/// Parameters of one refutation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefutationSpec {
    pub delta: f64,
    #[serde(rename = "L")]
    pub numerator: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub theta: f64,
    pub mu: f64,
}

impl RefutationSpec {
    /// Spec for an explicit `θ`; fails unless `cot(θ/2) > arccos√δ / L`.
    pub fn new(delta: f64, numerator: f64, energy: f64, theta: f64) -> Result<Self> {
        check_fidelity(delta)?;
        if delta >= 1.0 {
            return Err(QslError::DomainError("delta = 1 needs no evolution time".into()));
        }
        if !(numerator > 0.0) || !numerator.is_finite() {
            return Err(QslError::DomainError(format!(
                "numerator must be positive, got {numerator}"
            )));
        }
        check_family(energy, theta)?;
        let c = delta.sqrt().acos() / numerator;
        let cot = 1.0 / (0.5 * theta).tan();
        if !(cot > c) {
            return Err(QslError::DomainError(format!(
                "cot(theta/2) = {cot} does not exceed arccos(sqrt(delta))/L = {c}"
            )));
        }
        Ok(Self {
            delta,
            numerator,
            energy,
            theta,
            mu: family_scale(energy, theta),
        })
    }

    /// Spec with `θ` from [`choose_theta`].
    pub fn with_margin(delta: f64, numerator: f64, energy: f64, margin: f64) -> Result<Self> {
        let theta = choose_theta(delta, numerator, margin)?;
        Self::new(delta, numerator, energy, theta)
    }

    /// The hypothetical bound `L / E`.
    pub fn hypothetical_bound(&self) -> f64 {
        self.numerator / self.energy
    }

    /// `arccos√δ / (E·cot(θ/2))`.
    pub fn predicted_time(&self) -> f64 {
        self.delta.sqrt().acos() * (0.5 * self.theta).tan() / self.energy
    }

    pub fn family(&self) -> Result<MlFamily> {
        build_ml_family(self.energy, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefutationMargins {
    /// `L/E − τ`; positive when the hypothesis is violated.
    pub bound_minus_tau: f64,
    /// `τ − arccos√δ / ⟨⟨ΔH_t⟩⟩`; zero on a geodesic.
    pub tau_minus_mt_closed: f64,
    /// `max_t |⟨H_t − ε_min;t⟩ − E|`.
    pub max_norm_energy_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefutationReport {
    pub spec: RefutationSpec,
    pub tau: f64,
    pub hypothetical_bound: f64,
    pub mt_closed: f64,
    pub energy_uncertainty: f64,
    pub avg_norm_energy: f64,
    pub violated: bool,
    pub margins: RefutationMargins,
}

/// Measures `τ(δ)` on the family member of `spec` and compares it with `L/E`.
pub fn run_refutation(spec: &RefutationSpec, samples: usize) -> Result<(RefutationReport, Trajectory)> {
    let family = spec.family()?;
    let sys = family.system()?;
    let options = ReportOptions {
        samples,
        t_max: Some(search_horizon(&sys)?),
        sampling: SamplingOptions::default(),
    };
    let (bounds, traj) = evaluate_bounds(&sys, spec.delta, &options)?;
    let tau = bounds.tau_actual;
    let mt = mt_closed(&traj, spec.delta)?.value();
    let hypothetical_bound = spec.hypothetical_bound();
    let report = RefutationReport {
        spec: *spec,
        tau,
        hypothetical_bound,
        mt_closed: mt,
        energy_uncertainty: family.energy_uncertainty(),
        avg_norm_energy: average_norm_energy(&traj)?,
        violated: tau < hypothetical_bound - VIOLATION_TOL,
        margins: RefutationMargins {
            bound_minus_tau: hypothetical_bound - tau,
            tau_minus_mt_closed: tau - mt,
            max_norm_energy_drift: traj
                .samples
                .iter()
                .map(|s| (s.norm_energy - spec.energy).abs())
                .fold(0.0, f64::max),
        },
    };
    Ok((report, traj))
}

/// [`run_refutation`] with `θ` chosen by [`choose_theta`] and 1000 samples.
pub fn run_ml_refutation(delta: f64, numerator: f64, energy: f64, margin: f64) -> Result<RefutationReport> {
    let spec = RefutationSpec::with_margin(delta, numerator, energy, margin)?;
    Ok(run_refutation(&spec, 1000)?.0)
}

/// Result of the Bhatia-Davies nonsaturation experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonsaturationReport {
    pub bounds: BoundReport,
    pub occupied_levels: usize,
    /// `min_t (⟨ε_max;t − H_t⟩⟨H_t − ε_min;t⟩ − Δ²H_t)` over the samples.
    pub min_pointwise_gap: f64,
    /// `mt_closed − bd_closed`.
    pub closed_gap: f64,
}

/// Geodesic evolution of `u` under `H` and the coupling of [`build_coupling`]:
/// the Mandelstam-Tamm bound is attained while Bhatia-Davies stays strictly below.
pub fn run_bd_nonsaturation(h: &HermitianOperator, u: &PureState, delta: f64) -> Result<NonsaturationReport> {
    run_bd_nonsaturation_with(h, u, delta, 1000)
}

pub fn run_bd_nonsaturation_with(
    h: &HermitianOperator,
    u: &PureState,
    delta: f64,
    samples: usize,
) -> Result<NonsaturationReport> {
    check_fidelity(delta)?;
    if delta >= 1.0 {
        return Err(QslError::DomainError("delta = 1 needs no evolution time".into()));
    }
    let occupied = h.occupied_extrema(u, DEFAULT_OCCUPATION_TOL)?.occupied_count;
    if occupied < 3 {
        return Err(QslError::InsufficientLevels { found: occupied });
    }
    let a = build_coupling(h, u)?;
    let sys = RotatedHamiltonianSystem::new(h.clone(), a, u.clone())?;
    let options = ReportOptions {
        samples,
        ..ReportOptions::default()
    };
    let (bounds, traj) = evaluate_bounds(&sys, delta, &options)?;
    let min_pointwise_gap = traj
        .samples
        .iter()
        .map(|s| s.bd_factor().powi(2) - s.variance())
        .fold(f64::INFINITY, f64::min);
    let closed_gap = bounds.mt_closed.value() - bounds.bd_closed.value();
    Ok(NonsaturationReport {
        bounds,
        occupied_levels: occupied,
        min_pointwise_gap,
        closed_gap,
    })
}

/// One row of the energy-uncertainty table of the refutation family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyPoint {
    pub theta: f64,
    pub mu: f64,
    /// `ΔH_θ` measured in `|u⟩`.
    pub energy_uncertainty: f64,
    /// `E·cot(θ/2)`.
    pub closed_form: f64,
    /// `⟨H_θ − ε_min⟩` measured in `|u⟩`.
    pub norm_energy: f64,
}

/// `ΔH_θ` against `θ` at fixed `E`.
pub fn uncertainty_curve(energy: f64, thetas: &[f64]) -> Result<Vec<UncertaintyPoint>> {
    thetas
        .iter()
        .map(|&theta| {
            let family = build_ml_family(energy, theta)?;
            let stats = EnergyStatistics::of(&family.hamiltonian(), family.frame().u())?;
            Ok(UncertaintyPoint {
                theta,
                mu: family.mu(),
                energy_uncertainty: stats.uncertainty,
                closed_form: family.energy_uncertainty(),
                norm_energy: stats.norm_energy(),
            })
        })
        .collect()
}

/// Family member started off the equator at Bloch polar angle `polar_from_x`.
/// In the rotating frame the state precesses about the x axis.
pub fn circle_system(energy: f64, theta: f64, polar_from_x: f64, azimuth: f64) -> Result<RotatedHamiltonianSystem> {
    let family = build_ml_family(energy, theta)?;
    let initial = family.frame().state_at(polar_from_x, azimuth)?;
    family.system_from(initial)
}

/// Rotating-frame trajectory of [`circle_system`] over one full precession.
pub fn circle_trajectory(energy: f64, theta: f64, polar_from_x: f64, samples: usize) -> Result<Trajectory> {
    let sys = circle_system(energy, theta, polar_from_x, 0.0)?;
    let omega = 2.0 * sys.frame_generator().spectral_radius();
    let period = if omega > 0.0 { 2.0 * PI / omega } else { 1.0 };
    sample_trajectory_with(
        &sys,
        period,
        samples,
        &SamplingOptions {
            frame: Frame::Rotating,
            ..SamplingOptions::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{anticommutator_residual, commutator_norm};
    use std::f64::consts::FRAC_PI_2;

    fn geodesic_residuals(h: &HermitianOperator, u: &PureState) -> (f64, f64) {
        let a = build_coupling(h, u).unwrap();
        let rho = u.density();
        let anti = anticommutator_residual(a.matrix(), &rho);
        let comm = commutator_norm(h.sub(&a).unwrap().matrix(), &rho);
        (anti.unwrap(), comm.unwrap())
    }

    #[test]
    fn coupling_vanishes_on_eigenstates() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let a = build_coupling(&h, &PureState::basis(3, 1).unwrap()).unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn coupling_conditions_on_three_levels() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let u = PureState::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let (anti, comm) = geodesic_residuals(&h, &u);
        assert!(anti < 1e-10 && comm < 1e-10);
        let a = build_coupling(&h, &u).unwrap();
        // (H − A)u = ⟨H⟩u
        let lhs = h.sub(&a).unwrap().apply(&u).unwrap();
        assert!((lhs - u.amplitudes().scale(1.0)).norm() < 1e-14);
    }

    #[test]
    fn coupling_dimension_mismatch() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]).unwrap();
        let u = PureState::basis(3, 0).unwrap();
        assert!(matches!(
            build_coupling(&h, &u),
            Err(QslError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn family_coupling_matches_closed_form() {
        for theta in [0.3, FRAC_PI_2, 2.5] {
            let f = build_ml_family(1.3, theta).unwrap();
            let a = build_coupling(&f.hamiltonian(), f.frame().u()).unwrap();
            assert!((a.matrix() - f.coupling_closed_form().matrix()).norm() < 1e-12);
            // H − A = −μ cos θ·X
            let rest = f.hamiltonian().sub(&a).unwrap();
            let expected = f.x().scaled(-f.mu() * theta.cos());
            assert!((rest.matrix() - expected.matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn family_examples() {
        let f = build_ml_family(1.0, FRAC_PI_2).unwrap();
        assert!((f.mu() - 1.0).abs() < 1e-15);
        let ev = f.hamiltonian().eigenvalues().to_vec();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let stats = EnergyStatistics::of(&f.hamiltonian(), f.frame().u()).unwrap();
        assert!((stats.uncertainty - 1.0).abs() < 1e-14);
        assert!((stats.norm_energy() - 1.0).abs() < 1e-14);

        let f = build_ml_family(1.0, PI / 3.0).unwrap();
        assert!((f.mu() - 2.0).abs() < 1e-14);
        let stats = EnergyStatistics::of(&f.hamiltonian(), f.frame().u()).unwrap();
        assert!((stats.uncertainty - 3f64.sqrt()).abs() < 1e-14);

        assert!(matches!(build_ml_family(1.0, PI), Err(QslError::DomainError(_))));
        assert!(matches!(build_ml_family(1.0, 0.0), Err(QslError::DomainError(_))));
        assert!(matches!(build_ml_family(0.0, 1.0), Err(QslError::DomainError(_))));
    }

    #[test]
    fn family_in_higher_dimension() {
        let u = PureState::from_real(&[1.0, 2.0, 0.0, -1.0]).unwrap();
        let f = MlFamily::new(2.0, 0.7, &u).unwrap();
        let stats = EnergyStatistics::of(&f.hamiltonian(), &u).unwrap();
        assert!((stats.norm_energy() - 2.0).abs() < 1e-12);
        assert!((stats.uncertainty - f.energy_uncertainty()).abs() < 1e-12);
    }

    #[test]
    fn choose_theta_examples() {
        // c = 1: margin √3 − 1 gives cot(θ/2) = √3, θ = π/3
        let theta = choose_theta(0.0, FRAC_PI_2, 3f64.sqrt() - 1.0).unwrap();
        assert!((theta - PI / 3.0).abs() < 1e-14);
        let theta = choose_theta(0.25, PI / 3.0, 0.1).unwrap();
        assert!(1.0 / (0.5 * theta).tan() > 0.25f64.sqrt().acos() / (PI / 3.0));
        assert!(matches!(choose_theta(1.0, 1.0, 0.1), Err(QslError::DomainError(_))));
        assert!(matches!(choose_theta(0.5, 0.0, 0.1), Err(QslError::DomainError(_))));
        assert!(matches!(choose_theta(0.5, 1.0, 0.0), Err(QslError::DomainError(_))));
    }

    #[test]
    fn spec_rejects_non_violating_angle() {
        assert!(RefutationSpec::new(0.0, FRAC_PI_2, 1.0, PI / 3.0).is_ok());
        // cot(π/3) < c = 1
        assert!(RefutationSpec::new(0.0, FRAC_PI_2, 1.0, 2.0 * PI / 3.0).is_err());
        let spec = RefutationSpec::new(0.3, 0.4, 2.0, 0.2).unwrap();
        assert!((spec.mu * (1.0 - spec.theta.cos()) - spec.energy).abs() < 1e-12);
    }

    #[test]
    fn spot_refutation() {
        let spec = RefutationSpec::new(0.0, FRAC_PI_2, 1.0, PI / 3.0).unwrap();
        let (report, traj) = run_refutation(&spec, 500).unwrap();
        let expected = PI / (2.0 * 3f64.sqrt());
        assert!((report.tau - expected).abs() < 1e-10);
        assert!((report.tau - spec.predicted_time()).abs() < 1e-10);
        assert!(report.violated);
        assert!(report.margins.tau_minus_mt_closed.abs() < 1e-8);
        assert!(report.margins.max_norm_energy_drift < 1e-9);
        assert_eq!(traj.len(), 501);
    }

    #[test]
    fn literature_hypotheses_are_refuted() {
        let r = run_ml_refutation(0.0, 0.5, 1.0, DEFAULT_MARGIN).unwrap();
        assert!(r.violated);
        let r = run_ml_refutation(0.25, PI / 3.0, 2.0, DEFAULT_MARGIN).unwrap();
        assert!(r.violated && r.tau < PI / 6.0);
        assert!((r.tau - r.spec.predicted_time()).abs() < 1e-8);
    }

    #[test]
    fn nonsaturation_on_uniform_three_levels() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let u = PureState::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let r = run_bd_nonsaturation_with(&h, &u, 0.0, 200).unwrap();
        let tau = FRAC_PI_2 * 1.5f64.sqrt();
        assert!((r.bounds.tau_actual - tau).abs() < 1e-10);
        assert!((r.bounds.mt_closed.value() - tau).abs() < 1e-10);
        assert!((r.bounds.bd_closed.value() - FRAC_PI_2).abs() < 1e-10);
        assert!(r.closed_gap > 0.35);
        assert!(r.min_pointwise_gap > 0.3);
        assert_eq!(r.occupied_levels, 3);
    }

    #[test]
    fn nonsaturation_needs_three_levels() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]).unwrap();
        let u = PureState::from_real(&[0.6, 0.8]).unwrap();
        assert!(matches!(
            run_bd_nonsaturation(&h, &u, 0.0),
            Err(QslError::InsufficientLevels { found: 2 })
        ));
    }

    #[test]
    fn nonsaturation_with_unequal_weights() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 3.0]).unwrap();
        let u = PureState::from_real(&[0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()]).unwrap();
        let r = run_bd_nonsaturation_with(&h, &u, 0.2, 200).unwrap();
        assert!(r.min_pointwise_gap > 0.0);
        assert!((r.bounds.tau_actual - r.bounds.mt_closed.value()).abs() < 1e-8);
        assert!(r.bounds.bd_closed.value() < r.bounds.tau_actual - 1e-6);
    }

    #[test]
    fn uncertainty_curve_decreases() {
        let thetas: Vec<f64> = (1..60).map(|k| k as f64 * PI / 60.0).collect();
        let curve = uncertainty_curve(1.0, &thetas).unwrap();
        for p in &curve {
            assert!((p.energy_uncertainty - p.closed_form).abs() < 1e-10 * p.closed_form.max(1.0));
            assert!((p.norm_energy - 1.0).abs() < 1e-10);
        }
        assert!(curve
            .windows(2)
            .all(|w| w[1].energy_uncertainty < w[0].energy_uncertainty));
    }

    #[test]
    fn circle_in_rotating_frame() {
        let traj = circle_trajectory(1.0, PI / 6.0, DEFAULT_CIRCLE_POLAR, 200).unwrap();
        let xs = traj.column(|s| s.bloch.unwrap()[0]);
        let x0 = xs[0];
        assert!((x0 - 0.5).abs() < 1e-12);
        assert!(xs.iter().all(|x| (x - x0).abs() < 1e-9));
        let first = traj.first().unwrap().bloch.unwrap();
        let last = traj.last().unwrap().bloch.unwrap();
        assert!((first[2] - last[2]).abs() < 1e-9 && (first[1] - last[1]).abs() < 1e-9);
    }
}
