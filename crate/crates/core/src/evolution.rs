//! Dynamics under conjugated Hamiltonians `H_t = e^{-iAt} H e^{iAt}`.
//!
//! A state driven by `H_t` is, in the frame rotated by `e^{iAt}`, driven by
//! the constant generator `H − A`. The exact propagator therefore factors
//! as `e^{-iAt} e^{-i(H−A)t}`; [`RotatedHamiltonianSystem::propagate_numeric`]
//! integrates the Schrödinger equation with the instantaneous `H_t` instead
//! and serves as an independent check of that factorization.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, QslError, Result};
use crate::linalg::{fidelity, inner, CMatrix, CVector, HermitianOperator, PureState, DEFAULT_OCCUPATION_TOL};

/// Per-step norm drift (before renormalization) tolerated by the integrator.
pub const MAX_STEP_DRIFT: f64 = 1e-6;

/// Orthonormal pair `(u, v)` defining Bloch coordinates on a two-level space.
///
/// The axes are `X = |u⟩⟨u| − |v⟩⟨v|`, `Y = i(|u⟩⟨v| − |v⟩⟨u|)` and
/// `Z = |u⟩⟨v| + |v⟩⟨u|`, so `|u⟩` sits on the positive x axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochFrame {
    u: PureState,
    v: PureState,
}

impl BlochFrame {
    pub fn new(u: PureState, v: PureState) -> Result<Self> {
        ensure_dim(u.dim(), v.dim())?;
        let overlap = u.inner(&v)?.norm();
        if overlap > 1e-10 {
            return Err(QslError::InvalidState(format!("frame vectors overlap by {overlap:e}")));
        }
        Ok(Self { u, v })
    }

    /// Frame whose x axis is `u`, completed by [`PureState::perpendicular`].
    pub fn around(u: &PureState) -> Result<Self> {
        Self::new(u.clone(), u.perpendicular()?)
    }

    pub fn u(&self) -> &PureState {
        &self.u
    }

    pub fn v(&self) -> &PureState {
        &self.v
    }

    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of `state`.
    pub fn coordinates(&self, state: &PureState) -> Result<[f64; 3]> {
        let a = self.u.inner(state)?;
        let b = self.v.inner(state)?;
        let cross = a.conj() * b;
        Ok([a.norm_sqr() - b.norm_sqr(), -2.0 * cross.im, 2.0 * cross.re])
    }

    /// State with Bloch vector `(cos γ, sin γ sin φ, sin γ cos φ)`, where `γ`
    /// is the polar angle measured from the x axis and `φ` the azimuth
    /// measured from the z axis towards the y axis.
    pub fn state_at(&self, polar_from_x: f64, azimuth: f64) -> Result<PureState> {
        let a = (0.5 * polar_from_x).cos();
        let b = num_complex::Complex64::from_polar((0.5 * polar_from_x).sin(), -azimuth);
        PureState::new(self.u.amplitudes().map(|x| x * a) + self.v.amplitudes().map(|x| x * b))
    }
}

/// A time-independent `H` rotated by the one-parameter group generated by `A`,
/// together with the initial state it acts on.
#[derive(Debug, Clone)]
pub struct RotatedHamiltonianSystem {
    hamiltonian: HermitianOperator,
    coupling: HermitianOperator,
    frame_generator: HermitianOperator,
    initial: PureState,
    bloch_frame: Option<BlochFrame>,
    // U_A† U_{H−A} and U_{H−A}† u, so exact propagation is two diagonal phases
    // and two matrix-vector products.
    cross_basis: CMatrix,
    initial_coefficients: CVector,
}

impl RotatedHamiltonianSystem {
    pub fn new(hamiltonian: HermitianOperator, coupling: HermitianOperator, initial: PureState) -> Result<Self> {
        ensure_dim(hamiltonian.dim(), coupling.dim())?;
        ensure_dim(hamiltonian.dim(), initial.dim())?;
        let frame_generator = hamiltonian.sub(&coupling)?;
        let cross_basis = coupling.eigh().vectors.adjoint() * &frame_generator.eigh().vectors;
        let initial_coefficients = frame_generator.eigh().vectors.adjoint() * initial.amplitudes();
        let bloch_frame = if initial.dim() == 2 {
            Some(BlochFrame::around(&initial)?)
        } else {
            None
        };
        Ok(Self {
            hamiltonian,
            coupling,
            frame_generator,
            initial,
            bloch_frame,
            cross_basis,
            initial_coefficients,
        })
    }

    /// Time-independent evolution, `A = 0`.
    pub fn isolated(hamiltonian: HermitianOperator, initial: PureState) -> Result<Self> {
        let dim = hamiltonian.dim();
        Self::new(hamiltonian, HermitianOperator::zeros(dim), initial)
    }

    /// Replaces the default Bloch frame (which is centred on the initial state).
    pub fn with_bloch_frame(mut self, frame: BlochFrame) -> Result<Self> {
        ensure_dim(self.dim(), frame.u().dim())?;
        if self.dim() != 2 {
            return Err(QslError::DomainError(
                "Bloch coordinates need a two-dimensional system".into(),
            ));
        }
        self.bloch_frame = Some(frame);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn coupling(&self) -> &HermitianOperator {
        &self.coupling
    }

    /// `H − A`, the generator in the rotating frame.
    pub fn frame_generator(&self) -> &HermitianOperator {
        &self.frame_generator
    }

    pub fn initial(&self) -> &PureState {
        &self.initial
    }

    pub fn bloch_frame(&self) -> Option<&BlochFrame> {
        self.bloch_frame.as_ref()
    }

    pub fn is_isolated(&self) -> bool {
        self.coupling.is_zero()
    }

    /// `e^{-iAt} H e^{iAt}`.
    pub fn hamiltonian_at(&self, t: f64) -> HermitianOperator {
        self.hamiltonian
            .conjugated_by(&self.coupling.unitary_exp(t))
            .expect("dimensions checked at construction")
    }

    /// `e^{-iAt} e^{-i(H−A)t} |u⟩`.
    pub fn propagate_exact(&self, t: f64) -> PureState {
        let coupling = self.coupling.eigh();
        let generator = self.frame_generator.eigh();
        let mut c = self.initial_coefficients.clone();
        apply_phases(&mut c, &generator.values, t);
        let mut d = &self.cross_basis * c;
        apply_phases(&mut d, &coupling.values, t);
        PureState::new(&coupling.vectors * d).expect("unitary image of a unit vector")
    }

    /// State in the rotating frame, `e^{-i(H−A)t} |u⟩`, computed directly.
    pub fn rotating_state(&self, t: f64) -> PureState {
        let generator = self.frame_generator.eigh();
        let mut c = self.initial_coefficients.clone();
        apply_phases(&mut c, &generator.values, t);
        PureState::new(&generator.vectors * c).expect("unitary image of a unit vector")
    }

    /// Maps a Schrödinger-picture state at time `t` to the rotating frame, `e^{iAt}|ψ⟩`.
    pub fn rotating_frame(&self, t: f64, state_at_t: &PureState) -> Result<PureState> {
        ensure_dim(self.dim(), state_at_t.dim())?;
        state_at_t.transformed(&self.coupling.unitary_exp(-t))
    }

    /// Fourth-order Runge-Kutta integration of `dψ/dt = −i H_t ψ` from `0` to `t`.
    pub fn propagate_numeric(&self, t: f64, step: f64) -> Result<PureState> {
        let psi = integrate_rk4(
            |s| self.hamiltonian_at(s).matrix().clone(),
            self.initial.amplitudes(),
            t,
            step,
        )?;
        PureState::new(psi)
    }
}

fn apply_phases(v: &mut CVector, eigenvalues: &[f64], t: f64) {
    for (c, &lambda) in v.iter_mut().zip(eigenvalues) {
        *c *= num_complex::Complex64::from_polar(1.0, -lambda * t);
    }
}

/// Classical RK4 for `dψ/dt = −i G(t) ψ` with a fixed step no larger than
/// `step`, renormalizing after every step.
pub fn integrate_rk4(generator: impl Fn(f64) -> CMatrix, psi0: &CVector, t: f64, step: f64) -> Result<CVector> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(QslError::DomainError(format!("step must be positive, got {step}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QslError::DomainError(format!(
            "integration time must be non-negative, got {t}"
        )));
    }
    let mut psi = psi0.clone();
    if t == 0.0 {
        return Ok(psi);
    }
    let steps = (t / step).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let minus_i = num_complex::Complex64::new(0.0, -1.0);
    let rhs = |g: &CMatrix, v: &CVector| (g * v) * minus_i;

    let mut g_start = generator(0.0);
    for k in 0..steps {
        let t0 = k as f64 * h;
        let g_mid = generator(t0 + 0.5 * h);
        let g_end = generator(if k + 1 == steps { t } else { t0 + h });

        let k1 = rhs(&g_start, &psi);
        let k2 = rhs(&g_mid, &(&psi + k1.scale(0.5 * h)));
        let k3 = rhs(&g_mid, &(&psi + k2.scale(0.5 * h)));
        let k4 = rhs(&g_end, &(&psi + k3.scale(h)));
        psi += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);

        let norm = psi.norm();
        let drift = (norm - 1.0).abs();
        if drift > MAX_STEP_DRIFT || !norm.is_finite() {
            return Err(QslError::StepTooLarge { drift });
        }
        psi.unscale_mut(norm);
        g_start = g_end;
    }
    Ok(psi)
}

/// Picture in which trajectory states are recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    pub frame: Frame,
    pub occupation_tol: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            frame: Frame::Lab,
            occupation_tol: DEFAULT_OCCUPATION_TOL,
        }
    }
}

/// Observables of one trajectory sample, all taken with respect to `H_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    /// Fidelity of the recorded state with the initial state.
    pub fidelity: f64,
    pub exp_energy: f64,
    pub energy_uncertainty: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub norm_energy: f64,
    pub dual_norm_energy: f64,
    pub occupied_count: usize,
    /// Weight on each energy level of `H_t`, in ascending energy order.
    pub occupations: Vec<f64>,
    pub bloch: Option<[f64; 3]>,
}

impl Sample {
    /// `sqrt(⟨ε_max − H⟩⟨H − ε_min⟩)`, the Bhatia-Davies upper bound on `ΔH`.
    pub fn bd_factor(&self) -> f64 {
        (self.dual_norm_energy.max(0.0) * self.norm_energy.max(0.0)).sqrt()
    }

    pub fn variance(&self) -> f64 {
        self.energy_uncertainty * self.energy_uncertainty
    }
}

/// Time-sampled evolution record.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub frame: Frame,
    pub level_energies: Vec<f64>,
    pub samples: Vec<Sample>,
    #[serde(skip)]
    pub states: Vec<PureState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.column(|s| s.t)
    }

    pub fn column(&self, f: impl Fn(&Sample) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Largest deviation of any level occupation from its value at `t = 0`.
    pub fn max_occupation_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        self.samples
            .iter()
            .flat_map(|s| s.occupations.iter().zip(&first.occupations).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest deviation of an observable from its value at `t = 0`.
    pub fn max_drift(&self, f: impl Fn(&Sample) -> f64) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        let reference = f(first);
        self.samples
            .iter()
            .map(|s| (f(s) - reference).abs())
            .fold(0.0, f64::max)
    }
}

/// Samples the exact evolution at `n + 1` uniform times on `[0, t_max]`.
pub fn sample_trajectory(sys: &RotatedHamiltonianSystem, t_max: f64, n: usize) -> Result<Trajectory> {
    sample_trajectory_with(sys, t_max, n, &SamplingOptions::default())
}

pub fn sample_trajectory_with(
    sys: &RotatedHamiltonianSystem,
    t_max: f64,
    n: usize,
    options: &SamplingOptions,
) -> Result<Trajectory> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(QslError::DomainError(format!("t_max must be positive, got {t_max}")));
    }
    if n < 2 {
        return Err(QslError::DomainError(format!("need at least 2 intervals, got {n}")));
    }
    let times: Vec<f64> = (0..=n)
        .map(|k| if k == n { t_max } else { t_max * k as f64 / n as f64 })
        .collect();
    sample_at(sys, &times, options)
}

/// Samples the exact evolution at the given times.
pub fn sample_at(sys: &RotatedHamiltonianSystem, times: &[f64], options: &SamplingOptions) -> Result<Trajectory> {
    let level_energies: Vec<f64> = sys.hamiltonian().eigh().levels.iter().map(|l| l.energy).collect();
    let mut samples = Vec::with_capacity(times.len());
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        let lab = sys.propagate_exact(t);
        // ⟨ψ_t|f(H_t)|ψ_t⟩ = ⟨e^{iAt}ψ_t|f(H)|e^{iAt}ψ_t⟩
        let rotated = sys.rotating_frame(t, &lab)?;
        let recorded = match options.frame {
            Frame::Lab => lab,
            Frame::Rotating => rotated.clone(),
        };
        samples.push(observe(sys, t, &rotated, &recorded, options.occupation_tol)?);
        states.push(recorded);
    }
    Ok(Trajectory {
        frame: options.frame,
        level_energies,
        samples,
        states,
    })
}

fn observe(
    sys: &RotatedHamiltonianSystem,
    t: f64,
    rotated: &PureState,
    recorded: &PureState,
    occupation_tol: f64,
) -> Result<Sample> {
    let h = sys.hamiltonian();
    let exp_energy = h.expectation(rotated)?;
    let energy_uncertainty = h.variance(rotated)?.sqrt();
    let extrema = h.occupied_extrema(rotated, occupation_tol)?;
    let occupations = h.level_occupations(rotated)?.into_iter().map(|o| o.weight).collect();
    let bloch = match sys.bloch_frame() {
        Some(frame) => Some(frame.coordinates(recorded)?),
        None => None,
    };
    Ok(Sample {
        t,
        fidelity: fidelity(recorded, sys.initial())?,
        exp_energy,
        energy_uncertainty,
        eps_min: extrema.eps_min,
        eps_max: extrema.eps_max,
        norm_energy: exp_energy - extrema.eps_min,
        dual_norm_energy: extrema.eps_max - exp_energy,
        occupied_count: extrema.occupied_count,
        occupations,
        bloch,
    })
}

/// `|⟨u|ψ_t⟩|`, the square root of the fidelity with the initial state.
pub(crate) fn overlap_amplitude(sys: &RotatedHamiltonianSystem, t: f64) -> f64 {
    inner(sys.initial().amplitudes(), sys.propagate_exact(t).amplitudes()).norm()
}
