//! First time the fidelity with the initial state reaches a target value.
//!
//! The search works on the overlap amplitude `a(t) = |⟨u|ψ_t⟩| = √δ(t)`
//! rather than on the fidelity itself. A transversal crossing of `√δ` is
//! refined by bisection. A tangential touch (the typical case for `δ = 0`,
//! where `a` has a kink at its zero) is refined by golden-section
//! minimization of `a`, which locates a kink to machine precision.

use crate::error::{QslError, Result};
use crate::evolution::{overlap_amplitude, RotatedHamiltonianSystem};
use crate::scalar::{bisect, golden_section_minimize};

use super::check_fidelity;

/// A local minimum of the fidelity counts as reaching `δ` when it is within
/// this distance of `δ`.
pub const TOUCH_TOL: f64 = 1e-10;

const MIN_COARSE_SAMPLES: usize = 1024;
const MAX_COARSE_SAMPLES: usize = 4_000_000;
const SAMPLES_PER_RADIAN: f64 = 8.0;

/// Coarse grid size used by [`first_passage`]: about eight samples per
/// radian of the fastest phase in the evolution.
pub fn default_coarse_samples(sys: &RotatedHamiltonianSystem, t_max: f64) -> usize {
    let omega = sys.coupling().spectral_width() + sys.frame_generator().spectral_width();
    let wanted = (SAMPLES_PER_RADIAN * omega * t_max).ceil();
    if wanted.is_finite() {
        (wanted as usize).clamp(MIN_COARSE_SAMPLES, MAX_COARSE_SAMPLES)
    } else {
        MAX_COARSE_SAMPLES
    }
}

/// Smallest `t ∈ [0, t_max]` at which `fidelity(ρ_t, ρ_0) = delta`.
pub fn first_passage(sys: &RotatedHamiltonianSystem, delta: f64, t_max: f64) -> Result<f64> {
    first_passage_with(sys, delta, t_max, default_coarse_samples(sys, t_max))
}

pub fn first_passage_with(sys: &RotatedHamiltonianSystem, delta: f64, t_max: f64, coarse: usize) -> Result<f64> {
    check_fidelity(delta)?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(QslError::DomainError(format!("t_max must be positive, got {t_max}")));
    }
    if delta == 1.0 {
        return Ok(0.0);
    }
    let coarse = coarse.max(2);
    let target = delta.sqrt();
    let amplitude = |t: f64| overlap_amplitude(sys, t);
    let time = |k: usize| {
        if k == coarse {
            t_max
        } else {
            t_max * k as f64 / coarse as f64
        }
    };

    let mut prev2: Option<(f64, f64)> = None;
    let mut prev = (0.0, amplitude(0.0));
    if prev.1 <= target {
        return Ok(0.0);
    }

    for k in 1..=coarse {
        let t = time(k);
        let a = amplitude(t);

        // a local minimum at `prev` that may dip to the target between samples
        if let Some((t_before, a_before)) = prev2 {
            if prev.1 <= a_before && prev.1 <= a && (prev.1 < a_before || prev.1 < a) {
                if let Some(found) = refine_touch(&amplitude, t_before, t, target, delta) {
                    return Ok(found);
                }
            }
        }

        if a <= target {
            return Ok(bisect(|s| amplitude(s) > target, prev.0, t));
        }

        prev2 = Some(prev);
        prev = (t, a);
    }

    Err(QslError::NotReached { delta, t_max })
}

fn refine_touch(amplitude: &impl Fn(f64) -> f64, lo: f64, hi: f64, target: f64, delta: f64) -> Option<f64> {
    let (t_min, a_min) = golden_section_minimize(amplitude, lo, hi, 4.0 * f64::EPSILON * hi.abs());
    if a_min < target {
        // the dip crosses the target: take the first crossing
        return Some(bisect(|s| amplitude(s) > target, lo, t_min));
    }
    if a_min * a_min - delta <= TOUCH_TOL {
        return Some(t_min);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{HermitianOperator, PureState};

    fn equal_superposition(gap: f64) -> RotatedHamiltonianSystem {
        let h = HermitianOperator::from_real_diagonal(&[0.0, gap]).unwrap();
        RotatedHamiltonianSystem::isolated(h, PureState::from_real(&[1.0, 1.0]).unwrap()).unwrap()
    }

    #[test]
    fn unit_fidelity_is_reached_immediately() {
        assert_eq!(first_passage(&equal_superposition(1.0), 1.0, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn orthogonalization_time_of_two_level_system() {
        // fidelity cos²(t/2): first zero at π
        let t = first_passage(&equal_superposition(1.0), 0.0, 10.0).unwrap();
        assert!((t - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn transversal_crossing() {
        // cos²(t/2) = 1/4 at t = 2π/3
        let t = first_passage(&equal_superposition(1.0), 0.25, 10.0).unwrap();
        assert!((t - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_fidelity_is_reported() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]).unwrap();
        let sys = RotatedHamiltonianSystem::isolated(h, PureState::from_real(&[2.0, 1.0]).unwrap()).unwrap();
        // fidelity never drops below (0.8 − 0.2)² = 0.36
        assert!(matches!(
            first_passage(&sys, 0.2, 20.0),
            Err(QslError::NotReached { .. })
        ));
        assert!(first_passage(&sys, 0.4, 20.0).is_ok());
    }

    #[test]
    fn too_short_window_is_not_reached() {
        assert!(matches!(
            first_passage(&equal_superposition(1.0), 0.0, 3.0),
            Err(QslError::NotReached { .. })
        ));
        assert!(matches!(
            first_passage(&equal_superposition(1.0), 0.0, 0.0),
            Err(QslError::DomainError(_))
        ));
    }
}
