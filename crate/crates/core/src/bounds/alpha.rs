//! The Margolus-Levitin numerator
//! `α(δ) = min_{z² ≤ δ} ((1+z)/2)·arccos((2δ−1−z²)/(1−z²))`.

use std::f64::consts::FRAC_PI_2;

use crate::error::Result;
use crate::scalar::golden_section_minimize;

use super::check_fidelity;

/// Points in the bracketing scan that precedes golden-section refinement.
pub const ALPHA_BRACKET_POINTS: usize = 2048;

/// Bracket width at which golden-section refinement stops.
pub const ALPHA_REFINE_WIDTH: f64 = 1e-12;

/// Location and value of the minimum defining `α(δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMinimum {
    pub z: f64,
    pub value: f64,
}

/// Objective of the α minimization at `z ∈ [−√δ, √δ]`.
///
/// Uses `arccos(1 − 2r) = 2·arccos√(1 − r)` with
/// `r = (1−δ)/(1−z²)`, so the arccos argument `(2δ−1−z²)/(1−z²)` is never
/// formed. `1 − r = (√δ − |z|)(√δ + |z|)/(1 − z²)` keeps full relative
/// accuracy at the endpoints `z = ±√δ`, where the direct form loses half its
/// digits to the square-root singularity of arccos at `−1`. `1 − r` is clamped
/// to `[0, 1]`; at `z² = 1` (only reachable for `δ = 1`) the objective is `0`.
pub fn alpha_objective(delta: f64, z: f64) -> f64 {
    let denominator = (1.0 - z) * (1.0 + z);
    if denominator <= 0.0 {
        return 0.0;
    }
    let s = delta.sqrt();
    let a = z.abs();
    let q = ((s - a) * (s + a) / denominator).clamp(0.0, 1.0);
    (1.0 + z) * q.sqrt().acos()
}

/// Objective at the endpoint `z = −√δ`, which equals `(1 − √δ)·π/2`.
pub fn alpha_endpoint(delta: f64) -> f64 {
    (1.0 - delta.sqrt()) * FRAC_PI_2
}

/// `α(δ)` for `δ ∈ [0, 1]`.
pub fn alpha(delta: f64) -> Result<f64> {
    Ok(alpha_minimum(delta)?.value)
}

pub fn alpha_minimum(delta: f64) -> Result<AlphaMinimum> {
    check_fidelity(delta)?;
    if delta == 0.0 {
        return Ok(AlphaMinimum {
            z: 0.0,
            value: FRAC_PI_2,
        });
    }
    if delta == 1.0 {
        return Ok(AlphaMinimum { z: 0.0, value: 0.0 });
    }

    let s = delta.sqrt();
    let f = |z: f64| alpha_objective(delta, z);
    let last = ALPHA_BRACKET_POINTS - 1;
    let grid = |i: usize| -s + 2.0 * s * i as f64 / last as f64;

    let (best_index, best_value) = (0..=last)
        .map(|i| (i, f(grid(i))))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });

    let lo = grid(best_index.saturating_sub(1));
    let hi = grid((best_index + 1).min(last));
    let (z_refined, v_refined) = golden_section_minimize(f, lo, hi, ALPHA_REFINE_WIDTH);

    let candidates = [
        (z_refined, v_refined),
        (grid(best_index), best_value),
        (-s, alpha_endpoint(delta)),
        (s, f(s)),
    ];
    let (z, value) = candidates
        .into_iter()
        .fold((0.0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
    Ok(AlphaMinimum { z, value })
}
