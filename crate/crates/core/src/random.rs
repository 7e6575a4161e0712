//! Seeded random operators and states for sweeps and property tests.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector, HermitianOperator, PureState};
use num_complex::Complex64;

/// Deterministic generator for stream `stream` of `seed`.
pub fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Gaussian (GUE-like) Hermitian matrix rescaled to spectral radius `radius`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> HermitianOperator {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let op = HermitianOperator::new((&g + g.adjoint()).scale(0.5)).expect("symmetrized matrix is Hermitian");
    let current = op.spectral_radius();
    if current > 0.0 {
        op.scaled(radius / current)
    } else {
        op
    }
}

/// Haar-random pure state.
pub fn state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let v = CVector::from_fn(dim, |_, _| gaussian_complex(rng));
        if let Ok(s) = PureState::new(v) {
            return s;
        }
    }
}

/// Random real spectrum in `[−radius, radius]` on a random eigenbasis.
pub fn with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> HermitianOperator {
    let dim = spectrum.len();
    let basis = hermitian(rng, dim, 1.0).eigh().vectors.clone();
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        dim,
        spectrum.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    HermitianOperator::new(&basis * d * basis.adjoint()).expect("unitary conjugate of a real diagonal")
}
