//! Dense complex linear algebra for small Hermitian systems.
//!
//! Everything here is sized for dimensions up to a few dozen: matrices are
//! dense `nalgebra` values and the eigendecomposition of an operator is cached
//! on first use.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{ensure_dim, QslError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Entrywise tolerance of the Hermiticity check, relative to `max(1, max |entry|)`.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Default cutoff above which an energy level counts as occupied.
pub const DEFAULT_OCCUPATION_TOL: f64 = 1e-12;

/// Eigenvalues closer than `DEGENERACY_RTOL * (spectral width + 1)` form one level.
pub const DEGENERACY_RTOL: f64 = 1e-9;

// Components below this magnitude are skipped when fixing eigenvector phases.
const PHASE_PIVOT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A group of (numerically) equal eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub energy: f64,
    /// Columns of the eigenvector matrix spanning this eigenspace.
    pub columns: std::ops::Range<usize>,
}

/// Eigendecomposition of a Hermitian operator.
///
/// `values` are ascending; `vectors` holds the matching orthonormal
/// eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub levels: Vec<Level>,
}

impl Eigen {
    pub fn spectral_width(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }
}

/// Occupied spectral extremes of a state with respect to an operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupiedExtrema {
    pub eps_min: f64,
    pub eps_max: f64,
    pub occupied_count: usize,
}

/// Weight of a state on one energy level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelOccupation {
    pub energy: f64,
    pub weight: f64,
}

/// Dense Hermitian matrix with a lazily computed eigendecomposition.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMatrix,
    eig: OnceLock<Eigen>,
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl HermitianOperator {
    /// Validates Hermiticity and stores the exactly symmetrized matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QslError::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(QslError::DomainError("operator dimension must be positive".into()));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QslError::DomainError("operator has non-finite entries".into()));
        }
        let deviation = hermiticity_deviation(&matrix);
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        if deviation > HERMITICITY_TOL * scale {
            return Err(QslError::NonHermitian {
                max_deviation: deviation,
            });
        }
        let symmetric = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self::from_hermitian_unchecked(symmetric))
    }

    fn from_hermitian_unchecked(matrix: CMatrix) -> Self {
        Self {
            matrix,
            eig: OnceLock::new(),
        }
    }

    pub fn from_real_diagonal(diagonal: &[f64]) -> Result<Self> {
        let d = CVector::from_iterator(diagonal.len(), diagonal.iter().map(|&x| re(x)));
        Self::new(CMatrix::from_diagonal(&d))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_hermitian_unchecked(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|z| *z == ZERO)
    }

    /// Cached eigendecomposition (ascending, deterministic phases).
    pub fn eigh(&self) -> &Eigen {
        self.eig.get_or_init(|| decompose(&self.matrix))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigh().values
    }

    pub fn spectral_width(&self) -> f64 {
        self.eigh().spectral_width()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `e^{-i·self·t}`.
    pub fn unitary_exp(&self, t: f64) -> CMatrix {
        if t == 0.0 {
            return CMatrix::identity(self.dim(), self.dim());
        }
        let eig = self.eigh();
        let mut scaled = eig.vectors.clone();
        for (k, &lambda) in eig.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * t);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * eig.vectors.adjoint()
    }

    /// `self - other`.
    pub fn sub(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(Self::from_hermitian_unchecked(&self.matrix - &other.matrix))
    }

    pub fn scaled(&self, factor: f64) -> HermitianOperator {
        Self::from_hermitian_unchecked(self.matrix.scale(factor))
    }

    /// `v · self · v†` for a unitary `v`.
    pub fn conjugated_by(&self, v: &CMatrix) -> Result<HermitianOperator> {
        ensure_dim(self.dim(), v.nrows())?;
        ensure_dim(self.dim(), v.ncols())?;
        let m = v * &self.matrix * v.adjoint();
        Ok(Self::from_hermitian_unchecked((&m + m.adjoint()).scale(0.5)))
    }

    pub fn apply(&self, state: &PureState) -> Result<CVector> {
        ensure_dim(self.dim(), state.dim())?;
        Ok(&self.matrix * state.amplitudes())
    }

    /// `⟨s|op|s⟩`.
    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        let applied = self.apply(state)?;
        Ok(inner(state.amplitudes(), &applied).re)
    }

    /// `‖(op − ⟨op⟩)|s⟩‖²`, which is never negative.
    pub fn variance(&self, state: &PureState) -> Result<f64> {
        let mean = self.expectation(state)?;
        let applied = self.apply(state)?;
        let shifted = applied - state.amplitudes().map(|a| a * mean);
        Ok(shifted.norm_squared())
    }

    /// Weights of `state` on each energy level, with degenerate eigenspaces summed.
    pub fn level_occupations(&self, state: &PureState) -> Result<Vec<LevelOccupation>> {
        ensure_dim(self.dim(), state.dim())?;
        let eig = self.eigh();
        let coefficients = eig.vectors.adjoint() * state.amplitudes();
        Ok(eig
            .levels
            .iter()
            .map(|level| LevelOccupation {
                energy: level.energy,
                weight: level.columns.clone().map(|k| coefficients[k].norm_sqr()).sum(),
            })
            .collect())
    }

    /// Smallest and largest occupied energies and the number of occupied levels.
    pub fn occupied_extrema(&self, state: &PureState, tol: f64) -> Result<OccupiedExtrema> {
        if !(tol > 0.0) {
            return Err(QslError::DomainError(format!(
                "occupation tolerance must be positive, got {tol}"
            )));
        }
        let occupied: Vec<f64> = self
            .level_occupations(state)?
            .into_iter()
            .filter(|o| o.weight > tol)
            .map(|o| o.energy)
            .collect();
        match (occupied.first(), occupied.last()) {
            (Some(&eps_min), Some(&eps_max)) => Ok(OccupiedExtrema {
                eps_min,
                eps_max,
                occupied_count: occupied.len(),
            }),
            _ => Err(QslError::NoOccupation { tol }),
        }
    }
}

/// Eigendecomposition of an arbitrary square matrix, after a Hermiticity check.
pub fn eigh(matrix: &CMatrix) -> Result<Eigen> {
    let op = HermitianOperator::new(matrix.clone())?;
    Ok(op.eigh().clone())
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn decompose(matrix: &CMatrix) -> Eigen {
    let n = matrix.nrows();
    let raw = matrix.clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw.eigenvalues[a].total_cmp(&raw.eigenvalues[b]));

    let mut values: Vec<f64> = order.iter().map(|&k| raw.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    let mut pivots = vec![0usize; n];
    for (dst, &src) in order.iter().enumerate() {
        let mut column = raw.eigenvectors.column(src).into_owned();
        pivots[dst] = fix_phase(&mut column);
        vectors.set_column(dst, &column);
    }

    let width = values.last().copied().unwrap_or(0.0) - values.first().copied().unwrap_or(0.0);
    let gap = DEGENERACY_RTOL * (width + 1.0);
    let mut levels = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || values[k] - values[k - 1] > gap {
            levels.push(start..k);
            start = k;
        }
    }

    // Inside a degenerate group, order columns by the position of their phase pivot.
    for range in &levels {
        if range.len() > 1 {
            let mut group: Vec<usize> = range.clone().collect();
            group.sort_by_key(|&k| pivots[k]);
            let columns: Vec<CVector> = group.iter().map(|&k| vectors.column(k).into_owned()).collect();
            let group_values: Vec<f64> = group.iter().map(|&k| values[k]).collect();
            for (offset, (column, value)) in columns.iter().zip(group_values).enumerate() {
                vectors.set_column(range.start + offset, column);
                values[range.start + offset] = value;
            }
        }
    }

    let levels = levels
        .into_iter()
        .map(|columns| Level {
            energy: values[columns.clone()].iter().sum::<f64>() / columns.len() as f64,
            columns,
        })
        .collect();

    Eigen {
        values,
        vectors,
        levels,
    }
}

// Rotates the column so its first non-negligible entry is real and positive.
fn fix_phase(column: &mut CVector) -> usize {
    let pivot = column.iter().position(|z| z.norm() > PHASE_PIVOT_TOL).unwrap_or(0);
    let z = column[pivot];
    if z.norm() > 0.0 {
        let phase = z.conj() / z.norm();
        column.iter_mut().for_each(|c| *c *= phase);
        column[pivot] = re(column[pivot].norm());
    }
    pivot
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Normalizes `amplitudes`; fails on a zero or non-finite vector.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(QslError::InvalidState("empty amplitude vector".into()));
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(QslError::InvalidState(format!(
                "cannot normalize vector of norm {norm}"
            )));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&x| re(x)),
        ))
    }

    pub fn from_complex(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(QslError::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut v = CVector::zeros(dim);
        v[index] = re(1.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Rank-one density operator `|u⟩⟨u|`.
    pub fn density(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn with_global_phase(&self, phase: f64) -> PureState {
        Self {
            amplitudes: self.amplitudes.map(|a| a * Complex64::from_polar(1.0, phase)),
        }
    }

    /// Unit vector orthogonal to `self`: Gram-Schmidt applied to the first
    /// standard basis vector that is not parallel to `self`.
    pub fn perpendicular(&self) -> Result<PureState> {
        let n = self.dim();
        if n < 2 {
            return Err(QslError::DomainError("no perpendicular state in dimension 1".into()));
        }
        for k in 0..n {
            let mut candidate = CVector::zeros(n);
            candidate[k] = re(1.0);
            // two passes keep the result orthogonal to rounding level
            for _ in 0..2 {
                let overlap = inner(&self.amplitudes, &candidate);
                candidate -= self.amplitudes.map(|a| a * overlap);
            }
            if candidate.norm() > 1e-6 {
                return Self::new(candidate);
            }
        }
        unreachable!("a unit vector cannot be parallel to every basis vector")
    }

    pub fn transformed(&self, unitary: &CMatrix) -> Result<PureState> {
        ensure_dim(unitary.ncols(), self.dim())?;
        Self::new(unitary * &self.amplitudes)
    }
}

/// `Σ conj(a_i) b_i`, summed in index order.
pub(crate) fn inner(a: &CVector, b: &CVector) -> Complex64 {
    let mut acc_re = 0.0;
    let mut acc_im = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc_re += x.re * y.re + x.im * y.im;
        acc_im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(acc_re, acc_im)
}

/// `|⟨u₁|u₂⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(s1: &PureState, s2: &PureState) -> Result<f64> {
    Ok(s1.inner(s2)?.norm_sqr().clamp(0.0, 1.0))
}

/// Frobenius norm of `ab − ba`.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    ensure_dim(a.nrows(), b.nrows())?;
    ensure_dim(a.ncols(), b.ncols())?;
    ensure_dim(a.nrows(), a.ncols())?;
    Ok((a * b - b * a).norm())
}

/// Frobenius norm of `ab + ba − a`; zero when `a` is a geodesic generator for the projector `b`.
pub fn anticommutator_residual(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    ensure_dim(a.nrows(), b.nrows())?;
    ensure_dim(a.ncols(), b.ncols())?;
    Ok((a * b + b * a - a).norm())
}

/// Trace distance between two pure states, `sqrt(1 − F)`.
///
/// Evaluated as the norm of the component of `s1` orthogonal to `s2`, which
/// equals `sqrt(1 − F)` but resolves distances far below `sqrt(ε)`.
pub fn trace_distance(s1: &PureState, s2: &PureState) -> Result<f64> {
    let overlap = s2.inner(s1)?;
    let residual = s1.amplitudes() - s2.amplitudes() * overlap;
    Ok(residual.norm().min(1.0))
}

pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
