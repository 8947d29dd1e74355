//! Hermitian numerics: eigendecomposition, propagators, PSD square roots and
//! Uhlmann fidelity.

use nalgebra::{SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::thermal::DensityMatrix;

/// Allowed `max |H - H†|`, scaled by `max(1, max |H|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues down to `-PSD_CLAMP_TOL * ||M||` are treated as round-off and clamped to zero.
pub const PSD_CLAMP_TOL: f64 = 1e-10;
/// Largest fidelity overshoot above 1 that is silently clamped.
pub const FIDELITY_OVERSHOOT_TOL: f64 = 1e-9;

/// Multiple of `dim * ε * ||M||` below which [`psd_sqrt`] zeroes eigenvalues.
const PSD_NOISE_FLOOR: f64 = 16.0;
const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 10_000;

/// Spectral decomposition `H = V diag(λ) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(f(λ)) V†`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = self.eigenvectors.as_nalgebra();
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        ComplexMatrix::from_nalgebra(scaled * v.adjoint())
    }

    /// `exp(-iHt)` with ħ = 1.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.map_spectrum(|lambda| Complex64::from_polar(1.0, -lambda * t))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|lambda| Complex64::new(lambda, 0.0))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest eigenvalue modulus (the spectral norm of a Hermitian matrix).
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()))
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_finite() {
        return Err(Error::Validation("matrix has non-finite entries".into()));
    }
    let defect = h.hermiticity_defect();
    let tol = HERMITIAN_TOL * h.max_abs().max(1.0);
    if defect > tol {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian: max |H - H†| = {defect:e} exceeds {tol:e}"
        )));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(H + H†)/2` before decomposing, after
/// checking that the anti-Hermitian part is within [`HERMITIAN_TOL`].
pub fn eigh(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_hermitian(h)?;
    let dim = h.dim();
    let sym = h.hermitian_part().into_nalgebra();
    let eig = SymmetricEigen::try_new(sym, EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
        Error::Numerical(format!(
            "Hermitian eigensolver did not converge within {EIGEN_MAX_ITER} iterations (dim {dim})"
        ))
    })?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(dim, |r, c| eig.eigenvectors[(r, order[c])]);
    if eigenvalues.iter().any(|l| !l.is_finite()) || !vectors.is_finite() {
        return Err(Error::Numerical("eigensolver produced non-finite output".into()));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eigh(h)?.eigenvalues)
}

/// `U(t) = exp(-iHt)` through the eigendecomposition of `H`.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::argument("t", format!("time must be finite, got {t}")));
    }
    Ok(eigh(h)?.propagator(t))
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues below `16 * dim * ε * ||M||` are round-off from building `M`
/// and map to zero; their square roots would otherwise inject `O(√ε)` noise.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(m)?;
    let floor = -PSD_CLAMP_TOL * eig.spectral_norm();
    let lowest = eig.min_eigenvalue();
    if lowest < floor {
        return Err(Error::Validation(format!(
            "matrix is not positive semidefinite: eigenvalue {lowest:e} below {floor:e}"
        )));
    }
    let noise = PSD_NOISE_FLOOR * m.dim() as f64 * f64::EPSILON * eig.spectral_norm();
    Ok(eig.map_spectrum(|lambda| {
        let root = if lambda > noise { lambda.sqrt() } else { 0.0 };
        Complex64::new(root, 0.0)
    }))
}

/// Fidelity together with the anti-Hermitian residue of its inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityValue {
    /// Squared Uhlmann fidelity, clamped to `[0, 1]`.
    pub value: f64,
    /// `max |ρ - ρ†| / 2` over both inputs: the imaginary part a direct
    /// evaluation of the trace would pick up and that is discarded.
    pub imag_residue: f64,
}

/// Squared (Jozsa) Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(uhlmann_fidelity_detailed(rho, sigma)?.value)
}

/// As [`uhlmann_fidelity`], also reporting the discarded imaginary residue.
///
/// `Tr √(√ρ σ √ρ)` equals the trace norm of `√ρ √σ`, which is evaluated as a
/// sum of singular values. Unlike taking square roots of the eigenvalues of
/// `√ρ σ √ρ`, this keeps round-off in the null space of rank-deficient
/// (low-temperature) states at machine precision.
pub fn uhlmann_fidelity_detailed(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<FidelityValue> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Validation(format!(
            "dimension mismatch: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let imag_residue = 0.5
        * rho
            .matrix()
            .hermiticity_defect()
            .max(sigma.matrix().hermiticity_defect());
    let sqrt_rho = psd_sqrt(rho.matrix())?;
    let sqrt_sigma = psd_sqrt(sigma.matrix())?;
    let product = (sqrt_rho * sqrt_sigma).into_nalgebra();
    let trace_norm: f64 = SVD::try_new_unordered(product, false, false, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical("singular value decomposition did not converge".into()))?
        .singular_values
        .iter()
        .sum();
    let raw = trace_norm * trace_norm;
    if !raw.is_finite() || raw > 1.0 + FIDELITY_OVERSHOOT_TOL {
        return Err(Error::Numerical(format!(
            "fidelity {raw} exceeds 1 by more than {FIDELITY_OVERSHOOT_TOL:e}"
        )));
    }
    Ok(FidelityValue {
        value: raw.clamp(0.0, 1.0),
        imag_residue,
    })
}
