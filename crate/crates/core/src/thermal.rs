//! Density matrices and the Gibbs thermal state `exp(-H/T) / Tr exp(-H/T)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, EigenDecomposition};
use crate::matrix::ComplexMatrix;

/// Tolerance on Hermiticity, unit trace, and negative eigenvalues.
pub const DENSITY_TOL: f64 = 1e-10;

/// A Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates all three density-matrix invariants.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        check_hermitian_unit_trace(&mat)?;
        let lowest = eigvalsh(&mat)?[0];
        if lowest < -DENSITY_TOL {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {lowest:e}"
            )));
        }
        Ok(DensityMatrix { mat })
    }

    /// `U ρ U†` for a unitary `U`. The spectrum is inherited from `self`, so
    /// only Hermiticity and trace are re-checked.
    pub(crate) fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let mat = u * &self.mat * u.adjoint();
        check_hermitian_unit_trace(&mat)?;
        Ok(DensityMatrix { mat })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        // Tr(ρ ρ) = Σ_ij |ρ_ij|² for Hermitian ρ
        self.mat.as_nalgebra().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.mat)
    }

    /// `Tr(ρ A)`
    pub fn expectation(&self, observable: &ComplexMatrix) -> Complex64 {
        (&self.mat * observable).trace()
    }
}

fn check_hermitian_unit_trace(mat: &ComplexMatrix) -> Result<()> {
    if !mat.is_finite() {
        return Err(Error::Validation("density matrix has non-finite entries".into()));
    }
    let defect = mat.hermiticity_defect();
    if defect > DENSITY_TOL {
        return Err(Error::Validation(format!(
            "density matrix is not Hermitian: max |ρ - ρ†| = {defect:e}"
        )));
    }
    let trace = mat.trace();
    if (trace - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(Error::Validation(format!(
            "density matrix trace is {trace}, expected 1"
        )));
    }
    Ok(())
}

/// Gibbs state of `h` at temperature `t` (`k_B = 1`).
pub fn gibbs_state(h: &ComplexMatrix, temperature: f64) -> Result<DensityMatrix> {
    check_temperature(temperature)?;
    gibbs_from_eigen(&eigh(h)?, temperature)
}

/// Gibbs state from a precomputed eigendecomposition.
///
/// Weights are `exp(-(λ - λ_min)/T)`, so the ground manifold always carries
/// weight 1 before normalization and nothing overflows. At very low `T`
/// excited weights underflow to exactly zero and the result is the
/// (equal-weight) projector onto the ground manifold.
pub fn gibbs_from_eigen(eig: &EigenDecomposition, temperature: f64) -> Result<DensityMatrix> {
    check_temperature(temperature)?;
    let ground = eig.min_eigenvalue();
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&lambda| (-(lambda - ground) / temperature).exp())
        .collect();
    let partition: f64 = weights.iter().sum();
    let mat = eig.eigenvectors.as_nalgebra();
    let mut scaled = mat.clone();
    for (j, w) in weights.iter().enumerate() {
        let p = Complex64::new(w / partition, 0.0);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= p);
    }
    let rho = ComplexMatrix::from_nalgebra(scaled * mat.adjoint()).hermitian_part();
    check_hermitian_unit_trace(&rho)?;
    Ok(DensityMatrix { mat: rho })
}

fn check_temperature(temperature: f64) -> Result<()> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::argument(
            "temperature",
            format!("temperature must be positive and finite, got {temperature}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_dm, ChainConfig};
    use crate::operators::{pauli, Axis};

    #[test]
    fn two_level_closed_form() {
        let h = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let rho = gibbs_state(&h, 1.0).unwrap();
        let p1 = (-1.0_f64).exp() / (1.0 + (-1.0_f64).exp());
        assert!((rho.matrix()[(0, 0)].re - (1.0 - p1)).abs() < 1e-14);
        assert!((rho.matrix()[(1, 1)].re - p1).abs() < 1e-14);
        assert!((rho.matrix()[(0, 0)].re - 0.7311).abs() < 1e-4);
        assert!((rho.matrix()[(1, 1)].re - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn infinite_temperature_is_maximally_mixed() {
        let cfg = ChainConfig {
            n: 3,
            d_strength: 1.0,
            ..ChainConfig::default()
        };
        let rho = gibbs_state(&build_dm(&cfg).unwrap(), 1e9).unwrap();
        assert!(rho.matrix().max_abs_diff(DensityMatrix::maximally_mixed(8).matrix()) < 1e-6);
    }

    #[test]
    fn zero_temperature_limit_projects_on_ground_state() {
        let h = pauli(Axis::X);
        let rho = gibbs_state(&h, 1e-6).unwrap();
        // ground state (|0> - |1>)/√2
        let expected = ComplexMatrix::from_real_diagonal(&[0.5, 0.5])
            - ComplexMatrix::from_fn(2, |r, c| Complex64::new(if r != c { 0.5 } else { 0.0 }, 0.0));
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_ground_manifold_gets_equal_weights() {
        let h = ComplexMatrix::from_real_diagonal(&[-1.0, -1.0, 3.0]);
        let rho = gibbs_state(&h, 1e-5).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.5, 0.5, 0.0]);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn rejects_non_positive_temperature() {
        let h = pauli(Axis::Z);
        assert!(gibbs_state(&h, 0.0).unwrap_err().is_argument());
        assert!(gibbs_state(&h, -1.0).unwrap_err().is_argument());
        assert!(gibbs_state(&h, f64::NAN).unwrap_err().is_argument());
    }

    #[test]
    fn gibbs_state_commutes_with_hamiltonian() {
        let cfg = ChainConfig {
            n: 4,
            d_strength: 0.6,
            ..ChainConfig::default()
        };
        let h = build_dm(&cfg).unwrap();
        for t in [0.05, 0.3, 2.0] {
            let rho = gibbs_state(&h, t).unwrap();
            assert!(rho.matrix().commutator(&h).max_abs() <= 1e-9);
            assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn density_matrix_validation() {
        let not_unit = ComplexMatrix::identity(2);
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());
        let ok = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        assert!((DensityMatrix::new(ok).unwrap().purity() - 0.625).abs() < 1e-15);
    }
}
