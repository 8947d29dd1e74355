//! Independent reference computations for the test suite.
//!
//! Nothing here calls [`crate::linalg`] or [`crate::thermal`]: propagators
//! and Gibbs states come from truncated Taylor series with scaling and
//! squaring, and Hermitian eigenproblems from a cyclic Jacobi solver. Only
//! the operator and Hamiltonian builders are shared with the main path.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_dm, evolution_hamiltonian, ChainConfig};
use crate::matrix::ComplexMatrix;
use crate::operators::{site_operator, Axis};

/// Largest chain the brute-force path accepts.
pub const BRUTE_FORCE_MAX_SITES: usize = 4;
/// Combined budget of squarings and series terms.
const TAYLOR_BUDGET: usize = 64;
const JACOBI_MAX_SWEEPS: usize = 100;
const SERIES_TOL: f64 = 1e-17;

/// Primary-vs-oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub primary: Vec<f64>,
    pub oracle: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn compare(quantity: impl Into<String>, primary: Vec<f64>, oracle: Vec<f64>, tolerance: f64) -> Self {
        assert_eq!(primary.len(), oracle.len(), "primary and oracle lengths differ");
        let max_deviation = primary
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        OracleReport {
            quantity: quantity.into(),
            pass: max_deviation <= tolerance,
            primary,
            oracle,
            max_deviation,
            tolerance,
        }
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let tol = 1e-10 * h.max_abs().max(1.0);
    if !h.is_finite() || h.hermiticity_defect() > tol {
        return Err(Error::Validation(
            "oracle input is not a finite Hermitian matrix".into(),
        ));
    }
    Ok(())
}

/// `exp(A)` by Taylor series on `A / 2^s` followed by `s` squarings.
///
/// The series stops once the tail bound `2 ‖B‖^(k+1) / (k+1)!` for the
/// scaled matrix drops below `tol`.
pub fn taylor_expm(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::argument("tol", format!("must be positive, got {tol}")));
    }
    let norm = a.norm_inf();
    if !norm.is_finite() {
        return Err(Error::Numerical("taylor exponential of non-finite matrix".into()));
    }
    let mut squarings = 0;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    if squarings > TAYLOR_BUDGET {
        return Err(Error::Numerical(format!(
            "taylor exponential needs {squarings} squarings"
        )));
    }
    let b = a.scale_real(0.5_f64.powi(squarings as i32));
    let dim = a.dim();
    let mut sum = ComplexMatrix::identity(dim);
    let mut term = ComplexMatrix::identity(dim);
    let mut bound = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        term = (&term * &b).scale_real(1.0 / k as f64);
        sum += &term;
        bound *= scaled_norm / k as f64;
        if 2.0 * bound * scaled_norm / ((k + 1) as f64) < tol {
            break;
        }
        if squarings + k >= TAYLOR_BUDGET {
            return Err(Error::Numerical(format!(
                "taylor series did not reach tolerance {tol:e} within {TAYLOR_BUDGET} squarings+terms"
            )));
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// `exp(-iHt)` from [`taylor_expm`].
pub fn taylor_propagator(h: &ComplexMatrix, t: f64, tol: f64) -> Result<ComplexMatrix> {
    check_hermitian(h)?;
    taylor_expm(&h.scale(Complex64::new(0.0, -t)), tol)
}

/// First-order Trotter product `(Π_j exp(-i H_j t/m))^m`, factors in list order.
pub fn trotter_propagator(terms: &[ComplexMatrix], t: f64, m: usize) -> Result<ComplexMatrix> {
    if m < 1 {
        return Err(Error::argument("m", "need at least one Trotter step"));
    }
    let dim = terms
        .first()
        .ok_or_else(|| Error::argument("terms", "need at least one term"))?
        .dim();
    let dt = t / m as f64;
    let mut step = ComplexMatrix::identity(dim);
    for term in terms {
        step = step * taylor_propagator(term, dt, SERIES_TOL)?;
    }
    let mut total = ComplexMatrix::identity(dim);
    for _ in 0..m {
        total = &total * &step;
    }
    Ok(total)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix by cyclic
/// complex Jacobi rotations.
pub fn jacobi_eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(h)?;
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.as_nalgebra().norm().max(f64::MIN_POSITIVE);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > 1e-15 * scale {
        sweeps += 1;
        if sweeps > JACOBI_MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < f64::MIN_POSITIVE {
                    continue;
                }
                // phase-rotate so the (p, q) entry is real and positive, then
                // apply a real Jacobi rotation
                let phase = apq / mag;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = phase.conj() * -s;
                let g_qq = phase.conj() * c;

                for r in 0..n {
                    let (x, y) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = x * g_pp + y * g_qp;
                    a[(r, q)] = x * g_pq + y * g_qq;
                    let (x, y) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = x * g_pp + y * g_qp;
                    v[(r, q)] = x * g_pq + y * g_qq;
                }
                for col in 0..n {
                    let (x, y) = (a[(p, col)], a[(q, col)]);
                    a[(p, col)] = g_pp.conj() * x + g_qp.conj() * y;
                    a[(q, col)] = g_pq.conj() * x + g_qq.conj() * y;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

fn jacobi_psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = jacobi_eigh(m)?;
    let roots: Vec<f64> = values.iter().map(|l| l.max(0.0).sqrt()).collect();
    Ok(&vectors * ComplexMatrix::from_real_diagonal(&roots) * vectors.adjoint())
}

/// Normalized `exp(-H/T)` by power-series summation. `H` is first shifted by
/// its mean eigenvalue `Tr H / dim`, which cancels in the normalization.
pub fn series_gibbs_state(h: &ComplexMatrix, temperature: f64) -> Result<ComplexMatrix> {
    check_hermitian(h)?;
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::argument(
            "temperature",
            format!("must be positive, got {temperature}"),
        ));
    }
    let dim = h.dim();
    let mean = h.trace().re / dim as f64;
    let shifted = h - ComplexMatrix::identity(dim).scale_real(mean);
    let boltzmann = taylor_expm(&shifted.scale_real(-1.0 / temperature), SERIES_TOL)?;
    let z = boltzmann.trace().re;
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Numerical(format!("partition function {z} out of range")));
    }
    Ok(boltzmann.scale_real(1.0 / z).hermitian_part())
}

/// `(Tr √(√ρ σ √ρ))²` from Jacobi eigendecompositions only.
pub fn eigen_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let sqrt_rho = jacobi_psd_sqrt(rho)?;
    let inner = (&sqrt_rho * sigma * &sqrt_rho).hermitian_part();
    let (values, _) = jacobi_eigh(&inner)?;
    let root_trace: f64 = values.iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok(root_trace * root_trace)
}

/// End-to-end `F(t)` on a chain of at most [`BRUTE_FORCE_MAX_SITES`] spins.
pub fn brute_force_otoc(cfg: &ChainConfig, t: f64) -> Result<f64> {
    cfg.validate()?;
    if cfg.n > BRUTE_FORCE_MAX_SITES {
        return Err(Error::argument(
            "n",
            format!("brute force limited to n <= {BRUTE_FORCE_MAX_SITES}, got {}", cfg.n),
        ));
    }
    let rho = series_gibbs_state(&build_dm(cfg)?, cfg.temperature)?;
    let h = evolution_hamiltonian(cfg)?;
    let v = site_operator(Axis::X, 1, cfg.n)?;
    let w = site_operator(Axis::X, cfg.n, cfg.n)?;
    let forward = taylor_propagator(&h, t, SERIES_TOL)?;
    let backward = taylor_propagator(&h, -t, SERIES_TOL)?;
    let w_t = backward * &w * forward;

    let rho_a = &w_t * &v * &rho * v.adjoint() * w_t.adjoint();
    let rho_b = &v * &w_t * &rho * w_t.adjoint() * v.adjoint();
    let fid = eigen_fidelity(&rho_a, &rho_b)?;
    Ok(fid.clamp(0.0, 1.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::pauli;
    use std::f64::consts::PI;

    #[test]
    fn zero_generator_gives_identity() {
        let u = taylor_propagator(&ComplexMatrix::zeros(4), 3.0, 1e-15).unwrap();
        assert_eq!(u, ComplexMatrix::identity(4));
    }

    #[test]
    fn z_for_half_period_is_minus_identity() {
        let u = taylor_propagator(&pauli(Axis::Z), PI, 1e-16).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-13);
    }

    #[test]
    fn taylor_matches_scalar_exponential() {
        let a = ComplexMatrix::from_real_diagonal(&[-3.0, 0.0, 2.5]);
        let e = taylor_expm(&a, 1e-17).unwrap();
        for (i, x) in [-3.0_f64, 0.0, 2.5].iter().enumerate() {
            assert!((e[(i, i)].re - x.exp()).abs() <= 1e-13 * x.exp().max(1.0));
        }
    }

    #[test]
    fn commuting_terms_trotterize_exactly() {
        let a = pauli(Axis::Z).kron(&ComplexMatrix::identity(2));
        let b = ComplexMatrix::identity(2).kron(&pauli(Axis::Z)).scale_real(0.4);
        let exact = taylor_propagator(&(&a + &b), 1.3, 1e-16).unwrap();
        for m in [1, 2, 7] {
            let trotter = trotter_propagator(&[a.clone(), b.clone()], 1.3, m).unwrap();
            assert!(trotter.max_abs_diff(&exact) < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn single_term_single_step_is_plain_exponential() {
        let h = pauli(Axis::X).scale_real(0.8);
        let a = trotter_propagator(std::slice::from_ref(&h), 2.0, 1).unwrap();
        let b = taylor_propagator(&h, 2.0, SERIES_TOL).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn jacobi_recovers_two_site_dm_spectrum() {
        let cfg = ChainConfig {
            n: 2,
            d_strength: 1.0,
            ..ChainConfig::default()
        };
        let h = build_dm(&cfg).unwrap();
        let (values, vectors) = jacobi_eigh(&h).unwrap();
        let s2 = 2.0_f64.sqrt();
        for (got, want) in values.iter().zip([0.5 - s2, -0.5, -0.5, 0.5 + s2]) {
            assert!((got - want).abs() < 1e-12);
        }
        let rebuilt = &vectors * ComplexMatrix::from_real_diagonal(&values) * vectors.adjoint();
        assert!(rebuilt.max_abs_diff(&h) < 1e-12);
        assert!(vectors.unitarity_defect() < 1e-12);
    }

    #[test]
    fn series_gibbs_two_level() {
        let rho = series_gibbs_state(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0]), 1.0).unwrap();
        let p1 = (-1.0_f64).exp() / (1.0 + (-1.0_f64).exp());
        assert!((rho[(1, 1)].re - p1).abs() < 1e-14);
    }

    #[test]
    fn eigen_fidelity_closed_form() {
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        let zero = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!((eigen_fidelity(&mixed, &zero).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn brute_force_starts_at_one_and_rejects_large_chains() {
        let cfg = ChainConfig {
            n: 3,
            d_strength: 1.0,
            ..ChainConfig::default()
        };
        assert!((brute_force_otoc(&cfg, 0.0).unwrap() - 1.0).abs() < 1e-9);
        let big = ChainConfig { n: 5, ..cfg };
        assert!(brute_force_otoc(&big, 1.0).unwrap_err().is_argument());
    }

    #[test]
    fn report_pass_flag_follows_tolerance() {
        let ok = OracleReport::compare("x", vec![1.0, 2.0], vec![1.0, 2.0 + 1e-9], 1e-8);
        assert!(ok.pass);
        let bad = OracleReport::compare("x", vec![1.0], vec![1.1], 1e-8);
        assert!(!bad.pass);
        assert!((bad.max_deviation - 0.1).abs() < 1e-12);
    }
}
