//! Fidelity-based out-of-time-order correlator.
//!
//! With butterfly operators `V = σx_1` and `W = σx_n`, the evolved operator
//! `W_t = U(-t) W U(t)` and the two differently ordered conjugations
//!
//! ```text
//! ρ_a = W_t V ρ V† W_t†      ρ_b = V W_t ρ W_t† V†
//! ```
//!
//! the correlator is `F(t) = √Re 𝓕(ρ_a, ρ_b)`. It equals 1 while `W_t` and
//! `V` commute and decays as `W_t` spreads onto site 1.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_dm, evolution_hamiltonian, ChainConfig};
use crate::linalg::{eigh, uhlmann_fidelity_detailed, unitary_propagator, EigenDecomposition};
use crate::matrix::ComplexMatrix;
use crate::operators::{site_operator, Axis};
use crate::thermal::{gibbs_from_eigen, gibbs_state, DensityMatrix};

/// Tag written next to every series identifying the fidelity convention.
pub const FIDELITY_CONVENTION: &str = "uhlmann-squared";
/// Conjugators further than this from unitary are rejected.
pub const UNITARITY_TOL: f64 = 1e-9;
/// Imaginary residues above this are reported as suspicious.
pub const IMAG_RESIDUE_FLAG: f64 = 1e-9;
pub const DEFAULT_THRESHOLD: f64 = 0.9;

/// Uniform grid of `steps` points from `t_start` to `t_end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !t_start.is_finite() || t_start < 0.0 {
            return Err(Error::argument(
                "t_start",
                format!("must be finite and >= 0, got {t_start}"),
            ));
        }
        if !t_end.is_finite() || t_end <= t_start {
            return Err(Error::argument(
                "t_end",
                format!("must be finite and greater than t_start = {t_start}, got {t_end}"),
            ));
        }
        if steps < 2 {
            return Err(Error::argument(
                "steps",
                format!("need at least 2 grid points, got {steps}"),
            ));
        }
        Ok(TimeGrid { t_start, t_end, steps })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn points(&self) -> Vec<f64> {
        let last = self.steps - 1;
        let span = self.t_end - self.t_start;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.t_end
                } else {
                    self.t_start + span * (i as f64) / (last as f64)
                }
            })
            .collect()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_start: 0.0,
            t_end: 10.0,
            steps: 201,
        }
    }
}

/// `F(t)` sampled on a grid for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct OtocSeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub config: ChainConfig,
    pub convention_tag: &'static str,
    /// Largest imaginary residue discarded by `Re[·]` over the grid.
    pub max_imag_residue: f64,
}

impl OtocSeries {
    pub fn times(&self) -> Vec<f64> {
        self.grid.points()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn imag_residue_flagged(&self) -> bool {
        self.max_imag_residue > IMAG_RESIDUE_FLAG
    }
}

/// `(V, W) = (σx_1, σx_n)`.
pub fn butterfly_operators(n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n < 2 {
        return Err(Error::argument(
            "n",
            format!("butterfly operators need n >= 2 distinct sites, got {n}"),
        ));
    }
    Ok((site_operator(Axis::X, 1, n)?, site_operator(Axis::X, n, n)?))
}

/// `W_t = U(-t) W U(t)` with `U(t) = exp(-iHt)`.
pub fn heisenberg_evolve(w: &ComplexMatrix, h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let u = unitary_propagator(h, t)?;
    Ok(u.adjoint() * w * u)
}

fn evolve_in_eigenbasis(w: &ComplexMatrix, eig: &EigenDecomposition, t: f64) -> ComplexMatrix {
    let u = eig.propagator(t);
    u.adjoint() * w * u
}

/// `(ρ_a, ρ_b) = (W_t V ρ V† W_t†, V W_t ρ W_t† V†)`.
pub fn conjugated_pair(
    rho: &DensityMatrix,
    v: &ComplexMatrix,
    w_t: &ComplexMatrix,
) -> Result<(DensityMatrix, DensityMatrix)> {
    for (name, op) in [("V", v), ("W_t", w_t)] {
        let defect = op.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(Error::Validation(format!(
                "{name} is not unitary: max |U†U - I| = {defect:e}"
            )));
        }
    }
    let rho_a = rho.conjugate_by(&(w_t * v))?;
    let rho_b = rho.conjugate_by(&(v * w_t))?;
    Ok((rho_a, rho_b))
}

#[derive(Debug, Clone, Copy)]
struct OtocPoint {
    value: f64,
    imag_residue: f64,
}

fn evaluate(rho: &DensityMatrix, v: &ComplexMatrix, w_t: &ComplexMatrix) -> Result<OtocPoint> {
    let (rho_a, rho_b) = conjugated_pair(rho, v, w_t)?;
    let fid = uhlmann_fidelity_detailed(&rho_a, &rho_b)?;
    Ok(OtocPoint {
        value: fid.value.sqrt(),
        imag_residue: fid.imag_residue,
    })
}

/// Thermal initial state of the DM chain for `cfg`.
pub fn initial_state(cfg: &ChainConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    gibbs_state(&build_dm(cfg)?, cfg.temperature)
}

/// `F(t)` at a single time, built from scratch.
pub fn otoc_f(cfg: &ChainConfig, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::argument("t", format!("time must be finite, got {t}")));
    }
    let rho = initial_state(cfg)?;
    let h = evolution_hamiltonian(cfg)?;
    let (v, w) = butterfly_operators(cfg.n)?;
    let w_t = heisenberg_evolve(&w, &h, t)?;
    Ok(evaluate(&rho, &v, &w_t)?.value)
}

/// `F(t)` over every point of `grid`.
///
/// The initial state and the eigendecomposition of the evolution
/// Hamiltonian are computed once; grid points are then evaluated in
/// parallel. Any failing point fails the whole series.
pub fn otoc_series(cfg: &ChainConfig, grid: &TimeGrid) -> Result<OtocSeries> {
    cfg.validate()?;
    let rho = gibbs_from_eigen(&eigh(&build_dm(cfg)?)?, cfg.temperature)?;
    let evolution = eigh(&evolution_hamiltonian(cfg)?)?;
    let (v, w) = butterfly_operators(cfg.n)?;

    let points = grid
        .points()
        .into_par_iter()
        .map(|t| evaluate(&rho, &v, &evolve_in_eigenbasis(&w, &evolution, t)))
        .collect::<Result<Vec<_>>>()?;

    Ok(OtocSeries {
        grid: *grid,
        values: points.iter().map(|p| p.value).collect(),
        config: *cfg,
        convention_tag: FIDELITY_CONVENTION,
        max_imag_residue: points.iter().fold(0.0, |acc, p| acc.max(p.imag_residue)),
    })
}

/// Earliest time at which `F` falls to `threshold` or below, linearly
/// interpolated between the bracketing grid points. `None` if the series
/// stays above the threshold. Expects `0 < threshold < 1`.
pub fn scrambling_time(series: &OtocSeries, threshold: f64) -> Option<f64> {
    first_crossing(&series.times(), &series.values, threshold)
}

pub(crate) fn first_crossing(times: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    let first = values.iter().position(|&f| f <= threshold)?;
    if first == 0 {
        return Some(times[0]);
    }
    let (t0, t1) = (times[first - 1], times[first]);
    let (f0, f1) = (values[first - 1], values[first]);
    Some(t0 + (f0 - threshold) / (f0 - f1) * (t1 - t0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::EvolutionModel;
    use crate::operators::pauli;
    use std::f64::consts::PI;

    fn series_from(times: &[f64], values: &[f64]) -> OtocSeries {
        OtocSeries {
            grid: TimeGrid::new(times[0], *times.last().unwrap(), times.len()).unwrap(),
            values: values.to_vec(),
            config: ChainConfig::default(),
            convention_tag: FIDELITY_CONVENTION,
            max_imag_residue: 0.0,
        }
    }

    #[test]
    fn grid_endpoints_and_validation() {
        let g = TimeGrid::new(0.0, 10.0, 201).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 201);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[200], 10.0);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        assert!(TimeGrid::new(0.0, 0.0, 2).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(-1.0, 1.0, 3).is_err());
        assert_eq!(TimeGrid::default(), g);
    }

    #[test]
    fn butterfly_operators_on_two_sites() {
        let (v, w) = butterfly_operators(2).unwrap();
        let id = ComplexMatrix::identity(2);
        assert_eq!(v, pauli(Axis::X).kron(&id));
        assert_eq!(w, id.kron(&pauli(Axis::X)));
        assert_eq!(v.commutator(&w).max_abs(), 0.0);
        assert_eq!(&v * &v, ComplexMatrix::identity(4));
        assert!(butterfly_operators(1).unwrap_err().is_argument());
    }

    #[test]
    fn single_spin_precession() {
        let w = pauli(Axis::X);
        let h = pauli(Axis::Z);
        assert!(heisenberg_evolve(&w, &h, 0.0).unwrap().max_abs_diff(&w) < 1e-14);
        for t in [0.1, 0.5, PI / 4.0, 2.0] {
            let expected = pauli(Axis::X).scale_real((2.0 * t).cos()) - pauli(Axis::Y).scale_real((2.0 * t).sin());
            let got = heisenberg_evolve(&w, &h, t).unwrap();
            assert!(got.max_abs_diff(&expected) < 1e-12, "t = {t}");
        }
        let quarter = heisenberg_evolve(&w, &h, PI / 4.0).unwrap();
        assert!(quarter.max_abs_diff(&-pauli(Axis::Y)) < 1e-10);
    }

    #[test]
    fn commuting_hamiltonian_leaves_w_fixed() {
        let w = pauli(Axis::X).kron(&pauli(Axis::X));
        let h = pauli(Axis::X).kron(&ComplexMatrix::identity(2)).scale_real(0.7);
        for t in [0.3, 5.0] {
            assert!(heisenberg_evolve(&w, &h, t).unwrap().max_abs_diff(&w) < 1e-12);
        }
    }

    #[test]
    fn pair_at_time_zero_coincides() {
        let cfg = ChainConfig {
            n: 3,
            d_strength: 0.4,
            ..ChainConfig::default()
        };
        let rho = initial_state(&cfg).unwrap();
        let (v, w) = butterfly_operators(3).unwrap();
        let (a, b) = conjugated_pair(&rho, &v, &w).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn maximally_mixed_state_is_invariant() {
        let cfg = ChainConfig {
            n: 3,
            ..ChainConfig::default()
        };
        let rho = DensityMatrix::maximally_mixed(8);
        let (v, w) = butterfly_operators(3).unwrap();
        let w_t = heisenberg_evolve(&w, &evolution_hamiltonian(&cfg).unwrap(), 1.3).unwrap();
        let (a, b) = conjugated_pair(&rho, &v, &w_t).unwrap();
        assert!(a.matrix().max_abs_diff(rho.matrix()) < 1e-12);
        assert!(b.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn pair_is_isospectral_with_initial_state() {
        let cfg = ChainConfig {
            n: 4,
            d_strength: 0.8,
            temperature: 0.3,
            ..ChainConfig::default()
        };
        let rho = initial_state(&cfg).unwrap();
        let (v, w) = butterfly_operators(4).unwrap();
        let w_t = heisenberg_evolve(&w, &evolution_hamiltonian(&cfg).unwrap(), 2.2).unwrap();
        let (a, b) = conjugated_pair(&rho, &v, &w_t).unwrap();
        let reference = rho.eigenvalues().unwrap();
        for state in [a, b] {
            let spec = state.eigenvalues().unwrap();
            for (x, y) in spec.iter().zip(&reference) {
                assert!((x - y).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn non_unitary_conjugator_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(4);
        let (v, _) = butterfly_operators(2).unwrap();
        let bad = ComplexMatrix::identity(4).scale_real(1.1);
        assert!(matches!(conjugated_pair(&rho, &v, &bad), Err(Error::Validation(_))));
    }

    #[test]
    fn otoc_starts_at_one() {
        for model in EvolutionModel::ALL {
            let cfg = ChainConfig {
                n: 4,
                d_strength: 1.0,
                evolution_model: model,
                ..ChainConfig::default()
            };
            assert!((otoc_f(&cfg, 0.0).unwrap() - 1.0).abs() <= 1e-9, "{model}");
        }
    }

    #[test]
    fn otoc_at_infinite_temperature_is_one() {
        let cfg = ChainConfig {
            n: 4,
            d_strength: 0.5,
            temperature: 1e9,
            ..ChainConfig::default()
        };
        for t in [0.5, 3.0, 9.0] {
            assert!((otoc_f(&cfg, t).unwrap() - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn series_matches_pointwise_evaluation() {
        let cfg = ChainConfig {
            n: 4,
            d_strength: 0.75,
            temperature: 0.2,
            ..ChainConfig::default()
        };
        let grid = TimeGrid::new(0.0, 4.0, 5).unwrap();
        let series = otoc_series(&cfg, &grid).unwrap();
        assert_eq!(series.values.len(), 5);
        assert!((series.values[0] - 1.0).abs() <= 1e-9);
        for (t, f) in grid.points().into_iter().zip(&series.values) {
            assert!((otoc_f(&cfg, t).unwrap() - f).abs() <= 1e-10, "t = {t}");
        }
        assert!(!series.imag_residue_flagged());
    }

    #[test]
    fn invalid_config_is_rejected_before_work() {
        let cfg = ChainConfig {
            temperature: -1.0,
            ..ChainConfig::default()
        };
        assert!(otoc_series(&cfg, &TimeGrid::default()).unwrap_err().is_argument());
    }

    #[test]
    fn scrambling_time_interpolation() {
        assert_eq!(scrambling_time(&series_from(&[0.0, 1.0], &[1.0, 1.0]), 0.9), None);
        assert_eq!(scrambling_time(&series_from(&[0.0, 1.0], &[1.0, 0.8]), 0.9), Some(0.5));
        let t = scrambling_time(&series_from(&[0.0, 1.0, 2.0], &[1.0, 0.95, 0.85]), 0.9).unwrap();
        assert!((t - 1.5).abs() < 1e-12);
        // exact hit on a grid point
        assert_eq!(
            scrambling_time(&series_from(&[0.0, 1.0, 2.0], &[1.0, 0.9, 0.5]), 0.9),
            Some(1.0)
        );
    }
}
