//! Chain Hamiltonians: the Ising evolution generator with staggered
//! longitudinal field, and the Heisenberg chain with a z-axis
//! Dzyaloshinskii-Moriya term that defines the thermal initial state.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::operators::{site_operator, two_site_term, Axis, MAX_SITES};

pub const DEFAULT_N: usize = 6;
pub const DEFAULT_J_ISING: f64 = -1.0;
pub const DEFAULT_H_X: f64 = 1.05;
pub const DEFAULT_H_Z_AMP: f64 = 0.375;
pub const DEFAULT_J_XY: f64 = 1.0;
pub const DEFAULT_J_Z: f64 = -1.0;
pub const DEFAULT_D: f64 = 0.0;
pub const DEFAULT_TEMPERATURE: f64 = 0.05;

/// Which Hamiltonian generates the real-time propagator `U(t) = exp(-iHt)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EvolutionModel {
    /// Ising chain only; D enters through the initial state alone.
    Ising,
    /// DM Heisenberg chain only.
    Dm,
    /// Ising plus DM Heisenberg.
    #[default]
    Sum,
}

impl EvolutionModel {
    pub const ALL: [EvolutionModel; 3] = [EvolutionModel::Ising, EvolutionModel::Dm, EvolutionModel::Sum];

    pub fn as_str(self) -> &'static str {
        match self {
            EvolutionModel::Ising => "ising",
            EvolutionModel::Dm => "dm",
            EvolutionModel::Sum => "sum",
        }
    }
}

impl fmt::Display for EvolutionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvolutionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ising" => Ok(EvolutionModel::Ising),
            "dm" => Ok(EvolutionModel::Dm),
            "sum" => Ok(EvolutionModel::Sum),
            other => Err(Error::argument(
                "evolution_model",
                format!("expected one of ising, dm, sum; got {other:?}"),
            )),
        }
    }
}

/// Full physical parameter set for one chain. Energies are in units where
/// `ħ = k_B = 1`, so `temperature` is an energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub n: usize,
    pub j_ising: f64,
    pub h_x: f64,
    /// Amplitude of the staggered longitudinal field `h_z(r) = h_z_amp * (-1)^r`.
    pub h_z_amp: f64,
    pub j_x: f64,
    pub j_y: f64,
    pub j_z: f64,
    pub d_strength: f64,
    pub temperature: f64,
    pub evolution_model: EvolutionModel,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            n: DEFAULT_N,
            j_ising: DEFAULT_J_ISING,
            h_x: DEFAULT_H_X,
            h_z_amp: DEFAULT_H_Z_AMP,
            j_x: DEFAULT_J_XY,
            j_y: DEFAULT_J_XY,
            j_z: DEFAULT_J_Z,
            d_strength: DEFAULT_D,
            temperature: DEFAULT_TEMPERATURE,
            evolution_model: EvolutionModel::default(),
        }
    }
}

impl ChainConfig {
    /// Checks every physical constraint: `2 <= n <= 12`, `j_x = j_y`,
    /// `j_z < 0`, `temperature > 0`, `d_strength >= 0`.
    pub fn validate(&self) -> Result<()> {
        self.check_lattice()?;
        if self.j_x != self.j_y {
            return Err(Error::argument(
                "j_y",
                format!("j_x = j_y required, got j_x = {} and j_y = {}", self.j_x, self.j_y),
            ));
        }
        if self.j_z >= 0.0 {
            return Err(Error::argument("j_z", format!("j_z < 0 required, got {}", self.j_z)));
        }
        if self.temperature <= 0.0 {
            return Err(Error::argument(
                "temperature",
                format!("temperature > 0 required, got {}", self.temperature),
            ));
        }
        if self.d_strength < 0.0 {
            return Err(Error::argument(
                "d_strength",
                format!("d_strength >= 0 required, got {}", self.d_strength),
            ));
        }
        Ok(())
    }

    /// The subset of checks the Hamiltonian builders need: chain length in
    /// range and every coupling finite.
    pub fn check_lattice(&self) -> Result<()> {
        if self.n < 2 || self.n > MAX_SITES {
            return Err(Error::argument(
                "n",
                format!("chain length must satisfy 2 <= n <= {MAX_SITES}, got {}", self.n),
            ));
        }
        let fields = [
            ("j_ising", self.j_ising),
            ("h_x", self.h_x),
            ("h_z_amp", self.h_z_amp),
            ("j_x", self.j_x),
            ("j_y", self.j_y),
            ("j_z", self.j_z),
            ("d_strength", self.d_strength),
            ("temperature", self.temperature),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::argument(name, format!("must be finite, got {value}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Longitudinal field on 1-based site `r`.
    pub fn h_z(&self, r: usize) -> f64 {
        if r.is_multiple_of(2) {
            self.h_z_amp
        } else {
            -self.h_z_amp
        }
    }
}

/// Local Hermitian pieces of the Ising Hamiltonian (bonds first, then
/// single-site fields). Their sum is [`build_ising`].
pub fn ising_terms(cfg: &ChainConfig) -> Result<Vec<ComplexMatrix>> {
    cfg.check_lattice()?;
    let n = cfg.n;
    let mut terms = Vec::with_capacity(2 * n - 1);
    for r in 1..n {
        terms.push(two_site_term(Axis::Z, Axis::Z, r, n)?.scale_real(-cfg.j_ising));
    }
    for r in 1..=n {
        let x = site_operator(Axis::X, r, n)?.scale_real(-cfg.h_x);
        let z = site_operator(Axis::Z, r, n)?.scale_real(-cfg.h_z(r));
        terms.push(x + z);
    }
    Ok(terms)
}

/// `H_I = -Σ J σz_r σz_{r+1} - Σ h_x σx_r - Σ h_z(r) σz_r` on the open chain.
pub fn build_ising(cfg: &ChainConfig) -> Result<ComplexMatrix> {
    Ok(sum(ising_terms(cfg)?, cfg.dim()))
}

/// One Hermitian bond term per nearest-neighbour pair; their sum is [`build_dm`].
pub fn dm_terms(cfg: &ChainConfig) -> Result<Vec<ComplexMatrix>> {
    cfg.check_lattice()?;
    let n = cfg.n;
    let mut terms = Vec::with_capacity(n - 1);
    for k in 1..n {
        let xx = two_site_term(Axis::X, Axis::X, k, n)?;
        let yy = two_site_term(Axis::Y, Axis::Y, k, n)?;
        let zz = two_site_term(Axis::Z, Axis::Z, k, n)?;
        // z-component of σ_k × σ_{k+1}
        let cross_z = two_site_term(Axis::X, Axis::Y, k, n)? - two_site_term(Axis::Y, Axis::X, k, n)?;
        let bond = xx.scale_real(cfg.j_x)
            + yy.scale_real(cfg.j_y)
            + zz.scale_real(cfg.j_z)
            + cross_z.scale_real(cfg.d_strength);
        terms.push(bond.scale_real(0.5));
    }
    Ok(terms)
}

/// `H_DM = Σ_k ½[J_x σxσx + J_y σyσy + J_z σzσz + D (σx_k σy_{k+1} - σy_k σx_{k+1})]`.
pub fn build_dm(cfg: &ChainConfig) -> Result<ComplexMatrix> {
    Ok(sum(dm_terms(cfg)?, cfg.dim()))
}

/// The Hamiltonian selected by `cfg.evolution_model`.
pub fn evolution_hamiltonian(cfg: &ChainConfig) -> Result<ComplexMatrix> {
    match cfg.evolution_model {
        EvolutionModel::Ising => build_ising(cfg),
        EvolutionModel::Dm => build_dm(cfg),
        EvolutionModel::Sum => Ok(build_ising(cfg)? + build_dm(cfg)?),
    }
}

fn sum(terms: Vec<ComplexMatrix>, dim: usize) -> ComplexMatrix {
    terms.iter().fold(ComplexMatrix::zeros(dim), |mut acc, t| {
        acc += t;
        acc
    })
}
