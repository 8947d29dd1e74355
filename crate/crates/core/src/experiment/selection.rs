//! Decides which Hamiltonian should generate the time evolution by checking
//! which choice reproduces both expected scrambling trends: faster with
//! stronger DM interaction, slower with higher temperature.

use std::fmt;

use crate::error::Result;
use crate::hamiltonian::{ChainConfig, EvolutionModel};
use crate::otoc::{TimeGrid, DEFAULT_THRESHOLD};

use super::{
    run_sweep, with_jobs, SweepSpec, SweptParameter, DEFAULT_D_VALUES, DEFAULT_TEMPERATURES, DEFAULT_T_SWEEP_D,
};

/// Minimum number of D-sweep curves that must cross the threshold.
pub const MIN_D_CROSSINGS: usize = 3;

fn ordered(t: Option<f64>) -> f64 {
    t.unwrap_or(f64::INFINITY)
}

/// Scrambling time strictly decreasing along the D-sweep (`None` = +∞) with
/// at least [`MIN_D_CROSSINGS`] curves crossing.
pub fn d_trend_holds(times: &[Option<f64>]) -> bool {
    let crossings = times.iter().filter(|t| t.is_some()).count();
    crossings >= MIN_D_CROSSINGS && times.windows(2).all(|w| ordered(w[1]) < ordered(w[0]))
}

/// Scrambling time non-decreasing along the T-sweep (`None` = +∞) and the
/// hottest curve's minimum above the coldest curve's minimum.
pub fn t_trend_holds(times: &[Option<f64>], min_values: &[f64]) -> bool {
    let ordered_ok = times.windows(2).all(|w| ordered(w[1]) >= ordered(w[0]));
    let depth_ok = match (min_values.first(), min_values.last()) {
        (Some(cold), Some(hot)) => min_values.len() >= 2 && hot > cold,
        _ => false,
    };
    ordered_ok && depth_ok
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSelectionSpec {
    /// Temperature of the D-sweep comes from here; the model field is overridden.
    pub base: ChainConfig,
    pub grid: TimeGrid,
    pub threshold: f64,
    pub d_values: Vec<f64>,
    pub temperatures: Vec<f64>,
    /// DM strength held fixed during the T-sweep.
    pub t_sweep_d: f64,
    /// Worker count; `None` uses the ambient rayon pool.
    pub jobs: Option<usize>,
}

impl ModelSelectionSpec {
    pub fn new(base: ChainConfig, grid: TimeGrid, threshold: f64) -> Self {
        ModelSelectionSpec {
            base,
            grid,
            threshold,
            d_values: DEFAULT_D_VALUES.to_vec(),
            temperatures: DEFAULT_TEMPERATURES.to_vec(),
            t_sweep_d: DEFAULT_T_SWEEP_D,
            jobs: None,
        }
    }

    fn sweeps_for(&self, model: EvolutionModel) -> (SweepSpec, SweepSpec) {
        let base = ChainConfig {
            evolution_model: model,
            ..self.base
        };
        let d_sweep = SweepSpec {
            grid: self.grid,
            threshold: self.threshold,
            ..SweepSpec::new(base, SweptParameter::DStrength, self.d_values.clone(), "")
        };
        let t_base = ChainConfig {
            d_strength: self.t_sweep_d,
            ..base
        };
        let t_sweep = SweepSpec {
            grid: self.grid,
            threshold: self.threshold,
            ..SweepSpec::new(t_base, SweptParameter::Temperature, self.temperatures.clone(), "")
        };
        (d_sweep, t_sweep)
    }
}

impl Default for ModelSelectionSpec {
    fn default() -> Self {
        ModelSelectionSpec::new(ChainConfig::default(), TimeGrid::default(), DEFAULT_THRESHOLD)
    }
}

/// Sweep outcomes for one evolution model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendOutcome {
    pub d_sweep_times: Vec<Option<f64>>,
    pub t_sweep_times: Vec<Option<f64>>,
    pub t_sweep_min_values: Vec<f64>,
    pub t_sweep_purities: Vec<f64>,
    pub d_trend: bool,
    pub t_trend: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelAssessment {
    pub model: EvolutionModel,
    /// Error text if either sweep failed for this model.
    pub outcome: std::result::Result<TrendOutcome, String>,
}

impl ModelAssessment {
    pub fn qualifies(&self) -> bool {
        matches!(&self.outcome, Ok(o) if o.d_trend && o.t_trend)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSelectionReport {
    pub rows: Vec<ModelAssessment>,
    /// `None` means inconclusive: no model reproduces both trends.
    pub recommended: Option<EvolutionModel>,
}

impl ModelSelectionReport {
    pub fn row(&self, model: EvolutionModel) -> Option<&ModelAssessment> {
        self.rows.iter().find(|r| r.model == model)
    }
}

fn assess(spec: &ModelSelectionSpec, model: EvolutionModel) -> Result<TrendOutcome> {
    let (d_spec, t_spec) = spec.sweeps_for(model);
    let d = run_sweep(&d_spec)?;
    let t = run_sweep(&t_spec)?;
    let t_min = t.min_values();
    Ok(TrendOutcome {
        d_trend: d_trend_holds(&d.scrambling_times),
        t_trend: t_trend_holds(&t.scrambling_times, &t_min),
        d_sweep_times: d.scrambling_times,
        t_sweep_times: t.scrambling_times,
        t_sweep_min_values: t_min,
        t_sweep_purities: t.initial_purities,
    })
}

/// Runs both sweeps under every evolution model with the default sweep values.
pub fn model_selection_report(base: &ChainConfig, grid: &TimeGrid, threshold: f64) -> ModelSelectionReport {
    model_selection_report_with(&ModelSelectionSpec::new(*base, *grid, threshold))
}

/// Runs both sweeps under every evolution model. A failing model is recorded
/// in its row and does not stop the others. The shipped default model is
/// preferred when several qualify.
pub fn model_selection_report_with(spec: &ModelSelectionSpec) -> ModelSelectionReport {
    let rows: Vec<ModelAssessment> = EvolutionModel::ALL
        .iter()
        .map(|&model| {
            let outcome = match spec.jobs {
                Some(jobs) => with_jobs(jobs, || assess(spec, model)),
                None => assess(spec, model),
            };
            ModelAssessment {
                model,
                outcome: outcome.map_err(|e| e.to_string()),
            }
        })
        .collect();
    let default = EvolutionModel::default();
    let recommended = rows
        .iter()
        .find(|r| r.model == default && r.qualifies())
        .or_else(|| rows.iter().find(|r| r.qualifies()))
        .map(|r| r.model);
    ModelSelectionReport { rows, recommended }
}

fn times_list(times: &[Option<f64>]) -> String {
    times
        .iter()
        .map(|t| t.map_or_else(|| "none".to_string(), |t| format!("{t:.4}")))
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for ModelSelectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model  d_trend  t_trend  d_sweep_t*  |  t_sweep_t*")?;
        for row in &self.rows {
            match &row.outcome {
                Ok(o) => writeln!(
                    f,
                    "{:<6} {:<8} {:<8} {}  |  {}",
                    row.model.as_str(),
                    o.d_trend,
                    o.t_trend,
                    times_list(&o.d_sweep_times),
                    times_list(&o.t_sweep_times)
                )?,
                Err(e) => writeln!(f, "{:<6} error: {e}", row.model.as_str())?,
            }
        }
        match self.recommended {
            Some(m) => write!(f, "recommended: {m}"),
            None => write!(f, "recommended: inconclusive"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_trend_rules() {
        assert!(d_trend_holds(&[Some(3.0), Some(2.0), Some(1.0)]));
        assert!(d_trend_holds(&[None, Some(3.0), Some(2.0), Some(1.0)]));
        assert!(
            !d_trend_holds(&[None, None, Some(3.0), Some(2.0), Some(1.0)]),
            "tied infinities"
        );
        assert!(!d_trend_holds(&[Some(2.0), Some(1.0)]), "too few crossings");
        assert!(!d_trend_holds(&[Some(3.0), Some(3.0), Some(1.0)]));
        assert!(!d_trend_holds(&[Some(1.0), Some(2.0), Some(0.5)]));
    }

    #[test]
    fn t_trend_rules() {
        assert!(t_trend_holds(&[Some(1.0), Some(1.0), None], &[0.1, 0.5, 0.9]));
        assert!(!t_trend_holds(&[Some(2.0), Some(1.0)], &[0.1, 0.5]));
        assert!(!t_trend_holds(&[None, Some(1.0)], &[0.1, 0.5]));
        assert!(!t_trend_holds(&[Some(1.0), Some(2.0)], &[0.5, 0.5]));
        assert!(!t_trend_holds(&[Some(1.0)], &[0.5]));
    }

    #[test]
    fn tiny_report_has_three_rows() {
        let spec = ModelSelectionSpec {
            base: ChainConfig {
                n: 2,
                ..ChainConfig::default()
            },
            grid: TimeGrid::new(0.0, 2.0, 5).unwrap(),
            d_values: vec![0.0, 1.0],
            temperatures: vec![0.05, 1.0],
            ..ModelSelectionSpec::default()
        };
        let report = model_selection_report_with(&spec);
        assert_eq!(report.rows.len(), 3);
        let models: Vec<_> = report.rows.iter().map(|r| r.model).collect();
        assert_eq!(models, EvolutionModel::ALL.to_vec());
        for row in &report.rows {
            let o = row.outcome.as_ref().unwrap();
            assert_eq!(o.d_sweep_times.len(), 2);
            assert_eq!(o.t_sweep_times.len(), 2);
            // two D values can never reach three crossings
            assert!(!o.d_trend);
        }
        assert_eq!(report.recommended, None);
        assert!(report.to_string().ends_with("recommended: inconclusive"));
    }

    #[test]
    fn failing_model_does_not_abort_others() {
        let spec = ModelSelectionSpec {
            base: ChainConfig {
                n: 2,
                ..ChainConfig::default()
            },
            grid: TimeGrid::new(0.0, 1.0, 3).unwrap(),
            d_values: vec![0.0, 0.5],
            temperatures: vec![-1.0, 1.0],
            ..ModelSelectionSpec::default()
        };
        let report = model_selection_report_with(&spec);
        assert_eq!(report.rows.len(), 3);
        assert!(report.rows.iter().all(|r| r.outcome.is_err()));
        assert!(report.to_string().contains("error"));
    }
}
