//! Parameter sweeps over DM strength or temperature, with persistence.

mod output;
mod selection;
mod svg;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::ChainConfig;
use crate::otoc::{initial_state, otoc_series, scrambling_time, OtocSeries, TimeGrid, DEFAULT_THRESHOLD};

pub use output::{format_real, read_csv, sweep_csv, write_csv, CsvRow, CsvTable, CSV_HEADER};
pub use selection::{
    d_trend_holds, model_selection_report, model_selection_report_with, t_trend_holds, ModelAssessment,
    ModelSelectionReport, ModelSelectionSpec, TrendOutcome, MIN_D_CROSSINGS,
};
pub use svg::{render_svg, sweep_svg};

/// DM strengths of the D-sweep.
pub const DEFAULT_D_VALUES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// Temperatures of the T-sweep.
pub const DEFAULT_TEMPERATURES: [f64; 4] = [0.05, 0.5, 1.0, 2.0];
/// DM strength held fixed during the T-sweep.
pub const DEFAULT_T_SWEEP_D: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweptParameter {
    DStrength,
    Temperature,
}

impl SweptParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweptParameter::DStrength => "d_strength",
            SweptParameter::Temperature => "temperature",
        }
    }

    /// Short symbol used in plot legends.
    pub fn symbol(self) -> &'static str {
        match self {
            SweptParameter::DStrength => "D",
            SweptParameter::Temperature => "T",
        }
    }

    pub fn apply(self, base: &ChainConfig, value: f64) -> ChainConfig {
        let mut cfg = *base;
        match self {
            SweptParameter::DStrength => cfg.d_strength = value,
            SweptParameter::Temperature => cfg.temperature = value,
        }
        cfg
    }
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweptParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d_strength" => Ok(SweptParameter::DStrength),
            "temperature" => Ok(SweptParameter::Temperature),
            other => Err(Error::argument(
                "swept_param",
                format!("expected d_strength or temperature, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ChainConfig,
    pub swept: SweptParameter,
    /// Strictly ascending, non-empty.
    pub values: Vec<f64>,
    pub grid: TimeGrid,
    pub threshold: f64,
    /// CSV destination; the SVG goes next to it with an `.svg` extension.
    pub output_path: PathBuf,
}

impl SweepSpec {
    pub fn new(base: ChainConfig, swept: SweptParameter, values: Vec<f64>, output_path: impl Into<PathBuf>) -> Self {
        SweepSpec {
            base,
            swept,
            values,
            grid: TimeGrid::default(),
            threshold: DEFAULT_THRESHOLD,
            output_path: output_path.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::argument("values", "sweep needs at least one value"));
        }
        if let Some(bad) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::argument("values", format!("non-finite sweep value {bad}")));
        }
        if let Some(w) = self.values.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::argument(
                "values",
                format!("sweep values must be strictly ascending, got {} then {}", w[0], w[1]),
            ));
        }
        check_threshold(self.threshold)?;
        for &value in &self.values {
            self.config_for(value).validate()?;
        }
        Ok(())
    }

    pub fn config_for(&self, value: f64) -> ChainConfig {
        self.swept.apply(&self.base, value)
    }

    pub fn svg_path(&self) -> PathBuf {
        self.output_path.with_extension("svg")
    }
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::argument(
            "threshold",
            format!("must lie in (0, 1), got {threshold}"),
        ));
    }
    Ok(())
}

/// One series per swept value, with derived diagnostics, in sweep order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub series: Vec<OtocSeries>,
    pub scrambling_times: Vec<Option<f64>>,
    /// `Tr ρ²` of the initial thermal state per swept value.
    pub initial_purities: Vec<f64>,
    /// Seconds spent per point.
    pub wall_times: Vec<f64>,
}

impl SweepResult {
    pub fn min_values(&self) -> Vec<f64> {
        self.series.iter().map(OtocSeries::min_value).collect()
    }
}

struct PointResult {
    series: OtocSeries,
    purity: f64,
    seconds: f64,
}

fn run_point(spec: &SweepSpec, value: f64) -> Result<PointResult> {
    let start = Instant::now();
    let cfg = spec.config_for(value);
    let series = otoc_series(&cfg, &spec.grid)?;
    let purity = initial_state(&cfg)?.purity();
    Ok(PointResult {
        series,
        purity,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Evaluates every sweep point on the current rayon pool.
///
/// Output order follows `spec.values` regardless of completion order. The
/// first failing point aborts the sweep and is named in the error.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let points = spec
        .values
        .par_iter()
        .map(|&value| {
            run_point(spec, value).map_err(|e| Error::SweepPoint {
                param: spec.swept.as_str(),
                value,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut result = SweepResult {
        spec: spec.clone(),
        series: Vec::with_capacity(points.len()),
        scrambling_times: Vec::with_capacity(points.len()),
        initial_purities: Vec::with_capacity(points.len()),
        wall_times: Vec::with_capacity(points.len()),
    };
    for p in points {
        result.scrambling_times.push(scrambling_time(&p.series, spec.threshold));
        result.initial_purities.push(p.purity);
        result.wall_times.push(p.seconds);
        result.series.push(p.series);
    }
    Ok(result)
}

/// [`run_sweep`] on a dedicated pool of `jobs` worker threads.
pub fn run_sweep_with_jobs(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    with_jobs(jobs, || run_sweep(spec))
}

pub(crate) fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if jobs == 0 {
        return Err(Error::argument("jobs", "worker count must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Numerical(format!("could not start worker pool: {e}")))?;
    pool.install(f)
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and an atomic rename, so readers never observe a partial file.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
