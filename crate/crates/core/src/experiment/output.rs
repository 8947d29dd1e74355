//! CSV persistence for sweep results.
//!
//! ```text
//! # key=value            metadata, one per line
//! swept_param,swept_value,t,F
//! d_strength,2.5000000000000000e-1,0.0000000000000000e0,1.0000000000000000e0
//! ```
//!
//! Reals carry 17 significant digits so they parse back bit-exactly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hamiltonian::ChainConfig;
use crate::otoc::TimeGrid;

use super::{write_atomically, SweepResult};

pub const CSV_HEADER: [&str; 4] = ["swept_param", "swept_value", "t", "F"];
const FORMAT_TAG: &str = "scramble-sweep/1";

/// Scientific notation with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_time(t: Option<f64>) -> String {
    t.map_or_else(|| "none".to_string(), format_real)
}

fn config_metadata(cfg: &ChainConfig) -> Vec<(&'static str, String)> {
    vec![
        ("n", cfg.n.to_string()),
        ("j_ising", format_real(cfg.j_ising)),
        ("h_x", format_real(cfg.h_x)),
        ("h_z_amp", format_real(cfg.h_z_amp)),
        ("j_x", format_real(cfg.j_x)),
        ("j_y", format_real(cfg.j_y)),
        ("j_z", format_real(cfg.j_z)),
        ("d_strength", format_real(cfg.d_strength)),
        ("temperature", format_real(cfg.temperature)),
        ("evolution_model", cfg.evolution_model.to_string()),
    ]
}

fn grid_metadata(grid: &TimeGrid) -> Vec<(&'static str, String)> {
    vec![
        ("t_start", format_real(grid.t_start())),
        ("t_end", format_real(grid.t_end())),
        ("steps", grid.steps().to_string()),
    ]
}

/// The complete CSV document for `result`. Wall times are left out so
/// identical specs always give identical bytes.
pub fn sweep_csv(result: &SweepResult) -> Result<String> {
    let spec = &result.spec;
    let param = spec.swept.as_str();
    let mut meta: Vec<(String, String)> = vec![
        ("format".into(), FORMAT_TAG.into()),
        ("artifact_version".into(), env!("CARGO_PKG_VERSION").into()),
        ("fidelity_convention".into(), crate::otoc::FIDELITY_CONVENTION.into()),
        ("threshold".into(), format_real(spec.threshold)),
        ("swept_param".into(), param.into()),
    ];
    meta.extend(
        config_metadata(&spec.base)
            .into_iter()
            .map(|(k, v)| (format!("config.{k}"), v)),
    );
    meta.extend(
        grid_metadata(&spec.grid)
            .into_iter()
            .map(|(k, v)| (format!("grid.{k}"), v)),
    );
    for (i, &value) in spec.values.iter().enumerate() {
        let key = format!("{param}={}", format_real(value));
        meta.push((
            format!("scrambling_time[{key}]"),
            format_time(result.scrambling_times[i]),
        ));
        meta.push((
            format!("initial_purity[{key}]"),
            format_real(result.initial_purities[i]),
        ));
        meta.push((
            format!("max_imag_residue[{key}]"),
            format_real(result.series[i].max_imag_residue),
        ));
    }

    let mut out = String::new();
    for (k, v) in &meta {
        out.push_str(&format!("# {k}={v}\n"));
    }

    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Numerical(format!("csv encoding failed: {e}"));
    writer.write_record(CSV_HEADER).map_err(csv_err)?;
    for (value, series) in spec.values.iter().zip(&result.series) {
        let value = format_real(*value);
        for (t, f) in series.times().into_iter().zip(&series.values) {
            writer
                .write_record([param, value.as_str(), &format_real(t), &format_real(*f)])
                .map_err(csv_err)?;
        }
    }
    let body = writer
        .into_inner()
        .map_err(|e| Error::Numerical(format!("csv encoding failed: {e}")))?;
    out.push_str(std::str::from_utf8(&body).expect("csv body is ascii"));
    Ok(out)
}

/// Writes [`sweep_csv`] to `path` atomically.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_atomically(path, sweep_csv(result)?.as_bytes())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub swept_param: String,
    pub swept_value: f64,
    pub t: f64,
    pub f: f64,
}

/// Parsed sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// Metadata `key=value` pairs in file order.
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<CsvRow>,
}

impl CsvTable {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let malformed = |reason: String| Error::Csv {
        path: path.to_path_buf(),
        reason,
    };

    let metadata = text
        .lines()
        .filter_map(|line| line.strip_prefix('#'))
        .filter_map(|line| {
            let (k, v) = line.trim_start().split_once('=')?;
            Some((k.to_string(), v.to_string()))
        })
        .collect();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| malformed(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(malformed(format!("unexpected header {header:?}")));
    }
    let parse = |field: &str, line: usize| -> Result<f64> {
        field
            .parse::<f64>()
            .map_err(|e| malformed(format!("record {line}: {field:?} is not a number ({e})")))
    };
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        if record.len() != CSV_HEADER.len() {
            return Err(malformed(format!("record {i} has {} fields", record.len())));
        }
        rows.push(CsvRow {
            swept_param: record[0].to_string(),
            swept_value: parse(&record[1], i)?,
            t: parse(&record[2], i)?,
            f: parse(&record[3], i)?,
        });
    }
    Ok(CsvTable { metadata, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{SweepSpec, SweptParameter};
    use crate::otoc::{OtocSeries, FIDELITY_CONVENTION};

    fn fake_result(values: &[f64], steps: usize) -> SweepResult {
        let grid = TimeGrid::new(0.0, 2.0, steps).unwrap();
        let spec = SweepSpec {
            grid,
            ..SweepSpec::new(
                ChainConfig::default(),
                SweptParameter::DStrength,
                values.to_vec(),
                "x.csv",
            )
        };
        let series: Vec<OtocSeries> = values
            .iter()
            .map(|&d| OtocSeries {
                grid,
                values: (0..steps).map(|i| 1.0 - 0.1 * d * i as f64 / 3.0).collect(),
                config: spec.config_for(d),
                convention_tag: FIDELITY_CONVENTION,
                max_imag_residue: 0.0,
            })
            .collect();
        SweepResult {
            scrambling_times: values.iter().map(|_| None).collect(),
            initial_purities: values.iter().map(|_| 0.5).collect(),
            wall_times: values.iter().map(|_| 0.0).collect(),
            spec,
            series,
        }
    }

    #[test]
    fn real_formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1.0, 0.0, 123456.789, f64::MIN_POSITIVE] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_real(0.25), "2.5000000000000000e-1");
    }

    #[test]
    fn row_count_is_values_times_grid() {
        let csv = sweep_csv(&fake_result(&[0.0, 1.0], 3)).unwrap();
        let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "swept_param,swept_value,t,F");
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn metadata_carries_config_grid_and_convention() {
        let csv = sweep_csv(&fake_result(&[0.5], 2)).unwrap();
        for needle in [
            "# fidelity_convention=uhlmann-squared",
            "# config.evolution_model=sum",
            "# config.n=6",
            "# grid.steps=2",
            "# threshold=9.0000000000000002e-1",
            "# artifact_version=",
            "# scrambling_time[d_strength=5.0000000000000000e-1]=none",
        ] {
            assert!(csv.contains(needle), "missing {needle:?} in\n{csv}");
        }
    }

    #[test]
    fn read_back_matches_written_values() {
        let result = fake_result(&[0.0, 0.3], 4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        write_csv(&result, &path).unwrap();
        let table = read_csv(&path).unwrap();
        assert_eq!(table.rows.len(), 8);
        assert_eq!(table.meta("swept_param"), Some("d_strength"));
        let times = result.spec.grid.points();
        for (i, row) in table.rows.iter().enumerate() {
            let (v, k) = (i / 4, i % 4);
            assert_eq!(row.swept_param, "d_strength");
            assert_eq!(row.swept_value, result.spec.values[v]);
            assert_eq!(row.t, times[k]);
            assert_eq!(row.f, result.series[v].values[k]);
        }
    }

    #[test]
    fn malformed_files_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Error::Csv { .. })));
        std::fs::write(&path, "swept_param,swept_value,t,F\nd_strength,x,0,1\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Error::Csv { .. })));
        assert!(matches!(read_csv(&dir.path().join("nope.csv")), Err(Error::Io { .. })));
    }
}
