//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for argument errors, 1 for failed computations
//! or I/O.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{
    format_real, model_selection_report_with, render_svg, run_sweep_with_jobs, write_atomically, write_csv,
    ModelSelectionSpec, SweepResult, SweepSpec, SweptParameter, DEFAULT_D_VALUES, DEFAULT_TEMPERATURES,
    DEFAULT_T_SWEEP_D,
};
use crate::hamiltonian::{ChainConfig, EvolutionModel};
use crate::otoc::{TimeGrid, DEFAULT_THRESHOLD};

#[derive(Debug, Parser)]
#[command(
    name = "scramble",
    version,
    about = "OTOC scrambling in thermal spin chains with DM interaction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a single F(t) curve.
    #[command(allow_negative_numbers = true)]
    Curve(RunArgs),
    /// Sweep the DM strength D at fixed temperature.
    #[command(allow_negative_numbers = true)]
    SweepD {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated DM strengths, ascending (energy units) [default: 0,0.25,0.5,0.75,1]
        #[arg(long, value_delimiter = ',')]
        d_values: Option<Vec<f64>>,
    },
    /// Sweep the temperature at fixed DM strength.
    #[command(allow_negative_numbers = true)]
    SweepT {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated temperatures, ascending (energy units, k_B = 1) [default: 0.05,0.5,1,2]
        #[arg(long, value_delimiter = ',')]
        temperatures: Option<Vec<f64>>,
    },
    /// Run both sweeps under every evolution model and recommend one.
    #[command(allow_negative_numbers = true)]
    ModelSelect {
        #[command(flatten)]
        run: RunArgs,
        /// DM strengths of the D-sweep (energy units) [default: 0,0.25,0.5,0.75,1]
        #[arg(long, value_delimiter = ',')]
        d_values: Option<Vec<f64>>,
        /// Temperatures of the T-sweep, run at D = --d (energy units) [default: 0.05,0.5,1,2]
        #[arg(long, value_delimiter = ',')]
        temperatures: Option<Vec<f64>>,
    },
    /// Resolve and check all parameters without computing anything.
    #[command(allow_negative_numbers = true)]
    ValidateConfig(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Chain length n (spins, 2..=12) [default: 6]
    #[arg(long)]
    n: Option<usize>,
    /// Ising coupling J (energy units) [default: -1]
    #[arg(long)]
    j_ising: Option<f64>,
    /// Transverse field h_x (energy units) [default: 1.05]
    #[arg(long)]
    hx: Option<f64>,
    /// Staggered longitudinal field amplitude, h_z(r) = hz * (-1)^r (energy units) [default: 0.375]
    #[arg(long)]
    hz: Option<f64>,
    /// Heisenberg coupling J_x = J_y (energy units) [default: 1]
    #[arg(long)]
    jxy: Option<f64>,
    /// Heisenberg coupling J_z, must be negative (energy units) [default: -1]
    #[arg(long)]
    jz: Option<f64>,
    /// DM strength D along z (energy units) [default: 0; sweep-t and model-select: 1]
    #[arg(long)]
    d: Option<f64>,
    /// Temperature T (energy units, k_B = 1) [default: 0.05]
    #[arg(long)]
    temperature: Option<f64>,
    /// Hamiltonian generating U(t): ising, dm or sum [default: sum]
    #[arg(long)]
    model: Option<String>,
    /// First grid time (units of 1/energy, ħ = 1) [default: 0]
    #[arg(long)]
    t_start: Option<f64>,
    /// Last grid time (units of 1/energy, ħ = 1) [default: 10]
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points, at least 2 [default: 201]
    #[arg(long)]
    steps: Option<usize>,
    /// Scrambling threshold θ in (0, 1) on F(t) [default: 0.9]
    #[arg(long)]
    threshold: Option<f64>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    jobs: Option<usize>,
    /// Flat key=value file with flag names as keys; flags on the command line win
    #[arg(long)]
    config: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 17] = [
    "n",
    "j-ising",
    "hx",
    "hz",
    "jxy",
    "jz",
    "d",
    "temperature",
    "model",
    "t-start",
    "t-max",
    "steps",
    "threshold",
    "out",
    "jobs",
    "d-values",
    "temperatures",
];

/// Parsed `--config` file.
#[derive(Debug, Default)]
struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::argument(
                    "config",
                    format!("{}:{}: expected key=value, got {line:?}", path.display(), i + 1),
                )
            })?;
            let key = k.trim().trim_start_matches("--").to_string();
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Error::argument(
                    "config",
                    format!("{}:{}: unknown key {key:?}", path.display(), i + 1),
                ));
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    fn get<T: FromStr>(&self, key: &'static str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::argument("config", format!("key {key}: cannot parse {raw:?}"))),
        }
    }

    fn get_list(&self, key: &'static str) -> Result<Option<Vec<f64>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::argument("config", format!("key {key}: cannot parse {s:?}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }
}

/// Everything a subcommand needs after merging flags, config file and defaults.
#[derive(Debug, Clone)]
struct Resolved {
    cfg: ChainConfig,
    grid_start: f64,
    grid_end: f64,
    steps: usize,
    threshold: f64,
    out: PathBuf,
    jobs: usize,
}

impl Resolved {
    fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid_start, self.grid_end, self.steps)
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn resolve(args: &RunArgs, file: &ConfigFile, default_d: f64) -> Result<Resolved> {
    let model_text = args.model.clone().or(file.get::<String>("model")?);
    let evolution_model = match model_text {
        Some(m) => m.parse::<EvolutionModel>()?,
        None => EvolutionModel::default(),
    };
    let defaults = ChainConfig::default();
    let jxy = pick(args.jxy, file.get("jxy")?, defaults.j_x);
    let cfg = ChainConfig {
        n: pick(args.n, file.get("n")?, defaults.n),
        j_ising: pick(args.j_ising, file.get("j-ising")?, defaults.j_ising),
        h_x: pick(args.hx, file.get("hx")?, defaults.h_x),
        h_z_amp: pick(args.hz, file.get("hz")?, defaults.h_z_amp),
        j_x: jxy,
        j_y: jxy,
        j_z: pick(args.jz, file.get("jz")?, defaults.j_z),
        d_strength: pick(args.d, file.get("d")?, default_d),
        temperature: pick(args.temperature, file.get("temperature")?, defaults.temperature),
        evolution_model,
    };
    let default_grid = TimeGrid::default();
    let jobs = match args.jobs.or(file.get("jobs")?) {
        Some(0) => return Err(Error::argument("jobs", "need at least one worker")),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let threshold = pick(args.threshold, file.get("threshold")?, DEFAULT_THRESHOLD);
    crate::experiment::check_threshold(threshold)?;
    Ok(Resolved {
        cfg,
        grid_start: pick(args.t_start, file.get("t-start")?, default_grid.t_start()),
        grid_end: pick(args.t_max, file.get("t-max")?, default_grid.t_end()),
        steps: pick(args.steps, file.get("steps")?, default_grid.steps()),
        threshold,
        out: pick(args.out.clone(), file.get("out")?, PathBuf::from("out")),
        jobs,
    })
}

fn load_config(args: &RunArgs) -> Result<ConfigFile> {
    match &args.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

fn flag_for(field: &str) -> &str {
    match field {
        "n" => "--n",
        "j_ising" => "--j-ising",
        "h_x" => "--hx",
        "h_z_amp" => "--hz",
        "j_x" | "j_y" => "--jxy",
        "j_z" => "--jz",
        "d_strength" => "--d / --d-values",
        "temperature" => "--temperature / --temperatures",
        "evolution_model" => "--model",
        "t_start" => "--t-start",
        "t_end" => "--t-max",
        "steps" => "--steps",
        "threshold" => "--threshold",
        "values" => "--d-values / --temperatures",
        "jobs" => "--jobs",
        "config" => "--config",
        other => other,
    }
}

fn describe(err: &Error) -> String {
    match err {
        Error::Argument { name, .. } => format!("{err} (flag {})", flag_for(name)),
        Error::SweepPoint { source, .. } if source.is_argument() => match source.as_ref() {
            Error::Argument { name, .. } => format!("{err} (flag {})", flag_for(name)),
            _ => err.to_string(),
        },
        _ => err.to_string(),
    }
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn sweep_spec(r: &Resolved, swept: SweptParameter, values: Vec<f64>, stem: &str) -> Result<SweepSpec> {
    let spec = SweepSpec {
        grid: r.grid()?,
        threshold: r.threshold,
        ..SweepSpec::new(r.cfg, swept, values, r.out.join(format!("{stem}.csv")))
    };
    spec.validate()?;
    Ok(spec)
}

fn execute_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    prepare_out_dir(spec.output_path.parent().unwrap_or(Path::new(".")))?;
    let result = run_sweep_with_jobs(spec, jobs)?;
    write_csv(&result, &spec.output_path)?;
    render_svg(&result, &spec.svg_path())?;
    println!(
        "{:<12} {:>12} {:>14} {:>12}",
        spec.swept.as_str(),
        "t*",
        "min F",
        "purity"
    );
    for (i, value) in spec.values.iter().enumerate() {
        let t_star = result.scrambling_times[i].map_or_else(|| "none".to_string(), |t| format!("{t:.6}"));
        println!(
            "{:<12} {:>12} {:>14.6} {:>12.6}",
            value,
            t_star,
            result.series[i].min_value(),
            result.initial_purities[i]
        );
    }
    println!("wrote {}", spec.output_path.display());
    println!("wrote {}", spec.svg_path().display());
    Ok(result)
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Curve(args) => {
            let file = load_config(&args)?;
            let r = resolve(&args, &file, ChainConfig::default().d_strength)?;
            let spec = sweep_spec(&r, SweptParameter::DStrength, vec![r.cfg.d_strength], "curve")?;
            execute_sweep(&spec, r.jobs)?;
        }
        Command::SweepD { run, d_values } => {
            let file = load_config(&run)?;
            let r = resolve(&run, &file, ChainConfig::default().d_strength)?;
            let values = pick(d_values, file.get_list("d-values")?, DEFAULT_D_VALUES.to_vec());
            let spec = sweep_spec(&r, SweptParameter::DStrength, values, "sweep_d")?;
            execute_sweep(&spec, r.jobs)?;
        }
        Command::SweepT { run, temperatures } => {
            let file = load_config(&run)?;
            let r = resolve(&run, &file, DEFAULT_T_SWEEP_D)?;
            let values = pick(
                temperatures,
                file.get_list("temperatures")?,
                DEFAULT_TEMPERATURES.to_vec(),
            );
            let spec = sweep_spec(&r, SweptParameter::Temperature, values, "sweep_t")?;
            execute_sweep(&spec, r.jobs)?;
        }
        Command::ModelSelect {
            run,
            d_values,
            temperatures,
        } => {
            let file = load_config(&run)?;
            let r = resolve(&run, &file, DEFAULT_T_SWEEP_D)?;
            let spec = ModelSelectionSpec {
                base: r.cfg,
                grid: r.grid()?,
                threshold: r.threshold,
                d_values: pick(d_values, file.get_list("d-values")?, DEFAULT_D_VALUES.to_vec()),
                temperatures: pick(
                    temperatures,
                    file.get_list("temperatures")?,
                    DEFAULT_TEMPERATURES.to_vec(),
                ),
                t_sweep_d: r.cfg.d_strength,
                jobs: Some(r.jobs),
            };
            // surface bad parameters as argument errors before any model runs
            for model in EvolutionModel::ALL {
                let base = ChainConfig {
                    evolution_model: model,
                    ..spec.base
                };
                sweep_spec(
                    &Resolved { cfg: base, ..r.clone() },
                    SweptParameter::DStrength,
                    spec.d_values.clone(),
                    "x",
                )?;
                let t_base = ChainConfig {
                    d_strength: spec.t_sweep_d,
                    ..base
                };
                sweep_spec(
                    &Resolved {
                        cfg: t_base,
                        ..r.clone()
                    },
                    SweptParameter::Temperature,
                    spec.temperatures.clone(),
                    "x",
                )?;
            }
            prepare_out_dir(&r.out)?;
            let report = model_selection_report_with(&spec);
            let path = r.out.join("model_selection.txt");
            write_atomically(&path, format!("{report}\n").as_bytes())?;
            println!("{report}");
            println!("wrote {}", path.display());
        }
        Command::ValidateConfig(args) => {
            let file = load_config(&args)?;
            let r = resolve(&args, &file, ChainConfig::default().d_strength)?;
            r.cfg.validate()?;
            let grid = r.grid()?;
            let c = &r.cfg;
            for (k, v) in [
                ("n", c.n.to_string()),
                ("j_ising", format_real(c.j_ising)),
                ("h_x", format_real(c.h_x)),
                ("h_z_amp", format_real(c.h_z_amp)),
                ("j_x", format_real(c.j_x)),
                ("j_y", format_real(c.j_y)),
                ("j_z", format_real(c.j_z)),
                ("d_strength", format_real(c.d_strength)),
                ("temperature", format_real(c.temperature)),
                ("evolution_model", c.evolution_model.to_string()),
                ("t_start", format_real(grid.t_start())),
                ("t_end", format_real(grid.t_end())),
                ("steps", grid.steps().to_string()),
                ("threshold", format_real(r.threshold)),
                ("out", r.out.display().to_string()),
                ("jobs", r.jobs.to_string()),
            ] {
                println!("{k}={v}");
            }
            println!("ok");
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) if err.is_argument() => {
            eprintln!("error: {}", describe(&err));
            eprintln!("run with --help for usage");
            2
        }
        Err(err) => {
            eprintln!("error: {}", describe(&err));
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults_resolve_to_documented_values() {
        let cli = Cli::try_parse_from(["scramble", "validate-config"]).unwrap();
        let Command::ValidateConfig(args) = cli.command else {
            panic!()
        };
        let r = resolve(&args, &ConfigFile::default(), 0.0).unwrap();
        assert_eq!(r.cfg, ChainConfig::default());
        assert_eq!(r.grid().unwrap(), TimeGrid::default());
        assert_eq!(r.threshold, 0.9);
        assert_eq!(r.out, PathBuf::from("out"));
    }

    #[test]
    fn negative_values_parse_as_numbers() {
        let cli = Cli::try_parse_from(["scramble", "curve", "--jz", "-2", "--j-ising", "-0.5"]).unwrap();
        let Command::Curve(args) = cli.command else { panic!() };
        assert_eq!(args.jz, Some(-2.0));
        assert_eq!(args.j_ising, Some(-0.5));
    }

    #[test]
    fn config_file_fills_gaps_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "# comment\nn=4\njz=-2\nd-values=0,0.5\n").unwrap();
        let cli = Cli::try_parse_from(["scramble", "curve", "--n", "3", "--config", path.to_str().unwrap()]).unwrap();
        let Command::Curve(args) = cli.command else { panic!() };
        let file = load_config(&args).unwrap();
        let r = resolve(&args, &file, 0.0).unwrap();
        assert_eq!(r.cfg.n, 3);
        assert_eq!(r.cfg.j_z, -2.0);
        assert_eq!(file.get_list("d-values").unwrap(), Some(vec![0.0, 0.5]));
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "spin=1\n").unwrap();
        assert!(ConfigFile::load(&path).unwrap_err().is_argument());
        fs::write(&path, "n 4\n").unwrap();
        assert!(ConfigFile::load(&path).unwrap_err().is_argument());
    }

    #[test]
    fn argument_errors_name_the_flag() {
        let err = Error::argument("h_z_amp", "bad");
        assert!(describe(&err).contains("--hz"));
    }
}
