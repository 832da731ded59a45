//! `hes1`: simulations, steady states, stability verdicts, parameter scans,
//! timescale sweeps and figure reproductions.
//!
//! Exit codes: 0 on success, 1 when the library rejects the request, 2 on
//! malformed command lines.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use hes1::config::{self, ParamsConfig};
use hes1::numeric::fmt15;
use hes1::ode::{integrate, IntegratorConfig, Method};
use hes1::stability::{scan, stability_report, write_scan_csv, ScanAxis, ScanPoint};
use hes1::tikhonov::{eps_sweep, run_figure, Figure, FullState, Reduction, SweepSpec};
use hes1::{DimerParams, Model, ModelParams, StateVector, Variant};

#[derive(Parser)]
#[command(name = "hes1", version, about = "Hes1 autorepression model with promoter binding sites")]
struct Cli {
    /// Directory for CSV and JSON output; created if missing.
    #[arg(long, global = true, env = "HES1_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one model level from a cold start and write its trajectory.
    Simulate {
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(long, default_value = "full")]
        variant: Variant,
        #[command(flatten)]
        integrator: IntegratorArgs,
    },
    /// Print the positive steady state of one or all model levels.
    SteadyState {
        #[command(flatten)]
        params: ParamsArgs,
        /// All levels when omitted.
        #[arg(long)]
        variant: Option<Variant>,
    },
    /// Print the stability analysis of one or all model levels.
    Stability {
        #[command(flatten)]
        params: ParamsArgs,
        /// All levels when omitted.
        #[arg(long)]
        variant: Option<Variant>,
    },
    /// Slope criterion and Jacobian spectrum of the with-dimers model with
    /// Hill-form repression over a parameter grid.
    Scan {
        /// Number of binding sites.
        #[arg(long)]
        n: usize,
        /// Grid axis `name=start:stop:count`; repeatable. Names: r0, k, eps2,
        /// delta1, delta2.
        #[arg(long, value_parser = parse_axis, required = true)]
        grid: Vec<ScanAxis>,
        /// Fixed values `name=value[,name=value..]`. Unset values default to
        /// eps2 = delta1 = delta2 = 1, k = 0.
        #[arg(long, value_parser = parse_assignment, value_delimiter = ',')]
        fix: Vec<(String, f64)>,
    },
    /// Distance between a model level and its reduction as the fast timescale
    /// parameter shrinks.
    Sweep {
        #[command(flatten)]
        params: ParamsArgs,
        /// Reduction arrow, or `all`.
        #[arg(long, default_value = "all")]
        reduction: String,
        /// Strictly decreasing values of the varied parameter.
        #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        /// Start of the window for fast variables; defaults to 10 eps.
        #[arg(long)]
        t_layer: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
        #[arg(long, default_value_t = 0.05)]
        sample_dt: f64,
    },
    /// Run a figure experiment and write trajectories plus a verdict file.
    Reproduce {
        /// fig4, fig5, fig6a, fig6b or all.
        #[arg(long, default_value = "all")]
        figure: String,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ParamsSource {
    /// Bundled parameter set: par-n3, par-n5, par-n9 (par-common is partial).
    #[arg(long)]
    preset: Option<String>,
    /// TOML parameter file.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct ParamsArgs {
    #[command(flatten)]
    source: ParamsSource,
    /// Scalar overrides `name=value[,name=value..]` for kk, delta1, delta2,
    /// theta, eps1 or eps2.
    #[arg(long = "set", value_parser = parse_assignment, value_delimiter = ',')]
    overrides: Vec<(String, f64)>,
}

#[derive(Args)]
struct IntegratorArgs {
    #[arg(long, default_value_t = 100.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-8)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    atol: f64,
    /// implicit-stiff (SDIRK) or explicit-embedded (Dormand-Prince).
    #[arg(long, default_value = "implicit-stiff")]
    method: Method,
    #[arg(long, default_value_t = 0.5)]
    sample_dt: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
}

impl IntegratorArgs {
    fn config(&self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.rtol,
            abs_tol: self.atol,
            t_end: self.t_end,
            max_steps: self.max_steps,
            method: self.method,
            sample_dt: self.sample_dt,
        }
    }
}

impl ParamsArgs {
    fn resolve(&self) -> anyhow::Result<ModelParams> {
        let mut cfg = match (&self.source.preset, &self.source.params) {
            (Some(name), _) => config::preset(name)?,
            (_, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read parameter file {}", path.display()))?;
                ParamsConfig::from_toml_str(&text).with_context(|| format!("malformed parameter file {}", path.display()))?
            }
            (None, None) => unreachable!("clap requires a parameter source"),
        };
        for (key, value) in &self.overrides {
            cfg.set(key, *value)?;
        }
        Ok(cfg.to_params()?)
    }
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let value: f64 = value.trim().parse().map_err(|_| format!("'{value}' is not a number"))?;
    Ok((key.trim().to_string(), value))
}

fn parse_axis(s: &str) -> Result<ScanAxis, String> {
    let (name, range) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=start:stop:count, got '{s}'"))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(format!("expected start:stop:count, got '{range}'"));
    };
    let num = |v: &str| v.parse::<f64>().map_err(|_| format!("'{v}' is not a number"));
    let count: usize = count.parse().map_err(|_| format!("'{count}' is not a point count"))?;
    ScanAxis::linspace(name, num(start)?, num(stop)?, count).map_err(|e| e.to_string())
}

fn out_dir(dir: &Path) -> anyhow::Result<&Path> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn variants(v: Option<Variant>) -> Vec<Variant> {
    v.map_or_else(|| Variant::ALL.to_vec(), |v| vec![v])
}

const SCAN_NAMES: [&str; 5] = ["r0", "k", "eps2", "delta1", "delta2"];

/// Position of a scan parameter in [`SCAN_NAMES`]; `kk` is accepted for `k`.
fn slot(name: &str) -> anyhow::Result<usize> {
    let name = if name == "kk" { "k" } else { name };
    SCAN_NAMES
        .iter()
        .position(|n| *n == name)
        .with_context(|| format!("unknown scan parameter '{name}' (expected {})", SCAN_NAMES.join(", ")))
}

fn run_scan(n: usize, mut axes: Vec<ScanAxis>, fix: &[(String, f64)], dir: &Path) -> anyhow::Result<()> {
    let mut fixed = [f64::NAN, 0.0, 1.0, 1.0, 1.0];
    let mut fixed_slots = Vec::new();
    for (name, value) in fix {
        let i = slot(name)?;
        fixed[i] = *value;
        fixed_slots.push(i);
    }
    let mut slots = Vec::new();
    for axis in &mut axes {
        let i = slot(&axis.name)?;
        if fixed_slots.contains(&i) || slots.contains(&i) {
            bail!("'{}' is given more than once", SCAN_NAMES[i]);
        }
        axis.name = SCAN_NAMES[i].to_string();
        slots.push(i);
    }
    if fixed[0].is_nan() && !slots.contains(&0) {
        bail!("r0 must be scanned with --grid or set with --fix");
    }
    let points = scan(&axes, |coords| {
        let mut v = fixed;
        for (slot, c) in slots.iter().zip(coords) {
            v[*slot] = *c;
        }
        DimerParams::hill(n, v[0], v[1], v[3], v[4], v[2])
    })?;
    let mut buf = Vec::new();
    write_scan_csv(&axes, &points, &mut buf)?;
    write_file(&out_dir(dir)?.join(format!("scan_n{n}.csv")), &String::from_utf8(buf)?)?;
    if axes.len() == 1 {
        report_flips(&axes[0], &points);
    }
    Ok(())
}

fn report_flips(axis: &ScanAxis, points: &[ScanPoint]) {
    for w in points.windows(2) {
        if w[0].verdict.class != w[1].verdict.class {
            println!(
                "verdict changes from {} to {} between {} = {} and {}",
                w[0].verdict.class,
                w[1].verdict.class,
                axis.name,
                fmt15(w[0].coords[0]),
                fmt15(w[1].coords[0])
            );
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate {
            params,
            variant,
            integrator,
        } => {
            let p = params.resolve()?;
            let traj = integrate(&Model::new(variant, &p), &StateVector::cold_start(variant, p.n()), &integrator.config())?;
            let path = out_dir(&cli.out_dir)?.join(format!("simulate_{variant}.csv"));
            write_file(&path, &traj.to_csv_string())
        }
        Command::SteadyState { params, variant } => {
            let p = params.resolve()?;
            println!("r0 = {}", fmt15(p.r0()));
            for v in variants(variant) {
                let model = Model::new(v, &p);
                let ss = model.steady_state()?;
                let residual = model.rhs(&ss)?.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                println!("[{v}]");
                for (name, value) in v.variable_names(p.n()).iter().zip(ss.values()) {
                    println!("{name} = {}", fmt15(*value));
                }
                println!("residual = {}", fmt15(residual));
            }
            Ok(())
        }
        Command::Stability { params, variant } => {
            let p = params.resolve()?;
            for v in variants(variant) {
                println!("[{v}]");
                print!("{}", stability_report(&Model::new(v, &p))?.to_key_value());
            }
            Ok(())
        }
        Command::Scan { n, grid, fix } => run_scan(n, grid, &fix, &cli.out_dir),
        Command::Sweep {
            params,
            reduction,
            eps,
            t_end,
            t_layer,
            rtol,
            atol,
            sample_dt,
        } => {
            let p = params.resolve()?;
            let reductions = if reduction == "all" {
                Reduction::ALL.to_vec()
            } else {
                vec![reduction.parse()?]
            };
            let base = SweepSpec::standard();
            let spec = SweepSpec {
                eps_values: eps,
                t_end,
                t_layer,
                integrator: IntegratorConfig {
                    rel_tol: rtol,
                    abs_tol: atol,
                    t_end,
                    sample_dt,
                    ..base.integrator
                },
            };
            spec.integrator.validate()?;
            let dir = out_dir(&cli.out_dir)?;
            for r in reductions {
                let res = eps_sweep(r, &p, &FullState::sweep_default(p.n()), &spec)?;
                for (e, f) in res.eps_values.iter().zip(&res.failures) {
                    if let Some(f) = f {
                        eprintln!("warning: {r} at eps = {}: {f}", fmt15(*e));
                    }
                }
                write_file(&dir.join(format!("sweep_{r}.csv")), &res.to_csv_string())?;
            }
            Ok(())
        }
        Command::Reproduce { figure } => {
            let figures = if figure == "all" {
                Figure::ALL.to_vec()
            } else {
                vec![figure.parse()?]
            };
            let dir = out_dir(&cli.out_dir)?;
            for f in figures {
                let run = run_figure(f)?;
                for path in run.write(dir)? {
                    println!("wrote {}", path.display());
                }
                for v in &run.verdicts.verdicts {
                    let period = v.period.map_or("none".to_string(), fmt15);
                    println!(
                        "{f} {}: {} (amplitude {}, period {period}), expected {}, {}",
                        v.variant,
                        v.class,
                        fmt15(v.amplitude),
                        v.expected,
                        if v.matches { "match" } else { "MISMATCH" }
                    );
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
