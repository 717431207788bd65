//! Command-line driver: kernel evaluation, estimate-bound sweeps,
//! simulation campaigns, and identity-check reports.
//!
//! All floating-point output is printed with 17 significant digits so that
//! values round-trip exactly. CSV has a header row, comma separators and a
//! `.` decimal point; vector-valued fields use `;` between components.
//! JSON output is newline-delimited, one object per record.
//!
//! A flat `key = value` config file can supply defaults for any flag
//! (`--config run.cfg`); explicit flags win.

pub mod output;
pub mod settings;

use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hypgreen_core::besselproc::{
    killed_density_with_table, BesselIndex, KernelQuery,
};
use hypgreen_core::functionals::{DriftParams, QHittingTable};
use hypgreen_core::hyperbolic::{
    green_comparator, green_function, potential_kernel, GreenRoute,
    HyperbolicPoint, ModelParams,
};
use hypgreen_core::mcsim::{
    simulate_bessel, simulate_gbm_functional, simulate_hbm, write_samples_csv, SimConfig,
};
use hypgreen_core::sweep::{
    self, GridAxis, KernelGridSpec, PairGridSpec, RatioSummary, StabilityReport, SweepPoint,
};
use hypgreen_core::types::{Measure, Method};
use hypgreen_core::verify;

use output::{fmt_f64, OutputSink, Record};
use settings::ConfigMap;

#[derive(Parser)]
#[command(
    name = "hypgreen",
    about = "Green functions and potential kernels of hyperbolic Brownian motion on a half-space",
    version
)]
pub struct Cli {
    /// Flat key=value config file providing defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate a kernel at one point pair.
    Eval {
        #[command(subcommand)]
        target: EvalTarget,
    },
    /// Sweep kernel/comparator ratios over a grid and summarize the spread.
    Bounds {
        #[command(subcommand)]
        target: BoundsTarget,
    },
    /// Run a path-simulation campaign and stream the samples.
    Simulate {
        #[command(subcommand)]
        process: SimulateTarget,
    },
    /// Run a named identity suite.
    Verify {
        /// hw | green-laplace | qpotential-laplace | chapman | lamperti | reflection
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Clone)]
pub struct ModelArgs {
    /// Space dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Spectral parameter lambda >= 0.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Barrier height a.
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Args, Clone)]
pub struct PairArgs {
    /// Point x as comma-separated coordinates, height last: "0,0,2".
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Point y, same format.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// csv or json (newline-delimited objects).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
pub enum EvalTarget {
    /// lambda-Green function of the half-space above the barrier.
    Green {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        pair: PairArgs,
        /// bessel (killed heat kernel) or functional (compensated potential).
        #[arg(long, value_enum)]
        route: Option<RouteArg>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// lambda-potential kernel (no killing).
    Potential {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sharp Green comparator (accepts a = 0).
    Comparator {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Killed Bessel heat kernel at unit barrier.
    Kernel {
        /// Bessel index nu > 0.
        #[arg(long)]
        nu: Option<f64>,
        /// Time argument.
        #[arg(long)]
        t: Option<f64>,
        /// Start height (scalar, > 1).
        #[arg(long)]
        x: Option<String>,
        /// End height (scalar, > 1).
        #[arg(long)]
        y: Option<String>,
        /// speed (default) or lebesgue.
        #[arg(long)]
        measure: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Copy, Clone, ValueEnum)]
pub enum RouteArg {
    Bessel,
    Functional,
}

#[derive(Subcommand)]
pub enum BoundsTarget {
    /// Green function vs its comparator (n > 2).
    Green {
        #[command(flatten)]
        model: ModelArgs,
        /// Grid: "delta:<min>:<max>:<count>:<log|lin>,rho:<min>:<max>:<count>:<log|lin>".
        #[arg(long)]
        grid: Option<String>,
        /// Re-run at doubled density and report stability.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        refine: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Potential kernel vs its comparator (includes the n = 2 branch).
    Potential {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        refine: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Killed Bessel kernel vs its sharp comparator.
    Kernel {
        /// Bessel index nu > 0.
        #[arg(long)]
        nu: Option<f64>,
        /// Grid: "t:<min>:<max>:<count>:<log|lin>,offset:<min>:<max>:<count>:<log|lin>".
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        refine: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Clone)]
pub struct SimArgs {
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Brownian-bridge crossing correction (on by default).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub bridge: bool,
}

#[derive(Subcommand)]
pub enum SimulateTarget {
    /// Bessel process killed at a level.
    Bessel {
        #[arg(long)]
        nu: Option<f64>,
        /// Start (scalar).
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        a: Option<f64>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Geometric Brownian motion with its exponential functional.
    Gbm {
        /// Drift index mu >= 0.
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        a: Option<f64>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Hyperbolic Brownian motion with exit statistics.
    Hbm {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let cfg = ConfigMap::load(cli.config.as_deref())?;
    match cli.command {
        Command::Eval { target } => run_eval(target, &cfg),
        Command::Bounds { target } => run_bounds(target, &cfg),
        Command::Simulate { process } => run_simulate(process, &cfg),
        Command::Verify { suite, seed, out } => run_verify(&suite, seed, out, &cfg),
    }
}

fn parse_point(text: &str) -> Result<HyperbolicPoint> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| anyhow!("bad coordinate `{c}`: {e}")))
        .collect::<Result<_>>()?;
    HyperbolicPoint::from_coords(&coords).map_err(|e| anyhow!("{e}"))
}

fn model(args: &ModelArgs, cfg: &ConfigMap) -> Result<ModelParams> {
    let n = args.n.or(cfg.get_usize("n")?).unwrap_or(3);
    let lambda = args.lambda.or(cfg.get_f64("lambda")?).unwrap_or(0.0);
    let a = args.a.or(cfg.get_f64("a")?).unwrap_or(1.0);
    ModelParams::new(n, lambda, a).map_err(|e| anyhow!("{e}"))
}

fn pair(args: &PairArgs, cfg: &ConfigMap) -> Result<(HyperbolicPoint, HyperbolicPoint)> {
    let x_text = args
        .x
        .clone()
        .or(cfg.get_string("x"))
        .context("missing --x")?;
    let y_text = args
        .y
        .clone()
        .or(cfg.get_string("y"))
        .context("missing --y")?;
    Ok((parse_point(&x_text)?, parse_point(&y_text)?))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Quadrature => "quadrature",
        Method::Inversion => "inversion",
        Method::ClosedForm => "closed-form",
    }
}

fn run_eval(target: EvalTarget, cfg: &ConfigMap) -> Result<i32> {
    match target {
        EvalTarget::Green {
            model: m,
            pair: pr,
            route,
            out,
        } => {
            let p = model(&m, cfg)?;
            let (x, y) = pair(&pr, cfg)?;
            let route = match route.unwrap_or(RouteArg::Bessel) {
                RouteArg::Bessel => GreenRoute::ViaBessel,
                RouteArg::Functional => GreenRoute::ViaFunctional,
            };
            let start = Instant::now();
            let r = green_function(&p, &x, &y, route).map_err(|e| anyhow!("{e}"))?;
            emit_eval(
                &out,
                cfg,
                "green",
                &p,
                &x,
                &y,
                r.value,
                r.abs_err,
                method_name(r.method),
                start.elapsed().as_secs_f64(),
            )?;
            Ok(0)
        }
        EvalTarget::Potential {
            model: m,
            pair: pr,
            out,
        } => {
            let p = model(&m, cfg)?;
            let (x, y) = pair(&pr, cfg)?;
            let start = Instant::now();
            let r = potential_kernel(&p, &x, &y).map_err(|e| anyhow!("{e}"))?;
            emit_eval(
                &out,
                cfg,
                "potential",
                &p,
                &x,
                &y,
                r.value,
                r.abs_err,
                method_name(r.method),
                start.elapsed().as_secs_f64(),
            )?;
            Ok(0)
        }
        EvalTarget::Comparator {
            model: m,
            pair: pr,
            out,
        } => {
            let p = model(&m, cfg)?;
            let (x, y) = pair(&pr, cfg)?;
            let start = Instant::now();
            let r = green_comparator(&p, &x, &y).map_err(|e| anyhow!("{e}"))?;
            emit_eval(
                &out,
                cfg,
                "comparator",
                &p,
                &x,
                &y,
                r.value,
                r.abs_err,
                method_name(r.method),
                start.elapsed().as_secs_f64(),
            )?;
            Ok(0)
        }
        EvalTarget::Kernel {
            nu,
            t,
            x,
            y,
            measure,
            out,
        } => {
            let nu = nu.or(cfg.get_f64("nu")?).context("missing --nu")?;
            let t = t.or(cfg.get_f64("t")?).context("missing --t")?;
            let x: f64 = x
                .or(cfg.get_string("x"))
                .context("missing --x")?
                .parse()
                .context("kernel --x must be a scalar height")?;
            let y: f64 = y
                .or(cfg.get_string("y"))
                .context("missing --y")?
                .parse()
                .context("kernel --y must be a scalar height")?;
            let measure = match measure
                .or(cfg.get_string("measure"))
                .unwrap_or("speed".into())
                .as_str()
            {
                "speed" => Measure::Speed,
                "lebesgue" => Measure::Lebesgue,
                other => bail!("unknown measure `{other}`"),
            };
            let idx = BesselIndex::new(nu).map_err(|e| anyhow!("{e}"))?;
            let q = KernelQuery::new(t, x, y, 1.0, measure).map_err(|e| anyhow!("{e}"))?;
            let start = Instant::now();
            let table = QHittingTable::build(nu, x).map_err(|e| anyhow!("{e}"))?;
            let r = killed_density_with_table(idx, &table, &q).map_err(|e| anyhow!("{e}"))?;
            let mut sink = OutputSink::create(&out, cfg)?;
            let rec = Record::new()
                .field("target", "kernel")
                .f64("nu", nu)
                .f64("t", t)
                .f64("x", x)
                .f64("y", y)
                .field(
                    "measure",
                    if measure == Measure::Speed { "speed" } else { "lebesgue" },
                )
                .f64("value", r.value)
                .f64("abs_err", r.abs_err)
                .field("method", "quadrature")
                .f64("wall_time_s", start.elapsed().as_secs_f64());
            sink.write_record(&rec)?;
            sink.finish()?;
            Ok(0)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_eval(
    out: &OutputArgs,
    cfg: &ConfigMap,
    target: &str,
    p: &ModelParams,
    x: &HyperbolicPoint,
    y: &HyperbolicPoint,
    value: f64,
    abs_err: f64,
    method: &str,
    wall: f64,
) -> Result<()> {
    let mut sink = OutputSink::create(out, cfg)?;
    let rec = Record::new()
        .field("target", target)
        .usize("n", p.n())
        .f64("lambda", p.lambda())
        .f64("a", p.a())
        .point("x", x)
        .point("y", y)
        .f64("value", value)
        .f64("abs_err", abs_err)
        .field("method", method)
        .f64("wall_time_s", wall);
    sink.write_record(&rec)?;
    sink.finish()
}

fn parse_grid_axes(text: &str, expected: &[&str]) -> Result<Vec<GridAxis>> {
    let mut axes = vec![None; expected.len()];
    for part in text.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 5 {
            bail!("grid axis `{part}` must be name:min:max:count:spacing");
        }
        let pos = expected
            .iter()
            .position(|&e| e == fields[0])
            .ok_or_else(|| anyhow!("unknown grid axis `{}` (expected {expected:?})", fields[0]))?;
        let axis = GridAxis {
            min: fields[1].parse().context("bad axis min")?,
            max: fields[2].parse().context("bad axis max")?,
            count: fields[3].parse().context("bad axis count")?,
            log: match fields[4] {
                "log" => true,
                "lin" | "linear" => false,
                other => bail!("spacing must be log or lin, got `{other}`"),
            },
        };
        axis.validate().map_err(|e| anyhow!("{e}"))?;
        axes[pos] = Some(axis);
    }
    axes.into_iter()
        .zip(expected)
        .map(|(a, name)| a.ok_or_else(|| anyhow!("grid axis `{name}` missing")))
        .collect()
}

fn run_bounds(target: BoundsTarget, cfg: &ConfigMap) -> Result<i32> {
    let (points, summary, stability, out, coords) = match target {
        BoundsTarget::Green {
            model: m,
            grid,
            refine,
            out,
        } => {
            let p = model(&m, cfg)?;
            let spec = match grid.or(cfg.get_string("grid")) {
                Some(g) => {
                    let axes = parse_grid_axes(&g, &["delta", "rho"])?;
                    PairGridSpec {
                        delta: axes[0],
                        rho: axes[1],
                    }
                }
                None => PairGridSpec::default(),
            };
            let points =
                sweep::green_ratio_sweep(&p, &spec, GreenRoute::ViaBessel).map_err(|e| anyhow!("{e}"))?;
            let summary = RatioSummary::from_points(&points);
            let stab = if refine {
                let refined = sweep::green_ratio_sweep(&p, &spec.refined(), GreenRoute::ViaBessel)
                    .map_err(|e| anyhow!("{e}"))?;
                Some(sweep::stability(
                    summary,
                    RatioSummary::from_points(&refined),
                    0.10,
                ))
            } else {
                None
            };
            (points, summary, stab, out, ["x_n", "y_n", "rho"])
        }
        BoundsTarget::Potential {
            model: m,
            grid,
            refine,
            out,
        } => {
            let p = model(&m, cfg)?;
            let spec = match grid.or(cfg.get_string("grid")) {
                Some(g) => {
                    let axes = parse_grid_axes(&g, &["delta", "rho"])?;
                    PairGridSpec {
                        delta: axes[0],
                        rho: axes[1],
                    }
                }
                None => PairGridSpec::default(),
            };
            let points = sweep::potential_ratio_sweep(&p, &spec).map_err(|e| anyhow!("{e}"))?;
            let summary = RatioSummary::from_points(&points);
            let stab = if refine {
                let refined =
                    sweep::potential_ratio_sweep(&p, &spec.refined()).map_err(|e| anyhow!("{e}"))?;
                Some(sweep::stability(
                    summary,
                    RatioSummary::from_points(&refined),
                    0.10,
                ))
            } else {
                None
            };
            (points, summary, stab, out, ["x_n", "y_n", "rho"])
        }
        BoundsTarget::Kernel {
            nu,
            grid,
            refine,
            out,
        } => {
            let nu = nu.or(cfg.get_f64("nu")?).context("missing --nu")?;
            let spec = match grid.or(cfg.get_string("grid")) {
                Some(g) => {
                    let axes = parse_grid_axes(&g, &["t", "offset"])?;
                    KernelGridSpec {
                        t: axes[0],
                        offset: axes[1],
                    }
                }
                None => KernelGridSpec::default(),
            };
            let points = sweep::kernel_ratio_sweep(nu, &spec).map_err(|e| anyhow!("{e}"))?;
            let summary = RatioSummary::from_points(&points);
            let stab = if refine {
                let refined =
                    sweep::kernel_ratio_sweep(nu, &spec.refined()).map_err(|e| anyhow!("{e}"))?;
                Some(sweep::stability(
                    summary,
                    RatioSummary::from_points(&refined),
                    0.10,
                ))
            } else {
                None
            };
            (points, summary, stab, out, ["t", "x", "y"])
        }
    };
    emit_bounds(&out, cfg, &coords, &points, summary, stability)?;
    Ok(if summary.all_finite_positive { 0 } else { 1 })
}

fn emit_bounds(
    out: &OutputArgs,
    cfg: &ConfigMap,
    coords: &[&str; 3],
    points: &[SweepPoint],
    summary: RatioSummary,
    stability: Option<StabilityReport>,
) -> Result<()> {
    let mut sink = OutputSink::create(out, cfg)?;
    for pt in points {
        let rec = Record::new()
            .f64(coords[0], pt.coords[0])
            .f64(coords[1], pt.coords[1])
            .f64(coords[2], pt.coords[2])
            .f64("ratio", pt.ratio);
        sink.write_record(&rec)?;
    }
    let mut lines = vec![format!(
        "summary: n_points={} min={} max={} spread={} finite_positive={}",
        summary.n_points,
        fmt_f64(summary.min),
        fmt_f64(summary.max),
        fmt_f64(summary.spread()),
        summary.all_finite_positive
    )];
    if let Some(st) = stability {
        lines.push(format!(
            "refinement: min_shift={} max_shift={} stable={}",
            fmt_f64(st.min_shift),
            fmt_f64(st.max_shift),
            st.stable
        ));
    }
    sink.write_summary(&lines)?;
    sink.finish()
}

fn sim_config(sim: &SimArgs, cfg: &ConfigMap) -> Result<SimConfig> {
    Ok(SimConfig {
        dt: sim.dt.or(cfg.get_f64("dt")?).unwrap_or(1e-3),
        n_paths: sim.paths.or(cfg.get_u64("paths")?).unwrap_or(10_000),
        seed: sim.seed.or(cfg.get_u64("seed")?).unwrap_or(1),
        horizon: sim.horizon.or(cfg.get_f64("horizon")?).unwrap_or(10.0),
        crossing_correction: sim.bridge,
    })
}

fn run_simulate(target: SimulateTarget, cfg: &ConfigMap) -> Result<i32> {
    match target {
        SimulateTarget::Bessel {
            nu,
            x,
            a,
            sim,
            out,
        } => {
            let nu = nu.or(cfg.get_f64("nu")?).context("missing --nu")?;
            let x0: f64 = x
                .or(cfg.get_string("x"))
                .context("missing --x")?
                .parse()
                .context("--x must be a scalar start")?;
            let a = a.or(cfg.get_f64("a")?).unwrap_or(1.0);
            let sc = sim_config(&sim, cfg)?;
            let samples = simulate_bessel(BesselIndex::new(nu).map_err(|e| anyhow!("{e}"))?, x0, a, &sc)
                .map_err(|e| anyhow!("{e}"))?;
            let mut w = output::open_writer(out.out.as_deref())?;
            write_samples_csv(&mut w, sc.horizon, &samples)?;
            Ok(0)
        }
        SimulateTarget::Gbm { mu, x, a, sim, out } => {
            let mu = mu.or(cfg.get_f64("mu")?).context("missing --mu")?;
            let x0: f64 = x
                .or(cfg.get_string("x"))
                .context("missing --x")?
                .parse()
                .context("--x must be a scalar start")?;
            let a = a.or(cfg.get_f64("a")?).unwrap_or(1.0);
            let sc = sim_config(&sim, cfg)?;
            let dp = DriftParams::new(mu, 0.0).map_err(|e| anyhow!("{e}"))?;
            let samples = simulate_gbm_functional(dp, x0, a, &sc).map_err(|e| anyhow!("{e}"))?;
            let mut w = output::open_writer(out.out.as_deref())?;
            write_samples_csv(&mut w, sc.horizon, &samples)?;
            Ok(0)
        }
        SimulateTarget::Hbm {
            model: m,
            x,
            sim,
            out,
        } => {
            let p = model(&m, cfg)?;
            let x_text = x.or(cfg.get_string("x")).context("missing --x")?;
            let start = parse_point(&x_text)?;
            let sc = sim_config(&sim, cfg)?;
            let records = simulate_hbm(&p, &start, &sc).map_err(|e| anyhow!("{e}"))?;
            let mut w = output::open_writer(out.out.as_deref())?;
            writeln!(w, "path_id,t,exit_time,exit_tilde,final_height")?;
            for r in &records {
                let t = r.exit_time.unwrap_or(sc.horizon);
                let exit_time = r
                    .exit_time
                    .map(|v| fmt_f64(v))
                    .unwrap_or_default();
                let tilde = r
                    .exit_tilde
                    .as_ref()
                    .map(|v| {
                        v.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(";")
                    })
                    .unwrap_or_default();
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    r.path_id,
                    fmt_f64(t),
                    exit_time,
                    tilde,
                    fmt_f64(r.final_height)
                )?;
            }
            Ok(0)
        }
    }
}

fn run_verify(suite: &str, seed: Option<u64>, out: OutputArgs, cfg: &ConfigMap) -> Result<i32> {
    let seed = seed.or(cfg.get_u64("seed")?).unwrap_or(20_240_901);
    let report = verify::run_suite(suite, seed).map_err(|e| anyhow!("{e}"))?;
    let mut sink = OutputSink::create(&out, cfg)?;
    for c in &report.checks {
        let rec = Record::new()
            .field("suite", &report.suite)
            .field("check", &c.name)
            .f64("measured", c.measured)
            .f64("tolerance", c.tolerance)
            .field("status", if c.passed { "pass" } else { "FAIL" });
        sink.write_record(&rec)?;
        eprintln!(
            "{} {}: measured {} against tolerance {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            fmt_f64(c.measured),
            fmt_f64(c.tolerance)
        );
    }
    sink.finish()?;
    Ok(if report.passed() { 0 } else { 1 })
}

use std::io::Write;
