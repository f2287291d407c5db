use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hetnet_cli::search::{search, Objective};
use hetnet_cli::sweep::{run_sweep, Engine, Metric, Param, SweepSpec};
use hetnet_cli::validate::{validate, Reference};
use hetnet_cli::{parse_grid, presets, resolve_config, write_csv};
use hetnet_core::analytic::{AnalyticOptions, Analyzer, LimitMode, LoadMode};
use hetnet_core::model::to_config_text;
use hetnet_core::simulator::SimOptions;

#[derive(Parser)]
#[command(name = "hetnet", version, about = "Uplink coverage and rate for two-tier multi-antenna HetNets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep one parameter and write one CSV row per grid point and engine.
    Sweep(SweepArgs),
    /// Compare analytic SIR coverage with Monte Carlo (or a second analytic run).
    Validate(ValidateArgs),
    /// Grid search for the bias or eta maximising an analytic objective.
    Search(SearchArgs),
    /// List built-in scenarios, or print one as a config file.
    Presets {
        #[arg(long)]
        preset: Option<String>,
    },
}

#[derive(Args)]
struct Scenario {
    /// TOML scenario file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario name (see `hetnet presets`)
    #[arg(long)]
    preset: Option<String>,
    /// displayed-infinite, appendix-finite or exclusion-conditioned
    #[arg(long, default_value = "displayed-infinite")]
    limit_mode: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    drops: u64,
    /// Window half-width, km
    #[arg(long, default_value_t = 10.0)]
    window: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: Scenario,
    #[command(flatten)]
    sim: SimArgs,
    /// lambda_ratio, bias_db, eta, tau_db, rho or n_m
    #[arg(long)]
    param: String,
    /// start:step:stop or a comma-separated list
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value = "sir_coverage")]
    metric: String,
    /// analytic, sim or both
    #[arg(long, default_value = "analytic")]
    engine: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    tau_db: f64,
    /// Rate threshold, bits/s
    #[arg(long, default_value_t = 1e5)]
    rho: f64,
    /// pmf or mean
    #[arg(long, default_value = "pmf")]
    load_mode: String,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    scenario: Scenario,
    #[command(flatten)]
    sim: SimArgs,
    /// SIR thresholds in dB
    #[arg(long, default_value = "-10:5:20", allow_hyphen_values = true)]
    thresholds: String,
    /// Reference engine: sim or analytic
    #[arg(long, default_value = "sim")]
    engine: String,
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    scenario: Scenario,
    /// sir@TAU_DB, rate@RHO or corK@TAU_DB; defaults to sir@ the preset threshold
    #[arg(long)]
    objective: Option<String>,
    /// bias_db or eta
    #[arg(long, default_value = "bias_db")]
    variable: String,
    /// Defaults: -5:1:15 for bias_db, 0:0.1:1 for eta
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value = "pmf")]
    load_mode: String,
}

fn limit_mode(s: &str) -> Result<AnalyticOptions> {
    let m = LimitMode::from_name(s).ok_or_else(|| anyhow!("unknown limit mode {s:?}"))?;
    Ok(AnalyticOptions::default().with_mode(m))
}

fn load_mode(s: &str) -> Result<LoadMode> {
    LoadMode::from_name(s).ok_or_else(|| anyhow!("unknown load mode {s:?}, expected pmf or mean"))
}

fn sim_options(a: &SimArgs) -> SimOptions {
    SimOptions {
        half_width_km: a.window,
        n_drops: a.drops,
        seed: a.seed,
        ..SimOptions::default()
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<ExitCode> {
    let s = &a.scenario;
    let cfg = resolve_config(s.config.as_deref(), s.preset.as_deref())?;
    let param = Param::from_name(&a.param).ok_or_else(|| anyhow!("unknown parameter {:?}", a.param))?;
    let metric = Metric::from_name(&a.metric).ok_or_else(|| anyhow!("unknown metric {:?}", a.metric))?;
    let mut spec = SweepSpec::new(param, parse_grid(&a.grid)?, metric);
    spec.engine = Engine::from_name(&a.engine).ok_or_else(|| anyhow!("unknown engine {:?}", a.engine))?;
    spec.tau_db = a.tau_db;
    spec.rho = a.rho;
    spec.load_mode = load_mode(&a.load_mode)?;
    spec.analytic = limit_mode(&s.limit_mode)?;
    spec.sim = sim_options(&a.sim);
    let rows = run_sweep(&cfg, &spec)?;
    for r in &rows {
        if let Err(e) = &r.outcome {
            eprintln!("{} = {}: {} failed: {e}", param.name(), r.param_value, r.engine);
        }
    }
    let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
    write_csv(s.out.as_deref(), &hetnet_cli::sweep::HEADER, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(a: ValidateArgs) -> Result<ExitCode> {
    let s = &a.scenario;
    let cfg = resolve_config(s.config.as_deref(), s.preset.as_deref())?;
    let opts = limit_mode(&s.limit_mode)?;
    let analyzer = Analyzer::with_options(&cfg, opts)?;
    let reference = match a.engine.as_str() {
        "sim" => Reference::Sim(sim_options(&a.sim)),
        "analytic" => Reference::Analytic(Box::new(analyzer.clone())),
        other => bail!("unknown reference engine {other:?}, expected sim or analytic"),
    };
    let thresholds = parse_grid(&a.thresholds)?;
    let report = validate(&analyzer, &reference, &thresholds, a.tolerance)?;
    write_csv(s.out.as_deref(), &hetnet_cli::validate::HEADER, &report.records())?;
    Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_search(a: SearchArgs) -> Result<ExitCode> {
    let s = &a.scenario;
    let cfg = resolve_config(s.config.as_deref(), s.preset.as_deref())?;
    let lm = load_mode(&a.load_mode)?;
    let objective = match &a.objective {
        Some(o) => Objective::parse(o, lm)?,
        None => {
            let tau_db = s.preset.as_deref().and_then(presets::preset).map_or(0.0, |p| p.tau_db);
            Objective::SirCoverage { tau_db }
        }
    };
    let variable = Param::from_name(&a.variable).ok_or_else(|| anyhow!("unknown variable {:?}", a.variable))?;
    let grid = match (&a.grid, variable) {
        (Some(g), _) => parse_grid(g)?,
        (None, Param::Eta) => parse_grid("0:0.1:1")?,
        (None, _) => parse_grid("-5:1:15")?,
    };
    let res = search(&cfg, &objective, variable, &grid, limit_mode(&s.limit_mode)?)?;
    let records = res.records();
    write_csv(s.out.as_deref(), &hetnet_cli::search::HEADER, &records)?;
    match res.best {
        Some((x, v)) => {
            eprintln!("best {} = {x} ({} = {v:.6})", variable.name(), objective.name());
            Ok(ExitCode::SUCCESS)
        }
        None => bail!("no valid point on the grid"),
    }
}

fn cmd_presets(name: Option<String>) -> Result<ExitCode> {
    match name {
        Some(n) => {
            let p = presets::preset(&n).ok_or_else(|| anyhow!("unknown preset {n:?}"))?;
            print!("{}", to_config_text(&p.config));
        }
        None => {
            for p in presets::all() {
                println!("{:<8} {}", p.name, p.summary);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Sweep(a) => cmd_sweep(a).context("sweep"),
        Cmd::Validate(a) => cmd_validate(a).context("validate"),
        Cmd::Search(a) => cmd_search(a).context("search"),
        Cmd::Presets { preset } => cmd_presets(preset),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
