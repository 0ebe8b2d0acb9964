use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dnde_core::barenblatt::SourceProfile;
use dnde_core::config::ExperimentConfig;
use dnde_core::error::{Error, Result};
use dnde_core::grid::RadialGrid;
use dnde_core::special::SharpConstants;
use dnde_core::suites::{self, default_config, run_suite};

#[derive(Parser)]
#[command(
    name = "dnde",
    version,
    about = "radial laboratory for the doubly nonlinear diffusion equation"
)]
struct Cli {
    /// Experiment configuration (JSON). Defaults to the invoked suite's
    /// built-in settings; `sweep` expects a JSON array of configs.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the configured output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Emit machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the closed-form sharp constants for the configured parameters.
    Constants,
    /// Sample the exact source solution and print its functionals.
    Barenblatt,
    /// Run the configured evolution and write its diagnostic series.
    Evolve,
    /// Run one verification suite and report pass/fail per check.
    Verify { suite: String },
    /// Run one suite over every config in a JSON array.
    Sweep { suite: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Load the experiment config: an explicit file when given, otherwise the
/// named suite's defaults; `--out` overrides the output directory.
fn load_config(cli: &Cli, fallback_suite: &str) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => default_config(fallback_suite)?,
    };
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::Constants => {
            let cfg = load_config(cli, "constants")?;
            let params = cfg.params()?;
            let constants = SharpConstants::compute(&params)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&constants).unwrap());
            } else {
                println!("n = {}, p = {}, gamma = {} (b = {:.6}, sigma = {:.6})",
                    params.n, params.p, params.gamma, params.b, params.sigma);
                println!("profile mass integral   {:.12e}", constants.mass_integral);
                println!("profile height C        {:.12e}", constants.height);
                println!("sharp product C_iso     {:.12e}", constants.c_iso);
                if let Some(s) = constants.s_sobolev {
                    println!("sharp Sobolev S_(n,p)   {:.12e}", s);
                }
                if let (Some(s), Some(e), Some(c)) =
                    (constants.gn_s, constants.gn_exponent, constants.gn_constant)
                {
                    println!("interpolation s         {:.12e}", s);
                    println!("interpolation exponent  {:.12e}", e);
                    println!("interpolation constant  {:.12e}", c);
                }
            }
            Ok(true)
        }
        Cmd::Barenblatt => {
            let cfg = load_config(cli, "quadrature")?;
            let params = cfg.params()?;
            let profile = SourceProfile::new(params)?;
            let s0 = cfg.initial_family_parameter();
            let exact = profile.functionals(s0)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&exact).unwrap());
            } else {
                println!("source solution at family parameter s = {s0}");
                println!("mass              {:.12e}", exact.mass);
                println!("entropy integral  {:.12e}", exact.entropy_integral);
                println!("Renyi entropy     {:.12e}", exact.renyi_entropy);
                println!("entropy power     {:.12e}", exact.entropy_power);
                println!("q-moment          {:.12e}", exact.q_moment);
                println!("Fisher info       {:.12e}", exact.fisher);
                println!("product           {:.12e}", exact.product);
            }
            if cfg.output.emit_csv {
                let r_max = cfg.resolve_r_max()?;
                let grid = RadialGrid::new(cfg.dimension, r_max, cfg.grid.cells)?;
                let mut body = String::from("r,u,v\n");
                for &r in grid.centers() {
                    let u = profile.solution(r, s0)?;
                    let v = profile
                        .pressure(r, s0)
                        .unwrap_or(0.0);
                    body.push_str(&format!("{r:.12e},{u:.12e},{v:.12e}\n"));
                }
                let dir = PathBuf::from(&cfg.output.dir);
                std::fs::create_dir_all(&dir)?;
                let path = dir.join("profile.csv");
                std::fs::write(&path, body)?;
                if !cli.json {
                    println!("profile written to {}", path.display());
                }
            }
            Ok(true)
        }
        Cmd::Evolve => {
            let cfg = load_config(cli, "self_similar")?;
            let out = suites::run_experiment(&cfg)?;
            let last = out.records.last().expect("evolve emits records");
            if cli.json {
                let summary = serde_json::json!({
                    "steps": out.steps,
                    "t": last.t,
                    "mass": last.mass,
                    "entropy_integral": last.entropy_integral,
                    "entropy_power": last.entropy_power,
                    "fisher": last.fisher,
                    "product": last.product,
                    "pressure_residual": out.pressure_residual,
                    "series_file": out.series_file,
                });
                println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            } else {
                println!("evolved to t = {:.6} in {} steps", last.t, out.steps);
                println!("mass {:.9}, E {:.9}, N {:.9}, I {:.9}, Q {:.9}",
                    last.mass, last.entropy_integral, last.entropy_power,
                    last.fisher, last.product);
                println!("pressure residual {:.3e}", out.pressure_residual);
                if let Some(path) = &out.series_file {
                    println!("series written to {path}");
                }
            }
            Ok(true)
        }
        Cmd::Verify { suite } => {
            let cfg = load_config(cli, suite)?;
            let report = run_suite(suite, &cfg)?;
            if cli.json {
                println!("{}", report.to_json()?);
            } else {
                print!("{}", report.render_lines());
                println!(
                    "suite {}: {}",
                    report.suite,
                    if report.pass() { "PASS" } else { "FAIL" }
                );
            }
            Ok(report.pass())
        }
        Cmd::Sweep { suite } => {
            let path = cli.config.as_ref().ok_or_else(|| {
                Error::BadConfig("sweep needs --config <file> with a JSON array of configs".into())
            })?;
            let text = std::fs::read_to_string(path)?;
            let configs: Vec<ExperimentConfig> =
                serde_json::from_str(&text).map_err(|e| Error::BadConfig(e.to_string()))?;
            let reports = suites::sweep(suite, &configs)?;
            let all_pass = reports.iter().all(|r| r.pass());
            if cli.json {
                let rendered: Vec<serde_json::Value> = reports
                    .iter()
                    .map(|r| serde_json::to_value(r).unwrap())
                    .collect();
                println!("{}", serde_json::to_string_pretty(&rendered).unwrap());
            } else {
                for (i, report) in reports.iter().enumerate() {
                    print!("{}", report.render_lines());
                    println!(
                        "suite {} [run {}]: {}",
                        report.suite,
                        i,
                        if report.pass() { "PASS" } else { "FAIL" }
                    );
                }
            }
            Ok(all_pass)
        }
    }
}
