//! Command-line front end: one subcommand per scenario, plus `run <id>`,
//! `list-scenarios`, and `all`. Exit codes: 0 when every asserted check
//! passed, 1 when a scenario failed (the report is still written), 2 for
//! configuration errors (nothing is run).

use clap::{Args, Parser, Subcommand};
use hardy_lab::report::{resolve_outdir, RunReport};
use hardy_lab::{
    nearest_scenario, run_scenario_reporting, scenario_ids, LabError, RunConfig, ScenarioReport,
    SCENARIOS,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hardy-lab",
    version,
    about = "Numerical experiments on kernels of Toeplitz operators and de Branges-Rovnyak spaces"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Debug, Default)]
struct CommonArgs {
    /// Grid size (power of two, >= 64)
    #[arg(long)]
    n: Option<usize>,
    /// Coefficient/section order (<= n/4)
    #[arg(long)]
    m: Option<usize>,
    /// Relative tolerance for strict kernel cuts
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized probes
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated exponents for the sweep scenario
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Depth of the dyadic Blaschke family
    #[arg(long)]
    blaschke: Option<usize>,
    /// Complement candidate directions
    #[arg(long)]
    d: Option<usize>,
    /// Output directory (default: $HARDY_LAB_OUTDIR, then ./hardy-lab-out)
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Scenario fan-out for multi-scenario runs
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// List scenario ids with one-line descriptions
    ListScenarios {
        /// Print bare ids only
        #[arg(long)]
        machine: bool,
    },
    /// Run one scenario by id
    Run {
        id: String,
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Kernel dimensions of Toeplitz sections across power-symbol exponents
    SweepAlpha(CommonArgs),
    /// Kernels of conj(g)/g symbols versus outer multiples of model spaces
    Theorem1(CommonArgs),
    /// Closed-form identities for projected weighted Szego kernels
    LemmaHss(CommonArgs),
    /// The dyadic Blaschke family and its extra kernel function
    ExampleS4(CommonArgs),
    /// Multiplier-range complement and adjoint-shift boundary eigenvector
    ComplementS5(CommonArgs),
    /// Node-wise witness identity for the extra kernel function
    Theorem2Witness(CommonArgs),
    /// Run every scenario
    All(CommonArgs),
}

fn main() -> ExitCode {
    hardy_core::deterministic_linalg();
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<ExitCode, LabError> {
    let (ids, args): (Vec<&'static str>, CommonArgs) = match cmd {
        Cmd::ListScenarios { machine } => {
            for (id, description) in SCENARIOS {
                if machine {
                    println!("{id}");
                } else {
                    println!("{id:<18} {description}");
                }
            }
            return Ok(ExitCode::SUCCESS);
        }
        Cmd::Run { id, args } => {
            let known = SCENARIOS
                .iter()
                .map(|(s, _)| *s)
                .find(|s| *s == id)
                .ok_or_else(|| {
                    LabError::Config(format!(
                        "unknown scenario `{id}`; nearest match: `{}`",
                        nearest_scenario(&id)
                    ))
                })?;
            (vec![known], args)
        }
        Cmd::SweepAlpha(args) => (vec!["sweep-alpha"], args),
        Cmd::Theorem1(args) => (vec!["theorem1"], args),
        Cmd::LemmaHss(args) => (vec!["lemma-hss"], args),
        Cmd::ExampleS4(args) => (vec!["example-s4"], args),
        Cmd::ComplementS5(args) => (vec!["complement-s5"], args),
        Cmd::Theorem2Witness(args) => (vec!["theorem2-witness"], args),
        Cmd::All(args) => (scenario_ids(), args),
    };

    let cfg = build_config(&args);
    cfg.validate()?;
    let outdir = resolve_outdir(args.outdir.clone());

    let scenarios = run_many(&ids, &cfg, args.jobs.max(1))?;
    let run = RunReport::new(cfg.echo(), scenarios);
    run.write(&outdir).map_err(|e| {
        LabError::Config(format!("cannot write report under {}: {e}", outdir.display()))
    })?;
    print!("{}", run.summary_text());
    println!("report: {}", outdir.join("report.json").display());
    Ok(if run.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn build_config(args: &CommonArgs) -> RunConfig {
    let mut cfg = RunConfig::default();
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }
    if let Some(tol) = args.tol {
        cfg.tol = tol;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(alphas) = &args.alphas {
        cfg.alphas = alphas.clone();
    }
    if let Some(depth) = args.blaschke {
        cfg.m_blaschke = depth;
    }
    if let Some(d) = args.d {
        cfg.d = d;
    }
    cfg
}

/// Run scenarios, optionally fanned out over scoped threads in waves of
/// `jobs`. Every scenario is deterministic and independently seeded, so
/// the results do not depend on the fan-out.
fn run_many(
    ids: &[&'static str],
    cfg: &RunConfig,
    jobs: usize,
) -> Result<Vec<ScenarioReport>, LabError> {
    if jobs <= 1 || ids.len() <= 1 {
        return ids.iter().map(|id| run_scenario_reporting(id, cfg)).collect();
    }
    let mut out = Vec::with_capacity(ids.len());
    for wave in ids.chunks(jobs) {
        let mut results: Vec<Option<Result<ScenarioReport, LabError>>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = wave
                .iter()
                .map(|id| scope.spawn(move || run_scenario_reporting(id, cfg)))
                .collect();
            for handle in handles {
                results.push(Some(handle.join().expect("scenario thread panicked")));
            }
        });
        for r in results.into_iter().flatten() {
            out.push(r?);
        }
    }
    Ok(out)
}
