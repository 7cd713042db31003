use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use saddle_outage::cli::run::{render_solutions, run_compare, run_curve, run_solve, CompareThresholds};
use saddle_outage::cli::{preset, MethodName, ScenarioFlags, ScenarioRequest, PRESETS};
use saddle_outage::{Error, Result};

#[derive(Parser)]
#[command(name = "saddle-outage", version, about = "Outage probability of MRC receivers over Nakagami, Rice and Hoyt branches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability at one or more thresholds.
    Outage(Common),
    /// CDF curve over a threshold grid.
    Curve(Common),
    /// Relative deviation of each method from the first one listed.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.1)]
        max_rel_dev: f64,
        #[arg(long, default_value_t = 0.1)]
        median_rel_dev: f64,
    },
    /// Saddlepoint, ŵ, û and residual per grid point.
    Solve(Common),
    /// Monte Carlo estimate with confidence interval.
    Mc(Common),
    /// List the built-in presets, or print one as a scenario file.
    Presets {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long)]
        mean_db: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// `family:shape:mean_db`, repeatable.
    #[arg(long = "branch")]
    branches: Vec<String>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long)]
    mean_db: Option<f64>,
    /// `start:stop:points`, a single value, or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    x_db: Option<String>,
    /// Comma list of spa, spa-simple, exact, mc.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    paper_mode_kmax: Option<usize>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn request(&self) -> Result<ScenarioRequest> {
        ScenarioRequest::from_flags(&ScenarioFlags {
            scenario: self.scenario.clone(),
            preset: self.preset.clone(),
            branches: self.branches.clone(),
            l: self.l,
            mean_db: self.mean_db,
            x_db: self.x_db.clone(),
            methods: self.method.clone(),
            mc_samples: self.mc_samples,
            seed: self.seed,
            confidence: self.confidence,
            paper_mode_kmax: self.paper_mode_kmax,
            format: self.format.clone(),
            out: self.out.clone(),
        })
    }
}

fn emit(req: &ScenarioRequest, text: &str) -> Result<()> {
    match &req.output.path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn curve(req: &ScenarioRequest, workers: Option<usize>) -> Result<()> {
    let table = run_curve(req, workers)?;
    for n in &table.notes {
        eprintln!("note: {n}");
    }
    emit(req, &table.render(req.output.format))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Outage(c) | Command::Curve(c) => curve(&c.request()?, c.workers)?,
        Command::Mc(c) => {
            let mut req = c.request()?;
            req.methods = vec![MethodName::Mc];
            curve(&req, c.workers)?;
        }
        Command::Solve(c) => {
            let req = c.request()?;
            let rows = run_solve(&req);
            for (db, r) in &rows {
                if let Err(e) = r {
                    eprintln!("note: x_db={db:.6}: {e}");
                }
            }
            emit(&req, &render_solutions(&rows))?;
        }
        Command::Compare {
            common,
            max_rel_dev,
            median_rel_dev,
        } => {
            let req = common.request()?;
            let report = run_compare(
                &req,
                CompareThresholds {
                    max_rel_dev,
                    median_rel_dev,
                },
                common.workers,
            )?;
            emit(&req, &report.render())?;
            return Ok(report.pass);
        }
        Command::Presets { preset: None, .. } => {
            for (name, about) in PRESETS {
                println!("{name:<14} {about}");
            }
        }
        Command::Presets {
            preset: Some(name),
            l,
            mean_db,
        } => print!("{}", preset(&name, l, mean_db)?.to_toml()),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Parse { .. } | Error::Param { .. } => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
