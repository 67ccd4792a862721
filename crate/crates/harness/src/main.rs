use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ucblab_harness::bounds::{self, Lemma};
use ucblab_harness::error::{HarnessError, Result};
use ucblab_harness::output::format_sig;
use ucblab_harness::{emit_csv, index_table, oracle_check, run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "ucblab", version, about = "UCB index-policy laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded experiment and write the regret curve as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to `output_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        replications: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print closed-form index values for a fixed estimate.
    IndexTable {
        #[arg(long)]
        family: String,
        /// Comma-separated key=value estimate parameters.
        #[arg(long)]
        params: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<u64>,
    },
    /// Compare simulated tail frequencies with the analytic lemma bounds.
    VerifyBounds {
        #[arg(long)]
        lemma: String,
        #[arg(long, default_value_t = 100_000)]
        draws: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Report closed-form vs brute-force oracle errors.
    OracleCheck {
        #[arg(long, default_value = "all")]
        family: String,
        #[arg(long, default_value_t = ucblab_core::oracles::DEFAULT_RESOLUTION)]
        grid_resolution: usize,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            replications,
            seed,
            workers,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(r) = replications {
                cfg.replications = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out = out
                .or_else(|| cfg.output_path.as_ref().map(PathBuf::from))
                .ok_or_else(|| HarnessError::field("output_path", "give --out or set output_path"))?;
            let curve = run_experiment(&cfg, workers)?;
            emit_csv(&curve, &out)?;
            eprintln!("wrote {}", out.display());
        }
        Command::IndexTable { family, params, n, t } => {
            let params = index_table::parse_params(&params)?;
            let scenario = index_table::scenario_from_params(&family, &params)?;
            print!("{}", index_table::index_table(&scenario, &n, &t)?);
        }
        Command::VerifyBounds { lemma, draws, seed } => {
            let lemma: Lemma = lemma.parse()?;
            let checks = bounds::verify(lemma, draws, seed)?;
            println!("case,empirical,analytic,result");
            for c in &checks {
                println!(
                    "{},{},{},{}",
                    c.case,
                    format_sig(c.empirical, 9),
                    format_sig(c.analytic, 9),
                    if c.pass { "pass" } else { "FAIL" }
                );
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(HarnessError::Verification(format!("{failed} of {} checks failed", checks.len())));
            }
        }
        Command::OracleCheck {
            family,
            grid_resolution,
        } => {
            let reports = oracle_check::check(&family, grid_resolution)?;
            println!("family,m_cases,m_max_abs_err,index_cases,index_max_abs_err,result");
            for r in &reports {
                println!(
                    "{},{},{:.3e},{},{:.3e},{}",
                    r.family,
                    r.m_cases,
                    r.m_max_abs_err,
                    r.index_cases,
                    r.index_max_abs_err,
                    if r.pass() { "pass" } else { "FAIL" }
                );
            }
            if reports.iter().any(|r| !r.pass()) {
                return Err(HarnessError::Verification("closed form and oracle disagree".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
