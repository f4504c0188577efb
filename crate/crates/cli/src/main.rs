use anyhow::{Context, Result};
use chernres::complexes::ChiKind;
use chernres_cli::report::Report;
use chernres_cli::run::{oracle, run, Options};
use chernres_cli::scenario::parse_scenario;
use chernres_cli::verify::verify;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Residue currents of characteristic forms of regularized connections.
#[derive(Parser)]
#[command(name = "chernres", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pair the regularized forms along the ε ladder and extrapolate.
    Run(Common),
    /// Check pointwise invariants at random points.
    Verify {
        #[command(flatten)]
        common: Common,
        /// algebra, cech, connections, vanishing, transgression or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Closed-form reference values only.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Output directory for the JSON report and ladder CSVs.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "CHERNRES_THREADS", default_value_t = 0)]
    threads: usize,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
    /// Comma-separated decreasing ε values, overriding the scenario.
    #[arg(long, value_delimiter = ',')]
    epsilon_ladder: Option<Vec<f64>>,
    /// Cutoff family: standard or wide.
    #[arg(long)]
    chi: Option<String>,
}

impl Common {
    fn options(&self) -> Result<Options> {
        let chi = self.chi.as_deref().map(ChiKind::parse).transpose()?;
        rayon::ThreadPoolBuilder::new().num_threads(self.threads).build_global().context("starting the thread pool")?;
        Ok(Options {
            seed: self.seed,
            threads: rayon::current_num_threads(),
            tolerance_scale: self.tolerance_scale,
            ladder: self.epsilon_ladder.clone(),
            chi,
        })
    }
}

fn print_summary(r: &Report, path: &std::path::Path) {
    for e in &r.estimates {
        let est = &e.estimate;
        println!("{:>8} @ {:<12} {:+.6}{:+.6}i  ± {:.2e}{}", e.phi, e.test, est.limit.re, est.limit.im, est.error, if est.flagged { "  (flagged)" } else { "" });
    }
    for o in &r.oracle {
        println!("oracle {:>8}  {:+.6}{:+.6}i", o.phi, o.value.re, o.value.im);
    }
    for c in &r.cycle {
        println!("cycle  {:>8} @ {:<12} {:+.6}{:+.6}i", c.phi, c.test, c.expected.re, c.expected.im);
    }
    for c in &r.checks {
        println!("[{}] {:<14} {}  ({:.3e} <= {:.1e})", if c.pass { "pass" } else { "FAIL" }, c.suite, c.name, c.value, c.tolerance);
        if !c.pass && !c.detail.is_empty() {
            println!("       {}", c.detail);
        }
    }
    println!("{} in {:.1}s, report at {}", if r.passed { "passed" } else { "FAILED" }, r.runtime_seconds, path.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<Report> {
        let (common, report) = match &cli.command {
            Command::Run(c) => (c, run(&parse_scenario(&c.scenario)?, &c.options()?)?),
            Command::Verify { common, suite } => (common, verify(&parse_scenario(&common.scenario)?, suite, &common.options()?)?),
            Command::Oracle(c) => (c, oracle(&parse_scenario(&c.scenario)?, &c.options()?)?),
        };
        let path = report.write(&common.out)?;
        print_summary(&report, &path);
        Ok(report)
    })();
    match result {
        Ok(r) if r.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
