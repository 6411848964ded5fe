//! `geoharnack`: numerics and Monte Carlo experiments for subordinate
//! Brownian motions.
//!
//! Exit status: 0 when every check passes (inconclusive verdicts only warn),
//! 1 when a check fails, 2 on configuration errors, 3 on numerical failures.

mod config;
mod ops;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, Operation, Overrides, RunConfig};
use ops::Status;

#[derive(Parser)]
#[command(name = "geoharnack", version, about = "Harnack-inequality numerics for subordinate Brownian motions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate φ and φ' and certify upper scaling.
    Phi,
    /// Lévy or potential density on the t grid.
    Density {
        #[arg(value_parser = ["levy", "potential"])]
        kind: String,
    },
    /// Jump kernel j or Green kernel g on the r grid.
    Kernel {
        #[arg(value_parser = ["j", "g"])]
        kind: String,
    },
    /// Small-λ transience test in dimension d.
    Transience,
    /// Exit samples from a ball, or subordinator values at time 1.
    Simulate {
        #[arg(value_parser = ["exit", "subordinator"], default_value = "exit")]
        what: String,
    },
    /// Monte Carlo experiments.
    Harnack {
        #[arg(value_parser = ["scan", "poisson", "green", "exit-time", "ks"])]
        experiment: String,
    },
    /// Analytic verification pipeline: certification, density asymptotics and bounds, kernels.
    Verify {
        #[arg(value_parser = ["all", "certify", "asymptotics", "bounds", "kernels"], default_value = "all")]
        stage: String,
    },
    /// Run whatever the configuration file given by `--config` selects.
    Run,
}

fn build_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    if matches!(cli.command, Command::Run) && cli.flags.config.is_none() {
        return Err(ConfigError("`run` needs --config FILE".into()));
    }
    let mut config = match &cli.flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let selected = match &cli.command {
        Command::Phi => Some((Operation::Phi, None)),
        Command::Density { kind } => Some((Operation::Density, Some(kind))),
        Command::Kernel { kind } => Some((Operation::Kernel, Some(kind))),
        Command::Transience => Some((Operation::Transience, None)),
        Command::Simulate { what } => Some((Operation::Simulate, Some(what))),
        Command::Harnack { experiment } => Some((Operation::Harnack, Some(experiment))),
        Command::Verify { stage } => Some((Operation::Verify, Some(stage))),
        Command::Run => None,
    };
    if let Some((op, target)) = selected {
        config.operation = op;
        config.target = target.cloned();
    }
    cli.flags.apply(&mut config);
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("geoharnack: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("geoharnack: cannot size worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match ops::execute(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("geoharnack: numerical failure: {e}");
            return ExitCode::from(3);
        }
    };
    if let Err(e) = output::write_outputs(&config, &outcome) {
        eprintln!("geoharnack: cannot write outputs to {}: {e}", config.output_dir.display());
        return ExitCode::from(3);
    }
    for v in &outcome.verdicts {
        let tag = match v.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        println!("{tag:<12} {:<28} {}", v.check, v.detail);
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    match output::overall(&outcome.verdicts) {
        Status::Fail => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}
