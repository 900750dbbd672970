use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use netsir::runner::{run_scenario, run_sweep, RunOptions};
use netsir::{Analysis, Result, Scenario, SweepSpec};

/// Network SIR simulator and infection-curve analyzer.
#[derive(Parser)]
#[command(name = "netsir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and run every analysis it lists.
    Simulate(FileArgs),
    /// Predict curve shapes; add --resolve-undetermined to check them.
    Classify(FileArgs),
    /// Limit state and its stability.
    Limit(FileArgs),
    /// Run a built-in scenario: example1, fig2 or fig5.
    Reproduce {
        #[arg(value_parser = ["example1", "fig2", "fig5"])]
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a scenario over a list of parameter values.
    Sweep(FileArgs),
}

#[derive(Args)]
struct FileArgs {
    file: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Directory for CSV, report and SVG outputs.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also write SVG charts.
    #[arg(long)]
    svg: bool,
    /// Integrate to settle shapes the initial data leaves open.
    #[arg(long)]
    resolve_undetermined: bool,
    #[arg(long)]
    tol_abs: Option<f64>,
    #[arg(long)]
    tol_rel: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
}

impl Common {
    fn apply(&self, sc: &mut Scenario) {
        if let Some(v) = self.tol_abs {
            sc.integrator.abs_tol = v;
        }
        if let Some(v) = self.tol_rel {
            sc.integrator.rel_tol = v;
        }
        if let Some(v) = self.horizon {
            sc.horizon = v;
        }
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            out_dir: Some(self.out_dir.clone()),
            svg: self.svg,
            resolve_undetermined: self.resolve_undetermined,
        }
    }
}

fn scenario_run(mut sc: Scenario, common: &Common, only: Option<Analysis>) -> Result<bool> {
    common.apply(&mut sc);
    if let Some(a) = only {
        sc.analyses = BTreeSet::from([a]);
    }
    sc.integrator.validate()?;
    let rep = run_scenario(&sc, &common.options())?;
    print!("{rep}");
    Ok(!rep.has_failures())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(f) => scenario_run(Scenario::load(&f.file)?, &f.common, None),
        Command::Classify(f) => {
            scenario_run(Scenario::load(&f.file)?, &f.common, Some(Analysis::Classify))
        }
        Command::Limit(f) => scenario_run(Scenario::load(&f.file)?, &f.common, Some(Analysis::Limit)),
        Command::Reproduce { name, common } => {
            let sc = Scenario::builtin(&name).expect("clap restricts the names");
            scenario_run(sc, &common, None)
        }
        Command::Sweep(f) => {
            let mut spec = SweepSpec::load(&f.file)?;
            f.common.apply(&mut spec.base);
            let (_, csv) = run_sweep(&spec, &f.common.options())?;
            print!("{csv}");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
