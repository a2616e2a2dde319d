use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirichlet_lab::scenario::{bundled, bundled_names, parse_scenario, run, Op};
use dirichlet_lab::LabError;

const EXIT_NUMERICAL: u8 = 1;
const EXIT_NOT_MET: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "dirlab", version, about = "Local Dirichlet integrals of distance-type outer functions")]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for CSV output.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Group,
}

#[derive(Args, Clone)]
struct Input {
    /// Scenario file (TOML key-value).
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `-D set.depth=10`; `-D key=` removes it.
    #[arg(short = 'D', value_name = "KEY=VALUE")]
    define: Vec<String>,
}

#[derive(Subcommand)]
enum Group {
    /// Build a set or report its statistics.
    #[command(subcommand)]
    Set(SetCmd),
    /// Classify a set (carleson, K, L1, L2).
    #[command(subcommand)]
    Class(ClassCmd),
    /// Local integrals, energy and D_mu.
    #[command(subcommand)]
    Dirichlet(DirichletCmd),
    /// Carleson-measure and multiplier tests.
    #[command(subcommand)]
    Carleson(CarlesonCmd),
    /// Capacity, polarity and cyclicity criteria.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Run a scenario pipeline.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Subcommand)]
enum SetCmd {
    Build(Input),
    Stats(Input),
}

#[derive(Subcommand)]
enum ClassCmd {
    Test(Input),
}

#[derive(Subcommand)]
enum DirichletCmd {
    Local(Input),
    Energy(Input),
    Mu(Input),
}

#[derive(Subcommand)]
enum CarlesonCmd {
    Ars(Input),
    Onebox(Input),
    Cn(Input),
    Verdict(Input),
}

#[derive(Subcommand)]
enum CapacityCmd {
    Series(Input),
    Polar(Input),
    Cyclic(Input),
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run a scenario file or a bundled scenario by name.
    Run {
        scenario: String,
        #[arg(short = 'D', value_name = "KEY=VALUE")]
        define: Vec<String>,
    },
    /// List bundled scenarios.
    List,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return usage(e);
        }
    }

    let (text, mut defines, ops) = match cli.command {
        Group::Experiment(ExperimentCmd::List) => {
            for n in bundled_names() {
                println!("{n}");
            }
            return ExitCode::SUCCESS;
        }
        Group::Experiment(ExperimentCmd::Run { scenario, define }) => {
            let text = match bundled(&scenario) {
                Some(t) => t.to_string(),
                None => match std::fs::read_to_string(&scenario) {
                    Ok(t) => t,
                    Err(e) => return usage(format!("cannot read {scenario}: {e}")),
                },
            };
            (text, define, Vec::new())
        }
        other => {
            let (input, op) = match other {
                Group::Set(SetCmd::Build(i)) => (i, Op::SetBuild),
                Group::Set(SetCmd::Stats(i)) => (i, Op::SetStats),
                Group::Class(ClassCmd::Test(i)) => (i, Op::ClassTest),
                Group::Dirichlet(DirichletCmd::Local(i)) => (i, Op::DirichletLocal),
                Group::Dirichlet(DirichletCmd::Energy(i)) => (i, Op::DirichletEnergy),
                Group::Dirichlet(DirichletCmd::Mu(i)) => (i, Op::DirichletMu),
                Group::Carleson(CarlesonCmd::Ars(i)) => (i, Op::CarlesonArs),
                Group::Carleson(CarlesonCmd::Onebox(i)) => (i, Op::CarlesonOnebox),
                Group::Carleson(CarlesonCmd::Cn(i)) => (i, Op::CarlesonCn),
                Group::Carleson(CarlesonCmd::Verdict(i)) => (i, Op::CarlesonVerdict),
                Group::Capacity(CapacityCmd::Series(i)) => (i, Op::CapacitySeries),
                Group::Capacity(CapacityCmd::Polar(i)) => (i, Op::CapacityPolar),
                Group::Capacity(CapacityCmd::Cyclic(i)) => (i, Op::CapacityCyclic),
                Group::Experiment(_) => unreachable!("handled above"),
            };
            let text = match &input.config {
                Some(p) => match std::fs::read_to_string(p) {
                    Ok(t) => t,
                    Err(e) => return usage(format!("cannot read {}: {e}", p.display())),
                },
                None => String::new(),
            };
            (text, input.define, vec![op])
        }
    };
    if let Some(t) = cli.tol {
        defines.push(format!("quad.rel_tol={t:e}"));
    }

    let scenario = match parse_scenario(&text, &defines) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    match run(scenario, &ops, cli.out_dir.as_deref()) {
        Ok(report) => {
            print!("{}", report.summary());
            for p in &report.written {
                println!("wrote {}", p.display());
            }
            if report.hypotheses_met() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NOT_MET)
            }
        }
        Err(e @ (LabError::Untrusted { .. } | LabError::NonConvergence { .. })) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(e @ LabError::GaugeIntegrable(_)) => {
            eprintln!("hypotheses not met: {e}");
            ExitCode::from(EXIT_NOT_MET)
        }
        Err(e) => usage(e),
    }
}
