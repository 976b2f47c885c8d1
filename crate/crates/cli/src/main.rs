use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use nlsp::observables::blowup_criteria_report;
use nlsp::scenarios::{
    self, drivers, parse_scenario, pool_size, run_scenario, suite, verdict_string, write_failure, write_report,
    SweepAxis,
};
use nlsp::RunStatus;

#[derive(Parser)]
#[command(name = "nlsp", version, about = "Schrödinger dynamics with quadratic potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario file and write its CSV series and verdicts.
    Run {
        file: PathBuf,
        /// Base directory for all outputs.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a scenario over a Cartesian parameter grid.
    Sweep {
        file: PathBuf,
        /// `section.key=v1,v2,...`; repeat for more axes.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the built-in invariant suite.
    Check {
        /// Also run the blow-up, scattering and semiclassical drivers.
        #[arg(long)]
        full: bool,
    },
    /// Print the blow-up criteria for a scenario's datum without integrating.
    Criteria { file: PathBuf },
    /// Run one of the phenomenon drivers with its default parameters.
    Driver {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(drivers::DRIVERS))]
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn read(file: &Path) -> Result<String> {
    std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))
}

fn exit_for(status: RunStatus) -> ExitCode {
    match status {
        RunStatus::Completed => ExitCode::SUCCESS,
        RunStatus::BlowUpDetected => ExitCode::from(2),
        RunStatus::ResolutionLost => ExitCode::from(3),
    }
}

fn run(file: &Path, out: &Path) -> Result<ExitCode> {
    let spec = parse_scenario(&read(file)?).with_context(|| format!("parsing {}", file.display()))?;
    // Collecting components drops `.` segments, which `create_dir_all` rejects.
    let dir: PathBuf = out.join(&spec.output.dir).components().collect();
    match run_scenario(&spec) {
        Ok(report) => {
            write_report(&report, &dir)?;
            print!("{}", verdict_string(&report.verdicts));
            Ok(exit_for(report.outcome.status))
        }
        Err(e) => {
            write_failure(&spec.name, &dir, &e.to_string())?;
            Err(e.into())
        }
    }
}

fn sweep(file: &Path, params: &[String], out: &Path) -> Result<ExitCode> {
    let template = read(file)?;
    let axes = params
        .iter()
        .map(|p| SweepAxis::parse(p))
        .collect::<nlsp::Result<Vec<_>>>()?;
    let cells = scenarios::sweep(&template, &axes, pool_size())?;
    scenarios::write_sweep(&axes, &cells, out)?;
    print!("{}", scenarios::summary_csv(&axes, &cells));
    Ok(ExitCode::SUCCESS)
}

fn check(full: bool) -> ExitCode {
    let checks = if full { suite::all_checks() } else { suite::invariant_checks() };
    let mut failed = 0;
    for c in &checks {
        let r = c.run();
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        failed += usize::from(!r.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn criteria(file: &Path) -> Result<ExitCode> {
    let spec = parse_scenario(&read(file)?)?;
    let setup = spec.setup()?;
    let report = blowup_criteria_report(&setup.datum, &setup.potential, &setup.nonlinearity)?;
    for line in report.to_lines() {
        println!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn driver(name: &str, out: &Path) -> Result<ExitCode> {
    let report = drivers::run_driver(name)?;
    report.write(out)?;
    print!("{}", report.table_csv());
    print!("{}", verdict_string(&report.verdicts));
    println!("passed={}", report.passed);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { file, out } => run(file, out),
        Command::Sweep { file, params, out } => sweep(file, params, out),
        Command::Check { full } => Ok(check(*full)),
        Command::Criteria { file } => criteria(file),
        Command::Driver { name, out } => driver(name, out),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
