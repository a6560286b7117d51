//! `njc` — command-line front end: run built-in presets or scenario files,
//! list presets, and cross-validate the closed-form evolution against the
//! brute-force oracle.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use njc::algebra::ModelParams;
use njc::scenario::{self, FieldSpec, Scenario};
use njc::{NjcError, Result};

#[derive(Parser)]
#[command(
    name = "njc",
    version,
    about = "Nonlinear Jaynes-Cummings simulator: exact dressed spectra, \
             closed-form dynamics, collapse/revival observables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in preset or a scenario file; writes CSVs plus a manifest
    Run {
        /// Preset name (see `njc list`) or path to a scenario file
        target: String,
        /// Output directory for the CSV/JSON artifacts
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the Fock cutoff n_max
        #[arg(long)]
        n_max: Option<usize>,
        /// Override the number of time samples
        #[arg(long)]
        samples: Option<usize>,
        /// Override the detuning Δ
        #[arg(long)]
        delta: Option<f64>,
        /// Override the coupling strength g
        #[arg(long)]
        g: Option<f64>,
        /// Override the Kerr strength k
        #[arg(long)]
        k: Option<f64>,
        /// Override the coherent-field mean photon number n̄
        #[arg(long)]
        nbar: Option<f64>,
    },
    /// List the built-in presets with one-line descriptions
    List,
    /// Cross-validate closed-form evolution against the brute-force oracle
    Verify {
        /// Number of random parameter draws
        #[arg(long, default_value_t = 100)]
        draws: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            target,
            out,
            n_max,
            samples,
            delta,
            g,
            k,
            nbar,
        } => {
            let mut scenario = resolve_target(&target)?;
            apply_overrides(&mut scenario, n_max, samples, delta, g, k, nbar)?;
            let files = njc::runner::run_scenario(&scenario, &out)?;
            for file in &files {
                println!("wrote {}", file.display());
            }
            Ok(())
        }
        Command::List => {
            for (name, description) in scenario::list_presets() {
                println!("{name:<7} {description}");
            }
            Ok(())
        }
        Command::Verify { draws } => {
            let report = njc::dynamics::oracle_equivalence_suite(draws, 42)?;
            println!("draws:               {}", report.draws);
            println!("max deviation:       {:.3e}", report.max_deviation);
            println!("max norm drift:      {:.3e}", report.max_norm_drift);
            println!("max invariant drift: {:.3e}", report.max_invariant_drift);
            if !report.worst_case.is_empty() {
                println!("worst case:          {}", report.worst_case);
            }
            if report.max_deviation >= 1e-10 {
                return Err(NjcError::Numerical(format!(
                    "oracle deviation {:.3e} exceeds the 1e-10 bound",
                    report.max_deviation
                )));
            }
            println!("closed form and oracle agree within 1e-10");
            Ok(())
        }
    }
}

/// A run target is first tried as a preset name, then as a scenario file.
fn resolve_target(target: &str) -> Result<Scenario> {
    if let Some(scenario) = scenario::preset(target) {
        return Ok(scenario);
    }
    let path = Path::new(target);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        return scenario::parse_scenario(&text);
    }
    Err(NjcError::Validation(format!(
        "`{target}` is neither a preset name (see `njc list`) nor an existing scenario file"
    )))
}

fn apply_overrides(
    scenario: &mut Scenario,
    n_max: Option<usize>,
    samples: Option<usize>,
    delta: Option<f64>,
    g: Option<f64>,
    k: Option<f64>,
    nbar: Option<f64>,
) -> Result<()> {
    if delta.is_some() || g.is_some() || k.is_some() {
        let p = scenario.params;
        scenario.params = ModelParams::from_delta(
            p.omega,
            delta.unwrap_or_else(|| p.delta()),
            g.unwrap_or(p.g),
            k.unwrap_or(p.k),
        )?;
    }
    if let Some(n_bar) = nbar {
        if !n_bar.is_finite() || n_bar < 0.0 {
            return Err(NjcError::Validation(format!(
                "--nbar must be finite and >= 0, got {n_bar}"
            )));
        }
        match &mut scenario.init.field {
            FieldSpec::Coherent { n_bar: slot } => *slot = n_bar,
            FieldSpec::Fock { .. } => {
                return Err(NjcError::Validation(
                    "--nbar applies only to coherent-field scenarios".to_string(),
                ))
            }
        }
    }
    if let Some(m) = n_max {
        if m == 0 {
            return Err(NjcError::Validation("--n-max must be >= 1".to_string()));
        }
        scenario.n_max = Some(m);
    }
    if let Some(s) = samples {
        if s == 0 {
            return Err(NjcError::Validation("--samples must be >= 1".to_string()));
        }
        scenario.time_grid.n_samples = s;
    }
    Ok(())
}
