//! Scenario execution: build the initial state, evolve it over the requested
//! grid, compute the selected observables, and emit CSV files plus a JSON
//! manifest. Every CSV byte is a pure function of the scenario (fixed
//! 17-significant-digit scientific notation, no accumulated state), so
//! reruns are byte-identical; the manifest's wall-clock field is the one
//! deliberately non-deterministic value.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{coherent_state, fock_state, poisson_tail, poisson_weights, FockCutoff};
use crate::dynamics::{evolve_series, AtomState, InitialCondition};
use crate::error::{NjcError, Result};
use crate::observables::{inversion, mandel_q, overlap, overlap_envelope, quadrature_variances};
use crate::scenario::{serialize_scenario, AtomKind, FieldSpec, OutputKind, Scenario};
use crate::spectrum::{rabi_approx, rabi_frequency, spectrum_sweep};
use crate::util::linspace;

/// Run metadata written next to the CSVs as `{name}_manifest.json`:
/// the canonical scenario echo, the Fock cutoff actually used, the initial
/// distribution's truncated tail mass, the largest sampled time, and the
/// wall-clock duration of the run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub cutoff: usize,
    pub tail_mass: f64,
    pub max_t: f64,
    pub wall_seconds: f64,
}

/// One CSV cell: integers print plainly, floats in fixed scientific
/// notation after a finiteness check.
enum Cell {
    Int(usize),
    Num(f64),
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let mut text = String::with_capacity(64 + rows.len() * 24 * header.len());
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                text.push(',');
            }
            match *cell {
                Cell::Int(v) => {
                    let _ = write!(text, "{v}");
                }
                Cell::Num(v) => {
                    if !v.is_finite() {
                        return Err(NjcError::Numerical(format!(
                            "non-finite value {v} in column `{}` of {}",
                            header[j],
                            path.display()
                        )));
                    }
                    let _ = write!(text, "{v:.16e}");
                }
            }
        }
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Execute a validated scenario, writing one CSV per selected output plus
/// the manifest into `out_dir` (created if missing). Returns the written
/// paths, manifest last.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    fs::create_dir_all(out_dir)?;
    let params = &scenario.params;

    let needs_state = scenario.outputs.iter().any(|o| {
        matches!(
            o,
            OutputKind::Inversion
                | OutputKind::Quadratures
                | OutputKind::Mandel
                | OutputKind::Overlap
        )
    });

    let mut cutoff_used = 0usize;
    let mut tail_mass = 0.0f64;
    let states = if needs_state {
        let cutoff = match scenario.n_max {
            Some(m) => FockCutoff::new(m)?,
            None => match scenario.init.field {
                FieldSpec::Coherent { n_bar } => FockCutoff::for_coherent(n_bar)?,
                // Fock states have no tail; pad generously above n.
                FieldSpec::Fock { n } => FockCutoff::new((n + 16).max(64))?,
            },
        };
        let field = match scenario.init.field {
            FieldSpec::Coherent { n_bar } => {
                tail_mass = poisson_tail(n_bar, cutoff.n_max());
                coherent_state(Complex64::new(n_bar.sqrt(), 0.0), cutoff)?
            }
            FieldSpec::Fock { n } => fock_state(n, cutoff)?,
        };
        cutoff_used = cutoff.n_max();
        let atom = match scenario.init.atom {
            AtomKind::Excited => AtomState::Excited,
            AtomKind::Ground => AtomState::Ground,
        };
        let ts = linspace(
            scenario.time_grid.t_start,
            scenario.time_grid.t_end,
            scenario.time_grid.n_samples,
        );
        let init = InitialCondition::new(atom, field.clone());
        let evolved = evolve_series(params, &init, &ts)?;
        Some((field, evolved))
    } else {
        if scenario.outputs.contains(&OutputKind::Rabi) {
            cutoff_used = scenario.rabi_n_max;
            if let FieldSpec::Coherent { n_bar } = scenario.init.field {
                tail_mass = poisson_tail(n_bar, scenario.rabi_n_max);
            }
        }
        None
    };

    let mut written = Vec::with_capacity(scenario.outputs.len() + 1);
    for output in &scenario.outputs {
        let path = out_dir.join(format!("{}_{}.csv", scenario.name, output.key()));
        match output {
            OutputKind::Inversion => {
                let (field, states) = states.as_ref().expect("time-series outputs build states");
                let records = inversion(params, states, field)?;
                let rows: Vec<Vec<Cell>> = records
                    .iter()
                    .map(|r| vec![Cell::Num(r.t), Cell::Num(r.w), Cell::Num(r.w_t)])
                    .collect();
                write_csv(&path, &["t", "w", "w_t"], &rows)?;
            }
            OutputKind::Quadratures => {
                let (_, states) = states.as_ref().expect("time-series outputs build states");
                let rows: Vec<Vec<Cell>> = states
                    .iter()
                    .map(|s| {
                        let (dx2, dy2) = quadrature_variances(s);
                        vec![Cell::Num(s.time()), Cell::Num(dx2), Cell::Num(dy2)]
                    })
                    .collect();
                write_csv(&path, &["t", "dx2", "dy2"], &rows)?;
            }
            OutputKind::Mandel => {
                let (_, states) = states.as_ref().expect("time-series outputs build states");
                let mut rows = Vec::with_capacity(states.len());
                for s in states {
                    let q = mandel_q(&s.photon_probabilities())?;
                    rows.push(vec![Cell::Num(s.time()), Cell::Num(q)]);
                }
                write_csv(&path, &["t", "q"], &rows)?;
            }
            OutputKind::Overlap => {
                let FieldSpec::Coherent { n_bar } = scenario.init.field else {
                    return Err(NjcError::Validation(
                        "the overlap output requires a coherent field".to_string(),
                    ));
                };
                let (_, states) = states.as_ref().expect("time-series outputs build states");
                let alpha = Complex64::new(n_bar.sqrt(), 0.0);
                let mut rows = Vec::with_capacity(states.len());
                for s in states {
                    let t = s.time();
                    let o = overlap(params, alpha, t)?;
                    let env = overlap_envelope(params, n_bar, n_bar, t);
                    rows.push(vec![Cell::Num(t), Cell::Num(o), Cell::Num(env)]);
                }
                write_csv(&path, &["t", "overlap", "envelope"], &rows)?;
            }
            OutputKind::Sweep => {
                let spec = scenario
                    .sweep
                    .as_ref()
                    .expect("sweep output carries a sweep spec");
                let grid = linspace(spec.delta_min, spec.delta_max, spec.samples);
                let sweep_rows = spectrum_sweep(params, &spec.n_list, &grid)?;
                let rows: Vec<Vec<Cell>> = sweep_rows
                    .iter()
                    .map(|r| {
                        vec![
                            Cell::Num(r.delta),
                            Cell::Int(r.n),
                            Cell::Num(r.e_plus),
                            Cell::Num(r.e_minus),
                            Cell::Num(r.bare_e),
                            Cell::Num(r.bare_g),
                        ]
                    })
                    .collect();
                write_csv(
                    &path,
                    &["delta", "n", "e_plus", "e_minus", "bare_e", "bare_g"],
                    &rows,
                )?;
            }
            OutputKind::Rabi => {
                let FieldSpec::Coherent { n_bar } = scenario.init.field else {
                    return Err(NjcError::Validation(
                        "the rabi output requires a coherent nbar".to_string(),
                    ));
                };
                let n_bar_idx = n_bar.round() as usize;
                let weights = poisson_weights(n_bar, scenario.rabi_n_max);
                let rows: Vec<Vec<Cell>> = (0..=scenario.rabi_n_max)
                    .map(|n| {
                        vec![
                            Cell::Int(n),
                            Cell::Num(rabi_frequency(params, n)),
                            Cell::Num(rabi_approx(params, n, n_bar_idx)),
                            Cell::Num(weights[n]),
                        ]
                    })
                    .collect();
                write_csv(&path, &["n", "omega_exact", "omega_approx", "p_n"], &rows)?;
            }
        }
        written.push(path);
    }

    let manifest = Manifest {
        scenario: serialize_scenario(scenario),
        cutoff: cutoff_used,
        tail_mass,
        max_t: if needs_state {
            scenario.time_grid.t_end
        } else {
            0.0
        },
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let manifest_path = out_dir.join(format!("{}_manifest.json", scenario.name));
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| NjcError::Numerical(format!("manifest serialization failed: {e}")))?;
    fs::write(&manifest_path, json + "\n")?;
    written.push(manifest_path);
    Ok(written)
}
