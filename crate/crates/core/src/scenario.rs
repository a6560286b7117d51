//! Scenario configuration: a flat, hand-editable `key = value` text format
//! describing one simulation run (model parameters, initial condition, time
//! grid, and which observables to emit), plus the built-in presets behind
//! the `fig1`…`fig6` CLI names and a canonical serializer whose output
//! parses back to an identical scenario.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::algebra::ModelParams;
use crate::error::{NjcError, Result};
use crate::observables::revival_estimate;

/// Initial atomic state selectable from a scenario document. (Arbitrary
/// superpositions are available through the library API; the config format
/// deliberately sticks to the two pure levels.)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomKind {
    Excited,
    Ground,
}

/// Initial field state selectable from a scenario document.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    /// Coherent state of mean photon number n̄ (real amplitude √n̄).
    Coherent { n_bar: f64 },
    /// Number state |n⟩.
    Fock { n: usize },
}

/// Initial condition specification: atom ⊗ field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitSpec {
    pub atom: AtomKind,
    pub field: FieldSpec,
}

/// Uniform sampling grid for time-series outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

/// Observable selectors a scenario may emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    /// Atomic inversion w(t) and its oscillatory part w_t(t).
    Inversion,
    /// Field quadrature variances δX²(t), δY²(t).
    Quadratures,
    /// Mandel Q(t) of the exact photon distribution.
    Mandel,
    /// Initial-state overlap and its analytic envelope.
    Overlap,
    /// Dressed-level sweep over detuning (time-independent).
    Sweep,
    /// Exact vs approximate Rabi frequency per Fock block (time-independent).
    Rabi,
}

impl OutputKind {
    /// The selector keyword used in config documents and file names.
    pub fn key(self) -> &'static str {
        match self {
            OutputKind::Inversion => "inversion",
            OutputKind::Quadratures => "quadratures",
            OutputKind::Mandel => "mandel",
            OutputKind::Overlap => "overlap",
            OutputKind::Sweep => "sweep",
            OutputKind::Rabi => "rabi",
        }
    }

    fn from_key(key: &str) -> Option<Self> {
        Some(match key {
            "inversion" => OutputKind::Inversion,
            "quadratures" => OutputKind::Quadratures,
            "mandel" => OutputKind::Mandel,
            "overlap" => OutputKind::Overlap,
            "sweep" => OutputKind::Sweep,
            "rabi" => OutputKind::Rabi,
            _ => return None,
        })
    }

    fn is_time_series(self) -> bool {
        matches!(
            self,
            OutputKind::Inversion
                | OutputKind::Quadratures
                | OutputKind::Mandel
                | OutputKind::Overlap
        )
    }
}

/// Detuning sweep settings consumed by the `sweep` output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub delta_min: f64,
    pub delta_max: f64,
    pub samples: usize,
    pub n_list: Vec<usize>,
}

/// One fully validated simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub init: InitSpec,
    pub time_grid: TimeGrid,
    pub outputs: Vec<OutputKind>,
    /// Explicit Fock cutoff; `None` selects the tail-budget default.
    pub n_max: Option<usize>,
    /// Required iff `outputs` contains [`OutputKind::Sweep`].
    pub sweep: Option<SweepSpec>,
    /// Largest Fock block tabulated by the `rabi` output.
    pub rabi_n_max: usize,
}

/// Detuning shared by several presets: the critical value at which the
/// n̄ = 30 revival time is pushed out by two orders of magnitude.
const CRITICAL_DELTA: f64 = 0.016061;

/// Raw `key = (value, line)` map extracted from a config document.
struct RawDoc {
    entries: BTreeMap<String, (String, usize)>,
}

fn parse_error(line: usize, message: impl Into<String>) -> NjcError {
    NjcError::Parse {
        line,
        message: message.into(),
    }
}

impl RawDoc {
    fn from_text(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            if content.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(parse_error(line_no, "expected `key = value`"));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(parse_error(line_no, "missing key before `=`"));
            }
            if entries.insert(key.clone(), (value, line_no)).is_some() {
                return Err(parse_error(line_no, format!("duplicate key `{key}`")));
            }
        }
        Ok(RawDoc { entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => value
                .parse::<f64>()
                .map(Some)
                .map_err(|_| parse_error(line, format!("invalid number for `{key}`: `{value}`"))),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => value
                .parse::<usize>()
                .map(Some)
                .map_err(|_| parse_error(line, format!("invalid integer for `{key}`: `{value}`"))),
        }
    }

    fn take_usize_list(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => value
                .split(',')
                .map(|item| {
                    item.trim().parse::<usize>().map_err(|_| {
                        parse_error(
                            line,
                            format!("invalid integer `{}` in list `{key}`", item.trim()),
                        )
                    })
                })
                .collect::<Result<Vec<usize>>>()
                .map(Some),
        }
    }

    /// First (lowest-line) key nobody consumed, if any.
    fn first_leftover(&self) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .map(|(key, (_, line))| (key.as_str(), *line))
            .min_by_key(|&(_, line)| line)
    }
}

fn validation(message: impl Into<String>) -> NjcError {
    NjcError::Validation(message.into())
}

/// Parse and fully validate a scenario document. The format is flat
/// `key = value` lines; `#` starts a comment; lists are comma-separated.
/// Defaults: ω = 1, Δ = 0, k = 0, atom = excited, field = coherent,
/// t_start = 0, rabi_n_max = 200. Unknown keys and unknown output selectors
/// are rejected with their line number.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut doc = RawDoc::from_text(text)?;

    let name = match doc.take("name") {
        Some((value, _)) if !value.is_empty() => value,
        _ => return Err(validation("scenario `name` is required")),
    };

    let omega = doc.take_f64("omega")?.unwrap_or(1.0);
    let delta = doc.take_f64("delta")?.unwrap_or(0.0);
    let g = doc
        .take_f64("g")?
        .ok_or_else(|| validation("coupling `g` is required"))?;
    let k = doc.take_f64("k")?.unwrap_or(0.0);
    let params = ModelParams::from_delta(omega, delta, g, k)?;

    let atom = match doc.take("atom") {
        None => AtomKind::Excited,
        Some((value, line)) => match value.as_str() {
            "excited" => AtomKind::Excited,
            "ground" => AtomKind::Ground,
            other => {
                return Err(parse_error(
                    line,
                    format!("unknown atom `{other}` (expected `excited` or `ground`)"),
                ))
            }
        },
    };

    let field_kind = match doc.take("field") {
        None => "coherent".to_string(),
        Some((value, line)) => match value.as_str() {
            "coherent" | "fock" => value,
            other => {
                return Err(parse_error(
                    line,
                    format!("unknown field `{other}` (expected `coherent` or `fock`)"),
                ))
            }
        },
    };
    let n_bar = doc.take_f64("nbar")?;
    let fock_n = doc.take_usize("fock_n")?;
    let field = match field_kind.as_str() {
        "coherent" => {
            if fock_n.is_some() {
                return Err(validation("`fock_n` is only meaningful with field = fock"));
            }
            if let Some(n_bar) = n_bar {
                if !n_bar.is_finite() || n_bar < 0.0 {
                    return Err(validation(format!(
                        "nbar must be finite and >= 0, got {n_bar}"
                    )));
                }
            }
            n_bar.map(|n_bar| FieldSpec::Coherent { n_bar })
        }
        _ => {
            if n_bar.is_some() {
                return Err(validation(
                    "`nbar` is only meaningful with field = coherent",
                ));
            }
            let n = fock_n.ok_or_else(|| validation("`fock_n` is required when field = fock"))?;
            Some(FieldSpec::Fock { n })
        }
    };

    let t_start = doc.take_f64("t_start")?.unwrap_or(0.0);
    let t_end = doc.take_f64("t_end")?;
    let samples = doc.take_usize("samples")?;
    let n_max = doc.take_usize("n_max")?;
    if n_max == Some(0) {
        return Err(validation("n_max must be >= 1"));
    }

    let outputs = match doc.take("outputs") {
        None => return Err(validation("at least one output selector is required")),
        Some((value, line)) => {
            let mut outputs = Vec::new();
            for item in value.split(',') {
                let key = item.trim();
                let kind = OutputKind::from_key(key)
                    .ok_or_else(|| parse_error(line, format!("unknown output selector `{key}`")))?;
                if outputs.contains(&kind) {
                    return Err(parse_error(
                        line,
                        format!("duplicate output selector `{key}`"),
                    ));
                }
                outputs.push(kind);
            }
            outputs
        }
    };

    let sweep_delta_min = doc.take_f64("sweep_delta_min")?;
    let sweep_delta_max = doc.take_f64("sweep_delta_max")?;
    let sweep_samples = doc.take_usize("sweep_samples")?;
    let sweep_n_list = doc.take_usize_list("sweep_n_list")?;
    let any_sweep_key = sweep_delta_min.is_some()
        || sweep_delta_max.is_some()
        || sweep_samples.is_some()
        || sweep_n_list.is_some();
    let sweep = if any_sweep_key {
        let delta_min =
            sweep_delta_min.ok_or_else(|| validation("sweep requires `sweep_delta_min`"))?;
        let delta_max =
            sweep_delta_max.ok_or_else(|| validation("sweep requires `sweep_delta_max`"))?;
        let samples = sweep_samples.ok_or_else(|| validation("sweep requires `sweep_samples`"))?;
        let n_list = sweep_n_list.ok_or_else(|| validation("sweep requires `sweep_n_list`"))?;
        if !(delta_min.is_finite() && delta_max.is_finite() && delta_min <= delta_max) {
            return Err(validation(format!(
                "sweep detuning range must satisfy min <= max, got [{delta_min}, {delta_max}]"
            )));
        }
        if samples < 1 {
            return Err(validation("sweep_samples must be >= 1"));
        }
        if n_list.is_empty() {
            return Err(validation("sweep_n_list must not be empty"));
        }
        Some(SweepSpec {
            delta_min,
            delta_max,
            samples,
            n_list,
        })
    } else {
        None
    };

    let rabi_n_max = doc.take_usize("rabi_n_max")?.unwrap_or(200);
    if rabi_n_max < 1 {
        return Err(validation("rabi_n_max must be >= 1"));
    }

    if let Some((key, line)) = doc.first_leftover() {
        return Err(parse_error(line, format!("unknown key `{key}`")));
    }

    // Cross-requirements between outputs and the rest of the document.
    let needs_time_series = outputs.iter().any(|o| o.is_time_series());
    if needs_time_series && field.is_none() {
        return Err(validation(
            "`nbar` is required for time-series outputs with a coherent field",
        ));
    }
    if outputs.contains(&OutputKind::Overlap) && !matches!(field, Some(FieldSpec::Coherent { .. }))
    {
        return Err(validation("the overlap output requires a coherent field"));
    }
    if outputs.contains(&OutputKind::Rabi) && n_bar.is_none() {
        return Err(validation(
            "`nbar` is required for the rabi output (it weights the p_n column)",
        ));
    }
    if outputs.contains(&OutputKind::Sweep) && sweep.is_none() {
        return Err(validation(
            "the sweep output requires sweep_delta_min/max, sweep_samples and sweep_n_list",
        ));
    }
    let (t_end, samples) = if needs_time_series {
        let t_end =
            t_end.ok_or_else(|| validation("`t_end` is required for time-series outputs"))?;
        let samples =
            samples.ok_or_else(|| validation("`samples` is required for time-series outputs"))?;
        (t_end, samples)
    } else {
        (t_end.unwrap_or(t_start), samples.unwrap_or(1))
    };
    if !t_start.is_finite() || !t_end.is_finite() || t_start < 0.0 || t_end < t_start {
        return Err(validation(format!(
            "time grid must satisfy 0 <= t_start <= t_end, got [{t_start}, {t_end}]"
        )));
    }
    if samples < 1 {
        return Err(validation("samples must be >= 1"));
    }

    // A field spec is always stored; outputs that never build a state simply
    // ignore it. Vacuum is the neutral default.
    let field = field.unwrap_or(FieldSpec::Coherent { n_bar: 0.0 });

    Ok(Scenario {
        name,
        params,
        init: InitSpec { atom, field },
        time_grid: TimeGrid {
            t_start,
            t_end,
            n_samples: samples,
        },
        outputs,
        n_max,
        sweep,
        rabi_n_max,
    })
}

/// Canonical text form of a scenario; [`parse_scenario`] returns an equal
/// scenario from it. Floats are printed in shortest round-trip form.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# njc scenario");
    let _ = writeln!(out, "name = {}", scenario.name);
    let _ = writeln!(out, "omega = {:?}", scenario.params.omega);
    let _ = writeln!(out, "delta = {:?}", scenario.params.delta());
    let _ = writeln!(out, "g = {:?}", scenario.params.g);
    let _ = writeln!(out, "k = {:?}", scenario.params.k);
    let atom = match scenario.init.atom {
        AtomKind::Excited => "excited",
        AtomKind::Ground => "ground",
    };
    let _ = writeln!(out, "atom = {atom}");
    match scenario.init.field {
        FieldSpec::Coherent { n_bar } => {
            let _ = writeln!(out, "field = coherent");
            let _ = writeln!(out, "nbar = {n_bar:?}");
        }
        FieldSpec::Fock { n } => {
            let _ = writeln!(out, "field = fock");
            let _ = writeln!(out, "fock_n = {n}");
        }
    }
    let _ = writeln!(out, "t_start = {:?}", scenario.time_grid.t_start);
    let _ = writeln!(out, "t_end = {:?}", scenario.time_grid.t_end);
    let _ = writeln!(out, "samples = {}", scenario.time_grid.n_samples);
    if let Some(n_max) = scenario.n_max {
        let _ = writeln!(out, "n_max = {n_max}");
    }
    let outputs: Vec<&str> = scenario.outputs.iter().map(|o| o.key()).collect();
    let _ = writeln!(out, "outputs = {}", outputs.join(", "));
    if let Some(sweep) = &scenario.sweep {
        let _ = writeln!(out, "sweep_delta_min = {:?}", sweep.delta_min);
        let _ = writeln!(out, "sweep_delta_max = {:?}", sweep.delta_max);
        let _ = writeln!(out, "sweep_samples = {}", sweep.samples);
        let n_list: Vec<String> = sweep.n_list.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "sweep_n_list = {}", n_list.join(", "));
    }
    let _ = writeln!(out, "rabi_n_max = {}", scenario.rabi_n_max);
    out
}

fn kerr_params(delta: f64) -> ModelParams {
    ModelParams::from_delta(1.0, delta, 1e-3, 1e-4)
        .expect("preset parameters are valid by construction")
}

fn coherent30() -> InitSpec {
    InitSpec {
        atom: AtomKind::Excited,
        field: FieldSpec::Coherent { n_bar: 30.0 },
    }
}

fn time_series(name: &str, delta: f64, t_end: f64, samples: usize, output: OutputKind) -> Scenario {
    Scenario {
        name: name.to_string(),
        params: kerr_params(delta),
        init: coherent30(),
        time_grid: TimeGrid {
            t_start: 0.0,
            t_end,
            n_samples: samples,
        },
        outputs: vec![output],
        n_max: None,
        sweep: None,
        rabi_n_max: 200,
    }
}

/// Three revival periods at Δ = 0.01 — the window used by the quadrature
/// and Mandel presets.
fn three_revivals() -> f64 {
    let params = kerr_params(0.01);
    3.0 * revival_estimate(&params, 30.0)
        .expect("preset parameters have a revival scale")
        .t_revival
}

/// Built-in scenario behind a preset name, if the name is known.
pub fn preset(name: &str) -> Option<Scenario> {
    match name {
        "fig1" => Some(Scenario {
            name: "fig1".to_string(),
            params: ModelParams::from_delta(1.0, 0.0, 0.1, 0.1)
                .expect("preset parameters are valid by construction"),
            init: coherent30(),
            time_grid: TimeGrid {
                t_start: 0.0,
                t_end: 0.0,
                n_samples: 1,
            },
            outputs: vec![OutputKind::Sweep],
            n_max: None,
            sweep: Some(SweepSpec {
                delta_min: -0.5,
                delta_max: 1.0,
                samples: 301,
                n_list: vec![1, 2],
            }),
            rabi_n_max: 200,
        }),
        "fig2" => Some(Scenario {
            name: "fig2".to_string(),
            params: kerr_params(CRITICAL_DELTA),
            init: coherent30(),
            time_grid: TimeGrid {
                t_start: 0.0,
                t_end: 0.0,
                n_samples: 1,
            },
            outputs: vec![OutputKind::Rabi],
            n_max: None,
            sweep: None,
            rabi_n_max: 200,
        }),
        "fig3a" => Some(time_series(
            "fig3a",
            0.01,
            3e5,
            30000,
            OutputKind::Inversion,
        )),
        "fig3b" => Some(time_series(
            "fig3b",
            CRITICAL_DELTA,
            7e6,
            28000,
            OutputKind::Inversion,
        )),
        "fig3c" => Some(time_series(
            "fig3c",
            0.022,
            5e5,
            25000,
            OutputKind::Inversion,
        )),
        "fig4" => Some(time_series(
            "fig4",
            0.01,
            three_revivals(),
            4000,
            OutputKind::Quadratures,
        )),
        "fig5" => Some(time_series(
            "fig5",
            0.01,
            three_revivals(),
            4000,
            OutputKind::Mandel,
        )),
        "fig6" => Some(time_series(
            "fig6",
            CRITICAL_DELTA,
            1e5,
            4000,
            OutputKind::Overlap,
        )),
        _ => None,
    }
}

/// All preset names with one-line descriptions, in presentation order.
pub fn list_presets() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "fig1",
            "dressed-level pair E± vs detuning for blocks n = 1, 2 at g = k = 0.1",
        ),
        (
            "fig2",
            "exact vs approximate Rabi frequency over n = 0..200 at \u{0394} = 0.016061",
        ),
        (
            "fig3a",
            "inversion collapse and revival at \u{0394} = 0.01 over t \u{2208} [0, 3e5]",
        ),
        (
            "fig3b",
            "inversion at the critical detuning \u{0394} = 0.016061 over t \u{2208} [0, 7e6]",
        ),
        (
            "fig3c",
            "inversion at \u{0394} = 0.022 over t \u{2208} [0, 5e5]",
        ),
        (
            "fig4",
            "quadrature variances at \u{0394} = 0.01 over three revival periods",
        ),
        (
            "fig5",
            "Mandel Q at \u{0394} = 0.01 over three revival periods",
        ),
        (
            "fig6",
            "initial-state overlap and analytic envelope at \u{0394} = 0.016061 over t \u{2208} [0, 1e5]",
        ),
    ]
}
