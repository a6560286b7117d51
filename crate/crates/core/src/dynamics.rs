//! Time evolution of the joint atom–field amplitudes.
//!
//! Two independent routes are provided:
//!
//! - [`evolve_closed_form`] applies the exact per-block propagator in the
//!   interaction picture. Because the model is exactly solvable there is
//!   no time stepping: every sample is computed directly from t = 0.
//! - [`oracle_evolve`] builds the full truncated Hamiltonian matrix in the
//!   product basis {|e,n⟩, |g,n⟩}, diagonalizes it with a generic dense
//!   symmetric eigensolver, and applies e^{−iHt}. It makes no use of the
//!   block structure and serves as a brute-force cross-check.
//!
//! Both routes assemble their oscillatory phase arguments in double-double
//! arithmetic (see [`crate::dd`]): the closed form reduces Ωn·t/2, Δn·t/2
//! and ℰ·t mod 2π in double-double, and the oracle refines the eigenvalues
//! by double-double Rayleigh quotients (after re-orthogonalizing
//! near-degenerate eigenvector pairs) before forming λ·t. This keeps the
//! two routes within ~1e−12 of each other out to t ~ 10⁴ and preserves
//! phase fidelity in the 10⁶–10⁷ range used by the long scenarios.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use crate::algebra::{coherent_state, FieldState, FockCutoff, ModelParams};
use crate::dd::Dd;
use crate::error::{NjcError, Result};
use crate::spectrum;

/// Initial state of the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomState {
    /// |e⟩.
    Excited,
    /// |g⟩.
    Ground,
    /// c_e|e⟩ + c_g|g⟩ (must be normalized within 1e−12).
    Superposition { c_e: Complex64, c_g: Complex64 },
}

impl AtomState {
    fn amplitudes(&self) -> Result<(Complex64, Complex64)> {
        match *self {
            AtomState::Excited => Ok((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))),
            AtomState::Ground => Ok((Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))),
            AtomState::Superposition { c_e, c_g } => {
                let norm = c_e.norm_sqr() + c_g.norm_sqr();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(NjcError::Validation(format!(
                        "atom superposition norm^2 = {norm} is not 1 within 1e-12"
                    )));
                }
                Ok((c_e, c_g))
            }
        }
    }
}

/// Product initial condition: atom state ⊗ field state.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub atom: AtomState,
    pub field: FieldState,
}

impl InitialCondition {
    pub fn new(atom: AtomState, field: FieldState) -> Self {
        InitialCondition { atom, field }
    }
}

/// Joint amplitudes C_{e,n}, C_{g,n} (n = 0..n_max) at a given time.
///
/// States produced by [`evolve_closed_form`] / [`evolve_series`] are in the
/// interaction picture; [`to_schrodinger`] attaches the free-evolution
/// phases. The oracle returns Schrödinger-picture states directly.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFieldState {
    c_e: Vec<Complex64>,
    c_g: Vec<Complex64>,
    time: f64,
}

impl AtomFieldState {
    /// Wrap raw amplitude vectors (equal length, normalized within 1e−10).
    pub fn new(c_e: Vec<Complex64>, c_g: Vec<Complex64>, time: f64) -> Result<Self> {
        if c_e.len() != c_g.len() || c_e.is_empty() {
            return Err(NjcError::Validation(format!(
                "amplitude vectors must be nonempty and equally long (got {} and {})",
                c_e.len(),
                c_g.len()
            )));
        }
        let state = AtomFieldState { c_e, c_g, time };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(NjcError::Validation(format!(
                "joint state norm^2 = {norm} is not 1 within 1e-10"
            )));
        }
        Ok(state)
    }

    /// The t = 0 state of a product initial condition.
    pub fn from_initial(init: &InitialCondition) -> Result<Self> {
        let (ae, ag) = init.atom.amplitudes()?;
        let c_e = init.field.amplitudes().iter().map(|c| ae * c).collect();
        let c_g = init.field.amplitudes().iter().map(|c| ag * c).collect();
        Ok(AtomFieldState {
            c_e,
            c_g,
            time: 0.0,
        })
    }

    /// Excited-chain amplitudes C_{e,n}.
    #[inline]
    pub fn c_e(&self) -> &[Complex64] {
        &self.c_e
    }

    /// Ground-chain amplitudes C_{g,n}.
    #[inline]
    pub fn c_g(&self) -> &[Complex64] {
        &self.c_g
    }

    /// Elapsed time of this sample.
    #[inline]
    pub fn time(&self) -> f64 {
        self.time
    }

    /// Largest Fock index.
    #[inline]
    pub fn n_max(&self) -> usize {
        self.c_e.len() - 1
    }

    /// Σ (|C_{e,n}|² + |C_{g,n}|²).
    pub fn norm_sqr(&self) -> f64 {
        self.c_e
            .iter()
            .zip(&self.c_g)
            .map(|(e, g)| e.norm_sqr() + g.norm_sqr())
            .sum()
    }

    /// Photon-number probabilities P(n) = |C_{e,n}|² + |C_{g,n}|².
    pub fn photon_probabilities(&self) -> Vec<f64> {
        self.c_e
            .iter()
            .zip(&self.c_g)
            .map(|(e, g)| e.norm_sqr() + g.norm_sqr())
            .collect()
    }

    /// Atomic inversion ⟨σz⟩ = Σ (|C_{e,n}|² − |C_{g,n}|²).
    pub fn inversion(&self) -> f64 {
        self.c_e
            .iter()
            .zip(&self.c_g)
            .map(|(e, g)| e.norm_sqr() - g.norm_sqr())
            .sum()
    }
}

/// Precomputed per-block data reused across time samples.
struct BlockData {
    omega_dd: Dd,
    delta_dd: Dd,
    omega_n: f64,
    delta_n: f64,
    two_g: f64,
}

fn build_blocks(params: &ModelParams, n_max: usize) -> Vec<BlockData> {
    (0..n_max)
        .map(|n| {
            let omega_dd = spectrum::rabi_frequency_dd(params, n);
            let delta_dd = spectrum::block_detuning_dd(params, n);
            BlockData {
                omega_n: omega_dd.to_f64(),
                delta_n: delta_dd.to_f64(),
                two_g: 2.0 * spectrum::coupling(params, n),
                omega_dd,
                delta_dd,
            }
        })
        .collect()
}

/// Apply the interaction-picture block propagator for duration `t` to raw
/// t = 0 amplitude vectors.
fn propagate_blocks(
    blocks: &[BlockData],
    c_e0: &[Complex64],
    c_g0: &[Complex64],
    t: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n_max = blocks.len();
    let mut c_e = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut c_g = vec![Complex64::new(0.0, 0.0); n_max + 1];
    // The edge amplitudes are block-less: C_{g,0} has no partner at n = −1
    // and the |e,n_max⟩ ↔ |g,n_max+1⟩ coupling is dropped by truncation
    // (legal: tail mass < 1e−12 by construction). Both are constant in the
    // interaction picture.
    c_g[0] = c_g0[0];
    c_e[n_max] = c_e0[n_max];
    let half_t = 0.5 * t;
    for (n, b) in blocks.iter().enumerate() {
        let (s, c) = b.omega_dd.mul_f64(half_t).sin_cos_reduced();
        // sin(Ωt/2)/Ω with its uniform Ω → 0 limit t/2 (the propagator is
        // regular at a degenerate block even though the mixing angle is not).
        let hso = if b.omega_n < 1e-14 {
            half_t
        } else {
            s / b.omega_n
        };
        let (sp, cp) = b.delta_dd.mul_f64(half_t).sin_cos_reduced();
        let phase = Complex64::new(cp, sp); // e^{+iΔn t/2}
        let diag = Complex64::new(c, -b.delta_n * hso); // cos − i(Δn/Ωn) sin
        let off = Complex64::new(0.0, -b.two_g * hso); // −2iG/Ωn · sin
        c_e[n] = phase * (diag * c_e0[n] + off * c_g0[n + 1]);
        c_g[n + 1] = phase.conj() * (off * c_e0[n] + diag.conj() * c_g0[n + 1]);
    }
    (c_e, c_g)
}

/// Exact interaction-picture evolution of a product initial condition to
/// time `t` via the closed-form block propagator.
pub fn evolve_closed_form(
    params: &ModelParams,
    init: &InitialCondition,
    t: f64,
) -> Result<AtomFieldState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(NjcError::Validation(format!(
            "evolution time must be finite and >= 0, got {t}"
        )));
    }
    let start = AtomFieldState::from_initial(init)?;
    let blocks = build_blocks(params, start.n_max());
    let (c_e, c_g) = propagate_blocks(&blocks, &start.c_e, &start.c_g, t);
    Ok(AtomFieldState { c_e, c_g, time: t })
}

/// Closed-form evolution sampled on a strictly increasing grid of times,
/// each computed directly from t = 0 (no step accumulation).
pub fn evolve_series(
    params: &ModelParams,
    init: &InitialCondition,
    time_grid: &[f64],
) -> Result<Vec<AtomFieldState>> {
    if time_grid.is_empty() {
        return Err(NjcError::EmptyGrid);
    }
    if !(time_grid[0].is_finite() && time_grid[0] >= 0.0) {
        return Err(NjcError::Validation(format!(
            "time grid must start at a finite t >= 0, got {}",
            time_grid[0]
        )));
    }
    if time_grid
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(NjcError::Validation(
            "time grid must be strictly increasing".to_string(),
        ));
    }
    let start = AtomFieldState::from_initial(init)?;
    let blocks = build_blocks(params, start.n_max());
    Ok(time_grid
        .iter()
        .map(|&t| {
            let (c_e, c_g) = propagate_blocks(&blocks, &start.c_e, &start.c_g, t);
            AtomFieldState { c_e, c_g, time: t }
        })
        .collect())
}

/// Attach the free-evolution phases: C_{e,n} ↦ e^{−iℰ_{e,n}t} C_{e,n} and
/// C_{g,n} ↦ e^{−iℰ_{g,n}t} C_{g,n}, turning an interaction-picture state
/// into the Schrödinger-picture state at its own time.
pub fn to_schrodinger(params: &ModelParams, state: &AtomFieldState) -> AtomFieldState {
    let t = state.time;
    let mut c_e = Vec::with_capacity(state.c_e.len());
    let mut c_g = Vec::with_capacity(state.c_g.len());
    for n in 0..state.c_e.len() {
        let (se, ce) = spectrum::bare_energy_dd(params, n, true)
            .mul_f64(t)
            .sin_cos_reduced();
        let (sg, cg) = spectrum::bare_energy_dd(params, n, false)
            .mul_f64(t)
            .sin_cos_reduced();
        c_e.push(state.c_e[n] * Complex64::new(ce, -se));
        c_g.push(state.c_g[n] * Complex64::new(cg, -sg));
    }
    AtomFieldState { c_e, c_g, time: t }
}

// ---------------------------------------------------------------------------
// Brute-force oracle.
// ---------------------------------------------------------------------------

/// Diagonal of H in the product basis (excited chain then ground chain),
/// kept in double-double, and the off-band couplings ⟨e,m|H|g,m+1⟩. The
/// diagonal must stay unrounded: at k ~ 1 the bare energies reach ~n², so
/// their f64 rounding (~1e−13 absolute) alone would shift the phases λt by
/// more than the 1e−10 target at t ~ 1e4.
fn hamiltonian_parts(params: &ModelParams, d: usize) -> (Vec<Dd>, Vec<f64>) {
    let mut diag = vec![Dd::from_f64(0.0); 2 * d];
    for n in 0..d {
        diag[n] = spectrum::bare_energy_dd(params, n, true);
        diag[d + n] = spectrum::bare_energy_dd(params, n, false);
    }
    let coup: Vec<f64> = (0..d.saturating_sub(1))
        .map(|m| spectrum::coupling(params, m))
        .collect();
    (diag, coup)
}

/// v·(H w) in double-double, using the sparsity of H (diagonal plus one
/// off-band pairing per block).
fn dd_quadratic_form(diag: &[Dd], coup: &[f64], v: &[f64], w: &[f64]) -> Dd {
    let d = diag.len() / 2;
    let mut acc = Dd::from_f64(0.0);
    for m in 0..diag.len() {
        acc = acc.add(diag[m].mul(Dd::from_prod(v[m], w[m])));
    }
    for (m, &c) in coup.iter().enumerate() {
        let cross = Dd::from_prod(v[m], w[d + m + 1]).add(Dd::from_prod(v[d + m + 1], w[m]));
        acc = acc.add(cross.mul_f64(c));
    }
    acc
}

fn dd_dot(v: &[f64], w: &[f64]) -> Dd {
    let mut acc = Dd::from_f64(0.0);
    for m in 0..v.len() {
        acc = acc.add(Dd::from_prod(v[m], w[m]));
    }
    acc
}

/// Brute-force evolution: build the full truncated H in the product basis,
/// diagonalize with a generic dense symmetric eigensolver, refine the
/// eigendata, and apply e^{−iHt}. Returns a Schrödinger-picture state.
///
/// The refinement has two parts, both needed to reach ~1e−12 agreement
/// with the closed form at large t: (a) consecutive eigenvalue pairs with
/// gap < 1 are re-mixed by a 2×2 Jacobi rotation built from double-double
/// cross Rayleigh quotients (a dense eigensolver may mix near-degenerate
/// eigenvectors by ~eps·‖H‖/gap); (b) each eigenvalue is replaced by its
/// Rayleigh quotient against the unrounded (double-double) Hamiltonian
/// before the phase λt is reduced mod 2π.
pub fn oracle_evolve(
    params: &ModelParams,
    init: &InitialCondition,
    t: f64,
    cutoff: FockCutoff,
) -> Result<AtomFieldState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(NjcError::Validation(format!(
            "evolution time must be finite and >= 0, got {t}"
        )));
    }
    let start = AtomFieldState::from_initial(init)?;
    if start.n_max() != cutoff.n_max() {
        return Err(NjcError::DimensionMismatch {
            op: cutoff.dim(),
            state: start.c_e.len(),
        });
    }
    let d = cutoff.dim();
    let dim = 2 * d;
    let (diag, coup) = hamiltonian_parts(params, d);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for m in 0..dim {
        h[(m, m)] = diag[m].to_f64();
    }
    for (m, &c) in coup.iter().enumerate() {
        h[(m, d + m + 1)] = c;
        h[(d + m + 1, m)] = c;
    }
    let eig = h.symmetric_eigen();

    // Sort eigenpairs ascending; store eigenvectors as plain columns.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let lam: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();

    // (a) Jacobi re-mixing of near-degenerate consecutive pairs.
    for _sweep in 0..2 {
        for i in 0..dim - 1 {
            if lam[i + 1] - lam[i] < 1.0 {
                let a = dd_quadratic_form(&diag, &coup, &vecs[i], &vecs[i]).to_f64();
                let b = dd_quadratic_form(&diag, &coup, &vecs[i + 1], &vecs[i + 1]).to_f64();
                let c = dd_quadratic_form(&diag, &coup, &vecs[i], &vecs[i + 1]).to_f64();
                if c.abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * c).atan2(a - b);
                let (sn, cs) = theta.sin_cos();
                let (head, tail) = vecs.split_at_mut(i + 1);
                for (vi, vj) in head[i].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*vi, *vj);
                    *vi = cs * x + sn * y;
                    *vj = -sn * x + cs * y;
                }
            }
        }
    }

    // (b) double-double Rayleigh-quotient eigenvalues and phases.
    let phases: Vec<Complex64> = vecs
        .iter()
        .map(|v| {
            let num = dd_quadratic_form(&diag, &coup, v, v);
            let den = dd_dot(v, v);
            let (s, c) = num.div(den).mul_f64(t).sin_cos_reduced();
            Complex64::new(c, -s) // e^{−iλt}
        })
        .collect();

    // ψ(t) = Σ_i v_i e^{−iλ_i t} (v_i · ψ0).
    let mut psi0 = Vec::with_capacity(dim);
    psi0.extend_from_slice(&start.c_e);
    psi0.extend_from_slice(&start.c_g);
    let mut psi_t = vec![Complex64::new(0.0, 0.0); dim];
    for (v, ph) in vecs.iter().zip(&phases) {
        let mut proj = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            proj += psi0[m] * v[m];
        }
        let w = ph * proj;
        for m in 0..dim {
            psi_t[m] += v[m] * w;
        }
    }
    Ok(AtomFieldState {
        c_e: psi_t[..d].to_vec(),
        c_g: psi_t[d..].to_vec(),
        time: t,
    })
}

/// Diagonal of the constant of motion N = K₊K₋ + 2K₀σ₊σ₋ in the product
/// basis, and its expectation on a state. N is block-constant, so both
/// evolvers must conserve it.
pub fn invariant_n(params: &ModelParams, state: &AtomFieldState) -> f64 {
    let k = params.k;
    let mut acc = 0.0;
    for n in 0..=state.n_max() {
        let nf = n as f64;
        let kpk = nf * (1.0 + k * (nf - 1.0)); // ⟨n|K₊K₋|n⟩
        acc += state.c_e[n].norm_sqr() * (kpk + 2.0 * (k * nf + 0.5));
        acc += state.c_g[n].norm_sqr() * kpk;
    }
    acc
}

/// Result of the randomized closed-form ↔ oracle cross-validation.
#[derive(Debug, Clone)]
pub struct OracleSuiteReport {
    /// Number of random scenarios run.
    pub draws: usize,
    /// Max elementwise amplitude deviation between the two routes.
    pub max_deviation: f64,
    /// Parameters of the worst draw, for display.
    pub worst_case: String,
    /// Max |norm² − 1| over all evolved states (both routes).
    pub max_norm_drift: f64,
    /// Max |⟨N⟩(t) − ⟨N⟩(0)| over all draws (both routes).
    pub max_invariant_drift: f64,
}

/// Run `draws` randomized scenarios (k ∈ {0, 1e−4, 0.5, 1}, Δ ∈ {0, 0.01,
/// critical}, n̄ ≤ 40, t ≤ 10⁴, mixed atomic initial states) and compare
/// the closed form against the brute-force oracle elementwise.
pub fn oracle_equivalence_suite(draws: usize, seed: u64) -> Result<OracleSuiteReport> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut report = OracleSuiteReport {
        draws,
        max_deviation: 0.0,
        worst_case: String::new(),
        max_norm_drift: 0.0,
        max_invariant_drift: 0.0,
    };
    for i in 0..draws {
        let k = *[0.0, 1e-4, 0.5, 1.0].choose(&mut rng).unwrap();
        let g = 10f64.powf(rng.gen_range(-3.0..-0.5));
        let n_bar = rng.gen_range(0.0..40.0);
        let delta = if k > 0.0 && rng.gen::<f64>() < 1.0 / 3.0 {
            // Critical detuning at the (real-valued) n̄ of this draw.
            2.0 * k * n_bar + g * g * (1.0 + k + 2.0 * k * n_bar) / k
        } else {
            *[0.0, 0.01].choose(&mut rng).unwrap()
        };
        let t = rng.gen_range(0.0..1e4);
        let atom = match i % 3 {
            0 => AtomState::Excited,
            1 => AtomState::Ground,
            _ => AtomState::Superposition {
                c_e: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c_g: Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2),
            },
        };
        let params = ModelParams::from_delta(1.0, delta, g, k)?;
        let cutoff = FockCutoff::for_coherent(n_bar)?;
        let field = coherent_state(Complex64::new(n_bar.sqrt(), 0.0), cutoff)?;
        let init = InitialCondition::new(atom, field);

        let start = AtomFieldState::from_initial(&init)?;
        let n0 = invariant_n(&params, &start);
        let closed = to_schrodinger(&params, &evolve_closed_form(&params, &init, t)?);
        let oracle = oracle_evolve(&params, &init, t, cutoff)?;

        let mut dev = 0.0_f64;
        for n in 0..=closed.n_max() {
            dev = dev.max((closed.c_e[n] - oracle.c_e[n]).norm());
            dev = dev.max((closed.c_g[n] - oracle.c_g[n]).norm());
        }
        if dev > report.max_deviation {
            report.max_deviation = dev;
            report.worst_case = format!(
                "k={k} g={g:.6} nbar={n_bar:.3} delta={delta:.6} t={t:.1} n_max={}",
                cutoff.n_max()
            );
        }
        for st in [&closed, &oracle] {
            report.max_norm_drift = report.max_norm_drift.max((st.norm_sqr() - 1.0).abs());
            report.max_invariant_drift = report
                .max_invariant_drift
                .max((invariant_n(&params, st) - n0).abs());
        }
    }
    Ok(report)
}
