//! Observables derived from the dressed spectrum and the closed-form
//! evolution: atomic inversion and its oscillatory part, collapse/revival
//! time scales, photon statistics (distribution and Mandel Q), field
//! quadrature variances, the initial-state overlap, and the analytic overlap
//! envelope — plus the signal-processing helpers (moving RMS, normalized
//! autocorrelation, revival-peak search) used to locate revival structure in
//! long time series.
//!
//! Conventions: the closed-form series in this module assume the atom starts
//! excited and the field in a (truncated, renormalized) coherent state, the
//! regime in which the oscillatory inversion is the Fock-block sum
//! Σₙ Pₙ·(4Gₙ²/Ωₙ²)·cos(Ωₙ t). As everywhere in this crate, oscillatory
//! phases are assembled and reduced in double-double arithmetic so the
//! series stay phase-accurate out to t ~ 10⁷.

use num_complex::Complex64;

use crate::algebra::{coherent_state, FieldState, FockCutoff, ModelParams};
use crate::dd::Dd;
use crate::dynamics::{evolve_closed_form, AtomFieldState, AtomState, InitialCondition};
use crate::error::{NjcError, Result};
use crate::spectrum;
use crate::util::linspace;

/// Atomic inversion at one sample time. `w` is ⟨σ_z⟩ read off the state
/// amplitudes; `w_t` is the purely oscillatory closed-form part
/// Σₙ Pₙ·(4Gₙ²/Ωₙ²)·cos(Ωₙ t) built from the initial photon distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionRecord {
    pub t: f64,
    pub w: f64,
    pub w_t: f64,
}

/// Low-order field moments of a joint atom–field state: ⟨â⟩, ⟨â²⟩, ⟨n̂⟩, ⟨n̂²⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMoments {
    pub mean_a: Complex64,
    pub mean_a2: Complex64,
    pub mean_n: f64,
    pub mean_n2: f64,
}

/// Collapse/revival time scales for an initial coherent field with mean
/// photon number n̄, together with the quadratic-spectrum constants A and B
/// that enter the revival denominator 2A·n̄ + A + B = Ω²(n̄+1) − Ω²(n̄).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalEstimate {
    pub t_revival: f64,
    pub t_collapse: f64,
    pub const_a: f64,
    pub const_b: f64,
}

/// Photon-number distribution at time t for the excited-atom/coherent-field
/// initial condition, reported three ways: `closed` is the per-block closed
/// form (Pₙ/2)·[1 + Δₙ²/Ωₙ² + (4Gₙ²/Ωₙ²)·cos(Ωₙ t)], `exact` is
/// |C_{e,n}|² + |C_{g,n}|² from the full evolution, and `excited_marginal`
/// is |C_{e,n}|² alone. `closed` coincides with `excited_marginal` (it is
/// the excited-chain marginal, normalized only together with the ground
/// chain), while `exact` is the full, normalized distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub closed: Vec<f64>,
    pub exact: Vec<f64>,
    pub excited_marginal: Vec<f64>,
}

/// Location and smoothed height of the main revival of the oscillatory
/// inversion, as found by [`revival_peak`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalPeak {
    pub t_peak: f64,
    pub value: f64,
}

/// One Fock block's contribution to the oscillatory-inversion series: the
/// weighted amplitude Pₙ·4Gₙ²/Ωₙ² and the Rabi frequency Ωₙ held in
/// double-double form for accurate long-time phases. Blocks whose Rabi
/// frequency falls below 1e−14 cannot oscillate on any supported time scale
/// and are dropped (their weight is set to zero; this only happens when the
/// coupling itself is zero to within rounding).
struct RabiTerm {
    omega: Dd,
    weight: f64,
}

fn rabi_terms(params: &ModelParams, probs: &[f64]) -> Vec<RabiTerm> {
    probs
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            let omega = spectrum::rabi_frequency_dd(params, n);
            let w = omega.to_f64();
            let weight = if w < 1e-14 {
                0.0
            } else {
                let g = spectrum::coupling(params, n);
                p * (4.0 * g * g / (w * w))
            };
            RabiTerm { omega, weight }
        })
        .collect()
}

/// Oscillatory part of the inversion, W_T(t) = Σₙ Pₙ·(4Gₙ²/Ωₙ²)·cos(Ωₙ t),
/// for an initially excited atom and the photon distribution of `field`.
pub fn wt_closed(params: &ModelParams, field: &FieldState, t: f64) -> f64 {
    rabi_terms(params, &field.probabilities())
        .iter()
        .map(|term| term.weight * term.omega.mul_f64(t).cos_reduced())
        .sum()
}

/// Full closed-form inversion W(t) = 1 + Σₙ Pₙ·(4Gₙ²/Ωₙ²)·(cos(Ωₙ t) − 1)
/// for an initially excited atom; equals 1 + (W_T(t) − W_T(0)).
pub fn w_closed(params: &ModelParams, field: &FieldState, t: f64) -> f64 {
    let terms = rabi_terms(params, &field.probabilities());
    1.0 + terms
        .iter()
        .map(|term| term.weight * (term.omega.mul_f64(t).cos_reduced() - 1.0))
        .sum::<f64>()
}

fn envelope_of_terms(terms: &[RabiTerm], t: f64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for term in terms {
        let (s, c) = term.omega.mul_f64(t).sin_cos_reduced();
        re += term.weight * c;
        im += term.weight * s;
    }
    re.hypot(im)
}

/// Envelope of the oscillatory inversion: |Σₙ Pₙ·(4Gₙ²/Ωₙ²)·e^{iΩₙ t}|.
/// Replacing every cosine by a unit phasor removes the fast carrier while
/// keeping the slow dephasing/rephasing of the block sum, so this traces the
/// collapse and revival profile that W_T(t) oscillates inside.
pub fn wt_envelope(params: &ModelParams, field: &FieldState, t: f64) -> f64 {
    envelope_of_terms(&rabi_terms(params, &field.probabilities()), t)
}

/// [`wt_envelope`] evaluated over a whole time grid, assembling the
/// per-block frequencies once so long grids pay only one phase reduction
/// per block per sample.
pub fn wt_envelope_series(params: &ModelParams, field: &FieldState, ts: &[f64]) -> Vec<f64> {
    let terms = rabi_terms(params, &field.probabilities());
    ts.iter().map(|&t| envelope_of_terms(&terms, t)).collect()
}

/// Atomic inversion along a trajectory. `w` is read directly off each state;
/// `w_t` is the closed-form oscillatory part built from `p_n_source`, the
/// photon distribution of the initial field (the closed form assumes the
/// atom started excited). Every state must share `p_n_source`'s cutoff.
pub fn inversion(
    params: &ModelParams,
    states: &[AtomFieldState],
    p_n_source: &FieldState,
) -> Result<Vec<InversionRecord>> {
    for state in states {
        if state.n_max() != p_n_source.n_max() {
            return Err(NjcError::Validation(format!(
                "state cutoff n_max = {} does not match photon-distribution cutoff n_max = {}",
                state.n_max(),
                p_n_source.n_max()
            )));
        }
    }
    let terms = rabi_terms(params, &p_n_source.probabilities());
    Ok(states
        .iter()
        .map(|state| {
            let t = state.time();
            let w_t = terms
                .iter()
                .map(|term| term.weight * term.omega.mul_f64(t).cos_reduced())
                .sum();
            InversionRecord {
                t,
                w: state.inversion(),
                w_t,
            }
        })
        .collect())
}

/// Collapse and revival time scales for mean photon number `n_bar` (> 0,
/// treated as a continuous parameter). The revival time is
/// T_R = 4π·Ω(n̄)/|2A·n̄ + A + B| with A = 4(k²ω² + k g²ω²) and
/// B = 4(g²ω² + k g²ω² − Δkω); the collapse time is T_C = T_R/(4π√n̄).
/// The denominator equals Ω²(n̄+1) − Ω²(n̄), the Rabi-frequency spacing of
/// adjacent blocks; when it vanishes (e.g. g = 0 and k = 0) neighbouring
/// blocks never dephase and there is no revival scale.
pub fn revival_estimate(params: &ModelParams, n_bar: f64) -> Result<RevivalEstimate> {
    if !n_bar.is_finite() || n_bar <= 0.0 {
        return Err(NjcError::Validation(format!(
            "revival scales require n_bar > 0, got {n_bar}"
        )));
    }
    let om = params.omega;
    let om2 = om * om;
    let g2 = params.g * params.g;
    let k = params.k;
    let const_a = 4.0 * (k * k * om2 + k * g2 * om2);
    let const_b = 4.0 * (g2 * om2 + k * g2 * om2 - params.delta() * k * om);
    let denominator = 2.0 * const_a * n_bar + const_a + const_b;
    if denominator.abs() < 1e-30 {
        return Err(NjcError::NoRevivalScale { denominator });
    }
    let omega_bar = spectrum::rabi_frequency_real(params, n_bar);
    let t_revival = 4.0 * std::f64::consts::PI * omega_bar / denominator.abs();
    let t_collapse = t_revival / (4.0 * std::f64::consts::PI * n_bar.sqrt());
    Ok(RevivalEstimate {
        t_revival,
        t_collapse,
        const_a,
        const_b,
    })
}

/// Oscillatory inversion of the intensity-coupled (k = 1), resonant,
/// zero-Kerr limit, where the block sum closes to
/// g²·exp[n̄(cos ωt − 1)]·cos(n̄ sin ωt): an exactly ωt-periodic train of
/// full revivals. (The leading g² reflects the vanishing weight
/// 4Gₙ²/Ωₙ² → 4g²(1+n)(1+kn)/[Δₙ² + 4g²…] of each block at k = 1, Δ = 0
/// to lowest order in g.)
pub fn su11_resonant_wt(params: &ModelParams, n_bar: f64, t: f64) -> f64 {
    let wt = params.omega * t;
    params.g * params.g * (n_bar * (wt.cos() - 1.0)).exp() * (n_bar * wt.sin()).cos()
}

/// Photon-number distribution at time `t` for an initially excited atom and
/// coherent field of mean photon number `n_bar`, at the default cutoff for
/// that n̄. See [`PhotonDistribution`] for the three reported variants.
pub fn photon_distribution(params: &ModelParams, t: f64, n_bar: f64) -> Result<PhotonDistribution> {
    let cutoff = FockCutoff::for_coherent(n_bar)?;
    let field = coherent_state(Complex64::new(n_bar.sqrt(), 0.0), cutoff)?;
    let probs = field.probabilities();
    let init = InitialCondition::new(AtomState::Excited, field);
    let state = evolve_closed_form(params, &init, t)?;
    let exact = state.photon_probabilities();
    let excited_marginal: Vec<f64> = state.c_e().iter().map(|c| c.norm_sqr()).collect();
    let closed = (0..=cutoff.n_max())
        .map(|n| {
            let omega_dd = spectrum::rabi_frequency_dd(params, n);
            let w = omega_dd.to_f64();
            if w < 1e-14 {
                // Non-oscillating block: the n-th occupation stays put.
                probs[n]
            } else {
                let dn = spectrum::block_detuning(params, n);
                let g = spectrum::coupling(params, n);
                let cos_full = omega_dd.mul_f64(t).cos_reduced();
                0.5 * probs[n] * (1.0 + dn * dn / (w * w) + (4.0 * g * g / (w * w)) * cos_full)
            }
        })
        .collect();
    Ok(PhotonDistribution {
        closed,
        exact,
        excited_marginal,
    })
}

/// Mandel Q parameter Q = (⟨n̂²⟩ − ⟨n̂⟩²)/⟨n̂⟩ of a photon-number
/// distribution: a Poisson distribution gives Q = 1, sub-Poissonian light
/// Q < 1, and a Fock state Q = 0. The input weights are normalized
/// internally; entries below −1e−12 (beyond rounding noise) are rejected.
pub fn mandel_q(dist: &[f64]) -> Result<f64> {
    if dist.is_empty() {
        return Err(NjcError::Validation(
            "Mandel Q needs a non-empty distribution".to_string(),
        ));
    }
    let mut total = 0.0;
    let mut mean = 0.0;
    let mut mean2 = 0.0;
    for (n, &p) in dist.iter().enumerate() {
        if !p.is_finite() {
            return Err(NjcError::Numerical(format!(
                "non-finite probability {p} at n = {n}"
            )));
        }
        if p < -1e-12 {
            return Err(NjcError::Validation(format!(
                "negative probability {p} at n = {n}"
            )));
        }
        let nf = n as f64;
        total += p;
        mean += nf * p;
        mean2 += nf * nf * p;
    }
    if total <= 0.0 {
        return Err(NjcError::Validation(
            "distribution has zero total mass".to_string(),
        ));
    }
    let mean = mean / total;
    let mean2 = mean2 / total;
    if mean <= 0.0 {
        return Err(NjcError::VacuumOnly);
    }
    Ok((mean2 - mean * mean) / mean)
}

/// Field moments ⟨â⟩, ⟨â²⟩, ⟨n̂⟩, ⟨n̂²⟩ of a joint atom–field state, traced
/// over the atom. Off-diagonal sums run only over retained Fock indices, so
/// a state with support pressed against the cutoff underestimates |⟨â⟩|;
/// the default cutoffs keep that truncation below the 1e−12 tail budget.
pub fn field_moments(state: &AtomFieldState) -> FieldMoments {
    let ce = state.c_e();
    let cg = state.c_g();
    let dim = ce.len();
    let mut mean_a = Complex64::new(0.0, 0.0);
    let mut mean_a2 = Complex64::new(0.0, 0.0);
    let mut mean_n = 0.0;
    let mut mean_n2 = 0.0;
    for n in 0..dim {
        let nf = n as f64;
        let p = ce[n].norm_sqr() + cg[n].norm_sqr();
        mean_n += nf * p;
        mean_n2 += nf * nf * p;
        if n + 1 < dim {
            let root = (nf + 1.0).sqrt();
            mean_a += root * (ce[n].conj() * ce[n + 1] + cg[n].conj() * cg[n + 1]);
        }
        if n + 2 < dim {
            let root = ((nf + 1.0) * (nf + 2.0)).sqrt();
            mean_a2 += root * (ce[n].conj() * ce[n + 2] + cg[n].conj() * cg[n + 2]);
        }
    }
    FieldMoments {
        mean_a,
        mean_a2,
        mean_n,
        mean_n2,
    }
}

/// Variances of the field quadratures X = (â + â†)/√2 and Y = (â − â†)/i√2:
/// δX² = ⟨n̂⟩ + ½ + Re⟨â²⟩ − 2(Re⟨â⟩)² and
/// δY² = ⟨n̂⟩ + ½ − Re⟨â²⟩ − 2(Im⟨â⟩)², each equal to the vacuum floor ½
/// for any coherent state, with the uncertainty product bounded below by ¼.
/// Returns (δX², δY²).
pub fn quadrature_variances(state: &AtomFieldState) -> (f64, f64) {
    let m = field_moments(state);
    let x2 = 0.25 * (2.0 * m.mean_n + 1.0 + 2.0 * m.mean_a2.re);
    let y2 = 0.25 * (2.0 * m.mean_n + 1.0 - 2.0 * m.mean_a2.re);
    let dx2 = 2.0 * (x2 - m.mean_a.re * m.mean_a.re);
    let dy2 = 2.0 * (y2 - m.mean_a.im * m.mean_a.im);
    (dx2, dy2)
}

/// Squared overlap |⟨ψ(0)|ψ(t)⟩|² of the evolving joint state with its
/// initial condition (excited atom, coherent field `alpha`), evaluated in
/// the per-block rotating frame where it closes to
/// |Σₙ Pₙ·(cos(Ωₙt/2) + i·Δₙ·sin(Ωₙt/2)/Ωₙ)|². Uses the default cutoff for
/// |α|² with renormalized Poisson weights, so overlap(…, 0) = 1 exactly.
pub fn overlap(params: &ModelParams, alpha: Complex64, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(NjcError::Validation(format!(
            "overlap time must be finite and >= 0, got {t}"
        )));
    }
    let cutoff = FockCutoff::for_coherent(alpha.norm_sqr())?;
    let field = coherent_state(alpha, cutoff)?;
    let probs = field.probabilities();
    let half_t = 0.5 * t;
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &p) in probs.iter().enumerate() {
        let omega_dd = spectrum::rabi_frequency_dd(params, n);
        let w = omega_dd.to_f64();
        let (s, c) = omega_dd.mul_f64(half_t).sin_cos_reduced();
        let hso = if w < 1e-14 { half_t } else { s / w };
        let dn = spectrum::block_detuning(params, n);
        acc += p * Complex64::new(c, dn * hso);
    }
    Ok(acc.norm_sqr())
}

/// Squared overlap |⟨ψ(0)|ψ(t)⟩|² in the same per-block rotating frame as
/// [`overlap`], computed directly from a pair of interaction-picture states
/// (as produced by the closed-form evolution). `initial` must be at t = 0
/// and share the cutoff of `evolved`. Unlike [`overlap`] this makes no
/// assumption about the initial atom or field. The boundary components
/// (the ground chain at n = 0 and the excited chain at the cutoff) carry no
/// block phase and enter bare.
pub fn overlap_from_states(
    params: &ModelParams,
    initial: &AtomFieldState,
    evolved: &AtomFieldState,
) -> Result<f64> {
    if initial.n_max() != evolved.n_max() {
        return Err(NjcError::Validation(format!(
            "state cutoffs differ: {} vs {}",
            initial.n_max(),
            evolved.n_max()
        )));
    }
    if initial.time() != 0.0 {
        return Err(NjcError::Validation(format!(
            "reference state must sit at t = 0, got t = {}",
            initial.time()
        )));
    }
    let t = evolved.time();
    let n_max = evolved.n_max();
    let ce0 = initial.c_e();
    let cg0 = initial.c_g();
    let ce = evolved.c_e();
    let cg = evolved.c_g();
    let mut acc = cg0[0].conj() * cg[0] + ce0[n_max].conj() * ce[n_max];
    let half_t = 0.5 * t;
    for n in 0..n_max {
        let (s, c) = spectrum::block_detuning_dd(params, n)
            .mul_f64(half_t)
            .sin_cos_reduced();
        // e^{−iΔₙt/2} undoes the block phase on the excited component;
        // its conjugate undoes the opposite phase on the ground component.
        let strip = Complex64::new(c, -s);
        acc += strip * (ce0[n].conj() * ce[n]) + strip.conj() * (cg0[n + 1].conj() * cg[n + 1]);
    }
    Ok(acc.norm_sqr())
}

/// Analytic envelope of the overlap decay around reference occupation
/// N = `n_ref` (≥ n̄): with Ω(n) the continuous Rabi frequency and Ω′, Ω″
/// its first two n-derivatives at N,
/// envelope(t) = [1 + N²Ω″t²/4]^(−1/4) · exp[−N²Ω′t²/4].
/// At the critical detuning Ω′(n̄) = 0, the exponential factor freezes and
/// only the slow quartic-root decay of the curvature term remains — the
/// mechanism behind the long-lived overlap there.
pub fn overlap_envelope(params: &ModelParams, n_bar: f64, n_ref: f64, t: f64) -> f64 {
    debug_assert!(
        n_ref >= n_bar,
        "envelope reference occupation must satisfy n_ref >= n_bar"
    );
    let om = params.omega;
    let om2 = om * om;
    let g2o2 = params.g * params.g * om2;
    let k = params.k;
    let dn = params.delta() - 2.0 * k * n_ref * om;
    // F(n) = Ω²(n) and its first two n-derivatives at n_ref.
    let f = dn * dn + 4.0 * g2o2 * (1.0 + k * n_ref) * (1.0 + n_ref);
    let fp = -4.0 * k * om * dn + 4.0 * g2o2 * (1.0 + k + 2.0 * k * n_ref);
    let fpp = 8.0 * k * k * om2 + 8.0 * k * g2o2;
    let w = f.sqrt();
    let wp = fp / (2.0 * w);
    let wpp = fpp / (2.0 * w) - fp * fp / (4.0 * f * w);
    let n2t2 = n_ref * n_ref * t * t;
    (1.0 + n2t2 * wpp / 4.0).powf(-0.25) * (-(n2t2 * wp / 4.0)).exp()
}

/// Moving root-mean-square of `x` with window length `wlen` (clamped to at
/// least 1): entry i averages x² over indices [i − wlen/2, i + wlen/2]
/// clipped to the series, using a prefix-sum so the whole pass is O(len).
pub fn moving_rms(x: &[f64], wlen: usize) -> Vec<f64> {
    let w = wlen.max(1);
    let half = w / 2;
    let mut prefix = Vec::with_capacity(x.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in x {
        acc += v * v;
        prefix.push(acc);
    }
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(x.len() - 1) + 1;
            ((prefix[hi] - prefix[lo]) / ((hi - lo) as f64)).sqrt()
        })
        .collect()
}

/// Normalized autocorrelation of `x` at integer `lag`: the mean is removed,
/// the numerator sums the first len − lag overlapping products, and the
/// denominator is the full-series sum of squares (so even a perfectly
/// periodic series scores (len − lag)/len, not 1). Series too short to
/// overlap meaningfully (len < lag + 3) and flat series score 0.
pub fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    if x.len() < lag + 3 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let n = x.len() - lag;
    let mut num = 0.0;
    for i in 0..n {
        num += (x[i] - mean) * (x[i + lag] - mean);
    }
    let den: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Locate the main revival of the oscillatory inversion for an initially
/// excited atom and coherent field of mean photon number `n_bar`.
///
/// The analytic envelope [`wt_envelope`] is sampled on 4000 points over
/// [0, 2T_R], smoothed by a moving RMS of window length T_R/50, and the
/// largest strictly interior local maximum with T_C < t < 2T_R is reported.
/// Smoothing the *envelope* (rather than the raw oscillation) matters: the
/// raw signal's carrier beats against the sampling grid and can leave
/// spurious local maxima deep inside the collapsed region.
pub fn revival_peak(params: &ModelParams, n_bar: f64) -> Result<RevivalPeak> {
    let est = revival_estimate(params, n_bar)?;
    let t_r = est.t_revival;
    let t_c = est.t_collapse;
    let cutoff = FockCutoff::for_coherent(n_bar)?;
    let field = coherent_state(Complex64::new(n_bar.sqrt(), 0.0), cutoff)?;
    let ts = linspace(0.0, 2.0 * t_r, 4000);
    let env = wt_envelope_series(params, &field, &ts);
    let dt = ts[1] - ts[0];
    let wlen = (((t_r / 50.0) / dt).round() as usize).max(1);
    let sm = moving_rms(&env, wlen);
    let mut best: Option<(f64, f64)> = None;
    for i in 1..ts.len() - 1 {
        if t_c < ts[i]
            && ts[i] < 2.0 * t_r
            && sm[i] > sm[i - 1]
            && sm[i] > sm[i + 1]
            && best.is_none_or(|(_, v)| sm[i] > v)
        {
            best = Some((ts[i], sm[i]));
        }
    }
    best.map(|(t_peak, value)| RevivalPeak { t_peak, value })
        .ok_or_else(|| {
            NjcError::Numerical(format!(
                "no interior local maximum of the smoothed envelope in ({t_c:.3}, {:.3})",
                2.0 * t_r
            ))
        })
}
