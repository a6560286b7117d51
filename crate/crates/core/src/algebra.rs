//! Truncated-Fock-space realization of the interpolating ladder algebra
//! {K₋, K₊, K₀}, coherent and Fock state constructors, and generic
//! operator expectation values.
//!
//! The deformed ladder operator is K₋ = √(1 + k â†â) â, with matrix
//! elements ⟨n−1|K₋|n⟩ = √(n(1 + k(n−1))), and K₀ = k n̂ + 1/2. The set
//! closes: [K₋, K₊] = 2K₀ and [K₀, K±] = ±k K±, interpolating between the
//! Heisenberg–Weyl algebra at k = 0 (K₋ = â, 2K₀ = 1) and SU(1,1)
//! structure at k = 1.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{NjcError, Result};

/// Probability mass allowed beyond the truncation boundary.
pub const TAIL_BUDGET: f64 = 1e-12;

/// Physical constants of the model.
///
/// The field frequency is `omega`, the atomic transition frequency is
/// ν = rω, the coupling energy is gω, and the Kerr coefficient is χ = kω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Field frequency ω (sets the energy/time units; must be > 0).
    pub omega: f64,
    /// Atom/field frequency ratio r = ν/ω (detuning Δ = (r−1)ω).
    pub r: f64,
    /// Dimensionless coupling; the coupling energy is gω. Must be ≥ 0.
    pub g: f64,
    /// Dimensionless nonlinearity, restricted to 0 ≤ k ≤ 1.
    pub k: f64,
}

impl ModelParams {
    /// Validated constructor.
    pub fn new(omega: f64, r: f64, g: f64, k: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(NjcError::Validation(format!(
                "omega must be finite and > 0, got {omega}"
            )));
        }
        if !r.is_finite() {
            return Err(NjcError::Validation(format!("r must be finite, got {r}")));
        }
        if !g.is_finite() || g < 0.0 {
            return Err(NjcError::Validation(format!(
                "g must be finite and >= 0, got {g}"
            )));
        }
        if !k.is_finite() || !(0.0..=1.0).contains(&k) {
            return Err(NjcError::Validation(format!(
                "k must satisfy 0 <= k <= 1, got {k}"
            )));
        }
        Ok(ModelParams { omega, r, g, k })
    }

    /// Constructor from the detuning Δ instead of the ratio: r = 1 + Δ/ω.
    pub fn from_delta(omega: f64, delta: f64, g: f64, k: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(NjcError::Validation(format!(
                "delta must be finite, got {delta}"
            )));
        }
        Self::new(omega, 1.0 + delta / omega, g, k)
    }

    /// Atomic transition frequency ν = rω.
    #[inline]
    pub fn nu(&self) -> f64 {
        self.r * self.omega
    }

    /// Detuning Δ = (r − 1)ω.
    #[inline]
    pub fn delta(&self) -> f64 {
        (self.r - 1.0) * self.omega
    }

    /// Kerr coefficient χ = kω.
    #[inline]
    pub fn chi(&self) -> f64 {
        self.k * self.omega
    }
}

/// Poisson weights e^{−n̄} n̄ⁿ/n! for n = 0..=n_max, computed by a
/// log-space recurrence (no factorial overflow for any n̄ or n).
pub fn poisson_weights(n_bar: f64, n_max: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n_max + 1);
    if n_bar == 0.0 {
        w.push(1.0);
        w.extend(std::iter::repeat_n(0.0, n_max));
        return w;
    }
    let ln_nbar = n_bar.ln();
    let mut lw = -n_bar;
    w.push(lw.exp());
    for n in 1..=n_max {
        lw += ln_nbar - (n as f64).ln();
        w.push(lw.exp());
    }
    w
}

/// Poisson mass strictly above `n_max` (summed out to n_max + 400, far past
/// any non-negligible contribution for the supported n̄ range).
pub fn poisson_tail(n_bar: f64, n_max: usize) -> f64 {
    let w = poisson_weights(n_bar, n_max + 400);
    w[n_max + 1..].iter().sum()
}

/// Fock-space truncation boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockCutoff {
    n_max: usize,
}

impl FockCutoff {
    /// Explicit cutoff; `n_max` must be at least 1.
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(NjcError::Validation(
                "cutoff n_max must be >= 1".to_string(),
            ));
        }
        Ok(FockCutoff { n_max })
    }

    /// Default cutoff for a coherent state of mean photon number `n_bar`:
    /// start from max(64, ⌈n̄ + 8√n̄⌉) and raise until the Poisson tail
    /// beyond the cutoff is below the 1e−12 budget.
    pub fn for_coherent(n_bar: f64) -> Result<Self> {
        if !n_bar.is_finite() || n_bar < 0.0 {
            return Err(NjcError::Validation(format!(
                "n_bar must be finite and >= 0, got {n_bar}"
            )));
        }
        let mut n_max = ((n_bar + 8.0 * n_bar.sqrt()).ceil() as usize).max(64);
        while poisson_tail(n_bar, n_max) >= TAIL_BUDGET {
            n_max += 1;
        }
        Ok(FockCutoff { n_max })
    }

    /// Largest retained Fock index.
    #[inline]
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of retained basis states, n_max + 1.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }
}

/// Normalized complex amplitudes c_0..c_{n_max} of a pure field state.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    amplitudes: Vec<Complex64>,
}

impl FieldState {
    /// Wrap a raw amplitude vector, enforcing normalization within 1e−12.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(NjcError::Validation(
                "field state needs at least one amplitude".to_string(),
            ));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(NjcError::Validation(format!(
                "field state norm^2 = {norm} is not 1 within 1e-12"
            )));
        }
        Ok(FieldState { amplitudes })
    }

    /// Amplitudes c_0..c_{n_max}.
    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Largest Fock index.
    #[inline]
    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// Occupation probabilities P_n = |c_n|².
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Mean photon number Σ n |c_n|².
    pub fn mean_n(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }
}

/// Coherent state |α⟩ truncated at the cutoff: c_n = e^{−|α|²/2} αⁿ/√n!,
/// evaluated by a log-space recurrence and renormalized after truncation.
///
/// Fails with `TailTooHeavy` if the truncated mass reaches 1e−12.
pub fn coherent_state(alpha: Complex64, cutoff: FockCutoff) -> Result<FieldState> {
    let n_bar = alpha.norm_sqr();
    if !n_bar.is_finite() {
        return Err(NjcError::Validation("alpha must be finite".to_string()));
    }
    let n_max = cutoff.n_max();
    let tail = poisson_tail(n_bar, n_max);
    if tail >= TAIL_BUDGET {
        return Err(NjcError::TailTooHeavy { mass: tail });
    }
    let weights = poisson_weights(n_bar, n_max);
    let total: f64 = weights.iter().sum();
    let phase = alpha.arg();
    let amplitudes = weights
        .iter()
        .enumerate()
        .map(|(n, w)| Complex64::from_polar((w / total).sqrt(), phase * n as f64))
        .collect();
    Ok(FieldState { amplitudes })
}

/// Fock state |n⟩ on the truncated ladder.
pub fn fock_state(n: usize, cutoff: FockCutoff) -> Result<FieldState> {
    if n > cutoff.n_max() {
        return Err(NjcError::IndexBeyondCutoff {
            n,
            n_max: cutoff.n_max(),
        });
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff.dim()];
    amplitudes[n] = Complex64::new(1.0, 0.0);
    Ok(FieldState { amplitudes })
}

/// Dense matrices of the deformed and bosonic ladder operators.
#[derive(Debug, Clone)]
pub struct LadderMatrices {
    /// K₋ = √(1 + k â†â) â.
    pub k_minus: DMatrix<Complex64>,
    /// K₊ = K₋†.
    pub k_plus: DMatrix<Complex64>,
    /// K₀ = k n̂ + 1/2 (diagonal).
    pub k_zero: DMatrix<Complex64>,
    /// Bosonic annihilation â.
    pub a: DMatrix<Complex64>,
    /// Bosonic creation â†.
    pub a_dagger: DMatrix<Complex64>,
}

/// Build the ladder matrices on the truncated space:
/// ⟨n−1|K₋|n⟩ = √(n(1 + k(n−1))), ⟨n|K₀|n⟩ = kn + 1/2, ⟨n−1|â|n⟩ = √n.
pub fn build_ladder(params: &ModelParams, cutoff: FockCutoff) -> LadderMatrices {
    let d = cutoff.dim();
    let k = params.k;
    let mut k_minus = DMatrix::<Complex64>::zeros(d, d);
    let mut a = DMatrix::<Complex64>::zeros(d, d);
    for n in 1..d {
        let nf = n as f64;
        k_minus[(n - 1, n)] = Complex64::new((nf * (1.0 + k * (nf - 1.0))).sqrt(), 0.0);
        a[(n - 1, n)] = Complex64::new(nf.sqrt(), 0.0);
    }
    let mut k_zero = DMatrix::<Complex64>::zeros(d, d);
    for n in 0..d {
        k_zero[(n, n)] = Complex64::new(k * n as f64 + 0.5, 0.0);
    }
    LadderMatrices {
        k_plus: k_minus.adjoint(),
        a_dagger: a.adjoint(),
        k_minus,
        k_zero,
        a,
    }
}

/// Expectation value ⟨state| op |state⟩.
pub fn expectation(op: &DMatrix<Complex64>, state: &FieldState) -> Result<Complex64> {
    let dim = state.amplitudes.len();
    if op.nrows() != dim || op.ncols() != dim {
        return Err(NjcError::DimensionMismatch {
            op: op.nrows(),
            state: dim,
        });
    }
    let v = DVector::from_column_slice(&state.amplitudes);
    Ok((v.adjoint() * op * v)[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(delta: f64, g: f64, k: f64) -> ModelParams {
        ModelParams::from_delta(1.0, delta, g, k).unwrap()
    }

    fn max_abs(m: &DMatrix<Complex64>, rows: usize) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..rows {
            for j in 0..rows {
                worst = worst.max(m[(i, j)].norm());
            }
        }
        worst
    }

    #[test]
    fn params_validation_and_derived_quantities() {
        let p = ModelParams::new(2.0, 1.5, 0.1, 0.25).unwrap();
        assert_eq!(p.nu(), 3.0);
        assert_eq!(p.delta(), 1.0);
        assert_eq!(p.chi(), 0.5);
        assert!(ModelParams::new(0.0, 1.0, 0.1, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, -0.1, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.1, 1.5).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.1, -0.1).is_err());
        assert!(ModelParams::from_delta(1.0, f64::NAN, 0.1, 0.0).is_err());
    }

    #[test]
    fn ladder_reduces_to_bosonic_at_k_zero() {
        let p = params(0.0, 0.1, 0.0);
        let lad = build_ladder(&p, FockCutoff::new(20).unwrap());
        let diff = &lad.k_minus - &lad.a;
        assert!(max_abs(&diff, 21) == 0.0);
    }

    #[test]
    fn ladder_elements_at_k_one() {
        // ⟨0|K₋|1⟩ = √(1·1) = 1 and ⟨1|K₋|2⟩ = √(2·2) = 2.
        let p = params(0.0, 0.1, 1.0);
        let lad = build_ladder(&p, FockCutoff::new(8).unwrap());
        assert_relative_eq!(lad.k_minus[(0, 1)].re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(lad.k_minus[(1, 2)].re, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn commutators_close_on_the_interior() {
        // [K₋,K₊] = 2K₀ and [K₀,K±] = ±kK± away from the truncation edge.
        for &k in &[0.0, 1e-4, 0.5, 1.0] {
            let p = params(0.0, 0.1, k);
            let cutoff = FockCutoff::new(24).unwrap();
            let lad = build_ladder(&p, cutoff);
            let interior = cutoff.n_max() - 1; // rows/cols 0..n_max-2
            let comm1 = &lad.k_minus * &lad.k_plus
                - &lad.k_plus * &lad.k_minus
                - (&lad.k_zero * Complex64::new(2.0, 0.0));
            assert!(max_abs(&comm1, interior) < 1e-12, "k={k}");
            let comm2 = &lad.k_zero * &lad.k_plus
                - &lad.k_plus * &lad.k_zero
                - (&lad.k_plus * Complex64::new(k, 0.0));
            assert!(max_abs(&comm2, interior) < 1e-12, "k={k}");
            let comm3 = &lad.k_zero * &lad.k_minus - &lad.k_minus * &lad.k_zero
                + (&lad.k_minus * Complex64::new(k, 0.0));
            assert!(max_abs(&comm3, interior) < 1e-12, "k={k}");
        }
    }

    #[test]
    fn casimir_is_constant_on_the_interior() {
        // C = K₀² − (k/2)(K₋K₊ + K₊K₋) has equal diagonal entries
        // (value 1/4 − k/2) on the interior block.
        for &k in &[0.0, 1e-4, 0.5, 1.0] {
            let p = params(0.0, 0.1, k);
            let cutoff = FockCutoff::new(24).unwrap();
            let lad = build_ladder(&p, cutoff);
            let half_k = Complex64::new(k / 2.0, 0.0);
            let c = &lad.k_zero * &lad.k_zero
                - (&lad.k_minus * &lad.k_plus + &lad.k_plus * &lad.k_minus) * half_k;
            let expect = 0.25 - k / 2.0;
            for n in 0..cutoff.n_max() - 1 {
                assert!(
                    (c[(n, n)].re - expect).abs() < 1e-12,
                    "k={k} n={n}: {} vs {expect}",
                    c[(n, n)].re
                );
                assert!(c[(n, n)].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coherent_state_matches_poisson_statistics() {
        let cutoff = FockCutoff::for_coherent(30.0).unwrap();
        let alpha = Complex64::new(30.0_f64.sqrt(), 0.0);
        let st = coherent_state(alpha, cutoff).unwrap();
        // argmax of |c_n|² is n = 30.
        let probs = st.probabilities();
        let argmax = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmax, 30);
        // Poisson mean equals |α|².
        assert!((st.mean_n() - 30.0).abs() < 1e-9);
        // Normalized.
        let norm: f64 = probs.iter().sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_vacuum_limit() {
        let st = coherent_state(Complex64::new(0.0, 0.0), FockCutoff::new(64).unwrap()).unwrap();
        assert_eq!(st.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(st.amplitudes()[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn coherent_state_rejects_heavy_tails() {
        let err = coherent_state(
            Complex64::new(30.0_f64.sqrt(), 0.0),
            FockCutoff::new(40).unwrap(),
        )
        .unwrap_err();
        match err {
            NjcError::TailTooHeavy { mass } => assert!(mass >= 1e-12),
            other => panic!("expected TailTooHeavy, got {other:?}"),
        }
    }

    #[test]
    fn coherent_phase_enters_amplitudes() {
        let cutoff = FockCutoff::new(64).unwrap();
        let alpha = Complex64::from_polar(2.0, 0.7);
        let st = coherent_state(alpha, cutoff).unwrap();
        // c_n phase is n·arg(α).
        for n in 1..5 {
            let expect = 0.7 * n as f64;
            let got = st.amplitudes()[n].arg();
            let diff = (got - expect).rem_euclid(std::f64::consts::TAU);
            assert!(!(1e-12..=std::f64::consts::TAU - 1e-12).contains(&diff));
        }
    }

    #[test]
    fn default_cutoffs_hold_the_tail_budget() {
        assert_eq!(FockCutoff::for_coherent(30.0).unwrap().n_max(), 76);
        assert_eq!(FockCutoff::for_coherent(40.0).unwrap().n_max(), 92);
        assert_eq!(FockCutoff::for_coherent(100.0).unwrap().n_max(), 180);
        assert_eq!(FockCutoff::for_coherent(0.5).unwrap().n_max(), 64);
        assert!(FockCutoff::new(0).is_err());
    }

    #[test]
    fn fock_state_basics() {
        let cutoff = FockCutoff::new(10).unwrap();
        let vac = fock_state(0, cutoff).unwrap();
        assert_eq!(vac.amplitudes()[0], Complex64::new(1.0, 0.0));
        let five = fock_state(5, cutoff).unwrap();
        assert_eq!(five.mean_n(), 5.0);
        match fock_state(11, cutoff).unwrap_err() {
            NjcError::IndexBeyondCutoff { n, n_max } => {
                assert_eq!((n, n_max), (11, 10));
            }
            other => panic!("expected IndexBeyondCutoff, got {other:?}"),
        }
    }

    #[test]
    fn expectation_values() {
        let p = params(0.0, 0.1, 0.3);
        let cutoff = FockCutoff::for_coherent(30.0).unwrap();
        let lad = build_ladder(&p, cutoff);
        let st = coherent_state(Complex64::new(30.0_f64.sqrt(), 0.0), cutoff).unwrap();
        // Identity on any normalized state.
        let eye = DMatrix::<Complex64>::identity(cutoff.dim(), cutoff.dim());
        let one = expectation(&eye, &st).unwrap();
        assert!((one.re - 1.0).abs() < 1e-12 && one.im.abs() < 1e-14);
        // K₀ on vacuum = 1/2.
        let vac = fock_state(0, cutoff).unwrap();
        let k0 = expectation(&lad.k_zero, &vac).unwrap();
        assert!((k0.re - 0.5).abs() < 1e-15);
        // â†â on coherent √30 = 30 within 1e−9, imaginary part negligible.
        let num = &lad.a_dagger * &lad.a;
        let n_mean = expectation(&num, &st).unwrap();
        assert!((n_mean.re - 30.0).abs() < 1e-9);
        assert!(n_mean.im.abs() < 1e-12);
        // Dimension mismatch is rejected.
        let small = DMatrix::<Complex64>::identity(3, 3);
        assert!(matches!(
            expectation(&small, &st),
            Err(NjcError::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn commutator_identity_for_random_k(k in 0.0_f64..=1.0) {
            let p = params(0.0, 0.1, k);
            let cutoff = FockCutoff::new(16).unwrap();
            let lad = build_ladder(&p, cutoff);
            let comm = &lad.k_minus * &lad.k_plus - &lad.k_plus * &lad.k_minus
                - (&lad.k_zero * Complex64::new(2.0, 0.0));
            prop_assert!(max_abs(&comm, cutoff.n_max() - 1) < 1e-12);
        }
    }
}
