//! `njc` — simulator for a two-level atom coupled to a single quantized
//! field mode through an intensity-dependent coupling, with a Kerr
//! nonlinearity on the field.
//!
//! The Hamiltonian (field frequency ω, atom/field ratio r, coupling gω,
//! nonlinearity k) is
//!
//! ```text
//! H = ω [â†â + (r/2) σz] + kω â†²â² + gω (√(1 + k â†â) â σ₊ + h.c.)
//! ```
//!
//! `H` decomposes into 2×2 blocks spanned by {|e,n⟩, |g,n+1⟩}, so the
//! spectrum and the time evolution are available in closed form. The crate
//! provides:
//!
//! - [`algebra`]: truncated-Fock-space ladder operators {K₋, K₊, K₀},
//!   coherent/Fock state constructors, operator expectation values;
//! - [`spectrum`]: per-block detunings, Rabi frequencies, dressed
//!   eigenvalues and mixing angles, the critical detuning, and spectrum
//!   sweeps over the detuning;
//! - [`dynamics`]: exact closed-form evolution of the joint amplitudes,
//!   plus an independent brute-force oracle that diagonalizes the full
//!   truncated Hamiltonian (used for cross-validation);
//! - [`observables`]: atomic inversion and its collapse/revival envelope,
//!   photon statistics and Mandel Q, quadrature variances, state overlap
//!   and its stationary-phase decay envelope;
//! - [`scenario`] / [`runner`]: flat key-value scenario files, built-in
//!   presets, and deterministic CSV/JSON emission for the CLI.
//!
//! Numerical architecture: long time series (t up to ~10⁷ at frequencies
//! of order 10⁻²) make phase arguments like Ωn·t large enough that plain
//! f64 evaluation loses ~1e−9 of phase. Every oscillatory phase in both
//! the closed form and the oracle is therefore assembled and reduced
//! mod 2π in double-double arithmetic (~106-bit) before the trig call,
//! keeping the two independent evolution routes within ~1e−12 of each
//! other.

pub mod algebra;
pub mod dd;
pub mod dynamics;
pub mod error;
pub mod observables;
pub mod runner;
pub mod scenario;
pub mod spectrum;

pub use error::{NjcError, Result};

/// Small numeric helpers shared by the library, the CLI runner, and tests.
pub mod util {
    /// `n` evenly spaced samples from `a` to `b` inclusive (the endpoints
    /// are exact). `n == 1` yields `[a]`.
    pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![a];
        }
        let step = (b - a) / ((n - 1) as f64);
        let mut out: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
        out[n - 1] = b;
        out
    }

}
