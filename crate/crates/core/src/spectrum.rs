//! Dressed-state eigensystem of the 2×2 blocks: block detunings, Rabi
//! frequencies, eigenvalues, mixing angles, the critical detuning where
//! the Rabi frequency is stationary in n, and the quadratic Rabi
//! approximation around n̄.
//!
//! Block n couples |e,n⟩ with |g,n+1⟩. Its matrix in that basis is
//! `center·I + (Δn/2)σz + G·σx` with center = (kn² + n + 1/2)ω,
//! Δn = Δ − 2knω and G = gω√((1+n)(1+kn)), so the dressed eigenvalues
//! are E±,n = center ± Ωn/2 with the Rabi frequency Ωn = √(Δn² + 4G²).

use crate::algebra::ModelParams;
use crate::dd::Dd;
use crate::error::{NjcError, Result};

/// Per-block dressed eigendata.
///
/// The mixing coefficients define the dressed states
/// |+,n⟩ = cosθ|e,n⟩ + sinθ|g,n+1⟩ and |−,n⟩ = sinθ|e,n⟩ − cosθ|g,n+1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedMode {
    /// Block index.
    pub n: usize,
    /// Block detuning Δn = Δ − 2knω.
    pub delta_n: f64,
    /// Rabi frequency Ωn = √(Δn² + 4G²).
    pub omega_n: f64,
    /// Upper dressed eigenvalue E₊,n.
    pub e_plus: f64,
    /// Lower dressed eigenvalue E₋,n.
    pub e_minus: f64,
    /// cos θn = 2G / √((Ωn−Δn)² + 4G²).
    pub cos_theta: f64,
    /// sin θn = (Ωn−Δn) / √((Ωn−Δn)² + 4G²).
    pub sin_theta: f64,
}

/// Bare (uncoupled) energies of |e,n⟩ and |g,n⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareEnergies {
    /// ℰ_{e,n} = (n + kn² − kn)ω + ν/2.
    pub e_excited: f64,
    /// ℰ_{g,n} = (n + kn² − kn)ω − ν/2.
    pub e_ground: f64,
}

/// Block detuning Δn = Δ − 2knω.
pub fn block_detuning(params: &ModelParams, n: usize) -> f64 {
    block_detuning_real(params, n as f64)
}

/// Block detuning at a continuous block coordinate.
pub(crate) fn block_detuning_real(params: &ModelParams, n: f64) -> f64 {
    params.delta() - 2.0 * params.k * n * params.omega
}

/// Coupling energy G_n = gω√((1+n)(1+kn)) of block n.
pub fn coupling(params: &ModelParams, n: usize) -> f64 {
    coupling_real(params, n as f64)
}

pub(crate) fn coupling_real(params: &ModelParams, n: f64) -> f64 {
    params.g * params.omega * ((1.0 + n) * (1.0 + params.k * n)).sqrt()
}

/// Rabi frequency Ωn = √(Δn² + 4g²ω²(1+kn)(1+n)).
pub fn rabi_frequency(params: &ModelParams, n: usize) -> f64 {
    rabi_frequency_real(params, n as f64)
}

pub(crate) fn rabi_frequency_real(params: &ModelParams, n: f64) -> f64 {
    let dn = block_detuning_real(params, n);
    let g = coupling_real(params, n);
    (dn * dn + 4.0 * g * g).sqrt()
}

/// Detuning at which Ωn is stationary in n at n = n̄ (requires k > 0):
/// Δc = 2kωn̄ + g²ω(1 + k + 2kn̄)/k.
///
/// Derived from dΩn²/dn = 0; the Rabi frequency then attains its minimum
/// over integer n at (or immediately next to) n̄.
pub fn critical_detuning(params: &ModelParams, n_bar: usize) -> Result<f64> {
    if params.k == 0.0 {
        return Err(NjcError::KerrTermRequired);
    }
    let (g, k, om) = (params.g, params.k, params.omega);
    let nb = n_bar as f64;
    Ok(2.0 * k * om * nb + g * g * om * (1.0 + k + 2.0 * k * nb) / k)
}

/// Quadratic (Taylor) approximation of the Rabi frequency around n̄:
/// Ω_n ≈ Ω_n̄ + 2(n−n̄)²(k²ω² + kg²ω²)/Ω_n̄.
///
/// Meaningful in the stationary regime Δ = Δc(n̄) with k > 0.
pub fn rabi_approx(params: &ModelParams, n: usize, n_bar: usize) -> f64 {
    let om = params.omega;
    let (g, k) = (params.g, params.k);
    let w_bar = rabi_frequency(params, n_bar);
    let m = n as f64 - n_bar as f64;
    w_bar + 2.0 * m * m * (k * k * om * om + k * g * g * om * om) / w_bar
}

/// Bare energies of |e,n⟩ and |g,n⟩ (they differ by ν).
pub fn bare_energies(params: &ModelParams, n: usize) -> BareEnergies {
    let nf = n as f64;
    let base = (nf + params.k * nf * nf - params.k * nf) * params.omega;
    let half_nu = 0.5 * params.nu();
    BareEnergies {
        e_excited: base + half_nu,
        e_ground: base - half_nu,
    }
}

/// Dressed eigendata of block n.
///
/// Fails with `DegenerateBlock` when Ωn = 0 (which requires g = 0 and
/// Δn = 0 simultaneously); the mixing angle is genuinely undefined there.
pub fn dressed_mode(params: &ModelParams, n: usize) -> Result<DressedMode> {
    let delta_n = block_detuning(params, n);
    let g = coupling(params, n);
    let omega_n = rabi_frequency(params, n);
    if omega_n == 0.0 {
        return Err(NjcError::DegenerateBlock { n });
    }
    let (cos_theta, sin_theta) = if g == 0.0 {
        // Bare limit: for Δn > 0 the upper state is |e,n⟩ exactly; for
        // Δn < 0 the direct formula below is regular and gives (0, 1).
        if delta_n > 0.0 {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        }
    } else {
        // Ωn − Δn suffers catastrophic cancellation when Δn ≫ G; use the
        // identity Ωn − Δn = 4G²/(Ωn + Δn) on that side.
        let diff = if delta_n > 0.0 {
            4.0 * g * g / (omega_n + delta_n)
        } else {
            omega_n - delta_n
        };
        let denom = (diff * diff + 4.0 * g * g).sqrt();
        (2.0 * g / denom, diff / denom)
    };
    let nf = n as f64;
    let center = (params.k * nf * nf + nf + 0.5) * params.omega;
    Ok(DressedMode {
        n,
        delta_n,
        omega_n,
        e_plus: center + 0.5 * omega_n,
        e_minus: center - 0.5 * omega_n,
        cos_theta,
        sin_theta,
    })
}

/// One row of a detuning sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Detuning Δ of this row.
    pub delta: f64,
    /// Block index.
    pub n: usize,
    /// Upper dressed eigenvalue.
    pub e_plus: f64,
    /// Lower dressed eigenvalue.
    pub e_minus: f64,
    /// Bare energy ℰ_{e,n} (upper bare level of the block).
    pub bare_e: f64,
    /// Bare energy ℰ_{g,n+1} (lower bare level of the block; the two bare
    /// levels cross at Δ = 2knω, where the dressed pair only reaches its
    /// minimum gap 2G).
    pub bare_g: f64,
}

/// Sweep the dressed and bare block energies over a detuning grid, holding
/// ω, g, k from `base` fixed (its own detuning is ignored). Rows are
/// ordered by Δ, then by n as listed.
pub fn spectrum_sweep(
    base: &ModelParams,
    n_list: &[usize],
    delta_grid: &[f64],
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(n_list.len() * delta_grid.len());
    for &delta in delta_grid {
        let p = ModelParams::from_delta(base.omega, delta, base.g, base.k)?;
        for &n in n_list {
            let nf = n as f64;
            let center = (p.k * nf * nf + nf + 0.5) * p.omega;
            let omega_n = rabi_frequency(&p, n);
            let bare = bare_energies(&p, n);
            let bare_next = bare_energies(&p, n + 1);
            rows.push(SweepRow {
                delta,
                n,
                e_plus: center + 0.5 * omega_n,
                e_minus: center - 0.5 * omega_n,
                bare_e: bare.e_excited,
                bare_g: bare_next.e_ground,
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Double-double block quantities (phase-argument accuracy for long times).
// ---------------------------------------------------------------------------

/// Δn in double-double, assembled from error-free products.
pub(crate) fn block_detuning_dd(params: &ModelParams, n: usize) -> Dd {
    let delta = Dd::from_f64(params.r).add_f64(-1.0).mul_f64(params.omega);
    let shift = Dd::from_prod(params.k, params.omega).mul_f64(2.0 * n as f64);
    delta.sub(shift)
}

/// 4G² = 4g²ω²(1+n)(1+kn) in double-double.
pub(crate) fn four_coupling_sq_dd(params: &ModelParams, n: usize) -> Dd {
    let gw = Dd::from_prod(params.g, params.omega);
    let kn = Dd::from_prod(params.k, n as f64).add_f64(1.0);
    gw.mul(gw).mul_f64(4.0 * (n as f64 + 1.0)).mul(kn)
}

/// Ωn in double-double.
pub(crate) fn rabi_frequency_dd(params: &ModelParams, n: usize) -> Dd {
    let dn = block_detuning_dd(params, n);
    dn.mul(dn).add(four_coupling_sq_dd(params, n)).sqrt()
}

/// Bare energy ℰ_{e,n} or ℰ_{g,n} in double-double.
pub(crate) fn bare_energy_dd(params: &ModelParams, n: usize, excited: bool) -> Dd {
    let nf = n as f64;
    let kn2 = Dd::from_prod(params.k, nf * nf);
    let kn = Dd::from_prod(params.k, nf);
    let base = kn2.sub(kn).add_f64(nf).mul_f64(params.omega);
    let half_nu = Dd::from_prod(params.r, params.omega).mul_f64(0.5);
    if excited {
        base.add(half_nu)
    } else {
        base.sub(half_nu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ModelParams;

    fn params(delta: f64, g: f64, k: f64) -> ModelParams {
        ModelParams::from_delta(1.0, delta, g, k).unwrap()
    }

    const DC: f64 = 0.016061;

    #[test]
    fn block_detuning_values() {
        // k = 0: Δn = Δ for all n.
        let p0 = params(0.3, 0.1, 0.0);
        for n in [0, 5, 50] {
            assert_eq!(block_detuning(&p0, n), p0.delta());
        }
        // ω=1, k=1e−4, Δ=0.016061, n=30 → 0.010061.
        let p = params(DC, 1e-3, 1e-4);
        assert!((block_detuning(&p, 30) - 0.010061).abs() < 1e-12);
        // Sign change between n = 80 and n = 81 (root at Δ/2k ≈ 80.3).
        assert!(block_detuning(&p, 80) > 0.0);
        assert!(block_detuning(&p, 81) < 0.0);
    }

    #[test]
    fn rabi_frequency_values() {
        // k=0, Δ=0, g=0.1, n=3 → √(4·0.01·4) = 0.4.
        let p = params(0.0, 0.1, 0.0);
        assert!((rabi_frequency(&p, 3) - 0.4).abs() < 1e-15);
        // g = 0 → Ωn = |Δn|.
        let p0 = params(-0.25, 0.0, 1e-4);
        for n in [0, 7, 40] {
            assert_eq!(rabi_frequency(&p0, n), block_detuning(&p0, n).abs());
        }
        // Frozen value at the critical detuning.
        let pc = params(DC, 1e-3, 1e-4);
        assert!((rabi_frequency(&pc, 30) - 0.015019844240204356).abs() < 1e-13);
    }

    #[test]
    fn rabi_minimum_sits_at_n_bar_for_critical_detuning() {
        let pc = params(DC, 1e-3, 1e-4);
        let argmin = (0..=200)
            .min_by(|&a, &b| {
                rabi_frequency(&pc, a)
                    .partial_cmp(&rabi_frequency(&pc, b))
                    .unwrap()
            })
            .unwrap();
        assert_eq!(argmin, 30);
    }

    #[test]
    fn critical_detuning_reproduces_quoted_value() {
        let p = params(0.0, 1e-3, 1e-4);
        let dc = critical_detuning(&p, 30).unwrap();
        assert!((dc - 0.016061).abs() < 1e-6);
        // k = 0 is rejected.
        let p0 = params(0.0, 1e-3, 0.0);
        assert!(matches!(
            critical_detuning(&p0, 30),
            Err(NjcError::KerrTermRequired)
        ));
        // The continuous minimizer of Ωn lands within 0.5 of n̄.
        let pc = params(dc, 1e-3, 1e-4);
        let mut best = (0.0, f64::INFINITY);
        let mut x = 0.0;
        while x <= 200.0 {
            let w = rabi_frequency_real(&pc, x);
            if w < best.1 {
                best = (x, w);
            }
            x += 0.01;
        }
        assert!((best.0 - 30.0).abs() < 0.5, "minimizer at {}", best.0);
    }

    #[test]
    fn rabi_approx_properties() {
        let pc = params(DC, 1e-3, 1e-4);
        // Exact at n = n̄.
        assert_eq!(rabi_approx(&pc, 30, 30), rabi_frequency(&pc, 30));
        // Symmetric in (n − n̄).
        for m in 1..5 {
            assert_eq!(rabi_approx(&pc, 30 + m, 30), rabi_approx(&pc, 30 - m, 30));
        }
        // Relative error stays below 3% across n̄ ± √n̄ (measured ~2.5e−6).
        for n in 25..=35 {
            let exact = rabi_frequency(&pc, n);
            let rel = (rabi_approx(&pc, n, 30) - exact).abs() / exact;
            assert!(rel < 0.03, "n={n}: rel err {rel}");
            assert!(rel < 1e-5, "n={n}: rel err {rel} exceeds regression bound");
        }
    }

    #[test]
    fn dressed_mode_structure() {
        let p = params(0.25, 0.02, 1e-3);
        for n in [0, 3, 17] {
            let m = dressed_mode(&p, n).unwrap();
            // Orthonormal mixing pair.
            assert!((m.cos_theta.powi(2) + m.sin_theta.powi(2) - 1.0).abs() < 1e-12);
            // Gap equals Ωn, ordering holds.
            assert!(m.e_plus >= m.e_minus);
            assert!((m.e_plus - m.e_minus - m.omega_n).abs() < 1e-12);
            // Trace of the block.
            let nf = n as f64;
            let tr = 2.0 * (p.k * nf * nf + nf + 0.5) * p.omega;
            assert!((m.e_plus + m.e_minus - tr).abs() < 1e-12);
        }
    }

    #[test]
    fn dressed_mode_agrees_with_generic_2x2_eigensolver() {
        use nalgebra::Matrix2;
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            // xorshift: deterministic lightweight draws for this test
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let g = 1e-3 + 0.2 * next();
            let k = next();
            let delta = -0.5 + 1.5 * next();
            let n = (next() * 60.0) as usize;
            let p = params(delta, g, k);
            let m = dressed_mode(&p, n).unwrap();
            let nf = n as f64;
            let center = (p.k * nf * nf + nf + 0.5) * p.omega;
            let h = Matrix2::new(
                center + 0.5 * m.delta_n,
                coupling(&p, n),
                coupling(&p, n),
                center - 0.5 * m.delta_n,
            );
            let eig = nalgebra::SymmetricEigen::new(h);
            let (lo, hi) = if eig.eigenvalues[0] <= eig.eigenvalues[1] {
                (0, 1)
            } else {
                (1, 0)
            };
            assert!((m.e_minus - eig.eigenvalues[lo]).abs() < 1e-12);
            assert!((m.e_plus - eig.eigenvalues[hi]).abs() < 1e-12);
            // Eigenvector of E+ matches (cosθ, sinθ) up to overall sign.
            let v = eig.eigenvectors.column(hi);
            let dot = (v[0] * m.cos_theta + v[1] * m.sin_theta).abs();
            assert!((dot - 1.0).abs() < 1e-10, "mixing angles disagree: {dot}");
        }
    }

    #[test]
    fn dressed_mode_limits() {
        // Resonant block: symmetric mixing.
        let p = params(0.0, 0.05, 0.0);
        let m = dressed_mode(&p, 4).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.cos_theta - inv_sqrt2).abs() < 1e-12);
        assert!((m.sin_theta - inv_sqrt2).abs() < 1e-12);
        // g = 0, Δn > 0: dressed levels collapse onto the bare ones.
        let pb = params(0.4, 0.0, 1e-3);
        for n in [0, 2, 9] {
            let m = dressed_mode(&pb, n).unwrap();
            let be = bare_energies(&pb, n).e_excited;
            let bg = bare_energies(&pb, n + 1).e_ground;
            assert!((m.e_plus - be).abs() < 1e-12);
            assert!((m.e_minus - bg).abs() < 1e-12);
            assert_eq!((m.cos_theta, m.sin_theta), (1.0, 0.0));
        }
        // g = 0, Δn < 0: the roles swap.
        let pn = params(-0.4, 0.0, 1e-3);
        let m = dressed_mode(&pn, 1).unwrap();
        assert_eq!((m.cos_theta, m.sin_theta), (0.0, 1.0));
        // Degenerate block is an error.
        let pd = params(0.0, 0.0, 0.0);
        assert!(matches!(
            dressed_mode(&pd, 5),
            Err(NjcError::DegenerateBlock { n: 5 })
        ));
    }

    #[test]
    fn far_detuned_mixing_is_stable() {
        // sinθ in the far-detuned regime must not be destroyed by
        // cancellation: sinθ ≈ G/Δn ≪ 1 but strictly positive.
        let p = params(1e3, 1e-3, 0.0);
        let m = dressed_mode(&p, 0).unwrap();
        let expect = coupling(&p, 0) / 1e3;
        assert!(m.sin_theta > 0.0);
        assert!((m.sin_theta - expect).abs() / expect < 1e-6);
    }

    #[test]
    fn bare_energies_split_by_nu() {
        let p = params(0.37, 0.01, 0.2);
        for n in [0, 1, 12] {
            let b = bare_energies(&p, n);
            // The split is ν up to rounding of base ± ν/2 at base ≫ ν.
            assert!((b.e_excited - b.e_ground - p.nu()).abs() < 1e-12 * p.nu());
            // ℰ_{e,n} − ℰ_{g,n+1} = Δn.
            let next = bare_energies(&p, n + 1);
            assert!((b.e_excited - next.e_ground - block_detuning(&p, n)).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_shows_crossing_at_g_zero_and_repulsion_otherwise() {
        let grid: Vec<f64> = crate::util::linspace(-0.5, 1.0, 301);
        // g = 0: bare-level crossing at Δ = 2knω; the dressed gap vanishes.
        let base0 = params(0.0, 0.0, 0.1);
        let rows0 = spectrum_sweep(&base0, &[1], &grid).unwrap();
        let min_gap0 = rows0
            .iter()
            .map(|r| r.e_plus - r.e_minus)
            .fold(f64::INFINITY, f64::min);
        assert!(min_gap0 < 2e-3, "crossing gap {min_gap0}");
        // g > 0: level repulsion, gap minimized at the grid point nearest
        // 2knω with value 2G.
        let base = params(0.0, 0.1, 0.1);
        let rows = spectrum_sweep(&base, &[1], &grid).unwrap();
        let best = rows
            .iter()
            .min_by(|a, b| {
                (a.e_plus - a.e_minus)
                    .partial_cmp(&(b.e_plus - b.e_minus))
                    .unwrap()
            })
            .unwrap();
        let crossing = 2.0 * 0.1 * 1.0; // 2knω at n=1
        let nearest = grid
            .iter()
            .copied()
            .min_by(|a, b| {
                (a - crossing)
                    .abs()
                    .partial_cmp(&(b - crossing).abs())
                    .unwrap()
            })
            .unwrap();
        assert_eq!(best.delta, nearest);
        let p_min = params(best.delta, 0.1, 0.1);
        let min_gap_expect = 2.0 * coupling(&p_min, 1);
        assert!((best.e_plus - best.e_minus - min_gap_expect).abs() < 1e-3);
        // Gap always strictly positive for g > 0.
        assert!(rows.iter().all(|r| r.e_plus - r.e_minus > 0.0));
        // Asymptotics: gap grows ~|Δ| with slope → 1.
        let p_far = params(1e3, 0.1, 0.1);
        let gap_far = rabi_frequency(&p_far, 1);
        let p_farther = params(2e3, 0.1, 0.1);
        let gap_farther = rabi_frequency(&p_farther, 1);
        let slope = (gap_farther - gap_far) / 1e3;
        assert!((slope - 1.0).abs() < 1e-3, "asymptotic slope {slope}");
    }

    #[test]
    fn jc_limit_reduces_to_textbook_rabi() {
        let p = params(0.17, 0.02, 0.0);
        for n in [0, 4, 9] {
            let expect = (0.17_f64 * 0.17 + 4.0 * 0.02 * 0.02 * (n as f64 + 1.0)).sqrt();
            assert!((rabi_frequency(&p, n) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn dd_block_quantities_collapse_to_f64_versions() {
        let p = params(DC, 1e-3, 1e-4);
        for n in [0, 30, 76] {
            assert!((block_detuning_dd(&p, n).to_f64() - block_detuning(&p, n)).abs() < 1e-18);
            assert!(
                (rabi_frequency_dd(&p, n).to_f64() - rabi_frequency(&p, n)).abs()
                    < 1e-16 * rabi_frequency(&p, n).max(1e-30)
            );
            let b = bare_energies(&p, n);
            assert!((bare_energy_dd(&p, n, true).to_f64() - b.e_excited).abs() < 1e-12);
            assert!((bare_energy_dd(&p, n, false).to_f64() - b.e_ground).abs() < 1e-12);
        }
    }
}
