//! Double-double arithmetic (~106-bit significand) for phase accumulation.
//!
//! Long time series need phase arguments like `Omega_n * t` with `t` up to
//! ~1e7 evaluated to absolute accuracy ~1e-12 *after* reduction mod 2*pi.
//! Plain f64 loses ~1e-9 at that magnitude, so every phase argument is
//! assembled in double-double precision, reduced mod 2*pi in double-double,
//! and only then handed to the f64 `sin`/`cos`.
//!
//! The representation is an unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi)/2`. All algorithms below are the classical
//! error-free-transformation building blocks (Dekker/Knuth two-sum,
//! FMA-based two-prod) composed in the usual way.

// The inherent `add`/`sub`/`mul`/`div`/`neg` mirror how double-double
// libraries name these kernels; operator overloading would hide which
// calls pay the double-double cost.
#![allow(clippy::should_implement_trait)]

/// Unevaluated sum of two doubles, `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// 2*pi to double-double precision.
pub const TWO_PI: Dd = Dd {
    hi: std::f64::consts::TAU,
    lo: 2.4492935982947064e-16,
};

/// Error-free sum of two doubles: `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via FMA: `a * b = p + e` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    /// Lift an exact double.
    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact double-double product of two doubles.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    /// Collapse to the nearest double.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Full-precision addition.
    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, e1) = two_sum(self.hi, other.hi);
        let (s2, e2) = two_sum(self.lo, other.lo);
        let lo = e1 + s2;
        let (hi, lo) = quick_two_sum(s1, lo);
        let lo = lo + e2;
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    /// Addition of a plain double.
    #[inline]
    pub fn add_f64(self, other: f64) -> Dd {
        self.add(Dd::from_f64(other))
    }

    /// Negation.
    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    /// Subtraction.
    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    /// Full-precision multiplication.
    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Multiplication by a plain double.
    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e) = two_prod(self.hi, other);
        let e = e + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Division (two Newton refinements on the f64 quotient).
    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }

    /// Square root (one Karp iteration on the f64 root; x must be >= 0).
    #[inline]
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::from_f64(0.0);
        }
        let y = self.hi.sqrt();
        // r = (x - y^2) / (2 y), evaluated with an exact y^2.
        let y2 = Dd::from_prod(y, y);
        let diff = self.sub(y2);
        let r = diff.to_f64() / (2.0 * y);
        let (hi, lo) = quick_two_sum(y, r);
        Dd { hi, lo }
    }

    /// Reduce into (-pi, pi] modulo 2*pi, keeping double-double accuracy.
    ///
    /// The quotient is computed in f64, which is exact for |x|/2pi below
    /// 2^53 — far beyond any phase this library accumulates.
    #[inline]
    pub fn reduce_mod_2pi(self) -> Dd {
        let q = (self.to_f64() / TWO_PI.to_f64()).round();
        let mut r = self.sub(TWO_PI.mul_f64(q));
        // One correction step in case rounding put us just outside.
        if r.hi > std::f64::consts::PI {
            r = r.sub(TWO_PI);
        } else if r.hi <= -std::f64::consts::PI {
            r = r.add(TWO_PI);
        }
        r
    }

    /// `sin` of the reduced angle (reduce first, then f64 sin).
    #[inline]
    pub fn sin_reduced(self) -> f64 {
        let r = self.reduce_mod_2pi();
        // sin(hi + lo) ~ sin(hi) + lo*cos(hi): first-order correction keeps
        // the ~1e-16*|lo-scale| tail that matters at the 1e-12 target.
        let s = r.hi.sin();
        let c = r.hi.cos();
        s + r.lo * c
    }

    /// `cos` of the reduced angle.
    #[inline]
    pub fn cos_reduced(self) -> f64 {
        let r = self.reduce_mod_2pi();
        let c = r.hi.cos();
        let s = r.hi.sin();
        c - r.lo * s
    }

    /// `(sin, cos)` of the reduced angle with a single reduction.
    #[inline]
    pub fn sin_cos_reduced(self) -> (f64, f64) {
        let r = self.reduce_mod_2pi();
        let (s, c) = r.hi.sin_cos();
        (s + r.lo * c, c - r.lo * s)
    }
}
