//! Log-magnitude/phase arithmetic for products of enormous and tiny factors.
//!
//! Coherent-state coefficients multiply Gegenbauer values that grow like
//! `(2 cosh|l|)^n` against damping factors `e^{-j(j+1)/2}` that underflow
//! long before the product does.  Carrying `ln|x|` and `arg x` separately
//! keeps every intermediate representable; the product is collapsed to an
//! ordinary complex number only after the damping has been multiplied in.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_phase(p: f64) -> f64 {
    if !p.is_finite() {
        return p;
    }
    let r = p.rem_euclid(TAU);
    if r > PI { r - TAU } else { r }
}

/// A complex number stored as `exp(log_mag) * e^{i phase}`.
///
/// Exact zero is encoded by `log_mag = -inf`; it absorbs products and is
/// neutral under addition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    log_mag: f64,
    phase: f64,
}

impl ScaledComplex {
    pub fn zero() -> Self {
        Self { log_mag: f64::NEG_INFINITY, phase: 0.0 }
    }

    pub fn one() -> Self {
        Self { log_mag: 0.0, phase: 0.0 }
    }

    pub fn from_log_polar(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::zero();
        }
        Self { log_mag, phase: wrap_phase(phase) }
    }

    pub fn from_complex(c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        // hypot avoids overflow for components near f64::MAX
        let mag = c.re.hypot(c.im);
        Self { log_mag: mag.ln(), phase: c.im.atan2(c.re) }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            return Self::zero();
        }
        Self { log_mag: x.abs().ln(), phase: if x < 0.0 { PI } else { 0.0 } }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_mag
    }

    /// Phase in `(-pi, pi]`; zero carries phase 0.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self {
            log_mag: self.log_mag + rhs.log_mag,
            phase: wrap_phase(self.phase + rhs.phase),
        }
    }

    pub fn mul_real(self, x: f64) -> Self {
        self.mul(Self::from_real(x))
    }

    pub fn mul_complex(self, c: Complex64) -> Self {
        self.mul(Self::from_complex(c))
    }

    /// Multiply by `e^{delta}` without touching the phase.
    pub fn scale_log(self, delta: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self { log_mag: self.log_mag + delta, phase: self.phase }
    }

    /// Integer power by repeated multiplication (single-valued; no branch cuts).
    pub fn powi(self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.log_mag >= rhs.log_mag { (self, rhs) } else { (rhs, self) };
        let r = (lo.log_mag - hi.log_mag).exp();
        let c = Complex64::from_polar(1.0, hi.phase) + r * Complex64::from_polar(1.0, lo.phase);
        let mag = c.re.hypot(c.im);
        if mag == 0.0 {
            return Self::zero();
        }
        Self { log_mag: hi.log_mag + mag.ln(), phase: c.im.atan2(c.re) }
    }

    /// Collapse to an ordinary complex number.  Overflows to infinity if the
    /// magnitude is not representable; callers multiply the damping in first.
    pub fn collapse(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let mag = self.log_mag.exp();
        mag * Complex64::from_polar(1.0, self.phase)
    }
}

/// Running sum of scaled terms.
///
/// Keeps an ordinary complex accumulator together with a log offset so that
/// pushing a term costs one `exp` instead of a full log-space round trip.
#[derive(Clone, Copy, Debug)]
pub struct ScaledSum {
    acc: Complex64,
    log_offset: f64,
}

impl ScaledSum {
    pub fn new() -> Self {
        Self { acc: Complex64::new(0.0, 0.0), log_offset: f64::NEG_INFINITY }
    }

    pub fn push(&mut self, term: ScaledComplex) {
        if term.is_zero() {
            return;
        }
        if self.log_offset == f64::NEG_INFINITY {
            self.acc = Complex64::from_polar(1.0, term.phase());
            self.log_offset = term.log_magnitude();
            return;
        }
        let d = term.log_magnitude() - self.log_offset;
        if d <= 0.0 {
            self.acc += d.exp() * Complex64::from_polar(1.0, term.phase());
        } else {
            self.acc = self.acc * (-d).exp() + Complex64::from_polar(1.0, term.phase());
            self.log_offset += d;
        }
        // keep the accumulator's magnitude moderate
        let n = self.acc.re.hypot(self.acc.im);
        if n > 1e120 || (n > 0.0 && n < 1e-120) {
            self.acc /= n;
            self.log_offset += n.ln();
        }
    }

    pub fn value(&self) -> ScaledComplex {
        if self.log_offset == f64::NEG_INFINITY {
            return ScaledComplex::zero();
        }
        ScaledComplex::from_complex(self.acc).scale_log(self.log_offset)
    }

    /// `ln` of the current partial-sum magnitude (`-inf` when empty).
    pub fn log_magnitude(&self) -> f64 {
        if self.log_offset == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.log_offset + self.acc.re.hypot(self.acc.im).ln()
    }
}

impl Default for ScaledSum {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn round_trip() {
        let c = Complex64::new(0.3, -1.7);
        let s = ScaledComplex::from_complex(c);
        let back = s.collapse();
        assert_relative_eq!(back.re, c.re, max_relative = 1e-14);
        assert_relative_eq!(back.im, c.im, max_relative = 1e-14);
    }

    #[test]
    fn zero_absorbs_and_is_neutral() {
        let z = ScaledComplex::zero();
        let s = ScaledComplex::from_complex(Complex64::new(2.0, 1.0));
        assert!(z.mul(s).is_zero());
        assert!(s.mul(z).is_zero());
        assert_eq!(z.add(s), s);
        assert_eq!(s.add(z), s);
        assert_eq!(z.collapse(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn huge_times_tiny_stays_representable() {
        // e^{800} * e^{-900} = e^{-100}; neither factor fits in f64 alone
        let a = ScaledComplex::from_log_polar(800.0, 0.4);
        let b = ScaledComplex::from_log_polar(-900.0, -0.1);
        let p = a.mul(b);
        assert_relative_eq!(p.log_magnitude(), -100.0, max_relative = 1e-14);
        assert_relative_eq!(p.collapse().norm(), (-100.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn integer_power_matches_repeated_product() {
        let b = ScaledComplex::from_complex(Complex64::new(-0.7, 0.2));
        let direct = b.mul(b).mul(b);
        assert_relative_eq!(b.powi(3).log_magnitude(), direct.log_magnitude(), max_relative = 1e-14);
        assert_relative_eq!(b.powi(3).phase(), direct.phase(), max_relative = 1e-12);
        assert_eq!(b.powi(0), ScaledComplex::one());
    }

    #[test]
    fn opposite_values_cancel_deeply() {
        let a = ScaledComplex::from_real(1.0);
        let b = ScaledComplex::from_real(-1.0);
        let s = a.add(b);
        // the rounded pi phase leaves at most ~1e-16 of the inputs behind
        assert!(s.is_zero() || s.log_magnitude() < -35.0);
        // adding equal-and-opposite scaled values collapses to (near) zero
        let c = ScaledComplex::from_complex(Complex64::new(0.4, -0.9));
        let d = c.mul_real(-1.0);
        let s = c.add(d);
        assert!(s.is_zero() || s.log_magnitude() < c.log_magnitude() - 35.0);
    }

    #[test]
    fn scaled_sum_matches_direct_sum() {
        let terms = [
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.25),
            Complex64::new(3.0, -1.0),
        ];
        let mut s = ScaledSum::new();
        for &t in &terms {
            s.push(ScaledComplex::from_complex(t));
        }
        let direct: Complex64 = terms.iter().sum();
        let got = s.value().collapse();
        assert_relative_eq!(got.re, direct.re, max_relative = 1e-13);
        assert_relative_eq!(got.im, direct.im, max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn prop_round_trip(re in -50.0f64..50.0, im in -50.0f64..50.0) {
            prop_assume!(re != 0.0 || im != 0.0);
            let c = Complex64::new(re, im);
            let back = ScaledComplex::from_complex(c).collapse();
            prop_assert!((back - c).norm() <= 1e-13 * c.norm());
        }

        #[test]
        fn prop_product_adds_logs(la in -200.0f64..200.0, pa in -3.0f64..3.0,
                                  lb in -200.0f64..200.0, pb in -3.0f64..3.0) {
            let a = ScaledComplex::from_log_polar(la, pa);
            let b = ScaledComplex::from_log_polar(lb, pb);
            let p = a.mul(b);
            prop_assert!((p.log_magnitude() - (la + lb)).abs() <= 1e-10 * (1.0 + (la + lb).abs()));
            let expect = wrap_phase(pa + pb);
            prop_assert!(wrap_phase(p.phase() - expect).abs() <= 1e-12);
            prop_assert!(p.phase() > -PI && p.phase() <= PI);
        }

        #[test]
        fn prop_add_agrees_with_complex(re1 in -10.0f64..10.0, im1 in -10.0f64..10.0,
                                        re2 in -10.0f64..10.0, im2 in -10.0f64..10.0) {
            let a = Complex64::new(re1, im1);
            let b = Complex64::new(re2, im2);
            let s = ScaledComplex::from_complex(a).add(ScaledComplex::from_complex(b)).collapse();
            let direct = a + b;
            prop_assert!((s - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
        }
    }
}
