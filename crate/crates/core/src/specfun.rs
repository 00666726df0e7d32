//! Legendre and Gegenbauer polynomials at complex arguments.
//!
//! Both families are evaluated by their three-term recurrences, run upward
//! from n = 0.  The iterating state is a pair of ordinary complex values that
//! is renormalized whenever it threatens the floating-point range, with the
//! accumulated scale tracked as a log; yielded values are [`ScaledComplex`].
//! Upward recurrence is forward-stable for the `|w| >= 1` arguments that
//! dominate here, and n never exceeds a few hundred.

use crate::scaled::ScaledComplex;
use num_complex::Complex64;

const RESCALE_LIMIT: f64 = 1e150;

/// Yields `P_0(w), P_1(w), ...` in scaled form.
///
/// Recurrence: `(n+1) P_{n+1} = (2n+1) w P_n - n P_{n-1}`, `P_0 = 1`.
#[derive(Clone, Debug)]
pub struct LegendreSeq {
    w: Complex64,
    prev: Complex64,
    curr: Complex64,
    log_scale: f64,
    n: u32,
}

impl LegendreSeq {
    pub fn new(w: Complex64) -> Self {
        Self { w, prev: Complex64::new(0.0, 0.0), curr: Complex64::new(1.0, 0.0), log_scale: 0.0, n: 0 }
    }
}

impl Iterator for LegendreSeq {
    type Item = ScaledComplex;

    fn next(&mut self) -> Option<ScaledComplex> {
        let out = ScaledComplex::from_complex(self.curr).scale_log(self.log_scale);
        let n = self.n as f64;
        let next = ((2.0 * n + 1.0) * self.w * self.curr - n * self.prev) / (n + 1.0);
        self.prev = self.curr;
        self.curr = next;
        self.n += 1;
        rescale(&mut self.prev, &mut self.curr, &mut self.log_scale);
        Some(out)
    }
}

/// Yields `C_0^a(w), C_1^a(w), ...` in scaled form.
///
/// Recurrence: `n C_n = 2(n+a-1) w C_{n-1} - (n+2a-2) C_{n-2}`, `C_0 = 1`,
/// which also produces `C_1 = 2 a w` from the conventional `C_{-1} = 0`.
#[derive(Clone, Debug)]
pub struct GegenbauerSeq {
    alpha: f64,
    w: Complex64,
    prev: Complex64,
    curr: Complex64,
    log_scale: f64,
    n: u32,
}

impl GegenbauerSeq {
    pub fn new(alpha: f64, w: Complex64) -> Self {
        debug_assert!(alpha > 0.0, "Gegenbauer index must be positive");
        Self { alpha, w, prev: Complex64::new(0.0, 0.0), curr: Complex64::new(1.0, 0.0), log_scale: 0.0, n: 0 }
    }
}

impl Iterator for GegenbauerSeq {
    type Item = ScaledComplex;

    fn next(&mut self) -> Option<ScaledComplex> {
        let out = ScaledComplex::from_complex(self.curr).scale_log(self.log_scale);
        // step n -> n+1:  (n+1) C_{n+1} = 2(n+alpha) w C_n - (n+2alpha-1) C_{n-1}
        let n = self.n as f64;
        let next = (2.0 * (n + self.alpha) * self.w * self.curr
            - (n + 2.0 * self.alpha - 1.0) * self.prev)
            / (n + 1.0);
        self.prev = self.curr;
        self.curr = next;
        self.n += 1;
        rescale(&mut self.prev, &mut self.curr, &mut self.log_scale);
        Some(out)
    }
}

fn rescale(prev: &mut Complex64, curr: &mut Complex64, log_scale: &mut f64) {
    let m = curr.re.hypot(curr.im).max(prev.re.hypot(prev.im));
    if m > RESCALE_LIMIT || (m > 0.0 && m < 1.0 / RESCALE_LIMIT) {
        *prev /= m;
        *curr /= m;
        *log_scale += m.ln();
    }
}

/// Legendre polynomial `P_n(w)`.
pub fn legendre_p(n: u32, w: Complex64) -> ScaledComplex {
    LegendreSeq::new(w).nth(n as usize).unwrap()
}

/// Gegenbauer polynomial `C_n^alpha(w)` for `alpha > 0`.
pub fn gegenbauer_c(n: u32, alpha: f64, w: Complex64) -> ScaledComplex {
    GegenbauerSeq::new(alpha, w).nth(n as usize).unwrap()
}
