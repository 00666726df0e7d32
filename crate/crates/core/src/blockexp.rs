//! Dense complex matrices on a single j-shell and their exponentials.
//!
//! The generators used here (complex combinations of J_1, J_2, J_3) preserve
//! j, so exponentials act blockwise on shells of size 2j+1.  Blocks stay
//! small (a few hundred at most); scaling-and-squaring with a fixed-degree
//! Taylor evaluation is accurate and simple at that size.

use num_complex::Complex64;

const TAYLOR_DEGREE: usize = 20;
const SCALE_TARGET: f64 = 1.0;

/// Row-major dense complex matrix.
#[derive(Clone, Debug)]
pub struct CMatrix {
    n: usize,
    a: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.a[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.a[r * self.n + c] = v;
    }

    pub fn scale_in_place(&mut self, s: Complex64) {
        for v in &mut self.a {
            *v *= s;
        }
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.a[k * n..(k + 1) * n];
                let dst = &mut out.a[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += aik * b;
                }
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|c| (0..n).map(|r| self.a[r * n + c].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.n).map(|r| self.a[r * self.n + c]).collect()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        (0..n)
            .map(|r| {
                self.a[r * n..(r + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(&m, &x)| m * x)
                    .sum()
            })
            .collect()
    }
}

/// exp(M) by scaling-and-squaring with a degree-20 Taylor kernel.
///
/// With the scaled norm held at or below 1 the Taylor remainder is below
/// 1e-19, far under the accumulation from the subsequent squarings.
pub fn expm(m: &CMatrix) -> CMatrix {
    let norm = m.one_norm();
    let squarings = if norm <= SCALE_TARGET {
        0
    } else {
        (norm / SCALE_TARGET).log2().ceil() as u32
    };
    let mut scaled = m.clone();
    scaled.scale_in_place(Complex64::new(0.5f64.powi(squarings as i32), 0.0));

    // Horner form: I + A(I + A/2 (I + A/3 (...)))
    let n = m.n();
    let mut acc = CMatrix::identity(n);
    for k in (1..=TAYLOR_DEGREE).rev() {
        let mut term = scaled.matmul(&acc);
        term.scale_in_place(Complex64::new(1.0 / k as f64, 0.0));
        acc = term;
        for i in 0..n {
            acc.a[i * n + i] += Complex64::new(1.0, 0.0);
        }
    }
    let mut e = acc;
    for _ in 0..squarings {
        e = e.matmul(&e);
    }
    e
}

/// The block of `c1 J_1 + c2 J_2 + c3 J_3` on the shell of fixed j,
/// basis ordered m = -j..j.
pub fn j_generator_block(j: u32, coeff: [Complex64; 3]) -> CMatrix {
    let n = 2 * j as usize + 1;
    let mut m = CMatrix::zeros(n);
    let jf = j as f64;
    // J1 = (J+ + J-)/2, J2 = (J+ - J-)/(2i)
    let wp = coeff[0] * 0.5 + coeff[1] * Complex64::new(0.0, -0.5);
    let wm = coeff[0] * 0.5 + coeff[1] * Complex64::new(0.0, 0.5);
    for (k, mm) in (-(j as i32)..=j as i32).enumerate() {
        let mf = mm as f64;
        if coeff[2] != Complex64::new(0.0, 0.0) {
            m.set(k, k, coeff[2] * mf);
        }
        if mm < j as i32 {
            let amp = ((jf - mf) * (jf + mf + 1.0)).sqrt();
            // raise: row m+1, col m
            let old = m.get(k + 1, k);
            m.set(k + 1, k, old + wp * amp);
        }
        if mm > -(j as i32) {
            let amp = ((jf + mf) * (jf - mf + 1.0)).sqrt();
            let old = m.get(k - 1, k);
            m.set(k - 1, k, old + wm * amp);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn expm_of_zero_is_identity() {
        let e = expm(&CMatrix::zeros(4));
        for i in 0..4 {
            for k in 0..4 {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert_relative_eq!(e.get(i, k).re, expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn expm_matches_scalar_exponential_blockwise() {
        // diagonal matrix: exp acts entrywise
        let mut m = CMatrix::zeros(3);
        m.set(0, 0, Complex64::new(0.3, -0.2));
        m.set(1, 1, Complex64::new(-4.0, 1.0));
        m.set(2, 2, Complex64::new(2.5, 3.0));
        let e = expm(&m);
        for i in 0..3 {
            let expect = m.get(i, i).exp();
            assert_relative_eq!(e.get(i, i).re, expect.re, max_relative = 1e-13);
            assert_relative_eq!(e.get(i, i).im, expect.im, max_relative = 1e-13);
        }
    }

    #[test]
    fn expm_group_property() {
        // exp(A) exp(A) = exp(2A) for a non-normal test matrix
        let mut a = CMatrix::zeros(3);
        a.set(0, 1, Complex64::new(1.5, 0.5));
        a.set(1, 0, Complex64::new(-0.7, 0.0));
        a.set(1, 2, Complex64::new(0.0, 2.0));
        a.set(2, 2, Complex64::new(0.4, -0.3));
        let e1 = expm(&a);
        let mut a2 = a.clone();
        a2.scale_in_place(Complex64::new(2.0, 0.0));
        let e2 = expm(&a2);
        let prod = e1.matmul(&e1);
        for i in 0..3 {
            for k in 0..3 {
                assert!(
                    (prod.get(i, k) - e2.get(i, k)).norm() <= 1e-12 * e2.one_norm(),
                    "entry ({i},{k})"
                );
            }
        }
    }

    #[test]
    fn su2_rotation_by_2pi_is_sign() {
        // exp(-i 2pi J2) = (-1)^{2j} on shell j; j = 1 gives the identity
        let g = j_generator_block(1, [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -std::f64::consts::TAU),
            Complex64::new(0.0, 0.0),
        ]);
        let e = expm(&g);
        for i in 0..3 {
            for k in 0..3 {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((e.get(i, k) - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}
