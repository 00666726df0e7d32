//! The truncated unit-sphere representation: basis indexing, state vectors,
//! and the band matrices of the angular-momentum and position operators.
//!
//! The representation fixes the Casimirs X^2 = 1 (unit sphere) and J.X = 0.
//! All operators couple shells with |j - j'| <= 1 and |m - m'| <= 1; the
//! raising channel out of the top shell j_max is dropped by the truncation,
//! so operator identities hold exactly only on states supported on
//! j <= j_max - 2 (the interior subspace).

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;

/// Truncation level of the representation.  Radius and the J.X Casimir are
/// fixed constants of the representation, not knobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RepresentationConfig {
    j_max: u32,
}

impl RepresentationConfig {
    pub const RADIUS: f64 = 1.0;
    pub const LAMBDA: f64 = 0.0;

    pub fn new(j_max: u32) -> Result<Self> {
        if j_max < 2 {
            return Err(Error::InvalidConfig(format!("j_max must be >= 2, got {j_max}")));
        }
        Ok(Self { j_max })
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    /// Dimension (j_max + 1)^2 of the truncated space.
    pub fn dim(&self) -> usize {
        let n = self.j_max as usize + 1;
        n * n
    }

    /// Flat index of |j, m>: shells ordered by j, m ascending within a shell.
    pub fn flat(&self, j: u32, m: i32) -> usize {
        debug_assert!(j <= self.j_max && m.unsigned_abs() <= j);
        (j as usize) * (j as usize) + (j as i64 + m as i64) as usize
    }

    pub fn contains(&self, j: u32, m: i32) -> bool {
        j <= self.j_max && m.unsigned_abs() <= j
    }

    /// All basis indices in flat order.
    pub fn basis_indices(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (0..=self.j_max).flat_map(|j| (-(j as i32)..=j as i32).map(move |m| BasisIndex { j, m }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub j: u32,
    pub m: i32,
}

/// Sign selector for the ladder operators J± and X±.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn signum(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Cartesian component selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    One,
    Two,
    Three,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::One, Axis::Two, Axis::Three];

    pub fn index(self) -> usize {
        match self {
            Axis::One => 0,
            Axis::Two => 1,
            Axis::Three => 2,
        }
    }
}

/// Dense coefficient vector over the truncated basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    config: RepresentationConfig,
    coeffs: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(config: RepresentationConfig) -> Self {
        Self { config, coeffs: vec![Complex64::new(0.0, 0.0); config.dim()] }
    }

    pub fn basis_state(config: RepresentationConfig, j: u32, m: i32) -> Self {
        assert!(config.contains(j, m), "basis index ({j},{m}) outside representation");
        let mut s = Self::zero(config);
        s.coeffs[config.flat(j, m)] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_coefficients(config: RepresentationConfig, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != config.dim() {
            return Err(Error::InvalidConfig(format!(
                "coefficient vector has length {}, expected {}",
                coeffs.len(),
                config.dim()
            )));
        }
        Ok(Self { config, coeffs })
    }

    /// Random state supported on shells j <= support_j_max, coefficients
    /// uniform in the complex unit square.
    pub fn random_supported(
        config: RepresentationConfig,
        support_j_max: u32,
        rng: &mut impl Rng,
    ) -> Self {
        let mut s = Self::zero(config);
        for j in 0..=support_j_max.min(config.j_max) {
            for m in -(j as i32)..=j as i32 {
                s.coeffs[config.flat(j, m)] =
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        s
    }

    pub fn config(&self) -> RepresentationConfig {
        self.config
    }

    pub fn coeff(&self, j: u32, m: i32) -> Complex64 {
        self.coeffs[self.config.flat(j, m)]
    }

    pub fn set_coeff(&mut self, j: u32, m: i32, value: Complex64) {
        let k = self.config.flat(j, m);
        self.coeffs[k] = value;
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { config: self.config, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// self + factor * other
    pub fn add_scaled(&self, other: &Self, factor: Complex64) -> Self {
        assert_eq!(self.config, other.config, "representation mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + factor * b)
            .collect();
        Self { config: self.config, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, Complex64::new(-1.0, 0.0))
    }
}

/// <a|b>, conjugate-linear in the first argument.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.config != b.config {
        return Err(Error::ConfigMismatch(a.config.j_max, b.config.j_max));
    }
    Ok(a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

// Matrix elements.  The raising amplitudes annihilate targets outside the
// band automatically; j = 0 has no lower shell and its lowering numerators
// vanish, so the 1/j pole of the printed formulas is never evaluated.

fn j_ladder_amp(j: u32, m: i32, sign: Sign) -> f64 {
    let (j, m, s) = (j as f64, m as f64, sign.signum() as f64);
    ((j - s * m) * (j + s * m + 1.0)).max(0.0).sqrt()
}

fn x3_raise_amp(j: u32, m: i32) -> f64 {
    let (j, m) = (j as f64, m as f64);
    ((j - m + 1.0) * (j + m + 1.0)).sqrt() / ((2.0 * j + 1.0) * (2.0 * j + 3.0)).sqrt()
}

fn x3_lower_amp(j: u32, m: i32) -> f64 {
    let (j, m) = (j as f64, m as f64);
    ((j - m) * (j + m)).max(0.0).sqrt() / ((2.0 * j - 1.0) * (2.0 * j + 1.0)).sqrt()
}

fn xpm_raise_amp(j: u32, m: i32, sign: Sign) -> f64 {
    let s = sign.signum() as f64;
    let (j, m) = (j as f64, m as f64);
    -s * ((j + s * m + 1.0) * (j + s * m + 2.0)).sqrt()
        / ((2.0 * j + 1.0) * (2.0 * j + 3.0)).sqrt()
}

fn xpm_lower_amp(j: u32, m: i32, sign: Sign) -> f64 {
    let s = sign.signum() as f64;
    let (j, m) = (j as f64, m as f64);
    s * ((j - s * m - 1.0) * (j - s * m)).max(0.0).sqrt()
        / ((2.0 * j - 1.0) * (2.0 * j + 1.0)).sqrt()
}

/// J3 |j,m> = m |j,m>
pub fn apply_j3(s: &StateVector) -> StateVector {
    let mut out = StateVector::zero(s.config);
    for idx in s.config.basis_indices() {
        let k = s.config.flat(idx.j, idx.m);
        out.coeffs[k] = s.coeffs[k] * idx.m as f64;
    }
    out
}

/// J± |j,m> = sqrt((j∓m)(j±m+1)) |j,m±1>
pub fn apply_jpm(s: &StateVector, sign: Sign) -> StateVector {
    let mut out = StateVector::zero(s.config);
    let sg = sign.signum();
    for idx in s.config.basis_indices() {
        let m2 = idx.m + sg;
        if m2.unsigned_abs() > idx.j {
            continue;
        }
        let amp = j_ladder_amp(idx.j, idx.m, sign);
        out.coeffs[s.config.flat(idx.j, m2)] += amp * s.coeffs[s.config.flat(idx.j, idx.m)];
    }
    out
}

/// X3 couples (j,m) -> (j±1,m); the raising channel out of j_max is dropped.
pub fn apply_x3(s: &StateVector) -> StateVector {
    let mut out = StateVector::zero(s.config);
    let jmax = s.config.j_max;
    for idx in s.config.basis_indices() {
        let c = s.coeffs[s.config.flat(idx.j, idx.m)];
        if idx.j < jmax {
            out.coeffs[s.config.flat(idx.j + 1, idx.m)] += x3_raise_amp(idx.j, idx.m) * c;
        }
        if idx.j > 0 && idx.m.unsigned_abs() <= idx.j - 1 {
            out.coeffs[s.config.flat(idx.j - 1, idx.m)] += x3_lower_amp(idx.j, idx.m) * c;
        }
    }
    out
}

/// X± couples (j,m) -> (j±1, m±1); both channels of the position ladder.
pub fn apply_xpm(s: &StateVector, sign: Sign) -> StateVector {
    let mut out = StateVector::zero(s.config);
    let jmax = s.config.j_max;
    let sg = sign.signum();
    for idx in s.config.basis_indices() {
        let c = s.coeffs[s.config.flat(idx.j, idx.m)];
        let m2 = idx.m + sg;
        if idx.j < jmax && m2.unsigned_abs() <= idx.j + 1 {
            out.coeffs[s.config.flat(idx.j + 1, m2)] += xpm_raise_amp(idx.j, idx.m, sign) * c;
        }
        if idx.j > 0 && m2.unsigned_abs() <= idx.j - 1 {
            out.coeffs[s.config.flat(idx.j - 1, m2)] += xpm_lower_amp(idx.j, idx.m, sign) * c;
        }
    }
    out
}

/// Sparse operator with entries confined to |j-j'| <= 1, |m-m'| <= 1.
#[derive(Clone, Debug)]
pub struct BandOperator {
    config: RepresentationConfig,
    /// (row, col, value) triplets sorted by (row, col); row/col are flat indices.
    entries: Vec<(u32, u32, Complex64)>,
}

impl BandOperator {
    pub fn from_entries(
        config: RepresentationConfig,
        entries: Vec<(BasisIndex, BasisIndex, Complex64)>,
    ) -> Result<Self> {
        let mut triplets = Vec::with_capacity(entries.len());
        for (row, col, v) in entries {
            if !config.contains(row.j, row.m) || !config.contains(col.j, col.m) {
                return Err(Error::InvalidConfig(format!(
                    "entry ({},{}) <- ({},{}) outside representation",
                    row.j, row.m, col.j, col.m
                )));
            }
            if (row.j as i64 - col.j as i64).abs() > 1 || (row.m as i64 - col.m as i64).abs() > 1 {
                return Err(Error::InvalidConfig(format!(
                    "entry ({},{}) <- ({},{}) violates the band constraint",
                    row.j, row.m, col.j, col.m
                )));
            }
            triplets.push((config.flat(row.j, row.m) as u32, config.flat(col.j, col.m) as u32, v));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        Ok(Self { config, entries: triplets })
    }

    pub fn config(&self) -> RepresentationConfig {
        self.config
    }

    pub fn entry(&self, row: BasisIndex, col: BasisIndex) -> Complex64 {
        let r = self.config.flat(row.j, row.m) as u32;
        let c = self.config.flat(col.j, col.m) as u32;
        match self.entries.binary_search_by_key(&(r, c), |&(r, c, _)| (r, c)) {
            Ok(i) => self.entries[i].2,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn apply(&self, s: &StateVector) -> StateVector {
        assert_eq!(self.config, s.config, "representation mismatch");
        let mut out = StateVector::zero(self.config);
        for &(r, c, v) in &self.entries {
            out.coeffs[r as usize] += v * s.coeffs[c as usize];
        }
        out
    }
}

fn collect_operator(
    config: RepresentationConfig,
    mut push: impl FnMut(&mut Vec<(BasisIndex, BasisIndex, Complex64)>),
) -> BandOperator {
    let mut entries = Vec::new();
    push(&mut entries);
    BandOperator::from_entries(config, entries).expect("builder produced in-band entries")
}

/// Band matrix of the angular momentum component J_i.
pub fn j_operator(config: RepresentationConfig, axis: Axis) -> BandOperator {
    collect_operator(config, |entries| {
        for idx in config.basis_indices() {
            match axis {
                Axis::Three => {
                    if idx.m != 0 {
                        entries.push((idx, idx, Complex64::new(idx.m as f64, 0.0)));
                    }
                }
                Axis::One | Axis::Two => {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let m2 = idx.m + sign.signum();
                        if m2.unsigned_abs() > idx.j {
                            continue;
                        }
                        let amp = j_ladder_amp(idx.j, idx.m, sign);
                        // J1 = (J+ + J-)/2, J2 = (J+ - J-)/(2i)
                        let w = match (axis, sign) {
                            (Axis::One, _) => Complex64::new(amp / 2.0, 0.0),
                            (Axis::Two, Sign::Plus) => Complex64::new(0.0, -amp / 2.0),
                            (Axis::Two, Sign::Minus) => Complex64::new(0.0, amp / 2.0),
                            _ => unreachable!(),
                        };
                        entries.push((BasisIndex { j: idx.j, m: m2 }, idx, w));
                    }
                }
            }
        }
    })
}

/// Band matrix of the position component X_i (X1, X2 assembled from X±).
pub fn x_operator(config: RepresentationConfig, axis: Axis) -> BandOperator {
    match axis {
        Axis::Three => collect_operator(config, |entries| {
            for idx in config.basis_indices() {
                if idx.j < config.j_max {
                    entries.push((
                        BasisIndex { j: idx.j + 1, m: idx.m },
                        idx,
                        Complex64::new(x3_raise_amp(idx.j, idx.m), 0.0),
                    ));
                }
                if idx.j > 0 && idx.m.unsigned_abs() <= idx.j - 1 {
                    let amp = x3_lower_amp(idx.j, idx.m);
                    if amp != 0.0 {
                        entries.push((
                            BasisIndex { j: idx.j - 1, m: idx.m },
                            idx,
                            Complex64::new(amp, 0.0),
                        ));
                    }
                }
            }
        }),
        Axis::One | Axis::Two => collect_operator(config, |entries| {
            for idx in config.basis_indices() {
                for sign in [Sign::Plus, Sign::Minus] {
                    let weight = match (axis, sign) {
                        (Axis::One, _) => Complex64::new(0.5, 0.0),
                        (Axis::Two, Sign::Plus) => Complex64::new(0.0, -0.5),
                        (Axis::Two, Sign::Minus) => Complex64::new(0.0, 0.5),
                        _ => unreachable!(),
                    };
                    let m2 = idx.m + sign.signum();
                    if idx.j < config.j_max && m2.unsigned_abs() <= idx.j + 1 {
                        let amp = xpm_raise_amp(idx.j, idx.m, sign);
                        entries.push((BasisIndex { j: idx.j + 1, m: m2 }, idx, weight * amp));
                    }
                    if idx.j > 0 && m2.unsigned_abs() <= idx.j - 1 {
                        let amp = xpm_lower_amp(idx.j, idx.m, sign);
                        if amp != 0.0 {
                            entries.push((BasisIndex { j: idx.j - 1, m: m2 }, idx, weight * amp));
                        }
                    }
                }
            }
        }),
    }
}

/// Band matrix of the single ladder component X+ or X-.
pub fn x_ladder_operator(config: RepresentationConfig, sign: Sign) -> BandOperator {
    collect_operator(config, |entries| {
        for idx in config.basis_indices() {
            let m2 = idx.m + sign.signum();
            if idx.j < config.j_max && m2.unsigned_abs() <= idx.j + 1 {
                let amp = xpm_raise_amp(idx.j, idx.m, sign);
                entries.push((BasisIndex { j: idx.j + 1, m: m2 }, idx, Complex64::new(amp, 0.0)));
            }
            if idx.j > 0 && m2.unsigned_abs() <= idx.j - 1 {
                let amp = xpm_lower_amp(idx.j, idx.m, sign);
                if amp != 0.0 {
                    entries.push((
                        BasisIndex { j: idx.j - 1, m: m2 },
                        idx,
                        Complex64::new(amp, 0.0),
                    ));
                }
            }
        }
    })
}

/// Band matrix of Z_i = e^{-J^2/2} X_i e^{+J^2/2}.
///
/// Since X_i moves j by exactly ±1, the conjugation multiplies the raising
/// channel by e^{-(j+1)} and the lowering channel by e^{+j}; neither factor
/// overflows at practical truncation levels.  Restricted to m = 0 the third
/// component reads
/// `Z3 |j,0> = e^{-j-1} (j+1)/sqrt((2j+1)(2j+3)) |j+1,0> + e^{j} j/sqrt((2j-1)(2j+1)) |j-1,0>`.
pub fn build_z_operator(config: RepresentationConfig, axis: Axis) -> BandOperator {
    let x = x_operator(config, axis);
    let shell_of = |flat: u32| (flat as f64).sqrt().floor() as i64;
    let mut entries = x.entries;
    for (r, c, v) in entries.iter_mut() {
        let jr = shell_of(*r);
        let jc = shell_of(*c);
        // e^{-jr(jr+1)/2 + jc(jc+1)/2}; |jr - jc| = 1 keeps the exponent small
        let expo = 0.5 * ((jc * (jc + 1)) as f64 - (jr * (jr + 1)) as f64);
        *v *= expo.exp();
    }
    BandOperator { config, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(j_max: u32) -> RepresentationConfig {
        RepresentationConfig::new(j_max).unwrap()
    }

    #[test]
    fn flat_indexing_is_dense_and_ordered() {
        let c = cfg(4);
        let mut seen = vec![false; c.dim()];
        let mut last = None;
        for idx in c.basis_indices() {
            let k = c.flat(idx.j, idx.m);
            assert!(!seen[k]);
            seen[k] = true;
            if let Some(prev) = last {
                assert_eq!(k, prev + 1);
            }
            last = Some(k);
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn j3_eigenvalues() {
        let c = cfg(5);
        let s = StateVector::basis_state(c, 1, 1);
        let out = apply_j3(&s);
        assert_relative_eq!(out.coeff(1, 1).re, 1.0);
        let s = StateVector::basis_state(c, 5, 0);
        assert_relative_eq!(apply_j3(&s).norm(), 0.0);
        let s = StateVector::basis_state(c, 2, -2);
        assert_relative_eq!(apply_j3(&s).coeff(2, -2).re, -2.0);
    }

    #[test]
    fn j_ladder_actions() {
        let c = cfg(3);
        let up = apply_jpm(&StateVector::basis_state(c, 1, 0), Sign::Plus);
        assert_relative_eq!(up.coeff(1, 1).re, 2.0f64.sqrt(), max_relative = 1e-15);
        let top = apply_jpm(&StateVector::basis_state(c, 1, 1), Sign::Plus);
        assert_relative_eq!(top.norm(), 0.0);
        let down = apply_jpm(&StateVector::basis_state(c, 1, 0), Sign::Minus);
        assert_relative_eq!(down.coeff(1, -1).re, 2.0f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn x3_actions() {
        let c = cfg(4);
        let out = apply_x3(&StateVector::basis_state(c, 0, 0));
        assert_relative_eq!(out.coeff(1, 0).re, 1.0 / 3.0f64.sqrt(), max_relative = 1e-15);

        // (1,1): raising sqrt(1*3)/sqrt(15) at (2,1), lowering channel vanishes
        let out = apply_x3(&StateVector::basis_state(c, 1, 1));
        assert_relative_eq!(out.coeff(2, 1).re, 3.0f64.sqrt() / 15.0f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(out.norm_sqr(), 3.0 / 15.0, max_relative = 1e-14);

        // the raising channel out of the top shell is dropped
        let out = apply_x3(&StateVector::basis_state(c, 4, 0));
        for idx in c.basis_indices() {
            if idx.j != 3 {
                assert_eq!(out.coeff(idx.j, idx.m), Complex64::new(0.0, 0.0), "at {idx:?}");
            }
        }
        assert!(out.coeff(3, 0).re > 0.0);
    }

    #[test]
    fn x_ladder_actions() {
        let c = cfg(4);
        let plus = apply_xpm(&StateVector::basis_state(c, 0, 0), Sign::Plus);
        assert_relative_eq!(plus.coeff(1, 1).re, -(2.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        let minus = apply_xpm(&StateVector::basis_state(c, 0, 0), Sign::Minus);
        assert_relative_eq!(minus.coeff(1, -1).re, (2.0f64 / 3.0).sqrt(), max_relative = 1e-15);

        // X+ on (1,-1): raising at (2,0), lowering at (0,0); hermiticity pairs it
        // with X- out of (0,0)
        let out = apply_xpm(&StateVector::basis_state(c, 1, -1), Sign::Plus);
        assert_relative_eq!(out.coeff(2, 0).re, -(2.0f64 / 15.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(out.coeff(0, 0).re, (2.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        let pair = apply_xpm(&StateVector::basis_state(c, 0, 0), Sign::Minus);
        assert_relative_eq!(out.coeff(0, 0).re, pair.coeff(1, -1).conj().re, max_relative = 1e-14);
    }

    #[test]
    fn z3_matches_closed_form_on_m0() {
        let c = cfg(8);
        let z3 = build_z_operator(c, Axis::Three);

        let out = z3.apply(&StateVector::basis_state(c, 1, 0));
        assert_relative_eq!(
            out.coeff(2, 0).re,
            (-2.0f64).exp() * 2.0 / 15.0f64.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(out.coeff(0, 0).re, 1.0f64.exp() / 3.0f64.sqrt(), max_relative = 1e-14);

        let out = z3.apply(&StateVector::basis_state(c, 0, 0));
        assert_relative_eq!(
            out.coeff(1, 0).re,
            (-1.0f64).exp() / 3.0f64.sqrt(),
            max_relative = 1e-14
        );

        // entry-by-entry against the closed form for all interior j
        for j in 0..c.j_max() {
            let raise = z3.entry(BasisIndex { j: j + 1, m: 0 }, BasisIndex { j, m: 0 });
            let jf = j as f64;
            let expect = (-(jf + 1.0)).exp() * (jf + 1.0)
                / ((2.0 * jf + 1.0) * (2.0 * jf + 3.0)).sqrt();
            assert_relative_eq!(raise.re, expect, max_relative = 1e-13);
            if j > 0 {
                let lower = z3.entry(BasisIndex { j: j - 1, m: 0 }, BasisIndex { j, m: 0 });
                let expect = jf.exp() * jf / ((2.0 * jf - 1.0) * (2.0 * jf + 1.0)).sqrt();
                assert_relative_eq!(lower.re, expect, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn orthonormal_basis_and_sesquilinearity() {
        let c = cfg(3);
        let a = StateVector::basis_state(c, 1, 0);
        let b = StateVector::basis_state(c, 2, 0);
        assert_eq!(inner_product(&a, &a).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(inner_product(&a, &b).unwrap(), Complex64::new(0.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = StateVector::random_supported(c, 3, &mut rng);
        let v = StateVector::random_supported(c, 3, &mut rng);
        let uv = inner_product(&u, &v).unwrap();
        let vu = inner_product(&v, &u).unwrap();
        assert_relative_eq!(uv.re, vu.conj().re, max_relative = 1e-14);
        assert_relative_eq!(uv.im, vu.conj().im, max_relative = 1e-14);
    }

    #[test]
    fn inner_product_rejects_mismatched_configs() {
        let a = StateVector::zero(cfg(3));
        let b = StateVector::zero(cfg(4));
        assert!(matches!(inner_product(&a, &b), Err(Error::ConfigMismatch(3, 4))));
    }

    #[test]
    fn operators_match_apply_functions() {
        let c = cfg(6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = StateVector::random_supported(c, 6, &mut rng);
        let via_op = x_operator(c, Axis::Three).apply(&s);
        let direct = apply_x3(&s);
        assert!(via_op.sub(&direct).norm() <= 1e-14 * direct.norm());

        let xp = x_ladder_operator(c, Sign::Plus).apply(&s);
        let direct = apply_xpm(&s, Sign::Plus);
        assert!(xp.sub(&direct).norm() <= 1e-14 * direct.norm());

        let j3 = j_operator(c, Axis::Three).apply(&s);
        assert!(j3.sub(&apply_j3(&s)).norm() <= 1e-14 * apply_j3(&s).norm().max(1.0));
    }

    #[test]
    fn j_squared_is_diagonal() {
        let c = cfg(6);
        for j in 0..=4u32 {
            for m in [-(j as i32), 0, j as i32] {
                let s = StateVector::basis_state(c, j, m);
                // J^2 = J3^2 + (J+J- + J-J+)/2
                let jp = apply_jpm(&s, Sign::Plus);
                let jm = apply_jpm(&s, Sign::Minus);
                let term = apply_jpm(&jm, Sign::Plus)
                    .add_scaled(&apply_jpm(&jp, Sign::Minus), Complex64::new(1.0, 0.0))
                    .scaled(Complex64::new(0.5, 0.0));
                let jsq = apply_j3(&apply_j3(&s)).add_scaled(&term, Complex64::new(1.0, 0.0));
                let expect = (j * (j + 1)) as f64;
                let diff = jsq.sub(&s.scaled(Complex64::new(expect, 0.0)));
                assert!(diff.norm() <= 1e-13 * expect.max(1.0), "j={j} m={m}");
            }
        }
    }
}
