//! Coherent states on the sphere: construction from classical phase-space
//! data, overlaps, norms, and expectation values.
//!
//! A coherent state is the eigenvector of the non-Hermitian vector operator
//! Z with eigenvalue z in C^3, z.z = 1.  The label is built from a classical
//! phase point (x, l) with x^2 = 1, l.x = 0 as
//! `z = cosh|l| x + i (sinh|l|/|l|) l x x`, and the basis coefficients follow
//! from a closed Gegenbauer formula.  A second, independent construction
//! rotates the fiducial north-pole state with a blockwise matrix exponential
//! and serves as a cross-check of the first.

use crate::blockexp::{expm, j_generator_block};
use crate::error::{Error, Result};
use crate::hilbert::{
    build_z_operator, Axis, BandOperator, RepresentationConfig, StateVector, inner_product,
};
use crate::scaled::{ScaledComplex, ScaledSum};
use crate::specfun::{GegenbauerSeq, LegendreSeq};
use num_complex::Complex64;

/// Series summation policy shared by the overlap, norm, wavefunction and
/// density series: stop once three consecutive terms fall below 1e-16 of the
/// running partial sum, hard cap at j = 200.
pub const SERIES_CAP: u32 = 200;
pub(crate) const SERIES_REL_EPS_LN: f64 = -36.841_361_487_904_734; // ln(1e-16)
pub(crate) const SERIES_QUIET_TERMS: u32 = 3;

/// Top-shell relative mass above which a truncation is rejected.
pub const TAIL_MASS_LIMIT: f64 = 1e-20;

const UNIT_TOL: f64 = 1e-12;

/// Classical phase-space point: position on the unit sphere and a tangent
/// angular momentum.
#[derive(Clone, Copy, Debug)]
pub struct PhasePoint {
    xbar: [f64; 3],
    l: [f64; 3],
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl PhasePoint {
    /// Requires |xbar| = 1 and l.xbar = 0, both to 1e-12 (relative to |l|).
    pub fn new(xbar: [f64; 3], l: [f64; 3]) -> Result<Self> {
        let r = dot3(xbar, xbar).sqrt();
        if (r - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidConfig(format!("|xbar| = {r} is not 1")));
        }
        let proj = dot3(l, xbar);
        let lnorm = dot3(l, l).sqrt();
        if proj.abs() > UNIT_TOL * lnorm.max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "l.xbar = {proj:e} (angular momentum must be tangent)"
            )));
        }
        Ok(Self { xbar, l })
    }

    /// Phase point from spherical data: position angles, |l|, and the angle
    /// alpha between l and the local meridian direction.  The resulting
    /// tangent momentum is `l = |l| (sin(alpha) n0 - cos(alpha) n)` with
    /// n = (cos phi cos theta, sin phi cos theta, -sin theta) and
    /// n0 = (-sin phi, cos phi, 0); at theta = pi/2 this gives
    /// l3 = |l| cos(alpha).
    pub fn from_angles(theta_bar: f64, phi_bar: f64, l_norm: f64, alpha: f64) -> Self {
        let (st, ct) = theta_bar.sin_cos();
        let (sp, cp) = phi_bar.sin_cos();
        let xbar = [st * cp, st * sp, ct];
        let n = [cp * ct, sp * ct, -st];
        let n0 = [-sp, cp, 0.0];
        let (sa, ca) = alpha.sin_cos();
        let l = [
            l_norm * (sa * n0[0] - ca * n[0]),
            l_norm * (sa * n0[1] - ca * n[1]),
            l_norm * (sa * n0[2] - ca * n[2]),
        ];
        Self { xbar, l }
    }

    pub fn xbar(&self) -> [f64; 3] {
        self.xbar
    }

    pub fn l(&self) -> [f64; 3] {
        self.l
    }

    pub fn l_norm(&self) -> f64 {
        dot3(self.l, self.l).sqrt()
    }
}

/// Coherent-state label: z in C^3 with complex bilinear square z.z = 1.
#[derive(Clone, Copy, Debug)]
pub struct ComplexDirection {
    z: [Complex64; 3],
}

impl ComplexDirection {
    /// The bilinear square is validated relative to the Hermitian norm,
    /// which is the scale at which z.z - 1 can be resolved in floating point
    /// (the components grow like cosh|l| while the square stays 1 by exact
    /// cancellation).
    pub fn new(z: [Complex64; 3]) -> Result<Self> {
        let sq = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
        let h = z[0].norm_sqr() + z[1].norm_sqr() + z[2].norm_sqr();
        if (sq - Complex64::new(1.0, 0.0)).norm() > UNIT_TOL * h.max(1.0) {
            return Err(Error::InvalidConfig(format!("z.z = {sq} is not 1")));
        }
        Ok(Self { z })
    }

    pub fn components(&self) -> [Complex64; 3] {
        self.z
    }

    /// Sum of |z_i|^2 (Hermitian norm squared); equals cosh(2|l|).
    pub fn hermitian_norm_sqr(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum()
    }

    /// |l| recovered from the label.
    pub fn effective_l_norm(&self) -> f64 {
        let h = self.hermitian_norm_sqr().max(1.0);
        h.acosh() / 2.0
    }

    /// Componentwise-conjugated bilinear product z*.w.
    pub fn conj_dot(&self, other: &ComplexDirection) -> Complex64 {
        self.z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Bilinear product x.z with a real vector.
    pub fn real_dot(&self, x: [f64; 3]) -> Complex64 {
        self.z[0] * x[0] + self.z[1] * x[1] + self.z[2] * x[2]
    }
}

/// Label of the coherent state attached to a phase point:
/// `z = cosh|l| x + i (sinh|l|/|l|) l x x`, with the l -> 0 limit z = x.
pub fn z_from_phase(p: &PhasePoint) -> ComplexDirection {
    let ln = p.l_norm();
    if ln == 0.0 {
        return ComplexDirection {
            z: [
                Complex64::new(p.xbar[0], 0.0),
                Complex64::new(p.xbar[1], 0.0),
                Complex64::new(p.xbar[2], 0.0),
            ],
        };
    }
    let ch = ln.cosh();
    // sinh|l|/|l| with a series for tiny arguments
    let shc = if ln < 1e-8 { 1.0 + ln * ln / 6.0 } else { ln.sinh() / ln };
    let lxx = cross3(p.l, p.xbar);
    let z = [
        Complex64::new(ch * p.xbar[0], shc * lxx[0]),
        Complex64::new(ch * p.xbar[1], shc * lxx[1]),
        Complex64::new(ch * p.xbar[2], shc * lxx[2]),
    ];
    ComplexDirection { z }
}

/// Label from the angle parametrization:
/// `z = cosh|l| x + i sinh|l| (sin(alpha) n + cos(alpha) n0)`.
pub fn z_from_angles(theta_bar: f64, phi_bar: f64, l_norm: f64, alpha: f64) -> ComplexDirection {
    let (st, ct) = theta_bar.sin_cos();
    let (sp, cp) = phi_bar.sin_cos();
    let xbar = [st * cp, st * sp, ct];
    let n = [cp * ct, sp * ct, -st];
    let n0 = [-sp, cp, 0.0];
    let ch = l_norm.cosh();
    let sh = l_norm.sinh();
    let (sa, ca) = alpha.sin_cos();
    let z = [
        Complex64::new(ch * xbar[0], sh * (sa * n[0] + ca * n0[0])),
        Complex64::new(ch * xbar[1], sh * (sa * n[1] + ca * n0[1])),
        Complex64::new(ch * xbar[2], sh * (sa * n[2] + ca * n0[2])),
    ];
    ComplexDirection { z }
}

/// Default truncation for a label: the coefficients peak near j = |l| with a
/// super-exponential falloff, so a fixed margin above the peak suffices.
pub fn auto_j_max(z: &ComplexDirection) -> u32 {
    let l = z.effective_l_norm();
    let margin = 15.0f64.max((3.0 * (l + 1.0).sqrt()).ceil());
    (l.ceil() + margin) as u32
}

/// Auto-selected truncation grown until the top-shell mass check passes.
/// Returns the config together with the accepted top-shell mass.
pub fn adequate_config(z: &ComplexDirection) -> Result<(RepresentationConfig, f64)> {
    let mut j_max = auto_j_max(z);
    for _ in 0..12 {
        let cfg = RepresentationConfig::new(j_max)?;
        match coherent_coefficients(z, cfg) {
            Ok(s) => return Ok((cfg, top_shell_mass(&s))),
            Err(Error::InadequateTruncation { .. }) => j_max += 5,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InadequateTruncation { j_max, tail: f64::NAN, limit: TAIL_MASS_LIMIT })
}

/// Relative coefficient mass on the top shell.
pub fn top_shell_mass(s: &StateVector) -> f64 {
    let cfg = s.config();
    let jm = cfg.j_max();
    let top: f64 = (-(jm as i32)..=jm as i32)
        .map(|m| s.coeff(jm, m).norm_sqr())
        .sum();
    top / s.norm_sqr()
}

/// Fiducial (north-pole) coefficients `e^{-j(j+1)/2} sqrt(2j+1)` at m = 0.
pub fn fiducial_coefficients(cfg: RepresentationConfig) -> StateVector {
    let mut s = StateVector::zero(cfg);
    for j in 0..=cfg.j_max() {
        let jf = j as f64;
        let v = (-0.5 * jf * (jf + 1.0)).exp() * (2.0 * jf + 1.0).sqrt();
        s.set_coeff(j, 0, Complex64::new(v, 0.0));
    }
    s
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + (k as f64).ln();
    }
    v
}

/// Basis coefficients of the coherent state |z> on the truncated basis:
///
/// `c_{jm} = e^{-j(j+1)/2} sqrt(2j+1) (2|m|)!/|m|! sqrt((j-|m|)!/(j+|m|)!)
///           ((-eps(m) z1 + i z2)/2)^{|m|} C_{j-|m|}^{|m|+1/2}(z3)`
///
/// assembled in scaled arithmetic and collapsed only after the damping is
/// multiplied in.  Rejects the truncation if the top shell carries more than
/// `TAIL_MASS_LIMIT` of the state.
pub fn coherent_coefficients(z: &ComplexDirection, cfg: RepresentationConfig) -> Result<StateVector> {
    let j_max = cfg.j_max();
    let lnf = ln_factorials(2 * j_max as usize);
    let [z1, z2, z3] = z.components();
    let mut s = StateVector::zero(cfg);

    for m_abs in 0..=j_max {
        let alpha = m_abs as f64 + 0.5;
        let geg: Vec<ScaledComplex> = GegenbauerSeq::new(alpha, z3)
            .take((j_max - m_abs) as usize + 1)
            .collect();
        let pre_log = lnf[2 * m_abs as usize] - lnf[m_abs as usize];

        let eps_values: &[i32] = if m_abs == 0 { &[0] } else { &[1, -1] };
        for &eps in eps_values {
            // ((-eps z1 + i z2)/2)^{|m|}; the m = 0 branch is the empty product 1
            let power = if m_abs == 0 {
                ScaledComplex::one()
            } else {
                let base = (-Complex64::new(eps as f64, 0.0) * z1 + Complex64::new(0.0, 1.0) * z2)
                    / 2.0;
                ScaledComplex::from_complex(base).powi(m_abs)
            };
            if power.is_zero() && m_abs > 0 {
                continue;
            }
            for n in 0..=(j_max - m_abs) {
                let j = m_abs + n;
                let jf = j as f64;
                let shell_log = -0.5 * jf * (jf + 1.0)
                    + 0.5 * (2.0 * jf + 1.0).ln()
                    + pre_log
                    + 0.5 * (lnf[(j - m_abs) as usize] - lnf[(j + m_abs) as usize]);
                let value = geg[n as usize].mul(power).scale_log(shell_log).collapse();
                s.set_coeff(j, eps * m_abs as i32, value);
            }
        }
    }

    let nsq = s.norm_sqr();
    if !nsq.is_finite() {
        return Err(Error::Overflow);
    }
    let tail = top_shell_mass(&s);
    if tail > TAIL_MASS_LIMIT {
        return Err(Error::InadequateTruncation { j_max, tail, limit: TAIL_MASS_LIMIT });
    }
    Ok(s)
}

/// Independent construction of |z> as a rotated fiducial state:
/// `|z> = exp[kappa (z x e3).J] |e3>` with `kappa = arccosh(z3)/sqrt(1-z3^2)`.
///
/// The arccosh branch is matched to the square root so that
/// `sinh(arccosh z3) = +i sqrt(1-z3^2)`; with that pairing the exponential
/// reproduces the label z itself (the small-angle limit z3 -> 1 is analytic).
/// The generator degenerates at z3 = ±1; z = e3 returns the fiducial state
/// directly and any other degenerate label is refused.
pub fn rotation_oracle(z: &ComplexDirection, cfg: RepresentationConfig) -> Result<StateVector> {
    let [z1, z2, z3] = z.components();
    let one = Complex64::new(1.0, 0.0);
    let s = (one - z3 * z3).sqrt();
    if s.norm() < 1e-7 {
        // |1 - z3^2| < 1e-14 up to rounding
        if (z3 - one).norm() < 1e-7 && z1.norm() < 1e-7 && z2.norm() < 1e-7 {
            return Ok(fiducial_coefficients(cfg));
        }
        return Err(Error::DegenerateAxis);
    }
    let mut chi = z3.acosh();
    let i_s = Complex64::new(0.0, 1.0) * s;
    if (chi.sinh() - i_s).norm() > (chi.sinh() + i_s).norm() {
        chi = -chi;
    }
    let kappa = chi / s;

    // (z x e3).J = z2 J1 - z1 J2
    let coeff = [kappa * z2, -kappa * z1, Complex64::new(0.0, 0.0)];
    let mut out = StateVector::zero(cfg);
    for j in 0..=cfg.j_max() {
        let jf = j as f64;
        let fid = (-0.5 * jf * (jf + 1.0)).exp() * (2.0 * jf + 1.0).sqrt();
        let block = expm(&j_generator_block(j, coeff));
        let col = block.column(j as usize); // m = 0 column
        for (k, m) in (-(j as i32)..=j as i32).enumerate() {
            out.set_coeff(j, m, col[k] * fid);
        }
    }
    Ok(out)
}

enum Cutoff {
    Fixed(u32),
    Auto,
}

fn overlap_series_impl(arg: Complex64, cutoff: Cutoff) -> ScaledComplex {
    let mut sum = ScaledSum::new();
    let mut quiet = 0u32;
    let cap = match cutoff {
        Cutoff::Fixed(j_cut) => j_cut,
        Cutoff::Auto => SERIES_CAP,
    };
    for (j, p) in LegendreSeq::new(arg).take(cap as usize + 1).enumerate() {
        let jf = j as f64;
        let term = p.scale_log(-jf * (jf + 1.0) + (2.0 * jf + 1.0).ln());
        if matches!(cutoff, Cutoff::Auto) {
            if term.log_magnitude() < sum.log_magnitude() + SERIES_REL_EPS_LN {
                quiet += 1;
                if quiet >= SERIES_QUIET_TERMS {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        sum.push(term);
    }
    sum.value()
}

/// Overlap of coherent states by the Legendre series
/// `<z|w> = sum_j e^{-j(j+1)} (2j+1) P_j(z*.w)` truncated at `j_cut`.
pub fn overlap_series(z: &ComplexDirection, w: &ComplexDirection, j_cut: u32) -> Complex64 {
    overlap_series_impl(z.conj_dot(w), Cutoff::Fixed(j_cut)).collapse()
}

/// Overlap with the automatic series cutoff.
pub fn overlap_auto(z: &ComplexDirection, w: &ComplexDirection) -> Complex64 {
    overlap_series_impl(z.conj_dot(w), Cutoff::Auto).collapse()
}

pub(crate) fn norm_sq_scaled(z: &ComplexDirection) -> ScaledComplex {
    overlap_series_impl(Complex64::new(z.hermitian_norm_sqr(), 0.0), Cutoff::Auto)
}

/// Squared norm `<z|z> = sum_j e^{-j(j+1)} (2j+1) P_j(|z|^2)`; real and >= 1.
pub fn norm_sq(z: &ComplexDirection, j_cut: u32) -> f64 {
    overlap_series_impl(Complex64::new(z.hermitian_norm_sqr(), 0.0), Cutoff::Fixed(j_cut))
        .collapse()
        .re
}

/// Squared norm with the automatic series cutoff.
pub fn norm_sq_auto(z: &ComplexDirection) -> f64 {
    norm_sq_scaled(z).collapse().re
}

/// Normalized expectation `<s|op|s> / <s|s>`.
pub fn expectation(op: &BandOperator, s: &StateVector) -> Result<Complex64> {
    let nsq = s.norm_sqr();
    if nsq == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(inner_product(s, &op.apply(s))? / nsq)
}

/// Largest relative residual of the eigenvalue relation Z_i |z> = z_i |z>
/// over the three components, for the state built by
/// [`coherent_coefficients`] at the given truncation.
pub fn z_eigen_residual(z: &ComplexDirection, cfg: RepresentationConfig) -> Result<f64> {
    let s = coherent_coefficients(z, cfg)?;
    Ok(eigen_residual_of_state(&s, z))
}

/// Residual of Z_i s = z_i s for an arbitrary state against a candidate label.
pub fn eigen_residual_of_state(s: &StateVector, z: &ComplexDirection) -> f64 {
    let cfg = s.config();
    let norm = s.norm();
    let mut worst: f64 = 0.0;
    for (axis, zi) in Axis::ALL.iter().zip(z.components()) {
        let zs = build_z_operator(cfg, *axis).apply(s);
        let diff = zs.add_scaled(s, -zi);
        worst = worst.max(diff.norm() / norm);
    }
    worst
}

/// How far a state is from the coherent family: for each component the best
/// constant is the expectation <Z_i>, so the defect is
/// `max_i ||(Z_i - <Z_i>) s|| / ||s||`.
pub fn coherence_defect(s: &StateVector) -> Result<f64> {
    let cfg = s.config();
    let norm = s.norm();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let mut worst: f64 = 0.0;
    for axis in Axis::ALL {
        let op = build_z_operator(cfg, axis);
        let mean = expectation(&op, s)?;
        let diff = op.apply(s).add_scaled(s, -mean);
        worst = worst.max(diff.norm() / norm);
    }
    Ok(worst)
}
