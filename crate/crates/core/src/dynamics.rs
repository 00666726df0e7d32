//! Exact time evolution and observable extraction.
//!
//! Free evolution under H = J^2/2 is diagonal in the shell index and applies
//! phases e^{-i t j(j+1)/2}; since j(j+1)/2 is an integer the time argument
//! is reduced mod 2pi first, which makes the 2pi recurrence of the free
//! dynamics exact at the coefficient level.  Rotational evolution under
//! H = omega.J is diagonal for omega along e3 and a blockwise matrix
//! exponential otherwise.

use crate::blockexp::{expm, j_generator_block};
use crate::coherent::{
    adequate_config, coherent_coefficients, norm_sq_scaled, ComplexDirection, SERIES_CAP,
    SERIES_QUIET_TERMS, SERIES_REL_EPS_LN,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    inner_product, j_operator, x_ladder_operator, x_operator, Axis, RepresentationConfig, Sign,
    StateVector,
};
use crate::scaled::ScaledSum;
use crate::specfun::LegendreSeq;
use num_complex::Complex64;
use std::f64::consts::TAU;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Magnitude of <X+> below which its phase is treated as undefined.
pub const PHASE_FLOOR: f64 = 1e-13;

const LN_4PI: f64 = 2.531_024_246_969_291; // ln(4 pi)

/// Generator of the time evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hamiltonian {
    /// H = J^2 / 2 (free particle on the sphere).
    Free,
    /// H = omega . J (uniform rotation).
    Rotation([f64; 3]),
}

/// Free evolution: c_{jm} -> e^{-i t j(j+1)/2} c_{jm}.
///
/// The phase integer k = j(j+1)/2 lets t be reduced mod 2pi exactly, so
/// `free_evolve(s, 2*PI)` returns the coefficients bit-for-bit.
pub fn free_evolve(s: &StateVector, t: f64) -> StateVector {
    let tr = t.rem_euclid(TAU);
    let mut out = s.clone();
    let cfg = s.config();
    for j in 0..=cfg.j_max() {
        let k = (j as u64 * (j as u64 + 1) / 2) as f64;
        let phase = Complex64::from_polar(1.0, -k * tr);
        for m in -(j as i32)..=j as i32 {
            let idx = cfg.flat(j, m);
            out.coefficients_mut()[idx] = s.coefficients()[idx] * phase;
        }
    }
    out
}

/// Rotational evolution e^{-i t omega.J}.
///
/// For omega along e3 the action is the exact diagonal phase e^{-i m w3 t};
/// a general omega is exponentiated blockwise per shell.
pub fn rotation_evolve(s: &StateVector, omega: [f64; 3], t: f64) -> StateVector {
    let cfg = s.config();
    if omega == [0.0; 3] || t == 0.0 {
        return s.clone();
    }
    if omega[0] == 0.0 && omega[1] == 0.0 {
        let ang = (omega[2] * t).rem_euclid(TAU);
        let mut out = s.clone();
        for idx in cfg.basis_indices() {
            let phase = Complex64::from_polar(1.0, -(idx.m as f64) * ang);
            let k = cfg.flat(idx.j, idx.m);
            out.coefficients_mut()[k] = s.coefficients()[k] * phase;
        }
        return out;
    }
    let coeff = [
        Complex64::new(0.0, -t * omega[0]),
        Complex64::new(0.0, -t * omega[1]),
        Complex64::new(0.0, -t * omega[2]),
    ];
    let mut out = StateVector::zero(cfg);
    for j in 0..=cfg.j_max() {
        let block = expm(&j_generator_block(j, coeff));
        let input: Vec<Complex64> = (-(j as i32)..=j as i32).map(|m| s.coeff(j, m)).collect();
        let output = block.matvec(&input);
        for (k, m) in (-(j as i32)..=j as i32).enumerate() {
            out.set_coeff(j, m, output[k]);
        }
    }
    out
}

/// Evolve under either Hamiltonian.
pub fn evolve(s: &StateVector, hamiltonian: &Hamiltonian, t: f64) -> StateVector {
    match hamiltonian {
        Hamiltonian::Free => free_evolve(s, t),
        Hamiltonian::Rotation(omega) => rotation_evolve(s, *omega, t),
    }
}

/// Label carried by a coherent state under rotational evolution:
/// the Rodrigues rotation of z about omega by angle |omega| t.
pub fn z_of_t(z: &ComplexDirection, omega: [f64; 3], t: f64) -> ComplexDirection {
    let w2 = omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2];
    if w2 == 0.0 {
        return *z;
    }
    let wn = w2.sqrt();
    let (s, c) = (wn * t).sin_cos();
    let zc = z.components();
    let wz = [
        omega[1] * zc[2] - omega[2] * zc[1],
        omega[2] * zc[0] - omega[0] * zc[2],
        omega[0] * zc[1] - omega[1] * zc[0],
    ];
    let wdotz = zc[0] * omega[0] + zc[1] * omega[1] + zc[2] * omega[2];
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        out[i] = c * zc[i] + (s / wn) * wz[i] + ((1.0 - c) / w2) * omega[i] * wdotz;
    }
    ComplexDirection::new(out).expect("rotation preserves the bilinear square")
}

/// Midpoint-theta / uniform-phi grid with quadrature weights.
///
/// Nodes are theta_a = (a+1/2) pi/n_theta, phi_b = 2 pi b/n_phi.  The theta
/// weights are the classical trigonometric weights for these nodes: they
/// integrate cos(k theta) sin(theta) exactly for k < n_theta, reduce to
/// sin(theta_a) pi/n_theta for large grids, and make the weights sum to 4 pi
/// at machine precision.
#[derive(Clone, Debug)]
pub struct SphericalGrid {
    n_theta: usize,
    n_phi: usize,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    theta_weights: Vec<f64>,
    phi_weight: f64,
}

impl SphericalGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 4 {
            return Err(Error::InvalidConfig(format!(
                "grid {n_theta}x{n_phi} too small"
            )));
        }
        if n_phi % 2 != 0 {
            return Err(Error::InvalidConfig(
                "n_phi must be even (pole neighbors reflect by half a turn)".into(),
            ));
        }
        let thetas: Vec<f64> = (0..n_theta)
            .map(|a| (a as f64 + 0.5) * std::f64::consts::PI / n_theta as f64)
            .collect();
        let phis: Vec<f64> = (0..n_phi).map(|b| TAU * b as f64 / n_phi as f64).collect();
        let theta_weights = thetas
            .iter()
            .map(|&th| {
                let mut w = 1.0;
                let mut k = 2usize;
                while k < n_theta {
                    w += 2.0 * (k as f64 * th).cos() / (1.0 - (k * k) as f64);
                    k += 2;
                }
                2.0 * w / n_theta as f64
            })
            .collect();
        Ok(Self { n_theta, n_phi, thetas, phis, theta_weights, phi_weight: TAU / n_phi as f64 })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn n_nodes(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn theta(&self, a: usize) -> f64 {
        self.thetas[a]
    }

    pub fn phi(&self, b: usize) -> f64 {
        self.phis[b]
    }

    /// Quadrature weight of node (a, b); the weights sum to 4 pi.
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        debug_assert!(b < self.n_phi);
        self.theta_weights[a] * self.phi_weight
    }

    pub fn unit_vector(&self, a: usize, b: usize) -> [f64; 3] {
        let (st, ct) = self.thetas[a].sin_cos();
        let (sp, cp) = self.phis[b].sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn total_weight(&self) -> f64 {
        let theta_sum: f64 = self.theta_weights.iter().sum();
        theta_sum * self.phi_weight * self.n_phi as f64
    }

    pub fn node_index(&self, a: usize, b: usize) -> usize {
        a * self.n_phi + b
    }
}

/// Probability density sampled on a spherical grid at a fixed time.
#[derive(Clone, Debug)]
pub struct DensityField {
    grid: SphericalGrid,
    values: Vec<f64>,
    time: f64,
}

impl DensityField {
    pub fn grid(&self) -> &SphericalGrid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[self.grid.node_index(a, b)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Quadrature integral over the sphere, accumulated in fixed node order.
    pub fn integral(&self) -> f64 {
        let mut total = 0.0;
        for a in 0..self.grid.n_theta {
            let mut row = 0.0;
            for b in 0..self.grid.n_phi {
                row += self.values[self.grid.node_index(a, b)];
            }
            total += row * self.grid.theta_weights[a];
        }
        total * self.grid.phi_weight
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// ln of the squared wave-packet amplitude at x for the kernel
/// `sum_j e^{-(1/2) j(j+1)(1 + i t)} (2j+1) P_j(x.z)`; `-inf` for an exact zero.
fn kernel_log_amp_sq(z: &ComplexDirection, x: [f64; 3], t_reduced: f64) -> f64 {
    let arg = z.real_dot(x);
    let mut sum = ScaledSum::new();
    let mut quiet = 0u32;
    for (j, p) in LegendreSeq::new(arg).take(SERIES_CAP as usize + 1).enumerate() {
        let jf = j as f64;
        let half_jj = 0.5 * jf * (jf + 1.0);
        let k = (j as u64 * (j as u64 + 1) / 2) as f64;
        let term = p
            .scale_log(-half_jj + (2.0 * jf + 1.0).ln())
            .mul(crate::scaled::ScaledComplex::from_log_polar(0.0, -k * t_reduced));
        if term.log_magnitude() < sum.log_magnitude() + SERIES_REL_EPS_LN {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS {
                break;
            }
        } else {
            quiet = 0;
        }
        sum.push(term);
    }
    let v = sum.value();
    if v.is_zero() { f64::NEG_INFINITY } else { 2.0 * v.log_magnitude() }
}

/// Wave function f_z(x, t) = (4 pi)^{-1/2} sum_j e^{-(1/2)j(j+1)(1+it)} (2j+1) P_j(x.z).
///
/// `x` must be a unit vector.  A 2pi step in t reproduces the value exactly
/// up to the rounding of the reduced time argument.
pub fn wavefunction(z: &ComplexDirection, x: [f64; 3], t: f64) -> Complex64 {
    debug_assert!((x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0).abs() < 1e-9);
    let tr = t.rem_euclid(TAU);
    let arg = z.real_dot(x);
    let mut sum = ScaledSum::new();
    let mut quiet = 0u32;
    for (j, p) in LegendreSeq::new(arg).take(SERIES_CAP as usize + 1).enumerate() {
        let jf = j as f64;
        let k = (j as u64 * (j as u64 + 1) / 2) as f64;
        let term = p
            .scale_log(-0.5 * jf * (jf + 1.0) + (2.0 * jf + 1.0).ln())
            .mul(crate::scaled::ScaledComplex::from_log_polar(0.0, -k * tr));
        if term.log_magnitude() < sum.log_magnitude() + SERIES_REL_EPS_LN {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS {
                break;
            }
        } else {
            quiet = 0;
        }
        sum.push(term);
    }
    sum.value().scale_log(-0.5 * LN_4PI).collapse()
}

fn density_on_grid(z_kernel: &ComplexDirection, norm_log: f64, grid: &SphericalGrid, t_reduced: f64, time: f64) -> DensityField {
    let n = grid.n_nodes();
    let eval = |idx: usize| {
        let a = idx / grid.n_phi;
        let b = idx % grid.n_phi;
        let log_amp_sq = kernel_log_amp_sq(z_kernel, grid.unit_vector(a, b), t_reduced);
        if log_amp_sq == f64::NEG_INFINITY {
            0.0
        } else {
            (log_amp_sq - LN_4PI - norm_log).exp()
        }
    };

    #[cfg(feature = "parallel")]
    let values: Vec<f64> = (0..n).into_par_iter().map(eval).collect();
    #[cfg(not(feature = "parallel"))]
    let values: Vec<f64> = (0..n).map(eval).collect();

    DensityField { grid: grid.clone(), values, time }
}

/// Probability density of the freely evolving packet,
/// `p(x,t) = |sum_j e^{-(1/2)j(j+1)(1+it)} (2j+1) P_j(x.z)|^2 / (4 pi <z|z>)`.
pub fn density_free(z: &ComplexDirection, grid: &SphericalGrid, t: f64) -> DensityField {
    let norm_log = norm_sq_scaled(z).log_magnitude();
    density_on_grid(z, norm_log, grid, t.rem_euclid(TAU), t)
}

/// Probability density under H = omega.J: the t = 0 kernel evaluated at the
/// rotated label z(t); the normalization is rotation invariant.
pub fn density_rotation(
    z: &ComplexDirection,
    grid: &SphericalGrid,
    omega: [f64; 3],
    t: f64,
) -> DensityField {
    let norm_log = norm_sq_scaled(z).log_magnitude();
    let zt = z_of_t(z, omega, t);
    density_on_grid(&zt, norm_log, grid, 0.0, t)
}

/// Observable record of one evolution run.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_unwrapped: Vec<f64>,
    pub x3_mean: Vec<f64>,
    pub xplus_mean: Vec<Complex64>,
    pub j_mean: Vec<[f64; 3]>,
    pub clamped: Vec<bool>,
    pub clamp_count: usize,
    /// Azimuth of the classical position that labels the state.
    pub phi_ref: f64,
}

impl TimeSeries {
    /// Series with only times and theta populated; used by analyses that
    /// operate on synthetic signals.
    pub fn from_theta(times: Vec<f64>, theta: Vec<f64>) -> Self {
        assert_eq!(times.len(), theta.len());
        let n = times.len();
        Self {
            times,
            theta,
            phi: vec![0.0; n],
            phi_unwrapped: vec![0.0; n],
            x3_mean: vec![0.0; n],
            xplus_mean: vec![Complex64::new(0.0, 0.0); n],
            j_mean: vec![[0.0; 3]; n],
            clamped: vec![false; n],
            clamp_count: 0,
            phi_ref: 0.0,
        }
    }

    /// Series with times and an unwrapped phase; theta left flat.
    pub fn from_phi_unwrapped(times: Vec<f64>, phi_unwrapped: Vec<f64>, phi_ref: f64) -> Self {
        assert_eq!(times.len(), phi_unwrapped.len());
        let n = times.len();
        let phi = phi_unwrapped.iter().map(|p| p.rem_euclid(TAU)).collect();
        Self {
            times,
            theta: vec![0.0; n],
            phi,
            phi_unwrapped,
            x3_mean: vec![0.0; n],
            xplus_mean: vec![Complex64::new(0.0, 0.0); n],
            j_mean: vec![[0.0; 3]; n],
            clamped: vec![false; n],
            clamp_count: 0,
            phi_ref,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

struct Observables {
    theta: f64,
    phi: f64,
    x3: f64,
    xplus: Complex64,
    j: [f64; 3],
    clamped: bool,
}

fn observables_at(
    state0: &StateVector,
    nsq: f64,
    ops: &ObservableOps,
    hamiltonian: &Hamiltonian,
    t: f64,
) -> Result<Observables> {
    let st = evolve(state0, hamiltonian, t);
    let x3 = inner_product(&st, &ops.x3.apply(&st))?.re / nsq;
    let xplus = inner_product(&st, &ops.xplus.apply(&st))? / nsq;
    let j = [
        inner_product(&st, &ops.j[0].apply(&st))?.re / nsq,
        inner_product(&st, &ops.j[1].apply(&st))?.re / nsq,
        inner_product(&st, &ops.j[2].apply(&st))?.re / nsq,
    ];
    let v = 0.25f64.exp() * x3;
    let clamped = !(-1.0..=1.0).contains(&v);
    let theta = v.clamp(-1.0, 1.0).acos();
    if xplus.norm() <= PHASE_FLOOR {
        return Err(Error::UndefinedPhase(t));
    }
    let mut phi = xplus.im.atan2(xplus.re);
    if phi < 0.0 {
        phi += TAU;
    }
    Ok(Observables { theta, phi, x3, xplus, j, clamped })
}

struct ObservableOps {
    x3: crate::hilbert::BandOperator,
    xplus: crate::hilbert::BandOperator,
    j: [crate::hilbert::BandOperator; 3],
}

impl ObservableOps {
    fn new(cfg: RepresentationConfig) -> Self {
        Self {
            x3: x_operator(cfg, Axis::Three),
            xplus: x_ladder_operator(cfg, Sign::Plus),
            j: [
                j_operator(cfg, Axis::One),
                j_operator(cfg, Axis::Two),
                j_operator(cfg, Axis::Three),
            ],
        }
    }
}

fn phi_ref_of(z: &ComplexDirection) -> f64 {
    let zc = z.components();
    let x = zc[0].re;
    let y = zc[1].re;
    if x == 0.0 && y == 0.0 { 0.0 } else { y.atan2(x) }
}

/// Evolve the coherent state labeled z and record the spherical-angle
/// observables at each sample time.  Times must be strictly increasing.
pub fn evolve_series(
    z: &ComplexDirection,
    hamiltonian: &Hamiltonian,
    times: &[f64],
) -> Result<TimeSeries> {
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("sample times must be strictly increasing".into()));
    }
    let (cfg, _) = adequate_config(z)?;
    evolve_series_with_config(z, hamiltonian, times, cfg)
}

/// As [`evolve_series`] with an explicit truncation choice.
pub fn evolve_series_with_config(
    z: &ComplexDirection,
    hamiltonian: &Hamiltonian,
    times: &[f64],
    cfg: RepresentationConfig,
) -> Result<TimeSeries> {
    let state0 = coherent_coefficients(z, cfg)?;
    let nsq = state0.norm_sqr();
    let ops = ObservableOps::new(cfg);

    let compute = |&t: &f64| observables_at(&state0, nsq, &ops, hamiltonian, t);

    #[cfg(feature = "parallel")]
    let rows: Result<Vec<Observables>> = times.par_iter().map(compute).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<Observables>> = times.iter().map(compute).collect();
    let rows = rows?;

    let n = rows.len();
    let mut series = TimeSeries {
        times: times.to_vec(),
        theta: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        phi_unwrapped: Vec::with_capacity(n),
        x3_mean: Vec::with_capacity(n),
        xplus_mean: Vec::with_capacity(n),
        j_mean: Vec::with_capacity(n),
        clamped: Vec::with_capacity(n),
        clamp_count: 0,
        phi_ref: phi_ref_of(z),
    };
    let mut offset = 0.0;
    let mut prev_phi = None;
    for row in rows {
        if let Some(p) = prev_phi {
            let d: f64 = row.phi - p;
            if d > std::f64::consts::PI {
                offset -= TAU;
            } else if d < -std::f64::consts::PI {
                offset += TAU;
            }
        }
        prev_phi = Some(row.phi);
        series.theta.push(row.theta);
        series.phi.push(row.phi);
        series.phi_unwrapped.push(row.phi + offset);
        series.x3_mean.push(row.x3);
        series.xplus_mean.push(row.xplus);
        series.j_mean.push(row.j);
        series.clamped.push(row.clamped);
        if row.clamped {
            series.clamp_count += 1;
        }
    }
    Ok(series)
}

/// theta(t) = arccos(e^{1/4} <X3(t)>), clamped into the arccos domain.
pub fn theta_of_t(z: &ComplexDirection, t: f64, hamiltonian: &Hamiltonian) -> Result<f64> {
    let (cfg, _) = adequate_config(z)?;
    let state0 = coherent_coefficients(z, cfg)?;
    let nsq = state0.norm_sqr();
    let ops = ObservableOps::new(cfg);
    Ok(observables_at(&state0, nsq, &ops, hamiltonian, t)?.theta)
}

/// phi(t) = Arg <X+(t)> reduced into [0, 2pi).
pub fn phi_of_t(z: &ComplexDirection, t: f64, hamiltonian: &Hamiltonian) -> Result<f64> {
    let (cfg, _) = adequate_config(z)?;
    let state0 = coherent_coefficients(z, cfg)?;
    let nsq = state0.norm_sqr();
    let ops = ObservableOps::new(cfg);
    Ok(observables_at(&state0, nsq, &ops, hamiltonian, t)?.phi)
}

/// Spherical-angle trajectory (sin th cos ph, sin th sin ph, cos th) per sample.
pub fn trajectory(
    z: &ComplexDirection,
    hamiltonian: &Hamiltonian,
    times: &[f64],
) -> Result<Vec<[f64; 3]>> {
    let series = evolve_series(z, hamiltonian, times)?;
    Ok(trajectory_points(&series))
}

/// Trajectory points of an existing series.
pub fn trajectory_points(series: &TimeSeries) -> Vec<[f64; 3]> {
    series
        .theta
        .iter()
        .zip(&series.phi)
        .map(|(&th, &ph)| {
            let (st, ct) = th.sin_cos();
            let (sp, cp) = ph.sin_cos();
            [st * cp, st * sp, ct]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::{z_from_phase, PhasePoint};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn standard_label(j: u32) -> ComplexDirection {
        let l3 = j as f64;
        let l_norm = (l3 * (l3 + 1.0)).sqrt();
        let alpha = (l3 / l_norm).acos();
        z_from_phase(&PhasePoint::from_angles(std::f64::consts::FRAC_PI_2, 0.0, l_norm, alpha))
    }

    #[test]
    fn free_evolution_phases() {
        let cfg = RepresentationConfig::new(4).unwrap();
        let s = StateVector::basis_state(cfg, 1, 0);
        // t = 0 identity
        assert_eq!(free_evolve(&s, 0.0).coeff(1, 0), Complex64::new(1.0, 0.0));
        // j(j+1)/2 = 1 at j = 1: phase at t = pi is exactly -1
        let at_pi = free_evolve(&s, std::f64::consts::PI).coeff(1, 0);
        assert_relative_eq!(at_pi.re, -1.0, max_relative = 1e-12);
        assert!(at_pi.im.abs() < 1e-12);
    }

    #[test]
    fn free_evolution_2pi_recurrence_is_exact() {
        let cfg = RepresentationConfig::new(20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = StateVector::random_supported(cfg, 20, &mut rng);
        let evolved = free_evolve(&s, TAU);
        assert_eq!(s.coefficients(), evolved.coefficients());
    }

    #[test]
    fn evolution_is_unitary_and_composes() {
        let cfg = RepresentationConfig::new(12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = StateVector::random_supported(cfg, 12, &mut rng);
        for t in [0.3, 1.7, 4.0] {
            assert_relative_eq!(free_evolve(&s, t).norm(), s.norm(), max_relative = 1e-12);
        }
        let a = free_evolve(&free_evolve(&s, 0.7), 1.9);
        let b = free_evolve(&s, 2.6);
        assert!(a.sub(&b).norm() <= 1e-12 * s.norm());

        let omega = [0.3, -0.4, 0.5];
        assert_relative_eq!(rotation_evolve(&s, omega, 1.3).norm(), s.norm(), max_relative = 1e-11);
        let a = rotation_evolve(&rotation_evolve(&s, omega, 0.6), omega, 0.7);
        let b = rotation_evolve(&s, omega, 1.3);
        assert!(a.sub(&b).norm() <= 1e-11 * s.norm());
    }

    #[test]
    fn axis3_rotation_matches_block_exponential() {
        // the diagonal fast path and the generic blockwise path must agree
        let cfg = RepresentationConfig::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let s = StateVector::random_supported(cfg, 8, &mut rng);
        let t = 0.83;
        let fast = rotation_evolve(&s, [0.0, 0.0, 1.4], t);
        let tilted = rotation_evolve(&s, [1e-300, 0.0, 1.4], t); // forces the block path
        assert!(fast.sub(&tilted).norm() <= 1e-11 * s.norm());

        let diag = rotation_evolve(&StateVector::basis_state(cfg, 3, 2), [0.0, 0.0, 0.9], t);
        let expect = Complex64::from_polar(1.0, -2.0 * 0.9 * t);
        assert!((diag.coeff(3, 2) - expect).norm() < 1e-12);
    }

    #[test]
    fn z_of_t_is_a_rotation() {
        let z = standard_label(11);
        assert_eq!(z_of_t(&z, [0.0; 3], 3.0).components(), z.components());
        let omega = [0.0, 0.0, 2.0];
        let full = z_of_t(&z, omega, std::f64::consts::PI); // one full turn
        for (a, b) in full.components().iter().zip(z.components()) {
            assert!((a - b).norm() <= 1e-9 * z.hermitian_norm_sqr().sqrt());
        }
        // z(t).z(t) = 1 for a skew axis, checked inside the constructor
        let omega = [0.7, -0.2, 0.4];
        for t in [0.0, 0.4, 2.9] {
            let zt = z_of_t(&z, omega, t);
            let sq: Complex64 = zt.components().iter().map(|c| c * c).sum();
            assert!((sq - Complex64::new(1.0, 0.0)).norm() <= 1e-12 * zt.hermitian_norm_sqr());
        }
    }

    #[test]
    fn rotation_keeps_the_state_coherent() {
        let z = standard_label(11);
        let (cfg, _) = adequate_config(&z).unwrap();
        let s = coherent_coefficients(&z, cfg).unwrap();
        let omega = [0.0, 0.0, 1.0];
        for t in [0.5, 2.0, 7.0, 12.0] {
            let st = rotation_evolve(&s, omega, t);
            let zt = z_of_t(&z, omega, t);
            let resid = crate::coherent::eigen_residual_of_state(&st, &zt);
            assert!(resid < 1e-8, "t={t}: residual {resid:.2e}");
        }
    }

    #[test]
    fn free_evolution_leaves_the_coherent_family() {
        let z = standard_label(11);
        let (cfg, _) = adequate_config(&z).unwrap();
        let s = coherent_coefficients(&z, cfg).unwrap();
        let st = free_evolve(&s, std::f64::consts::FRAC_PI_2);
        let defect = crate::coherent::coherence_defect(&st).unwrap();
        assert!(defect > 0.1, "defect {defect:.3}");
    }

    #[test]
    fn grid_weights_sum_to_4pi() {
        for (nt, np) in [(64, 128), (128, 256), (16, 16), (33, 64)] {
            let g = SphericalGrid::new(nt, np).unwrap();
            let total = g.total_weight();
            assert!(
                (total - 4.0 * std::f64::consts::PI).abs()
                    <= 1e-6 * 4.0 * std::f64::consts::PI,
                "{nt}x{np}: {total}"
            );
        }
        let g = SphericalGrid::new(64, 128).unwrap();
        assert_relative_eq!(g.total_weight(), 4.0 * std::f64::consts::PI, max_relative = 1e-13);
        // weights approach sin(theta) pi/n h_phi
        let approx_w = g.theta(10).sin() * std::f64::consts::PI / 64.0 * (TAU / 128.0);
        assert_relative_eq!(g.weight(10, 0), approx_w, max_relative = 1e-3);
    }

    #[test]
    fn density_normalizes_and_peaks_at_the_label() {
        let z = standard_label(11);
        let grid = SphericalGrid::new(64, 128).unwrap();
        let field = density_free(&z, &grid, 0.0);
        assert_relative_eq!(field.integral(), 1.0, max_relative = 1e-8);

        // max node adjacent to xbar = (1, 0, 0)
        let mut best = (0, 0, 0.0);
        for a in 0..64 {
            for b in 0..128 {
                if field.value(a, b) > best.2 {
                    best = (a, b, field.value(a, b));
                }
            }
        }
        let th = grid.theta(best.0);
        let ph = grid.phi(best.1);
        assert!((th - std::f64::consts::FRAC_PI_2).abs() < 0.1, "theta {th}");
        assert!(ph.min(TAU - ph) < 0.1, "phi {ph}");
    }

    #[test]
    fn density_is_2pi_periodic() {
        let z = standard_label(11);
        let grid = SphericalGrid::new(16, 32).unwrap();
        let t = 1.234;
        let a = density_free(&z, &grid, t);
        let b = density_free(&z, &grid, t + TAU);
        let dev = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "max deviation {dev:.2e}");
    }

    #[test]
    fn rotation_density_matches_free_at_t0_and_recurs() {
        let z = standard_label(11);
        let grid = SphericalGrid::new(16, 32).unwrap();
        let a = density_free(&z, &grid, 0.0);
        let b = density_rotation(&z, &grid, [0.0, 0.0, 1.0], 0.0);
        let dev = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-14);

        let c = density_rotation(&z, &grid, [0.0, 0.0, 1.0], TAU);
        let dev = a
            .values()
            .iter()
            .zip(c.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "max deviation {dev:.2e}");
    }

    #[test]
    fn density_agrees_with_wavefunction_at_t0() {
        let z = standard_label(11);
        let grid = SphericalGrid::new(16, 32).unwrap();
        let field = density_free(&z, &grid, 0.0);
        let nsq = crate::coherent::norm_sq_auto(&z);
        for (a, b) in [(3, 7), (8, 0), (12, 19)] {
            let f = wavefunction(&z, grid.unit_vector(a, b), 0.0);
            let expect = f.norm_sqr() / nsq;
            assert_relative_eq!(field.value(a, b), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn wavefunction_series_properties() {
        let z = standard_label(11);
        let x = [0.0, 0.6, 0.8];
        let f1 = wavefunction(&z, x, 0.9);
        let f2 = wavefunction(&z, x, 0.9 + TAU);
        assert!((f1 - f2).norm() <= 1e-13 * f1.norm());
    }

    #[test]
    fn rotation_series_is_circular_motion() {
        let z = standard_label(11);
        let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.05).collect();
        let h = Hamiltonian::Rotation([0.0, 0.0, 1.0]);
        let series = evolve_series(&z, &h, &times).unwrap();
        // theta constant
        let th0 = series.theta[0];
        for &th in &series.theta {
            assert!((th - th0).abs() < 1e-10);
        }
        // unwrapped phi has slope exactly omega3
        let slope = (series.phi_unwrapped.last().unwrap() - series.phi_unwrapped[0])
            / (times.last().unwrap() - times[0]);
        assert_relative_eq!(slope, 1.0, max_relative = 1e-10);
        // trajectory points on a fixed-latitude circle
        for p in trajectory_points(&series) {
            assert_relative_eq!(
                p[0] * p[0] + p[1] * p[1] + p[2] * p[2],
                1.0,
                max_relative = 1e-12
            );
            assert!((p[2] - series.theta[0].cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn theta_starts_near_the_classical_angle() {
        let z = standard_label(11);
        let th = theta_of_t(&z, 0.0, &Hamiltonian::Free).unwrap();
        assert!((th - std::f64::consts::FRAC_PI_2).abs() < 0.02, "theta(0) = {th}");
        let h = Hamiltonian::Rotation([0.0, 0.0, 1.0]);
        let t0 = theta_of_t(&z, 0.0, &h).unwrap();
        let t1 = theta_of_t(&z, 2.5, &h).unwrap();
        assert!((t0 - t1).abs() < 1e-10);
    }

    #[test]
    fn increasing_times_required() {
        let z = standard_label(10);
        let err = evolve_series(&z, &Hamiltonian::Free, &[0.0, 0.5, 0.5]);
        assert!(err.is_err());
    }

    #[test]
    fn phi_slope_positive_for_positive_l3() {
        let z = standard_label(11);
        let times: Vec<f64> = (0..80).map(|k| 0.002 * k as f64).collect();
        let series = evolve_series(&z, &Hamiltonian::Free, &times).unwrap();
        let slope = (series.phi_unwrapped[79] - series.phi_unwrapped[0]) / (times[79] - times[0]);
        assert!(slope > 5.0, "slope {slope}");
    }
}
