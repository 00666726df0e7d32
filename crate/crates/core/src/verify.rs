//! Named invariant checks with measured residuals.
//!
//! Each check returns its measured value, the threshold it is held to, and
//! the comparison direction.  Randomized checks draw from fixed-seed
//! generators so that repeated runs produce identical reports.  The
//! thresholds encode the artifact's measured guarantees; in particular the
//! classical-label averages <J> ~ l and <X> ~ e^{-1/4} x carry a systematic
//! deviation of 1/(2(j+1)) resp. 1/(4|l|), so their bounds here are set just
//! above that law rather than at an aspirational value.

use crate::analysis::{
    classify_t_star_event, beat_envelope, find_critical_points, CriticalKind, TStarEvent,
};
use crate::coherent::{
    adequate_config, coherence_defect, coherent_coefficients, eigen_residual_of_state, expectation,
    norm_sq_auto, overlap_auto, rotation_oracle, z_from_phase, ComplexDirection, PhasePoint,
};
use crate::dynamics::{
    density_free, density_rotation, evolve_series, free_evolve, rotation_evolve, z_of_t,
    Hamiltonian, SphericalGrid,
};
use crate::error::Error;
use crate::hilbert::{
    apply_j3, apply_jpm, apply_x3, apply_xpm, inner_product, j_operator, x_operator, Axis,
    RepresentationConfig, Sign, StateVector,
};
use crate::specfun::{gegenbauer_c, legendre_p, GegenbauerSeq};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Direction of the pass test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    /// Pass when measured <= threshold.
    LessEq,
    /// Pass when measured >= threshold.
    GreaterEq,
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub cmp: Cmp,
    pub pass: bool,
}

fn check(name: &'static str, measured: f64, threshold: f64, cmp: Cmp) -> CheckOutcome {
    let pass = measured.is_finite()
        && match cmp {
            Cmp::LessEq => measured <= threshold,
            Cmp::GreaterEq => measured >= threshold,
        };
    CheckOutcome { name, measured, threshold, cmp, pass }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub theta_bar: f64,
    pub phi_bar: f64,
    pub l3: f64,
    pub l_norm: f64,
    /// Force a truncation level instead of the automatic choice.
    pub j_max_override: Option<u32>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            theta_bar: FRAC_PI_2,
            phi_bar: 0.0,
            l3: 11.0,
            l_norm: 132.0f64.sqrt(),
            j_max_override: None,
            seed: 0x5eed,
        }
    }
}

impl VerifyOptions {
    fn phase_point(&self) -> PhasePoint {
        let alpha = if self.l_norm > 0.0 { (self.l3 / self.l_norm).acos() } else { 0.0 };
        PhasePoint::from_angles(self.theta_bar, self.phi_bar, self.l_norm, alpha)
    }
}

fn standard_label(j: u32) -> ComplexDirection {
    let l3 = j as f64;
    let l_norm = (l3 * (l3 + 1.0)).sqrt();
    let alpha = (l3 / l_norm).acos();
    z_from_phase(&PhasePoint::from_angles(FRAC_PI_2, 0.0, l_norm, alpha))
}

fn random_phase_point(rng: &mut ChaCha8Rng, l_max: f64) -> PhasePoint {
    loop {
        let ct: f64 = rng.random_range(-1.0..1.0);
        let st = (1.0 - ct * ct).sqrt();
        let ph: f64 = rng.random_range(0.0..TAU);
        let xbar = [st * ph.cos(), st * ph.sin(), ct];
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let dot = v[0] * xbar[0] + v[1] * xbar[1] + v[2] * xbar[2];
        let tang = [v[0] - dot * xbar[0], v[1] - dot * xbar[1], v[2] - dot * xbar[2]];
        let tn = (tang[0] * tang[0] + tang[1] * tang[1] + tang[2] * tang[2]).sqrt();
        if tn < 1e-6 {
            continue;
        }
        let l_norm: f64 = rng.random_range(0.0..l_max);
        let l = [l_norm * tang[0] / tn, l_norm * tang[1] / tn, l_norm * tang[2] / tn];
        if let Ok(p) = PhasePoint::new(xbar, l) {
            return p;
        }
    }
}

/// Number of random phase points in the sampled coherent-state checks.
pub const PHASE_SAMPLE: usize = 20;
/// |l| ceiling of the sampled checks.
pub const PHASE_SAMPLE_L_MAX: f64 = 12.0;

/// Run every invariant check.  Checks are always run in the same order with
/// the same derived seeds, so the outcome list is deterministic.
pub fn run_suite(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.extend(specfun_checks(opts));
    out.extend(hilbert_checks(opts));
    out.extend(coherent_checks(opts));
    out.extend(dynamics_checks(opts));
    out.extend(phenomenology_checks(opts));
    out
}

fn specfun_checks(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x01);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        for n in 0..=30u32 {
            let p = legendre_p(n, w).collapse();
            let g = gegenbauer_c(n, 0.5, w).collapse();
            let scale = p.norm().max(1e-300);
            worst = worst.max((p - g).norm() / scale);
        }
    }
    let gegenbauer_vs_legendre = check("specfun_gegenbauer_matches_legendre", worst, 1e-12, Cmp::LessEq);

    // scaled evaluation at cosh(11): finite logs and recurrence-consistent ratios
    let w = Complex64::new(11.0f64.cosh(), 0.0);
    let alpha = 10.5;
    let vals: Vec<_> = GegenbauerSeq::new(alpha, w).take(61).collect();
    let mut ratio_dev: f64 = 0.0;
    let finite = vals.iter().all(|v| v.log_magnitude().is_finite());
    for n in 2..=60usize {
        let rn = (vals[n].log_magnitude() - vals[n - 1].log_magnitude()).exp()
            * Complex64::from_polar(1.0, vals[n].phase() - vals[n - 1].phase());
        let rm = (vals[n - 1].log_magnitude() - vals[n - 2].log_magnitude()).exp()
            * Complex64::from_polar(1.0, vals[n - 1].phase() - vals[n - 2].phase());
        let nf = n as f64;
        let implied = (2.0 * (nf + alpha - 1.0) * w - (nf + 2.0 * alpha - 2.0) / rm) / nf;
        ratio_dev = ratio_dev.max((rn - implied).norm() / implied.norm());
    }
    let measured = if finite { ratio_dev } else { f64::INFINITY };
    let overflow_safe = check("specfun_scaled_recurrence_at_cosh11", measured, 1e-10, Cmp::LessEq);

    vec![gegenbauer_vs_legendre, overflow_safe]
}

type OpFn = fn(&StateVector) -> StateVector;

fn commutator_residual(
    s: &StateVector,
    a: impl Fn(&StateVector) -> StateVector,
    b: impl Fn(&StateVector) -> StateVector,
    expect: Option<(Complex64, OpFn)>,
) -> f64 {
    let mut r = a(&b(s)).sub(&b(&a(s)));
    if let Some((factor, op)) = expect {
        r = r.add_scaled(&op(s), -factor);
    }
    r.norm() / s.norm()
}

fn hilbert_checks(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let cfg = RepresentationConfig::new(20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x02);

    let x: [OpFn; 3] = [
        |s| apply_xpm(s, Sign::Plus).add_scaled(&apply_xpm(s, Sign::Minus), Complex64::new(1.0, 0.0)).scaled(Complex64::new(0.5, 0.0)),
        |s| apply_xpm(s, Sign::Plus).sub(&apply_xpm(s, Sign::Minus)).scaled(Complex64::new(0.0, -0.5)),
        apply_x3,
    ];
    let j: [OpFn; 3] = [
        |s| apply_jpm(s, Sign::Plus).add_scaled(&apply_jpm(s, Sign::Minus), Complex64::new(1.0, 0.0)).scaled(Complex64::new(0.5, 0.0)),
        |s| apply_jpm(s, Sign::Plus).sub(&apply_jpm(s, Sign::Minus)).scaled(Complex64::new(0.0, -0.5)),
        apply_j3,
    ];
    let i = Complex64::new(0.0, 1.0);

    let mut herm: f64 = 0.0;
    let mut comm: f64 = 0.0;
    let mut casimir: f64 = 0.0;
    for _ in 0..50 {
        let s = StateVector::random_supported(cfg, cfg.j_max() - 2, &mut rng);
        let t = StateVector::random_supported(cfg, cfg.j_max() - 1, &mut rng);

        // hermiticity of X_i against a pair of states
        for xi in &x {
            let lhs = inner_product(&t, &xi(&s)).unwrap();
            let rhs = inner_product(&s, &xi(&t)).unwrap().conj();
            herm = herm.max((lhs - rhs).norm() / (t.norm() * s.norm()));
        }

        // [X_i, X_j] = 0
        for a in 0..3 {
            for b in (a + 1)..3 {
                comm = comm.max(commutator_residual(&s, x[a], x[b], None));
            }
        }
        // [J_i, J_j] = i eps_{ijk} J_k and [J_i, X_j] = i eps_{ijk} X_k
        for (a, b, c) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            comm = comm.max(commutator_residual(&s, j[a], j[b], Some((i, j[c]))));
            comm = comm.max(commutator_residual(&s, j[a], x[b], Some((i, x[c]))));
        }

        // X^2 = 1 and J.X = 0 in both orderings
        let xsq = x.iter().fold(StateVector::zero(cfg), |acc, xi| {
            acc.add_scaled(&xi(&xi(&s)), Complex64::new(1.0, 0.0))
        });
        casimir = casimir.max(xsq.sub(&s).norm() / s.norm());
        let jx = (0..3).fold(StateVector::zero(cfg), |acc, k| {
            acc.add_scaled(&j[k](&x[k](&s)), Complex64::new(1.0, 0.0))
        });
        let xj = (0..3).fold(StateVector::zero(cfg), |acc, k| {
            acc.add_scaled(&x[k](&j[k](&s)), Complex64::new(1.0, 0.0))
        });
        casimir = casimir.max(jx.norm() / s.norm()).max(xj.norm() / s.norm());
    }

    vec![
        check("hilbert_x_hermiticity", herm, 1e-13, Cmp::LessEq),
        check("hilbert_commutator_relations", comm, 1e-12, Cmp::LessEq),
        check("hilbert_casimir_relations", casimir, 1e-12, Cmp::LessEq),
    ]
}

fn coherent_checks(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x03);
    let mut sample: Vec<ComplexDirection> = Vec::with_capacity(PHASE_SAMPLE);
    for _ in 0..PHASE_SAMPLE {
        sample.push(z_from_phase(&random_phase_point(&mut rng, PHASE_SAMPLE_L_MAX)));
    }
    // the configured label is part of the sample so that a forced truncation
    // is exercised against it
    sample.push(z_from_phase(&opts.phase_point()));

    let config_for = |z: &ComplexDirection| -> Result<RepresentationConfig, Error> {
        match opts.j_max_override {
            Some(j) => RepresentationConfig::new(j),
            None => adequate_config(z).map(|(cfg, _)| cfg),
        }
    };

    let mut equivalence: f64 = 0.0;
    let mut eigen: f64 = 0.0;
    let mut overlap_dev: f64 = 0.0;
    let mut casimir_dev: f64 = 0.0;
    let mut failed = false;

    for z in &sample {
        let cfg = match config_for(z) {
            Ok(c) => c,
            Err(_) => {
                failed = true;
                continue;
            }
        };
        let state = match coherent_coefficients(z, cfg) {
            Ok(s) => s,
            Err(_) => {
                failed = true;
                continue;
            }
        };
        eigen = eigen.max(eigen_residual_of_state(&state, z));

        if let Ok(oracle) = rotation_oracle(z, cfg) {
            let ns = state.norm();
            let no = oracle.norm();
            for idx in cfg.basis_indices() {
                let a = state.coeff(idx.j, idx.m) / ns;
                let b = oracle.coeff(idx.j, idx.m) / no;
                if a.norm() > 1e-12 {
                    equivalence = equivalence.max((a - b).norm() / a.norm());
                }
            }
        } else {
            failed = true;
        }

        // Casimir expectations on the coherent state
        let xsq_mean: Complex64 = Axis::ALL
            .iter()
            .map(|&ax| {
                let op = x_operator(cfg, ax);
                inner_product(&state, &op.apply(&op.apply(&state))).unwrap()
            })
            .sum::<Complex64>()
            / state.norm_sqr();
        casimir_dev = casimir_dev.max((xsq_mean - Complex64::new(1.0, 0.0)).norm());
        let jx_mean: Complex64 = Axis::ALL
            .iter()
            .map(|&ax| {
                let xop = x_operator(cfg, ax);
                let jop = j_operator(cfg, ax);
                inner_product(&state, &jop.apply(&xop.apply(&state))).unwrap()
            })
            .sum::<Complex64>()
            / state.norm_sqr();
        casimir_dev = casimir_dev.max(jx_mean.norm());
    }

    // overlap consistency across consecutive sample pairs; pairs of distant
    // labels cancel to exponentially small overlaps, so the level at which
    // the two routes can agree in double precision is set by the state-norm
    // scale sqrt(<z|z><w|w>), not by the overlap value itself
    for pair in sample.windows(2) {
        let (z, w) = (&pair[0], &pair[1]);
        let cz = config_for(z);
        let cw = config_for(w);
        let (cz, cw) = match (cz, cw) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                failed = true;
                continue;
            }
        };
        let cfg = if cz.j_max() >= cw.j_max() { cz } else { cw };
        match (coherent_coefficients(z, cfg), coherent_coefficients(w, cfg)) {
            (Ok(sz), Ok(sw)) => {
                let series = overlap_auto(z, w);
                let coeffs = inner_product(&sz, &sw).unwrap();
                let scale = (sz.norm_sqr() * sw.norm_sqr()).sqrt();
                overlap_dev = overlap_dev.max((series - coeffs).norm() / scale);
                // the self overlap has no cancellation and must agree with
                // the coefficient norm to full relative accuracy
                overlap_dev = overlap_dev
                    .max((norm_sq_auto(z) - sz.norm_sqr()).abs() / sz.norm_sqr());
            }
            _ => failed = true,
        }
    }

    if failed {
        equivalence = f64::INFINITY;
        eigen = f64::INFINITY;
        overlap_dev = f64::INFINITY;
    }

    // measured deviation of the classical-label averages for the standard
    // family; the systematic law is |<J> - l|/|l| = 1/(2(j+1)) and
    // |<X> - e^{-1/4} x|/e^{-1/4} = 1/(4|l|), so the bounds sit just above
    // the j = 10 values
    let mut j_dev: f64 = 0.0;
    let mut x_dev: f64 = 0.0;
    for jq in 10..=14u32 {
        let l3 = jq as f64;
        let l_norm = (l3 * (l3 + 1.0)).sqrt();
        let alpha = (l3 / l_norm).acos();
        let p = PhasePoint::from_angles(FRAC_PI_2, 0.0, l_norm, alpha);
        let z = z_from_phase(&p);
        let (cfg, _) = adequate_config(&z).unwrap();
        let state = coherent_coefficients(&z, cfg).unwrap();
        let mut jm = [0.0; 3];
        let mut xm = [0.0; 3];
        for (k, ax) in Axis::ALL.into_iter().enumerate() {
            jm[k] = expectation(&j_operator(cfg, ax), &state).unwrap().re;
            xm[k] = expectation(&x_operator(cfg, ax), &state).unwrap().re;
        }
        let l = p.l();
        let dj = ((jm[0] - l[0]).powi(2) + (jm[1] - l[1]).powi(2) + (jm[2] - l[2]).powi(2)).sqrt();
        j_dev = j_dev.max(dj / l_norm);
        let e4 = (-0.25f64).exp();
        let xb = p.xbar();
        let dx = ((xm[0] - e4 * xb[0]).powi(2)
            + (xm[1] - e4 * xb[1]).powi(2)
            + (xm[2] - e4 * xb[2]).powi(2))
        .sqrt();
        x_dev = x_dev.max(dx / e4);
    }

    vec![
        check("coherent_construction_equivalence", equivalence, 1e-8, Cmp::LessEq),
        check("coherent_eigenrelation_residual", eigen, 1e-8, Cmp::LessEq),
        check("coherent_overlap_consistency", overlap_dev, 1e-9, Cmp::LessEq),
        check("coherent_casimir_expectations", casimir_dev, 1e-10, Cmp::LessEq),
        check("coherent_j_average_deviation", j_dev, 0.05, Cmp::LessEq),
        check("coherent_x_average_deviation", x_dev, 0.025, Cmp::LessEq),
    ]
}

fn dynamics_checks(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let cfg = RepresentationConfig::new(20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x04);

    // exact 2pi recurrence at the coefficient level
    let s = StateVector::random_supported(cfg, 20, &mut rng);
    let recur = if free_evolve(&s, TAU).coefficients() == s.coefficients() { 0.0 } else { 1.0 };

    // unitarity and the group law for both generators
    let mut unit_dev: f64 = 0.0;
    for t in [0.37, 2.11, 5.3] {
        unit_dev = unit_dev.max((free_evolve(&s, t).norm() - s.norm()).abs() / s.norm());
    }
    let a = free_evolve(&free_evolve(&s, 1.1), 0.7);
    unit_dev = unit_dev.max(a.sub(&free_evolve(&s, 1.8)).norm() / s.norm());
    let omega = [0.3, -0.4, 0.5];
    unit_dev = unit_dev.max((rotation_evolve(&s, omega, 1.3).norm() - s.norm()).abs() / s.norm());
    let a = rotation_evolve(&rotation_evolve(&s, omega, 0.6), omega, 0.7);
    unit_dev = unit_dev.max(a.sub(&rotation_evolve(&s, omega, 1.3)).norm() / s.norm());

    // rotational coherence stability along the standard label
    let z = standard_label(11);
    let (zcfg, _) = adequate_config(&z).unwrap();
    let state = coherent_coefficients(&z, zcfg).unwrap();
    let mut stability: f64 = 0.0;
    let omega3 = [0.0, 0.0, 1.0];
    for k in 1..=8 {
        let t = k as f64 * (4.0 * PI) / 8.0;
        let st = rotation_evolve(&state, omega3, t);
        stability = stability.max(eigen_residual_of_state(&st, &z_of_t(&z, omega3, t)));
    }
    // one tilted axis exercises the blockwise exponential
    let tilted = [0.4, 0.3, 0.8];
    let st = rotation_evolve(&state, tilted, 1.7);
    stability = stability.max(eigen_residual_of_state(&st, &z_of_t(&z, tilted, 1.7)));

    // free evolution leaves the coherent family
    let defect = coherence_defect(&free_evolve(&state, FRAC_PI_2)).unwrap();

    // grid weights and density normalization
    let grid = SphericalGrid::new(64, 128).unwrap();
    let wdev = (grid.total_weight() - 4.0 * PI).abs() / (4.0 * PI);
    let big = SphericalGrid::new(128, 256).unwrap();
    let ndev = (density_free(&z, &big, 0.0).integral() - 1.0).abs();

    // densities recur after a full period
    let mut free_periodicity: f64 = 0.0;
    for k in 0..3 {
        let t = 0.9 * k as f64 + 0.37;
        let a = density_free(&z, &grid, t);
        let b = density_free(&z, &grid, t + TAU);
        free_periodicity = free_periodicity.max(
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        );
    }
    let a = density_rotation(&z, &grid, omega3, 0.0);
    let b = density_rotation(&z, &grid, omega3, TAU);
    let rot_periodicity = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    vec![
        check("dynamics_free_2pi_recurrence", recur, 0.0, Cmp::LessEq),
        check("dynamics_unitarity_group_law", unit_dev, 1e-11, Cmp::LessEq),
        check("dynamics_rotation_coherence_stability", stability, 1e-8, Cmp::LessEq),
        check("dynamics_free_coherence_defect", defect, 0.1, Cmp::GreaterEq),
        check("dynamics_grid_weight_sum", wdev, 1e-6, Cmp::LessEq),
        check("dynamics_density_normalization", ndev, 1e-6, Cmp::LessEq),
        check("dynamics_free_density_periodicity", free_periodicity, 1e-10, Cmp::LessEq),
        check("dynamics_rotation_density_periodicity", rot_periodicity, 1e-10, Cmp::LessEq),
    ]
}

fn phenomenology_checks(_opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let times: Vec<f64> = (0..2000).map(|k| k as f64 * (8.0 * PI / 1999.0)).collect();

    // beats of the standard j = 11 state: first minima at pi and 3 pi
    let z11 = standard_label(11);
    let s11 = evolve_series(&z11, &Hamiltonian::Free, &times).unwrap();
    let report = beat_envelope(&s11, FRAC_PI_2).unwrap();
    let near = |target: f64| -> f64 {
        report
            .minima_times
            .iter()
            .map(|&t| (t - target).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let first_dev = near(PI);
    let second_dev = near(3.0 * PI);
    let period_dev = report
        .beat_period
        .map(|p| (p - TAU).abs() / TAU)
        .unwrap_or(f64::INFINITY);

    // pulse/oscillation alternation at t* = pi for j = 10, 11, 12
    let expected = [
        (10u32, TStarEvent::Oscillation),
        (11, TStarEvent::Pulse),
        (12, TStarEvent::Oscillation),
    ];
    let mut mismatches = 0.0;
    for (jq, want) in expected {
        let z = standard_label(jq);
        let series = if jq == 11 {
            s11.clone()
        } else {
            evolve_series(&z, &Hamiltonian::Free, &times).unwrap()
        };
        match classify_t_star_event(&series, PI, 1.2) {
            Ok(got) if got == want => {}
            _ => mismatches += 1.0,
        }
    }

    // rotational dynamics: constant theta, unit phi slope
    let h = Hamiltonian::Rotation([0.0, 0.0, 1.0]);
    let rot_times: Vec<f64> = (0..800).map(|k| k as f64 * (4.0 * PI / 799.0)).collect();
    let rs = evolve_series(&z11, &h, &rot_times).unwrap();
    let th0 = rs.theta[0];
    let theta_dev = rs.theta.iter().map(|t| (t - th0).abs()).fold(0.0, f64::max);
    let slope = (rs.phi_unwrapped.last().unwrap() - rs.phi_unwrapped[0])
        / (rot_times.last().unwrap() - rot_times[0]);
    let rot_dev = theta_dev.max((slope - 1.0).abs());

    // saddle phenomenology at t* and its absence under rotation
    let grid = SphericalGrid::new(64, 128).unwrap();
    let f_star = density_free(&z11, &grid, PI);
    let floor = 0.1 * f_star.max_value();
    let saddles = find_critical_points(&f_star)
        .into_iter()
        .filter(|p| p.kind == CriticalKind::Saddle && p.value > floor)
        .count() as f64;
    let f_rot = density_rotation(&z11, &grid, [0.0, 0.0, 1.0], 0.7);
    let floor = 0.1 * f_rot.max_value();
    let pts = find_critical_points(&f_rot);
    let rot_saddles = pts
        .iter()
        .filter(|p| p.kind == CriticalKind::Saddle && p.value > floor)
        .count() as f64;
    let rot_maxima = pts
        .iter()
        .filter(|p| p.kind == CriticalKind::Maximum && p.value > floor)
        .count() as f64;

    vec![
        check("beats_first_minimum_at_pi", first_dev, 0.05, Cmp::LessEq),
        check("beats_second_minimum_at_3pi", second_dev, 0.1, Cmp::LessEq),
        check("beats_period_relative_deviation", period_dev, 0.02, Cmp::LessEq),
        check("t_star_alternation_mismatches", mismatches, 0.0, Cmp::LessEq),
        check("rotation_circular_motion_deviation", rot_dev, 1e-10, Cmp::LessEq),
        check("saddle_count_free_at_t_star", saddles, 1.0, Cmp::GreaterEq),
        check("saddle_count_rotation", rot_saddles, 0.0, Cmp::LessEq),
        check("maximum_count_rotation", rot_maxima, 1.0, Cmp::GreaterEq),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let outcomes = run_suite(&VerifyOptions::default());
        for o in &outcomes {
            assert!(
                o.pass,
                "{}: measured {:.3e} vs threshold {:.3e}",
                o.name, o.measured, o.threshold
            );
        }
    }

    #[test]
    fn forced_tiny_truncation_fails_the_eigenrelation() {
        let opts = VerifyOptions { j_max_override: Some(3), ..Default::default() };
        let outcomes = run_suite(&opts);
        let eigen = outcomes
            .iter()
            .find(|o| o.name == "coherent_eigenrelation_residual")
            .unwrap();
        assert!(!eigen.pass);
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_suite(&VerifyOptions::default());
        let b = run_suite(&VerifyOptions::default());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.measured.to_bits(), y.measured.to_bits());
            assert_eq!(x.pass, y.pass);
        }
    }
}
