//! Browser bindings: a cached simulation handle exposing the density field,
//! the beat series, and the spherical trajectory for interactive plotting.
//!
//! The heavy lifting stays in the core crate; this layer flattens results
//! into plain float buffers for JavaScript.  All fallible logic lives in
//! `imp` with string errors so it can run (and be tested) on native targets,
//! where constructing a `JsValue` would abort.

use rotor_core::coherent::{adequate_config, z_from_phase, ComplexDirection, PhasePoint};
use rotor_core::dynamics::{
    density_free, density_rotation, evolve_series_with_config, trajectory_points, Hamiltonian,
    SphericalGrid, TimeSeries,
};
use rotor_core::hilbert::RepresentationConfig;
use wasm_bindgen::prelude::*;

/// A coherent state of the standard family (l3 = j, |l| = sqrt(j(j+1)),
/// position on the equator at azimuth zero) with its truncation prepared
/// once, ready to answer interactive queries.
#[wasm_bindgen]
pub struct RotorSim {
    z: ComplexDirection,
    rep: RepresentationConfig,
}

#[wasm_bindgen]
impl RotorSim {
    #[wasm_bindgen(constructor)]
    pub fn new(j: u32) -> Result<RotorSim, JsValue> {
        imp::new(j).map_err(|e| JsValue::from_str(&e))
    }

    /// Truncation level selected for this state.
    pub fn j_max(&self) -> u32 {
        self.rep.j_max()
    }

    /// Probability density on an n_theta x n_phi grid at time t, flattened
    /// row-major (theta-major).  `rotating` selects H = omega3 J3 instead of
    /// the free Hamiltonian.
    pub fn density(
        &self,
        t: f64,
        n_theta: usize,
        n_phi: usize,
        rotating: bool,
        omega3: f64,
    ) -> Result<Vec<f64>, JsValue> {
        imp::density(self, t, n_theta, n_phi, rotating, omega3)
            .map_err(|e| JsValue::from_str(&e))
    }

    /// Observables of the evolution sampled uniformly on [t0, t1]:
    /// groups of four per sample, `[t, theta, phi, phi_unwrapped]`.
    pub fn beat_series(
        &self,
        t0: f64,
        t1: f64,
        samples: usize,
        rotating: bool,
        omega3: f64,
    ) -> Result<Vec<f64>, JsValue> {
        imp::beat_series(self, t0, t1, samples, rotating, omega3)
            .map_err(|e| JsValue::from_str(&e))
    }

    /// Spherical-angle trajectory sampled uniformly on [t0, t1]: triplets
    /// `[x, y, z]` per sample.
    pub fn trajectory(
        &self,
        t0: f64,
        t1: f64,
        samples: usize,
        rotating: bool,
        omega3: f64,
    ) -> Result<Vec<f64>, JsValue> {
        imp::trajectory(self, t0, t1, samples, rotating, omega3)
            .map_err(|e| JsValue::from_str(&e))
    }
}

mod imp {
    use super::*;

    pub fn new(j: u32) -> Result<RotorSim, String> {
        if j == 0 || j > 18 {
            return Err("j must be between 1 and 18".into());
        }
        let l3 = j as f64;
        let l_norm = (l3 * (l3 + 1.0)).sqrt();
        let alpha = (l3 / l_norm).acos();
        let p = PhasePoint::from_angles(std::f64::consts::FRAC_PI_2, 0.0, l_norm, alpha);
        let z = z_from_phase(&p);
        let (rep, _) = adequate_config(&z).map_err(|e| e.to_string())?;
        Ok(RotorSim { z, rep })
    }

    pub fn density(
        sim: &RotorSim,
        t: f64,
        n_theta: usize,
        n_phi: usize,
        rotating: bool,
        omega3: f64,
    ) -> Result<Vec<f64>, String> {
        let grid = SphericalGrid::new(n_theta, n_phi).map_err(|e| e.to_string())?;
        let field = if rotating {
            density_rotation(&sim.z, &grid, [0.0, 0.0, omega3], t)
        } else {
            density_free(&sim.z, &grid, t)
        };
        Ok(field.values().to_vec())
    }

    pub fn beat_series(
        sim: &RotorSim,
        t0: f64,
        t1: f64,
        samples: usize,
        rotating: bool,
        omega3: f64,
    ) -> Result<Vec<f64>, String> {
        let series = sample_series(sim, t0, t1, samples, rotating, omega3)?;
        let mut out = Vec::with_capacity(series.len() * 4);
        for i in 0..series.len() {
            out.push(series.times[i]);
            out.push(series.theta[i]);
            out.push(series.phi[i]);
            out.push(series.phi_unwrapped[i]);
        }
        Ok(out)
    }

    pub fn trajectory(
        sim: &RotorSim,
        t0: f64,
        t1: f64,
        samples: usize,
        rotating: bool,
        omega3: f64,
    ) -> Result<Vec<f64>, String> {
        let series = sample_series(sim, t0, t1, samples, rotating, omega3)?;
        let mut out = Vec::with_capacity(samples * 3);
        for p in trajectory_points(&series) {
            out.extend_from_slice(&p);
        }
        Ok(out)
    }

    fn sample_series(
        sim: &RotorSim,
        t0: f64,
        t1: f64,
        samples: usize,
        rotating: bool,
        omega3: f64,
    ) -> Result<TimeSeries, String> {
        if samples < 2 || t1 <= t0 {
            return Err("need samples >= 2 and t1 > t0".into());
        }
        let dt = (t1 - t0) / (samples as f64 - 1.0);
        let times: Vec<f64> = (0..samples).map(|k| t0 + k as f64 * dt).collect();
        let h = if rotating {
            Hamiltonian::Rotation([0.0, 0.0, omega3])
        } else {
            Hamiltonian::Free
        };
        evolve_series_with_config(&sim.z, &h, &times, sim.rep).map_err(|e| e.to_string())
    }
}
