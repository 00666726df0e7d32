//! The four run modes: evolve, density, trajectory, verify.

use crate::config::{HamiltonianKind, Mode, OutputFormat, RunConfig};
use crate::output::{fmt_f64, json_array, write_text, JsonObject, TableWriter};
use rotor_core::analysis::{cluster_critical_points, find_critical_points, CriticalKind};
use rotor_core::coherent::{
    adequate_config, coherent_coefficients, top_shell_mass, z_from_phase, ComplexDirection,
    PhasePoint,
};
use rotor_core::dynamics::{
    density_free, density_rotation, evolve_series_with_config, trajectory_points, DensityField,
    Hamiltonian, SphericalGrid, TimeSeries,
};
use rotor_core::hilbert::RepresentationConfig;
use rotor_core::verify::{run_suite, Cmp, VerifyOptions};
use rotor_core::Error as CoreError;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum RunError {
    Numerical(String),
    Verification,
    Io(std::io::Error),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
            RunError::Verification => write!(f, "verification failed"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), RunError> {
    match cfg.mode {
        Mode::Evolve => cmd_evolve(cfg),
        Mode::Density => cmd_density(cfg),
        Mode::Trajectory => cmd_trajectory(cfg),
        Mode::Verify => cmd_verify(cfg),
    }
}

struct Prepared {
    z: ComplexDirection,
    rep: RepresentationConfig,
    tail_mass: f64,
    hamiltonian: Hamiltonian,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared, RunError> {
    let phase = PhasePoint::from_angles(cfg.theta_bar, cfg.phi_bar, cfg.l_norm, cfg.alpha());
    let z = z_from_phase(&phase);
    let (rep, tail_mass) = match cfg.j_max {
        Some(j) => {
            let rep = RepresentationConfig::new(j)?;
            let state = coherent_coefficients(&z, rep)?;
            (rep, top_shell_mass(&state))
        }
        None => adequate_config(&z)?,
    };
    let hamiltonian = match cfg.hamiltonian {
        HamiltonianKind::Free => Hamiltonian::Free,
        HamiltonianKind::Rotation => Hamiltonian::Rotation([0.0, 0.0, cfg.omega3]),
    };
    Ok(Prepared { z, rep, tail_mass, hamiltonian })
}

fn config_sidecar(cfg: &RunConfig, prepared: &Prepared, extra: JsonObject) -> String {
    let config_json = serde_json::to_string(cfg).expect("config serializes");
    extra
        .field_raw("config", &config_json)
        .field_u64("j_max_selected", prepared.rep.j_max() as u64)
        .field_f64("tail_mass", prepared.tail_mass)
        .field_str("version", env!("CARGO_PKG_VERSION"))
        .finish()
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

const EVOLVE_HEADER: [&str; 11] = [
    "t",
    "theta",
    "phi",
    "phi_unwrapped",
    "x3_mean",
    "xplus_re",
    "xplus_im",
    "j1_mean",
    "j2_mean",
    "j3_mean",
    "clamped",
];

fn evolve_rows(series: &TimeSeries) -> Vec<Vec<String>> {
    (0..series.len())
        .map(|i| {
            vec![
                fmt_f64(series.times[i]),
                fmt_f64(series.theta[i]),
                fmt_f64(series.phi[i]),
                fmt_f64(series.phi_unwrapped[i]),
                fmt_f64(series.x3_mean[i]),
                fmt_f64(series.xplus_mean[i].re),
                fmt_f64(series.xplus_mean[i].im),
                fmt_f64(series.j_mean[i][0]),
                fmt_f64(series.j_mean[i][1]),
                fmt_f64(series.j_mean[i][2]),
                if series.clamped[i] { "1".into() } else { "0".into() },
            ]
        })
        .collect()
}

fn write_table(path: &Path, format: OutputFormat, header: &[&str], rows: &[Vec<String>]) -> Result<(), RunError> {
    match format {
        OutputFormat::Csv => {
            let mut w = TableWriter::create(path, header)?;
            for row in rows {
                w.row(row)?;
            }
            w.finish()?;
        }
        OutputFormat::Json => {
            let cols = json_array(header.iter().map(|h| format!("\"{h}\"")));
            let data = json_array(rows.iter().map(|row| json_array(row.iter().cloned())));
            let text = JsonObject::new()
                .field_raw("columns", &cols)
                .field_raw("rows", &data)
                .finish();
            write_text(path, &text)?;
        }
    }
    Ok(())
}

fn cmd_evolve(cfg: &RunConfig) -> Result<(), RunError> {
    let prepared = prepare(cfg)?;
    let series = evolve_series_with_config(&prepared.z, &prepared.hamiltonian, &cfg.times(), prepared.rep)?;
    write_table(&cfg.out, cfg.format, &EVOLVE_HEADER, &evolve_rows(&series))?;
    let sidecar = config_sidecar(
        cfg,
        &prepared,
        JsonObject::new().field_u64("clamp_count", series.clamp_count as u64),
    );
    write_text(&sidecar_path(&cfg.out), &sidecar)?;
    Ok(())
}

fn density_at(prepared: &Prepared, grid: &SphericalGrid, omega3: f64, t: f64) -> DensityField {
    match prepared.hamiltonian {
        Hamiltonian::Free => density_free(&prepared.z, grid, t),
        Hamiltonian::Rotation(_) => density_rotation(&prepared.z, grid, [0.0, 0.0, omega3], t),
    }
}

fn indexed_path(out: &Path, k: usize, many: bool) -> PathBuf {
    if !many {
        return out.to_path_buf();
    }
    let stem = out.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    let ext = out
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.t{k:03}{ext}"))
}

fn critical_point_json(field: &DensityField) -> String {
    let points = cluster_critical_points(
        &find_critical_points(field),
        field.grid().n_phi(),
        2,
    );
    json_array(points.iter().map(|p| {
        let kind = match p.kind {
            CriticalKind::Maximum => "maximum",
            CriticalKind::Minimum => "minimum",
            CriticalKind::Saddle => "saddle",
        };
        JsonObject::new()
            .field_str("kind", kind)
            .field_u64("theta_index", p.theta_index as u64)
            .field_u64("phi_index", p.phi_index as u64)
            .field_f64("theta", p.theta)
            .field_f64("phi", p.phi)
            .field_f64("value", p.value)
            .finish()
    }))
}

fn cmd_density(cfg: &RunConfig) -> Result<(), RunError> {
    let prepared = prepare(cfg)?;
    let grid = SphericalGrid::new(cfg.grid[0], cfg.grid[1])?;
    let times = cfg.times();
    let many = times.len() > 1;

    let mut file_entries = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let field = density_at(&prepared, &grid, cfg.omega3, t);
        let path = indexed_path(&cfg.out, k, many);
        let mut rows = Vec::with_capacity(grid.n_nodes());
        for a in 0..grid.n_theta() {
            for b in 0..grid.n_phi() {
                rows.push(vec![
                    fmt_f64(grid.theta(a)),
                    fmt_f64(grid.phi(b)),
                    fmt_f64(field.value(a, b)),
                ]);
            }
        }
        write_table(&path, cfg.format, &["theta", "phi", "p"], &rows)?;
        let entry = JsonObject::new()
            .field_str("file", &path.to_string_lossy())
            .field_f64("time", t)
            .field_f64("integral", field.integral())
            .field_raw("critical_points", &critical_point_json(&field))
            .finish();
        file_entries.push(entry);
    }

    let sidecar = config_sidecar(
        cfg,
        &prepared,
        JsonObject::new().field_raw("fields", &json_array(file_entries)),
    );
    write_text(&sidecar_path(&cfg.out), &sidecar)?;
    Ok(())
}

fn cmd_trajectory(cfg: &RunConfig) -> Result<(), RunError> {
    let prepared = prepare(cfg)?;
    let times = cfg.times();
    let series = match evolve_series_with_config(&prepared.z, &prepared.hamiltonian, &times, prepared.rep) {
        Ok(s) => s,
        Err(CoreError::UndefinedPhase(_)) => {
            // collect every offending time for the report
            let bad = undefined_phase_times(&prepared, &times);
            return Err(RunError::Numerical(format!(
                "phase of <X+> undefined at t = [{}]",
                bad.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
        Err(e) => return Err(e.into()),
    };
    let points = trajectory_points(&series);
    let rows: Vec<Vec<String>> = times
        .iter()
        .zip(&points)
        .map(|(&t, p)| vec![fmt_f64(t), fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2])])
        .collect();
    write_table(&cfg.out, cfg.format, &["t", "x", "y", "z"], &rows)?;
    let sidecar = config_sidecar(cfg, &prepared, JsonObject::new());
    write_text(&sidecar_path(&cfg.out), &sidecar)?;
    Ok(())
}

fn undefined_phase_times(prepared: &Prepared, times: &[f64]) -> Vec<f64> {
    let mut bad = Vec::new();
    for &t in times {
        let single = evolve_series_with_config(&prepared.z, &prepared.hamiltonian, &[t], prepared.rep);
        if matches!(single, Err(CoreError::UndefinedPhase(_))) {
            bad.push(t);
        }
    }
    bad
}

fn cmd_verify(cfg: &RunConfig) -> Result<(), RunError> {
    let opts = VerifyOptions {
        theta_bar: cfg.theta_bar,
        phi_bar: cfg.phi_bar,
        l3: cfg.l3,
        l_norm: cfg.l_norm,
        j_max_override: cfg.j_max,
        ..Default::default()
    };
    let outcomes = run_suite(&opts);
    let all_pass = outcomes.iter().all(|o| o.pass);

    let checks = json_array(outcomes.iter().map(|o| {
        JsonObject::new()
            .field_str("name", o.name)
            .field_f64("measured", o.measured)
            .field_f64("threshold", o.threshold)
            .field_str("comparison", if o.cmp == Cmp::LessEq { "<=" } else { ">=" })
            .field_bool("pass", o.pass)
            .finish()
    }));
    let config_json = serde_json::to_string(cfg).expect("config serializes");
    let report = JsonObject::new()
        .field_raw("config", &config_json)
        .field_raw("checks", &checks)
        .field_bool("all_pass", all_pass)
        .field_str("version", env!("CARGO_PKG_VERSION"))
        .finish();

    println!("{report}");
    write_text(&cfg.out, &report)?;
    if all_pass { Ok(()) } else { Err(RunError::Verification) }
}
