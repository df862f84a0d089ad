//! Batch orchestration: the tilt-to-Werner-p calibration pipeline that
//! links channeling output to the entanglement and tomography stages,
//! figure-data emission and the reproducibility manifest.

use crate::channeling::{simulate_beam, AngleSpec, BeamConfig, ChannelGeometry};
use crate::config::check_schema;
use crate::emit::{fmt_f64, write_csv, write_json};
use crate::entanglement::{
    concurrence, entanglement_of_formation, werner_projector_state, werner_state, WernerParams,
};
use crate::error::{Error, Result};
use crate::qmat::kron;
use crate::rng::{mix, Stream};
use crate::spin::{build_hamiltonian, evolve, reduced_density_matrix, SpinSystem};
use crate::state::{DensityMatrix, PureState};
use crate::tomography::{mc_fidelity, McWeighting, ProjectorSet};
use crate::SCHEMA_VERSION;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// (tilt fraction of psi_c, Werner p) calibration anchor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationAnchor {
    pub tilt_frac: f64,
    pub p: f64,
}

fn default_calibration() -> Vec<CalibrationAnchor> {
    vec![
        CalibrationAnchor {
            tilt_frac: 0.0,
            p: 0.71,
        },
        CalibrationAnchor {
            tilt_frac: 0.1,
            p: 0.71,
        },
        CalibrationAnchor {
            tilt_frac: 1.0,
            p: 0.0,
        },
    ]
}

fn default_tilts() -> Vec<f64> {
    vec![0.05, 0.1, 0.15, 0.2]
}

fn default_divergences() -> Vec<f64> {
    vec![0.0, 0.05, 0.1, 0.2]
}

fn default_b_fields() -> Vec<f64> {
    vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
}

fn default_evolve_time() -> f64 {
    5.0e-9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoStageParams {
    pub n_scale: f64,
    pub iterations: usize,
    /// Beam tilt feeding the tomography truth state.
    #[serde(default = "default_tomo_tilt")]
    pub tilt_frac: f64,
}

fn default_tomo_tilt() -> f64 {
    0.1
}

impl Default for TomoStageParams {
    fn default() -> Self {
        TomoStageParams {
            n_scale: 1000.0,
            iterations: 500,
            tilt_frac: default_tomo_tilt(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub schema: u32,
    #[serde(default)]
    pub geometry: ChannelGeometry,
    /// Template beam; tilt and divergence are overridden per grid point.
    #[serde(default)]
    pub beam: BeamConfig,
    #[serde(default)]
    pub spin: SpinSystem,
    #[serde(default = "default_calibration")]
    pub calibration: Vec<CalibrationAnchor>,
    #[serde(default = "default_tilts")]
    pub tilt_fracs: Vec<f64>,
    #[serde(default = "default_divergences")]
    pub divergence_fracs: Vec<f64>,
    #[serde(default = "default_b_fields")]
    pub b_field_tesla: Vec<f64>,
    #[serde(default = "default_evolve_time")]
    pub evolve_time_s: f64,
    /// Phase of the Werner entangled component.
    #[serde(default)]
    pub werner_phi: f64,
    #[serde(default)]
    pub tomography: TomoStageParams,
    #[serde(default)]
    pub master_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            schema: SCHEMA_VERSION,
            geometry: ChannelGeometry::default(),
            beam: BeamConfig::default(),
            spin: SpinSystem::default(),
            calibration: default_calibration(),
            tilt_fracs: default_tilts(),
            divergence_fracs: default_divergences(),
            b_field_tesla: default_b_fields(),
            evolve_time_s: default_evolve_time(),
            werner_phi: 0.0,
            tomography: TomoStageParams::default(),
            master_seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema)?;
        if self.calibration.is_empty() {
            return Err(Error::config("calibration must have at least one anchor"));
        }
        for pair in self.calibration.windows(2) {
            if pair[1].tilt_frac <= pair[0].tilt_frac {
                return Err(Error::config(
                    "calibration tilts must be strictly increasing",
                ));
            }
        }
        for anchor in &self.calibration {
            if !(0.0..=1.0).contains(&anchor.p) {
                return Err(Error::config("calibration p values must lie in [0,1]"));
            }
            if anchor.tilt_frac < 0.0 {
                return Err(Error::config("calibration tilts must be >= 0"));
            }
        }
        if self.tilt_fracs.is_empty() || self.divergence_fracs.is_empty() {
            return Err(Error::config("tilt and divergence grids must be nonempty"));
        }
        self.geometry.validate()?;
        self.beam.validate()?;
        self.spin.validate()?;
        if !(self.evolve_time_s >= 0.0) {
            return Err(Error::config("evolve_time_s must be >= 0"));
        }
        if self.tomography.n_scale < 1.0 || self.tomography.iterations == 0 {
            return Err(Error::config("tomography stage needs n_scale >= 1, iterations >= 1"));
        }
        Ok(())
    }
}

/// Piecewise-linear interpolation of the calibration anchors at `tilt_frac`
/// (clamped to the endpoint values outside the anchor range), scaled by
/// the channeled fraction and clamped to [0, 1].
pub fn map_tilt_to_p(
    tilt_frac: f64,
    calibration: &[CalibrationAnchor],
    channeled_fraction: f64,
) -> Result<f64> {
    if calibration.is_empty() {
        return Err(Error::config("empty calibration"));
    }
    if tilt_frac < 0.0 {
        return Err(Error::domain("tilt fraction must be >= 0"));
    }
    let interpolated = if tilt_frac <= calibration[0].tilt_frac {
        calibration[0].p
    } else if tilt_frac >= calibration[calibration.len() - 1].tilt_frac {
        calibration[calibration.len() - 1].p
    } else {
        let mut value = calibration[0].p;
        for pair in calibration.windows(2) {
            if tilt_frac >= pair[0].tilt_frac && tilt_frac <= pair[1].tilt_frac {
                let t = (tilt_frac - pair[0].tilt_frac) / (pair[1].tilt_frac - pair[0].tilt_frac);
                value = pair[0].p + t * (pair[1].p - pair[0].p);
                break;
            }
        }
        value
    };
    Ok((interpolated * channeled_fraction).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub name: String,
    pub outputs: Vec<String>,
    pub wall_ms: u128,
}

/// Reproducibility manifest emitted with every pipeline run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema: u32,
    pub artifact_version: String,
    /// SHA-256 of the canonicalized (key-sorted) config JSON.
    pub config_hash: String,
    pub master_seed: u64,
    pub stages: Vec<StageRecord>,
    pub total_wall_ms: u128,
}

/// SHA-256 over the canonical JSON form (serde_json sorts object keys),
/// so the hash is stable under key reordering in the source file.
pub fn config_hash(config: &PipelineConfig) -> Result<String> {
    let value = serde_json::to_value(config)?;
    let canonical = serde_json::to_string(&value)?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn figure_header(figure: &str) -> Result<&'static [&'static str]> {
    match figure {
        "fig5" => Ok(&["tilt_frac", "p", "row", "col", "value"]),
        "fig6_right" => Ok(&["delta_mrad", "tilt_frac", "concurrence"]),
        "fig7" => Ok(&["b_tesla", "tilt_frac", "eof"]),
        "fig9" => Ok(&["iteration", "fidelity"]),
        other => Err(Error::config(format!("unknown figure id '{other}'"))),
    }
}

/// Write one figure-data CSV with its fixed column schema.
pub fn emit_figure_data(figure: &str, rows: &[Vec<String>], out_dir: &Path) -> Result<PathBuf> {
    let header = figure_header(figure)?;
    let path = out_dir.join(format!("{figure}.csv"));
    write_csv(&path, header, rows)?;
    Ok(path)
}

/// Execute the full pipeline: beam sweeps over (tilt, divergence), the
/// calibrated Werner mapping, the field-dependent entanglement stage, the
/// Monte-Carlo tomography stage, and the manifest. Fully deterministic
/// for a fixed config + master seed.
pub fn run_pipeline(
    config: &PipelineConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<RunManifest> {
    match workers {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))?;
            pool.install(|| run_pipeline_inner(config, out_dir))
        }
        None => run_pipeline_inner(config, out_dir),
    }
}

fn run_pipeline_inner(config: &PipelineConfig, out_dir: &Path) -> Result<RunManifest> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let total_start = Instant::now();
    let mut stages = Vec::new();

    // Stage 1: channeling sweeps. The beam seed depends on the tilt only,
    // so divergence sweeps share entry positions and angle draws (common
    // random numbers keep the concurrence-vs-divergence curves smooth).
    let stage_start = Instant::now();
    let seed_channel = mix(config.master_seed, Stream::Generic, 1);
    let mut fig6_rows = Vec::new();
    let mut fig5_rows = Vec::new();
    let mut base_tilt_p = Vec::new();
    for (ti, &tilt) in config.tilt_fracs.iter().enumerate() {
        let beam_seed = mix(seed_channel, Stream::Generic, ti as u64);
        for (di, &delta) in config.divergence_fracs.iter().enumerate() {
            let beam = BeamConfig {
                tilt: AngleSpec::FracPsiC(tilt),
                divergence: AngleSpec::FracPsiC(delta),
                seed: beam_seed,
                ..config.beam.clone()
            };
            let result = simulate_beam(&beam, &config.geometry)?;
            let psi_c = result.summary.psi_c_rad;
            let p = map_tilt_to_p(tilt, &config.calibration, result.summary.channeled_fraction)?;
            let rho = werner_state(&WernerParams::new(p, config.werner_phi)?)?;
            let c = concurrence(&rho)?;
            fig6_rows.push(vec![
                fmt_f64(delta * psi_c * 1e3),
                fmt_f64(tilt),
                fmt_f64(c),
            ]);
            if di == 0 {
                base_tilt_p.push((tilt, p));
                for row in 0..4 {
                    for col in 0..4 {
                        fig5_rows.push(vec![
                            fmt_f64(tilt),
                            fmt_f64(p),
                            row.to_string(),
                            col.to_string(),
                            fmt_f64(rho.matrix()[(row, col)].re),
                        ]);
                    }
                }
            }
        }
    }
    let fig6_path = emit_figure_data("fig6_right", &fig6_rows, out_dir)?;
    let fig5_path = emit_figure_data("fig5", &fig5_rows, out_dir)?;
    stages.push(StageRecord {
        name: "channeling".into(),
        outputs: vec![file_name(&fig5_path), file_name(&fig6_path)],
        wall_ms: stage_start.elapsed().as_millis(),
    });

    // Stage 2: entanglement of formation vs static field. The electron
    // starts in (|up> + |down>)/sqrt(2) so the hyperfine coupling
    // entangles it with the nuclear pair; tracing it out leaves a
    // field-dependent mixed nuclear state.
    let stage_start = Instant::now();
    let mut fig7_rows = Vec::new();
    for &(tilt, p) in &base_tilt_p {
        let nuclear = werner_state(&WernerParams::new(p, config.werner_phi)?)?;
        let electron_plus = electron_plus_state()?;
        let rho0 = DensityMatrix::new(kron(electron_plus.projector().matrix(), nuclear.matrix()))?;
        for &b in &config.b_field_tesla {
            let sys = SpinSystem {
                b0_tesla: b,
                ..config.spin.clone()
            };
            let h = build_hamiltonian(&sys)?;
            let evolved = evolve(&rho0, &h, config.evolve_time_s)?;
            let nuclear_pair = reduced_density_matrix(&evolved, &[1, 2])?;
            let c = concurrence(&nuclear_pair)?;
            let eof = entanglement_of_formation(c)?;
            fig7_rows.push(vec![fmt_f64(b), fmt_f64(tilt), fmt_f64(eof)]);
        }
    }
    let fig7_path = emit_figure_data("fig7", &fig7_rows, out_dir)?;
    stages.push(StageRecord {
        name: "spin_dynamics".into(),
        outputs: vec![file_name(&fig7_path)],
        wall_ms: stage_start.elapsed().as_millis(),
    });

    // Stage 3: Monte-Carlo tomography fidelity against the entangled
    // target, using the Werner state calibrated at the tomography tilt.
    let stage_start = Instant::now();
    let tomo_tilt = config.tomography.tilt_frac;
    let beam = BeamConfig {
        tilt: AngleSpec::FracPsiC(tomo_tilt),
        divergence: AngleSpec::FracPsiC(config.divergence_fracs[0]),
        seed: mix(seed_channel, Stream::Generic, 9000),
        ..config.beam.clone()
    };
    let result = simulate_beam(&beam, &config.geometry)?;
    let p_tomo = map_tilt_to_p(
        tomo_tilt,
        &config.calibration,
        result.summary.channeled_fraction,
    )?;
    let truth = werner_state(&WernerParams::new(p_tomo, config.werner_phi)?)?;
    let target = werner_projector_state(config.werner_phi);
    let projectors = ProjectorSet::standard();
    let seed_tomo = mix(config.master_seed, Stream::Generic, 2);
    let stats = mc_fidelity(
        &truth,
        &target,
        &projectors,
        config.tomography.n_scale,
        config.tomography.iterations,
        seed_tomo,
        &McWeighting::Uniform,
        true,
    )?;
    let mut fig9_rows: Vec<Vec<String>> = stats
        .fidelities
        .as_ref()
        .expect("requested fidelity dump")
        .iter()
        .enumerate()
        .map(|(i, f)| vec![i.to_string(), fmt_f64(*f)])
        .collect();
    fig9_rows.push(vec!["mean".into(), fmt_f64(stats.mean)]);
    fig9_rows.push(vec!["std".into(), fmt_f64(stats.std)]);
    let fig9_path = emit_figure_data("fig9", &fig9_rows, out_dir)?;
    let summary_path = out_dir.join("tomography_summary.json");
    write_json(
        &summary_path,
        &serde_json::json!({
            "schema": SCHEMA_VERSION,
            "tilt_frac": tomo_tilt,
            "werner_p": p_tomo,
            "n_scale": config.tomography.n_scale,
            "iterations": stats.iterations,
            "mean_fidelity": stats.mean,
            "std_fidelity": stats.std,
        }),
    )?;
    stages.push(StageRecord {
        name: "tomography".into(),
        outputs: vec![file_name(&fig9_path), file_name(&summary_path)],
        wall_ms: stage_start.elapsed().as_millis(),
    });

    let manifest = RunManifest {
        schema: SCHEMA_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(config)?,
        master_seed: config.master_seed,
        stages,
        total_wall_ms: total_start.elapsed().as_millis(),
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn electron_plus_state() -> Result<PureState> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::from_slice(&[h, h])
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}
