use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use husimi::mvhermite::{
    discrepancy_row, evaluate_overlap, franck_condon, grid_for_franck_condon, FranckCondon, OverlapEvaluation,
};
use husimi::numerics::SpatialGrid;
use husimi::qdeform::{qcoherent_coeffs, qreport, QParam, QReport};
use husimi::states::{
    analytic_moments, analytic_moments_coherent, cat_state, coherent_state, eigen_residual, eigen_residual_sq,
    fock_synthesize, grid_for_cat, grid_for_coherent, grid_for_fock, grid_for_ground, grid_for_number, ground_state,
    moments, number_expectation, number_state, refine_min_sigma_x, squeezing_series, write_squeezing_csv,
    MomentSummary, StateLabel, WaveFunction, NORM_TOL, SQUEEZE_THRESHOLD,
};
use husimi::trajectory::{solve_epsilon, solve_epsilon_at, wronskian_residual, EpsilonTrajectory, TrajectorySample};
use num_complex::Complex64 as C64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::scenario::{OutputKind, Scenario, StateRequest};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sidecar written next to every artifact as `<name>.meta.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool_version: String,
    pub scenario_sha256: String,
    pub artifact: String,
    pub tolerances: BTreeMap<String, f64>,
    pub timings_ms: BTreeMap<String, f64>,
}

/// Headline numbers printed after a run and stored in `summary.json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_wronskian_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_sigma_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined_min_sigma_x: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qcommutator_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_rel_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub franck_condon_max_abs_diff: Option<f64>,
}

struct Artifact {
    name: String,
    body: Vec<u8>,
    stage: &'static str,
    tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
struct StateReport {
    index: usize,
    label: String,
    t: f64,
    grid: SpatialGrid,
    norm: f64,
    grid_moments: MomentSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_moments: Option<MomentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigen_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    number_expectation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct OverlapArtifact {
    #[serde(flatten)]
    evaluation: OverlapEvaluation,
    convention: &'static str,
    printed_value: Option<f64>,
    printed_rel_err: Option<f64>,
    printed_failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct FranckCondonArtifact {
    t: f64,
    n_max: usize,
    max_abs_diff: f64,
    amplitudes: Vec<FranckCondon>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("artifact types serialize");
    out.push(b'\n');
    out
}

fn tol_map(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Parses, validates and runs the scenario file.
pub fn run_scenario_file(path: &Path, out_dir: &Path) -> CliResult<RunSummary> {
    let bytes = fs::read(path).map_err(CliError::io(path.display().to_string()))?;
    let scenario = Scenario::from_json(&bytes)?;
    run_scenario(&scenario, &sha256_hex(&bytes), out_dir)
}

/// Runs an in-memory scenario, hashing its canonical JSON form.
pub fn run_canonical(scenario: &Scenario, out_dir: &Path) -> CliResult<RunSummary> {
    scenario.validate()?;
    let bytes = serde_json::to_vec(scenario).expect("scenario serializes");
    run_scenario(scenario, &sha256_hex(&bytes), out_dir)
}

pub fn run_scenario(scenario: &Scenario, scenario_sha256: &str, out_dir: &Path) -> CliResult<RunSummary> {
    let mut artifacts: Vec<Artifact> = Vec::new();
    let mut timings: BTreeMap<String, f64> = BTreeMap::new();
    let mut summary = RunSummary::default();
    let tol = scenario.solver_tol;

    if scenario.wants(OutputKind::TrajectoryCsv) || scenario.wants(OutputKind::SqueezingCsv) {
        let start = Instant::now();
        let traj = solve_epsilon(&scenario.profile, scenario.t_end, scenario.dt_out, tol)
            .map_err(CliError::numerical("trajectory"))?;
        timings.insert("trajectory".into(), elapsed_ms(start));
        summary.max_wronskian_residual = Some(wronskian_residual(&traj));
        if scenario.wants(OutputKind::TrajectoryCsv) {
            let mut body = Vec::new();
            traj.write_csv(&mut body).expect("writing to memory");
            artifacts.push(Artifact {
                name: "trajectory.csv".into(),
                body,
                stage: "trajectory",
                tolerances: tol_map(&[("solver_tol", tol)]),
            });
        }
        if scenario.wants(OutputKind::SqueezingCsv) {
            let start = Instant::now();
            squeezing(scenario, &traj, &mut artifacts, &mut summary)?;
            timings.insert("squeezing".into(), elapsed_ms(start));
        }
    }

    if scenario.wants(OutputKind::WavefunctionCsv) || scenario.wants(OutputKind::StatesJson) {
        let start = Instant::now();
        states(scenario, &mut artifacts)?;
        timings.insert("states".into(), elapsed_ms(start));
    }

    if let (Some(req), true) = (&scenario.qdeform, scenario.wants(OutputKind::QreportJson)) {
        let start = Instant::now();
        let q = QParam::new(req.lambda).map_err(CliError::numerical("qdeform"))?;
        let report: QReport = qreport(req.n_max, q).map_err(CliError::numerical("qdeform"))?;
        summary.qcommutator_residual = Some(report.qcommutator_residual);
        artifacts.push(Artifact {
            name: "qreport.json".into(),
            body: json_bytes(&report),
            stage: "qdeform",
            tolerances: tol_map(&[("qcommutator_residual", 1e-10)]),
        });
        timings.insert("qdeform".into(), elapsed_ms(start));
    }

    if let (Some(req), true) = (&scenario.overlap, scenario.wants(OutputKind::OverlapJson)) {
        let start = Instant::now();
        let evaluation = evaluate_overlap(&req.spec, &req.n, &req.m).map_err(CliError::numerical("overlap"))?;
        let row = discrepancy_row(&req.spec, &req.n, &req.m).map_err(CliError::numerical("overlap"))?;
        summary.overlap_rel_err = Some(evaluation.rel_err);
        let artifact = OverlapArtifact {
            evaluation,
            convention: "resolved",
            printed_value: row.printed,
            printed_rel_err: row.printed_rel_err,
            printed_failure: row.printed_failure,
        };
        artifacts.push(Artifact {
            name: "overlap.json".into(),
            body: json_bytes(&artifact),
            stage: "overlap",
            tolerances: tol_map(&[("rel_err", 1e-6)]),
        });
        timings.insert("overlap".into(), elapsed_ms(start));
    }

    if let (Some(req), true) = (&scenario.franck_condon, scenario.wants(OutputKind::FranckCondonJson)) {
        let start = Instant::now();
        let t = req.time.unwrap_or(scenario.sample_time());
        let sample = sample_at(scenario, t, "franck_condon")?;
        let mut amplitudes = Vec::new();
        for n in 0..=req.n_max {
            for m in 0..=req.n_max {
                let grid = grid_for_franck_condon(n, m, &sample).map_err(CliError::numerical("franck_condon"))?;
                amplitudes.push(franck_condon(n, m, &sample, &grid).map_err(CliError::numerical("franck_condon"))?);
            }
        }
        let max_abs_diff = amplitudes.iter().map(|a| a.abs_diff.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
        summary.franck_condon_max_abs_diff = Some(max_abs_diff);
        artifacts.push(Artifact {
            name: "franck_condon.json".into(),
            body: json_bytes(&FranckCondonArtifact { t, n_max: req.n_max, max_abs_diff, amplitudes }),
            stage: "franck_condon",
            tolerances: tol_map(&[("solver_tol", tol), ("abs_diff", 1e-6)]),
        });
        timings.insert("franck_condon".into(), elapsed_ms(start));
    }

    summary.artifacts = artifacts.iter().map(|a| a.name.clone()).collect();
    write_all(out_dir, scenario_sha256, &artifacts, &timings, &summary)?;
    Ok(summary)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn sample_at(scenario: &Scenario, t: f64, stage: &str) -> CliResult<TrajectorySample> {
    let traj = solve_epsilon_at(&scenario.profile, &[t], scenario.solver_tol).map_err(CliError::numerical(stage))?;
    Ok(traj.sample(0))
}

fn squeezing(
    scenario: &Scenario,
    traj: &EpsilonTrajectory,
    artifacts: &mut Vec<Artifact>,
    summary: &mut RunSummary,
) -> CliResult<()> {
    let series = squeezing_series(traj);
    summary.min_sigma_x = series.iter().map(|p| p.sigma_x).reduce(f64::min);
    summary.refined_min_sigma_x =
        Some(refine_min_sigma_x(&scenario.profile, traj, scenario.solver_tol).map_err(CliError::numerical("squeezing"))?);
    let mut body = Vec::new();
    write_squeezing_csv(&series, &mut body).expect("writing to memory");
    artifacts.push(Artifact {
        name: "squeezing.csv".into(),
        body,
        stage: "squeezing",
        tolerances: tol_map(&[("solver_tol", scenario.solver_tol), ("squeeze_threshold", SQUEEZE_THRESHOLD)]),
    });
    Ok(())
}

fn build_state(req: &StateRequest, sample: &TrajectorySample, grid: Option<&SpatialGrid>) -> husimi::Result<WaveFunction> {
    let pick = |auto: husimi::Result<SpatialGrid>| -> husimi::Result<SpatialGrid> { grid.copied().map_or(auto, Ok) };
    match req {
        StateRequest::Ground => ground_state(sample, &pick(grid_for_ground(sample))?),
        StateRequest::Coherent { alpha } => coherent_state(*alpha, sample, &pick(grid_for_coherent(*alpha, sample))?),
        StateRequest::Number { n } => number_state(*n, sample, &pick(grid_for_number(*n, sample))?),
        StateRequest::Cat { parity, alpha } => cat_state(*parity, *alpha, sample, &pick(grid_for_cat(*alpha, sample))?),
        StateRequest::Qcoherent { alpha, lambda, n_max } => {
            let coeffs = qcoherent_coeffs(*alpha, QParam::new(*lambda)?, *n_max)?;
            let wf = fock_synthesize(&coeffs, sample, &pick(grid_for_fock(&coeffs, sample))?)?;
            WaveFunction::new(wf.as_grid_function().clone(), *sample, StateLabel::QCoherent { alpha: *alpha, lambda: *lambda })
        }
    }
}

fn state_report(index: usize, req: &StateRequest, wf: &WaveFunction) -> husimi::Result<StateReport> {
    let sample = wf.sample;
    let (analytic, eigen, number) = match req {
        StateRequest::Ground => (Some(analytic_moments(&sample)), Some(eigen_residual(wf, C64::new(0.0, 0.0))?), None),
        StateRequest::Coherent { alpha } => {
            (Some(analytic_moments_coherent(*alpha, &sample)), Some(eigen_residual(wf, *alpha)?), None)
        }
        StateRequest::Number { .. } => (None, None, Some(number_expectation(wf)?)),
        StateRequest::Cat { alpha, .. } => (None, Some(eigen_residual_sq(wf, *alpha)?), None),
        StateRequest::Qcoherent { .. } => (None, None, None),
    };
    Ok(StateReport {
        index,
        label: wf.label.to_string(),
        t: sample.t,
        grid: *wf.grid(),
        norm: wf.norm_sq().sqrt(),
        grid_moments: moments(wf)?,
        analytic_moments: analytic,
        eigen_residual: eigen,
        number_expectation: number,
    })
}

fn states(scenario: &Scenario, artifacts: &mut Vec<Artifact>) -> CliResult<()> {
    let sample = sample_at(scenario, scenario.sample_time(), "states")?;
    let mut reports = Vec::new();
    for (i, req) in scenario.states.iter().enumerate() {
        let stage = format!("states[{i}]");
        let wf = build_state(req, &sample, scenario.grid.as_ref()).map_err(CliError::numerical(stage.clone()))?;
        if scenario.wants(OutputKind::WavefunctionCsv) {
            let mut body = Vec::new();
            wf.write_csv(&mut body).expect("writing to memory");
            artifacts.push(Artifact {
                name: format!("wavefunction_{i}_{}.csv", wf.label),
                body,
                stage: "states",
                tolerances: tol_map(&[("solver_tol", scenario.solver_tol), ("norm_tol", NORM_TOL)]),
            });
        }
        if scenario.wants(OutputKind::StatesJson) {
            reports.push(state_report(i, req, &wf).map_err(CliError::numerical(stage))?);
        }
    }
    if scenario.wants(OutputKind::StatesJson) {
        artifacts.push(Artifact {
            name: "states.json".into(),
            body: json_bytes(&reports),
            stage: "states",
            tolerances: tol_map(&[("solver_tol", scenario.solver_tol), ("norm_tol", NORM_TOL)]),
        });
    }
    Ok(())
}

fn write_file(path: PathBuf, body: &[u8]) -> CliResult<()> {
    fs::write(&path, body).map_err(CliError::io(path.display().to_string()))
}

fn write_all(
    out_dir: &Path,
    scenario_sha256: &str,
    artifacts: &[Artifact],
    timings: &BTreeMap<String, f64>,
    summary: &RunSummary,
) -> CliResult<()> {
    fs::create_dir_all(out_dir).map_err(CliError::io(out_dir.display().to_string()))?;
    for a in artifacts {
        write_file(out_dir.join(&a.name), &a.body)?;
        let meta = Metadata {
            tool_version: TOOL_VERSION.into(),
            scenario_sha256: scenario_sha256.into(),
            artifact: a.name.clone(),
            tolerances: a.tolerances.clone(),
            timings_ms: timings.iter().filter(|(k, _)| k.as_str() == a.stage).map(|(k, v)| (k.clone(), *v)).collect(),
        };
        write_file(out_dir.join(format!("{}.meta.json", a.name)), &json_bytes(&meta))?;
    }
    write_file(out_dir.join("summary.json"), &json_bytes(summary))
}
