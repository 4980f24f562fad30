use husimi::mvhermite::{MultiIndex, OverlapSpec, MAX_FC_INDEX};
use husimi::numerics::SpatialGrid;
use husimi::qdeform::{QParam, MAX_LADDER_N_MAX, MIN_LADDER_N_MAX};
use husimi::states::{Parity, MAX_ALPHA, MAX_N, MIN_N_MAX, MIN_ODD_ALPHA};
use husimi::trajectory::{FrequencyProfile, MAX_TOL, MIN_TOL};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// A state to build at the sample time. `alpha` is `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateRequest {
    Ground,
    Coherent {
        alpha: C64,
    },
    Number {
        n: usize,
    },
    Cat {
        parity: Parity,
        alpha: C64,
    },
    Qcoherent {
        alpha: C64,
        lambda: f64,
        #[serde(default = "default_fock_n_max")]
        n_max: usize,
    },
}

fn default_fock_n_max() -> usize {
    40
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    TrajectoryCsv,
    SqueezingCsv,
    WavefunctionCsv,
    StatesJson,
    QreportJson,
    OverlapJson,
    FranckCondonJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QDeformRequest {
    pub lambda: f64,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapRequest {
    pub spec: OverlapSpec,
    pub n: MultiIndex,
    pub m: MultiIndex,
}

/// Amplitudes `⟨Ψₙ(0)|Ψₘ(t)⟩` for `n, m ≤ n_max`, at `time` (default: the
/// scenario's sample time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FranckCondonRequest {
    pub n_max: usize,
    #[serde(default)]
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub profile: FrequencyProfile,
    pub t_end: f64,
    pub dt_out: f64,
    pub solver_tol: f64,
    #[serde(default)]
    pub states: Vec<StateRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<SpatialGrid>,
    /// Time at which states are built; defaults to `t_end`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qdeform: Option<QDeformRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<OverlapRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub franck_condon: Option<FranckCondonRequest>,
    pub outputs: Vec<OutputKind>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn check_alpha(field: &str, alpha: C64) -> CliResult<()> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) || alpha.norm() > MAX_ALPHA {
        return Err(schema(format!("{field}: |alpha| must be finite and at most {MAX_ALPHA}")));
    }
    Ok(())
}

impl Scenario {
    /// Strict parse followed by [`Scenario::validate`].
    pub fn from_json(text: &[u8]) -> CliResult<Self> {
        let scenario: Scenario = serde_json::from_slice(text).map_err(|e| schema(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn sample_time(&self) -> f64 {
        self.sample_time.unwrap_or(self.t_end)
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Bounds of every referenced parameter, checked before any computation.
    pub fn validate(&self) -> CliResult<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(schema(format!("t_end: must be finite and nonnegative, got {}", self.t_end)));
        }
        if !(self.dt_out.is_finite() && self.dt_out > 0.0) {
            return Err(schema(format!("dt_out: must be positive, got {}", self.dt_out)));
        }
        if !(MIN_TOL..=MAX_TOL).contains(&self.solver_tol) {
            return Err(schema(format!("solver_tol: must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {}", self.solver_tol)));
        }
        let ts = self.sample_time();
        if !(ts.is_finite() && (0.0..=self.t_end).contains(&ts)) {
            return Err(schema(format!("sample_time: must lie in [0, t_end], got {ts}")));
        }
        if self.outputs.is_empty() {
            return Err(schema("outputs: at least one artifact must be requested"));
        }
        for (i, s) in self.states.iter().enumerate() {
            let field = format!("states[{i}]");
            match s {
                StateRequest::Ground => {}
                StateRequest::Coherent { alpha } => check_alpha(&field, *alpha)?,
                StateRequest::Number { n } => {
                    if *n > MAX_N {
                        return Err(schema(format!("{field}.n: must not exceed {MAX_N}")));
                    }
                }
                StateRequest::Cat { parity, alpha } => {
                    check_alpha(&field, *alpha)?;
                    if *parity == Parity::Odd && alpha.norm() < MIN_ODD_ALPHA {
                        return Err(schema(format!("{field}.alpha: odd cat needs |alpha| ≥ {MIN_ODD_ALPHA}")));
                    }
                }
                StateRequest::Qcoherent { alpha, lambda, n_max } => {
                    check_alpha(&field, *alpha)?;
                    QParam::new(*lambda).map_err(|e| schema(format!("{field}.lambda: {e}")))?;
                    if !(MIN_N_MAX..=MAX_N).contains(n_max) {
                        return Err(schema(format!("{field}.n_max: must lie in [{MIN_N_MAX}, {MAX_N}]")));
                    }
                }
            }
        }
        if (self.wants(OutputKind::WavefunctionCsv) || self.wants(OutputKind::StatesJson)) && self.states.is_empty() {
            return Err(schema("states: state outputs requested but no states listed"));
        }
        match (&self.qdeform, self.wants(OutputKind::QreportJson)) {
            (None, true) => return Err(schema("qdeform: required by qreport_json")),
            (Some(q), _) => {
                QParam::new(q.lambda).map_err(|e| schema(format!("qdeform.lambda: {e}")))?;
                if !(MIN_LADDER_N_MAX..=MAX_LADDER_N_MAX).contains(&q.n_max) {
                    return Err(schema(format!("qdeform.n_max: must lie in [{MIN_LADDER_N_MAX}, {MAX_LADDER_N_MAX}]")));
                }
            }
            _ => {}
        }
        match (&self.overlap, self.wants(OutputKind::OverlapJson)) {
            (None, true) => return Err(schema("overlap: required by overlap_json")),
            (Some(o), _)
                if (o.n.dim() != o.spec.dim() || o.m.dim() != o.spec.dim()) => {
                    return Err(schema(format!("overlap.n/overlap.m: indices must have {} entries", o.spec.dim())));
                }
            _ => {}
        }
        match (&self.franck_condon, self.wants(OutputKind::FranckCondonJson)) {
            (None, true) => return Err(schema("franck_condon: required by franck_condon_json")),
            (Some(f), _) => {
                if f.n_max > MAX_FC_INDEX {
                    return Err(schema(format!("franck_condon.n_max: must not exceed {MAX_FC_INDEX}")));
                }
                if let Some(t) = f.time {
                    if !(t.is_finite() && t >= 0.0) {
                        return Err(schema("franck_condon.time: must be finite and nonnegative"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}
