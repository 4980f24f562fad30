use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time dependence of the oscillator frequency, `ω²(t)`.
///
/// Every profile except `Free` must satisfy `ω(0) = 1`; `Modulated`
/// follows `ω²(t) = 1 + κ cos νt` verbatim and so has `ω²(0) = 1 + κ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub enum FrequencyProfile {
    Constant { omega0: f64 },
    Free,
    /// `ω = 1` for `t < t_switch`, `ω = omega1` afterwards.
    Step { omega1: f64, t_switch: f64 },
    Modulated { kappa: f64, nu: f64 },
    /// Piecewise-linear `ω²` through the given nodes.
    Tabulated { times: Vec<f64>, omega_sq: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ProfileRepr {
    Constant {
        #[serde(default = "one")]
        omega0: f64,
    },
    Free,
    Step {
        omega1: f64,
        #[serde(default)]
        t_switch: f64,
    },
    Modulated {
        kappa: f64,
        nu: f64,
    },
    Tabulated {
        times: Vec<f64>,
        omega_sq: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<ProfileRepr> for FrequencyProfile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        let p = match r {
            ProfileRepr::Constant { omega0 } => FrequencyProfile::Constant { omega0 },
            ProfileRepr::Free => FrequencyProfile::Free,
            ProfileRepr::Step { omega1, t_switch } => FrequencyProfile::Step { omega1, t_switch },
            ProfileRepr::Modulated { kappa, nu } => FrequencyProfile::Modulated { kappa, nu },
            ProfileRepr::Tabulated { times, omega_sq } => FrequencyProfile::Tabulated { times, omega_sq },
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<FrequencyProfile> for ProfileRepr {
    fn from(p: FrequencyProfile) -> Self {
        match p {
            FrequencyProfile::Constant { omega0 } => ProfileRepr::Constant { omega0 },
            FrequencyProfile::Free => ProfileRepr::Free,
            FrequencyProfile::Step { omega1, t_switch } => ProfileRepr::Step { omega1, t_switch },
            FrequencyProfile::Modulated { kappa, nu } => ProfileRepr::Modulated { kappa, nu },
            FrequencyProfile::Tabulated { times, omega_sq } => ProfileRepr::Tabulated { times, omega_sq },
        }
    }
}

const UNIT_FREQUENCY_TOL: f64 = 1e-12;

impl FrequencyProfile {
    pub fn constant(omega0: f64) -> Result<Self> {
        let p = FrequencyProfile::Constant { omega0 };
        p.validate()?;
        Ok(p)
    }

    pub fn free() -> Self {
        FrequencyProfile::Free
    }

    pub fn step(omega1: f64, t_switch: f64) -> Result<Self> {
        let p = FrequencyProfile::Step { omega1, t_switch };
        p.validate()?;
        Ok(p)
    }

    pub fn modulated(kappa: f64, nu: f64) -> Result<Self> {
        let p = FrequencyProfile::Modulated { kappa, nu };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(times: Vec<f64>, omega_sq: Vec<f64>) -> Result<Self> {
        let p = FrequencyProfile::Tabulated { times, omega_sq };
        p.validate()?;
        Ok(p)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FrequencyProfile::Constant { .. } => "constant",
            FrequencyProfile::Free => "free",
            FrequencyProfile::Step { .. } => "step",
            FrequencyProfile::Modulated { .. } => "modulated",
            FrequencyProfile::Tabulated { .. } => "tabulated",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        match self {
            FrequencyProfile::Constant { omega0 } => {
                if !(omega0.is_finite() && *omega0 > 0.0) {
                    return bad(format!("constant frequency must be positive, got {omega0}"));
                }
                if (omega0 - 1.0).abs() > UNIT_FREQUENCY_TOL {
                    return bad(format!("ω(0) must be 1, got constant ω₀ = {omega0}"));
                }
            }
            FrequencyProfile::Free => {}
            FrequencyProfile::Step { omega1, t_switch } => {
                if !(omega1.is_finite() && *omega1 > 0.0) {
                    return bad(format!("step frequency must be positive, got {omega1}"));
                }
                if !(t_switch.is_finite() && *t_switch >= 0.0) {
                    return bad(format!("switch time must be nonnegative, got {t_switch}"));
                }
            }
            FrequencyProfile::Modulated { kappa, nu } => {
                if !(kappa.is_finite() && nu.is_finite()) {
                    return bad("modulation parameters must be finite".into());
                }
            }
            FrequencyProfile::Tabulated { times, omega_sq } => {
                if times.len() != omega_sq.len() || times.len() < 2 {
                    return bad(format!(
                        "tabulated arrays need equal lengths ≥ 2, got {} and {}",
                        times.len(),
                        omega_sq.len()
                    ));
                }
                if times.iter().chain(omega_sq).any(|v| !v.is_finite()) {
                    return bad("tabulated values must be finite".into());
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("tabulated times must increase strictly".into());
                }
                if times[0] > 0.0 || *times.last().unwrap() <= 0.0 {
                    return bad("tabulated times must bracket t = 0".into());
                }
                let w0 = interpolate(times, omega_sq, 0.0);
                if (w0 - 1.0).abs() > UNIT_FREQUENCY_TOL {
                    return bad(format!("ω²(0) must be 1, got {w0}"));
                }
            }
        }
        Ok(())
    }

    /// `ω²(t)`. At a step discontinuity the post-switch value is returned.
    pub fn omega_sq(&self, t: f64) -> Result<f64> {
        self.omega_sq_on_piece(t, t)
    }

    /// `ω²(t)` on the smooth piece containing `inside`, so that stage
    /// evaluations landing on a breakpoint use the piece being integrated.
    pub(crate) fn omega_sq_on_piece(&self, t: f64, inside: f64) -> Result<f64> {
        Ok(match self {
            FrequencyProfile::Constant { omega0 } => omega0 * omega0,
            FrequencyProfile::Free => 0.0,
            FrequencyProfile::Step { omega1, t_switch } => {
                if inside < *t_switch {
                    1.0
                } else {
                    omega1 * omega1
                }
            }
            FrequencyProfile::Modulated { kappa, nu } => 1.0 + kappa * (nu * t).cos(),
            FrequencyProfile::Tabulated { times, omega_sq } => {
                let (t_min, t_max) = (times[0], *times.last().unwrap());
                if t < t_min || t > t_max {
                    return Err(Error::OutOfTabulatedRange { t, t_min, t_max });
                }
                interpolate(times, omega_sq, t)
            }
        })
    }

    /// Points strictly inside `(a, b)` where `ω²` or its derivative jumps.
    pub(crate) fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut pts: Vec<f64> = match self {
            FrequencyProfile::Step { t_switch, .. } => vec![*t_switch],
            FrequencyProfile::Tabulated { times, .. } => times.clone(),
            _ => Vec::new(),
        };
        pts.retain(|&t| t > lo && t < hi);
        if a > b {
            pts.reverse();
        }
        pts
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let i = match times.partition_point(|&s| s <= t) {
        0 => 0,
        k if k >= times.len() => times.len() - 2,
        k => k - 1,
    };
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    values[i] + w * (values[i + 1] - values[i])
}
