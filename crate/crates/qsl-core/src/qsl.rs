use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::ObservableSet;

/// Variance below this fraction of the squared energy scale marks a stationary state.
pub const STATIONARY_REL_TOL: f64 = 1e-11;
/// Margolus-Levitin denominators below this fraction of the energy scale are
/// treated as zero (the corresponding bound is undefined).
pub const ML_DENOM_REL_TOL: f64 = 1e-9;

/// Which of the three bounds is the binding one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Mandelstam-Tamm: set by the energy uncertainty.
    Mt,
    /// Margolus-Levitin: set by the mean energy above the ground state.
    Ml,
    /// Dual Margolus-Levitin: set by the mean energy below the top of the spectrum.
    MlStar,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Mt => write!(f, "MT"),
            Regime::Ml => write!(f, "ML"),
            Regime::MlStar => write!(f, "ML*"),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MT" => Ok(Regime::Mt),
            "ML" => Ok(Regime::Ml),
            "ML*" => Ok(Regime::MlStar),
            other => Err(Error::Config(format!("unknown regime label {other:?}"))),
        }
    }
}

/// Orthogonalization times of the three bounds plus the operative limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslReport {
    pub tau_mt: f64,
    pub tau_ml: f64,
    /// Absent when the spectrum has no numerical upper edge.
    pub tau_ml_star: Option<f64>,
    /// Largest of the defined bounds.
    pub tau_qsl: f64,
    pub regime: Regime,
    /// Time where the uncertainty envelope overtakes the mean-energy envelope;
    /// defined only while the mean-energy bound is the binding one.
    pub crossover: Option<f64>,
}

/// Times to reach a target overlap modulus `s`, one per bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapBounds {
    pub t_mt: f64,
    pub t_ml: f64,
    pub t_ml_star: Option<f64>,
}

impl OverlapBounds {
    /// The binding (largest) lower bound.
    pub fn binding(&self) -> f64 {
        let base = self.t_mt.max(self.t_ml);
        match self.t_ml_star {
            Some(t) => base.max(t),
            None => base,
        }
    }
}

struct Denominators {
    dh: f64,
    d_ml: f64,
    /// None when no numerical E_max exists.
    d_ml_star: Option<f64>,
}

fn denominators(obs: &ObservableSet) -> Result<Denominators> {
    let scale2 = obs
        .mean_square
        .max(obs.mean_energy * obs.mean_energy)
        .max(obs.ground_energy * obs.ground_energy)
        .max(obs.max_energy.map_or(0.0, |e| e * e));
    let variance = (obs.mean_square - obs.mean_energy * obs.mean_energy).max(0.0);
    if variance <= STATIONARY_REL_TOL * scale2 {
        return Err(Error::StationaryState);
    }
    let scale = scale2.sqrt();
    let d_ml = obs.shifted_mean();
    if d_ml <= ML_DENOM_REL_TOL * scale {
        return Err(Error::MlUndefined(
            "mean energy does not exceed the ground energy".into(),
        ));
    }
    let d_ml_star = match obs.max_energy {
        Some(emax) => {
            let d = emax - obs.mean_energy;
            if d <= ML_DENOM_REL_TOL * scale {
                return Err(Error::MlUndefined(
                    "mean energy reaches the top of the spectrum".into(),
                ));
            }
            Some(d)
        }
        None => None,
    };
    Ok(Denominators {
        dh: variance.sqrt(),
        d_ml,
        d_ml_star,
    })
}

/// Orthogonalization times pi/(2 dH), pi/(2(<H>-E_0)), pi/(2(E_max-<H>)); the
/// operative limit is their maximum, ties resolved MT over ML over ML*.
pub fn tau_qsl(obs: &ObservableSet) -> Result<QslReport> {
    let d = denominators(obs)?;
    let tau_mt = PI / (2.0 * d.dh);
    let tau_ml = PI / (2.0 * d.d_ml);
    let tau_ml_star = d.d_ml_star.map(|den| PI / (2.0 * den));
    let mut regime = Regime::Mt;
    let mut tau = tau_mt;
    if tau_ml > tau {
        regime = Regime::Ml;
        tau = tau_ml;
    }
    if let Some(t) = tau_ml_star {
        if t > tau {
            regime = Regime::MlStar;
            tau = t;
        }
    }
    let crossover = if d.dh >= d.d_ml {
        Some(PI * d.d_ml / (2.0 * d.dh * d.dh))
    } else {
        None
    };
    Ok(QslReport {
        tau_mt,
        tau_ml,
        tau_ml_star,
        tau_qsl: tau,
        regime,
        crossover,
    })
}

pub fn classify_regime(obs: &ObservableSet) -> Result<Regime> {
    Ok(tau_qsl(obs)?.regime)
}

/// Lower bounds on the time to bring |<psi(0)|psi(t)>| down to `s`.
pub fn bounds_at_overlap(obs: &ObservableSet, s: f64) -> Result<OverlapBounds> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OverlapOutOfRange(s));
    }
    let d = denominators(obs)?;
    let a = s.acos();
    Ok(OverlapBounds {
        t_mt: a / d.dh,
        t_ml: 2.0 * a * a / (PI * d.d_ml),
        t_ml_star: d.d_ml_star.map(|den| 2.0 * a * a / (PI * den)),
    })
}

/// Time where the two short-time echo envelopes cross, pi(<H>-E_0)/(2 dH^2);
/// only meaningful when the mean-energy bound dominates (dH >= <H>-E_0).
pub fn crossover_time(obs: &ObservableSet) -> Result<Option<f64>> {
    Ok(tau_qsl(obs)?.crossover)
}

/// Uncertainty-limited echo floor cos^2(dH t), zero once the bound admits
/// orthogonality (t >= pi/(2 dH)).
pub fn envelope_mt(obs: &ObservableSet, t: f64) -> Result<f64> {
    let d = denominators(obs)?;
    let x = d.dh * t;
    if x >= PI / 2.0 {
        Ok(0.0)
    } else {
        Ok(x.cos().powi(2))
    }
}

/// Mean-energy-limited echo floor cos^2(sqrt(pi(<H>-E_0)t/2)), zero past its
/// orthogonality time pi/(2(<H>-E_0)).
pub fn envelope_ml(obs: &ObservableSet, t: f64) -> Result<f64> {
    let d = denominators(obs)?;
    let x = (PI * d.d_ml * t.max(0.0) / 2.0).sqrt();
    if x >= PI / 2.0 {
        Ok(0.0)
    } else {
        Ok(x.cos().powi(2))
    }
}

/// Both echo floors sampled on a shared time grid, `(mt, ml)` in grid order.
pub fn echo_envelopes(obs: &ObservableSet, times: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    // One guard pass; reuse the denominators for every sample.
    let d = denominators(obs)?;
    let mut mt = Vec::with_capacity(times.len());
    let mut ml = Vec::with_capacity(times.len());
    for &t in times {
        let x_mt = d.dh * t;
        mt.push(if x_mt >= PI / 2.0 {
            0.0
        } else {
            x_mt.cos().powi(2)
        });
        let x_ml = (PI * d.d_ml * t.max(0.0) / 2.0).sqrt();
        ml.push(if x_ml >= PI / 2.0 {
            0.0
        } else {
            x_ml.cos().powi(2)
        });
    }
    Ok((mt, ml))
}
