use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ascending power series below this |x|, large-argument expansion above. The
/// switch sits where both sides deliver better than 1e-12 absolute error.
pub const BESSEL_SERIES_LIMIT: f64 = 12.0;

fn j0_series(x: f64) -> f64 {
    let q = -x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    for m in 1..80 {
        term *= q / ((m * m) as f64);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-18 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum
}

fn j1_series(x: f64) -> f64 {
    let q = -x * x / 4.0;
    let mut term = x / 2.0;
    let mut sum = term;
    let mut comp = 0.0;
    for m in 1..80 {
        term *= q / ((m * (m + 1)) as f64);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-18 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum
}

/// Large-argument form sqrt(2/(pi x)) (P cos(theta) - Q sin(theta)); the
/// divergent tail is truncated at its smallest term.
fn hankel(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut a = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut last = 1.0f64;
    let mut k = 1u32;
    while k < 40 {
        a *= (mu - ((2 * k - 1) as f64).powi(2)) / (8.0 * k as f64);
        let term = a / x.powi(k as i32);
        if term.abs() > last.abs() {
            break;
        }
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            // odd k feeds Q with sign (-1)^((k-1)/2)
            let s = if ((k - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            q += s * term;
        } else {
            p += sign * term;
        }
        last = term;
        if term.abs() < 1e-18 {
            break;
        }
        k += 1;
    }
    let theta = x - (0.5 * nu as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * theta.cos() - q * theta.sin())
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= BESSEL_SERIES_LIMIT {
        j0_series(ax)
    } else {
        hankel(0, ax)
    }
}

/// Bessel function of the first kind, order one (odd in x).
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= BESSEL_SERIES_LIMIT {
        j1_series(ax)
    } else {
        hankel(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// First `count` positive roots of J0, ascending. McMahon seeds x ~ (k-1/4)pi +
/// 1/(8 x) land close enough for Newton (J0' = -J1) to converge in a few steps.
pub fn bessel_j0_zeros(count: usize) -> Vec<f64> {
    let mut roots = Vec::with_capacity(count);
    for k in 1..=count {
        let beta = (k as f64 - 0.25) * PI;
        let mut x = beta + 1.0 / (8.0 * beta);
        for _ in 0..60 {
            // J0' = -J1, so the Newton update adds J0/J1.
            let step = bessel_j0(x) / bessel_j1(x);
            x += step;
            if step.abs() < 1e-15 * x {
                break;
            }
        }
        roots.push(x);
    }
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    AubryAndre,
    Stark,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::AubryAndre => write!(f, "aubry-andre"),
            ModelKind::Stark => write!(f, "stark"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuenchDirection {
    /// Deeply pinned initial state released into the bare hopping chain.
    LocalizedToDelocalized,
    /// Uniform initial state frozen by a dominant final potential.
    DelocalizedToLocalized,
}

/// Which inputs the closed forms actually read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parameter {
    Hopping,
    FinalStrength,
    SystemSize,
}

#[derive(Debug, Clone, Copy)]
enum ZeroForm {
    /// t*_k = x_k / scale with x_k the k-th root of J0; echo J0(scale t)^2.
    BesselScaled { scale: f64 },
    /// t*_n = n * period; echo |sin(x)/x|^2 with x = pi t / period.
    Harmonic { period: f64 },
}

/// Closed-form bound times and echo-zero generators for the four extreme
/// quench families.
#[derive(Debug, Clone, Copy)]
pub struct ExtremeQuenchPrediction {
    pub model: ModelKind,
    pub direction: QuenchDirection,
    pub tau_mt: f64,
    pub tau_ml: f64,
    form: ZeroForm,
    depends: &'static [Parameter],
}

impl ExtremeQuenchPrediction {
    /// k-th echo zero, 1-based.
    pub fn zero_time(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidSpec("zero index is 1-based".into()));
        }
        Ok(match self.form {
            ZeroForm::BesselScaled { scale } => bessel_j0_zeros(k)[k - 1] / scale,
            ZeroForm::Harmonic { period } => period * k as f64,
        })
    }

    /// First `n` echo zeros, ascending.
    pub fn zero_times(&self, n: usize) -> Vec<f64> {
        match self.form {
            ZeroForm::BesselScaled { scale } => {
                bessel_j0_zeros(n).into_iter().map(|x| x / scale).collect()
            }
            ZeroForm::Harmonic { period } => (1..=n).map(|k| period * k as f64).collect(),
        }
    }

    /// Predicted echo L(t) in the extreme limit.
    pub fn echo(&self, t: f64) -> f64 {
        match self.form {
            ZeroForm::BesselScaled { scale } => bessel_j0(scale * t).powi(2),
            ZeroForm::Harmonic { period } => {
                let x = PI * t / period;
                if x == 0.0 {
                    1.0
                } else {
                    (x.sin() / x).powi(2)
                }
            }
        }
    }

    pub fn depends_on(&self) -> &'static [Parameter] {
        self.depends
    }
}

/// Bound times for the extreme quenches: release from a deep potential into the
/// bare chain, or freezing of a uniform state by a dominant final potential.
/// `n_sites` is consumed only by the Stark delocalized-to-localized family.
pub fn extreme_quench(
    model: ModelKind,
    direction: QuenchDirection,
    hopping: f64,
    delta_f: f64,
    n_sites: Option<usize>,
) -> Result<ExtremeQuenchPrediction> {
    match direction {
        QuenchDirection::LocalizedToDelocalized => {
            if hopping <= 0.0 || !hopping.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "release into the bare chain needs positive hopping, got {hopping}"
                )));
            }
            Ok(ExtremeQuenchPrediction {
                model,
                direction,
                tau_mt: PI / (2.0 * 2.0f64.sqrt() * hopping),
                tau_ml: PI / (4.0 * hopping),
                form: ZeroForm::BesselScaled {
                    scale: 2.0 * hopping,
                },
                depends: &[Parameter::Hopping],
            })
        }
        QuenchDirection::DelocalizedToLocalized => {
            if delta_f <= 0.0 || !delta_f.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "freezing quench needs a positive final strength, got {delta_f}"
                )));
            }
            match model {
                ModelKind::AubryAndre => Ok(ExtremeQuenchPrediction {
                    model,
                    direction,
                    tau_mt: 2.0f64.sqrt() * PI / (2.0 * delta_f),
                    tau_ml: PI / (2.0 * delta_f),
                    form: ZeroForm::BesselScaled { scale: delta_f },
                    depends: &[Parameter::FinalStrength],
                }),
                ModelKind::Stark => {
                    let n = n_sites.ok_or(Error::MissingParameter("n_sites"))? as f64;
                    if n < 2.0 {
                        return Err(Error::InvalidSpec(
                            "tilted-chain closed forms need at least two sites".into(),
                        ));
                    }
                    Ok(ExtremeQuenchPrediction {
                        model,
                        direction,
                        tau_mt: 3.0f64.sqrt() * PI / (delta_f * (n * n - 1.0).sqrt()),
                        tau_ml: PI / (delta_f * (n + 1.0)),
                        form: ZeroForm::Harmonic {
                            period: 2.0 * PI / (delta_f * n),
                        },
                        depends: &[Parameter::FinalStrength, Parameter::SystemSize],
                    })
                }
            }
        }
    }
}

/// |sin(x)/x|^2 with x = delta_f * t * n_sites / 2; the echo of a uniform state
/// dephasing on a linear ladder.
pub fn sinc_echo(delta_f: f64, n_sites: usize, t: f64) -> f64 {
    let x = delta_f * t * n_sites as f64 / 2.0;
    if x == 0.0 {
        1.0
    } else {
        (x.sin() / x).powi(2)
    }
}

/// g(N, alpha) = sum_{n=1}^{N} cos(2 pi alpha n) in closed form.
pub fn finite_size_g(n: usize, alpha: f64) -> Result<f64> {
    let w = 2.0 * PI * alpha;
    let denom = 2.0 * (1.0 - w.cos());
    if denom.abs() < 1e-12 {
        return Err(Error::SingularAlpha(alpha));
    }
    let nf = n as f64;
    Ok((w.cos() - (w * (nf + 1.0)).cos() + (w * nf).cos() - 1.0) / denom)
}

/// sum_{n=1}^{N} cos^2(2 pi alpha n) = N/2 + g(N, 2 alpha)/2. The half on the
/// second term follows from cos^2 = (1 + cos 2x)/2 and is pinned against brute
/// force in the tests.
pub fn cosine_square_sum(n: usize, alpha: f64) -> Result<f64> {
    Ok(n as f64 / 2.0 + finite_size_g(n, 2.0 * alpha)? / 2.0)
}

/// Energy uncertainty of the uniform state on the cosine potential at strength
/// delta_f: delta_f sqrt(1/2 + g(N,2a)/(2N) - g(N,a)^2/N^2). Tends to
/// delta_f/sqrt(2) as N grows.
pub fn finite_size_uncertainty(n: usize, alpha: f64, delta_f: f64) -> Result<f64> {
    let nf = n as f64;
    let g1 = finite_size_g(n, alpha)?;
    let g2 = finite_size_g(n, 2.0 * alpha)?;
    let variance = 0.5 + g2 / (2.0 * nf) - (g1 / nf).powi(2);
    Ok(delta_f * variance.max(0.0).sqrt())
}

/// Strength at which the two extreme-quench orthogonalization times coincide:
/// 2J for the quasiperiodic chain, sqrt(24/(N^2-1)) J for the tilted chain.
pub fn analytic_transition(model: ModelKind, hopping: f64, n_sites: Option<usize>) -> Result<f64> {
    match model {
        ModelKind::AubryAndre => Ok(2.0 * hopping),
        ModelKind::Stark => {
            let n = n_sites.ok_or(Error::MissingParameter("n_sites"))? as f64;
            if n < 2.0 {
                return Err(Error::InvalidSpec(
                    "tilted-chain transition needs at least two sites".into(),
                ));
            }
            Ok((24.0 / (n * n - 1.0)).sqrt() * hopping)
        }
    }
}
