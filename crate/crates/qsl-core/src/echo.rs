use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::HamiltonianMatrix;
use crate::spectral::{overlap_weights, SpectralDecomposition, StateVector};

/// Grid minima below this echo value count as candidate zeros; finite size lifts
/// exact zeros, so detection needs a threshold.
pub const ZERO_THRESHOLD: f64 = 1e-4;
/// Echo floor applied before the logarithm in the rate function.
pub const ECHO_FLOOR: f64 = 1e-300;
/// The stepped-unitary reference evolver is quadratic in dimension per step and
/// cubic in construction; it exists for cross-checks, not production runs.
pub const STEPPED_ECHO_LIMIT: usize = 512;

/// Overlap spectrum of one quench: G(t) = sum_n w_n exp(-i E_n t) evaluated
/// exactly at any time.
#[derive(Debug, Clone)]
pub struct EchoEvaluator {
    weights: Array1<f64>,
    energies: Array1<f64>,
}

impl EchoEvaluator {
    pub fn new(decomp_post: &SpectralDecomposition, psi0: &StateVector) -> Result<Self> {
        let weights = overlap_weights(decomp_post, psi0)?;
        let total: f64 = weights.sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation {
                check: "overlap completeness",
                residual: (total - 1.0).abs(),
                allowed: 1e-10,
            });
        }
        Ok(EchoEvaluator {
            weights,
            energies: decomp_post.eigenvalues.clone(),
        })
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (w, e) in self.weights.iter().zip(self.energies.iter()) {
            let phase = -e * t;
            re += w * phase.cos();
            im += w * phase.sin();
        }
        Complex64::new(re, im)
    }

    pub fn echo(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }

    /// Energy uncertainty of the weight distribution; sets the grid density.
    pub fn weight_uncertainty(&self) -> f64 {
        let mean: f64 = self
            .weights
            .iter()
            .zip(self.energies.iter())
            .map(|(w, e)| w * e)
            .sum();
        let mean2: f64 = self
            .weights
            .iter()
            .zip(self.energies.iter())
            .map(|(w, e)| w * e * e)
            .sum();
        (mean2 - mean * mean).max(0.0).sqrt()
    }
}

/// Sampled echo with its continuous evaluator kept alongside, so zero refinement
/// works on the exact function rather than on interpolants.
#[derive(Debug, Clone)]
pub struct EchoTrace {
    pub times: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    pub echo: Vec<f64>,
    pub free_energy: Vec<f64>,
    /// Refined zero times, ascending; filled by `find_zeros`.
    pub zeros: Vec<f64>,
    pub n_sites: usize,
    evaluator: EchoEvaluator,
}

impl EchoTrace {
    pub fn evaluator(&self) -> &EchoEvaluator {
        &self.evaluator
    }
}

/// Points needed so consecutive samples advance the bound phase by well under
/// 0.1 (no zero can hide between samples).
pub fn grid_points_for(uncertainty: f64, t_max: f64) -> usize {
    ((t_max * uncertainty / 0.08).ceil() as usize + 2).max(33)
}

/// Exact echo on a uniform grid over [0, t_max]. The rate function divides by
/// the lattice site count, not the Hilbert dimension.
pub fn loschmidt_trace(
    decomp_post: &SpectralDecomposition,
    psi0: &StateVector,
    n_sites: usize,
    t_max: f64,
    n_points: usize,
) -> Result<EchoTrace> {
    if n_points < 2 || t_max <= 0.0 || t_max.is_nan() {
        return Err(Error::InvalidSpec(format!(
            "trace needs t_max > 0 and at least two points, got t_max={t_max}, n_points={n_points}"
        )));
    }
    if n_sites == 0 {
        return Err(Error::InvalidSpec("trace needs a nonzero site count".into()));
    }
    let evaluator = EchoEvaluator::new(decomp_post, psi0)?;
    let dt = t_max / (n_points - 1) as f64;
    let times: Vec<f64> = (0..n_points).map(|i| i as f64 * dt).collect();
    let amplitude: Vec<Complex64> = times.iter().map(|&t| evaluator.amplitude(t)).collect();
    let echo: Vec<f64> = amplitude.iter().map(|g| g.norm_sqr()).collect();
    if (echo[0] - 1.0).abs() > 1e-10 {
        return Err(Error::InvariantViolation {
            check: "echo normalization at t=0",
            residual: (echo[0] - 1.0).abs(),
            allowed: 1e-10,
        });
    }
    if let Some(&worst) = echo
        .iter()
        .max_by(|a, b| a.partial_cmp(b).unwrap())
    {
        if worst > 1.0 + 1e-10 {
            return Err(Error::InvariantViolation {
                check: "echo bounded by one",
                residual: worst - 1.0,
                allowed: 1e-10,
            });
        }
    }
    let free_energy: Vec<f64> = echo
        .iter()
        .map(|&l| -(l.max(ECHO_FLOOR)).ln() / n_sites as f64)
        .collect();
    Ok(EchoTrace {
        times,
        amplitude,
        echo,
        free_energy,
        zeros: Vec::new(),
        n_sites,
        evaluator,
    })
}

/// Golden-section minimization of the exact echo on [a, b] down to time width
/// `tol`; the bracket spans one grid minimum, which the grid rule keeps unimodal.
fn refine_minimum(ev: &EchoEvaluator, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = ev.echo(x1);
    let mut f2 = ev.echo(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = ev.echo(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = ev.echo(x2);
        }
    }
    0.5 * (a + b)
}

/// Interior grid minima refined on the exact evaluator; a refined minimum
/// counts as a zero when the refined echo falls below `zero_threshold`. The
/// threshold is applied after refinement: at the coarsest admissible grid a
/// sample next to a true zero can still read (dH dt/2)^2, far above threshold.
/// An empty result means no orthogonalization in the window.
pub fn find_zeros(trace: &EchoTrace, zero_threshold: f64, refine_tol: f64) -> Vec<f64> {
    let l = &trace.echo;
    let t = &trace.times;
    let mut zeros = Vec::new();
    for i in 1..l.len().saturating_sub(1) {
        if l[i] <= l[i - 1] && l[i] <= l[i + 1] {
            // plateaus would register twice; the ascending dedup below drops them
            let z = refine_minimum(&trace.evaluator, t[i - 1], t[i + 1], refine_tol);
            if trace.evaluator.echo(z) >= zero_threshold {
                continue;
            }
            match zeros.last() {
                Some(&prev) if (z - prev) < 10.0 * refine_tol => {}
                _ => zeros.push(z),
            }
        }
    }
    zeros
}

/// One row of a first-zero sweep over final strengths.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub delta_f: f64,
    pub first_zero: Option<f64>,
    pub tau_qsl: f64,
    pub regime: crate::qsl::Regime,
}

/// Trace window used by the sweep, in units of the operative bound time.
pub const SWEEP_WINDOW_FACTOR: f64 = 8.0;

/// For each final strength: quench the selected pre-quench eigenstate, locate
/// the first echo zero (absent when the window holds none), and record the
/// operative bound.
pub fn first_zero_vs_delta(
    pre_spec: &crate::lattice::LatticeSpec,
    post_deltas: &[f64],
    selector: crate::spectral::StateSelector,
    zero_threshold: f64,
    refine_tol: f64,
) -> Result<Vec<SweepRow>> {
    use crate::spectral::{diagonalize, observables, select_initial_state};
    let pre = diagonalize(&pre_spec.build()?)?;
    let psi0 = select_initial_state(&pre, selector)?;
    let mut rows = Vec::with_capacity(post_deltas.len());
    for &df in post_deltas {
        let post_spec = pre_spec.clone().with_strength(df);
        let h_post = post_spec.build()?;
        let post = diagonalize(&h_post)?;
        let obs = observables(&h_post, &post, &psi0)?;
        let report = crate::qsl::tau_qsl(&obs)?;
        let t_max = SWEEP_WINDOW_FACTOR * report.tau_qsl;
        let n_points = grid_points_for(obs.uncertainty(), t_max);
        let mut trace = loschmidt_trace(&post, &psi0, pre_spec.n_sites, t_max, n_points)?;
        trace.zeros = find_zeros(&trace, zero_threshold, refine_tol);
        rows.push(SweepRow {
            delta_f: df,
            first_zero: trace.zeros.first().copied(),
            tau_qsl: report.tau_qsl,
            regime: report.regime,
        });
    }
    Ok(rows)
}

fn cmatmul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let mut out = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
    for i in 0..n {
        for k in 0..n {
            let aik = a[[i, k]];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[[i, j]] += aik * b[[k, j]];
            }
        }
    }
    out
}

/// Independent echo route: build U(dt) = exp(-i H dt) by scaled Taylor squaring
/// and apply it repeatedly. Quadratic per step, for cross-validation only.
pub fn stepped_echo(
    h: &HamiltonianMatrix,
    psi0: &StateVector,
    t_max: f64,
    n_points: usize,
) -> Result<Vec<f64>> {
    if h.dim() > STEPPED_ECHO_LIMIT {
        return Err(Error::CapacityExceeded {
            dim: h.dim(),
            max: STEPPED_ECHO_LIMIT,
        });
    }
    if n_points < 2 || t_max <= 0.0 || t_max.is_nan() {
        return Err(Error::InvalidSpec(
            "stepped evolution needs t_max > 0 and at least two points".into(),
        ));
    }
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch(
            "state does not match the matrix".into(),
        ));
    }
    let dim = h.dim();
    let dt = t_max / (n_points - 1) as f64;
    let dense = h.to_dense();
    // scale until the Taylor series of exp converges in a few terms
    let row_norm = (0..dim)
        .map(|i| (0..dim).map(|j| dense[[i, j]].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let mut squarings = 0u32;
    let mut scaled_norm = row_norm * dt;
    while scaled_norm > 0.25 {
        scaled_norm /= 2.0;
        squarings += 1;
    }
    let scale = (2.0f64).powi(squarings as i32);
    let b = dense.mapv(|v| Complex64::new(0.0, -v * dt / scale));
    let mut u = Array2::from_shape_fn((dim, dim), |(i, j)| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut term = u.clone();
    for k in 1..40 {
        term = cmatmul(&term, &b).mapv(|v| v / k as f64);
        u = &u + &term;
        let worst = term.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if worst < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        u = cmatmul(&u, &u);
    }
    let mut psi: Array1<Complex64> = psi0.amplitudes().to_owned();
    let psi_ref = psi.clone();
    let mut echoes = Vec::with_capacity(n_points);
    let overlap = |p: &Array1<Complex64>| -> f64 {
        let g: Complex64 = psi_ref
            .iter()
            .zip(p.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        g.norm_sqr()
    };
    echoes.push(overlap(&psi));
    for _ in 1..n_points {
        psi = u.dot(&psi);
        echoes.push(overlap(&psi));
    }
    Ok(echoes)
}
