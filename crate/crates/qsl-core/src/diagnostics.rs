use ndarray::Array2;
use ndarray_linalg::{EigValsh, UPLO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::ManyBodySpec;
use crate::spectral::{eigenvalues_only, SpectralDecomposition, StateVector};

/// Ensemble mean of the gap-ratio statistic for uncorrelated (Poisson) levels,
/// 2 ln 2 - 1.
pub const POISSON_MEAN_R: f64 = 0.386_294_361_119_890_6;

/// Ensemble mean of the gap-ratio statistic for the Gaussian orthogonal
/// ensemble.
pub const GOE_MEAN_R: f64 = 0.5295;

/// Mean gap ratio at which the ergodic-to-localized crossover is read off a
/// disorder scan.
pub const MBL_CROSSING_R: f64 = 0.45;

/// A scan whose peak mean gap ratio reaches this value samples enough of the
/// ergodic phase for the crossing estimate to be trusted.
pub const EFFICIENT_PEAK_R: f64 = 0.50;

/// Central fraction of the spectrum kept by default when averaging gap
/// ratios; the spectral edges obey different statistics.
pub const DEFAULT_R_WINDOW: f64 = 0.5;

/// Normalized participation ratio 1/(N sum_j |psi_j|^4). Ranges from 1/N for
/// a single occupied site to 1 for uniform spreading.
pub fn npr(state: &StateVector, n_sites: usize) -> Result<f64> {
    if state.len() != n_sites {
        return Err(Error::DimensionMismatch(format!(
            "state has {} amplitudes, lattice has {} sites",
            state.len(),
            n_sites
        )));
    }
    let inverse_participation: f64 = state.amplitudes().iter().map(|c| c.norm_sqr().powi(2)).sum();
    Ok(1.0 / (n_sites as f64 * inverse_participation))
}

/// Participation ratios of every eigenstate of a decomposition.
#[derive(Debug, Clone)]
pub struct EigenstateNpr {
    pub per_state: Vec<f64>,
    pub mean: f64,
}

/// Spectrum-averaged participation ratio. Stays O(1) in a delocalized phase
/// and falls off as 1/N once states localize.
pub fn mean_npr(decomp: &SpectralDecomposition) -> EigenstateNpr {
    let n = decomp.dim();
    let per_state: Vec<f64> = (0..n)
        .map(|k| {
            let col = decomp.eigenvectors.column(k);
            let ipr: f64 = col.iter().map(|v| v * v * v * v).sum();
            1.0 / (n as f64 * ipr)
        })
        .collect();
    let mean = per_state.iter().sum::<f64>() / n as f64;
    EigenstateNpr { per_state, mean }
}

/// Gap-ratio summary over the central window of one spectrum.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumStats {
    pub mean_r: f64,
    pub n_gaps_used: usize,
}

/// Mean gap ratio r_n = min(g_n, g_{n+1})/max(g_n, g_{n+1}) over consecutive
/// level spacings, restricted to the central `window` fraction of an
/// ascending spectrum. Degenerate pairs contribute r = 0.
pub fn r_statistic(eigenvalues: &[f64], window: f64) -> Result<SpectrumStats> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "window fraction {window} outside (0, 1]"
        )));
    }
    let n = eigenvalues.len();
    if n < 3 {
        return Err(Error::InsufficientSpectrum(format!(
            "{n} levels cannot form a gap ratio"
        )));
    }
    if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidSpec(
            "eigenvalues must be in ascending order".into(),
        ));
    }
    let keep = ((window * n as f64).round() as usize).clamp(3, n);
    let start = (n - keep) / 2;
    let central = &eigenvalues[start..start + keep];
    let gaps: Vec<f64> = central.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sum = 0.0;
    for pair in gaps.windows(2) {
        let (lo, hi) = if pair[0] < pair[1] {
            (pair[0], pair[1])
        } else {
            (pair[1], pair[0])
        };
        if hi > 0.0 {
            sum += lo / hi;
        }
    }
    let n_gaps_used = gaps.len() - 1;
    Ok(SpectrumStats {
        mean_r: sum / n_gaps_used as f64,
        n_gaps_used,
    })
}

/// One detuning point of a disorder-averaged gap-ratio scan.
#[derive(Debug, Clone, Copy)]
pub struct MblScanRow {
    pub delta: f64,
    pub mean_r: f64,
    /// Standard error over realizations; zero for a single phase.
    pub stderr: f64,
    pub n_realizations: usize,
}

/// Disorder scan of the mean gap ratio with an interpolated crossing of
/// `MBL_CROSSING_R` on the localizing side of the peak.
#[derive(Debug, Clone)]
pub struct MblScan {
    pub rows: Vec<MblScanRow>,
    pub crossing: Option<f64>,
    pub peak_mean_r: f64,
    /// Peak reached `EFFICIENT_PEAK_R`, so the grid samples the ergodic side.
    pub efficient: bool,
}

/// Quasiperiodic phases for disorder averaging, uniform on [0, 2pi). The
/// stream is a pure function of the seed so matched scans reuse realizations.
pub fn draw_phases(n_phases: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_phases)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}

/// Locates where the scan falls through `level` after its peak, by linear
/// interpolation between the bracketing grid points.
pub fn crossing_delta(rows: &[MblScanRow], level: f64) -> Option<f64> {
    let peak = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.mean_r.total_cmp(&b.1.mean_r))?
        .0;
    for pair in rows[peak..].windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.mean_r >= level && level > b.mean_r {
            let frac = (a.mean_r - level) / (a.mean_r - b.mean_r);
            return Some(a.delta + frac * (b.delta - a.delta));
        }
    }
    None
}

/// Gap-ratio scan of an interacting chain over a detuning grid, averaged over
/// `n_phases` quasiperiodic phase realizations drawn from `seed`. Every grid
/// point reuses the same realizations.
pub fn mbl_r_scan(
    template: &ManyBodySpec,
    delta_grid: &[f64],
    n_phases: usize,
    window: f64,
    seed: u64,
) -> Result<MblScan> {
    if delta_grid.is_empty() {
        return Err(Error::InvalidSpec("empty detuning grid".into()));
    }
    if delta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(
            "detuning grid must be strictly ascending".into(),
        ));
    }
    if n_phases == 0 {
        return Err(Error::InvalidSpec("need at least one phase".into()));
    }
    let basis = template.basis()?;
    let phases = draw_phases(n_phases, seed);
    let mut rows = Vec::with_capacity(delta_grid.len());
    for &delta in delta_grid {
        // Phases are independent; the indexed collect keeps results in draw
        // order, so the reduction does not depend on the thread count.
        let per_phase: Vec<f64> = phases
            .par_iter()
            .map(|&phase| {
                let spec = template.clone().with_strength(delta).with_phase(phase);
                let h = spec.build(&basis)?;
                let levels = eigenvalues_only(&h)?;
                Ok(r_statistic(levels.as_slice().expect("contiguous"), window)?.mean_r)
            })
            .collect::<Result<_>>()?;
        let mean = per_phase.iter().sum::<f64>() / n_phases as f64;
        let stderr = if n_phases > 1 {
            let var = per_phase.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
                / (n_phases - 1) as f64;
            (var / n_phases as f64).sqrt()
        } else {
            0.0
        };
        rows.push(MblScanRow {
            delta,
            mean_r: mean,
            stderr,
            n_realizations: n_phases,
        });
    }
    let peak_mean_r = rows
        .iter()
        .map(|r| r.mean_r)
        .fold(f64::NEG_INFINITY, f64::max);
    let crossing = crossing_delta(&rows, MBL_CROSSING_R);
    Ok(MblScan {
        rows,
        crossing,
        peak_mean_r,
        efficient: peak_mean_r >= EFFICIENT_PEAK_R,
    })
}

/// Sorted iid-uniform levels; their gap ratios realize Poisson statistics.
pub fn poisson_levels(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    levels.sort_by(f64::total_cmp);
    levels
}

/// Spectrum of one GOE draw: symmetrized standard-normal matrix (M + M^T)/2.
pub fn goe_levels(dim: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Array2::from_shape_fn((dim, dim), |_| rng.sample::<f64, _>(StandardNormal));
    let sym = (&m + &m.t()) / 2.0;
    let levels = sym.eigvalsh(UPLO::Lower).map_err(|_| Error::NonConvergence {
        fingerprint: format!("goe dim {dim} seed {seed}"),
    })?;
    Ok(levels.to_vec())
}
