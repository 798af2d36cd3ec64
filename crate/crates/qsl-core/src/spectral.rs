use ndarray::{Array1, Array2, ArrayView1};
use ndarray_linalg::{EigValsh, Eigh, UPLO};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::HamiltonianMatrix;

/// Full dense diagonalization is used up to this dimension; extremal eigenvalues
/// come from a Lanczos iteration above it.
pub const DENSE_DIAG_LIMIT: usize = 4000;

/// Per-eigenpair reconstruction residual allowance, relative to the Frobenius norm.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Max-norm allowance on V^T V - I.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Normalized state with complex amplitudes.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Array1<Complex64>,
}

impl StateVector {
    pub fn new(amps: Array1<Complex64>) -> Result<Self> {
        let norm2: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if !norm2.is_finite() || norm2 <= 0.0 {
            return Err(Error::InvalidSpec("state has no finite norm".into()));
        }
        let scale = norm2.sqrt();
        Ok(StateVector {
            amps: amps.mapv(|c| c / scale),
        })
    }

    pub fn from_real(v: ArrayView1<f64>) -> Result<Self> {
        Self::new(v.mapv(|x| Complex64::new(x, 0.0)))
    }

    /// Plane wave (1/sqrt(N)) sum_n e^{i k n} |n> with k = 2 pi mode / n_sites.
    pub fn plane_wave(n_sites: usize, mode: i64) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidSpec("plane wave needs at least one site".into()));
        }
        let k = 2.0 * std::f64::consts::PI * mode as f64 / n_sites as f64;
        let amps = Array1::from_iter(
            (1..=n_sites).map(|n| Complex64::from_polar(1.0, k * n as f64)),
        );
        Self::new(amps)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> ArrayView1<'_, Complex64> {
        self.amps.view()
    }

    /// |psi_n|^2 per basis entry.
    pub fn weights(&self) -> Array1<f64> {
        self.amps.mapv(|c| c.norm_sqr())
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.len(), other.len());
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Eigenvalues ascending; eigenvectors as matching columns, each with its
/// largest-magnitude component made positive.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn state(&self, index: usize) -> Result<StateVector> {
        if index >= self.dim() {
            return Err(Error::InvalidSpec(format!(
                "state index {index} outside spectrum of dimension {}",
                self.dim()
            )));
        }
        StateVector::from_real(self.eigenvectors.column(index))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateSelector {
    Ground,
    MidSpectrum,
    Index(usize),
}

impl StateSelector {
    pub fn resolve(&self, dim: usize) -> Result<usize> {
        let idx = match *self {
            StateSelector::Ground => 0,
            StateSelector::MidSpectrum => dim / 2,
            StateSelector::Index(i) => i,
        };
        if idx >= dim {
            return Err(Error::InvalidSpec(format!(
                "selector resolves to {idx}, dimension is {dim}"
            )));
        }
        Ok(idx)
    }

    pub fn label(&self) -> String {
        match self {
            StateSelector::Ground => "ground".into(),
            StateSelector::MidSpectrum => "mid".into(),
            StateSelector::Index(i) => format!("index{i}"),
        }
    }
}

impl std::str::FromStr for StateSelector {
    type Err = Error;

    /// Accepts `ground`, `mid`, `index<k>`, or a bare index.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground" => Ok(StateSelector::Ground),
            "mid" => Ok(StateSelector::MidSpectrum),
            other => {
                let digits = other.strip_prefix("index").unwrap_or(other);
                digits
                    .parse::<usize>()
                    .map(StateSelector::Index)
                    .map_err(|_| Error::Config(format!("unknown state selector {s:?}")))
            }
        }
    }
}

pub fn select_initial_state(
    decomp: &SpectralDecomposition,
    selector: StateSelector,
) -> Result<StateVector> {
    decomp.state(selector.resolve(decomp.dim())?)
}

/// Full decomposition with verified invariants. Above `DENSE_DIAG_LIMIT` the dense
/// path is refused; extremal information is still available via `extremal_eigenvalues`.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<SpectralDecomposition> {
    if h.dim() > DENSE_DIAG_LIMIT {
        return Err(Error::CapacityExceeded {
            dim: h.dim(),
            max: DENSE_DIAG_LIMIT,
        });
    }
    let dense = h.to_dense();
    let (eigenvalues, mut eigenvectors) = dense
        .eigh(UPLO::Lower)
        .map_err(|_| Error::NonConvergence {
            fingerprint: h.fingerprint(),
        })?;
    // sign convention: largest-magnitude component positive (first such on ties)
    for mut col in eigenvectors.columns_mut() {
        let mut best = 0usize;
        let mut best_mag = 0.0;
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > best_mag {
                best_mag = v.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
    let d = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };
    verify_decomposition(h, &d)?;
    Ok(d)
}

fn verify_decomposition(h: &HamiltonianMatrix, d: &SpectralDecomposition) -> Result<()> {
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (k, col) in d.eigenvectors.columns().into_iter().enumerate() {
        let hv = h.matvec(col);
        let lam = d.eigenvalues[k];
        let res: f64 = hv
            .iter()
            .zip(col.iter())
            .map(|(&a, &b)| (a - lam * b).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res / scale);
    }
    if worst > RESIDUAL_TOL {
        return Err(Error::InvariantViolation {
            check: "eigenpair reconstruction",
            residual: worst,
            allowed: RESIDUAL_TOL,
        });
    }
    let gram = d.eigenvectors.t().dot(&d.eigenvectors);
    let mut worst_g = 0.0f64;
    for i in 0..d.dim() {
        for j in 0..d.dim() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst_g = worst_g.max((gram[[i, j]] - target).abs());
        }
    }
    if worst_g > ORTHONORMALITY_TOL {
        return Err(Error::InvariantViolation {
            check: "eigenvector orthonormality",
            residual: worst_g,
            allowed: ORTHONORMALITY_TOL,
        });
    }
    for w in d.eigenvalues.windows(2) {
        if w[0] > w[1] {
            return Err(Error::InvariantViolation {
                check: "eigenvalue ordering",
                residual: w[0] - w[1],
                allowed: 0.0,
            });
        }
    }
    Ok(())
}

/// Eigenvalues without vectors; same dimension cap as the full decomposition.
pub fn eigenvalues_only(h: &HamiltonianMatrix) -> Result<Array1<f64>> {
    if h.dim() > DENSE_DIAG_LIMIT {
        return Err(Error::CapacityExceeded {
            dim: h.dim(),
            max: DENSE_DIAG_LIMIT,
        });
    }
    h.to_dense()
        .eigvalsh(UPLO::Lower)
        .map_err(|_| Error::NonConvergence {
            fingerprint: h.fingerprint(),
        })
}

/// (E_0, E_max). Tridiagonal matrices (open chains) get exact Sturm bisection
/// at any size; everything else solves densely up to `DENSE_DIAG_LIMIT` and
/// falls back to Lanczos beyond it.
pub fn extremal_eigenvalues(h: &HamiltonianMatrix) -> Result<(f64, f64)> {
    if let Some((diag, off)) = h.tridiagonal_bands() {
        return Ok(tridiag_extremes(&diag, &off));
    }
    if h.dim() <= DENSE_DIAG_LIMIT {
        let vals = eigenvalues_only(h)?;
        return Ok((vals[0], vals[vals.len() - 1]));
    }
    lanczos_extremal(h)
}

/// Lanczos with full reorthogonalization, for large sparse matrices that are
/// not banded (periodic wrap links). Band-edge clusters tighter than ~1e-4 of
/// the spectral width converge slowly, so this path delivers bound-quality
/// edges rather than spectral-analysis precision; the exact banded route
/// covers the chains where such clusters occur.
fn lanczos_extremal(h: &HamiltonianMatrix) -> Result<(f64, f64)> {
    let dim = h.dim();
    let max_steps = 400.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab5);
    let mut v: Array1<f64> = Array1::from_iter((0..dim).map(|_| rng.random_range(-1.0..1.0)));
    let norm = v.dot(&v).sqrt();
    v.mapv_inplace(|x| x / norm);

    let mut basis: Vec<Array1<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut prev_edges: Option<(f64, f64)> = None;
    let mut stable_checks = 0;

    for step in 0..max_steps {
        let mut w = h.matvec(basis[step].view());
        let alpha = basis[step].dot(&w);
        alphas.push(alpha);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.scaled_add(-c, b);
            }
        }
        let beta = w.dot(&w).sqrt();
        if step >= 10 || beta < 1e-14 {
            let (lo, hi) = tridiag_extremes(&alphas, &betas);
            if beta < 1e-14 {
                // Krylov space is exhausted; the tridiagonal is exact.
                return Ok((lo, hi));
            }
            if let Some((plo, phi)) = prev_edges {
                let scale = hi.abs().max(lo.abs()).max(1.0);
                // Edge estimates plateau while a cluster resolves, so one
                // quiet step is not convergence; demand a sustained stretch.
                if (lo - plo).abs() < 1e-13 * scale && (hi - phi).abs() < 1e-13 * scale {
                    stable_checks += 1;
                    if stable_checks >= 3 {
                        return Ok((lo, hi));
                    }
                } else {
                    stable_checks = 0;
                }
            }
            prev_edges = Some((lo, hi));
        }
        betas.push(beta);
        w.mapv_inplace(|x| x / beta);
        basis.push(w);
    }
    let (lo, hi) = tridiag_extremes(&alphas, &betas);
    Ok((lo, hi))
}

/// Extremes of the symmetric tridiagonal via bisection on the Sturm sequence.
fn tridiag_extremes(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, &d) in diag.iter().enumerate() {
        let b = |k: i64| -> f64 {
            let k = k as usize;
            if k < off.len() && k < n - 1 {
                off[k].abs()
            } else {
                0.0
            }
        };
        let left = b(i as i64 - 1);
        let radius = left + b(i as i64);
        lo = lo.min(d - radius);
        hi = hi.max(d + radius);
    }
    let count_below = |x: f64| -> usize {
        // Sturm: number of eigenvalues < x
        let mut count = 0;
        let mut d = 1.0f64;
        for i in 0..n {
            let off2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
            d = diag[i] - x - off2 / d;
            if d == 0.0 {
                d = 1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let bisect = |target: usize, mut a: f64, mut b: f64| -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if count_below(m) > target {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    };
    (bisect(0, lo, hi), bisect(n - 1, lo, hi))
}

/// Scalar inputs of every speed bound: <H>, <H^2>, E_0, and (when the spectrum is
/// bounded numerically) E_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSet {
    pub mean_energy: f64,
    pub mean_square: f64,
    pub ground_energy: f64,
    pub max_energy: Option<f64>,
}

impl ObservableSet {
    /// Energy uncertainty; variance is clamped at zero against rounding.
    pub fn uncertainty(&self) -> f64 {
        (self.mean_square - self.mean_energy * self.mean_energy).max(0.0).sqrt()
    }

    /// <H> - E_0, the Margolus-Levitin denominator.
    pub fn shifted_mean(&self) -> f64 {
        self.mean_energy - self.ground_energy
    }
}

/// <H> and <H^2> through matrix application; spectrum edges from the decomposition.
pub fn observables(
    h: &HamiltonianMatrix,
    decomp: &SpectralDecomposition,
    psi: &StateVector,
) -> Result<ObservableSet> {
    if decomp.dim() != h.dim() {
        return Err(Error::DimensionMismatch(
            "decomposition does not match the matrix".into(),
        ));
    }
    let n = decomp.dim();
    observables_from_extremes(h, psi, decomp.eigenvalues[0], Some(decomp.eigenvalues[n - 1]))
}

/// Same scalars with externally supplied spectrum edges (extremal solves, or an
/// analytically unbounded model with no numerical E_max).
pub fn observables_from_extremes(
    h: &HamiltonianMatrix,
    psi: &StateVector,
    ground_energy: f64,
    max_energy: Option<f64>,
) -> Result<ObservableSet> {
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch(
            "state does not match the matrix".into(),
        ));
    }
    let hpsi = h.matvec_complex(psi.amplitudes());
    let mean_energy: f64 = psi
        .amplitudes()
        .iter()
        .zip(hpsi.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let mean_square: f64 = hpsi.iter().map(|c| c.norm_sqr()).sum();
    Ok(ObservableSet {
        mean_energy,
        mean_square,
        ground_energy,
        max_energy,
    })
}

/// w_n = |<v_n|psi>|^2 against the decomposition's eigenbasis.
pub fn overlap_weights(decomp: &SpectralDecomposition, psi: &StateVector) -> Result<Array1<f64>> {
    if psi.len() != decomp.dim() {
        return Err(Error::DimensionMismatch(
            "state does not match the decomposition".into(),
        ));
    }
    let re = psi.amplitudes().mapv(|c| c.re);
    let im = psi.amplitudes().mapv(|c| c.im);
    let pr = decomp.eigenvectors.t().dot(&re);
    let pi = decomp.eigenvectors.t().dot(&im);
    Ok(Array1::from_iter(
        pr.iter().zip(pi.iter()).map(|(&a, &b)| a * a + b * b),
    ))
}
