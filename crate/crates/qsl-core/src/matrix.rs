use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Many-body matrices below this dimension are stored dense; sparse rows above.
pub const DENSE_STORAGE_LIMIT: usize = 2000;

#[derive(Debug, Clone)]
enum Storage {
    Dense(Array2<f64>),
    /// Compressed sparse rows. Row i occupies cols/vals[row_ptr[i]..row_ptr[i+1]].
    Sparse {
        row_ptr: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<f64>,
    },
}

/// Real symmetric Hamiltonian in site or Fock basis.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    dim: usize,
    n_sites: usize,
    storage: Storage,
}

impl HamiltonianMatrix {
    /// Wraps a dense symmetric matrix. `n_sites` is the lattice length, which for a
    /// many-body matrix differs from the matrix dimension.
    pub fn from_dense(a: Array2<f64>, n_sites: usize) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let m = Self {
            dim: a.nrows(),
            n_sites,
            storage: Storage::Dense(a),
        };
        m.check_symmetric()?;
        Ok(m)
    }

    /// Builds from coordinate triplets (duplicates are summed). Dense below
    /// `DENSE_STORAGE_LIMIT`, compressed rows otherwise.
    pub fn from_triplets(
        dim: usize,
        n_sites: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= dim || j >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({i}, {j}) outside dimension {dim}"
                )));
            }
        }
        if dim < DENSE_STORAGE_LIMIT {
            let mut a = Array2::zeros((dim, dim));
            for &(i, j, v) in triplets {
                a[[i, j]] += v;
            }
            return Self::from_dense(a, n_sites);
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_unstable_by_key(|t| (t.0, t.1));
        // merge duplicates
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(sorted.len());
        for (i, j, v) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for &(i, _, _) in &merged {
            row_ptr[i + 1] += 1;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let cols = merged.iter().map(|t| t.1).collect();
        let vals = merged.iter().map(|t| t.2).collect();
        let m = Self {
            dim,
            n_sites,
            storage: Storage::Sparse { row_ptr, cols, vals },
        };
        m.check_symmetric()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(a) => a[[i, j]],
            Storage::Sparse { row_ptr, cols, vals } => {
                let lo = row_ptr[i];
                let hi = row_ptr[i + 1];
                match cols[lo..hi].binary_search(&j) {
                    Ok(k) => vals[lo + k],
                    Err(_) => 0.0,
                }
            }
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match &self.storage {
            Storage::Dense(a) => a.clone(),
            Storage::Sparse { row_ptr, cols, vals } => {
                let mut a = Array2::zeros((self.dim, self.dim));
                for i in 0..self.dim {
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        a[[i, cols[k]]] = vals[k];
                    }
                }
                a
            }
        }
    }

    pub fn matvec(&self, x: ArrayView1<f64>) -> Array1<f64> {
        assert_eq!(x.len(), self.dim, "matvec dimension mismatch");
        match &self.storage {
            Storage::Dense(a) => a.dot(&x),
            Storage::Sparse { row_ptr, cols, vals } => {
                let mut y = Array1::zeros(self.dim);
                for i in 0..self.dim {
                    let mut acc = 0.0;
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        acc += vals[k] * x[cols[k]];
                    }
                    y[i] = acc;
                }
                y
            }
        }
    }

    /// Applies the real matrix to a complex vector via its real and imaginary parts.
    pub fn matvec_complex(&self, x: ArrayView1<Complex64>) -> Array1<Complex64> {
        let re = x.mapv(|c| c.re);
        let im = x.mapv(|c| c.im);
        let yre = self.matvec(re.view());
        let yim = self.matvec(im.view());
        Array1::from_iter(
            yre.iter()
                .zip(yim.iter())
                .map(|(&r, &i)| Complex64::new(r, i)),
        )
    }

    /// Bands `(diagonal, superdiagonal)` when every nonzero sits within one
    /// step of the diagonal. Open chains stay banded at any size; a periodic
    /// wrap link or interaction term breaks the pattern and yields `None`.
    pub fn tridiagonal_bands(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut diag = vec![0.0; self.dim];
        let mut off = vec![0.0; self.dim.saturating_sub(1)];
        let mut place = |i: usize, j: usize, v: f64| -> bool {
            if v == 0.0 || i == j + 1 {
                // symmetry already recorded the lower copy's mirror
                true
            } else if j == i {
                diag[i] = v;
                true
            } else if j == i + 1 {
                off[i] = v;
                true
            } else {
                false
            }
        };
        match &self.storage {
            Storage::Dense(a) => {
                for ((i, j), &v) in a.indexed_iter() {
                    if !place(i, j, v) {
                        return None;
                    }
                }
            }
            Storage::Sparse { row_ptr, cols, vals } => {
                for i in 0..self.dim {
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        if !place(i, cols[k], vals[k]) {
                            return None;
                        }
                    }
                }
            }
        }
        Some((diag, off))
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(a) => a.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Storage::Sparse { vals, .. } => vals.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    fn check_symmetric(&self) -> Result<()> {
        match &self.storage {
            Storage::Dense(a) => {
                for i in 0..self.dim {
                    for j in (i + 1)..self.dim {
                        if a[[i, j]] != a[[j, i]] {
                            return Err(Error::InvalidSpec(format!(
                                "matrix not symmetric at ({i}, {j}): {} vs {}",
                                a[[i, j]],
                                a[[j, i]]
                            )));
                        }
                    }
                }
            }
            Storage::Sparse { row_ptr, cols, vals } => {
                for i in 0..self.dim {
                    for k in row_ptr[i]..row_ptr[i + 1] {
                        let j = cols[k];
                        if self.get(j, i) != vals[k] {
                            return Err(Error::InvalidSpec(format!(
                                "matrix not symmetric at ({i}, {j})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Short content hash for error fingerprints and cache keys.
    pub fn fingerprint(&self) -> String {
        let mut h = Fnv1a::new();
        h.write_u64(self.dim as u64);
        h.write_u64(self.n_sites as u64);
        match &self.storage {
            Storage::Dense(a) => {
                for v in a.iter() {
                    h.write_u64(v.to_bits());
                }
            }
            Storage::Sparse { row_ptr, cols, vals } => {
                for &p in row_ptr {
                    h.write_u64(p as u64);
                }
                for &c in cols {
                    h.write_u64(c as u64);
                }
                for v in vals {
                    h.write_u64(v.to_bits());
                }
            }
        }
        format!("{:016x}", h.finish())
    }
}

/// FNV-1a, enough for fingerprints; not cryptographic.
pub struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Fnv1a(0xcbf29ce484222325)
    }

    pub fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}
