use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::INVERSE_GOLDEN_RATIO;
use crate::matrix::HamiltonianMatrix;

/// Guards the cost of exact many-body enumeration; C(24,12) = 2_704_156 sits just under.
pub const MAX_FOCK_DIM: usize = 3_000_000;

/// Occupation basis for spinless fermions at fixed particle number.
/// Masks are bit patterns (bit j = site j occupied, 0-based), sorted ascending.
#[derive(Debug, Clone)]
pub struct FockBasis {
    n_sites: usize,
    n_particles: usize,
    masks: Vec<u64>,
}

impl FockBasis {
    pub fn new(n_sites: usize, n_particles: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > 63 {
            return Err(Error::InvalidSpec(format!(
                "n_sites = {n_sites} outside the supported 1..=63 range"
            )));
        }
        if n_particles > n_sites {
            return Err(Error::InvalidSpec(format!(
                "n_particles = {n_particles} exceeds n_sites = {n_sites}"
            )));
        }
        let dim = binomial(n_sites, n_particles)
            .filter(|&d| d <= MAX_FOCK_DIM as u64)
            .ok_or(Error::CapacityExceeded {
                dim: usize::MAX,
                max: MAX_FOCK_DIM,
            })? as usize;
        let mut masks = Vec::with_capacity(dim);
        if n_particles == 0 {
            masks.push(0);
        } else {
            // Gosper's hack walks fixed-popcount masks in ascending order
            let mut m: u64 = (1 << n_particles) - 1;
            let limit: u64 = 1 << n_sites;
            while m < limit {
                masks.push(m);
                let c = m & m.wrapping_neg();
                let r = m + c;
                if r >= limit || c == 0 {
                    break;
                }
                m = r | (((m ^ r) >> 2) / c);
            }
        }
        debug_assert_eq!(masks.len(), dim);
        Ok(FockBasis {
            n_sites,
            n_particles,
            masks,
        })
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn mask(&self, index: usize) -> u64 {
        self.masks[index]
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Index of a mask in the sorted basis.
    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.masks.binary_search(&mask).ok()
    }
}

/// Interacting chain in an occupation basis:
/// ```text
/// H = -J sum_{j=1}^{N-1} (c+_j c_{j+1} + h.c.)
///   + strength * sum_j cos(2 pi alpha j + phase) n_j
///   + interaction * sum_{j=1}^{N-1} n_j n_{j+1}
/// ```
/// with the quasiperiodic on-site potential and open boundaries throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyBodySpec {
    pub n_sites: usize,
    pub n_particles: usize,
    pub hopping: f64,
    pub strength: f64,
    pub interaction: f64,
    pub alpha: f64,
    pub phase: f64,
}

impl ManyBodySpec {
    pub fn half_filled(n_sites: usize, hopping: f64, strength: f64, interaction: f64) -> Self {
        ManyBodySpec {
            n_sites,
            n_particles: n_sites / 2,
            hopping,
            strength,
            interaction,
            alpha: INVERSE_GOLDEN_RATIO,
            phase: 0.0,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_strength(mut self, strength: f64) -> Self {
        self.strength = strength;
        self
    }

    pub fn on_site(&self, n: usize) -> f64 {
        (2.0 * std::f64::consts::PI * self.alpha * n as f64 + self.phase).cos()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidSpec(format!(
                "n_sites = {} (need at least 2)",
                self.n_sites
            )));
        }
        for (name, v) in [
            ("hopping", self.hopping),
            ("strength", self.strength),
            ("interaction", self.interaction),
            ("alpha", self.alpha),
            ("phase", self.phase),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<FockBasis> {
        FockBasis::new(self.n_sites, self.n_particles)
    }

    /// Builds the matrix over `basis`. Nearest-neighbor hops of a site-ordered fermion
    /// string cross no occupied sites, so every hop amplitude is exactly -J.
    pub fn build(&self, basis: &FockBasis) -> Result<HamiltonianMatrix> {
        self.validate()?;
        if basis.n_sites() != self.n_sites || basis.n_particles() != self.n_particles {
            return Err(Error::DimensionMismatch(
                "basis does not match the spec's sites/particles".into(),
            ));
        }
        let n = self.n_sites;
        let eps: Vec<f64> = (1..=n).map(|j| self.on_site(j)).collect();
        let dim = basis.dim();
        let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(dim * (n + 1) / 2);
        for (row, &m) in basis.masks().iter().enumerate() {
            let mut diag = 0.0;
            for (j, &e) in eps.iter().enumerate() {
                if m >> j & 1 == 1 {
                    diag += self.strength * e;
                    if j + 1 < n && m >> (j + 1) & 1 == 1 {
                        diag += self.interaction;
                    }
                }
            }
            triplets.push((row, row, diag));
            for j in 0..n - 1 {
                let pair = m >> j & 0b11;
                if pair == 0b01 || pair == 0b10 {
                    let m2 = m ^ (0b11 << j);
                    debug_assert_eq!(m2.count_ones(), m.count_ones());
                    let col = basis
                        .index_of(m2)
                        .expect("hopped mask stays in the fixed-number basis");
                    if col > row {
                        triplets.push((row, col, -self.hopping));
                        triplets.push((col, row, -self.hopping));
                    }
                }
            }
        }
        HamiltonianMatrix::from_triplets(dim, n, &triplets)
    }
}

fn binomial(n: usize, k: usize) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u64)?
            .checked_div((i + 1) as u64)?;
    }
    Some(acc)
}
