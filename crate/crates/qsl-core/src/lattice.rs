use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::HamiltonianMatrix;

/// (sqrt(5) - 1) / 2, the default quasiperiodic wavenumber.
pub const INVERSE_GOLDEN_RATIO: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    /// Quasiperiodic cosine: eps_n = cos(2*pi*alpha*n + phase), n = 1..N.
    AubryAndre { alpha: f64, phase: f64 },
    /// Linear tilt: eps_n = n, n = 1..N.
    Stark,
}

/// Single-particle chain: H = -J sum_j (|j+1><j| + h.c.) + strength * sum_j eps_j |j><j|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub hopping: f64,
    pub strength: f64,
    pub potential: Potential,
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn aubry_andre(n_sites: usize, hopping: f64, strength: f64) -> Self {
        LatticeSpec {
            n_sites,
            hopping,
            strength,
            potential: Potential::AubryAndre {
                alpha: INVERSE_GOLDEN_RATIO,
                phase: 0.0,
            },
            boundary: Boundary::Open,
        }
    }

    pub fn stark(n_sites: usize, hopping: f64, strength: f64) -> Self {
        LatticeSpec {
            n_sites,
            hopping,
            strength,
            potential: Potential::Stark,
            boundary: Boundary::Open,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        if let Potential::AubryAndre { alpha, .. } = self.potential {
            self.potential = Potential::AubryAndre { alpha, phase };
        }
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_strength(mut self, strength: f64) -> Self {
        self.strength = strength;
        self
    }

    /// On-site energy eps_n for 1-based site index n.
    pub fn on_site(&self, n: usize) -> f64 {
        debug_assert!(n >= 1 && n <= self.n_sites);
        match self.potential {
            Potential::AubryAndre { alpha, phase } => {
                (2.0 * std::f64::consts::PI * alpha * n as f64 + phase).cos()
            }
            Potential::Stark => n as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidSpec(format!(
                "n_sites = {} (need at least 2)",
                self.n_sites
            )));
        }
        if !self.hopping.is_finite() || !self.strength.is_finite() {
            return Err(Error::InvalidSpec(
                "hopping and potential strength must be finite".into(),
            ));
        }
        if let Potential::AubryAndre { alpha, phase } = self.potential {
            if !alpha.is_finite() || !phase.is_finite() {
                return Err(Error::InvalidSpec("alpha and phase must be finite".into()));
            }
        }
        Ok(())
    }

    /// Builds the dense symmetric matrix in the site basis.
    pub fn build(&self) -> Result<HamiltonianMatrix> {
        self.validate()?;
        let n = self.n_sites;
        let mut triplets = Vec::with_capacity(3 * n);
        for j in 0..n {
            triplets.push((j, j, self.strength * self.on_site(j + 1)));
        }
        for j in 0..n - 1 {
            triplets.push((j, j + 1, -self.hopping));
            triplets.push((j + 1, j, -self.hopping));
        }
        // n == 2 already carries the single bond; a wrap link would double it
        if self.boundary == Boundary::Periodic && n > 2 {
            triplets.push((0, n - 1, -self.hopping));
            triplets.push((n - 1, 0, -self.hopping));
        }
        HamiltonianMatrix::from_triplets(n, n, &triplets)
    }
}
