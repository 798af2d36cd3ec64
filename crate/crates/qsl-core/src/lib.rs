//! Quantum speed limits for quench dynamics on 1D fermionic lattices.
//!
//! The crate builds single-particle chains (quasiperiodic or linearly tilted
//! on-site potentials) and interacting half-filled chains, computes the
//! Mandelstam-Tamm and Margolus-Levitin orthogonalization bounds for quenched
//! initial states, evolves Loschmidt echoes against those bounds, and locates
//! localization transitions as crossings of bound-versus-detuning curves.
//! Closed-form extreme-quench results (Bessel-function echoes and their
//! zeros, finite-size corrections, analytic transition points) back every
//! numerical path as oracles.

pub mod cache;
pub mod diagnostics;
pub mod echo;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod qsl;
pub mod spectral;
pub mod transition;

pub use error::{Error, Result};
pub use fock::{FockBasis, ManyBodySpec};
pub use lattice::{Boundary, LatticeSpec, Potential, INVERSE_GOLDEN_RATIO};
pub use matrix::HamiltonianMatrix;
pub use spectral::{
    diagonalize, eigenvalues_only, extremal_eigenvalues, observables, observables_from_extremes,
    overlap_weights, select_initial_state, ObservableSet, SpectralDecomposition, StateSelector,
    StateVector,
};

pub use echo::{
    find_zeros, first_zero_vs_delta, grid_points_for, loschmidt_trace, stepped_echo,
    EchoEvaluator, EchoTrace, SweepRow, ZERO_THRESHOLD,
};
pub use oracle::{
    analytic_transition, bessel_j0, bessel_j0_zeros, bessel_j1, cosine_square_sum,
    extreme_quench, finite_size_g, finite_size_uncertainty, sinc_echo, ExtremeQuenchPrediction,
    ModelKind, Parameter, QuenchDirection,
};
pub use qsl::{
    bounds_at_overlap, classify_regime, crossover_time, echo_envelopes, envelope_ml, envelope_mt,
    tau_qsl, OverlapBounds, QslReport, Regime,
};

pub use diagnostics::{
    crossing_delta, draw_phases, goe_levels, mbl_r_scan, mean_npr, npr, poisson_levels,
    r_statistic, EigenstateNpr, MblScan, MblScanRow, SpectrumStats, DEFAULT_R_WINDOW,
    EFFICIENT_PEAK_R, GOE_MEAN_R, MBL_CROSSING_R, POISSON_MEAN_R,
};
pub use transition::{
    find_transition, mbl_transition, qsl_curve, sample_curve, single_particle_transition,
    stark_scaling_study, MblQuench, QslCurve, ScalingPoint, ScalingStudy, SingleParticleQuench,
    TauCurve, TransitionResult, TRANSITION_REL_TOL,
};
