use rayon::prelude::*;

use crate::diagnostics::draw_phases;
use crate::error::{Error, Result};
use crate::fock::{FockBasis, ManyBodySpec};
use crate::lattice::{LatticeSpec, Potential};
use crate::oracle::{analytic_transition, ModelKind};
use crate::qsl::tau_qsl;
use crate::spectral::{
    diagonalize, extremal_eigenvalues, observables_from_extremes, select_initial_state,
    StateSelector, StateVector,
};

/// Bisection stops once the bracket width falls below this fraction of the
/// midpoint.
pub const TRANSITION_REL_TOL: f64 = 1e-4;

const MAX_BISECTIONS: usize = 200;

/// Orthogonalization bound as a function of the post-quench detuning, for one
/// frozen initial state. Curves from opposite phases cross at the transition.
pub trait TauCurve {
    fn tau_at(&self, delta_f: f64) -> Result<f64>;
    fn label(&self) -> String;
}

/// Single-particle quench: one eigenstate of the chain at `delta_i`, evolved
/// under the chain at the probed detuning.
pub struct SingleParticleQuench {
    template: LatticeSpec,
    psi0: StateVector,
    delta_i: f64,
    selector: StateSelector,
}

impl SingleParticleQuench {
    pub fn new(template: &LatticeSpec, delta_i: f64, selector: StateSelector) -> Result<Self> {
        let pre = template.clone().with_strength(delta_i).build()?;
        let decomp = diagonalize(&pre)?;
        let psi0 = select_initial_state(&decomp, selector)?;
        Ok(SingleParticleQuench {
            template: template.clone(),
            psi0,
            delta_i,
            selector,
        })
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.psi0
    }
}

impl TauCurve for SingleParticleQuench {
    fn tau_at(&self, delta_f: f64) -> Result<f64> {
        let post = self.template.clone().with_strength(delta_f).build()?;
        let (e0, emax) = extremal_eigenvalues(&post)?;
        let obs = observables_from_extremes(&post, &self.psi0, e0, Some(emax))?;
        Ok(tau_qsl(&obs)?.tau_qsl)
    }

    fn label(&self) -> String {
        let model = match self.template.potential {
            Potential::AubryAndre { .. } => "aubry-andre",
            Potential::Stark => "stark",
        };
        format!(
            "{model} N={} delta_i={} state={}",
            self.template.n_sites,
            self.delta_i,
            self.selector.label()
        )
    }
}

/// Interacting quench: phase-averaged bound over ground states of the chain
/// at `delta_i`, one per quasiperiodic phase realization.
pub struct MblQuench {
    template: ManyBodySpec,
    basis: FockBasis,
    phases: Vec<f64>,
    states: Vec<StateVector>,
    delta_i: f64,
}

impl MblQuench {
    pub fn new(
        template: &ManyBodySpec,
        delta_i: f64,
        n_phases: usize,
        seed: u64,
    ) -> Result<Self> {
        if n_phases == 0 {
            return Err(Error::InvalidSpec("need at least one phase".into()));
        }
        let basis = template.basis()?;
        let phases = draw_phases(n_phases, seed);
        let states: Vec<StateVector> = phases
            .par_iter()
            .map(|&phase| {
                let spec = template.clone().with_strength(delta_i).with_phase(phase);
                let h = spec.build(&basis)?;
                let decomp = diagonalize(&h)?;
                select_initial_state(&decomp, StateSelector::Ground)
            })
            .collect::<Result<_>>()?;
        Ok(MblQuench {
            template: template.clone(),
            basis,
            phases,
            states,
            delta_i,
        })
    }

    pub fn n_phases(&self) -> usize {
        self.phases.len()
    }
}

impl TauCurve for MblQuench {
    /// Arithmetic mean of the per-realization bound, summed in draw order so
    /// the result does not depend on the thread count.
    fn tau_at(&self, delta_f: f64) -> Result<f64> {
        let taus: Vec<f64> = self
            .phases
            .par_iter()
            .zip(&self.states)
            .map(|(&phase, psi0)| {
                let spec = self
                    .template
                    .clone()
                    .with_strength(delta_f)
                    .with_phase(phase);
                let h = spec.build(&self.basis)?;
                let (e0, emax) = extremal_eigenvalues(&h)?;
                let obs = observables_from_extremes(&h, psi0, e0, Some(emax))?;
                Ok(tau_qsl(&obs)?.tau_qsl)
            })
            .collect::<Result<_>>()?;
        Ok(taus.iter().sum::<f64>() / taus.len() as f64)
    }

    fn label(&self) -> String {
        format!(
            "interacting N={} V={} delta_i={} phases={}",
            self.template.n_sites,
            self.template.interaction,
            self.delta_i,
            self.phases.len()
        )
    }
}

/// A curve sampled over a detuning grid. Grid points where the bound is
/// undefined (stationary initial state) hold `None`.
#[derive(Debug, Clone)]
pub struct QslCurve {
    pub delta_f: Vec<f64>,
    pub tau: Vec<Option<f64>>,
    pub label: String,
}

fn optional_tau(curve: &dyn TauCurve, delta_f: f64) -> Result<Option<f64>> {
    match curve.tau_at(delta_f) {
        Ok(tau) => Ok(Some(tau)),
        Err(Error::StationaryState) | Err(Error::MlUndefined(_)) => Ok(None),
        Err(other) => Err(other),
    }
}

/// Samples a curve over an ascending grid.
pub fn sample_curve(curve: &dyn TauCurve, grid: &[f64]) -> Result<QslCurve> {
    validate_grid(grid, 1)?;
    let mut tau = Vec::with_capacity(grid.len());
    for &d in grid {
        tau.push(optional_tau(curve, d)?);
    }
    Ok(QslCurve {
        delta_f: grid.to_vec(),
        tau,
        label: curve.label(),
    })
}

/// One-call wrapper: eigenstate of the chain at `delta_i`, bound sampled over
/// `grid`.
pub fn qsl_curve(
    template: &LatticeSpec,
    delta_i: f64,
    selector: StateSelector,
    grid: &[f64],
) -> Result<QslCurve> {
    let curve = SingleParticleQuench::new(template, delta_i, selector)?;
    sample_curve(&curve, grid)
}

#[derive(Debug, Clone, Copy)]
pub struct TransitionResult {
    pub delta_c: f64,
    /// Final bisection bracket; collapses to a point on an exact grid hit.
    pub bracket: (f64, f64),
    /// |tau_a - tau_b| at the reported crossing.
    pub residual: f64,
    pub iterations: usize,
}

fn validate_grid(grid: &[f64], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::InvalidSpec(format!(
            "grid needs at least {min_len} points, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(
            "grid must be strictly ascending".into(),
        ));
    }
    Ok(())
}

fn curve_difference(a: &dyn TauCurve, b: &dyn TauCurve, delta_f: f64) -> Result<f64> {
    Ok(a.tau_at(delta_f)? - b.tau_at(delta_f)?)
}

/// Crossing of two bound curves. The grid must bracket exactly one sign
/// change of tau_a - tau_b; bisection then re-evaluates both curves at every
/// midpoint until the bracket is narrower than `rel_tol` times its midpoint.
pub fn find_transition(
    a: &dyn TauCurve,
    b: &dyn TauCurve,
    grid: &[f64],
    rel_tol: f64,
) -> Result<TransitionResult> {
    validate_grid(grid, 2)?;
    if rel_tol <= 0.0 || rel_tol.is_nan() {
        return Err(Error::InvalidSpec(format!(
            "relative tolerance {rel_tol} must be positive"
        )));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &d in grid {
        let (ta, tb) = (optional_tau(a, d)?, optional_tau(b, d)?);
        if let (Some(ta), Some(tb)) = (ta, tb) {
            points.push((d, ta - tb));
        }
    }
    if let Some(&(d, _)) = points.iter().find(|&&(_, diff)| diff == 0.0) {
        return Ok(TransitionResult {
            delta_c: d,
            bracket: (d, d),
            residual: 0.0,
            iterations: 0,
        });
    }
    let brackets: Vec<(f64, f64)> = points
        .windows(2)
        .filter(|w| w[0].1 * w[1].1 < 0.0)
        .map(|w| (w[0].0, w[1].0))
        .collect();
    let (mut lo, mut hi) = match brackets.len() {
        0 => return Err(Error::NoIntersection),
        1 => brackets[0],
        _ => return Err(Error::AmbiguousIntersection(brackets)),
    };
    let mut diff_lo = points
        .iter()
        .find(|&&(d, _)| d == lo)
        .expect("bracket endpoint came from the grid")
        .1;
    let mut iterations = 0;
    while hi - lo > rel_tol * 0.5 * (lo + hi) && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let diff_mid = curve_difference(a, b, mid)?;
        iterations += 1;
        if diff_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if diff_mid * diff_lo > 0.0 {
            lo = mid;
            diff_lo = diff_mid;
        } else {
            hi = mid;
        }
    }
    let delta_c = 0.5 * (lo + hi);
    let residual = curve_difference(a, b, delta_c)?.abs();
    Ok(TransitionResult {
        delta_c,
        bracket: (lo, hi),
        residual,
        iterations,
    })
}

/// Crossing for a single-particle model: eigenstates of a delocalizing seed
/// (`delta_i_deloc`) and a localizing seed (`delta_i_loc`), same selector.
pub fn single_particle_transition(
    template: &LatticeSpec,
    delta_i_deloc: f64,
    delta_i_loc: f64,
    selector: StateSelector,
    grid: &[f64],
    rel_tol: f64,
) -> Result<TransitionResult> {
    let deloc = SingleParticleQuench::new(template, delta_i_deloc, selector)?;
    let loc = SingleParticleQuench::new(template, delta_i_loc, selector)?;
    find_transition(&deloc, &loc, grid, rel_tol)
}

/// Crossing for the interacting chain, ground states on both sides, matched
/// phase realizations.
pub fn mbl_transition(
    template: &ManyBodySpec,
    delta_i_loc: f64,
    grid: &[f64],
    n_phases: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<TransitionResult> {
    let deloc = MblQuench::new(template, 0.0, n_phases, seed)?;
    let loc = MblQuench::new(template, delta_i_loc, n_phases, seed)?;
    find_transition(&deloc, &loc, grid, rel_tol)
}

#[derive(Debug, Clone, Copy)]
pub struct ScalingPoint {
    pub n_sites: usize,
    pub delta_c: f64,
    pub analytic: f64,
}

/// Size dependence of the tilted-chain crossing. `slope` is the least-squares
/// slope of ln(delta_c) against ln(N); the closed form gives -1 as N grows.
#[derive(Debug, Clone)]
pub struct ScalingStudy {
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
}

pub fn stark_scaling_study(
    sizes: &[usize],
    hopping: f64,
    delta_i_loc: f64,
    grid: &[f64],
    rel_tol: f64,
) -> Result<ScalingStudy> {
    if sizes.len() < 2 {
        return Err(Error::InvalidSpec(
            "scaling needs at least two system sizes".into(),
        ));
    }
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let template = LatticeSpec::stark(n, hopping, 0.0);
        let result = single_particle_transition(
            &template,
            0.0,
            delta_i_loc,
            StateSelector::MidSpectrum,
            grid,
            rel_tol,
        )?;
        points.push(ScalingPoint {
            n_sites: n,
            delta_c: result.delta_c,
            analytic: analytic_transition(ModelKind::Stark, hopping, Some(n))?,
        });
    }
    let slope = log_log_slope(&points);
    Ok(ScalingStudy { points, slope })
}

fn log_log_slope(points: &[ScalingPoint]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.n_sites as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.delta_c.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Analytic<F: Fn(f64) -> Result<f64>> {
        f: F,
        name: &'static str,
    }

    impl<F: Fn(f64) -> Result<f64>> TauCurve for Analytic<F> {
        fn tau_at(&self, delta_f: f64) -> Result<f64> {
            (self.f)(delta_f)
        }

        fn label(&self) -> String {
            self.name.into()
        }
    }

    fn curve<F: Fn(f64) -> Result<f64>>(f: F, name: &'static str) -> Analytic<F> {
        Analytic { f, name }
    }

    #[test]
    fn reciprocal_and_linear_curves_cross_at_one() {
        let a = curve(|d| Ok(1.0 / d), "reciprocal");
        let b = curve(Ok, "linear");
        let grid = [0.25, 0.7, 1.9, 3.1];
        let result = find_transition(&a, &b, &grid, TRANSITION_REL_TOL).unwrap();
        assert_abs_diff_eq!(result.delta_c, 1.0, epsilon = 2e-4);
        assert!(result.residual < 5e-4);
        assert!(result.iterations > 5);
        assert!(result.bracket.0 >= 0.7 && result.bracket.1 <= 1.9);
    }

    #[test]
    fn parallel_curves_report_no_intersection() {
        let a = curve(Ok, "linear");
        let b = curve(|d| Ok(d + 1.0), "shifted");
        let err = find_transition(&a, &b, &[0.5, 1.0, 2.0], TRANSITION_REL_TOL).unwrap_err();
        assert!(matches!(err, Error::NoIntersection));
    }

    #[test]
    fn multiple_crossings_are_reported_with_brackets() {
        let a = curve(
            |d| Ok(5.0 + (d - 1.0) * (d - 2.0) * (d - 3.0) / 10.0),
            "cubic",
        );
        let b = curve(|_| Ok(5.0), "flat");
        let err = find_transition(&a, &b, &[0.5, 1.5, 2.5, 3.5], TRANSITION_REL_TOL).unwrap_err();
        match err {
            Error::AmbiguousIntersection(brackets) => assert_eq!(brackets.len(), 3),
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn exact_grid_hit_short_circuits() {
        let a = curve(Ok, "linear");
        let b = curve(|d| Ok(2.0 - d), "mirrored");
        let result = find_transition(&a, &b, &[0.5, 1.0, 1.5], TRANSITION_REL_TOL).unwrap();
        assert_eq!(result.delta_c, 1.0);
        assert_eq!(result.iterations, 0);
        assert_eq!(result.residual, 0.0);
        assert_eq!(result.bracket, (1.0, 1.0));
    }

    #[test]
    fn undefined_grid_points_are_skipped() {
        let a = curve(
            |d| {
                if d < 0.4 {
                    Err(Error::StationaryState)
                } else {
                    Ok(1.0 / d)
                }
            },
            "gapped reciprocal",
        );
        let b = curve(Ok, "linear");
        let grid = [0.25, 0.7, 1.9, 3.1];
        let result = find_transition(&a, &b, &grid, TRANSITION_REL_TOL).unwrap();
        assert_abs_diff_eq!(result.delta_c, 1.0, epsilon = 2e-4);
    }

    #[test]
    fn bisection_is_deterministic_to_the_bit() {
        let run = || {
            let a = curve(|d| Ok(1.0 + (3.0 * d).sin().powi(2) / d), "wavy");
            let b = curve(|d| Ok(d.sqrt()), "root");
            find_transition(&a, &b, &[0.8, 2.9], 1e-6).unwrap()
        };
        let (x, y) = (run(), run());
        assert_eq!(x.delta_c.to_bits(), y.delta_c.to_bits());
        assert_eq!(x.residual.to_bits(), y.residual.to_bits());
        assert_eq!(x.iterations, y.iterations);
    }

    #[test]
    fn sampled_curve_holds_none_where_stationary() {
        let a = curve(
            |d| {
                if d == 1.0 {
                    Err(Error::StationaryState)
                } else {
                    Ok(d)
                }
            },
            "punctured",
        );
        let sampled = sample_curve(&a, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(sampled.tau[0], Some(0.5));
        assert_eq!(sampled.tau[1], None);
        assert_eq!(sampled.tau[2], Some(2.0));
        assert_eq!(sampled.label, "punctured");
    }

    #[test]
    fn quasiperiodic_crossing_sits_at_twice_the_hopping() {
        let template = LatticeSpec::aubry_andre(120, 1.0, 0.0);
        let result = single_particle_transition(
            &template,
            0.0,
            1e4,
            StateSelector::MidSpectrum,
            &[1.0, 1.5, 2.5, 3.0],
            TRANSITION_REL_TOL,
        )
        .unwrap();
        assert!(
            (result.delta_c - 2.0).abs() < 0.05,
            "delta_c = {}",
            result.delta_c
        );
    }

    #[test]
    fn tilted_crossing_tracks_the_closed_form() {
        let n = 60;
        let template = LatticeSpec::stark(n, 1.0, 0.0);
        let expected = analytic_transition(ModelKind::Stark, 1.0, Some(n)).unwrap();
        let result = single_particle_transition(
            &template,
            0.0,
            1e4,
            StateSelector::MidSpectrum,
            &[0.02, 0.04, 0.08, 0.16, 0.32],
            TRANSITION_REL_TOL,
        )
        .unwrap();
        assert!(
            (result.delta_c / expected - 1.0).abs() < 0.1,
            "delta_c = {}, closed form = {expected}",
            result.delta_c
        );
    }

    #[test]
    fn tilted_crossing_scales_inversely_with_size() {
        let grid = [0.02, 0.05, 0.12, 0.3];
        let study = stark_scaling_study(&[40, 60, 80], 1.0, 1e4, &grid, TRANSITION_REL_TOL)
            .unwrap();
        assert_eq!(study.points.len(), 3);
        assert!(
            (study.slope + 1.0).abs() < 0.1,
            "slope = {}",
            study.slope
        );
        for p in &study.points {
            assert!((p.delta_c / p.analytic - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn interacting_curve_is_seed_deterministic() {
        let template = ManyBodySpec::half_filled(8, 1.0, 0.0, 2.0);
        let a = MblQuench::new(&template, 0.0, 3, 17).unwrap();
        let b = MblQuench::new(&template, 0.0, 3, 17).unwrap();
        let (ta, tb) = (a.tau_at(2.5).unwrap(), b.tau_at(2.5).unwrap());
        assert_eq!(ta.to_bits(), tb.to_bits());
        assert_eq!(a.n_phases(), 3);
    }

    #[test]
    fn grid_validation_rejects_descending_input() {
        let a = curve(Ok, "linear");
        let b = curve(|d| Ok(1.0 / d), "reciprocal");
        assert!(find_transition(&a, &b, &[2.0, 1.0], TRANSITION_REL_TOL).is_err());
        assert!(find_transition(&a, &b, &[1.0], TRANSITION_REL_TOL).is_err());
        assert!(find_transition(&a, &b, &[0.5, 1.5], 0.0).is_err());
    }
}
