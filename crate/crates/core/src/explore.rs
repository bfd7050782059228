//! Seeded Fubini-Study sampling, Monte Carlo averages, scatter datasets and
//! the multi-start penalty optimizer used by every numerical search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::StateVector;
use crate::error::{Error, Result};
use crate::mubs::MUBasisSet;
use crate::potentials::{self, f_mus, f_sic};
use crate::HeisenbergGroup;
use crate::{C64, CMatrix, CVector};

/// Constraint residual required for a converged constrained solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Derives an independent stream seed from a master seed, splitmix64 style.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(stream.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream))
}

/// Stateful sampler of Fubini-Study uniform pure states. Identical
/// (seed, counter) pairs always yield identical states.
pub struct Sampler {
    dim: usize,
    master_seed: u64,
    counter: u64,
}

impl Sampler {
    pub fn new(dim: usize, master_seed: u64) -> Self {
        Self { dim, master_seed, counter: 0 }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Draws the state for the current counter and advances it.
    pub fn next_state(&mut self) -> StateVector {
        let state = self.state_at(self.counter);
        self.counter += 1;
        state
    }

    /// Draws the state for an explicit counter without touching internal state.
    pub fn state_at(&self, counter: u64) -> StateVector {
        let mut rng = stream_rng(self.master_seed, counter);
        sample_fs(self.dim, &mut rng)
    }
}

/// One Fubini-Study uniform pure state: 2d independent standard normal
/// draws form a complex vector, then normalize.
pub fn sample_fs<R: Rng>(dim: usize, rng: &mut R) -> StateVector {
    let amps = CVector::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    StateVector::normalized(amps).expect("normal draws are almost surely nonzero")
}

/// A Monte Carlo sample mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl MCEstimate {
    /// True when `value` lies within `k` standard errors of the mean.
    pub fn consistent_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Fubini-Study average of a functional by Monte Carlo. Deterministic for a
/// given seed: every sample has its own derived stream, and the reduction
/// order is fixed.
pub fn mc_average<F>(functional: F, dim: usize, n: usize, seed: u64) -> MCEstimate
where
    F: Fn(&StateVector) -> f64 + Sync,
{
    let values: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            functional(&sample_fs(dim, &mut rng))
        })
        .collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    MCEstimate { mean, stderr: (var / n as f64).sqrt(), samples: n }
}

/// Closed form of the Fubini-Study average of `f_SIC`. The two branches come
/// from the fourth moment of a displacement expectation: for odd primes the
/// squares of the displacements are again nontrivial displacements and only
/// mixed pairings contribute, while in the qubit cases every displacement
/// squares to a sign and the self-pairings survive as well.
pub fn fs_average_f_sic(d: usize) -> f64 {
    let df = d as f64;
    if d % 2 == 1 {
        df * (df - 1.0) / ((df + 2.0) * (df + 1.0))
    } else {
        2.0 * df * (df - 1.0) / ((df + 1.0) * (df + 3.0))
    }
}

/// Closed form of the Fubini-Study average of `f_MUS`.
pub fn fs_average_f_mus(d: usize) -> f64 {
    let df = d as f64;
    4.0 * (df - 1.0) / ((df + 3.0) * (df + 2.0) * (df + 1.0))
}

/// One component of a scatter mixture.
pub enum ScatterComponent {
    /// Fubini-Study uniform states.
    Uniform,
    /// Anchor state plus complex Gaussian noise of scale epsilon,
    /// renormalized.
    Near { anchor: StateVector, epsilon: f64 },
    /// `cos θ·ψ + sin θ·φ` over a uniform θ grid; traces boundary segments
    /// when the anchors are orthogonal stabilizer states.
    PairSuperposition { first: StateVector, second: StateVector },
}

/// One row of a scatter dataset.
#[derive(Debug, Clone, Serialize)]
pub struct ScatterRow {
    pub f_mus: f64,
    pub f_sic: f64,
    pub anchor: String,
}

/// Evaluates both potentials on `n` states drawn from each labelled mixture
/// component.
pub fn scatter_dataset(
    group: &HeisenbergGroup,
    mub: &MUBasisSet,
    components: &[(String, ScatterComponent, usize)],
    seed: u64,
) -> Result<Vec<ScatterRow>> {
    let d = group.dim();
    let mut jobs = Vec::new();
    for (c_idx, (label, component, n)) in components.iter().enumerate() {
        for i in 0..*n {
            jobs.push((c_idx, label.clone(), component, i));
        }
    }
    jobs.par_iter()
        .map(|(c_idx, label, component, i)| {
            let mut rng = stream_rng(seed, (*c_idx as u64) << 32 | *i as u64);
            let n_total = components[*c_idx].2;
            let psi = match component {
                ScatterComponent::Uniform => sample_fs(d, &mut rng),
                ScatterComponent::Near { anchor, epsilon } => {
                    let noise = CVector::from_fn(d, |_, _| {
                        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                    });
                    StateVector::normalized(anchor.amplitudes() + noise * C64::from(*epsilon))
                        .map_err(|e| Error::InvalidState(e.to_string()))?
                }
                ScatterComponent::PairSuperposition { first, second } => {
                    let theta = std::f64::consts::FRAC_PI_2 * (*i as f64)
                        / (n_total.max(2) - 1) as f64;
                    StateVector::normalized(
                        first.amplitudes() * C64::from(theta.cos())
                            + second.amplitudes() * C64::from(theta.sin()),
                    )?
                }
            };
            Ok(ScatterRow {
                f_mus: f_mus(mub, &psi)?,
                f_sic: f_sic(group, &psi)?,
                anchor: label.clone(),
            })
        })
        .collect()
}

/// A differentiable nonnegative functional of a pure state. Gradients use
/// the convention `df = Re⟨G, δψ⟩` before sphere projection.
pub trait Functional: Sync {
    fn value(&self, psi: &StateVector) -> Result<f64>;
    fn raw_gradient(&self, psi: &StateVector) -> Result<CVector>;
    fn name(&self) -> String;
}

/// `f_SIC`, optionally negated for maximization.
pub struct FSicFunctional<'a> {
    pub group: &'a HeisenbergGroup,
    pub negate: bool,
}

impl Functional for FSicFunctional<'_> {
    fn value(&self, psi: &StateVector) -> Result<f64> {
        let v = f_sic(self.group, psi)?;
        Ok(if self.negate { -v } else { v })
    }

    fn raw_gradient(&self, psi: &StateVector) -> Result<CVector> {
        let g = potentials::raw_gradient_f_sic(self.group, psi)?;
        Ok(if self.negate { -g } else { g })
    }

    fn name(&self) -> String {
        if self.negate { "neg_f_sic".into() } else { "f_sic".into() }
    }
}

/// Sum of `f_MUS` over a chosen list of stabilizer MUBs.
pub struct FMusSumFunctional<'a> {
    pub mubs: Vec<&'a MUBasisSet>,
}

impl Functional for FMusSumFunctional<'_> {
    fn value(&self, psi: &StateVector) -> Result<f64> {
        self.mubs.iter().map(|m| f_mus(m, psi)).sum()
    }

    fn raw_gradient(&self, psi: &StateVector) -> Result<CVector> {
        let mut g = CVector::zeros(psi.dim());
        for m in &self.mubs {
            g += potentials::raw_gradient_f_mus(m, psi)?;
        }
        Ok(g)
    }

    fn name(&self) -> String {
        format!("f_mus_sum[{}]", self.mubs.len())
    }
}

/// `max(f_MUS^{(i)}, f_MUS^{(j)})` for a pair of MUBs, with the subgradient
/// of the active branch.
pub struct FMusMaxPairFunctional<'a> {
    pub first: &'a MUBasisSet,
    pub second: &'a MUBasisSet,
}

impl Functional for FMusMaxPairFunctional<'_> {
    fn value(&self, psi: &StateVector) -> Result<f64> {
        Ok(f_mus(self.first, psi)?.max(f_mus(self.second, psi)?))
    }

    fn raw_gradient(&self, psi: &StateVector) -> Result<CVector> {
        if f_mus(self.first, psi)? >= f_mus(self.second, psi)? {
            potentials::raw_gradient_f_mus(self.first, psi)
        } else {
            potentials::raw_gradient_f_mus(self.second, psi)
        }
    }

    fn name(&self) -> String {
        "f_mus_max_pair".into()
    }
}

/// An orthonormal frame restricting the search to a subspace; coefficients
/// may additionally be forced real.
#[derive(Debug, Clone)]
pub struct Frame {
    columns: CMatrix,
    real_coefficients: bool,
}

impl Frame {
    pub fn new(columns: CMatrix, real_coefficients: bool) -> Result<Self> {
        let gram = columns.adjoint() * &columns;
        let m = columns.ncols();
        for i in 0..m {
            for j in 0..m {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - C64::from(expected)).norm() > 1e-12 {
                    return Err(Error::SubspaceConstructionFailure(
                        "frame is not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(Self { columns, real_coefficients })
    }

    pub fn from_states(states: &[StateVector], real_coefficients: bool) -> Result<Self> {
        let d = states[0].dim();
        let mat = CMatrix::from_fn(d, states.len(), |r, c| states[c][r]);
        Self::new(mat, real_coefficients)
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn coeff_dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn embed(&self, x: &CVector) -> CVector {
        &self.columns * x
    }

    /// Coefficients of a vector in the frame, without realification.
    pub fn pull_back_complex(&self, v: &CVector) -> CVector {
        self.columns.adjoint() * v
    }

    pub fn pull_back(&self, g: &CVector) -> CVector {
        let mut pulled = self.columns.adjoint() * g;
        if self.real_coefficients {
            pulled.apply(|z| *z = C64::from(z.re));
        }
        pulled
    }
}

/// Tuning knobs of the sphere descent.
#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
    pub init_step: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 600,
            grad_tol: 1e-11,
            armijo_c: 1e-4,
            shrink: 0.5,
            max_backtracks: 50,
            init_step: 0.2,
        }
    }
}

/// A constrained search: minimize the objective subject to every constraint
/// functional vanishing, optionally inside a subspace frame.
pub struct OptimizationProblem<'a> {
    pub dim: usize,
    pub objective: &'a dyn Functional,
    pub constraints: Vec<&'a dyn Functional>,
    pub frame: Option<Frame>,
    pub penalty_weights: Vec<f64>,
    pub restarts: usize,
    pub options: OptimizeOptions,
}

impl<'a> OptimizationProblem<'a> {
    pub fn unconstrained(dim: usize, objective: &'a dyn Functional, restarts: usize) -> Self {
        Self {
            dim,
            objective,
            constraints: Vec::new(),
            frame: None,
            penalty_weights: default_penalty_schedule(),
            restarts,
            options: OptimizeOptions::default(),
        }
    }
}

/// Default escalation: six stages growing tenfold.
pub fn default_penalty_schedule() -> Vec<f64> {
    vec![1e2, 1e3, 1e4, 1e5, 1e6, 1e7]
}

/// Outcome of one restart.
#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub state: StateVector,
    pub objective_value: f64,
    pub constraint_residual: f64,
    pub converged: bool,
}

/// Best result of a multi-start run plus restart statistics.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best: StateVector,
    pub objective_value: f64,
    pub max_constraint_residual: f64,
    pub converged: bool,
    pub restarts: usize,
    pub distinct_optima: usize,
    pub outcomes: Vec<RestartOutcome>,
}

fn random_coefficients<R: Rng>(m: usize, real: bool, rng: &mut R) -> CVector {
    let x = CVector::from_fn(m, |_, _| {
        if real {
            C64::from(rng.sample::<f64, _>(StandardNormal))
        } else {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        }
    });
    let n = x.norm();
    x / C64::from(n)
}

struct CoefficientSpace<'p> {
    problem: &'p OptimizationProblem<'p>,
}

impl CoefficientSpace<'_> {
    fn embed(&self, x: &CVector) -> Result<StateVector> {
        let psi = match &self.problem.frame {
            Some(f) => f.embed(x),
            None => x.clone(),
        };
        StateVector::new(psi)
    }

    fn real(&self) -> bool {
        self.problem.frame.as_ref().map_or(false, |f| f.real_coefficients)
    }

    fn coeff_dim(&self) -> usize {
        self.problem.frame.as_ref().map_or(self.problem.dim, Frame::coeff_dim)
    }

    fn penalized_value(&self, x: &CVector, weight: f64) -> Result<f64> {
        let psi = self.embed(x)?;
        let mut v = self.problem.objective.value(&psi)?;
        for c in &self.problem.constraints {
            v += weight * c.value(&psi)?;
        }
        Ok(v)
    }

    fn penalized_gradient(&self, x: &CVector, weight: f64) -> Result<CVector> {
        let psi = self.embed(x)?;
        let mut g = self.problem.objective.raw_gradient(&psi)?;
        for c in &self.problem.constraints {
            g += c.raw_gradient(&psi)? * C64::from(weight);
        }
        let pulled = match &self.problem.frame {
            Some(f) => f.pull_back(&g),
            None => g,
        };
        Ok(potentials::project_tangent(x, &pulled))
    }

    fn residual(&self, x: &CVector) -> Result<f64> {
        let psi = self.embed(x)?;
        let mut worst: f64 = 0.0;
        for c in &self.problem.constraints {
            worst = worst.max(c.value(&psi)?);
        }
        Ok(worst)
    }
}

/// Projected gradient descent with Barzilai-Borwein steps and Armijo
/// backtracking, on the unit sphere of the coefficient space.
fn descend(
    space: &CoefficientSpace<'_>,
    mut x: CVector,
    weight: f64,
    opts: &OptimizeOptions,
) -> Result<CVector> {
    let mut f = space.penalized_value(&x, weight)?;
    let mut g = space.penalized_gradient(&x, weight)?;
    let mut prev: Option<(CVector, CVector)> = None;
    for _ in 0..opts.max_iters {
        let gnorm = g.norm();
        if gnorm < opts.grad_tol {
            break;
        }
        let mut alpha = match &prev {
            Some((px, pg)) => {
                let s = &x - px;
                let y = &g - pg;
                let sy = s.dotc(&y).re;
                if sy.abs() > 1e-300 {
                    (s.dotc(&s).re / sy).abs().clamp(1e-12, 1e3)
                } else {
                    opts.init_step / gnorm.max(1.0)
                }
            }
            None => opts.init_step / gnorm.max(1.0),
        };
        let mut accepted = false;
        for _ in 0..opts.max_backtracks {
            let trial_raw = &x - &g * C64::from(alpha);
            let n = trial_raw.norm();
            if n > 1e-300 {
                let trial = trial_raw / C64::from(n);
                let ft = space.penalized_value(&trial, weight)?;
                if ft <= f - opts.armijo_c * alpha * gnorm * gnorm {
                    prev = Some((x.clone(), g.clone()));
                    x = trial;
                    f = ft;
                    g = space.penalized_gradient(&x, weight)?;
                    accepted = true;
                    break;
                }
            }
            alpha *= opts.shrink;
        }
        if !accepted {
            break;
        }
    }
    Ok(x)
}

fn run_restart(
    problem: &OptimizationProblem<'_>,
    seed: u64,
    restart: u64,
) -> Result<RestartOutcome> {
    let space = CoefficientSpace { problem };
    let mut rng = stream_rng(seed, restart);
    let mut x = random_coefficients(space.coeff_dim(), space.real(), &mut rng);
    if problem.constraints.is_empty() {
        x = descend(&space, x, 0.0, &problem.options)?;
    } else {
        for &w in &problem.penalty_weights {
            x = descend(&space, x, w, &problem.options)?;
        }
    }
    let psi = space.embed(&x)?;
    let objective_value = problem.objective.value(&psi)?;
    let constraint_residual = space.residual(&x)?;
    let grad_ok = {
        let w = problem.penalty_weights.last().copied().unwrap_or(0.0);
        let weight = if problem.constraints.is_empty() { 0.0 } else { w };
        space.penalized_gradient(&x, weight)?.norm() < 1e-6
    };
    let converged = grad_ok && constraint_residual < RESIDUAL_TOL;
    Ok(RestartOutcome { state: psi, objective_value, constraint_residual, converged })
}

/// Multi-start constrained minimization. Deterministic for a given
/// (problem, seed): restart r draws from the derived stream `hash(seed, r)`
/// and the reduce is ordered.
pub fn optimize(problem: &OptimizationProblem<'_>, seed: u64) -> Result<OptimizationResult> {
    if problem.restarts == 0 {
        return Err(Error::Config("restarts must be positive".into()));
    }
    if let Some(f) = &problem.frame {
        if f.ambient_dim() != problem.dim {
            return Err(Error::DimensionMismatch {
                expected: problem.dim,
                got: f.ambient_dim(),
            });
        }
    }
    let outcomes: Vec<RestartOutcome> = (0..problem.restarts as u64)
        .into_par_iter()
        .map(|r| run_restart(problem, seed, r))
        .collect::<Result<_>>()?;

    let constrained = !problem.constraints.is_empty();
    let best_idx = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| !constrained || o.constraint_residual < RESIDUAL_TOL)
        .min_by(|(_, a), (_, b)| a.objective_value.total_cmp(&b.objective_value))
        .map(|(i, _)| i);
    let best_idx = match best_idx {
        Some(i) => i,
        None => return Err(Error::NoFeasiblePoint),
    };

    let mut values: Vec<f64> = outcomes
        .iter()
        .filter(|o| !constrained || o.constraint_residual < RESIDUAL_TOL)
        .map(|o| o.objective_value)
        .collect();
    values.sort_by(f64::total_cmp);
    let mut distinct = 0usize;
    let mut last = f64::NEG_INFINITY;
    for v in values {
        if v - last > 1e-6 {
            distinct += 1;
        }
        last = v;
    }

    let best = &outcomes[best_idx];
    Ok(OptimizationResult {
        best: best.state.clone(),
        objective_value: best.objective_value,
        max_constraint_residual: best.constraint_residual,
        converged: best.converged,
        restarts: problem.restarts,
        distinct_optima: distinct,
        outcomes,
    })
}

/// Minima of `Σ_{z ≤ k} f_MUS^{(z)}` over the first k stabilizer MUBs in
/// canonical flower order, for k = 1..=6 (bipartite d=4).
pub fn table2(mubs: &[MUBasisSet], restarts: usize, seed: u64) -> Result<Vec<f64>> {
    if mubs.len() != 6 {
        return Err(Error::Config(format!("expected 6 MUBs, got {}", mubs.len())));
    }
    (1..=6)
        .map(|k| {
            let functional = FMusSumFunctional { mubs: mubs.iter().take(k).collect() };
            let problem = OptimizationProblem::unconstrained(4, &functional, restarts);
            Ok(optimize(&problem, derive_seed(seed, k as u64))?.objective_value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupKind;
    use crate::mubs::{enumerate_flowers, stabilizer_mub};
    use crate::potentials::probability_vector;

    fn group(d: usize) -> HeisenbergGroup {
        HeisenbergGroup::build(d, GroupKind::Single).unwrap()
    }

    fn mub_of(g: &HeisenbergGroup) -> MUBasisSet {
        stabilizer_mub(g, &enumerate_flowers(g)[0]).unwrap()
    }

    #[test]
    fn sampler_is_deterministic() {
        let mut a = Sampler::new(5, 42);
        let mut b = Sampler::new(5, 42);
        for _ in 0..10 {
            let x = a.next_state();
            let y = b.next_state();
            assert!((x.amplitudes() - y.amplitudes()).norm() == 0.0);
        }
        let mut c = Sampler::new(5, 43);
        assert!(!a.state_at(0).approx_eq(&c.next_state(), 1e-6));
    }

    #[test]
    fn samples_are_normalized_and_spread() {
        let mut s = Sampler::new(7, 1);
        let mut mean = CVector::zeros(7);
        for _ in 0..500 {
            let psi = s.next_state();
            assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
            mean += psi.amplitudes();
        }
        // FS measure has zero mean vector
        assert!(mean.norm() / 500.0 < 0.1);
    }

    #[test]
    fn pythagorean_identity_on_samples() {
        let g = group(3);
        let mub = mub_of(&g);
        let mut s = Sampler::new(3, 9);
        for _ in 0..100 {
            let psi = s.next_state();
            let total: f64 =
                mub.bases().iter().map(|b| probability_vector(b, &psi).unwrap().purity()).sum();
            assert!((total - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mc_average_matches_closed_forms_small() {
        // small-n smoke check; the acceptance suite runs the full 10^6 version
        for d in [2usize, 3] {
            let g = group(d);
            let est = mc_average(|psi| f_sic(&g, psi).unwrap(), d, 20_000, 7);
            assert!(
                est.consistent_with(fs_average_f_sic(d), 4.0),
                "d={d}: mean={} expected={}",
                est.mean,
                fs_average_f_sic(d)
            );
        }
        let g = group(3);
        let mub = mub_of(&g);
        let est = mc_average(|psi| f_mus(&mub, psi).unwrap(), 3, 20_000, 11);
        assert!(est.consistent_with(fs_average_f_mus(3), 4.0));
    }

    #[test]
    fn mc_average_is_deterministic() {
        let g = group(3);
        let a = mc_average(|psi| f_sic(&g, psi).unwrap(), 3, 2000, 5);
        let b = mc_average(|psi| f_sic(&g, psi).unwrap(), 3, 2000, 5);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn closed_form_averages() {
        assert!((fs_average_f_sic(2) - 4.0 / 15.0).abs() < 1e-15);
        assert!((fs_average_f_sic(3) - 0.3).abs() < 1e-15);
        assert!((fs_average_f_sic(4) - 24.0 / 35.0).abs() < 1e-15);
        assert!((fs_average_f_sic(5) - 10.0 / 21.0).abs() < 1e-15);
        assert!((fs_average_f_mus(3) - 1.0 / 15.0).abs() < 1e-15);
        assert!((fs_average_f_mus(4) - 2.0 / 35.0).abs() < 1e-15);
        assert!((fs_average_f_mus(7) - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn scatter_rows_satisfy_inequality() {
        let g = group(5);
        let mub = mub_of(&g);
        let stab = StateVector::basis_state(5, 0);
        let other = StateVector::basis_state(5, 1);
        let comps = vec![
            ("uniform".to_string(), ScatterComponent::Uniform, 200),
            (
                "near_stab".to_string(),
                ScatterComponent::Near { anchor: stab.clone(), epsilon: 0.15 },
                200,
            ),
            (
                "pair".to_string(),
                ScatterComponent::PairSuperposition { first: stab, second: other },
                50,
            ),
        ];
        let rows = scatter_dataset(&g, &mub, &comps, 3).unwrap();
        assert_eq!(rows.len(), 450);
        let coeff = potentials::inequality_coefficient(5);
        for row in &rows {
            assert!(row.f_sic - coeff * row.f_mus >= -1e-10);
        }
    }

    #[test]
    fn scatter_epsilon_zero_reproduces_anchor_point() {
        let g = group(3);
        let mub = mub_of(&g);
        let stab = StateVector::basis_state(3, 0);
        let comps = vec![(
            "stab".to_string(),
            ScatterComponent::Near { anchor: stab, epsilon: 0.0 },
            10,
        )];
        let rows = scatter_dataset(&g, &mub, &comps, 1).unwrap();
        for row in rows {
            assert!((row.f_sic - 1.5).abs() < 1e-12);
            assert!((row.f_mus - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unconstrained_minimization_finds_sic_d3() {
        let g = group(3);
        let functional = FSicFunctional { group: &g, negate: false };
        let problem = OptimizationProblem::unconstrained(3, &functional, 20);
        let result = optimize(&problem, 17).unwrap();
        assert!(result.objective_value < 1e-12, "f_sic={}", result.objective_value);
        assert!(result.converged);
        // reported value must match re-evaluation
        assert!((f_sic(&g, &result.best).unwrap() - result.objective_value).abs() < 1e-10);
    }

    #[test]
    fn constrained_maximization_is_zero_d3() {
        // f_mus = 0 forces f_sic = 0 in d = 3
        let g = group(3);
        let mub = mub_of(&g);
        let objective = FSicFunctional { group: &g, negate: true };
        let constraint = FMusSumFunctional { mubs: vec![&mub] };
        let problem = OptimizationProblem {
            dim: 3,
            objective: &objective,
            constraints: vec![&constraint],
            frame: None,
            penalty_weights: default_penalty_schedule(),
            restarts: 10,
            options: OptimizeOptions::default(),
        };
        let result = optimize(&problem, 23).unwrap();
        assert!(result.max_constraint_residual < RESIDUAL_TOL);
        assert!(result.objective_value.abs() < 1e-9, "got {}", result.objective_value);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let g = group(2);
        let functional = FSicFunctional { group: &g, negate: false };
        let problem = OptimizationProblem::unconstrained(2, &functional, 8);
        let a = optimize(&problem, 99).unwrap();
        let b = optimize(&problem, 99).unwrap();
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert!((a.best.amplitudes() - b.best.amplitudes()).norm() == 0.0);
    }

    #[test]
    fn frame_restricts_the_search() {
        // restrict d=3 to span{e1, e2}: the minimal f_sic inside is the SIC
        // family (0, 1, −e^{iσ})/√2
        let g = group(3);
        let frame =
            Frame::from_states(&[StateVector::basis_state(3, 1), StateVector::basis_state(3, 2)], false)
                .unwrap();
        let functional = FSicFunctional { group: &g, negate: false };
        let mut problem = OptimizationProblem::unconstrained(3, &functional, 10);
        problem.frame = Some(frame);
        let result = optimize(&problem, 31).unwrap();
        assert!(result.objective_value < 1e-12);
        assert!(result.best[0].norm() < 1e-8);
    }

    #[test]
    fn frame_rejects_non_orthonormal() {
        let cols = CMatrix::from_row_slice(2, 2, &[
            C64::from(1.0),
            C64::from(1.0),
            C64::from(0.0),
            C64::from(0.0),
        ]);
        assert!(Frame::new(cols, false).is_err());
    }

    #[test]
    fn derive_seed_streams_differ() {
        let a = derive_seed(7, 0);
        let b = derive_seed(7, 1);
        let c = derive_seed(8, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
