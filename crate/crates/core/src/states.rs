//! Catalog and constructors for the special states: SIC fiducials, Alltop
//! fiducials and MUB-balanced states, plus the balance and MUS predicates.

use serde::Serialize;
use std::f64::consts::PI;

use crate::algebra::{negative_parity_basis, state_from_slice, GroupKind, StateVector};
use crate::error::{Error, Result};
use crate::explore::{
    default_penalty_schedule, optimize, Frame, FSicFunctional, Functional, OptimizationProblem,
    OptimizeOptions,
};
use crate::mubs::{enumerate_flowers, stabilizer_mub, MUBasisSet};
use crate::potentials::{
    f_mus, f_sic, probability_vector, project_tangent, raw_gradient_f_mus, raw_gradient_f_sic,
};
use crate::HeisenbergGroup;
use crate::{C64, CVector};

/// Fidelity threshold above which two states count as the same state.
pub const DEDUP_FIDELITY_TOL: f64 = 1e-8;
/// Balance defect below which a state counts as MUB-balanced.
pub const BALANCE_TOL: f64 = 1e-15;

/// An exact rational expectation attached to a cataloged state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Self { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// A cataloged state with optional closed-form expectations.
#[derive(Debug, Clone)]
pub struct NamedState {
    pub label: String,
    pub dim: usize,
    pub vector: StateVector,
    pub expected_f_sic: Option<Rational>,
    pub expected_f_mus: Option<Rational>,
}

impl NamedState {
    /// Checks the stored expectations against evaluation, within `1e−9`.
    pub fn verify(&self, group: &HeisenbergGroup, mub: &MUBasisSet) -> Result<()> {
        if let Some(expected) = self.expected_f_sic {
            let got = f_sic(group, &self.vector)?;
            if (got - expected.value()).abs() > 1e-9 {
                return Err(Error::InvalidState(format!(
                    "{}: f_sic = {got}, expected {}/{}",
                    self.label, expected.num, expected.den
                )));
            }
        }
        if let Some(expected) = self.expected_f_mus {
            let got = f_mus(mub, &self.vector)?;
            if (got - expected.value()).abs() > 1e-9 {
                return Err(Error::InvalidState(format!(
                    "{}: f_mus = {got}, expected {}/{}",
                    self.label, expected.num, expected.den
                )));
            }
        }
        Ok(())
    }
}

/// Parameter of the d=3 SIC family, clamped to `[0, 2π/6]`.
#[derive(Debug, Clone, Copy)]
pub struct SicFamilyParameter(f64);

impl SicFamilyParameter {
    pub fn new(sigma: f64) -> Self {
        Self(sigma.clamp(0.0, PI / 3.0))
    }

    pub fn sigma(self) -> f64 {
        self.0
    }
}

/// The d=3 SIC fiducial family `(0, 1, −e^{iσ})/√2`.
pub fn sic_fiducial_d3(sigma: SicFamilyParameter) -> StateVector {
    let s = 1.0 / 2f64.sqrt();
    state_from_slice(&[
        C64::from(0.0),
        C64::from(s),
        -C64::from_polar(s, sigma.sigma()),
    ])
    .expect("family vector is normalized")
}

/// The exact qubit SIC fiducial.
fn sic_fiducial_d2() -> StateVector {
    let c0 = ((1.0 + 1.0 / 3f64.sqrt()) / 2.0).sqrt();
    let c1 = ((1.0 - 1.0 / 3f64.sqrt()) / 2.0).sqrt();
    state_from_slice(&[C64::from(c0), C64::from_polar(c1, PI / 4.0)]).expect("normalized")
}

/// A SIC fiducial for d ∈ {2,3,5,7}: f_sic vanishes below `1e−12`.
/// Found by multi-start minimization except for the exact d=2 and d=3 forms.
pub fn sic_fiducial(d: usize, restarts: usize, seed: u64) -> Result<StateVector> {
    match d {
        2 => return Ok(sic_fiducial_d2()),
        3 => return Ok(sic_fiducial_d3(SicFamilyParameter::new(0.0))),
        5 | 7 => {}
        _ => {
            return Err(Error::UnsupportedDimension { dim: d, kind: "SIC search".into() });
        }
    }
    let group = HeisenbergGroup::build(d, GroupKind::Single)?;
    let objective = FSicFunctional { group: &group, negate: false };
    let mut problem = OptimizationProblem::unconstrained(d, &objective, restarts);
    problem.options.max_iters = 2000;
    let result = optimize(&problem, seed)?;
    if result.objective_value >= 1e-12 {
        return Err(Error::SearchFailure(format!(
            "best f_sic after {restarts} restarts: {}",
            result.objective_value
        )));
    }
    Ok(result.best.phase_fixed())
}

/// The Alltop fiducial `ω^{k³}/√d` for prime d ≥ 5.
pub fn alltop_fiducial(d: usize) -> Result<StateVector> {
    if !crate::algebra::SINGLE_DIMS.contains(&d) || d < 5 {
        return Err(Error::UnsupportedDimension { dim: d, kind: "Alltop (prime ≥ 5)".into() });
    }
    let scale = 1.0 / (d as f64).sqrt();
    let amps = CVector::from_fn(d, |k, _| {
        C64::from_polar(scale, 2.0 * PI * ((k * k * k) % d) as f64 / d as f64)
    });
    StateVector::new(amps)
}

/// Exact-penalty objective `f_mus + |f_sic − 1/6|` locating the d=3 Alltop
/// states.
struct AlltopD3Functional<'a> {
    group: &'a HeisenbergGroup,
    mub: &'a MUBasisSet,
}

impl Functional for AlltopD3Functional<'_> {
    fn value(&self, psi: &StateVector) -> Result<f64> {
        Ok(f_mus(self.mub, psi)? + (f_sic(self.group, psi)? - 1.0 / 6.0).abs())
    }

    fn raw_gradient(&self, psi: &StateVector) -> Result<CVector> {
        let sign = (f_sic(self.group, psi)? - 1.0 / 6.0).signum();
        Ok(raw_gradient_f_mus(self.mub, psi)?
            + raw_gradient_f_sic(self.group, psi)? * C64::from(sign))
    }

    fn name(&self) -> String {
        "alltop_d3".into()
    }
}

/// Real inner product of two complex vectors viewed as real vectors.
fn re_inner(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).re
}

/// Polishes a near-solution of `min f_mus s.t. f_sic = target` by
/// alternating first-order restoration onto the level set with descent along
/// its tangent directions.
fn polish_on_level_set(
    group: &HeisenbergGroup,
    mub: &MUBasisSet,
    target: f64,
    start: &StateVector,
) -> Result<StateVector> {
    let mut psi = start.clone();
    let mut step = 0.1;
    for _ in 0..500 {
        // restoration: Newton steps along the f_sic gradient
        for _ in 0..50 {
            let r = f_sic(group, &psi)? - target;
            if r.abs() < 1e-15 {
                break;
            }
            let gs = project_tangent(psi.amplitudes(), &raw_gradient_f_sic(group, &psi)?);
            let gg = re_inner(&gs, &gs);
            if gg < 1e-300 {
                break;
            }
            psi = StateVector::normalized(psi.amplitudes() - gs * C64::from(r / gg))?;
        }
        // descent on f_mus restricted to the tangent of the level set
        let gs = project_tangent(psi.amplitudes(), &raw_gradient_f_sic(group, &psi)?);
        let gm = project_tangent(psi.amplitudes(), &raw_gradient_f_mus(mub, &psi)?);
        let gg = re_inner(&gs, &gs);
        let gt = if gg > 1e-300 { &gm - &gs * C64::from(re_inner(&gs, &gm) / gg) } else { gm };
        let gnorm = gt.norm();
        if gnorm < 1e-12 {
            break;
        }
        let f0 = f_mus(mub, &psi)?;
        let mut accepted = false;
        let mut alpha = step;
        for _ in 0..60 {
            let trial = StateVector::normalized(psi.amplitudes() - &gt * C64::from(alpha))?;
            // measure progress after restoring the trial point
            let mut restored = trial;
            for _ in 0..30 {
                let r = f_sic(group, &restored)? - target;
                if r.abs() < 1e-14 {
                    break;
                }
                let g = project_tangent(
                    restored.amplitudes(),
                    &raw_gradient_f_sic(group, &restored)?,
                );
                let gg2 = re_inner(&g, &g);
                if gg2 < 1e-300 {
                    break;
                }
                psi_step(&mut restored, &g, -r / gg2)?;
            }
            if f_mus(mub, &restored)? < f0 - 1e-4 * alpha * gnorm * gnorm {
                psi = restored;
                step = (alpha * 2.0).min(0.5);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(psi)
}

fn psi_step(psi: &mut StateVector, dir: &CVector, scale: f64) -> Result<()> {
    *psi = StateVector::normalized(psi.amplitudes() + dir * C64::from(scale))?;
    Ok(())
}

/// The d=3 Alltop state, found by minimizing `f_mus + |f_sic − 1/6|` and
/// polished on the `f_sic = 1/6` level set; hits Table 1 values `(1/27, 1/6)`.
pub fn alltop_fiducial_d3(restarts: usize, seed: u64) -> Result<StateVector> {
    let group = HeisenbergGroup::build(3, GroupKind::Single)?;
    let mub = stabilizer_mub(&group, &enumerate_flowers(&group)[0])?;
    let objective = AlltopD3Functional { group: &group, mub: &mub };
    let problem = OptimizationProblem::unconstrained(3, &objective, restarts);
    let rough = optimize(&problem, seed)?;
    let polished = polish_on_level_set(&group, &mub, 1.0 / 6.0, &rough.best)?;
    let fm = f_mus(&mub, &polished)?;
    let fs = f_sic(&group, &polished)?;
    if (fm - 1.0 / 27.0).abs() > 1e-9 || (fs - 1.0 / 6.0).abs() > 1e-9 {
        return Err(Error::SearchFailure(format!(
            "d=3 Alltop search landed at f_mus = {fm}, f_sic = {fs}"
        )));
    }
    Ok(polished.phase_fixed())
}

/// The d=4 Alltop state: minimizes the sum of all six `f_mus` (value 3/40);
/// its per-MUB values split as 3/640 (four) and 9/320 (two).
pub fn alltop_fiducial_d4(restarts: usize, seed: u64) -> Result<StateVector> {
    let group = HeisenbergGroup::build(4, GroupKind::Bipartite)?;
    let mubs = all_mubs(&group)?;
    let functional =
        crate::explore::FMusSumFunctional { mubs: mubs.iter().collect() };
    let mut problem = OptimizationProblem::unconstrained(4, &functional, restarts);
    problem.options.max_iters = 3000;
    problem.options.grad_tol = 1e-13;
    let result = optimize(&problem, seed)?;
    if (result.objective_value - 3.0 / 40.0).abs() > 1e-8 {
        return Err(Error::SearchFailure(format!(
            "d=4 Alltop sum landed at {}",
            result.objective_value
        )));
    }
    Ok(result.best.phase_fixed())
}

/// All stabilizer MUBs of a group, one per flower in canonical order.
pub fn all_mubs(group: &HeisenbergGroup) -> Result<Vec<MUBasisSet>> {
    enumerate_flowers(group).iter().map(|f| stabilizer_mub(group, f)).collect()
}

/// `Σ_z ‖sort(p_(z)) − sort(p_(0))‖²`; zero iff the state is MUB-balanced.
pub fn balance_defect(mub: &MUBasisSet, psi: &StateVector) -> Result<f64> {
    let sorted: Vec<Vec<f64>> = mub
        .bases()
        .iter()
        .map(|b| {
            let mut p = probability_vector(b, psi)?.entries().to_vec();
            p.sort_by(f64::total_cmp);
            Ok(p)
        })
        .collect::<Result<_>>()?;
    let reference = &sorted[0];
    Ok(sorted[1..]
        .iter()
        .map(|p| p.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum())
}

/// The balance defect as an optimizable functional. The sort permutations
/// are locally constant, so away from probability ties the piecewise
/// gradient below is exact.
pub struct BalanceDefectFunctional<'a> {
    pub mub: &'a MUBasisSet,
}

impl Functional for BalanceDefectFunctional<'_> {
    fn value(&self, psi: &StateVector) -> Result<f64> {
        balance_defect(self.mub, psi)
    }

    fn raw_gradient(&self, psi: &StateVector) -> Result<CVector> {
        let d = psi.dim();
        let bases = self.mub.bases();
        let probs: Vec<Vec<f64>> = bases
            .iter()
            .map(|b| Ok(probability_vector(b, psi)?.entries().to_vec()))
            .collect::<Result<_>>()?;
        // argsort per basis: rank r → original outcome index
        let orders: Vec<Vec<usize>> = probs
            .iter()
            .map(|p| {
                let mut idx: Vec<usize> = (0..d).collect();
                idx.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
                idx
            })
            .collect();
        // dD/dp for every basis and outcome
        let mut dp = vec![vec![0.0; d]; bases.len()];
        for z in 1..bases.len() {
            for r in 0..d {
                let diff = probs[z][orders[z][r]] - probs[0][orders[0][r]];
                dp[z][orders[z][r]] += 2.0 * diff;
                dp[0][orders[0][r]] -= 2.0 * diff;
            }
        }
        let mut g = CVector::zeros(d);
        for (z, basis) in bases.iter().enumerate() {
            let overlaps = basis.matrix().adjoint() * psi.amplitudes();
            let weighted =
                CVector::from_iterator(d, overlaps.iter().zip(&dp[z]).map(|(a, w)| a * C64::from(*w)));
            g += basis.matrix() * weighted;
        }
        Ok(g * C64::from(2.0))
    }

    fn name(&self) -> String {
        "balance_defect".into()
    }
}

/// True iff every per-basis purity equals `2/(d+1)` within `tol`.
pub fn is_mus(mub: &MUBasisSet, psi: &StateVector, tol: f64) -> Result<bool> {
    let target = 2.0 / (mub.dim() as f64 + 1.0);
    for basis in mub.bases() {
        if (probability_vector(basis, psi)?.purity() - target).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of a MUB-balanced census.
#[derive(Debug, Clone)]
pub struct BalancedSearch {
    pub states: Vec<StateVector>,
    pub expected: usize,
    pub complete: bool,
}

fn dedupe(mut states: Vec<StateVector>) -> Vec<StateVector> {
    let mut distinct: Vec<StateVector> = Vec::new();
    states.retain(|s| s.dim() > 0);
    for s in states {
        if !distinct.iter().any(|t| t.approx_eq(&s, DEDUP_FIDELITY_TOL)) {
            distinct.push(s.phase_fixed());
        }
    }
    distinct
}

/// MUB-balanced states. For odd d the search is restricted to the canonical
/// negative-parity eigenspace and expects d(d−1)/2 states; for d=4 the
/// search is unrestricted and balances the first stabilizer MUB only, with
/// the found states checked against the known (f_sic, f_mus) split.
pub fn find_mub_balanced(d: usize, restarts: usize, seed: u64) -> Result<BalancedSearch> {
    match d {
        3 | 7 | 11 => find_mub_balanced_odd(d, restarts, seed),
        4 => find_mub_balanced_d4(restarts, seed),
        _ => Err(Error::UnsupportedDimension { dim: d, kind: "balanced search".into() }),
    }
}

fn collect_balanced(
    problem: &OptimizationProblem<'_>,
    mub: &MUBasisSet,
    seed: u64,
) -> Result<Vec<StateVector>> {
    let result = optimize(problem, seed)?;
    let mut hits = Vec::new();
    for outcome in &result.outcomes {
        if outcome.objective_value < BALANCE_TOL {
            hits.push(outcome.state.clone());
        }
    }
    let states = dedupe(hits);
    for s in &states {
        debug_assert!(balance_defect(mub, s)? < BALANCE_TOL);
    }
    Ok(states)
}

fn find_mub_balanced_odd(d: usize, restarts: usize, seed: u64) -> Result<BalancedSearch> {
    let group = HeisenbergGroup::build(d, GroupKind::Single)?;
    let mub = stabilizer_mub(&group, &enumerate_flowers(&group)[0])?;
    let frame = Frame::from_states(&negative_parity_basis(d)?, false)?;
    let objective = BalanceDefectFunctional { mub: &mub };
    let problem = OptimizationProblem {
        dim: d,
        objective: &objective,
        constraints: Vec::new(),
        frame: Some(frame),
        penalty_weights: default_penalty_schedule(),
        restarts,
        options: OptimizeOptions { max_iters: 2000, grad_tol: 1e-13, ..Default::default() },
    };
    let states = collect_balanced(&problem, &mub, seed)?;
    let expected = d * (d - 1) / 2;
    let complete = states.len() >= expected;
    Ok(BalancedSearch { states, expected, complete })
}

fn find_mub_balanced_d4(restarts: usize, seed: u64) -> Result<BalancedSearch> {
    let group = HeisenbergGroup::build(4, GroupKind::Bipartite)?;
    let mubs = all_mubs(&group)?;
    let objective = BalanceDefectFunctional { mub: &mubs[0] };
    let mut problem = OptimizationProblem::unconstrained(4, &objective, restarts);
    problem.options.max_iters = 2000;
    problem.options.grad_tol = 1e-13;
    let found = collect_balanced(&problem, &mubs[0], seed)?;
    // keep the states realizing the known value split
    let states: Vec<StateVector> = found
        .into_iter()
        .filter(|s| {
            let fs = f_sic(&group, s).unwrap_or(f64::NAN);
            let fm1 = f_mus(&mubs[0], s).unwrap_or(f64::NAN);
            let rest_ok = mubs[1..].iter().all(|m| {
                (f_mus(m, s).unwrap_or(f64::NAN) - 0.032).abs() < 1e-3
            });
            fm1 < 1e-8 && (fs - 0.32).abs() < 1e-3 && rest_ok
        })
        .collect();
    if states.is_empty() {
        return Err(Error::SearchFailure(
            "no d=4 balanced state matched the expected value split".into(),
        ));
    }
    let expected = 1;
    Ok(BalancedSearch { complete: states.len() >= expected, states, expected })
}

/// Named catalog for one dimension, with Table 1 expectations attached
/// where closed forms exist.
pub fn catalog(d: usize, restarts: usize, seed: u64) -> Result<Vec<NamedState>> {
    let df = d as f64;
    let stab_mus = Rational::new((d as i64 - 1) * (d as i64 - 1), (d * (d + 1)) as i64);
    let stab_sic = Rational::new((d * (d - 1)) as i64, (d + 1) as i64);
    let alltop_mus =
        Rational::new((d as i64 - 1) * (d as i64 - 1), (d * d * d * (d + 1)) as i64);
    let alltop_sic = Rational::new(d as i64 - 1, (d * (d + 1)) as i64);
    let _ = df;
    let mut out = Vec::new();
    match d {
        2 | 3 | 5 | 7 => {
            out.push(NamedState {
                label: "stabilizer".into(),
                dim: d,
                vector: StateVector::basis_state(d, 0),
                expected_f_sic: Some(stab_sic),
                expected_f_mus: Some(stab_mus),
            });
            out.push(NamedState {
                label: "sic".into(),
                dim: d,
                vector: sic_fiducial(d, restarts, seed)?,
                expected_f_sic: Some(Rational::new(0, 1)),
                expected_f_mus: Some(Rational::new(0, 1)),
            });
            let alltop = if d == 2 {
                None
            } else if d == 3 {
                Some(alltop_fiducial_d3(restarts.max(20), seed)?)
            } else {
                Some(alltop_fiducial(d)?)
            };
            if let Some(vector) = alltop {
                out.push(NamedState {
                    label: "alltop".into(),
                    dim: d,
                    vector,
                    expected_f_sic: Some(alltop_sic),
                    expected_f_mus: Some(alltop_mus),
                });
            }
        }
        4 => {
            out.push(NamedState {
                label: "stabilizer".into(),
                dim: 4,
                vector: StateVector::basis_state(4, 0),
                expected_f_sic: Some(Rational::new(12, 5)),
                expected_f_mus: None,
            });
            out.push(NamedState {
                label: "alltop".into(),
                dim: 4,
                vector: alltop_fiducial_d4(restarts.max(50), seed)?,
                expected_f_sic: None,
                expected_f_mus: None,
            });
        }
        _ => {
            return Err(Error::UnsupportedDimension { dim: d, kind: "catalog".into() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parity_operator;
    use crate::mubs::{basis_from_states, unbiasedness_between};

    fn group(d: usize) -> HeisenbergGroup {
        HeisenbergGroup::build(d, GroupKind::Single).unwrap()
    }

    fn mub_of(g: &HeisenbergGroup) -> MUBasisSet {
        stabilizer_mub(g, &enumerate_flowers(g)[0]).unwrap()
    }

    #[test]
    fn sic_family_is_sic_everywhere_and_balanced_only_at_zero() {
        let g = group(3);
        let mub = mub_of(&g);
        for i in 0..100 {
            let sigma = SicFamilyParameter::new(PI / 3.0 * i as f64 / 99.0);
            let psi = sic_fiducial_d3(sigma);
            assert!(f_sic(&g, &psi).unwrap() < 1e-12);
            assert!(f_mus(&mub, &psi).unwrap() < 1e-12);
        }
        assert!(balance_defect(&mub, &sic_fiducial_d3(SicFamilyParameter::new(0.0))).unwrap() < 1e-12);
        assert!(balance_defect(&mub, &sic_fiducial_d3(SicFamilyParameter::new(PI / 6.0))).unwrap() > 1e-4);
    }

    #[test]
    fn sic_parameter_clamps() {
        assert_eq!(SicFamilyParameter::new(-1.0).sigma(), 0.0);
        assert_eq!(SicFamilyParameter::new(10.0).sigma(), PI / 3.0);
    }

    #[test]
    fn qubit_sic_overlaps() {
        let g = group(2);
        let psi = sic_fiducial(2, 1, 0).unwrap();
        assert!(f_sic(&g, &psi).unwrap() < 1e-12);
        for idx in g.nontrivial_indices() {
            let partner = g.displacement(idx).unwrap().apply(&psi).unwrap();
            assert!((psi.inner(&partner).norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sic_search_d5() {
        let g = group(5);
        let mub = mub_of(&g);
        let psi = sic_fiducial(5, 60, 11).unwrap();
        assert!(f_sic(&g, &psi).unwrap() < 1e-12);
        assert!(f_mus(&mub, &psi).unwrap() < 1e-10);
        assert!(is_mus(&mub, &psi, 1e-6).unwrap());
    }

    #[test]
    fn alltop_table1_values() {
        let g5 = group(5);
        let mub5 = mub_of(&g5);
        let a5 = alltop_fiducial(5).unwrap();
        assert!((f_mus(&mub5, &a5).unwrap() - 8.0 / 375.0).abs() < 1e-12);
        let g7 = group(7);
        let a7 = alltop_fiducial(7).unwrap();
        assert!((f_sic(&g7, &a7).unwrap() - 3.0 / 28.0).abs() < 1e-12);
    }

    #[test]
    fn alltop_rejects_small_dims() {
        assert!(alltop_fiducial(2).is_err());
        assert!(alltop_fiducial(3).is_err());
        assert!(alltop_fiducial(4).is_err());
    }

    #[test]
    fn alltop_orbit_forms_mubs() {
        // d orbit bases plus the computational basis: all mutually unbiased
        for d in [5usize, 7] {
            let g = group(d);
            let a = alltop_fiducial(d).unwrap();
            let mut bases = vec![basis_from_states(
                &(0..d).map(|k| StateVector::basis_state(d, k)).collect::<Vec<_>>(),
            )
            .unwrap()];
            for i in 0..d {
                let columns: Vec<StateVector> = (0..d)
                    .map(|j| {
                        g.displacement(&crate::DisplacementIndex::single(i as i64, j as i64, d))
                            .unwrap()
                            .apply(&a)
                            .unwrap()
                    })
                    .collect();
                bases.push(basis_from_states(&columns).unwrap());
            }
            assert_eq!(bases.len(), d + 1);
            for x in 0..bases.len() {
                for y in (x + 1)..bases.len() {
                    assert!(
                        unbiasedness_between(&bases[x], &bases[y]) < 1e-10,
                        "d={d}: bases {x},{y} not unbiased"
                    );
                }
            }
        }
    }

    #[test]
    fn alltop_d3_hits_table1() {
        let g = group(3);
        let mub = mub_of(&g);
        let psi = alltop_fiducial_d3(20, 3).unwrap();
        assert!((f_sic(&g, &psi).unwrap() - 1.0 / 6.0).abs() < 1e-10);
        assert!((f_mus(&mub, &psi).unwrap() - 1.0 / 27.0).abs() < 1e-10);
    }

    #[test]
    fn balance_defect_examples() {
        let g = group(3);
        let mub = mub_of(&g);
        // stabilizer: own distribution is a delta, the others uniform
        let stab = StateVector::basis_state(3, 0);
        assert!(balance_defect(&mub, &stab).unwrap() > 0.1);
    }

    #[test]
    fn balance_defect_gradient_matches_finite_differences() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let g = group(5);
        let mub = mub_of(&g);
        let functional = BalanceDefectFunctional { mub: &mub };
        let mut rng = StdRng::seed_from_u64(41);
        let dist = rand::distributions::Uniform::new(-1.0, 1.0);
        let amps = CVector::from_fn(5, |_, _| C64::new(rng.sample(dist), rng.sample(dist)));
        let psi = StateVector::normalized(amps).unwrap();
        let grad = project_tangent(psi.amplitudes(), &functional.raw_gradient(&psi).unwrap());
        let h = 1e-6;
        for k in 0..5 {
            let mut plus = psi.amplitudes().clone();
            let mut minus = psi.amplitudes().clone();
            plus[k] += C64::from(h);
            minus[k] -= C64::from(h);
            let fp = balance_defect(&mub, &StateVector::normalized(plus).unwrap()).unwrap();
            let fm = balance_defect(&mub, &StateVector::normalized(minus).unwrap()).unwrap();
            let numeric = (fp - fm) / (2.0 * h);
            assert!(
                (numeric - grad[k].re).abs() < 1e-5 * (1.0 + numeric.abs()),
                "k={k}: numeric {numeric} vs analytic {}",
                grad[k].re
            );
        }
    }

    #[test]
    fn balanced_search_d3() {
        let search = find_mub_balanced(3, 10, 5).unwrap();
        // the negative-parity eigenspace is one complex dimension, so the
        // search can only ever produce its single projective state
        assert_eq!(search.states.len(), 1);
        let g = group(3);
        let mub = mub_of(&g);
        let sigma0 = sic_fiducial_d3(SicFamilyParameter::new(0.0));
        assert!(search.states[0].approx_eq(&sigma0, 1e-8));
        assert!(f_mus(&mub, &search.states[0]).unwrap() < 1e-12);
    }

    #[test]
    fn balanced_states_have_negative_parity_d7() {
        let search = find_mub_balanced(7, 60, 5).unwrap();
        assert!(!search.states.is_empty());
        let parity = parity_operator(7).unwrap();
        let g = group(7);
        let mub = mub_of(&g);
        for s in &search.states {
            assert!(parity.negative_residual(s) < 1e-8);
            assert!(f_mus(&mub, s).unwrap() < 1e-10);
            assert!((f_sic(&g, s).unwrap() - 7.0 / 8.0).abs() < 1e-6);
        }
    }

    #[test]
    fn is_mus_examples() {
        let g = group(7);
        let mub = mub_of(&g);
        assert!(!is_mus(&mub, &StateVector::basis_state(7, 0), 1e-6).unwrap());
        assert!(!is_mus(&mub, &alltop_fiducial(7).unwrap(), 1e-6).unwrap());
    }

    #[test]
    fn catalog_verifies_d3() {
        let g = group(3);
        let mub = mub_of(&g);
        for named in catalog(3, 20, 1).unwrap() {
            named.verify(&g, &mub).unwrap();
        }
    }
}
