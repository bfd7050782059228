//! Higher-level reproductions: the real Zauner subspace map, orthogonality
//! graphs of balanced states, the d=4 basis classification and the closed
//! form table of special-state potentials.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{scaling_order3_unitary, GroupKind, StateVector};
use crate::error::{Error, Result};
use crate::explore::{optimize, Frame, FMusSumFunctional, OptimizationProblem, OptimizeOptions};
use crate::mubs::{enumerate_flowers, enumerate_petals, petal_eigenbasis, stabilizer_mub, Basis};
use crate::potentials::{f_mus, f_sic};
use crate::states::{catalog, Rational, DEDUP_FIDELITY_TOL};
use crate::HeisenbergGroup;
use crate::{C64, CMatrix, CVector};

/// One marked point on the subspace map.
#[derive(Debug, Clone, Serialize)]
pub struct MarkedPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
    pub f_sic: f64,
}

/// One grid sample of the subspace map.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSample {
    pub x: f64,
    pub y: f64,
    pub f_sic: f64,
}

/// Stereographic map of `f_SIC` over the real Zauner subspace.
#[derive(Debug, Clone)]
pub struct SubspaceMap {
    pub grid: Vec<GridSample>,
    pub marked: Vec<MarkedPoint>,
    /// Largest `f_SIC` seen on the grid itself.
    pub grid_max_f_sic: f64,
    /// Maximum after local polish; slightly above the grid value.
    pub polished_max_f_sic: f64,
    pub frame: Frame,
}

/// The orthonormal real triple spanning the real Zauner subspace at d=7,
/// as a real-coefficient frame.
pub fn real_zauner_frame(d: usize) -> Result<Frame> {
    let unitary = scaling_order3_unitary(d)?;
    let m = unitary.largest_eigenspace();
    let triple = unitary.real_form_basis(m)?;
    if triple.len() != 3 {
        return Err(Error::SubspaceConstructionFailure(format!(
            "real form has dimension {}, expected 3",
            triple.len()
        )));
    }
    Frame::from_states(&triple, true)
}

/// Embeds a real unit 3-vector through the frame.
fn embed_real(frame: &Frame, v: [f64; 3]) -> Result<StateVector> {
    let x = CVector::from_iterator(3, v.iter().map(|&c| C64::from(c)));
    StateVector::new(frame_embed(frame, &x))
}

fn frame_embed(frame: &Frame, x: &CVector) -> CVector {
    frame.embed(x)
}

/// Inverse stereographic chart: a point of the unit disk (projected from
/// the south pole) lifts to the upper hemisphere.
pub fn stereographic_lift(x: f64, y: f64) -> Option<[f64; 3]> {
    let r2 = x * x + y * y;
    if r2 > 1.0 {
        return None;
    }
    let s = 1.0 + r2;
    Some([2.0 * x / s, 2.0 * y / s, (1.0 - r2) / s])
}

/// Forward chart for marking states; antipodes are identified by flipping
/// into the upper hemisphere first.
pub fn stereographic_project(v: [f64; 3]) -> (f64, f64) {
    let v = if v[2] < 0.0 { [-v[0], -v[1], -v[2]] } else { v };
    (v[0] / (1.0 + v[2]), v[1] / (1.0 + v[2]))
}

/// Coordinates of a subspace state in the real frame, or None when the
/// state does not lie in the real subspace projectively.
pub fn real_coordinates(frame: &Frame, psi: &StateVector, tol: f64) -> Option<[f64; 3]> {
    let c = frame.pull_back_complex(psi.amplitudes());
    let reconstructed = frame.embed(&c);
    if (reconstructed - psi.amplitudes()).norm() > tol {
        return None;
    }
    // a common phase must make every coefficient real
    let lead = (0..3).max_by(|&a, &b| c[a].norm().total_cmp(&c[b].norm())).unwrap();
    let phase = c[lead] / C64::from(c[lead].norm());
    let rotated = c / phase;
    if rotated.iter().any(|z| z.im.abs() > tol) {
        return None;
    }
    let mut v = [rotated[0].re, rotated[1].re, rotated[2].re];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    for entry in &mut v {
        *entry /= n;
    }
    Some(v)
}

/// The MUS inside the real Zauner subspace: dense multi-start minimization
/// of `f_MUS` over the real projective 2-sphere; exactly 6 expected at d=7.
pub fn mus_in_real_zauner(d: usize, restarts: usize, seed: u64) -> Result<Vec<StateVector>> {
    let group = HeisenbergGroup::build(d, GroupKind::Single)?;
    let mub = stabilizer_mub(&group, &enumerate_flowers(&group)[0])?;
    let frame = real_zauner_frame(d)?;
    let functional = FMusSumFunctional { mubs: vec![&mub] };
    let problem = OptimizationProblem {
        dim: d,
        objective: &functional,
        constraints: Vec::new(),
        frame: Some(frame),
        penalty_weights: Vec::new(),
        restarts,
        options: OptimizeOptions { max_iters: 2000, grad_tol: 1e-13, ..Default::default() },
    };
    let result = optimize(&problem, seed)?;
    let mut found: Vec<StateVector> = Vec::new();
    for outcome in &result.outcomes {
        if outcome.objective_value < 1e-15
            && !found.iter().any(|s| s.approx_eq(&outcome.state, DEDUP_FIDELITY_TOL))
        {
            found.push(outcome.state.phase_fixed());
        }
    }
    if found.len() != 6 {
        return Err(Error::IncompleteSet { found: found.len(), expected: 6 });
    }
    Ok(found)
}

/// Builds the Fig.-4-style map: `f_SIC` on a stereographic grid of the real
/// Zauner subspace, with the grid maximum polished and the MUS, SIC and
/// Alltop states marked.
pub fn zauner_real_map(d: usize, grid_n: usize, restarts: usize, seed: u64) -> Result<SubspaceMap> {
    let group = HeisenbergGroup::build(d, GroupKind::Single)?;
    let frame = real_zauner_frame(d)?;

    let coords: Vec<(f64, f64, [f64; 3])> = (0..grid_n * grid_n)
        .filter_map(|idx| {
            let i = idx / grid_n;
            let j = idx % grid_n;
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / grid_n as f64;
            let y = -1.0 + 2.0 * (j as f64 + 0.5) / grid_n as f64;
            stereographic_lift(x, y).map(|v| (x, y, v))
        })
        .collect();
    let grid: Vec<GridSample> = coords
        .par_iter()
        .map(|&(x, y, v)| {
            let psi = embed_real(&frame, v)?;
            Ok(GridSample { x, y, f_sic: f_sic(&group, &psi)? })
        })
        .collect::<Result<_>>()?;

    // polish the grid maximum with a short descent of −f_sic in the frame
    let best = grid
        .iter()
        .max_by(|a, b| a.f_sic.total_cmp(&b.f_sic))
        .ok_or_else(|| Error::SubspaceConstructionFailure("empty grid".into()))?;
    let objective = crate::explore::FSicFunctional { group: &group, negate: true };
    let problem = OptimizationProblem {
        dim: d,
        objective: &objective,
        constraints: Vec::new(),
        frame: Some(frame.clone()),
        penalty_weights: Vec::new(),
        restarts: 64,
        options: OptimizeOptions { max_iters: 2000, grad_tol: 1e-13, ..Default::default() },
    };
    let polished = optimize(&problem, seed)?;
    let polished_max_f_sic = (-polished.objective_value).max(best.f_sic);
    let grid_max_f_sic = best.f_sic;

    let mut marked = Vec::new();
    let max_coords = real_coordinates(&frame, &polished.best, 1e-8)
        .ok_or_else(|| Error::SubspaceConstructionFailure("maximum left the subspace".into()))?;
    let (mx, my) = stereographic_project(max_coords);
    marked.push(MarkedPoint { x: mx, y: my, label: "max".into(), f_sic: polished_max_f_sic });

    for state in mus_in_real_zauner(d, restarts, seed)? {
        let v = real_coordinates(&frame, &state, 1e-8).ok_or_else(|| {
            Error::SubspaceConstructionFailure("MUS left the subspace".into())
        })?;
        let (x, y) = stereographic_project(v);
        let fs = f_sic(&group, &state)?;
        let label = if fs < 1e-8 { "sic" } else { "mus" };
        marked.push(MarkedPoint { x, y, label: label.into(), f_sic: fs });
    }

    for state in alltop_states_in_subspace(&group, &frame)? {
        let v = real_coordinates(&frame, &state, 1e-8).unwrap();
        let (x, y) = stereographic_project(v);
        marked.push(MarkedPoint {
            x,
            y,
            label: "alltop".into(),
            f_sic: f_sic(&group, &state)?,
        });
    }

    Ok(SubspaceMap { grid, marked, grid_max_f_sic, polished_max_f_sic, frame })
}

/// The cubic-phase Alltop family `ω^{c·k³}/√d`; every member is fixed by
/// the order-3 scaling unitary and by the parity-conjugation antiunitary,
/// so all d−1 of them lie in the real subspace.
pub fn alltop_states_in_subspace(
    group: &HeisenbergGroup,
    frame: &Frame,
) -> Result<Vec<StateVector>> {
    let d = group.dim();
    let scale = 1.0 / (d as f64).sqrt();
    let mut inside = Vec::new();
    for c in 1..d {
        let amps = CVector::from_fn(d, |k, _| {
            C64::from_polar(
                scale,
                2.0 * std::f64::consts::PI * ((c * k * k * k) % d) as f64 / d as f64,
            )
        });
        let state = StateVector::new(amps)?;
        if real_coordinates(frame, &state, 1e-8).is_some()
            && !inside.iter().any(|s: &StateVector| s.approx_eq(&state, DEDUP_FIDELITY_TOL))
        {
            inside.push(state.phase_fixed());
        }
    }
    Ok(inside)
}

/// Orthogonality graph of a family of states.
#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityGraph {
    pub order: usize,
    pub edges: Vec<(usize, usize)>,
    pub degrees: Vec<usize>,
    pub regular: bool,
}

/// Adjacency by `|⟨ψ|φ⟩|² < tol`, after fidelity dedupe. Symmetric and
/// loop-free by construction; invariant under global phases.
pub fn orthogonality_graph(states: &[StateVector], tol: f64) -> OrthogonalityGraph {
    let mut distinct: Vec<&StateVector> = Vec::new();
    for s in states {
        if !distinct.iter().any(|t| t.approx_eq(s, DEDUP_FIDELITY_TOL)) {
            distinct.push(s);
        }
    }
    let n = distinct.len();
    let mut edges = Vec::new();
    let mut degrees = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if distinct[i].inner(distinct[j]).norm_sqr() < tol {
                edges.push((i, j));
                degrees[i] += 1;
                degrees[j] += 1;
            }
        }
    }
    let regular = degrees.windows(2).all(|w| w[0] == w[1]);
    OrthogonalityGraph { order: n, edges, degrees, regular }
}

/// Classification of one petal eigenbasis at d=4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisClass {
    Computational,
    Hadamard,
    Sparse,
}

/// Classification counts over the 15 petal eigenbases.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationD4 {
    pub classes: Vec<BasisClass>,
    pub computational: usize,
    pub hadamard: usize,
    pub sparse: usize,
    pub maximally_entangled: usize,
    pub entangled_flags: Vec<bool>,
}

fn classify_one(basis: &Basis) -> Result<BasisClass> {
    let m = basis.matrix();
    let mut zeros = 0usize;
    let mut all_half = true;
    let mut permutation_like = true;
    for entry in m.iter() {
        let a = entry.norm();
        if a < 1e-10 {
            zeros += 1;
        }
        if (a - 0.5).abs() > 1e-10 {
            all_half = false;
        }
        if a > 1e-10 && (a - 1.0).abs() > 1e-10 {
            permutation_like = false;
        }
    }
    if permutation_like && zeros == 12 {
        Ok(BasisClass::Computational)
    } else if all_half {
        Ok(BasisClass::Hadamard)
    } else if zeros >= 8 {
        Ok(BasisClass::Sparse)
    } else {
        Err(Error::UnclassifiableBasis(zeros))
    }
}

/// Reduced single-qubit purity of a two-qubit pure state.
pub fn reduced_purity(psi: &StateVector) -> f64 {
    let m = CMatrix::from_fn(2, 2, |r, c| psi[2 * r + c]);
    let rho = &m * m.adjoint();
    (&rho * &rho).trace().re
}

fn basis_is_maximally_entangled(basis: &Basis) -> bool {
    (0..4).all(|i| (reduced_purity(&basis.column(i)) - 0.5).abs() < 1e-10)
}

/// Classifies the 15 petal eigenbases of the bipartite group: 1
/// computational, 8 Hadamard, 6 sparse, of which 6 are maximally entangled.
pub fn classify_bases_d4() -> Result<ClassificationD4> {
    let group = HeisenbergGroup::build(4, GroupKind::Bipartite)?;
    let petals = enumerate_petals(&group);
    let mut classes = Vec::new();
    let mut entangled_flags = Vec::new();
    for petal in &petals {
        let basis = petal_eigenbasis(&group, petal)?;
        classes.push(classify_one(&basis)?);
        entangled_flags.push(basis_is_maximally_entangled(&basis));
    }
    let count = |c: BasisClass| classes.iter().filter(|&&x| x == c).count();
    Ok(ClassificationD4 {
        computational: count(BasisClass::Computational),
        hadamard: count(BasisClass::Hadamard),
        sparse: count(BasisClass::Sparse),
        maximally_entangled: entangled_flags.iter().filter(|&&e| e).count(),
        classes,
        entangled_flags,
    })
}

/// One verified row of the closed-form table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub label: String,
    pub f_mus: Option<f64>,
    pub f_sic: f64,
    pub expected_f_mus: Option<f64>,
    pub expected_f_sic: Option<f64>,
    pub pass: bool,
}

/// Evaluates every cataloged state of a prime dimension against its closed
/// forms; passes within `1e−9` (SIC rows reach `1e−12` by optimization).
pub fn table1(d: usize, restarts: usize, seed: u64) -> Result<Vec<TableRow>> {
    let group = HeisenbergGroup::build(d, GroupKind::Single)?;
    let mub = stabilizer_mub(&group, &enumerate_flowers(&group)[0])?;
    let mut rows = Vec::new();
    for named in catalog(d, restarts, seed)? {
        let fm = f_mus(&mub, &named.vector)?;
        let fs = f_sic(&group, &named.vector)?;
        let expected_f_mus = named.expected_f_mus.map(Rational::value);
        let expected_f_sic = named.expected_f_sic.map(Rational::value);
        let pass = expected_f_mus.map_or(true, |e| (fm - e).abs() < 1e-9)
            && expected_f_sic.map_or(true, |e| (fs - e).abs() < 1e-9);
        rows.push(TableRow {
            label: named.label,
            f_mus: Some(fm),
            f_sic: fs,
            expected_f_mus,
            expected_f_sic,
            pass,
        });
    }
    Ok(rows)
}

/// Checks that a state stays inside the subspace spanned by a frame.
pub fn subspace_residual(frame: &Frame, psi: &StateVector) -> f64 {
    let c = frame.pull_back_complex(psi.amplitudes());
    (frame.embed(&c) - psi.amplitudes()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::alltop_fiducial;

    #[test]
    fn real_zauner_frame_exists_d7() {
        let frame = real_zauner_frame(7).unwrap();
        assert_eq!(frame.coeff_dim(), 3);
        assert_eq!(frame.ambient_dim(), 7);
    }

    #[test]
    fn stereographic_round_trip() {
        let v = stereographic_lift(0.3, -0.4).unwrap();
        let n = v.iter().map(|c| c * c).sum::<f64>();
        assert!((n - 1.0).abs() < 1e-14);
        let (x, y) = stereographic_project(v);
        assert!((x - 0.3).abs() < 1e-12 && (y + 0.4).abs() < 1e-12);
        assert!(stereographic_lift(0.9, 0.9).is_none());
    }

    #[test]
    fn alltop_fiducial_lies_in_real_subspace() {
        let group = HeisenbergGroup::build(7, GroupKind::Single).unwrap();
        let frame = real_zauner_frame(7).unwrap();
        let a = alltop_fiducial(7).unwrap();
        assert!(subspace_residual(&frame, &a) < 1e-10);
        assert!(real_coordinates(&frame, &a, 1e-8).is_some());
        let inside = alltop_states_in_subspace(&group, &frame).unwrap();
        assert_eq!(inside.len(), 6);
        for s in &inside {
            assert!((f_sic(&group, s).unwrap() - 3.0 / 28.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mus_census_in_real_subspace() {
        let group = HeisenbergGroup::build(7, GroupKind::Single).unwrap();
        let found = mus_in_real_zauner(7, 300, 7).unwrap();
        assert_eq!(found.len(), 6);
        let sic_count = found.iter().filter(|s| f_sic(&group, s).unwrap() < 1e-8).count();
        assert_eq!(sic_count, 2);
        for s in &found {
            let fs = f_sic(&group, s).unwrap();
            assert!(fs < 1e-8 || fs > 0.01);
        }
    }

    #[test]
    fn zauner_map_small_grid() {
        let map = zauner_real_map(7, 60, 300, 5).unwrap();
        assert!((map.grid_max_f_sic - 5.24).abs() < 0.01, "max = {}", map.grid_max_f_sic);
        assert!(map.polished_max_f_sic >= map.grid_max_f_sic);
        assert_eq!(map.marked.iter().filter(|p| p.label == "alltop").count(), 6);
        let mus = map.marked.iter().filter(|p| p.label == "mus").count();
        let sic = map.marked.iter().filter(|p| p.label == "sic").count();
        assert_eq!(mus + sic, 6);
        assert_eq!(sic, 2);
    }

    #[test]
    fn orthogonality_graph_examples() {
        let basis: Vec<StateVector> = (0..4).map(|k| StateVector::basis_state(4, k)).collect();
        let g = orthogonality_graph(&basis, 1e-8);
        assert_eq!(g.order, 4);
        assert_eq!(g.edges.len(), 6);
        assert!(g.regular);

        let repeated = vec![basis[0].clone(), basis[0].clone()];
        let g = orthogonality_graph(&repeated, 1e-8);
        assert_eq!(g.order, 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn d4_classification_counts() {
        let c = classify_bases_d4().unwrap();
        assert_eq!(c.computational, 1);
        assert_eq!(c.hadamard, 8);
        assert_eq!(c.sparse, 6);
        assert_eq!(c.maximally_entangled, 6);
        // the entangled bases are exactly the sparse ones
        for (class, flag) in c.classes.iter().zip(&c.entangled_flags) {
            if *class == BasisClass::Computational {
                assert!(!flag);
            }
        }
    }

    #[test]
    fn reduced_purity_examples() {
        let product = StateVector::basis_state(4, 0);
        assert!((reduced_purity(&product) - 1.0).abs() < 1e-12);
        let bell = crate::algebra::state_from_slice(&[
            C64::from(1.0 / 2f64.sqrt()),
            C64::from(0.0),
            C64::from(0.0),
            C64::from(1.0 / 2f64.sqrt()),
        ])
        .unwrap();
        assert!((reduced_purity(&bell) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn table1_passes_d5() {
        let rows = table1(5, 60, 3).unwrap();
        assert_eq!(rows.len(), 3);
        for row in rows {
            assert!(row.pass, "row {} failed: f_mus={:?} f_sic={}", row.label, row.f_mus, row.f_sic);
        }
    }
}
