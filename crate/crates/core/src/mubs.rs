//! Petals (maximal abelian subgroups), flowers, and the stabilizer MUBs
//! obtained from their joint eigenbases.

use crate::algebra::{DisplacementIndex, GroupKind, HeisenbergGroup, StateVector};
use crate::error::{Error, Result};
use crate::{C64, CMatrix, CVector};

const GRAM_TOL: f64 = 1e-10;
const EIGEN_RESIDUAL_TOL: f64 = 1e-8;
const PROJECTOR_RANK_TOL: f64 = 1e-8;

/// A maximal abelian subgroup of the displacement operators, modulo phases.
/// Stores the nontrivial member labels (`d−1` for prime `d`, 3 for the
/// bipartite group) plus the generator label(s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Petal {
    generators: Vec<DisplacementIndex>,
    members: Vec<DisplacementIndex>,
}

impl Petal {
    pub fn generators(&self) -> &[DisplacementIndex] {
        &self.generators
    }

    /// Nontrivial members in canonical order.
    pub fn members(&self) -> &[DisplacementIndex] {
        &self.members
    }

    pub fn contains(&self, idx: &DisplacementIndex) -> bool {
        self.members.contains(idx)
    }
}

/// A partition of all nontrivial displacement labels into disjoint petals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flower {
    petals: Vec<Petal>,
}

impl Flower {
    pub fn petals(&self) -> &[Petal] {
        &self.petals
    }
}

/// An orthonormal basis of joint eigenvectors of one petal, with columns in
/// eigenvalue-exponent order and a deterministic phase convention.
#[derive(Debug, Clone)]
pub struct Basis {
    dim: usize,
    matrix: CMatrix,
    petal: Petal,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Columns are the basis states.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn petal(&self) -> &Petal {
        &self.petal
    }

    pub fn column(&self, i: usize) -> StateVector {
        StateVector::normalized(self.column_vector(i)).expect("basis column is unit norm")
    }

    fn column_vector(&self, i: usize) -> CVector {
        self.matrix.column(i).into()
    }

    pub fn columns(&self) -> Vec<StateVector> {
        (0..self.dim).map(|i| self.column(i)).collect()
    }
}

/// A complete set of `d+1` (5 for the bipartite group) mutually unbiased
/// stabilizer bases: `|⟨e_i^{(z)}|e_j^{(z′)}⟩|² = 1/d` for `z ≠ z′`.
#[derive(Debug, Clone)]
pub struct MUBasisSet {
    bases: Vec<Basis>,
}

impl MUBasisSet {
    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn dim(&self) -> usize {
        self.bases[0].dim()
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

fn petal_sort_key(idx: &DisplacementIndex) -> (usize, usize, usize, usize) {
    match *idx {
        DisplacementIndex::Single { i, j } => (i, j, 0, 0),
        DisplacementIndex::Bipartite { a, b, c, e } => {
            (a as usize, b as usize, c as usize, e as usize)
        }
    }
}

/// Enumerates every petal: `d+1` for prime `d`, 15 for the bipartite group.
pub fn enumerate_petals(group: &HeisenbergGroup) -> Vec<Petal> {
    let d = group.dim();
    match group.kind() {
        GroupKind::Single => {
            // lines through the origin of the index lattice Z_d²
            let mut generators = vec![DisplacementIndex::Single { i: 0, j: 1 }];
            for t in 0..d {
                generators.push(DisplacementIndex::Single { i: 1, j: t });
            }
            generators.sort_by_key(petal_sort_key);
            generators
                .into_iter()
                .map(|g| {
                    let mut members: Vec<_> = (1..d)
                        .map(|k| match g {
                            DisplacementIndex::Single { i, j } => DisplacementIndex::single(
                                (k * i) as i64,
                                (k * j) as i64,
                                d,
                            ),
                            _ => unreachable!(),
                        })
                        .collect();
                    members.sort_by_key(petal_sort_key);
                    Petal { generators: vec![g], members }
                })
                .collect()
        }
        GroupKind::Bipartite => {
            // maximal isotropic planes of the symplectic space Z_2⁴
            let nontrivial: Vec<_> = group.nontrivial_indices().cloned().collect();
            let mut petals: Vec<Petal> = Vec::new();
            for (i, u) in nontrivial.iter().enumerate() {
                for v in nontrivial.iter().skip(i + 1) {
                    if u.symplectic(v, d).unwrap() != 0 {
                        continue;
                    }
                    let w = u.compose(v, d).unwrap();
                    let mut members = vec![*u, *v, w];
                    members.sort_by_key(petal_sort_key);
                    let petal =
                        Petal { generators: vec![members[0], members[1]], members };
                    if !petals.contains(&petal) {
                        petals.push(petal);
                    }
                }
            }
            petals.sort_by(|a, b| {
                a.members
                    .iter()
                    .map(petal_sort_key)
                    .cmp(b.members.iter().map(petal_sort_key))
            });
            petals
        }
    }
}

/// Enumerates every flower: exactly one for prime `d`, six for the
/// bipartite group.
pub fn enumerate_flowers(group: &HeisenbergGroup) -> Vec<Flower> {
    let petals = enumerate_petals(group);
    match group.kind() {
        GroupKind::Single => vec![Flower { petals }],
        GroupKind::Bipartite => {
            let nontrivial: Vec<_> = group.nontrivial_indices().cloned().collect();
            let mut flowers = Vec::new();
            let mut current: Vec<usize> = Vec::new();
            partition_search(&petals, &nontrivial, &mut current, &mut flowers);
            flowers
                .into_iter()
                .map(|sel| Flower { petals: sel.into_iter().map(|i| petals[i].clone()).collect() })
                .collect()
        }
    }
}

/// Backtracking search for partitions of the nontrivial labels into petals.
fn partition_search(
    petals: &[Petal],
    all: &[DisplacementIndex],
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let covered: Vec<DisplacementIndex> =
        current.iter().flat_map(|&i| petals[i].members.iter().cloned()).collect();
    let next = match all.iter().find(|idx| !covered.contains(idx)) {
        None => {
            out.push(current.clone());
            return;
        }
        Some(idx) => idx,
    };
    let start = current.last().map_or(0, |&i| i + 1);
    for i in start..petals.len() {
        if !petals[i].contains(next) {
            continue;
        }
        if petals[i].members.iter().any(|m| covered.contains(m)) {
            continue;
        }
        current.push(i);
        partition_search(petals, all, current, out);
        current.pop();
    }
}

/// Rescales `op` by the principal `n`-th root of the scalar `op^n = s·I`,
/// so the result has exact order `n` and character projectors apply.
fn order_normalized(op: &CMatrix, n: usize) -> Result<CMatrix> {
    let d = op.nrows();
    let mut power = CMatrix::identity(d, d);
    for _ in 0..n {
        power = &power * op;
    }
    let s = power[(0, 0)];
    if (s.norm() - 1.0).abs() > 1e-8
        || (&power - CMatrix::identity(d, d) * s).norm() > 1e-8
    {
        return Err(Error::ConstructionFailure(
            "petal member does not power to a scalar".into(),
        ));
    }
    let root = C64::from_polar(1.0, s.arg() / n as f64);
    Ok(op / root)
}

fn rank_one_column(projector: &CMatrix) -> Result<CVector> {
    let tr: C64 = projector.trace();
    if (tr.re - 1.0).abs() > PROJECTOR_RANK_TOL || tr.im.abs() > PROJECTOR_RANK_TOL {
        return Err(Error::DegenerateProjector(format!("trace {tr}")));
    }
    let d = projector.nrows();
    let mut best = 0;
    let mut best_norm = 0.0;
    for c in 0..d {
        let n = projector.column(c).norm();
        if n > best_norm {
            best_norm = n;
            best = c;
        }
    }
    if best_norm < 1e-8 {
        return Err(Error::DegenerateProjector("projector has no nonzero column".into()));
    }
    let col: CVector = projector.column(best).into();
    Ok(col / C64::from(best_norm))
}

/// Joint eigenbasis of a petal, via rank-1 character projectors
/// `Π_χ = (1/|S|)·Σ_g χ*(g)·U_g` over the subgroup generated by the petal.
pub fn petal_eigenbasis(group: &HeisenbergGroup, petal: &Petal) -> Result<Basis> {
    let d = group.dim();
    let mut columns: Vec<CVector> = Vec::with_capacity(d);
    match group.kind() {
        GroupKind::Single => {
            let gen = order_normalized(
                group.displacement(&petal.generators[0])?.matrix(),
                d,
            )?;
            let mut powers = Vec::with_capacity(d);
            let mut acc = CMatrix::identity(d, d);
            for _ in 0..d {
                powers.push(acc.clone());
                acc = &acc * &gen;
            }
            let omega = group.omega();
            for k in 0..d {
                let mut proj = CMatrix::zeros(d, d);
                for (m, p) in powers.iter().enumerate() {
                    let chi = omega.powu((k * m) as u32).conj();
                    proj += p * chi;
                }
                proj /= C64::from(d as f64);
                columns.push(rank_one_column(&proj)?);
            }
        }
        GroupKind::Bipartite => {
            let a = order_normalized(group.displacement(&petal.generators[0])?.matrix(), 2)?;
            let b = order_normalized(group.displacement(&petal.generators[1])?.matrix(), 2)?;
            let ab = &a * &b;
            let id = CMatrix::identity(d, d);
            // four characters of Z₂ × Z₂ on the two generators
            for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let proj = (&id + &a * C64::from(s1) + &b * C64::from(s2)
                    + &ab * C64::from(s1 * s2))
                    / C64::from(4.0);
                columns.push(rank_one_column(&proj)?);
            }
        }
    }

    // deterministic phase: first nonzero amplitude real positive
    let mut matrix = CMatrix::zeros(d, d);
    for (i, col) in columns.into_iter().enumerate() {
        let fixed = StateVector::normalized(col)?.phase_fixed();
        matrix.set_column(i, fixed.amplitudes());
    }

    let basis = Basis { dim: d, matrix, petal: petal.clone() };
    verify_basis(group, &basis)?;
    Ok(basis)
}

fn verify_basis(group: &HeisenbergGroup, basis: &Basis) -> Result<()> {
    let d = basis.dim;
    let gram = basis.matrix.adjoint() * &basis.matrix;
    if (&gram - CMatrix::identity(d, d)).norm() > GRAM_TOL * d as f64 {
        return Err(Error::ConstructionFailure("eigenbasis Gram matrix is not identity".into()));
    }
    for member in basis.petal.members() {
        let op = group.displacement(member)?.matrix();
        for c in 0..d {
            let v: CVector = basis.matrix.column(c).into();
            let image = op * &v;
            // eigenvalue from the overlap; residual must vanish
            let lambda = v.dotc(&image);
            if (image - v * lambda).norm() > EIGEN_RESIDUAL_TOL {
                return Err(Error::ConstructionFailure(format!(
                    "column {c} is not an eigenvector of petal member {member:?}"
                )));
            }
        }
    }
    Ok(())
}

/// The stabilizer MUB of a flower: the eigenbases of its petals.
pub fn stabilizer_mub(group: &HeisenbergGroup, flower: &Flower) -> Result<MUBasisSet> {
    let bases = flower
        .petals()
        .iter()
        .map(|p| petal_eigenbasis(group, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(MUBasisSet { bases })
}

/// All distinct stabilizer states: `d(d+1)` for prime `d`, 60 for the
/// bipartite group. Deduplicated by fidelity.
pub fn stabilizer_states(group: &HeisenbergGroup) -> Result<Vec<StateVector>> {
    let mut states: Vec<StateVector> = Vec::new();
    for petal in enumerate_petals(group) {
        let basis = petal_eigenbasis(group, &petal)?;
        for col in basis.columns() {
            if !states.iter().any(|s| s.approx_eq(&col, 1e-8)) {
                states.push(col);
            }
        }
    }
    Ok(states)
}

/// Maximum deviation of `|⟨e|f⟩|²` from `1/d` over all inter-basis pairs;
/// zero for a perfect MUB.
pub fn unbiasedness_report(mub: &MUBasisSet) -> f64 {
    let d = mub.dim();
    let target = 1.0 / d as f64;
    let mut max_dev: f64 = 0.0;
    for (zi, a) in mub.bases().iter().enumerate() {
        for b in mub.bases().iter().skip(zi + 1) {
            let overlaps = a.matrix().adjoint() * b.matrix();
            for entry in overlaps.iter() {
                max_dev = max_dev.max((entry.norm_sqr() - target).abs());
            }
        }
    }
    max_dev
}

/// Maximum deviation from `1/d` between two explicit bases (used for
/// checking Alltop orbits against stabilizer bases).
pub fn unbiasedness_between(a: &Basis, b: &Basis) -> f64 {
    let target = 1.0 / a.dim() as f64;
    let overlaps = a.matrix().adjoint() * b.matrix();
    overlaps
        .iter()
        .map(|entry| (entry.norm_sqr() - target).abs())
        .fold(0.0, f64::max)
}

/// Builds a [`Basis`] from explicit orthonormal columns (no petal
/// provenance); validates the Gram identity.
pub fn basis_from_states(states: &[StateVector]) -> Result<Basis> {
    let d = states.len();
    if d == 0 || states.iter().any(|s| s.dim() != d) {
        return Err(Error::ConstructionFailure(
            "basis requires d states of dimension d".into(),
        ));
    }
    let mut matrix = CMatrix::zeros(d, d);
    for (i, s) in states.iter().enumerate() {
        matrix.set_column(i, s.amplitudes());
    }
    let gram = matrix.adjoint() * &matrix;
    if (&gram - CMatrix::identity(d, d)).norm() > GRAM_TOL * d as f64 {
        return Err(Error::ConstructionFailure("columns are not orthonormal".into()));
    }
    let petal = Petal { generators: vec![], members: vec![] };
    Ok(Basis { dim: d, matrix, petal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GroupKind, HeisenbergGroup};

    fn group(d: usize) -> HeisenbergGroup {
        HeisenbergGroup::build(d, GroupKind::Single).unwrap()
    }

    fn bipartite() -> HeisenbergGroup {
        HeisenbergGroup::build(4, GroupKind::Bipartite).unwrap()
    }

    #[test]
    fn d2_has_three_petals() {
        let g = group(2);
        let petals = enumerate_petals(&g);
        assert_eq!(petals.len(), 3);
        let singletons: Vec<_> = petals.iter().map(|p| p.members()[0]).collect();
        assert!(singletons.contains(&DisplacementIndex::Single { i: 0, j: 1 }));
        assert!(singletons.contains(&DisplacementIndex::Single { i: 1, j: 0 }));
        assert!(singletons.contains(&DisplacementIndex::Single { i: 1, j: 1 }));
    }

    #[test]
    fn d7_has_eight_petals_of_six() {
        let petals = enumerate_petals(&group(7));
        assert_eq!(petals.len(), 8);
        for p in &petals {
            assert_eq!(p.members().len(), 6);
        }
    }

    #[test]
    fn bipartite_has_fifteen_petals() {
        let petals = enumerate_petals(&bipartite());
        assert_eq!(petals.len(), 15);
        for p in &petals {
            assert_eq!(p.members().len(), 3);
            // members commute pairwise
            for a in p.members() {
                for b in p.members() {
                    assert_eq!(a.symplectic(b, 4).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn petal_members_commute_and_close() {
        for d in [3usize, 5, 7] {
            let g = group(d);
            for p in enumerate_petals(&g) {
                for a in p.members() {
                    for b in p.members() {
                        assert_eq!(a.symplectic(b, d).unwrap(), 0);
                        let c = a.compose(b, d).unwrap();
                        assert!(c.is_identity() || p.contains(&c));
                    }
                }
            }
        }
    }

    #[test]
    fn flower_counts() {
        for d in [2usize, 3, 5, 7] {
            assert_eq!(enumerate_flowers(&group(d)).len(), 1);
        }
        assert_eq!(enumerate_flowers(&bipartite()).len(), 6);
    }

    #[test]
    fn flowers_partition_nontrivial_indices() {
        for g in [group(5), bipartite()] {
            for flower in enumerate_flowers(&g) {
                let mut seen: Vec<DisplacementIndex> = Vec::new();
                for p in flower.petals() {
                    for m in p.members() {
                        assert!(!seen.contains(m), "index {m:?} appears twice");
                        seen.push(*m);
                    }
                }
                assert_eq!(seen.len(), g.element_count() - 1);
            }
        }
    }

    #[test]
    fn bipartite_each_petal_in_exactly_two_flowers() {
        let g = bipartite();
        let petals = enumerate_petals(&g);
        let flowers = enumerate_flowers(&g);
        for petal in &petals {
            let count = flowers.iter().filter(|f| f.petals().contains(petal)).count();
            assert_eq!(count, 2);
        }
    }

    #[test]
    fn z_petal_gives_computational_basis_d3() {
        let g = group(3);
        let petals = enumerate_petals(&g);
        // first petal in canonical order is generated by (0, 1) = Z
        let basis = petal_eigenbasis(&g, &petals[0]).unwrap();
        for k in 0..3 {
            let col = basis.column(k);
            assert!(col.approx_eq(&StateVector::basis_state(3, k), 1e-12));
        }
    }

    #[test]
    fn x_petal_gives_hadamard_basis_d2() {
        let g = group(2);
        let petals = enumerate_petals(&g);
        let x_petal = petals
            .iter()
            .find(|p| p.members()[0] == DisplacementIndex::Single { i: 1, j: 0 })
            .unwrap();
        let basis = petal_eigenbasis(&g, x_petal).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let plus = crate::algebra::state_from_slice(&[C64::from(s), C64::from(s)]).unwrap();
        let minus = crate::algebra::state_from_slice(&[C64::from(s), C64::from(-s)]).unwrap();
        assert!(basis.column(0).approx_eq(&plus, 1e-12));
        assert!(basis.column(1).approx_eq(&minus, 1e-12));
    }

    #[test]
    fn stabilizer_mubs_are_unbiased() {
        for d in [2usize, 3, 5, 7] {
            let g = group(d);
            let flower = &enumerate_flowers(&g)[0];
            let mub = stabilizer_mub(&g, flower).unwrap();
            assert_eq!(mub.len(), d + 1);
            assert!(unbiasedness_report(&mub) < 1e-10, "d={d}");
        }
    }

    #[test]
    fn bipartite_mubs_are_unbiased() {
        let g = bipartite();
        for flower in enumerate_flowers(&g) {
            let mub = stabilizer_mub(&g, &flower).unwrap();
            assert_eq!(mub.len(), 5);
            assert!(unbiasedness_report(&mub) < 1e-10);
        }
    }

    #[test]
    fn stabilizer_state_counts() {
        assert_eq!(stabilizer_states(&group(3)).unwrap().len(), 12);
        assert_eq!(stabilizer_states(&group(7)).unwrap().len(), 56);
        assert_eq!(stabilizer_states(&bipartite()).unwrap().len(), 60);
    }

    #[test]
    fn duplicate_bases_report_full_deviation() {
        let g = group(5);
        let flower = &enumerate_flowers(&g)[0];
        let basis = petal_eigenbasis(&g, &flower.petals()[0]).unwrap();
        let doubled = MUBasisSet { bases: vec![basis.clone(), basis] };
        let dev = unbiasedness_report(&doubled);
        assert!((dev - (1.0 - 0.2)).abs() < 1e-12);
    }

    #[test]
    fn group_covariance_of_mub() {
        // a displacement maps any basis element to an element of a basis in
        // the same flower's MUB, up to phase
        for g in [group(3), group(5)] {
            let d = g.dim();
            let flower = &enumerate_flowers(&g)[0];
            let mub = stabilizer_mub(&g, flower).unwrap();
            let all_states: Vec<StateVector> =
                mub.bases().iter().flat_map(|b| b.columns()).collect();
            for idx in g.indices().iter().take(4) {
                let op = g.displacement(idx).unwrap();
                for s in all_states.iter().take(6) {
                    let moved = op.apply(s).unwrap();
                    assert!(
                        all_states.iter().any(|t| t.approx_eq(&moved, 1e-9)),
                        "covariance fails at d={d}"
                    );
                }
            }
        }
    }
}
