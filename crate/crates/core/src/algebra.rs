//! Complex linear-algebra primitives, finite Heisenberg group construction,
//! the parity operator and the order-3 Zauner unitary.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{C64, CMatrix, CVector};

/// Dimensions supported for the single (Weyl-Heisenberg) group.
pub const SINGLE_DIMS: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

const NORM_TOL: f64 = 1e-12;
const UNITARITY_TOL: f64 = 1e-10;

/// Unit-norm complex amplitude vector, identified physically up to a global
/// phase. Equality testing therefore goes through [`StateVector::fidelity`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
}

impl StateVector {
    /// Wraps an amplitude vector, requiring unit norm within `1e-12`.
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "norm {norm} deviates from 1 by more than {NORM_TOL}"
            )));
        }
        Ok(Self { amps })
    }

    /// Normalizes an arbitrary nonzero vector into a state.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm < 1e-14 {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        Ok(Self { amps: amps / C64::from(norm) })
    }

    /// Computational basis state `|k⟩`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[k] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `|⟨self|other⟩|²` — the phase-insensitive equality measure.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// True when the two states coincide up to a global phase within `tol`.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim() && self.fidelity(other) > 1.0 - tol
    }

    /// Rescales by a global phase so the first amplitude above `1e-9` in
    /// modulus is real positive. Used for reproducible output.
    pub fn phase_fixed(&self) -> StateVector {
        for a in self.amps.iter() {
            if a.norm() > 1e-9 {
                let phase = a / C64::from(a.norm());
                return StateVector { amps: self.amps.clone() / phase };
            }
        }
        self.clone()
    }
}

/// A `d × d` unitary matrix (`U U† = I` within `1e-10` entrywise).
#[derive(Debug, Clone)]
pub struct UnitaryOperator {
    mat: CMatrix,
}

impl UnitaryOperator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::ConstructionFailure("operator matrix is not square".into()));
        }
        let d = mat.nrows();
        let prod = &mat * mat.adjoint();
        for r in 0..d {
            for c in 0..d {
                let expect = if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                if (prod[(r, c)] - expect).norm() > UNITARITY_TOL {
                    return Err(Error::ConstructionFailure(format!(
                        "matrix is not unitary at entry ({r}, {c})"
                    )));
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: psi.dim() });
        }
        StateVector::new(&self.mat * psi.amplitudes())
    }

    /// `⟨ψ|U|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> C64 {
        psi.amplitudes().dotc(&(&self.mat * psi.amplitudes()))
    }
}

/// Which of the two group families an object belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    /// Weyl-Heisenberg group H(d).
    Single,
    /// The bipartite direct product H(2) × H(2) in dimension 4.
    Bipartite,
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupKind::Single => write!(f, "single"),
            GroupKind::Bipartite => write!(f, "bipartite"),
        }
    }
}

/// Label of a displacement operator, reduced to canonical residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DisplacementIndex {
    /// `D_ij = ω^{ij/2} X^i Z^j` (phase convention varies with `d`).
    Single { i: usize, j: usize },
    /// `(X^a Z^b) ⊗ (X^c Z^e)` with all components mod 2.
    Bipartite { a: u8, b: u8, c: u8, e: u8 },
}

impl DisplacementIndex {
    pub fn single(i: i64, j: i64, d: usize) -> Self {
        let d = d as i64;
        DisplacementIndex::Single {
            i: i.rem_euclid(d) as usize,
            j: j.rem_euclid(d) as usize,
        }
    }

    pub fn bipartite(a: i64, b: i64, c: i64, e: i64) -> Self {
        DisplacementIndex::Bipartite {
            a: a.rem_euclid(2) as u8,
            b: b.rem_euclid(2) as u8,
            c: c.rem_euclid(2) as u8,
            e: e.rem_euclid(2) as u8,
        }
    }

    pub fn is_identity(&self) -> bool {
        match *self {
            DisplacementIndex::Single { i, j } => i == 0 && j == 0,
            DisplacementIndex::Bipartite { a, b, c, e } => a == 0 && b == 0 && c == 0 && e == 0,
        }
    }

    /// Componentwise sum mod the relevant modulus (group composition on labels).
    pub fn compose(&self, other: &DisplacementIndex, d: usize) -> Result<DisplacementIndex> {
        match (*self, *other) {
            (DisplacementIndex::Single { i, j }, DisplacementIndex::Single { i: k, j: l }) => {
                Ok(DisplacementIndex::single((i + k) as i64, (j + l) as i64, d))
            }
            (
                DisplacementIndex::Bipartite { a, b, c, e },
                DisplacementIndex::Bipartite { a: a2, b: b2, c: c2, e: e2 },
            ) => Ok(DisplacementIndex::bipartite(
                (a + a2) as i64,
                (b + b2) as i64,
                (c + c2) as i64,
                (e + e2) as i64,
            )),
            _ => Err(Error::IndexOutOfRange),
        }
    }

    /// Symplectic form of two labels; the commutation phase of the matching
    /// operators is `ω` to this power.
    pub fn symplectic(&self, other: &DisplacementIndex, d: usize) -> Result<usize> {
        match (*self, *other) {
            (DisplacementIndex::Single { i, j }, DisplacementIndex::Single { i: k, j: l }) => {
                let v = (j * k) as i64 - (i * l) as i64;
                Ok(v.rem_euclid(d as i64) as usize)
            }
            (
                DisplacementIndex::Bipartite { a, b, c, e },
                DisplacementIndex::Bipartite { a: a2, b: b2, c: c2, e: e2 },
            ) => {
                let v = (b * a2 + e * c2) as i64 - (a * b2 + c * e2) as i64;
                Ok(v.rem_euclid(2) as usize)
            }
            _ => Err(Error::IndexOutOfRange),
        }
    }
}

/// A finite Heisenberg group in its defining unitary representation, with
/// every displacement operator materialized.
#[derive(Debug, Clone)]
pub struct HeisenbergGroup {
    dim: usize,
    kind: GroupKind,
    omega: C64,
    generators: Vec<UnitaryOperator>,
    indices: Vec<DisplacementIndex>,
    ops: Vec<UnitaryOperator>,
}

fn root_of_unity(d: usize, power: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * power.rem_euclid(d as i64) as f64 / d as f64)
}

fn shift_matrix(d: usize) -> CMatrix {
    // X|e_i⟩ = |e_{i+1}⟩
    CMatrix::from_fn(d, d, |r, c| {
        if r == (c + 1) % d { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
    })
}

fn clock_matrix(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |r, c| {
        if r == c { root_of_unity(d, r as i64) } else { C64::new(0.0, 0.0) }
    })
}

/// `X^i Z^j` for a single group of dimension `d`, times `ω^{phase_power}`.
fn displacement_matrix_single(d: usize, i: usize, j: usize, phase_power: i64) -> CMatrix {
    let phase = root_of_unity(d, phase_power);
    CMatrix::from_fn(d, d, |r, c| {
        if r == (c + i) % d {
            phase * root_of_unity(d, (j * c) as i64)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

impl HeisenbergGroup {
    /// Builds the group for dimension `d`, validating the commutation
    /// relation `ZX = ωXZ` of the generators.
    pub fn build(d: usize, kind: GroupKind) -> Result<Self> {
        match kind {
            GroupKind::Single => {
                if !SINGLE_DIMS.contains(&d) {
                    return Err(Error::UnsupportedDimension { dim: d, kind: kind.to_string() });
                }
                let x = shift_matrix(d);
                let z = clock_matrix(d);
                let omega = root_of_unity(d, 1);
                // ω^{ij/2} for odd d, bare products for d = 2
                let inv2 = if d % 2 == 1 { ((d + 1) / 2) as i64 } else { 0 };
                let mut indices = Vec::with_capacity(d * d);
                let mut ops = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        indices.push(DisplacementIndex::Single { i, j });
                        let mat = displacement_matrix_single(d, i, j, inv2 * (i * j) as i64);
                        ops.push(UnitaryOperator::new(mat)?);
                    }
                }
                Ok(Self {
                    dim: d,
                    kind,
                    omega,
                    generators: vec![UnitaryOperator::new(x)?, UnitaryOperator::new(z)?],
                    indices,
                    ops,
                })
            }
            GroupKind::Bipartite => {
                if d != 4 {
                    return Err(Error::UnsupportedDimension { dim: d, kind: kind.to_string() });
                }
                let x = shift_matrix(2);
                let z = clock_matrix(2);
                let id = CMatrix::identity(2, 2);
                let generators = vec![
                    UnitaryOperator::new(kron(&x, &id))?,
                    UnitaryOperator::new(kron(&z, &id))?,
                    UnitaryOperator::new(kron(&id, &x))?,
                    UnitaryOperator::new(kron(&id, &z))?,
                ];
                let mut indices = Vec::with_capacity(16);
                let mut ops = Vec::with_capacity(16);
                for a in 0..2u8 {
                    for b in 0..2u8 {
                        for c in 0..2u8 {
                            for e in 0..2u8 {
                                indices.push(DisplacementIndex::Bipartite { a, b, c, e });
                                let left = displacement_matrix_single(2, a as usize, b as usize, 0);
                                let right = displacement_matrix_single(2, c as usize, e as usize, 0);
                                ops.push(UnitaryOperator::new(kron(&left, &right))?);
                            }
                        }
                    }
                }
                Ok(Self {
                    dim: 4,
                    kind,
                    omega: C64::new(-1.0, 0.0),
                    generators,
                    indices,
                    ops,
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// `e^{2πi/d}` for a single group, `−1` for the bipartite one.
    pub fn omega(&self) -> C64 {
        self.omega
    }

    pub fn generators(&self) -> &[UnitaryOperator] {
        &self.generators
    }

    /// All `d²` (16 for the bipartite group) displacement labels, identity first.
    pub fn indices(&self) -> &[DisplacementIndex] {
        &self.indices
    }

    pub fn nontrivial_indices(&self) -> impl Iterator<Item = &DisplacementIndex> {
        self.indices.iter().filter(|idx| !idx.is_identity())
    }

    pub fn element_count(&self) -> usize {
        self.indices.len()
    }

    fn flat_index(&self, idx: &DisplacementIndex) -> Result<usize> {
        match (*idx, self.kind) {
            (DisplacementIndex::Single { i, j }, GroupKind::Single) => {
                if i < self.dim && j < self.dim {
                    Ok(i * self.dim + j)
                } else {
                    Err(Error::IndexOutOfRange)
                }
            }
            (DisplacementIndex::Bipartite { a, b, c, e }, GroupKind::Bipartite) => {
                if a < 2 && b < 2 && c < 2 && e < 2 {
                    Ok(((a as usize * 2 + b as usize) * 2 + c as usize) * 2 + e as usize)
                } else {
                    Err(Error::IndexOutOfRange)
                }
            }
            _ => Err(Error::IndexOutOfRange),
        }
    }

    /// The displacement operator labelled by `idx`.
    pub fn displacement(&self, idx: &DisplacementIndex) -> Result<&UnitaryOperator> {
        Ok(&self.ops[self.flat_index(idx)?])
    }
}

/// The unitary realizing `P|k⟩ = |−k mod d⟩` for an odd prime `d`.
#[derive(Debug, Clone)]
pub struct ParityOperator {
    dim: usize,
    op: UnitaryOperator,
}

fn is_odd_prime(d: usize) -> bool {
    d > 2 && d % 2 == 1 && (2..d).all(|k| d % k != 0)
}

/// Builds the parity operator; errors on even or composite `d`.
pub fn parity_operator(d: usize) -> Result<ParityOperator> {
    if !is_odd_prime(d) {
        return Err(Error::UnsupportedDimension { dim: d, kind: "parity (odd prime)".into() });
    }
    let mat = CMatrix::from_fn(d, d, |r, c| {
        if r == (d - c) % d { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
    });
    Ok(ParityOperator { dim: d, op: UnitaryOperator::new(mat)? })
}

impl ParityOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operator(&self) -> &UnitaryOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    /// `‖Pψ + ψ‖` — zero iff `ψ` has parity −1.
    pub fn negative_residual(&self, psi: &StateVector) -> f64 {
        (self.matrix() * psi.amplitudes() + psi.amplitudes()).norm()
    }
}

/// Canonical orthonormal basis `(|k⟩ − |d−k⟩)/√2`, `k = 1..(d−1)/2`, of the
/// −1 parity eigenspace.
pub fn negative_parity_basis(d: usize) -> Result<Vec<StateVector>> {
    if !is_odd_prime(d) {
        return Err(Error::UnsupportedDimension { dim: d, kind: "parity (odd prime)".into() });
    }
    let inv_sqrt2 = C64::from(1.0 / 2f64.sqrt());
    (1..=(d - 1) / 2)
        .map(|k| {
            let mut amps = CVector::zeros(d);
            amps[k] = inv_sqrt2;
            amps[d - k] = -inv_sqrt2;
            StateVector::new(amps)
        })
        .collect()
}

/// Order-3 Clifford unitary acting on displacement labels by a symplectic
/// matrix mod `d` under conjugation.
#[derive(Debug, Clone)]
pub struct ZaunerUnitary {
    dim: usize,
    op: UnitaryOperator,
    /// `U³ = e^{iφ}·I` for the stored matrix (zero after normalization).
    phase: f64,
    /// Row-major symplectic matrix `[[α, β], [γ, δ]]` mod `d`.
    symplectic: [[i64; 2]; 2],
}

/// Image of a displacement label `(i, j)` under a symplectic matrix mod `d`.
pub fn symplectic_index_image(
    idx: &DisplacementIndex,
    f: &[[i64; 2]; 2],
    d: usize,
) -> Result<DisplacementIndex> {
    match *idx {
        DisplacementIndex::Single { i, j } => Ok(DisplacementIndex::single(
            f[0][0] * i as i64 + f[0][1] * j as i64,
            f[1][0] * i as i64 + f[1][1] * j as i64,
            d,
        )),
        _ => Err(Error::IndexOutOfRange),
    }
}

/// Image of a displacement label under the standard Zauner action
/// `(i, j) → (−j, i − j)` mod `d`.
pub fn zauner_index_image(idx: &DisplacementIndex, d: usize) -> Result<DisplacementIndex> {
    symplectic_index_image(idx, &[[0, -1], [1, -1]], d)
}

fn normalize_order3(mut raw: CMatrix) -> Result<CMatrix> {
    // fix the overall phase so the order-3 property is exact
    let cube = &raw * &raw * &raw;
    let s = cube[(0, 0)];
    if (s.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::ConstructionFailure("U³ is not proportional to the identity".into()));
    }
    let cube_root = C64::from_polar(1.0, s.arg() / 3.0);
    raw /= cube_root;
    Ok(raw)
}

/// Builds the Zauner unitary for an odd prime `d` via the metaplectic
/// representation of `[[0, −1], [1, −1]]`, normalized so that `U³ = I`.
pub fn zauner_unitary(d: usize) -> Result<ZaunerUnitary> {
    if !is_odd_prime(d) {
        return Err(Error::UnsupportedDimension { dim: d, kind: "zauner (odd prime)".into() });
    }
    // τ = ω^{(d+1)/2} is a d-th root of unity for odd d; the raw matrix is
    // (1/√d) τ^{j² + 2jk} at entry (j, k).
    let tau_power = |m: i64| root_of_unity(d, (((d + 1) / 2) as i64) * m);
    let scale = C64::from(1.0 / (d as f64).sqrt());
    let raw = CMatrix::from_fn(d, d, |j, k| {
        scale * tau_power((j * j + 2 * j * k) as i64)
    });
    let op = UnitaryOperator::new(normalize_order3(raw)?)?;

    let zauner =
        ZaunerUnitary { dim: d, op, phase: 0.0, symplectic: [[0, -1], [1, -1]] };
    zauner.verify_conjugation_action()?;
    Ok(zauner)
}

/// Order-3 Clifford realized as the index-scaling permutation `|k⟩ → |αk⟩`
/// with `α³ = 1 mod d`; it exists for primes `d ≡ 1 mod 3` and implements
/// the symplectic `diag(α, α⁻¹)`, conjugate to the standard Zauner action.
///
/// Unlike the metaplectic representative, this one commutes with the
/// parity-conjugation antiunitary, so its big eigenspace carries a real
/// form (see [`ZaunerUnitary::real_form_basis`]).
pub fn scaling_order3_unitary(d: usize) -> Result<ZaunerUnitary> {
    if !is_odd_prime(d) || d % 3 != 1 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            kind: "scaling order-3 (prime ≡ 1 mod 3)".into(),
        });
    }
    let alpha = (2..d as i64)
        .find(|a| a * a * a % d as i64 == 1)
        .ok_or_else(|| Error::ConstructionFailure("no cube root of unity mod d".into()))?;
    let alpha_inv = (1..d as i64).find(|b| alpha * b % d as i64 == 1).unwrap();
    let mat = CMatrix::from_fn(d, d, |r, c| {
        if r == (alpha as usize * c) % d { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
    });
    let op = UnitaryOperator::new(mat)?;
    let zauner = ZaunerUnitary {
        dim: d,
        op,
        phase: 0.0,
        symplectic: [[alpha, 0], [0, alpha_inv]],
    };
    zauner.verify_conjugation_action()?;
    Ok(zauner)
}

impl ZaunerUnitary {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operator(&self) -> &UnitaryOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// The symplectic matrix this unitary implements on displacement labels.
    pub fn symplectic(&self) -> &[[i64; 2]; 2] {
        &self.symplectic
    }

    /// Image of a label under this unitary's symplectic action.
    pub fn index_image(&self, idx: &DisplacementIndex) -> Result<DisplacementIndex> {
        symplectic_index_image(idx, &self.symplectic, self.dim)
    }

    fn verify_conjugation_action(&self) -> Result<()> {
        let group = HeisenbergGroup::build(self.dim, GroupKind::Single)?;
        let u = self.matrix();
        for idx in group.nontrivial_indices() {
            let image = self.index_image(idx)?;
            let conjugated = u * group.displacement(idx)?.matrix() * u.adjoint();
            let target = group.displacement(&image)?.matrix();
            // compare up to a unimodular phase read off the largest target entry
            let (mut best, mut pos) = (0.0, (0, 0));
            for r in 0..self.dim {
                for c in 0..self.dim {
                    if target[(r, c)].norm() > best {
                        best = target[(r, c)].norm();
                        pos = (r, c);
                    }
                }
            }
            let phase = conjugated[pos] / target[pos];
            if (phase.norm() - 1.0).abs() > 1e-8
                || (&conjugated - target * phase).norm() > 1e-8
            {
                return Err(Error::ConstructionFailure(format!(
                    "conjugation action mismatch at index {idx:?}"
                )));
            }
        }
        Ok(())
    }

    /// Projector onto the eigenspace of eigenvalue `e^{2πim/3}`, `m ∈ {0,1,2}`.
    pub fn eigenspace_projector(&self, m: usize) -> CMatrix {
        let u = self.matrix();
        let u2 = u * u;
        let lambda = C64::from_polar(1.0, 2.0 * PI * m as f64 / 3.0);
        let id = CMatrix::identity(self.dim, self.dim);
        (id + u * lambda.conj() + u2 * (lambda * lambda).conj()) / C64::from(3.0)
    }

    /// Eigenspace dimensions for `m = 0, 1, 2` (they sum to `d`).
    pub fn eigenspace_dims(&self) -> [usize; 3] {
        let mut dims = [0usize; 3];
        for (m, dim) in dims.iter_mut().enumerate() {
            let tr: C64 = self.eigenspace_projector(m).trace();
            *dim = tr.re.round() as usize;
        }
        dims
    }

    /// Index of the largest eigenspace.
    pub fn largest_eigenspace(&self) -> usize {
        let dims = self.eigenspace_dims();
        (0..3).max_by_key(|&m| dims[m]).unwrap()
    }

    /// Orthonormal basis of eigenspace `m`, obtained by projecting the
    /// computational basis and orthogonalizing.
    pub fn eigenspace_basis(&self, m: usize) -> Result<Vec<StateVector>> {
        let proj = self.eigenspace_projector(m);
        let rank = self.eigenspace_dims()[m];
        let mut basis: Vec<CVector> = Vec::with_capacity(rank);
        for k in 0..self.dim {
            let mut v: CVector = proj.column(k).into();
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
            if v.norm() > 1e-8 {
                let norm = v.norm();
                basis.push(v / C64::from(norm));
                if basis.len() == rank {
                    break;
                }
            }
        }
        if basis.len() != rank {
            return Err(Error::SubspaceConstructionFailure(format!(
                "found {} of {rank} eigenspace basis vectors",
                basis.len()
            )));
        }
        basis.into_iter().map(StateVector::new).collect()
    }

    /// Orthonormal basis of the real form of eigenspace `m`: the vectors
    /// fixed by the parity-conjugation antiunitary `ψ → P·conj(ψ)`.
    ///
    /// Real linear combinations of the returned vectors stay inside the
    /// form, and all mutual inner products are real, so the form is a copy
    /// of `R^n` inside the eigenspace (after a basis rotation the vectors
    /// have real amplitudes). Errors when the eigenspace carries no such
    /// vectors, which is the case for the metaplectic representative.
    pub fn real_form_basis(&self, m: usize) -> Result<Vec<StateVector>> {
        let d = self.dim;
        let proj = self.eigenspace_projector(m);
        let residual = CMatrix::identity(d, d) - proj;
        let parity = parity_operator(d)?;
        let pm = parity.matrix();

        // unknowns (x, y) = (Re ψ, Im ψ); conditions: ψ in the eigenspace
        // and P·conj(ψ) = ψ, i.e. Px = x, Py = −y
        let mut sys = DMatrix::<f64>::zeros(4 * d, 2 * d);
        for r in 0..d {
            for c in 0..d {
                let a = residual[(r, c)];
                sys[(r, c)] = a.re;
                sys[(r, c + d)] = -a.im;
                sys[(r + d, c)] = a.im;
                sys[(r + d, c + d)] = a.re;
                let p = pm[(r, c)].re;
                let id = if r == c { 1.0 } else { 0.0 };
                sys[(r + 2 * d, c)] = p - id;
                sys[(r + 3 * d, c + d)] = p + id;
            }
        }
        let svd = sys.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let mut basis = Vec::new();
        for (k, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma < 1e-10 {
                let row = v_t.row(k);
                let amps = CVector::from_fn(d, |i, _| C64::new(row[i], row[i + d]));
                // SVD rows are orthonormal in R^{2d}, which is exactly the
                // real part of the Hermitian inner product
                basis.push(StateVector::normalized(amps)?);
            }
        }
        if basis.is_empty() {
            return Err(Error::SubspaceConstructionFailure(
                "eigenspace carries no parity-conjugation fixed vectors".into(),
            ));
        }
        Ok(basis)
    }
}

/// Serializes a complex matrix as row-major `[re, im]` pairs (debug dumps).
pub fn matrix_to_json(mat: &CMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..mat.nrows())
        .map(|r| (0..mat.ncols()).map(|c| [mat[(r, c)].re, mat[(r, c)].im]).collect())
        .collect();
    serde_json::json!(rows)
}

/// Deserializes a state from a JSON array of `[re, im]` pairs, normalizing.
pub fn state_from_json(value: &serde_json::Value) -> Result<StateVector> {
    let pairs: Vec<[f64; 2]> = serde_json::from_value(value.clone())
        .map_err(|e| Error::Config(format!("bad state encoding: {e}")))?;
    let amps = CVector::from_iterator(pairs.len(), pairs.iter().map(|p| C64::new(p[0], p[1])));
    StateVector::normalized(amps)
}

/// Serializes a state as a JSON array of `[re, im]` pairs.
pub fn state_to_json(psi: &StateVector) -> serde_json::Value {
    let pairs: Vec<[f64; 2]> = psi.amplitudes().iter().map(|a| [a.re, a.im]).collect();
    serde_json::json!(pairs)
}

pub use helpers::complex_close;

mod helpers {
    use super::*;

    /// Entrywise matrix comparison helper shared by the test suites.
    pub fn complex_close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.nrows() == b.nrows() && a.ncols() == b.ncols() && (a - b).norm() <= tol
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

// convenience for building small states in tests and catalogs
pub fn state_from_slice(entries: &[C64]) -> Result<StateVector> {
    StateVector::normalized(DVector::from_row_slice(entries))
}
