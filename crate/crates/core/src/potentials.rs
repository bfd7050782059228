//! The two frame potentials `f_SIC` and `f_MUS`, probability vectors,
//! autocorrelations, the inequality relating the potentials, and analytic
//! gradients for the optimizer.

use serde::Serialize;

use crate::algebra::{GroupKind, HeisenbergGroup, StateVector};
use crate::error::{Error, Result};
use crate::mubs::{Basis, MUBasisSet};
use crate::{C64, CVector};

/// Gap below this is reported as saturation of the inequality.
pub const SATURATION_TOL: f64 = 1e-8;
/// Δ-spread below this counts as a regular simplex.
pub const DELTA_SPREAD_TOL: f64 = 1e-7;

/// Outcome probabilities of a state in one basis (sum to 1 within `1e-12`).
#[derive(Debug, Clone, Serialize)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let sum: f64 = entries.iter().sum();
        if entries.iter().any(|&p| p < -1e-14) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("probabilities sum to {sum}")));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `Σ p_i²` — the purity of the projected distribution.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|p| p * p).sum()
    }
}

/// Cyclic autocorrelations `Δ_k = Σ_m p_m p_{m+k}`, `k = 1..(d−1)/2`.
#[derive(Debug, Clone, Serialize)]
pub struct AutocorrelationVector {
    deltas: Vec<f64>,
}

impl AutocorrelationVector {
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// `max Δ_k − min Δ_k`; zero means the projected orbit is a regular simplex.
    pub fn spread(&self) -> f64 {
        let max = self.deltas.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.deltas.iter().cloned().fold(f64::MAX, f64::min);
        if self.deltas.is_empty() { 0.0 } else { max - min }
    }
}

/// Evaluation of both potentials and the inequality for one state.
#[derive(Debug, Clone, Serialize)]
pub struct PotentialReport {
    pub f_sic: f64,
    pub f_mus_per_mub: Vec<f64>,
    pub inequality_lhs: f64,
    pub inequality_rhs: f64,
    pub gap: f64,
    pub saturated: bool,
}

/// `p_{i,(z)} = |⟨e_i^{(z)}|ψ⟩|²`.
pub fn probability_vector(basis: &Basis, psi: &StateVector) -> Result<ProbabilityVector> {
    if basis.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: psi.dim() });
    }
    let overlaps = basis.matrix().adjoint() * psi.amplitudes();
    ProbabilityVector::new(overlaps.iter().map(|a| a.norm_sqr()).collect())
}

/// Coefficient `d²/(d−1)` of the inequality (16/3 for the bipartite group).
pub fn inequality_coefficient(d: usize) -> f64 {
    (d * d) as f64 / (d as f64 - 1.0)
}

/// Target value `1/(d+1)` of the squared displacement overlaps.
fn sic_target(d: usize) -> f64 {
    1.0 / (d as f64 + 1.0)
}

/// Target value `2/(d+1)` of the per-basis purity.
fn mus_target(d: usize) -> f64 {
    2.0 / (d as f64 + 1.0)
}

/// `f_SIC(ψ) = Σ_{a ≠ 0} (|⟨ψ|D_a|ψ⟩|² − 1/(d+1))²` over the nontrivial
/// displacement operators.
pub fn f_sic(group: &HeisenbergGroup, psi: &StateVector) -> Result<f64> {
    let d = group.dim();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.dim() });
    }
    let target = sic_target(d);
    let mut total = 0.0;
    for idx in group.nontrivial_indices() {
        let c = group.displacement(idx)?.expectation(psi);
        let dev = c.norm_sqr() - target;
        total += dev * dev;
    }
    Ok(total)
}

/// `f_MUS(ψ) = Σ_z (Σ_r p_{r,(z)}² − 2/(d+1))²`.
pub fn f_mus(mub: &MUBasisSet, psi: &StateVector) -> Result<f64> {
    let d = mub.dim();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.dim() });
    }
    let target = mus_target(d);
    let mut total = 0.0;
    for basis in mub.bases() {
        let purity = probability_vector(basis, psi)?.purity();
        let dev = purity - target;
        total += dev * dev;
    }
    Ok(total)
}

/// Autocorrelations of a probability vector; odd dimensions only.
pub fn autocorrelations(p: &ProbabilityVector) -> Result<AutocorrelationVector> {
    let d = p.dim();
    if d % 2 == 0 {
        return Err(Error::UnsupportedDimension { dim: d, kind: "autocorrelation (odd)".into() });
    }
    let entries = p.entries();
    let deltas = (1..=(d - 1) / 2)
        .map(|k| (0..d).map(|m| entries[m] * entries[(m + k) % d]).sum())
        .collect();
    Ok(AutocorrelationVector { deltas })
}

/// Evaluates both potentials and the inequality
/// `f_SIC ≥ d²/(d−1) · f_MUS` for one state against one stabilizer MUB.
pub fn inequality_report(
    group: &HeisenbergGroup,
    mub: &MUBasisSet,
    psi: &StateVector,
) -> Result<PotentialReport> {
    let fs = f_sic(group, psi)?;
    let fm = f_mus(mub, psi)?;
    let rhs = inequality_coefficient(group.dim()) * fm;
    let gap = fs - rhs;
    Ok(PotentialReport {
        f_sic: fs,
        f_mus_per_mub: vec![fm],
        inequality_lhs: fs,
        inequality_rhs: rhs,
        gap,
        saturated: gap < SATURATION_TOL,
    })
}

/// True iff every basis projection of the orbit forms a regular simplex
/// (all `Δ_k` agree within `tol` for every basis); also returns the
/// per-basis Δ-spread. Odd prime dimensions only.
pub fn simplex_membership(
    group: &HeisenbergGroup,
    mub: &MUBasisSet,
    psi: &StateVector,
    tol: f64,
) -> Result<(bool, Vec<f64>)> {
    if group.kind() != GroupKind::Single || group.dim() % 2 == 0 {
        return Err(Error::UnsupportedDimension {
            dim: group.dim(),
            kind: "simplex membership (odd prime)".into(),
        });
    }
    let mut spreads = Vec::with_capacity(mub.len());
    for basis in mub.bases() {
        let p = probability_vector(basis, psi)?;
        spreads.push(autocorrelations(&p)?.spread());
    }
    let ok = spreads.iter().all(|&s| s < tol);
    Ok((ok, spreads))
}

/// Removes the radial component: the gradient restricted to the unit sphere.
pub fn project_tangent(psi: &CVector, grad: &CVector) -> CVector {
    let radial = psi.dotc(grad).re;
    grad - psi * C64::from(radial)
}

/// Raw Wirtinger gradient of `f_SIC`, in the convention
/// `df = Re⟨G, δψ⟩` on amplitudes.
pub fn raw_gradient_f_sic(group: &HeisenbergGroup, psi: &StateVector) -> Result<CVector> {
    let d = group.dim();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.dim() });
    }
    let target = sic_target(d);
    let amps = psi.amplitudes();
    let mut g = CVector::zeros(d);
    for idx in group.nontrivial_indices() {
        let op = group.displacement(idx)?.matrix();
        let fwd = op * amps;
        let bwd = op.adjoint() * amps;
        let c = amps.dotc(&fwd);
        let w = C64::from(2.0 * (c.norm_sqr() - target));
        g += fwd * (w * c.conj()) + bwd * (w * c);
    }
    Ok(g * C64::from(2.0))
}

/// Sphere-restricted analytic gradient of `f_SIC`.
pub fn gradient_f_sic(group: &HeisenbergGroup, psi: &StateVector) -> Result<CVector> {
    let raw = raw_gradient_f_sic(group, psi)?;
    Ok(project_tangent(psi.amplitudes(), &raw))
}

/// Raw Wirtinger gradient of `f_MUS`, same convention as
/// [`raw_gradient_f_sic`].
pub fn raw_gradient_f_mus(mub: &MUBasisSet, psi: &StateVector) -> Result<CVector> {
    let d = mub.dim();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.dim() });
    }
    let target = mus_target(d);
    let amps = psi.amplitudes();
    let mut g = CVector::zeros(d);
    for basis in mub.bases() {
        let overlaps = basis.matrix().adjoint() * amps;
        let purity: f64 = overlaps.iter().map(|a| a.norm_sqr().powi(2)).sum();
        let w = 2.0 * (purity - target);
        // Σ_r 2 p_r a_r e_r, assembled as B·(2 p ⊙ a)
        let weighted = CVector::from_iterator(
            d,
            overlaps.iter().map(|a| a * C64::from(2.0 * a.norm_sqr() * w)),
        );
        g += basis.matrix() * weighted;
    }
    Ok(g * C64::from(2.0))
}

/// Sphere-restricted analytic gradient of `f_MUS`.
pub fn gradient_f_mus(mub: &MUBasisSet, psi: &StateVector) -> Result<CVector> {
    let raw = raw_gradient_f_mus(mub, psi)?;
    Ok(project_tangent(psi.amplitudes(), &raw))
}
