//! Constructive similarity machinery: the damping element, the series
//! weight z, the contraction similarity, the generalized spectral radius
//! formula in its epsilon and exact branches, and the simultaneous
//! contraction similarities.

use num_complex::Complex64;

use crate::algebra::{
    commutation_defect, quotient_norm, AlgebraElement, IdealSpec,
};
use crate::error::{Error, Result};
use crate::linalg::{self, stein_solve_auto, CMatrix};

pub const COMMUTATION_TOL: f64 = 1e-10;

/// Conditioning flag threshold: exact mode with a quotient-norm/spectral-radius
/// gap below this is accepted but flagged.
pub const NEAR_BOUNDARY_GAP: f64 = 1e-6;

/// A certified similarity 1 + e with e in the ideal.
#[derive(Debug, Clone)]
pub struct SimilarityWitness {
    /// The ideal part of the similarity; off-ideal blocks are exactly zero.
    pub e: AlgebraElement,
    /// ||(1+e) a_j (1+e)^{-1}|| per input.
    pub achieved: Vec<f64>,
    /// max{r(a_j), ||a_j-dot||} per input.
    pub targets: Vec<f64>,
    /// 0 in exact mode.
    pub epsilon: f64,
    /// Condition number of 1 + e.
    pub condition: f64,
    /// Worst off-ideal block norm of e.
    pub in_ideal_residual: f64,
    /// Set when the exact branch ran close to the convergence boundary.
    pub conditioning_warning: bool,
}

impl SimilarityWitness {
    /// (1+e) x (1+e)^{-1}, blockwise.
    pub fn conjugate(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        let one_e = AlgebraElement::identity(&x.signature).add(&self.e)?;
        one_e.conjugate_of(x)
    }
}

fn targets_of(a_list: &[AlgebraElement], ideal: &IdealSpec) -> Result<Vec<f64>> {
    a_list
        .iter()
        .map(|a| Ok(a.spec_radius()?.max(quotient_norm(a, ideal)?)))
        .collect()
}

fn require_commuting(a_list: &[AlgebraElement]) -> Result<()> {
    if a_list.is_empty() {
        return Err(Error::InvalidInput("empty element list".into()));
    }
    let defect = commutation_defect(a_list)?;
    if defect > COMMUTATION_TOL {
        return Err(Error::NotCommuting { defect });
    }
    Ok(())
}

/// The damping element: i_0 in I with 0 <= i_0 <= 1 and ||(1-i_0) a_j|| <= 1
/// for all j. Per ideal block, scalar shrinking by t_b = min(1, 1/m_b) where
/// m_b is the largest block norm over the family.
pub fn ideal_damping(a_list: &[AlgebraElement], ideal: &IdealSpec) -> Result<AlgebraElement> {
    if a_list.is_empty() {
        return Err(Error::InvalidInput("empty element list".into()));
    }
    for a in a_list {
        let qn = quotient_norm(a, ideal)?;
        if qn > 1.0 + 1e-12 {
            return Err(Error::PreconditionViolation(format!(
                "quotient norm {qn} exceeds 1"
            )));
        }
    }
    let sig = &ideal.signature;
    let mut damping = AlgebraElement::zero(sig);
    for &b in &ideal.ideal_blocks {
        let mut m_b = 0.0f64;
        for a in a_list {
            m_b = m_b.max(linalg::op_norm(&a.blocks[b])?);
        }
        let t_b = if m_b == 0.0 { 1.0 } else { (1.0 / m_b).min(1.0) };
        damping.blocks[b] = linalg::identity(sig.block_dims[b]) * Complex64::from(1.0 - t_b);
    }
    Ok(damping)
}

/// z = 1 + sum over k_1+...+k_n >= 1 of (a_1*)^{k_1}...(a_n*)^{k_n} i a_n^{k_n}...a_1^{k_1},
/// computed as 1 - i + nested Stein solves. Off-ideal blocks of z are exactly
/// the identity.
pub fn series_weight(
    a_list: &[AlgebraElement],
    i: &AlgebraElement,
    ideal: &IdealSpec,
) -> Result<AlgebraElement> {
    if a_list.is_empty() {
        return Err(Error::InvalidInput("empty element list".into()));
    }
    let (inside, off_norm) = crate::algebra::is_in_ideal(i, ideal, 1e-12)?;
    if !inside {
        return Err(Error::PreconditionViolation(format!(
            "i is not in the ideal: off-ideal norm {off_norm}"
        )));
    }
    let sig = &ideal.signature;
    let mut z = AlgebraElement::identity(sig);
    for &b in &ideal.ideal_blocks {
        let dim = sig.block_dims[b];
        let mut w: CMatrix = linalg::hermitize(&i.blocks[b]);
        // nested sum: innermost solve uses a_n, outermost a_1
        for a in a_list.iter().rev() {
            w = stein_solve_auto(&a.blocks[b], &w)?.z;
        }
        z.blocks[b] = &(&linalg::identity(dim) - &i.blocks[b]) + &w;
        z.blocks[b] = linalg::hermitize(&z.blocks[b]);
    }
    Ok(z)
}

struct SqrtPair {
    y: AlgebraElement,
    y_inv: AlgebraElement,
    condition: f64,
}

// Blockwise z^{1/2} and z^{-1/2}; off-ideal blocks stay exactly identity.
fn algebra_sqrt(z: &AlgebraElement, ideal: &IdealSpec) -> Result<SqrtPair> {
    let mut y = AlgebraElement::identity(&z.signature);
    let mut y_inv = AlgebraElement::identity(&z.signature);
    let mut condition = 1.0f64;
    for &b in &ideal.ideal_blocks {
        let (root, root_inv) = linalg::herm_sqrt_with_inverse(&z.blocks[b])?;
        condition = condition.max(linalg::cond(&root)?);
        y.blocks[b] = root;
        y_inv.blocks[b] = root_inv;
    }
    Ok(SqrtPair { y, y_inv, condition })
}

fn conjugated_norms(
    pair: &SqrtPair,
    a_list: &[AlgebraElement],
) -> Result<Vec<f64>> {
    a_list
        .iter()
        .map(|a| pair.y.mul(a)?.mul(&pair.y_inv)?.op_norm())
        .collect()
}

fn witness_from_pair(
    pair: SqrtPair,
    a_list: &[AlgebraElement],
    ideal: &IdealSpec,
    epsilon: f64,
    warning: bool,
) -> Result<SimilarityWitness> {
    let achieved = conjugated_norms(&pair, a_list)?;
    let targets = targets_of(a_list, ideal)?;
    let e = pair
        .y
        .sub(&AlgebraElement::identity(&ideal.signature))?;
    let (_, in_ideal_residual) = crate::algebra::is_in_ideal(&e, ideal, 1e-12)?;
    Ok(SimilarityWitness {
        e,
        achieved,
        targets,
        epsilon,
        condition: pair.condition,
        in_ideal_residual,
        conditioning_warning: warning,
    })
}

/// One common e in I with ||(1+e) a_j (1+e)^{-1}|| <= 1 for the whole family.
/// Requires r(a_j) < 1 and quotient norm <= 1 for each j.
pub fn contraction_similarity(
    a_list: &[AlgebraElement],
    ideal: &IdealSpec,
) -> Result<SimilarityWitness> {
    require_commuting(a_list)?;
    for a in a_list {
        let r = a.spec_radius()?;
        if r >= 1.0 {
            return Err(Error::SpectralRadiusViolation {
                radius: r,
                limit: 1.0,
            });
        }
    }
    let i0 = ideal_damping(a_list, ideal)?;
    // i = 1 - (1 - i_0)^2
    let one = AlgebraElement::identity(&ideal.signature);
    let shrink = one.sub(&i0)?;
    let i = one.sub(&shrink.mul(&shrink)?)?;
    let z = series_weight(a_list, &i, ideal)?;
    let pair = algebra_sqrt(&z, ideal)?;
    witness_from_pair(pair, a_list, ideal, 0.0, false)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Achieve max{r, quotient norm} + epsilon.
    Epsilon(f64),
    /// Achieve the quotient norm exactly; requires r(a_j) < ||a_j-dot|| per j.
    Exact,
}

/// The generalized spectral radius formula, constructively: one e for the
/// whole commuting family, epsilon or exact branch.
pub fn optimal_similarity(
    a_list: &[AlgebraElement],
    ideal: &IdealSpec,
    mode: Mode,
) -> Result<SimilarityWitness> {
    require_commuting(a_list)?;
    let targets = targets_of(a_list, ideal)?;
    let mut warning = false;

    let (deltas, epsilon) = match mode {
        Mode::Epsilon(eps) => {
            if eps <= 0.0 {
                return Err(Error::InvalidInput("epsilon must be positive".into()));
            }
            // aim slightly inside the open upper end so the recomputed norm
            // stays at or below target + eps despite round-off
            let eps_inner = eps * (1.0 - 1e-9);
            let deltas = targets
                .iter()
                .map(|&t| if t == 0.0 { eps_inner } else { t + eps_inner })
                .collect::<Vec<_>>();
            (deltas, eps)
        }
        Mode::Exact => {
            let mut deltas = Vec::with_capacity(a_list.len());
            for a in a_list {
                let r = a.spec_radius()?;
                let qn = quotient_norm(a, ideal)?;
                if r >= qn {
                    return Err(Error::AttainmentUnavailable(format!(
                        "exact attainment requires r < quotient norm, got r = {r}, \
                         quotient norm = {qn}; the infimum need not be attained here"
                    )));
                }
                if qn - r < NEAR_BOUNDARY_GAP {
                    warning = true;
                }
                deltas.push(qn);
            }
            (deltas, 0.0)
        }
    };

    let scaled: Vec<AlgebraElement> = a_list
        .iter()
        .zip(&deltas)
        .map(|(a, &d)| a.scale(Complex64::from(1.0 / d)))
        .collect();
    let inner = contraction_similarity(&scaled, ideal)?;
    // the same y certifies the unscaled family
    let one = AlgebraElement::identity(&ideal.signature);
    let y = one.add(&inner.e)?;
    let y_inv = {
        let mut inv = AlgebraElement::identity(&ideal.signature);
        for &b in &ideal.ideal_blocks {
            inv.blocks[b] = linalg::inverse(&y.blocks[b])?;
        }
        inv
    };
    let pair = SqrtPair {
        y,
        y_inv,
        condition: inner.condition,
    };
    witness_from_pair(pair, a_list, ideal, epsilon, warning)
}

/// Common y with ||y a y^{-1}|| < 1 and ||y b y^{-1}|| <= 1, over I = A.
/// Requires [a,b] = 0, r(a) < 1, ||b|| <= 1; z = sum_k (a*)^k a^k.
pub fn joint_contraction_pair(
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<SimilarityWitness> {
    require_commuting(&[a.clone(), b.clone()])?;
    let r = a.spec_radius()?;
    if r >= 1.0 {
        return Err(Error::SpectralRadiusViolation {
            radius: r,
            limit: 1.0,
        });
    }
    let nb = b.op_norm()?;
    if nb > 1.0 + 1e-12 {
        return Err(Error::PreconditionViolation(format!(
            "||b|| = {nb} exceeds 1"
        )));
    }
    let ideal = IdealSpec::full(a.signature.clone());
    let mut z = AlgebraElement::identity(&a.signature);
    for (bi, blk) in a.blocks.iter().enumerate() {
        z.blocks[bi] = stein_solve_auto(blk, &linalg::identity(blk.nrows()))?.z;
    }
    let pair = algebra_sqrt(&z, &ideal)?;
    let achieved = conjugated_norms(&pair, &[a.clone(), b.clone()])?;
    let e = pair.y.sub(&AlgebraElement::identity(&a.signature))?;
    Ok(SimilarityWitness {
        e,
        achieved,
        targets: vec![r, nb],
        epsilon: 0.0,
        condition: pair.condition,
        in_ideal_residual: 0.0,
        conditioning_warning: false,
    })
}

/// Outcome of the simultaneous-contraction construction: the common
/// similarity c = y s and the two conjugated norms it certifies.
#[derive(Debug, Clone)]
pub struct SimultaneousContraction {
    pub c: AlgebraElement,
    pub norm_a: f64,
    pub norm_b: f64,
}

/// Given commuting a, b with r(a) < 1 and a similarity s taking b to a
/// contraction, produces one c with ||c a c^{-1}|| < 1 and ||c b c^{-1}|| <= 1.
pub fn simultaneous_contraction(
    a: &AlgebraElement,
    b: &AlgebraElement,
    s: &AlgebraElement,
) -> Result<SimultaneousContraction> {
    require_commuting(&[a.clone(), b.clone()])?;
    let cond_s = s.cond()?;
    if !cond_s.is_finite() || cond_s > 1e12 {
        return Err(Error::SingularSimilarity(format!(
            "condition number of s is {cond_s}"
        )));
    }
    let r = a.spec_radius()?;
    if r >= 1.0 {
        return Err(Error::SpectralRadiusViolation {
            radius: r,
            limit: 1.0,
        });
    }
    let sb = s.conjugate_of(b)?;
    let nsb = sb.op_norm()?;
    if nsb > 1.0 + 1e-12 {
        return Err(Error::PreconditionViolation(format!(
            "||s b s^{{-1}}|| = {nsb} exceeds 1"
        )));
    }
    let sa = s.conjugate_of(a)?;
    let witness = joint_contraction_pair(&sa, &sb)?;
    let y = AlgebraElement::identity(&a.signature).add(&witness.e)?;
    let c = y.mul(s)?;
    let norm_a = c.conjugate_of(a)?.op_norm()?;
    let norm_b = c.conjugate_of(b)?.op_norm()?;
    Ok(SimultaneousContraction { c, norm_a, norm_b })
}
