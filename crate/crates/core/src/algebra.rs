//! The finite-dimensional model A = M_{n_1} + ... + M_{n_B} (direct sum),
//! a designated block ideal, the quotient norm, and polynomial functional
//! calculus over the algebra.

use std::collections::BTreeSet;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSignature {
    pub block_dims: Vec<usize>,
}

impl AlgebraSignature {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput(
                "signature needs at least one block, all dimensions >= 1".into(),
            ));
        }
        Ok(Self { block_dims })
    }

    pub fn block_count(&self) -> usize {
        self.block_dims.len()
    }
}

/// The ideal is the sub-sum over `ideal_blocks` (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealSpec {
    pub signature: AlgebraSignature,
    pub ideal_blocks: BTreeSet<usize>,
}

impl IdealSpec {
    pub fn new(signature: AlgebraSignature, ideal_blocks: BTreeSet<usize>) -> Result<Self> {
        if let Some(&b) = ideal_blocks.iter().find(|&&b| b >= signature.block_count()) {
            return Err(Error::InvalidInput(format!(
                "ideal block index {b} out of range for {} blocks",
                signature.block_count()
            )));
        }
        Ok(Self {
            signature,
            ideal_blocks,
        })
    }

    /// I = A: every block in the ideal, the quotient is zero.
    pub fn full(signature: AlgebraSignature) -> Self {
        let ideal_blocks = (0..signature.block_count()).collect();
        Self {
            signature,
            ideal_blocks,
        }
    }

    pub fn contains(&self, block: usize) -> bool {
        self.ideal_blocks.contains(&block)
    }

    /// Blocks surviving in the quotient A/I.
    pub fn quotient_blocks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.signature.block_count()).filter(move |b| !self.contains(*b))
    }

    pub fn quotient_is_zero(&self) -> bool {
        self.ideal_blocks.len() == self.signature.block_count()
    }
}

#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub signature: AlgebraSignature,
    pub blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn new(signature: AlgebraSignature, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != signature.block_count() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                signature.block_count(),
                blocks.len()
            )));
        }
        for (b, m) in blocks.iter().enumerate() {
            linalg::validate(m)?;
            if m.nrows() != signature.block_dims[b] {
                return Err(Error::ShapeMismatch(format!(
                    "block {b} should be {0}x{0}, got {1}x{1}",
                    signature.block_dims[b],
                    m.nrows()
                )));
            }
        }
        Ok(Self { signature, blocks })
    }

    pub fn zero(signature: &AlgebraSignature) -> Self {
        let blocks = signature
            .block_dims
            .iter()
            .map(|&d| Array2::zeros((d, d)))
            .collect();
        Self {
            signature: signature.clone(),
            blocks,
        }
    }

    pub fn identity(signature: &AlgebraSignature) -> Self {
        let blocks = signature
            .block_dims
            .iter()
            .map(|&d| linalg::identity(d))
            .collect();
        Self {
            signature: signature.clone(),
            blocks,
        }
    }

    /// Single-block wrapper, convenient for the I = A specialization.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        linalg::validate(&m)?;
        let signature = AlgebraSignature::new(vec![m.nrows()])?;
        Ok(Self {
            signature,
            blocks: vec![m],
        })
    }

    fn check_same_signature(&self, other: &Self) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::ShapeMismatch("signatures differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_signature(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            signature: self.signature.clone(),
            blocks,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_signature(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            signature: self.signature.clone(),
            blocks,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_signature(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dot(b))
            .collect();
        Ok(Self {
            signature: self.signature.clone(),
            blocks,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let blocks = self.blocks.iter().map(|m| m * factor).collect();
        Self {
            signature: self.signature.clone(),
            blocks,
        }
    }

    pub fn adjoint(&self) -> Self {
        let blocks = self.blocks.iter().map(linalg::adjoint).collect();
        Self {
            signature: self.signature.clone(),
            blocks,
        }
    }

    /// Full-algebra operator norm: max over blocks.
    pub fn op_norm(&self) -> Result<f64> {
        let mut n = 0.0f64;
        for m in &self.blocks {
            n = n.max(linalg::op_norm(m)?);
        }
        Ok(n)
    }

    /// Spectral radius over the algebra: max over blocks.
    pub fn spec_radius(&self) -> Result<f64> {
        let mut r = 0.0f64;
        for m in &self.blocks {
            r = r.max(linalg::spec_radius(m)?);
        }
        Ok(r)
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut out = Vec::new();
        for m in &self.blocks {
            out.extend(linalg::eigenvalues(m)?);
        }
        Ok(out)
    }

    /// Blockwise s (self) s^{-1}.
    pub fn conjugate_of(&self, x: &Self) -> Result<Self> {
        self.check_same_signature(x)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&x.blocks)
            .map(|(s, m)| linalg::conjugate(s, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            signature: self.signature.clone(),
            blocks,
        })
    }

    pub fn cond(&self) -> Result<f64> {
        let mut worst = 1.0f64;
        for m in &self.blocks {
            worst = worst.max(linalg::cond(m)?);
        }
        Ok(worst)
    }
}

/// ||a_j a_k - a_k a_j|| / (1 + ||a_j|| ||a_k||), maximized over pairs.
pub fn commutation_defect(elements: &[AlgebraElement]) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 0..elements.len() {
        for k in (j + 1)..elements.len() {
            let ab = elements[j].mul(&elements[k])?;
            let ba = elements[k].mul(&elements[j])?;
            let defect = ab.sub(&ba)?.op_norm()?
                / (1.0 + elements[j].op_norm()? * elements[k].op_norm()?);
            worst = worst.max(defect);
        }
    }
    Ok(worst)
}

/// ||a-dot||: max operator norm over the blocks surviving in A/I.
/// Zero when the quotient is the zero algebra.
pub fn quotient_norm(a: &AlgebraElement, ideal: &IdealSpec) -> Result<f64> {
    check_ideal_signature(a, ideal)?;
    let mut n = 0.0f64;
    for b in ideal.quotient_blocks() {
        n = n.max(linalg::op_norm(&a.blocks[b])?);
    }
    Ok(n)
}

/// Essential spectral radius analog: spectral radius of the quotient image.
pub fn quotient_spec_radius(a: &AlgebraElement, ideal: &IdealSpec) -> Result<f64> {
    check_ideal_signature(a, ideal)?;
    let mut r = 0.0f64;
    for b in ideal.quotient_blocks() {
        r = r.max(linalg::spec_radius(&a.blocks[b])?);
    }
    Ok(r)
}

/// Certifies membership in the ideal; reports the worst off-ideal block norm.
pub fn is_in_ideal(a: &AlgebraElement, ideal: &IdealSpec, tol: f64) -> Result<(bool, f64)> {
    let off = quotient_norm(a, ideal)?;
    Ok((off <= tol, off))
}

fn check_ideal_signature(a: &AlgebraElement, ideal: &IdealSpec) -> Result<()> {
    if a.signature != ideal.signature {
        return Err(Error::ShapeMismatch(
            "element signature does not match the ideal".into(),
        ));
    }
    Ok(())
}

/// Complex coefficients a_0..a_n, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::from(0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::from(c)).collect())
    }

    /// p(t) = t
    pub fn t() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn eval_scalar(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::from(0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Horner evaluation; the constant term contributes a_0 * identity.
    pub fn eval_matrix(&self, m: &CMatrix) -> Result<CMatrix> {
        linalg::validate(m)?;
        let dim = m.nrows();
        let mut acc: CMatrix = linalg::identity(dim) * *self.coeffs.last().unwrap();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.dot(m) + &(linalg::identity(dim) * *c);
        }
        Ok(acc)
    }

    /// Blockwise functional calculus p(a).
    pub fn eval_element(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        let blocks = self
            .blocks_of(a)?;
        Ok(AlgebraElement {
            signature: a.signature.clone(),
            blocks,
        })
    }

    fn blocks_of(&self, a: &AlgebraElement) -> Result<Vec<CMatrix>> {
        a.blocks.iter().map(|m| self.eval_matrix(m)).collect()
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            if k == 1 {
                write!(f, "*t")?;
            } else if k > 1 {
                write!(f, "*t^{k}")?;
            }
        }
        Ok(())
    }
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    Array2::from_shape_fn((dim, dim), |_| random_complex(rng))
}

/// Random unitary from the QR factorization of a random matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    use ndarray_linalg::QR;
    loop {
        let g = random_matrix(rng, dim);
        if let Ok((q, _)) = g.qr() {
            return q;
        }
    }
}

/// Strictly upper triangular random matrix conjugated by a random unitary:
/// exactly nilpotent spectrum, generically full norm.
pub fn random_nilpotent(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let mut n = random_matrix(rng, dim);
    for i in 0..dim {
        for j in 0..=i {
            n[(i, j)] = Complex64::from(0.0);
        }
    }
    let u = random_unitary(rng, dim);
    u.dot(&n).dot(&linalg::adjoint(&u))
}

/// Pairwise-commuting family built as polynomials of one base element per
/// block, rescaled toward the requested spectral radius and quotient norm.
/// Deterministic given the seed.
///
/// When `radius_target < quotient_target` the quotient part is built from a
/// nilpotent base with zero-constant polynomials, so its spectral content
/// never blocks the radius target.
pub fn random_commuting_family(
    ideal: &IdealSpec,
    count: usize,
    seed: u64,
    radius_target: f64,
    quotient_target: Option<f64>,
) -> Result<Vec<AlgebraElement>> {
    if count == 0 {
        return Err(Error::InvalidInput("family size must be >= 1".into()));
    }
    if radius_target < 0.0 {
        return Err(Error::InvalidInput("radius target must be >= 0".into()));
    }
    let sig = &ideal.signature;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let has_quotient = !ideal.quotient_is_zero();
    let has_ideal_blocks = !ideal.ideal_blocks.is_empty();

    if !has_quotient {
        if let Some(q) = quotient_target {
            if q != 0.0 {
                return Err(Error::GenerationFailure(
                    "quotient target is nonzero but the quotient algebra is zero".into(),
                ));
            }
        }
    }

    let nilpotent_quotient =
        has_quotient && quotient_target.map_or(false, |q| radius_target < q);

    // one base element for the whole family
    let base: Vec<CMatrix> = (0..sig.block_count())
        .map(|b| {
            let d = sig.block_dims[b];
            if nilpotent_quotient && !ideal.contains(b) {
                if d == 1 {
                    // 1x1 blocks have no nilpotents besides 0; spectral
                    // content there would force r = quotient norm
                    Array2::zeros((d, d))
                } else {
                    random_nilpotent(&mut rng, d)
                }
            } else {
                random_matrix(&mut rng, d)
            }
        })
        .collect();
    let base = AlgebraElement::new(sig.clone(), base)?;

    let mut family = Vec::with_capacity(count);
    for _ in 0..count {
        let degree = rng.gen_range(1..=3usize);
        let mut coeffs: Vec<Complex64> = (0..=degree).map(|_| random_complex(&mut rng)).collect();
        if nilpotent_quotient {
            coeffs[0] = Complex64::from(0.0);
        }
        // keep the leading coefficient away from zero
        while coeffs[degree].norm() < 0.3 {
            coeffs[degree] = random_complex(&mut rng);
        }
        let p = Polynomial::new(coeffs);
        let mut el = p.eval_element(&base)?;

        // scale the quotient part to the quotient target
        if has_quotient {
            if let Some(qt) = quotient_target {
                let qn = quotient_norm(&el, ideal)?;
                if qn < 1e-12 {
                    if qt > 0.0 {
                        return Err(Error::GenerationFailure(
                            "quotient part vanished; cannot meet a nonzero quotient target".into(),
                        ));
                    }
                } else {
                    let beta = Complex64::from(qt / qn);
                    for b in ideal.quotient_blocks().collect::<Vec<_>>() {
                        el.blocks[b] = &el.blocks[b] * beta;
                    }
                }
            }
        }

        // scale the ideal part to the radius target
        let r_off = quotient_spec_radius(&el, ideal)?;
        if has_ideal_blocks {
            let mut r_id = 0.0f64;
            for &b in &ideal.ideal_blocks {
                r_id = r_id.max(linalg::spec_radius(&el.blocks[b])?);
            }
            if r_off > radius_target + 1e-9 {
                return Err(Error::GenerationFailure(format!(
                    "quotient spectral content {r_off} exceeds the radius target {radius_target}"
                )));
            }
            if r_id < 1e-12 {
                if radius_target > r_off + 1e-9 {
                    return Err(Error::GenerationFailure(
                        "ideal part has no spectral content to scale".into(),
                    ));
                }
            } else {
                let alpha = Complex64::from(radius_target / r_id);
                for &b in &ideal.ideal_blocks {
                    el.blocks[b] = &el.blocks[b] * alpha;
                }
            }
        } else if quotient_target.is_none() {
            // no ideal blocks and no quotient constraint: scale everything
            let r = el.spec_radius()?;
            if r < 1e-12 {
                if radius_target > 1e-9 {
                    return Err(Error::GenerationFailure(
                        "element has no spectral content to scale".into(),
                    ));
                }
            } else {
                let alpha = Complex64::from(radius_target / r);
                el = el.scale(alpha);
            }
        } else if r_off > radius_target + 1e-9 && radius_target > 0.0 {
            return Err(Error::GenerationFailure(format!(
                "quotient spectral content {r_off} exceeds the radius target {radius_target} \
                 and there are no ideal blocks to compensate"
            )));
        }

        family.push(el);
    }

    let defect = commutation_defect(&family)?;
    if defect > 1e-12 {
        return Err(Error::GenerationFailure(format!(
            "generated family fails the commutation audit: defect {defect}"
        )));
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use ndarray::array;

    fn m2m1_ideal_first() -> IdealSpec {
        let sig = AlgebraSignature::new(vec![2, 1]).unwrap();
        IdealSpec::new(sig, [0].into()).unwrap()
    }

    #[test]
    fn poly_identity_map() {
        let sig = AlgebraSignature::new(vec![2, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = AlgebraElement::new(
            sig.clone(),
            vec![random_matrix(&mut rng, 2), random_matrix(&mut rng, 3)],
        )
        .unwrap();
        let p = Polynomial::t();
        let pa = p.eval_element(&a).unwrap();
        assert!(pa.sub(&a).unwrap().op_norm().unwrap() < 1e-14);
    }

    #[test]
    fn poly_on_square_zero_element() {
        // p(t) = t^2 - 1 on the 2x2 nilpotent: a^2 = 0 gives -I
        let a = AlgebraElement::from_matrix(array![
            [c(0.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0)]
        ])
        .unwrap();
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let pa = p.eval_element(&a).unwrap();
        let expect = AlgebraElement::identity(&a.signature).scale(c(-1.0, 0.0));
        assert!(pa.sub(&expect).unwrap().op_norm().unwrap() < 1e-14);
    }

    #[test]
    fn spectral_mapping_of_random_polynomial() {
        // eigenvalues of p(a) are p(eigenvalues of a)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 5);
            let coeffs: Vec<Complex64> = (0..=4).map(|_| random_complex(&mut rng)).collect();
            let p = Polynomial::new(coeffs);
            let evs_a = linalg::eigenvalues(&a).unwrap();
            let mut expected: Vec<Complex64> =
                evs_a.iter().map(|&z| p.eval_scalar(z)).collect();
            let mut got = linalg::eigenvalues(&p.eval_matrix(&a).unwrap()).unwrap();
            // greedy multiset match
            for e in expected.drain(..) {
                let (idx, dist) = got
                    .iter()
                    .enumerate()
                    .map(|(i, g)| (i, (g - e).norm()))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .unwrap();
                assert!(dist <= 1e-8 * (1.0 + e.norm()), "dist {dist}");
                got.swap_remove(idx);
            }
        }
    }

    #[test]
    fn quotient_norm_zero_when_ideal_is_everything() {
        let sig = AlgebraSignature::new(vec![2, 2]).unwrap();
        let ideal = IdealSpec::full(sig.clone());
        let a = AlgebraElement::identity(&sig);
        assert_eq!(quotient_norm(&a, &ideal).unwrap(), 0.0);
    }

    #[test]
    fn quotient_norm_single_surviving_block() {
        let ideal = m2m1_ideal_first();
        let a = AlgebraElement::new(
            ideal.signature.clone(),
            vec![
                array![[c(0.0, 0.0), c(5.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
                array![[c(0.8, 0.0)]],
            ],
        )
        .unwrap();
        assert!((quotient_norm(&a, &ideal).unwrap() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn quotient_norm_below_full_norm_in_bulk() {
        let sig = AlgebraSignature::new(vec![3, 2, 2]).unwrap();
        let ideal = IdealSpec::new(sig.clone(), [0, 2].into()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let a = AlgebraElement::new(
                sig.clone(),
                sig.block_dims
                    .iter()
                    .map(|&d| random_matrix(&mut rng, d))
                    .collect(),
            )
            .unwrap();
            assert!(quotient_norm(&a, &ideal).unwrap() <= a.op_norm().unwrap() + 1e-14);
        }
    }

    #[test]
    fn ideal_membership_trivial_cases() {
        let ideal = m2m1_ideal_first();
        let zero = AlgebraElement::zero(&ideal.signature);
        assert!(is_in_ideal(&zero, &ideal, 1e-12).unwrap().0);
        let one = AlgebraElement::identity(&ideal.signature);
        assert!(!is_in_ideal(&one, &ideal, 1e-12).unwrap().0);
    }

    #[test]
    fn commuting_family_commutes_and_hits_targets() {
        let sig = AlgebraSignature::new(vec![4, 3]).unwrap();
        let ideal = IdealSpec::new(sig, [0].into()).unwrap();
        let fam = random_commuting_family(&ideal, 3, 42, 0.5, Some(1.0)).unwrap();
        assert_eq!(fam.len(), 3);
        assert!(commutation_defect(&fam).unwrap() <= 1e-12);
        let max_r = fam
            .iter()
            .map(|a| a.spec_radius().unwrap())
            .fold(0.0f64, f64::max);
        let max_q = fam
            .iter()
            .map(|a| quotient_norm(a, &ideal).unwrap())
            .fold(0.0f64, f64::max);
        assert!((max_r - 0.5).abs() < 1e-6, "max r = {max_r}");
        assert!((max_q - 1.0).abs() < 1e-9, "max quotient = {max_q}");
    }

    #[test]
    fn single_element_family_hits_radius() {
        let sig = AlgebraSignature::new(vec![3]).unwrap();
        let ideal = IdealSpec::full(sig);
        let fam = random_commuting_family(&ideal, 1, 7, 0.9, None).unwrap();
        assert!((fam[0].spec_radius().unwrap() - 0.9).abs() < 1e-8);
    }

    #[test]
    fn family_generation_is_deterministic() {
        let sig = AlgebraSignature::new(vec![2, 2]).unwrap();
        let ideal = IdealSpec::new(sig, [1].into()).unwrap();
        let f1 = random_commuting_family(&ideal, 2, 123, 0.4, Some(0.9)).unwrap();
        let f2 = random_commuting_family(&ideal, 2, 123, 0.4, Some(0.9)).unwrap();
        let f3 = random_commuting_family(&ideal, 2, 124, 0.4, Some(0.9)).unwrap();
        for (a, b) in f1.iter().zip(&f2) {
            assert_eq!(a.sub(b).unwrap().op_norm().unwrap(), 0.0);
        }
        let differs = f1
            .iter()
            .zip(&f3)
            .any(|(a, b)| a.sub(b).unwrap().op_norm().unwrap() > 1e-12);
        assert!(differs);
    }

    #[test]
    fn poly_eval_commutes_with_quotient_map() {
        let sig = AlgebraSignature::new(vec![2, 3]).unwrap();
        let ideal = IdealSpec::new(sig.clone(), [0].into()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = AlgebraElement::new(
            sig.clone(),
            vec![random_matrix(&mut rng, 2), random_matrix(&mut rng, 3)],
        )
        .unwrap();
        let p = Polynomial::from_real(&[0.5, -1.0, 0.0, 2.0]);
        let pa = p.eval_element(&a).unwrap();
        for b in ideal.quotient_blocks() {
            let direct = p.eval_matrix(&a.blocks[b]).unwrap();
            assert!(linalg::op_norm(&(&pa.blocks[b] - &direct)).unwrap() < 1e-12);
        }
    }
}
