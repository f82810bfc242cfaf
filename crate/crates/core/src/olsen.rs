//! Finite-dimensional perturbation lab: Sigma membership, the spectral-fill
//! perturbation, norm-matching ideal perturbations for polynomial families,
//! and the kernel-chain triangularization.

use num_complex::Complex64;

use crate::algebra::{quotient_norm, AlgebraElement, IdealSpec, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::similarity::{optimal_similarity, Mode, SimilarityWitness};

/// Sigma membership verdict: strict inequality r(p_i) < ||p_i|| on the
/// quotient image, per polynomial.
#[derive(Debug, Clone)]
pub struct SigmaMembership {
    pub member: bool,
    /// quotient_norm(p_i(T)) - quotient_spec_radius(p_i(T)) per polynomial.
    pub margins: Vec<f64>,
}

pub fn sigma_membership(
    t: &AlgebraElement,
    ideal: &IdealSpec,
    polys: &[Polynomial],
) -> Result<SigmaMembership> {
    if ideal.quotient_is_zero() {
        return Err(Error::QuotientEmpty);
    }
    if polys.is_empty() {
        return Err(Error::InvalidInput("empty polynomial list".into()));
    }
    let mut margins = Vec::with_capacity(polys.len());
    let mut member = true;
    for p in polys {
        let pt = p.eval_element(t)?;
        let qn = quotient_norm(&pt, ideal)?;
        let qr = crate::algebra::quotient_spec_radius(&pt, ideal)?;
        let margin = qn - qr;
        if margin <= 0.0 {
            member = false;
        }
        margins.push(margin);
    }
    Ok(SigmaMembership { member, margins })
}

/// The finite-dimensional stand-in for the hole-filling perturbation:
/// K_1 in I replacing every ideal block of T by lambda_0 * identity, where
/// lambda_0 is the largest-modulus eigenvalue of the quotient image (ties by
/// real part, then imaginary part). The spectrum of T + K_1 then equals the
/// spectrum of the quotient image.
pub fn spectral_fill(t: &AlgebraElement, ideal: &IdealSpec) -> Result<AlgebraElement> {
    if ideal.quotient_is_zero() {
        return Err(Error::QuotientEmpty);
    }
    let mut quotient_eigs: Vec<Complex64> = Vec::new();
    for b in ideal.quotient_blocks() {
        quotient_eigs.extend(linalg::eigenvalues(&t.blocks[b])?);
    }
    let lambda0 = quotient_eigs
        .into_iter()
        .max_by(|a, b| {
            (a.norm(), a.re, a.im)
                .partial_cmp(&(b.norm(), b.re, b.im))
                .unwrap()
        })
        .expect("quotient is nonempty");
    let mut k1 = AlgebraElement::zero(&ideal.signature);
    for &b in &ideal.ideal_blocks {
        let dim = ideal.signature.block_dims[b];
        k1.blocks[b] = &(linalg::identity(dim) * lambda0) - &t.blocks[b];
    }
    Ok(k1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationMode {
    Exact,
    Approximate(f64),
}

/// K in I realizing ||p_i(T+K)|| = ||p_i(T)-dot|| (exact mode) or within
/// epsilon above it (approximate mode), for the whole family at once.
#[derive(Debug, Clone)]
pub struct PerturbationResult {
    pub k: AlgebraElement,
    pub achieved: Vec<f64>,
    pub targets: Vec<f64>,
    pub mode: PerturbationMode,
    /// The spectral-fill perturbation used as the first stage.
    pub fill: AlgebraElement,
    pub witness: SimilarityWitness,
}

const MEMBERSHIP_MARGIN: f64 = 1e-6;

fn perturb_common(
    t: &AlgebraElement,
    ideal: &IdealSpec,
    polys: &[Polynomial],
    mode: PerturbationMode,
) -> Result<PerturbationResult> {
    let k1 = spectral_fill(t, ideal)?;
    let shifted = t.add(&k1)?;
    // polynomials of one element commute pairwise
    let family: Vec<AlgebraElement> = polys
        .iter()
        .map(|p| p.eval_element(&shifted))
        .collect::<Result<_>>()?;
    let sim_mode = match mode {
        PerturbationMode::Exact => Mode::Exact,
        PerturbationMode::Approximate(eps) => Mode::Epsilon(eps),
    };
    let witness = optimal_similarity(&family, ideal, sim_mode)?;
    let conjugated = witness.conjugate(&shifted)?;
    let k = conjugated.sub(t)?;
    let mut achieved = Vec::with_capacity(polys.len());
    let mut targets = Vec::with_capacity(polys.len());
    for p in polys {
        achieved.push(p.eval_element(&t.add(&k)?)?.op_norm()?);
        targets.push(quotient_norm(&p.eval_element(t)?, ideal)?);
    }
    Ok(PerturbationResult {
        k,
        achieved,
        targets,
        mode,
        fill: k1,
        witness,
    })
}

/// Exact norm matching; requires Sigma membership with margin.
pub fn olsen_perturbation(
    t: &AlgebraElement,
    ideal: &IdealSpec,
    polys: &[Polynomial],
) -> Result<PerturbationResult> {
    let membership = sigma_membership(t, ideal, polys)?;
    if !membership.member
        || membership
            .margins
            .iter()
            .any(|&m| m <= MEMBERSHIP_MARGIN)
    {
        return Err(Error::NotInSigma(format!(
            "membership margins {:?} must all exceed {MEMBERSHIP_MARGIN}",
            membership.margins
        )));
    }
    perturb_common(t, ideal, polys, PerturbationMode::Exact)
}

/// Approximate version: no membership needed, achieved lies within
/// [target, target + epsilon] up to round-off.
pub fn approximate_olsen(
    t: &AlgebraElement,
    ideal: &IdealSpec,
    polys: &[Polynomial],
    epsilon: f64,
) -> Result<PerturbationResult> {
    if ideal.quotient_is_zero() {
        return Err(Error::QuotientEmpty);
    }
    if epsilon <= 0.0 {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if polys.is_empty() {
        return Err(Error::InvalidInput("empty polynomial list".into()));
    }
    perturb_common(t, ideal, polys, PerturbationMode::Approximate(epsilon))
}

/// Unitary change of basis exhibiting the kernel-chain upper triangular form.
#[derive(Debug, Clone)]
pub struct TriangularizationResult {
    pub u: CMatrix,
    /// Dimension of each chain subspace, in order (zero-dim entries kept).
    pub chain_dims: Vec<usize>,
    /// The scalar on each diagonal block, parallel to `chain_dims`.
    pub diagonal_scalars: Vec<Complex64>,
    /// Operator norm of the strictly-below-block-diagonal part of u* T u.
    pub residual: f64,
    /// Worst deviation of a diagonal block from its scalar copy of identity.
    pub diagonal_residual: f64,
}

/// Triangularizes T along the nested kernel chain of the annihilating product
/// (T - t_N)^{k_N} ... (T - t_1)^{k_1} = 0. Factors are given in application
/// order (t_1, k_1), ..., (t_N, k_N).
pub fn kernel_triangularize(
    t: &CMatrix,
    factors: &[(Complex64, usize)],
) -> Result<TriangularizationResult> {
    linalg::validate(t)?;
    if factors.is_empty() || factors.iter().any(|&(_, k)| k == 0) {
        return Err(Error::InvalidInput(
            "factor list must be nonempty with positive exponents".into(),
        ));
    }
    let dim = t.nrows();
    let norm_t = linalg::op_norm(t)?;
    let total: usize = factors.iter().map(|&(_, k)| k).sum();

    // annihilation precondition
    let mut product = linalg::identity(dim);
    for &(tm, km) in factors {
        let shifted = t - &(linalg::identity(dim) * tm);
        for _ in 0..km {
            product = shifted.dot(&product);
        }
    }
    let ann = linalg::op_norm(&product)?;
    let ann_tol = 1e-8 * (1.0 + norm_t).powi(total as i32);
    if ann > ann_tol {
        return Err(Error::NotAnnihilated { residual: ann });
    }

    // build the chain H_j = ker(A_j) minus the span of the earlier chain
    let mut accumulated: CMatrix = ndarray::Array2::zeros((dim, 0));
    let mut chain_dims = Vec::with_capacity(total);
    let mut diagonal_scalars = Vec::with_capacity(total);
    let mut cur = linalg::identity(dim);
    let mut scale_bound = 1.0f64;
    for &(tm, km) in factors {
        let shifted = t - &(linalg::identity(dim) * tm);
        let shifted_norm = linalg::op_norm(&shifted)?;
        for _ in 0..km {
            cur = shifted.dot(&cur);
            scale_bound *= shifted_norm.max(1.0);
            // keep kernel detection scale-free, but a product that has
            // collapsed below round-off of its factor norms is zero: its
            // kernel is everything, and normalizing would amplify junk
            let ncur = linalg::op_norm(&cur)?;
            let kb = if ncur <= 1e-12 * scale_bound {
                linalg::identity(dim)
            } else {
                let scaled = cur.mapv(|z| z / Complex64::from(ncur));
                linalg::kernel_basis(&scaled, 1e-9)?
            };
            let new_dim = kb.ncols().saturating_sub(accumulated.ncols());
            if new_dim == 0 {
                chain_dims.push(0);
                diagonal_scalars.push(tm);
                continue;
            }
            // project the kernel basis off the accumulated span and keep the
            // dominant new_dim directions
            let proj = if accumulated.ncols() > 0 {
                &kb - &accumulated.dot(&linalg::adjoint(&accumulated).dot(&kb))
            } else {
                kb.clone()
            };
            use ndarray_linalg::SVD;
            let (u_opt, s, _) = proj
                .svd(true, false)
                .map_err(|e| Error::NumericalFailure(format!("chain svd: {e}")))?;
            let u_full = u_opt.expect("requested left singular vectors");
            if s.len() < new_dim || s[new_dim - 1] < 1e-6 {
                return Err(Error::NumericalFailure(format!(
                    "kernel chain step is numerically degenerate (sigma = {:?})",
                    s.iter().take(new_dim).collect::<Vec<_>>()
                )));
            }
            let mut grown = ndarray::Array2::zeros((dim, accumulated.ncols() + new_dim));
            grown
                .slice_mut(ndarray::s![.., ..accumulated.ncols()])
                .assign(&accumulated);
            grown
                .slice_mut(ndarray::s![.., accumulated.ncols()..])
                .assign(&u_full.slice(ndarray::s![.., ..new_dim]));
            accumulated = grown;
            chain_dims.push(new_dim);
            diagonal_scalars.push(tm);
        }
    }
    if accumulated.ncols() != dim {
        return Err(Error::NumericalFailure(format!(
            "kernel chain spans {} of {} dimensions",
            accumulated.ncols(),
            dim
        )));
    }
    let u = accumulated;
    let r = linalg::adjoint(&u).dot(t).dot(&u);

    // residual below the block diagonal, and the diagonal deviation
    let mut lower = r.clone();
    let mut offset = 0usize;
    let mut diagonal_residual = 0.0f64;
    for (&d, &scalar) in chain_dims.iter().zip(&diagonal_scalars) {
        for i in 0..dim {
            for j in offset..offset + d {
                if i < offset + d {
                    lower[(i, j)] = Complex64::from(0.0);
                }
            }
        }
        for i in offset..offset + d {
            for j in offset..offset + d {
                let expect = if i == j { scalar } else { Complex64::from(0.0) };
                diagonal_residual = diagonal_residual.max((r[(i, j)] - expect).norm());
            }
        }
        offset += d;
    }
    let residual = linalg::op_norm(&lower)?;
    Ok(TriangularizationResult {
        u,
        chain_dims,
        diagonal_scalars,
        residual,
        diagonal_residual,
    })
}

/// Synthesizes minimal-polynomial factors (t_m, k_m) from the spectrum:
/// eigenvalues are clustered within `cluster_tol`, and each exponent is the
/// smallest power whose kernel stops growing.
pub fn minimal_factors(t: &CMatrix, cluster_tol: f64) -> Result<Vec<(Complex64, usize)>> {
    linalg::validate(t)?;
    let mut eigs = linalg::eigenvalues(t)?;
    eigs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    'outer: for e in eigs {
        for (center, count) in clusters.iter_mut() {
            if (*center - e).norm() <= cluster_tol {
                // running mean keeps the center representative
                *center = (*center * Complex64::from(*count as f64) + e)
                    / Complex64::from((*count + 1) as f64);
                *count += 1;
                continue 'outer;
            }
        }
        clusters.push((e, 1));
    }
    let dim = t.nrows();
    let mut factors = Vec::with_capacity(clusters.len());
    for (center, algebraic) in clusters {
        let shifted = t - &(linalg::identity(dim) * center);
        let shifted_norm = linalg::op_norm(&shifted)?;
        let mut power = linalg::identity(dim);
        let mut scale_bound = 1.0f64;
        let mut prev_kernel = 0usize;
        let mut index = 0usize;
        for k in 1..=algebraic {
            power = shifted.dot(&power);
            scale_bound *= shifted_norm.max(1.0);
            let npw = linalg::op_norm(&power)?;
            let kdim = if npw <= 1e-12 * scale_bound {
                dim
            } else {
                let scaled = power.mapv(|z| z / Complex64::from(npw));
                linalg::kernel_basis(&scaled, 1e-7)?.ncols()
            };
            index = k;
            if kdim == prev_kernel {
                index = k - 1;
                break;
            }
            prev_kernel = kdim;
            if kdim >= algebraic {
                break;
            }
        }
        factors.push((center, index.max(1)));
    }
    Ok(factors)
}

/// For nilpotent T, r(p(T)) = |p(0)|. Returns |p(0)| after certifying the
/// identity on the triangularized form of T: the chain basis makes p(T)
/// upper triangular with p(0) on the diagonal, which is robust where a raw
/// eigensolve on the (defective) matrix is not.
pub fn nilpotent_poly_radius(t: &CMatrix, p: &Polynomial) -> Result<f64> {
    linalg::validate(t)?;
    let dim = t.nrows();
    let norm_t = linalg::op_norm(t)?;
    let r = linalg::spec_radius(t)?;
    // eigenvalues of defective matrices drift by eps^(1/dim); accept that
    let nil_tol = 1e-10f64.max(f64::EPSILON.powf(1.0 / dim as f64) * 10.0) * (1.0 + norm_t);
    if r > nil_tol {
        return Err(Error::PreconditionViolation(format!(
            "matrix is not nilpotent: spectral radius {r}"
        )));
    }
    let value = p.constant_term().norm();
    let tri = kernel_triangularize(t, &[(Complex64::from(0.0), dim)])?;
    let pt = p.eval_matrix(t)?;
    let rt = linalg::adjoint(&tri.u).dot(&pt).dot(&tri.u);
    let scale = 1.0 + linalg::op_norm(&pt)?;
    let mut worst = 0.0f64;
    for i in 0..dim {
        worst = worst.max((rt[(i, i)] - p.constant_term()).norm());
        for j in 0..i {
            worst = worst.max(rt[(i, j)].norm());
        }
    }
    if worst > 1e-8 * scale {
        return Err(Error::NumericalFailure(format!(
            "triangular certificate failed: residual {worst}"
        )));
    }
    Ok(value)
}
