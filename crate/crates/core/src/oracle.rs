//! Theorem-blind verification: derivative-free search over e in I to
//! upper-bound inf ||(1+e) a_j (1+e)^{-1}||, and bulk lower-bound audits.
//! Nothing here consults the constructive machinery.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{quotient_norm, AlgebraElement, IdealSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub best_e: AlgebraElement,
    pub best_value: f64,
    pub evaluations: usize,
    pub starts: usize,
    pub seed: u64,
    /// (evaluation index, incumbent value) at each improvement.
    pub history: Vec<(usize, f64)>,
}

const COND_PENALTY_THRESHOLD: f64 = 1e10;

/// Real parameter count: 2 entries per complex entry of each ideal block.
fn param_count(ideal: &IdealSpec) -> usize {
    ideal
        .ideal_blocks
        .iter()
        .map(|&b| 2 * ideal.signature.block_dims[b].pow(2))
        .sum()
}

fn element_from_params(params: &[f64], ideal: &IdealSpec) -> AlgebraElement {
    let mut e = AlgebraElement::zero(&ideal.signature);
    let mut idx = 0;
    for &b in &ideal.ideal_blocks {
        let d = ideal.signature.block_dims[b];
        for i in 0..d {
            for j in 0..d {
                e.blocks[b][(i, j)] = Complex64::new(params[idx], params[idx + 1]);
                idx += 2;
            }
        }
    }
    e
}

/// max_j ||(1+e) a_j (1+e)^{-1}|| plus a penalty pushing away from
/// near-singular similarities.
fn objective(params: &[f64], a_list: &[AlgebraElement], ideal: &IdealSpec) -> Result<f64> {
    let e = element_from_params(params, ideal);
    let one_e = AlgebraElement::identity(&ideal.signature).add(&e)?;
    let cond = one_e.cond()?;
    if !cond.is_finite() {
        return Ok(f64::INFINITY);
    }
    let mut worst = 0.0f64;
    for a in a_list {
        match one_e.conjugate_of(a) {
            Ok(conj) => worst = worst.max(conj.op_norm()?),
            Err(_) => return Ok(f64::INFINITY),
        }
    }
    let penalty = 10.0 * (cond.log10() - COND_PENALTY_THRESHOLD.log10()).max(0.0);
    Ok(worst + penalty)
}

/// Multi-start coordinate descent over the ideal-block entries of e.
/// Start 0 is e = 0; the rest draw entries uniformly from [-1, 1].
/// Deterministic given the seed; the incumbent history is non-increasing.
pub fn similarity_search(
    a_list: &[AlgebraElement],
    ideal: &IdealSpec,
    budget: usize,
    starts: usize,
    seed: u64,
) -> Result<SearchReport> {
    if budget == 0 || starts == 0 {
        return Err(Error::InvalidInput("budget and starts must be >= 1".into()));
    }
    if a_list.is_empty() {
        return Err(Error::InvalidInput("empty element list".into()));
    }
    let n = param_count(ideal);
    let mut evaluations = 0usize;
    let mut best_params = vec![0.0; n];
    let mut best_value = f64::INFINITY;
    let mut history = Vec::new();

    let consider = |value: f64,
                        params: &[f64],
                        evals: usize,
                        best_value: &mut f64,
                        best_params: &mut Vec<f64>,
                        history: &mut Vec<(usize, f64)>| {
        if value < *best_value {
            *best_value = value;
            best_params.copy_from_slice(params);
            history.push((evals, value));
        }
    };

    'outer: for start in 0..starts {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut x: Vec<f64> = if start == 0 {
            vec![0.0; n]
        } else {
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        if evaluations >= budget {
            break;
        }
        let mut fx = objective(&x, a_list, ideal)?;
        evaluations += 1;
        consider(fx, &x, evaluations, &mut best_value, &mut best_params, &mut history);

        let mut step = 0.5f64;
        while step >= 1e-6 {
            let mut improved = false;
            for coord in 0..n {
                for dir in [1.0f64, -1.0] {
                    if evaluations >= budget {
                        break 'outer;
                    }
                    let old = x[coord];
                    x[coord] = old + dir * step;
                    let f_new = objective(&x, a_list, ideal)?;
                    evaluations += 1;
                    if f_new < fx {
                        fx = f_new;
                        improved = true;
                        consider(
                            fx,
                            &x,
                            evaluations,
                            &mut best_value,
                            &mut best_params,
                            &mut history,
                        );
                        // ride the improving direction
                        loop {
                            if evaluations >= budget {
                                break 'outer;
                            }
                            let prev = x[coord];
                            x[coord] = prev + dir * step;
                            let f_next = objective(&x, a_list, ideal)?;
                            evaluations += 1;
                            if f_next < fx {
                                fx = f_next;
                                consider(
                                    fx,
                                    &x,
                                    evaluations,
                                    &mut best_value,
                                    &mut best_params,
                                    &mut history,
                                );
                            } else {
                                x[coord] = prev;
                                break;
                            }
                        }
                        break; // next coordinate
                    } else {
                        x[coord] = old;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
            if n == 0 {
                break;
            }
        }
    }

    Ok(SearchReport {
        best_e: element_from_params(&best_params, ideal),
        best_value,
        evaluations,
        starts,
        seed,
        history,
    })
}

/// Samples random e in I and audits the theorem's easy direction:
/// ||(1+e) a_j (1+e)^{-1}|| >= max{r(a_j), ||a_j-dot||}. Returns the most
/// negative margin observed (>= -1e-9 when the implementation is sound).
pub fn lower_bound_audit(
    a_list: &[AlgebraElement],
    ideal: &IdealSpec,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be >= 1".into()));
    }
    if a_list.is_empty() {
        return Err(Error::InvalidInput("empty element list".into()));
    }
    let targets: Vec<f64> = a_list
        .iter()
        .map(|a| Ok(a.spec_radius()?.max(quotient_norm(a, ideal)?)))
        .collect::<Result<_>>()?;
    let n = param_count(ideal);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut done = 0usize;
    while done < trials {
        let params: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let e = element_from_params(&params, ideal);
        let one_e = AlgebraElement::identity(&ideal.signature).add(&e)?;
        let cond = one_e.cond()?;
        if !cond.is_finite() || cond > 1e8 {
            continue;
        }
        done += 1;
        for (a, &target) in a_list.iter().zip(&targets) {
            let value = one_e.conjugate_of(a)?.op_norm()?;
            worst = worst.min(value - target);
        }
    }
    if worst < -1e-6 {
        return Err(Error::TheoremViolation(format!(
            "conjugated norm fell {worst} below max{{r, quotient norm}}"
        )));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_commuting_family, AlgebraSignature};
    use crate::linalg::c;
    use ndarray::array;

    #[test]
    fn search_finds_small_value_for_nilpotent() {
        // I = A, a = [[0,1],[0,0]]: diag(1,t) conjugation drives the norm to 0
        let a = AlgebraElement::from_matrix(array![
            [c(0.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0)]
        ])
        .unwrap();
        let ideal = IdealSpec::full(a.signature.clone());
        let report = similarity_search(&[a], &ideal, 5000, 4, 7).unwrap();
        assert!(report.best_value <= 0.05, "best {}", report.best_value);
    }

    #[test]
    fn search_is_deterministic_and_monotone() {
        let sig = AlgebraSignature::new(vec![2, 2]).unwrap();
        let ideal = IdealSpec::new(sig, [0].into()).unwrap();
        let fam = random_commuting_family(&ideal, 2, 5, 0.3, Some(0.9)).unwrap();
        let r1 = similarity_search(&fam, &ideal, 800, 3, 42).unwrap();
        let r2 = similarity_search(&fam, &ideal, 800, 3, 42).unwrap();
        assert_eq!(r1.best_value, r2.best_value);
        assert_eq!(r1.history, r2.history);
        assert_eq!(r1.evaluations, r2.evaluations);
        for w in r1.history.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn search_never_beats_the_theorem() {
        let sig = AlgebraSignature::new(vec![3]).unwrap();
        let ideal = IdealSpec::full(sig);
        let fam = random_commuting_family(&ideal, 1, 11, 0.6, None).unwrap();
        let target = fam[0].spec_radius().unwrap();
        let report = similarity_search(&fam, &ideal, 1500, 3, 9).unwrap();
        assert!(report.best_value >= target - 1e-9);
        // e = 0 is always feasible, so the incumbent is at most ||a||
        assert!(report.best_value <= fam[0].op_norm().unwrap() + 1e-12);
    }

    #[test]
    fn audit_on_single_block_and_multi_block() {
        let sig1 = AlgebraSignature::new(vec![3]).unwrap();
        let ideal1 = IdealSpec::full(sig1);
        let fam1 = random_commuting_family(&ideal1, 1, 3, 0.7, None).unwrap();
        let m1 = lower_bound_audit(&fam1, &ideal1, 1000, 17).unwrap();
        assert!(m1 >= -1e-9, "margin {m1}");

        let sig3 = AlgebraSignature::new(vec![2, 2, 3]).unwrap();
        let ideal3 = IdealSpec::new(sig3, [0, 1].into()).unwrap();
        let fam3 = random_commuting_family(&ideal3, 2, 13, 0.4, Some(0.8)).unwrap();
        let m3 = lower_bound_audit(&fam3, &ideal3, 1000, 19).unwrap();
        assert!(m3 >= -1e-9, "margin {m3}");
    }

    #[test]
    fn audit_margin_at_e_zero_is_nonnegative() {
        let a = AlgebraElement::from_matrix(array![
            [c(0.0, 0.0), c(2.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0)]
        ])
        .unwrap();
        let ideal = IdealSpec::full(a.signature.clone());
        // e = 0 gives ||a|| - max{r, quotient} = 2 - 0
        let m = lower_bound_audit(&[a], &ideal, 5, 23).unwrap();
        assert!(m >= -1e-9);
    }
}
