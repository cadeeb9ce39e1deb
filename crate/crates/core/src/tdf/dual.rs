//! Dual representation of a Choquet functional:
//! `∫ f dθ = max { Σ f μ : μ ≥ 0, μ(K) ≤ θ(K) for all K }` for completely
//! alternating `θ`. The greedy measure attains the maximum; the oracle
//! recomputes it independently by vertex enumeration or random search.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::DiscreteMeasure;
use crate::carrier::{enumerate_subsets, PointFunction, SubsetMask};
use crate::error::{Error, Result};
use crate::random::{stream_rng, streams};
use crate::setfun::{classify, Capacity, TOLERANCE};

/// Largest carrier for exact vertex enumeration.
pub const ORACLE_EXACT_MAX_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleMode {
    Exact,
    Sampled { trials: usize, seed: u64 },
}

fn feasible(theta: &Capacity, mu: &[f64], tol: f64) -> bool {
    mu.iter().all(|m| *m >= -tol)
        && enumerate_subsets(theta.carrier(), true).all(|k| k.points().map(|i| mu[i]).sum::<f64>() <= theta.get(k) + tol)
}

/// Greedy optimal measure: with points sorted by `f` descending (ties by
/// index), `μ(x_(i)) = θ({x_(1..i)}) − θ({x_(1..i−1)})`. Returns the measure
/// and `Σ f μ`, which equals the Choquet integral.
pub fn dual_greedy(theta: &Capacity, f: &PointFunction) -> Result<(DiscreteMeasure, f64)> {
    theta.carrier().check_len(f.len())?;
    let class = classify(theta);
    if !class.completely_alternating {
        return Err(Error::NotCompletelyAlternating { min_weight: class.min_weight, witness: class.witness });
    }
    let v = f.values();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let mut mu = vec![0.0; v.len()];
    let mut prefix = SubsetMask::EMPTY;
    for &i in &order {
        let next = prefix.with(i);
        mu[i] = (theta.get(next) - theta.get(prefix)).max(0.0);
        prefix = next;
    }
    if !feasible(theta, &mu, TOLERANCE) {
        return Err(Error::Internal("greedy measure violates μ(K) ≤ θ(K)".into()));
    }
    let value = v.iter().zip(&mu).map(|(a, b)| a * b).sum();
    Ok((DiscreteMeasure::new(mu)?, value))
}

/// Maximises `Σ f μ` over `{μ ≥ 0 : μ(K) ≤ θ(K)}` without using the greedy
/// structure.
///
/// `Exact` (at most three points) solves every `d × d` system formed from
/// the subset constraints and the nonnegativity constraints held tight,
/// keeps the feasible solutions and returns the best; singular systems are
/// skipped. `Sampled` draws uniform points of the box `Π [0, θ({x})]`,
/// rejects infeasible ones, and returns the best value found, a lower bound
/// on the optimum.
pub fn dual_oracle(theta: &Capacity, f: &PointFunction, mode: OracleMode) -> Result<f64> {
    theta.carrier().check_len(f.len())?;
    let d = theta.dim();
    let fv = f.values();
    let objective = |mu: &[f64]| -> f64 { fv.iter().zip(mu).map(|(a, b)| a * b).sum() };
    match mode {
        OracleMode::Exact => {
            if d > ORACLE_EXACT_MAX_POINTS {
                return Err(Error::CarrierTooLarge { d, max: ORACLE_EXACT_MAX_POINTS });
            }
            // rows: subset constraints, then μ_x = 0
            let mut rows: Vec<(Vec<f64>, f64)> = enumerate_subsets(theta.carrier(), true)
                .map(|k| ((0..d).map(|i| if k.contains(i) { 1.0 } else { 0.0 }).collect(), theta.get(k)))
                .collect();
            rows.extend((0..d).map(|x| ((0..d).map(|i| if i == x { 1.0 } else { 0.0 }).collect(), 0.0)));
            let mut best = f64::NEG_INFINITY;
            let mut pick: Vec<usize> = (0..d).collect();
            loop {
                let a = DMatrix::from_fn(d, d, |r, c| rows[pick[r]].0[c]);
                if a.determinant().abs() > 1e-12 {
                    let b = DVector::from_fn(d, |r, _| rows[pick[r]].1);
                    if let Some(mu) = a.lu().solve(&b) {
                        let mu: Vec<f64> = mu.iter().copied().collect();
                        if feasible(theta, &mu, 1e-9) {
                            best = best.max(objective(&mu));
                        }
                    }
                }
                if !next_combination(&mut pick, rows.len()) {
                    break;
                }
            }
            Ok(best)
        }
        OracleMode::Sampled { trials, seed } => {
            let mut rng = stream_rng(seed, streams::DUAL_SAMPLING);
            let caps: Vec<f64> = (0..d).map(|x| theta.get(SubsetMask::singleton(x))).collect();
            let mut best = 0.0f64;
            let mut mu = vec![0.0; d];
            for _ in 0..trials {
                for (m, c) in mu.iter_mut().zip(&caps) {
                    *m = c * rng.random::<f64>();
                }
                if feasible(theta, &mu, 0.0) {
                    best = best.max(objective(&mu));
                }
            }
            Ok(best)
        }
    }
}

/// Advances `pick` to the next `k`-combination of `0..n` in lexicographic
/// order.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
