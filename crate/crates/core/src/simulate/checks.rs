//! Statistical checks tying simulated batches to closed forms.
//!
//! Estimates are compared at three standard errors; hypothesis-style checks
//! use four.

use serde::Serialize;

use super::{argmax_set, frechet_scale_estimate, simulate_crsm, SampleBatch, SimConfig};
use crate::carrier::SubsetMask;
use crate::error::{Error, Result};
use crate::integrals::Functional;
use crate::setfun::{classify, Capacity};
use crate::tdf::TailDependenceFunctional;

/// Threshold for hypothesis-style checks, in standard deviations.
pub const HYPOTHESIS_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleCheck {
    pub estimate: f64,
    pub half_width: f64,
    pub expected: f64,
    pub pass: bool,
}

/// Fréchet scale of `∫^e f dX` against `ℓ(f)`, at `3â/√N`.
pub fn scale_check(batch: &SampleBatch, ell: &impl Functional, f: &[f64]) -> Result<ScaleCheck> {
    batch.carrier.check_len(f.len())?;
    let est = frechet_scale_estimate(&batch.extremal(f))?;
    let expected = ell.eval(f);
    Ok(ScaleCheck {
        estimate: est.scale,
        half_width: est.half_width,
        expected,
        pass: (est.scale - expected).abs() <= est.half_width,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfCheck {
    pub empirical: f64,
    pub exact: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Empirical `P(X(K_i) ≤ a_i ∀i)` against the closed form, at four binomial
/// standard deviations.
pub fn cdf_check(batch: &SampleBatch, ell: &TailDependenceFunctional, pairs: &[(SubsetMask, f64)]) -> Result<CdfCheck> {
    let exact = ell.joint_cdf(pairs)?;
    let hits = batch
        .samples
        .iter()
        .filter(|x| pairs.iter().all(|(k, a)| x.eval(*k) <= *a))
        .count();
    let n = batch.len() as f64;
    let empirical = hits as f64 / n;
    let sigma = (exact * (1.0 - exact) / n).sqrt();
    Ok(CdfCheck { empirical, exact, sigma, pass: (empirical - exact).abs() <= HYPOTHESIS_SIGMAS * sigma })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgmaxIndependenceReport {
    pub samples: usize,
    /// `mean(T·I) − mean(T)·mean(I)` with `T = 1/X(E)`, `I = 1{M ∩ K ≠ ∅}`.
    pub covariance: f64,
    pub z: f64,
    /// Same statistic with `I` replaced by `1{X(K) > median X(K)}`, which
    /// is dependent on `X(E)`.
    pub negative_control_z: f64,
    /// Samples whose argmax set differs from the first LePage set.
    pub argmax_mismatches: usize,
    pub pass: bool,
}

fn covariance_z(t: &[f64], ind: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let mi = ind.iter().sum::<f64>() / n;
    let cov = t.iter().zip(ind).map(|(a, b)| a * b).sum::<f64>() / n - mt * mi;
    let products: Vec<f64> = t.iter().zip(ind).map(|(a, b)| (a - mt) * (b - mi)).collect();
    let mp = products.iter().sum::<f64>() / n;
    let var = products.iter().map(|p| (p - mp).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let z = if se > 0.0 {
        cov / se
    } else if cov.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    (cov, z)
}

/// Tests independence of `X(E)` and the event that the argmax set meets
/// `K`, through the covariance of `1/X(E)` with the event indicator.
pub fn argmax_independence_test(theta: &Capacity, cfg: &SimConfig, k: SubsetMask) -> Result<ArgmaxIndependenceReport> {
    theta.carrier().check_mask(k)?;
    let batch = simulate_crsm(theta, cfg)?;
    let full = theta.carrier().full();
    let t: Vec<f64> = batch.samples.iter().map(|x| 1.0 / x.eval(full)).collect();
    let mut ind = Vec::with_capacity(batch.len());
    let mut mismatches = 0;
    for (x, first) in batch.samples.iter().zip(batch.first_sets.as_ref().expect("CRSM batch")) {
        let m = argmax_set(x, 0.0)?;
        mismatches += usize::from(m != *first);
        ind.push(if m.intersects(k) { 1.0 } else { 0.0 });
    }
    let (cov, z) = covariance_z(&t, &ind);

    let xk = batch.eval(k);
    let mut sorted = xk.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let control: Vec<f64> = xk.iter().map(|v| if *v > median { 1.0 } else { 0.0 }).collect();
    let (_, control_z) = covariance_z(&t, &control);

    Ok(ArgmaxIndependenceReport {
        samples: batch.len(),
        covariance: cov,
        z,
        negative_control_z: control_z,
        argmax_mismatches: mismatches,
        pass: z.abs() <= HYPOTHESIS_SIGMAS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub exceedance: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Empirical `P(|X(K₁) − X(K₂)| > ε)` against
/// `(2θ(K₁∪K₂) − θ(K₁) − θ(K₂)) / ε`.
pub fn continuity_bound_check(
    theta: &Capacity,
    k1: SubsetMask,
    k2: SubsetMask,
    eps: f64,
    cfg: &SimConfig,
) -> Result<ContinuityReport> {
    theta.carrier().check_mask(k1)?;
    theta.carrier().check_mask(k2)?;
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("ε = {eps} must be positive")));
    }
    let batch = simulate_crsm(theta, cfg)?;
    let n = batch.len() as f64;
    let exceed = batch.samples.iter().filter(|x| (x.eval(k1) - x.eval(k2)).abs() > eps).count() as f64 / n;
    let bound = (2.0 * theta.get(k1 | k2) - theta.get(k1) - theta.get(k2)) / eps;
    let slack = HYPOTHESIS_SIGMAS * (exceed * (1.0 - exceed) / n).sqrt();
    Ok(ContinuityReport { exceedance: exceed, bound, slack, pass: exceed <= bound + slack })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationCheck {
    pub parts: (usize, usize),
    pub thresholds: (f64, f64),
    pub empirical: f64,
    pub product: f64,
    pub sigma: f64,
    pub deviation_sigmas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub additive: bool,
    pub checks: Vec<FactorizationCheck>,
    pub max_deviation_sigmas: f64,
    pub pass: bool,
}

/// Marginal quantile levels used as grid points.
const GRID_LEVELS: [f64; 3] = [0.25, 0.5, 0.75];

/// For additive `θ`, checks that `X` on pairwise disjoint parts has a
/// factorising joint CDF; otherwise checks that some pair visibly does not.
/// Grid points are the marginal 25/50/75% quantiles of each pair.
pub fn independence_on_disjoint(theta: &Capacity, parts: &[SubsetMask], cfg: &SimConfig) -> Result<FactorizationReport> {
    for (i, a) in parts.iter().enumerate() {
        theta.carrier().check_mask(*a)?;
        if parts[..i].iter().any(|b| a.intersects(*b)) {
            return Err(Error::OverlappingParts);
        }
    }
    let additive = classify(theta).additive;
    let mut report = FactorizationReport { additive, checks: Vec::new(), max_deviation_sigmas: 0.0, pass: true };
    if parts.len() < 2 {
        return Ok(report);
    }
    let batch = simulate_crsm(theta, cfg)?;
    let n = batch.len() as f64;
    let values: Vec<Vec<f64>> = parts.iter().map(|k| batch.eval(*k)).collect();
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let (ti, tj) = (theta.get(parts[i]), theta.get(parts[j]));
            if ti <= 0.0 || tj <= 0.0 {
                continue;
            }
            for q in GRID_LEVELS {
                let (a, b) = (ti / -q.ln(), tj / -q.ln());
                let hits = values[i].iter().zip(&values[j]).filter(|(x, y)| **x <= a && **y <= b).count();
                let empirical = hits as f64 / n;
                let product = q * q;
                let sigma = (product * (1.0 - product) / n).sqrt();
                let dev = (empirical - product).abs() / sigma;
                report.max_deviation_sigmas = report.max_deviation_sigmas.max(dev);
                report.checks.push(FactorizationCheck {
                    parts: (i, j),
                    thresholds: (a, b),
                    empirical,
                    product,
                    sigma,
                    deviation_sigmas: dev,
                });
            }
        }
    }
    report.pass = if additive {
        report.max_deviation_sigmas <= HYPOTHESIS_SIGMAS
    } else {
        report.max_deviation_sigmas > HYPOTHESIS_SIGMAS
    };
    Ok(report)
}
