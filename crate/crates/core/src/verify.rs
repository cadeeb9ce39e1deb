//! The full statistical suite for one model, as run by `crsm verify`.

use serde::Serialize;

use crate::carrier::{PointFunction, SubsetMask};
use crate::error::Result;
use crate::io::Model;
use crate::random::{random_positive_function, stream_rng, streams};
use crate::setfun::classify;
use crate::simulate::{
    argmax_independence_test, cdf_check, continuity_bound_check, independence_on_disjoint, scale_check,
    simulate_crsm, simulate_spectral, FiniteSpectralSampler, SampleBatch, SimConfig, HYPOTHESIS_SIGMAS,
};
use crate::tdf::{dominates, TailDependenceFunctional};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckResult {
    fn at_most(check: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        CheckResult { check: check.into(), statistic, threshold, pass: statistic <= threshold }
    }
}

/// Number of random test functions used for envelope domination.
const DOMINATION_TRIALS: usize = 10_000;

/// Runs every applicable check. Exact checks come first; simulation checks
/// are skipped when the model cannot be simulated (the failing exact check
/// already reports why).
pub fn run_suite(model: &Model, samples: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let ell = model.functional();
    let theta = model.capacity();
    let carrier = theta.carrier().clone();
    let d = carrier.len();
    let cfg = SimConfig::exact(seed, samples);
    cfg.validate()?;
    let mut out = Vec::new();

    let class = classify(&theta);
    out.push(CheckResult {
        check: "completely_alternating".into(),
        statistic: class.min_weight,
        threshold: -crate::setfun::TOLERANCE,
        pass: class.completely_alternating,
    });
    if !class.completely_alternating || !(theta.total() > 0.0) {
        return Ok(out);
    }

    if matches!(ell, TailDependenceFunctional::Spectral { .. }) {
        let r = dominates(&ell.crsm_envelope(), &ell, DOMINATION_TRIALS, seed)?;
        out.push(CheckResult {
            check: "envelope_domination".into(),
            statistic: r.min_difference,
            threshold: -crate::setfun::TOLERANCE,
            pass: r.dominates(),
        });
    }

    let batch: SampleBatch = match &ell {
        TailDependenceFunctional::Spectral { atoms, .. } => {
            simulate_spectral(&FiniteSpectralSampler::new(atoms)?, &carrier, &cfg)?
        }
        _ => simulate_crsm(&theta, &cfg)?,
    };

    let mut rng = stream_rng(seed, streams::VERIFY);
    let mut fs: Vec<(String, PointFunction)> = vec![
        ("indicator(E)".into(), PointFunction::constant(d, 1.0)),
        (format!("indicator({})", carrier.label(0)), PointFunction::indicator(d, SubsetMask::singleton(0), 1.0)),
        ("constant(2)".into(), PointFunction::constant(d, 2.0)),
    ];
    for i in 0..2 {
        fs.push((format!("random[{i}]"), random_positive_function(&mut rng, d)));
    }
    for (name, f) in &fs {
        let r = scale_check(&batch, &ell, f.values())?;
        out.push(CheckResult {
            check: format!("scale[{name}]"),
            statistic: (r.estimate - r.expected).abs(),
            threshold: r.half_width,
            pass: r.pass,
        });
    }

    for (name, pairs) in cdf_grid(&theta) {
        let r = cdf_check(&batch, &ell, &pairs)?;
        out.push(CheckResult {
            check: format!("cdf[{name}]"),
            statistic: (r.empirical - r.exact).abs(),
            threshold: HYPOTHESIS_SIGMAS * r.sigma,
            pass: r.pass,
        });
    }

    if matches!(ell, TailDependenceFunctional::Spectral { .. }) {
        return Ok(out);
    }

    let k = SubsetMask::singleton(0);
    let r = argmax_independence_test(&theta, &cfg, k)?;
    out.push(CheckResult::at_most("argmax_independence", r.z.abs(), HYPOTHESIS_SIGMAS));

    let full = carrier.full();
    let r = continuity_bound_check(&theta, k, full, theta.total(), &cfg)?;
    out.push(CheckResult { check: "continuity_bound".into(), statistic: r.exceedance, threshold: r.bound + r.slack, pass: r.pass });

    if class.additive && d > 1 {
        let parts: Vec<SubsetMask> = (0..d).map(SubsetMask::singleton).collect();
        let r = independence_on_disjoint(&theta, &parts, &cfg)?;
        out.push(CheckResult::at_most("factorization", r.max_deviation_sigmas, HYPOTHESIS_SIGMAS));
    }
    Ok(out)
}

/// Three grid points at marginal quantiles: the whole carrier at 50%, the
/// first point at 25%, and a joint point pairing the first point with the
/// rest at 75% each.
fn cdf_grid(theta: &crate::setfun::Capacity) -> Vec<(String, Vec<(SubsetMask, f64)>)> {
    let level = |k: SubsetMask, q: f64| (k, theta.get(k) / -f64::ln(q));
    let full = theta.carrier().full();
    let first = SubsetMask::singleton(0);
    let rest = full & !first;
    let mut grid = vec![("E@0.5".to_string(), vec![level(full, 0.5)])];
    if theta.get(first) > 0.0 {
        grid.push(("first@0.25".into(), vec![level(first, 0.25)]));
    }
    if theta.get(first) > 0.0 && theta.get(rest) > 0.0 {
        grid.push(("first,rest@0.75".into(), vec![level(first, 0.75), level(rest, 0.75)]));
    }
    grid
}
