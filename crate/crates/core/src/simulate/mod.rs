//! LePage series simulation of max-stable random sup-measures.
//!
//! A CRSM with extremal coefficients `θ` is `X({x}) = θ(E) max{Γ_i⁻¹ : x ∈ Ξ_i}`
//! with `Γ_1 < Γ_2 < …` the arrival times of a unit-rate Poisson process
//! and `Ξ_i` i.i.d. with `P(Ξ = F) = ν(F)/θ(E)`. A general max-stable
//! sup-measure is `X({x}) = max_i Γ_i⁻¹ Y_i(x)` for i.i.d. spectral `Y_i`.
//!
//! Exact mode stops at the first arrival `Γ_n` with `B/Γ_n` strictly below
//! every running maximum that can still be positive, where `B` bounds a
//! single spectral contribution (`θ(E)` for CRSMs). No later term can then
//! change any coordinate, so the returned vector is an exact draw. Truncated
//! mode uses a fixed number of terms and is stochastically smaller than the
//! true law.
//!
//! Sample `j` reads only random stream `j` (see [`crate::random`]); batches
//! are generated in parallel and assembled in index order, so output does
//! not depend on thread count.

mod checks;
mod sampler;

pub use checks::{
    argmax_independence_test, cdf_check, continuity_bound_check, independence_on_disjoint, scale_check,
    ArgmaxIndependenceReport, CdfCheck, ContinuityReport, FactorizationCheck, FactorizationReport, ScaleCheck, HYPOTHESIS_SIGMAS,
};
pub use sampler::{argmax_points, CrsmSampler, FiniteSpectralSampler, SpectralSampler, UniformSpectralSampler};

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::carrier::{Carrier, SubsetMask, SupMeasureVector};
use crate::error::{Error, Result};
use crate::random::{stream_rng, SimRng};
use crate::setfun::Capacity;

pub const DEFAULT_MAX_TERMS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    Exact,
    Truncated(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub samples: usize,
    pub mode: SimMode,
    pub max_terms: u64,
}

impl SimConfig {
    pub fn exact(seed: u64, samples: usize) -> Self {
        SimConfig { seed, samples, mode: SimMode::Exact, max_terms: DEFAULT_MAX_TERMS }
    }

    pub fn truncated(seed: u64, samples: usize, terms: u64) -> Self {
        SimConfig { seed, samples, mode: SimMode::Truncated(terms), max_terms: DEFAULT_MAX_TERMS }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        if self.mode == SimMode::Truncated(0) {
            return Err(Error::invalid("truncated mode needs at least one term"));
        }
        Ok(())
    }
}

/// Realisations of a random sup-measure, by singleton values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub carrier: Carrier,
    pub samples: Vec<SupMeasureVector>,
    /// `Ξ_1` of each sample (CRSM simulation only).
    pub first_sets: Option<Vec<SubsetMask>>,
    /// LePage terms consumed per sample.
    pub terms: Vec<u64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `X_j(K)` for every sample.
    pub fn eval(&self, k: SubsetMask) -> Vec<f64> {
        self.samples.iter().map(|x| x.eval(k)).collect()
    }

    /// `∫^e f dX_j = max_x f(x) X_j({x})` for every sample.
    pub fn extremal(&self, f: &[f64]) -> Vec<f64> {
        self.samples
            .iter()
            .map(|x| x.values().iter().zip(f).map(|(a, b)| a * b).fold(0.0, f64::max))
            .collect()
    }
}

fn next_arrival(rng: &mut SimRng, gamma: &mut f64) -> f64 {
    *gamma += rng.sample::<f64, _>(Exp1);
    *gamma
}

/// Smallest running value over `relevant`, or `None` while any of them is
/// still 0.
fn settled_floor(x: &[f64], relevant: SubsetMask) -> Option<f64> {
    let mut m = f64::INFINITY;
    for i in relevant.points() {
        if x[i] <= 0.0 {
            return None;
        }
        m = m.min(x[i]);
    }
    Some(m)
}

struct CrsmDraw {
    values: Vec<f64>,
    first: SubsetMask,
    terms: u64,
}

fn draw_crsm(s: &CrsmSampler, cfg: &SimConfig, index: u64) -> Result<CrsmDraw> {
    let mut rng = stream_rng(cfg.seed, index);
    let mut x = vec![0.0; s.dim];
    let mut gamma = 0.0;
    let mut first = SubsetMask::EMPTY;
    let mut terms = 0u64;
    loop {
        let level = s.total / next_arrival(&mut rng, &mut gamma);
        match cfg.mode {
            SimMode::Exact => {
                if settled_floor(&x, s.relevant).is_some_and(|m| level < m) {
                    break;
                }
                if terms >= cfg.max_terms {
                    return Err(Error::MaxTermsExceeded { sample: index, max_terms: cfg.max_terms });
                }
            }
            SimMode::Truncated(n) if terms >= n => break,
            SimMode::Truncated(_) => {}
        }
        let set = s.draw_set(&mut rng);
        if terms == 0 {
            first = set;
        }
        for i in set.points() {
            x[i] = x[i].max(level);
        }
        terms += 1;
    }
    Ok(CrsmDraw { values: x, first, terms })
}

/// Samples the CRSM with extremal coefficient functional `θ`.
pub fn simulate_crsm(theta: &Capacity, cfg: &SimConfig) -> Result<SampleBatch> {
    cfg.validate()?;
    let sampler = CrsmSampler::new(theta)?;
    let draws: Vec<CrsmDraw> =
        (0..cfg.samples as u64).into_par_iter().map(|j| draw_crsm(&sampler, cfg, j)).collect::<Result<_>>()?;
    let mut batch = SampleBatch {
        carrier: theta.carrier().clone(),
        samples: Vec::with_capacity(draws.len()),
        first_sets: Some(Vec::with_capacity(draws.len())),
        terms: Vec::with_capacity(draws.len()),
    };
    for d in draws {
        batch.samples.push(SupMeasureVector(d.values));
        batch.first_sets.as_mut().unwrap().push(d.first);
        batch.terms.push(d.terms);
    }
    Ok(batch)
}

/// The three coupled series `X_* ≤ X ≤ X^*` of one sample.
struct CoupledDraw {
    lower: Vec<f64>,
    middle: Vec<f64>,
    upper: Vec<f64>,
    terms: u64,
}

/// Runs the LePage series for one sample. With `coupled`, also builds the
/// smallest indicator-valued upper bound `Y^*(x) = Y(E) 1{Y(x) > 0}` and
/// the argmax indicator `Y_*(x) = Y(E) 1{x ∈ M_Y}` from the same terms.
fn draw_spectral(s: &dyn SpectralSampler, cfg: &SimConfig, index: u64, coupled: bool) -> Result<CoupledDraw> {
    let d = s.dim();
    let full = SubsetMask::full(d);
    let bound = match cfg.mode {
        SimMode::Exact => s.bound().ok_or(Error::MissingBound)?,
        SimMode::Truncated(_) => f64::INFINITY,
    };
    let relevant = full & !s.structural_zeros();
    let choice_relevant = full & !s.choice_zeros();
    let mut rng = stream_rng(cfg.seed, index);
    let mut y = vec![0.0; d];
    let mut out = CoupledDraw { lower: vec![0.0; d], middle: vec![0.0; d], upper: vec![0.0; d], terms: 0 };
    let mut gamma = 0.0;
    loop {
        let g = next_arrival(&mut rng, &mut gamma);
        match cfg.mode {
            SimMode::Exact => {
                let mut floor = settled_floor(&out.middle, relevant);
                if coupled {
                    floor = match (floor, settled_floor(&out.upper, relevant), settled_floor(&out.lower, choice_relevant)) {
                        (Some(a), Some(b), Some(c)) => Some(a.min(b).min(c)),
                        _ => None,
                    };
                }
                if floor.is_some_and(|m| bound / g < m) {
                    break;
                }
                if out.terms >= cfg.max_terms {
                    return Err(Error::MaxTermsExceeded { sample: index, max_terms: cfg.max_terms });
                }
            }
            SimMode::Truncated(n) if out.terms >= n => break,
            SimMode::Truncated(_) => {}
        }
        s.draw(&mut rng, &mut y);
        for (m, v) in out.middle.iter_mut().zip(&y) {
            *m = m.max(v / g);
        }
        if coupled {
            let top = y.iter().copied().fold(0.0, f64::max);
            let level = top / g;
            let chosen = argmax_points(&y);
            for (i, &v) in y.iter().enumerate() {
                if v > 0.0 {
                    out.upper[i] = out.upper[i].max(level);
                }
                if chosen.contains(i) {
                    out.lower[i] = out.lower[i].max(level);
                }
            }
        }
        out.terms += 1;
    }
    Ok(out)
}

fn collect_spectral(
    s: &dyn SpectralSampler,
    cfg: &SimConfig,
    coupled: bool,
) -> Result<Vec<CoupledDraw>> {
    cfg.validate()?;
    if cfg.mode == SimMode::Exact && s.bound().is_none() {
        return Err(Error::MissingBound);
    }
    (0..cfg.samples as u64).into_par_iter().map(|j| draw_spectral(s, cfg, j, coupled)).collect()
}

/// Samples `X({x}) = max_i Γ_i⁻¹ Y_i(x)`.
pub fn simulate_spectral(s: &dyn SpectralSampler, carrier: &Carrier, cfg: &SimConfig) -> Result<SampleBatch> {
    carrier.check_len(s.dim())?;
    let draws = collect_spectral(s, cfg, false)?;
    Ok(SampleBatch {
        carrier: carrier.clone(),
        terms: draws.iter().map(|d| d.terms).collect(),
        samples: draws.into_iter().map(|d| SupMeasureVector(d.middle)).collect(),
        first_sets: None,
    })
}

/// Pathwise coupled realisations of the largest CRSM below `X`, `X` itself
/// and the smallest CRSM above `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledBatch {
    pub lower: SampleBatch,
    pub middle: SampleBatch,
    pub upper: SampleBatch,
}

impl CoupledBatch {
    /// Number of (sample, point) pairs where `X_* ≤ X ≤ X^*` fails.
    pub fn order_violations(&self) -> usize {
        self.lower
            .samples
            .iter()
            .zip(&self.middle.samples)
            .zip(&self.upper.samples)
            .map(|((l, m), u)| {
                (0..m.0.len()).filter(|&i| !(l.0[i] <= m.0[i] && m.0[i] <= u.0[i])).count()
            })
            .sum()
    }
}

/// Builds the three series from shared `(Γ_i, Y_i)`. The lower spectral
/// function uses the argmax set `M_Y`, which is indicator-valued and
/// dominated by `Y`.
pub fn couple(s: &dyn SpectralSampler, carrier: &Carrier, cfg: &SimConfig) -> Result<CoupledBatch> {
    carrier.check_len(s.dim())?;
    if s.bound().is_none() {
        return Err(Error::MissingBound);
    }
    let draws = collect_spectral(s, cfg, true)?;
    let terms: Vec<u64> = draws.iter().map(|d| d.terms).collect();
    let mut lower = Vec::with_capacity(draws.len());
    let mut middle = Vec::with_capacity(draws.len());
    let mut upper = Vec::with_capacity(draws.len());
    for d in draws {
        lower.push(SupMeasureVector(d.lower));
        middle.push(SupMeasureVector(d.middle));
        upper.push(SupMeasureVector(d.upper));
    }
    let batch = |samples| SampleBatch { carrier: carrier.clone(), samples, first_sets: None, terms: terms.clone() };
    Ok(CoupledBatch { lower: batch(lower), middle: batch(middle), upper: batch(upper) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEstimate {
    pub scale: f64,
    /// Three standard errors, `3 â / √N`.
    pub half_width: f64,
}

pub const MIN_SCALE_SAMPLES: usize = 30;

/// Maximum likelihood scale of a unit Fréchet sample: reciprocals are
/// exponential with rate `a`, so `â = N / Σ 1/z_j`.
pub fn frechet_scale_estimate(z: &[f64]) -> Result<ScaleEstimate> {
    if z.len() < MIN_SCALE_SAMPLES {
        return Err(Error::invalid(format!("scale estimation needs at least {MIN_SCALE_SAMPLES} values, got {}", z.len())));
    }
    if let Some(v) = z.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::invalid(format!("Fréchet sample value {v} is not positive")));
    }
    let n = z.len() as f64;
    let scale = n / z.iter().map(|v| 1.0 / v).sum::<f64>();
    Ok(ScaleEstimate { scale, half_width: 3.0 * scale / n.sqrt() })
}

/// `{x : X({x}) ≥ (1 − rel_tol) X(E)}`.
pub fn argmax_set(x: &SupMeasureVector, rel_tol: f64) -> Result<SubsetMask> {
    let top = x.total();
    if !(top > 0.0) {
        return Err(Error::invalid("argmax set of the zero sup-measure is undefined"));
    }
    let cut = (1.0 - rel_tol) * top;
    Ok(SubsetMask::from_points((0..x.0.len()).filter(|&i| x.0[i] >= cut)))
}
