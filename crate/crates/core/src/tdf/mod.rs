//! Tail dependence functionals.
//!
//! A max-stable random sup-measure `X` on a finite carrier is described by
//! its tail dependence functional `ℓ`: for every nonnegative `f`, the
//! extremal integral `∫^e f dX` is unit Fréchet with scale `ℓ(f)`. Three
//! exact representations are supported:
//!
//! * `Choquet(θ)`: `ℓ(f) = ∫ f dθ`, the Choquet random sup-measure case;
//! * `Spectral`: `ℓ(f) = E max_x f(x) Y(x)` for a finitely supported
//!   spectral function `Y`;
//! * `Lebesgue(μ)`: `ℓ(f) = Σ_x f(x) μ(x)`, complete randomness.
//!
//! Spectral atoms are not normalised, so two spectral functionals are
//! compared through their values, never through their atom lists.
//!
//! Laws with `ℓ(f + a) = ℓ(f) + a ℓ(1)` (cash invariance) are not singled
//! out; no representation here depends on that property.

mod dual;

pub use dual::{dual_greedy, dual_oracle, OracleMode, ORACLE_EXACT_MAX_POINTS};

use rand::Rng;

use crate::carrier::{sup_integral, Carrier, PointFunction, SubsetMask};
use crate::error::{check_lengths, Error, Result};
use crate::integrals::{choquet_raw, Functional};
use crate::random::{random_point_function, stream_rng, streams};
use crate::setfun::{mobius_inverse, Capacity};

/// Nonnegative weights per point, `μ(K) = Σ_{x∈K} μ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure(Vec<f64>);

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("measure weights must be finite and nonnegative"));
        }
        Ok(DiscreteMeasure(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn measure(&self, k: SubsetMask) -> f64 {
        k.points().map(|i| self.0[i]).sum()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.0).map(|(a, b)| a * b).sum()
    }
}

/// One atom of a finitely supported spectral function: `Y = y` with
/// probability `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAtom {
    pub p: f64,
    pub y: PointFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TailDependenceFunctional {
    Choquet(Capacity),
    Spectral { carrier: Carrier, atoms: Vec<SpectralAtom> },
    Lebesgue { carrier: Carrier, mu: DiscreteMeasure },
}

/// Tolerance on `Σ p_j = 1` for spectral atoms.
const PROBABILITY_TOLERANCE: f64 = 1e-9;

impl TailDependenceFunctional {
    pub fn spectral(carrier: Carrier, atoms: Vec<SpectralAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("spectral representation needs at least one atom"));
        }
        for a in &atoms {
            if !(a.p > 0.0 && a.p.is_finite()) {
                return Err(Error::invalid(format!("atom probability {} must be positive", a.p)));
            }
            carrier.check_len(a.y.len())?;
        }
        let total: f64 = atoms.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::invalid(format!("atom probabilities sum to {total}, expected 1")));
        }
        Ok(TailDependenceFunctional::Spectral { carrier, atoms })
    }

    pub fn lebesgue(carrier: Carrier, weights: Vec<f64>) -> Result<Self> {
        carrier.check_len(weights.len())?;
        Ok(TailDependenceFunctional::Lebesgue { carrier, mu: DiscreteMeasure::new(weights)? })
    }

    pub fn carrier(&self) -> &Carrier {
        match self {
            TailDependenceFunctional::Choquet(t) => t.carrier(),
            TailDependenceFunctional::Spectral { carrier, .. } | TailDependenceFunctional::Lebesgue { carrier, .. } => carrier,
        }
    }

    pub fn eval(&self, f: &PointFunction) -> Result<f64> {
        self.carrier().check_len(f.len())?;
        Ok(self.eval_raw(f.values()))
    }

    fn eval_raw(&self, f: &[f64]) -> f64 {
        match self {
            TailDependenceFunctional::Choquet(t) => choquet_raw(f, t),
            TailDependenceFunctional::Spectral { atoms, .. } => atoms
                .iter()
                .map(|a| a.p * f.iter().zip(a.y.values()).map(|(u, y)| u * y).fold(0.0, f64::max))
                .sum(),
            TailDependenceFunctional::Lebesgue { mu, .. } => mu.integrate(f),
        }
    }

    /// `θ(K) = ℓ(1_K)`.
    pub fn extremal_coefficients(&self) -> Capacity {
        let carrier = self.carrier().clone();
        let cap = match self {
            TailDependenceFunctional::Choquet(t) => return t.clone(),
            TailDependenceFunctional::Spectral { atoms, .. } => {
                Capacity::from_fn(carrier, |k| atoms.iter().map(|a| a.p * a.y.sup(k)).sum())
            }
            TailDependenceFunctional::Lebesgue { mu, .. } => Capacity::from_fn(carrier, |k| mu.measure(k)),
        };
        cap.expect("coefficients of a valid functional are finite and nonnegative")
    }

    /// The Choquet functional with the same extremal coefficients; the
    /// largest tail dependence functional sharing them.
    pub fn crsm_envelope(&self) -> TailDependenceFunctional {
        TailDependenceFunctional::Choquet(self.extremal_coefficients())
    }

    /// `P(X(K_i) ≤ a_i for all i) = exp(−E)`, where `E = ℓ(max_i 1_{K_i}/a_i)`
    /// written out per representation.
    pub fn joint_cdf(&self, pairs: &[(SubsetMask, f64)]) -> Result<f64> {
        for &(k, a) in pairs {
            self.carrier().check_mask(k)?;
            if !(a > 0.0) {
                return Err(Error::invalid(format!("cdf threshold {a} must be positive")));
            }
        }
        let hit = |f: SubsetMask| {
            pairs.iter().filter(|(k, _)| k.intersects(f)).map(|(_, a)| 1.0 / a).fold(0.0, f64::max)
        };
        let exponent: f64 = match self {
            TailDependenceFunctional::Choquet(t) => mobius_inverse(t).support().map(|(f, w)| w * hit(f)).sum(),
            TailDependenceFunctional::Spectral { atoms, .. } => atoms
                .iter()
                .map(|atom| {
                    let y = atom.y.values();
                    atom.p * pairs.iter().map(|(k, a)| sup_integral(y, *k) / a).fold(0.0, f64::max)
                })
                .sum(),
            TailDependenceFunctional::Lebesgue { mu, .. } => {
                (0..mu.0.len()).map(|x| mu.0[x] * hit(SubsetMask::singleton(x))).sum()
            }
        };
        Ok((-exponent).exp())
    }
}

impl Functional for TailDependenceFunctional {
    fn dim(&self) -> usize {
        self.carrier().len()
    }
    fn eval(&self, f: &[f64]) -> f64 {
        self.eval_raw(f)
    }
}

pub const MAX_ALTERNATION_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxAlternationWitness {
    pub value: f64,
    pub u: Vec<f64>,
    pub family: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxAlternationReport {
    pub order: usize,
    pub trials: usize,
    pub max_value: f64,
    pub witness: Option<MaxAlternationWitness>,
}

impl MaxAlternationReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// `Δ^∨_{u_n} ⋯ Δ^∨_{u_1} ℓ(u) = Σ_{S⊆{1..n}} (−1)^{|S|} ℓ(u ∨ ⋁_{i∈S} u_i)`.
pub fn max_difference(ell: &impl Functional, u: &[f64], family: &[Vec<f64>]) -> f64 {
    let mut joined = u.to_vec();
    (0u32..1 << family.len())
        .map(|s| {
            joined.copy_from_slice(u);
            for (i, ui) in family.iter().enumerate() {
                if s >> i & 1 == 1 {
                    for (a, b) in joined.iter_mut().zip(ui) {
                        *a = a.max(*b);
                    }
                }
            }
            let sign = if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            sign * ell.eval(&joined)
        })
        .sum()
}

/// Searches for a positive nested max-difference of order `order ≤ 5` over
/// random nonnegative vectors.
pub fn check_max_complete_alternation(
    ell: &impl Functional,
    order: usize,
    trials: usize,
    seed: u64,
) -> Result<MaxAlternationReport> {
    if !(1..=5).contains(&order) {
        return Err(Error::invalid(format!("max-alternation order {order} must be in 1..=5")));
    }
    let d = ell.dim();
    let mut rng = stream_rng(seed, streams::MAX_ALTERNATION);
    let mut report = MaxAlternationReport { order, trials, max_value: f64::NEG_INFINITY, witness: None };
    for _ in 0..trials {
        let u = random_point_function(&mut rng, d).into_inner();
        let family: Vec<Vec<f64>> = (0..order).map(|_| random_point_function(&mut rng, d).into_inner()).collect();
        let v = max_difference(ell, &u, &family);
        if v > report.max_value {
            report.max_value = v;
            if v > MAX_ALTERNATION_TOLERANCE {
                report.witness = Some(MaxAlternationWitness { value: v, u, family });
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport {
    pub trials: usize,
    /// `min_f ℓ₁(f) − ℓ₂(f)` over the sampled functions.
    pub min_difference: f64,
    pub witness: Vec<f64>,
}

pub const DOMINATION_TOLERANCE: f64 = 1e-9;

impl DominationReport {
    pub fn dominates(&self) -> bool {
        self.min_difference >= -DOMINATION_TOLERANCE
    }
}

/// Samples random nonnegative `f` with mixed scales and records the smallest
/// `ℓ₁(f) − ℓ₂(f)`.
pub fn dominates(l1: &impl Functional, l2: &impl Functional, trials: usize, seed: u64) -> Result<DominationReport> {
    check_lengths(l1.dim(), l2.dim())?;
    let d = l1.dim();
    let mut rng = stream_rng(seed, streams::DOMINATION);
    let mut report = DominationReport { trials, min_difference: f64::INFINITY, witness: vec![0.0; d] };
    for _ in 0..trials {
        let f = random_point_function(&mut rng, d).into_inner();
        let diff = l1.eval(&f) - l2.eval(&f);
        if diff < report.min_difference {
            report.min_difference = diff;
            report.witness = f;
        }
    }
    Ok(report)
}

/// Draws a random spectral functional with `atoms` atoms on `d` points;
/// with `indicator_valued` every atom is a constant times an indicator.
pub fn random_spectral<R: Rng + ?Sized>(rng: &mut R, d: usize, atoms: usize, indicator_valued: bool) -> TailDependenceFunctional {
    let carrier = Carrier::numbered(d).expect("d within cap");
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let atoms = raw
        .into_iter()
        .map(|w| {
            let y = if indicator_valued {
                let k = crate::random::random_nonempty_mask(rng, d);
                PointFunction::indicator(d, k, rng.random_range(0.2..3.0))
            } else {
                random_point_function(rng, d)
            };
            SpectralAtom { p: w / total, y }
        })
        .collect();
    TailDependenceFunctional::spectral(carrier, atoms).expect("valid by construction")
}
