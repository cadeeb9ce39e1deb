//! Set functions on a finite carrier: capacity tables, successive
//! differences, the Möbius measure of the finite Choquet theorem, and
//! classification.
//!
//! A capacity `θ` with `θ(∅) = 0` has a unique signed measure `ν` on the
//! nonempty subsets such that `θ(K) = Σ_{F ∩ K ≠ ∅} ν(F)`. The capacity is
//! completely alternating iff `ν ≥ 0`. Writing `g(A) = θ(E) − θ(E \ A)`,
//! which is the `ν`-mass of subsets contained in `A`, `ν` is the Möbius
//! inverse of `g` on the subset lattice.

use rand::Rng;
use serde::Serialize;

use crate::carrier::{enumerate_subsets, Carrier, SubsetMask};
use crate::error::{Error, Result};
use crate::random::{random_nonempty_mask, stream_rng, streams};

/// Absolute tolerance for set-function identities.
pub const TOLERANCE: f64 = 1e-9;

/// A set function stored as a full table indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    carrier: Carrier,
    table: Vec<f64>,
}

impl Capacity {
    pub fn new(carrier: Carrier, table: Vec<f64>) -> Result<Self> {
        if table.len() != carrier.subset_count() {
            return Err(Error::invalid(format!(
                "capacity table has {} entries, a carrier of {} points needs {}",
                table.len(),
                carrier.len(),
                carrier.subset_count()
            )));
        }
        if table[0] != 0.0 {
            return Err(Error::invalid(format!("capacity of the empty set must be 0, got {}", table[0])));
        }
        if let Some((k, v)) = table.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!(
                "capacity value {v} on {} is not a finite nonnegative number",
                SubsetMask(k as u32)
            )));
        }
        Ok(Capacity { carrier, table })
    }

    /// Builds the table from `f`; the value on `∅` is forced to 0.
    pub fn from_fn(carrier: Carrier, mut f: impl FnMut(SubsetMask) -> f64) -> Result<Self> {
        let table = enumerate_subsets(&carrier, false)
            .map(|k| if k.is_empty() { 0.0 } else { f(k) })
            .collect();
        Capacity::new(carrier, table)
    }

    /// `θ(K) = Σ_{x∈K} w(x)`.
    pub fn additive(carrier: Carrier, weights: &[f64]) -> Result<Self> {
        carrier.check_len(weights.len())?;
        Capacity::from_fn(carrier, |k| k.points().map(|i| weights[i]).sum())
    }

    /// `θ(K) = max_{x∈K} g(x)`.
    pub fn maxitive(carrier: Carrier, g: &[f64]) -> Result<Self> {
        carrier.check_len(g.len())?;
        Capacity::from_fn(carrier, |k| crate::carrier::sup_integral(g, k))
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn dim(&self) -> usize {
        self.carrier.len()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn get(&self, k: SubsetMask) -> f64 {
        self.table[k.index()]
    }

    /// `θ(E)`.
    pub fn total(&self) -> f64 {
        self.table[self.table.len() - 1]
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Capacity::from_fn(self.carrier.clone(), |k| f(self.get(k)))
    }

    pub(crate) fn check_mask(&self, k: SubsetMask) -> Result<()> {
        self.carrier.check_mask(k)
    }
}

/// Signed weights on the nonempty subsets; index 0 (the empty set) is
/// always 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusMeasure {
    carrier: Carrier,
    weights: Vec<f64>,
}

impl MobiusMeasure {
    pub fn new(carrier: Carrier, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != carrier.subset_count() {
            return Err(Error::invalid(format!(
                "Möbius weight table has {} entries, expected {}",
                weights.len(),
                carrier.subset_count()
            )));
        }
        if weights[0] != 0.0 {
            return Err(Error::invalid("Möbius weight of the empty set must be 0"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("Möbius weights must be finite"));
        }
        Ok(MobiusMeasure { carrier, weights })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, f: SubsetMask) -> f64 {
        self.weights[f.index()]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Nonzero weights with their subsets.
    pub fn support(&self) -> impl Iterator<Item = (SubsetMask, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(k, w)| (SubsetMask(k as u32), *w))
    }
}

/// In-place Möbius transform on the subset lattice:
/// `h(F) ← Σ_{A⊆F} (−1)^{|F\A|} h(A)`.
fn mobius_transform(h: &mut [f64], d: usize) {
    for i in 0..d {
        let bit = 1usize << i;
        for m in 0..h.len() {
            if m & bit != 0 {
                h[m] -= h[m ^ bit];
            }
        }
    }
}

/// In-place zeta transform: `h(F) ← Σ_{A⊆F} h(A)`.
fn zeta_transform(h: &mut [f64], d: usize) {
    for i in 0..d {
        let bit = 1usize << i;
        for m in 0..h.len() {
            if m & bit != 0 {
                h[m] += h[m ^ bit];
            }
        }
    }
}

/// The Möbius measure `ν` with `Σ_{F∩K≠∅} ν(F) = θ(K)`, in `O(d·2^d)`.
pub fn mobius_inverse(theta: &Capacity) -> MobiusMeasure {
    let d = theta.dim();
    let full = theta.carrier.full();
    let total = theta.total();
    let mut h: Vec<f64> = (0..theta.table.len())
        .map(|a| total - theta.get(SubsetMask(a as u32).complement(d) & full))
        .collect();
    mobius_transform(&mut h, d);
    h[0] = 0.0;
    MobiusMeasure { carrier: theta.carrier.clone(), weights: h }
}

/// `θ(K) = Σ_{F∩K≠∅} ν(F)`. Roundoff below [`TOLERANCE`] is clamped to 0;
/// larger negative values (possible only for signed `ν`) are rejected.
pub fn capacity_from_measure(nu: &MobiusMeasure) -> Result<Capacity> {
    let d = nu.carrier.len();
    let total = nu.total_mass();
    let mut below = nu.weights.clone();
    zeta_transform(&mut below, d);
    let mut table = Vec::with_capacity(below.len());
    for k in 0..below.len() {
        let v = if k == 0 { 0.0 } else { total - below[SubsetMask(k as u32).complement(d).index()] };
        if v < -TOLERANCE {
            return Err(Error::invalid(format!(
                "signed measure yields negative capacity {v} on {}",
                SubsetMask(k as u32)
            )));
        }
        table.push(v.max(0.0));
    }
    Capacity::new(nu.carrier.clone(), table)
}

/// Structural flags of a capacity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub monotone: bool,
    pub completely_alternating: bool,
    pub maxitive: bool,
    pub additive: bool,
    /// Most negative (or smallest) Möbius weight over nonempty subsets.
    pub min_weight: f64,
    /// Subset attaining `min_weight`; lowest mask on ties.
    #[serde(skip)]
    pub witness: SubsetMask,
}

pub fn classify(theta: &Capacity) -> Classification {
    classify_with_tolerance(theta, TOLERANCE)
}

pub fn classify_with_tolerance(theta: &Capacity, tol: f64) -> Classification {
    let d = theta.dim();
    let nu = mobius_inverse(theta);
    let (witness, min_weight) = nu
        .weights
        .iter()
        .enumerate()
        .skip(1)
        .fold((SubsetMask(1), f64::INFINITY), |best, (k, &w)| {
            if w < best.1 {
                (SubsetMask(k as u32), w)
            } else {
                best
            }
        });

    let monotone = (0..theta.table.len()).all(|k| {
        (0..d).filter(|i| k >> i & 1 == 0).all(|i| theta.table[k | 1 << i] >= theta.table[k] - tol)
    });

    // Maxitivity on a finite carrier is equivalent to θ(K) = max over
    // singletons of K, which is what the pairwise condition reduces to by
    // induction on |K|.
    let singles: Vec<f64> = (0..d).map(|i| theta.get(SubsetMask::singleton(i))).collect();
    let maxitive = enumerate_subsets(theta.carrier(), true)
        .all(|k| (theta.get(k) - crate::carrier::sup_integral(&singles, k)).abs() <= tol);

    let additive = nu.support().all(|(f, w)| f.len() == 1 || w.abs() <= tol);

    Classification {
        monotone,
        completely_alternating: min_weight >= -tol,
        maxitive,
        additive,
        min_weight,
        witness,
    }
}

/// `Δ_{K_n} ⋯ Δ_{K_1} θ(K)` by the recursive definition
/// `Δ_{K_1} θ(K) = θ(K) − θ(K ∪ K_1)`.
pub fn successive_difference(theta: &Capacity, k: SubsetMask, ks: &[SubsetMask]) -> Result<f64> {
    theta.check_mask(k)?;
    for &m in ks {
        theta.check_mask(m)?;
    }
    if ks.is_empty() {
        return Err(Error::invalid("successive difference needs at least one set"));
    }
    Ok(difference_rec(theta, k, ks))
}

fn difference_rec(theta: &Capacity, k: SubsetMask, ks: &[SubsetMask]) -> f64 {
    match ks.split_last() {
        None => theta.get(k),
        Some((&last, rest)) => difference_rec(theta, k, rest) - difference_rec(theta, k | last, rest),
    }
}

/// A positive successive difference and the family producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternationViolation {
    pub value: f64,
    pub base: SubsetMask,
    pub family: Vec<SubsetMask>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternationReport {
    pub exhaustive: bool,
    pub families_checked: u64,
    /// Largest difference seen (≤ 0 for alternating capacities).
    pub max_value: f64,
    /// Family attaining `max_value` when it exceeds the tolerance.
    pub violation: Option<AlternationViolation>,
}

impl AlternationReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Families drawn when the carrier is too large for exhaustive checking.
pub const DIRECT_SAMPLED_FAMILIES: u64 = 10_000;

/// Complete alternation checked directly on successive differences of
/// order `1..=max_order`.
///
/// For `d ≤ 3` every base set and every multiset of nonempty sets is
/// visited (the difference is symmetric in the family, so order is
/// irrelevant). Larger carriers get [`DIRECT_SAMPLED_FAMILIES`] families
/// with `n` uniform on `1..=max_order`, the base uniform over all subsets,
/// and family members uniform over nonempty subsets.
pub fn check_complete_alternation_direct(theta: &Capacity, max_order: usize, seed: u64) -> AlternationReport {
    let d = theta.dim();
    let mut report = AlternationReport { exhaustive: d <= 3, families_checked: 0, max_value: f64::NEG_INFINITY, violation: None };
    let record = |base: SubsetMask, family: &[SubsetMask], report: &mut AlternationReport| {
        let v = difference_rec(theta, base, family);
        report.families_checked += 1;
        if v > report.max_value {
            report.max_value = v;
            if v > TOLERANCE {
                report.violation = Some(AlternationViolation { value: v, base, family: family.to_vec() });
            }
        }
    };
    let max_order = max_order.max(1);
    if d <= 3 {
        let nonempty: Vec<SubsetMask> = enumerate_subsets(theta.carrier(), true).collect();
        for n in 1..=max_order {
            for base in enumerate_subsets(theta.carrier(), false) {
                let mut idx = vec![0usize; n];
                loop {
                    let family: Vec<SubsetMask> = idx.iter().map(|&i| nonempty[i]).collect();
                    record(base, &family, &mut report);
                    // next nondecreasing index tuple
                    let mut pos = n;
                    while pos > 0 && idx[pos - 1] == nonempty.len() - 1 {
                        pos -= 1;
                    }
                    if pos == 0 {
                        break;
                    }
                    idx[pos - 1] += 1;
                    let v = idx[pos - 1];
                    for slot in idx.iter_mut().skip(pos) {
                        *slot = v;
                    }
                }
            }
        }
    } else {
        let mut rng = stream_rng(seed, streams::ALTERNATION);
        let mut family = Vec::with_capacity(max_order);
        for _ in 0..DIRECT_SAMPLED_FAMILIES {
            let n = rng.random_range(1..=max_order);
            let base = SubsetMask(rng.random_range(0..(1u32 << d)));
            family.clear();
            family.extend((0..n).map(|_| random_nonempty_mask(&mut rng, d)));
            record(base, &family, &mut report);
        }
    }
    report
}
