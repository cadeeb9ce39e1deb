//! Spectral functions `Y` for LePage series.

use rand::distr::Distribution;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;

use crate::carrier::SubsetMask;
use crate::error::{Error, Result};
use crate::random::SimRng;
use crate::setfun::{classify, mobius_inverse, Capacity};
use crate::tdf::SpectralAtom;

/// A random nonnegative function on the carrier, sampled from an explicit
/// generator.
///
/// Exact simulation needs a declared bound `B ≥ Y(x)` almost surely, and
/// needs to know which points can never become positive (structural zeros)
/// so the stopping rule does not wait for them. For ordered coupling the
/// sampler also declares which points can never be in the argmax set of
/// `Y`; the default is the structural zeros.
pub trait SpectralSampler: Sync {
    fn dim(&self) -> usize;
    fn draw(&self, rng: &mut SimRng, out: &mut [f64]);
    fn bound(&self) -> Option<f64>;
    fn structural_zeros(&self) -> SubsetMask {
        SubsetMask::EMPTY
    }
    fn choice_zeros(&self) -> SubsetMask {
        self.structural_zeros()
    }
}

/// `{x : y(x) = max y}`, or empty when `y ≡ 0`.
pub fn argmax_points(y: &[f64]) -> SubsetMask {
    let top = y.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return SubsetMask::EMPTY;
    }
    SubsetMask::from_points((0..y.len()).filter(|&i| y[i] == top))
}

/// `Y` with finitely many atoms, drawn through an alias table.
pub struct FiniteSpectralSampler {
    values: Vec<Vec<f64>>,
    alias: WeightedAliasIndex<f64>,
    bound: f64,
    zeros: SubsetMask,
    choice_zeros: SubsetMask,
}

impl FiniteSpectralSampler {
    pub fn new(atoms: &[SpectralAtom]) -> Result<Self> {
        let d = atoms.first().map(|a| a.y.len()).ok_or_else(|| Error::invalid("no spectral atoms"))?;
        let alias = WeightedAliasIndex::new(atoms.iter().map(|a| a.p).collect())
            .map_err(|e| Error::invalid(format!("atom probabilities: {e}")))?;
        let values: Vec<Vec<f64>> = atoms.iter().map(|a| a.y.values().to_vec()).collect();
        let bound = values.iter().flatten().copied().fold(0.0, f64::max);
        let full = SubsetMask::full(d);
        let positive = values
            .iter()
            .fold(SubsetMask::EMPTY, |acc, y| acc | SubsetMask::from_points((0..d).filter(|&i| y[i] > 0.0)));
        let chosen = values.iter().fold(SubsetMask::EMPTY, |acc, y| acc | argmax_points(y));
        Ok(FiniteSpectralSampler {
            values,
            alias,
            bound,
            zeros: full & !positive,
            choice_zeros: full & !chosen,
        })
    }
}

impl SpectralSampler for FiniteSpectralSampler {
    fn dim(&self) -> usize {
        self.values[0].len()
    }
    fn draw(&self, rng: &mut SimRng, out: &mut [f64]) {
        out.copy_from_slice(&self.values[self.alias.sample(rng)]);
    }
    fn bound(&self) -> Option<f64> {
        Some(self.bound)
    }
    fn structural_zeros(&self) -> SubsetMask {
        self.zeros
    }
    fn choice_zeros(&self) -> SubsetMask {
        self.choice_zeros
    }
}

/// `Y(x) = scale · U_x` with independent uniforms; a spectral function that
/// is not indicator-valued, with bound `scale`.
pub struct UniformSpectralSampler {
    pub dim: usize,
    pub scale: f64,
}

impl SpectralSampler for UniformSpectralSampler {
    fn dim(&self) -> usize {
        self.dim
    }
    fn draw(&self, rng: &mut SimRng, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.scale * rng.random::<f64>();
        }
    }
    fn bound(&self) -> Option<f64> {
        Some(self.scale)
    }
}

/// Random nonempty set `Ξ` with `P(Ξ = F) = ν(F) / θ(E)` for the Möbius
/// measure `ν` of a completely alternating capacity.
pub struct CrsmSampler {
    pub(crate) total: f64,
    masks: Vec<SubsetMask>,
    alias: WeightedAliasIndex<f64>,
    /// Points hit by some set of positive weight, i.e. `θ({x}) > 0`.
    pub(crate) relevant: SubsetMask,
    pub(crate) dim: usize,
}

impl CrsmSampler {
    pub fn new(theta: &Capacity) -> Result<Self> {
        let class = classify(theta);
        if !class.completely_alternating {
            return Err(Error::NotCompletelyAlternating { min_weight: class.min_weight, witness: class.witness });
        }
        if !(theta.total() > 0.0) {
            return Err(Error::invalid("simulation needs θ(E) > 0"));
        }
        let nu = mobius_inverse(theta);
        let (masks, weights): (Vec<SubsetMask>, Vec<f64>) =
            nu.support().filter(|(_, w)| *w > 0.0).unzip();
        let relevant = masks.iter().fold(SubsetMask::EMPTY, |acc, m| acc | *m);
        let alias = WeightedAliasIndex::new(weights).map_err(|e| Error::Internal(format!("alias table: {e}")))?;
        Ok(CrsmSampler { total: theta.total(), masks, alias, relevant, dim: theta.dim() })
    }

    pub fn draw_set(&self, rng: &mut SimRng) -> SubsetMask {
        self.masks[self.alias.sample(rng)]
    }
}
