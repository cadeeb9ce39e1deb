//! Capacity constructors: Bernstein composition, rearrangement-invariant
//! families, distortions, and stationary storm capacities on discrete tori.
//!
//! Only shift stationarity is available on a torus. Scaling self-similarity
//! has no analogue on a finite lattice and is not represented.
//!
//! Rearrangement-invariant capacities are built from explicit laws (the
//! exchangeable and subset-size families). General mixtures over the level
//! `μ(K)` are not offered, since it is not known which mixing laws give
//! completely alternating results.

use serde::{Deserialize, Serialize};

use crate::carrier::{Carrier, SubsetMask, Torus};
use crate::error::{Error, Result};
use crate::setfun::Capacity;

/// `g(t) = b t + Σ_k w_k (1 − e^{−s_k t})`, or `g(t) = t^α`.
///
/// Validity is by construction: a nonnegative drift plus positive jump
/// atoms, or a power with exponent in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BernsteinFunction {
    Levy { drift: f64, atoms: Vec<(f64, f64)> },
    Power(f64),
}

impl BernsteinFunction {
    pub fn levy(drift: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if !(drift >= 0.0 && drift.is_finite()) {
            return Err(Error::invalid(format!("Bernstein drift {drift} must be finite and nonnegative")));
        }
        if let Some((s, w)) = atoms.iter().find(|(s, w)| !(*s > 0.0 && *w > 0.0 && s.is_finite() && w.is_finite())) {
            return Err(Error::invalid(format!("Bernstein jump atom ({s}, {w}) must have positive finite rate and weight")));
        }
        Ok(BernsteinFunction::Levy { drift, atoms })
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("power exponent {alpha} must lie in (0, 1)")));
        }
        Ok(BernsteinFunction::Power(alpha))
    }

    pub fn identity() -> Self {
        BernsteinFunction::Levy { drift: 1.0, atoms: Vec::new() }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::invalid(format!("Bernstein functions are evaluated at t ≥ 0, got {t}")));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        match self {
            BernsteinFunction::Power(a) => t.powf(*a),
            BernsteinFunction::Levy { drift, atoms } => {
                drift * t + atoms.iter().map(|(s, w)| -w * (-s * t).exp_m1()).sum::<f64>()
            }
        }
    }
}

/// `(g ∘ θ)(K) = g(θ(K))`. Completely alternating input stays completely
/// alternating.
pub fn compose_capacity(g: &BernsteinFunction, theta: &Capacity) -> Capacity {
    theta.map(|v| g.eval_unchecked(v)).expect("Bernstein functions map [0, ∞) into [0, ∞)")
}

/// `θ(K) = c (1 − E (1 − ζ)^{|K|})` for `ζ` with finitely many atoms
/// `(value, probability)` in `[0, 1]`.
pub fn exchangeable_capacity(carrier: Carrier, zeta: &[(f64, f64)], c: f64) -> Result<Capacity> {
    check_scale(c)?;
    check_probabilities(zeta.iter().map(|(_, p)| *p))?;
    if let Some((z, _)) = zeta.iter().find(|(z, _)| !(0.0..=1.0).contains(z)) {
        return Err(Error::invalid(format!("ζ atom {z} lies outside [0, 1]")));
    }
    Capacity::from_fn(carrier, |k| {
        let m = k.len() as i32;
        c * (1.0 - zeta.iter().map(|(z, p)| p * (1.0 - z).powi(m)).sum::<f64>())
    })
}

/// Rearrangement-invariant capacity of a random set whose cardinality has
/// law `p_0, …, p_d` and which is uniform given its cardinality:
/// `θ(K) = c (1 − p_0 − Σ_{k=1}^{d−m} C(d−m, k)/C(d, k) p_k)`, `m = |K|`.
pub fn subset_size_capacity(carrier: Carrier, p: &[f64], c: f64) -> Result<Capacity> {
    let d = carrier.len();
    if p.len() != d + 1 {
        return Err(Error::invalid(format!("cardinality law needs {} entries, got {}", d + 1, p.len())));
    }
    check_scale(c)?;
    check_probabilities(p.iter().copied())?;
    Capacity::from_fn(carrier, |k| {
        let m = k.len();
        let miss: f64 = (1..=d - m).map(|j| binomial(d - m, j) / binomial(d, j) * p[j]).sum();
        (c * (1.0 - p[0] - miss)).max(0.0)
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distortion {
    /// `g(t) = t^α`; the proportional hazard transform.
    Power(f64),
    /// `g(t) = min(t, α) / α`; the average value at risk. Not completely
    /// alternating in general.
    Avar(f64),
}

/// `θ(K) = g(μ(K))`. Invalid results (for instance AVaR) are returned as is;
/// use [`crate::setfun::classify`] to inspect them.
pub fn distortion_capacity(carrier: Carrier, mu: &[f64], kind: Distortion) -> Result<Capacity> {
    carrier.check_len(mu.len())?;
    if mu.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::invalid("reference measure weights must be finite and nonnegative"));
    }
    let alpha = match kind {
        Distortion::Power(a) | Distortion::Avar(a) => a,
    };
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("distortion parameter {alpha} must lie in (0, 1]")));
    }
    Capacity::from_fn(carrier, |k| {
        let t: f64 = k.points().map(|i| mu[i]).sum();
        match kind {
            Distortion::Power(a) => t.powf(a),
            Distortion::Avar(a) => t.min(a) / a,
        }
    })
}

/// One shape of a random storm: cells given as coordinate vectors on the
/// torus, drawn with probability `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeAtom {
    pub p: f64,
    pub cells: Vec<Vec<i64>>,
}

/// Stationary capacity on the torus `ℤ_n^dim`:
/// `θ(K) = unit · E |K ⊕ Ξ̌|`, where `Ξ̌ = {−s : s ∈ Ξ}` and `|·|` counts
/// lattice points. Equivalently the capacity of `Ξ + V` with `V` uniform on
/// the torus, scaled by `unit · n^dim`.
pub fn torus_storm_capacity(n: usize, dim: usize, shape: &[ShapeAtom], unit: f64) -> Result<Capacity> {
    let carrier = Carrier::torus(n, dim)?;
    let torus = carrier.torus_structure().expect("torus carrier");
    check_scale(unit)?;
    check_probabilities(shape.iter().map(|a| a.p))?;
    for a in shape {
        if a.cells.is_empty() {
            return Err(Error::invalid("storm shapes must be nonempty"));
        }
        if let Some(c) = a.cells.iter().find(|c| c.len() != dim) {
            return Err(Error::invalid(format!("storm cell {c:?} does not have {dim} coordinates")));
        }
    }
    let reflected: Vec<Vec<Vec<i64>>> =
        shape.iter().map(|a| a.cells.iter().map(|c| c.iter().map(|x| -x).collect()).collect()).collect();
    Capacity::from_fn(carrier, |k| {
        shape
            .iter()
            .zip(&reflected)
            .map(|(atom, cells)| {
                let sum = cells.iter().fold(SubsetMask::EMPTY, |acc, v| acc | torus.shift_mask(k, v));
                atom.p * sum.len() as f64
            })
            .sum::<f64>()
            * unit
    })
}

/// True iff `θ(K + v) = θ(K)` exactly for every subset `K` and shift `v`.
pub fn check_stationary(theta: &Capacity) -> Result<bool> {
    let torus: Torus = theta.carrier().torus_structure().ok_or(Error::NotTorus)?;
    let shifts: Vec<Vec<i64>> = torus.shifts().collect();
    Ok(crate::carrier::enumerate_subsets(theta.carrier(), true)
        .all(|k| shifts.iter().all(|v| theta.get(torus.shift_mask(k, v)) == theta.get(k))))
}

fn check_scale(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("scale constant {c} must be positive and finite")));
    }
    Ok(())
}

fn check_probabilities(p: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for x in p {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::invalid(format!("probability {x} is not in [0, 1]")));
        }
        total += x;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("probabilities sum to {total}, expected 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_ca_capacity, stream_rng};
    use crate::setfun::{classify, mobius_inverse, successive_difference};
    use rand::Rng;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn bernstein_eval_examples() {
        assert_eq!(BernsteinFunction::power(0.5).unwrap().eval(4.0).unwrap(), 2.0);
        assert_eq!(BernsteinFunction::identity().eval(3.0).unwrap(), 3.0);
        let g = BernsteinFunction::levy(0.0, vec![(1.0, 1.0)]).unwrap();
        assert!((g.eval(50.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(g.eval(-1.0).is_err());
        assert!(BernsteinFunction::power(1.0).is_err());
        assert!(BernsteinFunction::levy(-1.0, vec![]).is_err());
        assert!(BernsteinFunction::levy(0.0, vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn bernstein_functions_are_concave_and_increasing_on_a_grid() {
        let gs = [
            BernsteinFunction::power(0.3).unwrap(),
            BernsteinFunction::levy(0.5, vec![(2.0, 1.0), (0.1, 3.0)]).unwrap(),
        ];
        for g in &gs {
            assert_eq!(g.eval(0.0).unwrap(), 0.0);
            let vals: Vec<f64> = (0..200).map(|i| g.eval(i as f64 * 0.05).unwrap()).collect();
            for w in vals.windows(3) {
                assert!(w[1] >= w[0]);
                assert!(w[2] - w[1] <= w[1] - w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn compose_examples() {
        let c = Carrier::numbered(2).unwrap();
        let t = Capacity::from_fn(c, |k| k.len() as f64).unwrap();
        let s = compose_capacity(&BernsteinFunction::power(0.5).unwrap(), &t);
        assert!(close(s.table(), &[0.0, 1.0, 1.0, 2f64.sqrt()]));
        let r2 = 2f64.sqrt();
        assert!(close(mobius_inverse(&s).weights(), &[0.0, r2 - 1.0, r2 - 1.0, 2.0 - r2]));

        assert_eq!(compose_capacity(&BernsteinFunction::identity(), &t), t);

        let t2 = Capacity::new(Carrier::new(["a", "b"]).unwrap(), vec![0.0, 1.0, 1.0, 1.5]).unwrap();
        assert!(classify(&compose_capacity(&BernsteinFunction::power(0.5).unwrap(), &t2)).completely_alternating);
    }

    #[test]
    fn composition_preserves_complete_alternation() {
        let mut rng = stream_rng(31, 0);
        for _ in 0..100 {
            let d = rng.random_range(1..=5);
            let t = random_ca_capacity(&mut rng, &Carrier::numbered(d).unwrap(), 0.5);
            let g = if rng.random_bool(0.3) {
                BernsteinFunction::power(rng.random_range(0.05..0.95)).unwrap()
            } else {
                let atoms = (0..rng.random_range(0..=3))
                    .map(|_| (rng.random_range(0.1..5.0), rng.random_range(0.1..2.0)))
                    .collect();
                BernsteinFunction::levy(rng.random::<f64>(), atoms).unwrap()
            };
            assert!(classify(&compose_capacity(&g, &t)).completely_alternating);
        }
    }

    #[test]
    fn exchangeable_examples() {
        let c = Carrier::numbered(2).unwrap();
        let t = exchangeable_capacity(c.clone(), &[(0.5, 1.0)], 1.0).unwrap();
        assert!(close(t.table(), &[0.0, 0.5, 0.5, 0.75]));
        assert!(close(mobius_inverse(&t).weights(), &[0.0, 0.25, 0.25, 0.25]));

        let t = exchangeable_capacity(Carrier::numbered(3).unwrap(), &[(1.0, 1.0)], 2.0).unwrap();
        assert!(t.table().iter().skip(1).all(|v| *v == 2.0));
        let t = exchangeable_capacity(c.clone(), &[(0.0, 1.0)], 2.0).unwrap();
        assert!(t.table().iter().all(|v| *v == 0.0));
        assert!(exchangeable_capacity(c.clone(), &[(1.5, 1.0)], 1.0).is_err());
        assert!(exchangeable_capacity(c, &[(0.5, 0.5)], 1.0).is_err());
    }

    #[test]
    fn subset_size_examples() {
        let c = Carrier::numbered(2).unwrap();
        let t = subset_size_capacity(c.clone(), &[0.0, 1.0, 0.0], 1.0).unwrap();
        assert!(close(t.table(), &[0.0, 0.5, 0.5, 1.0]));
        assert!(close(mobius_inverse(&t).weights(), &[0.0, 0.5, 0.5, 0.0]));
        let t = subset_size_capacity(Carrier::numbered(3).unwrap(), &[0.0, 0.0, 0.0, 1.0], 1.5).unwrap();
        assert!(t.table().iter().skip(1).all(|v| (*v - 1.5).abs() < 1e-15));
        let t = subset_size_capacity(c.clone(), &[1.0, 0.0, 0.0], 1.0).unwrap();
        assert!(t.table().iter().all(|v| *v == 0.0));
        assert!(subset_size_capacity(c.clone(), &[0.5, 0.6, 0.0], 1.0).is_err());
        assert!(subset_size_capacity(c, &[0.5, 0.5], 1.0).is_err());
    }

    #[test]
    fn exchangeable_matches_subset_size_through_binomial_mixture() {
        let mut rng = stream_rng(41, 0);
        for d in 1..=4 {
            for _ in 0..10 {
                let n_atoms = rng.random_range(1..=3);
                let raw: Vec<f64> = (0..n_atoms).map(|_| rng.random_range(0.1..1.0)).collect();
                let s: f64 = raw.iter().sum();
                let zeta: Vec<(f64, f64)> = raw.iter().map(|w| (rng.random::<f64>(), w / s)).collect();
                let p: Vec<f64> = (0..=d)
                    .map(|k| {
                        zeta.iter()
                            .map(|(z, w)| w * binomial(d, k) * z.powi(k as i32) * (1.0 - z).powi((d - k) as i32))
                            .sum()
                    })
                    .collect();
                let c = Carrier::numbered(d).unwrap();
                let a = exchangeable_capacity(c.clone(), &zeta, 1.7).unwrap();
                let b = subset_size_capacity(c, &p, 1.7).unwrap();
                for (x, y) in a.table().iter().zip(b.table()) {
                    assert!((x - y).abs() < 1e-12);
                }
                assert!(classify(&a).completely_alternating);
                assert!(classify(&a).monotone);
            }
        }
    }

    #[test]
    fn distortion_examples() {
        let c = Carrier::numbered(4).unwrap();
        let avar = distortion_capacity(c.clone(), &[0.25; 4], Distortion::Avar(0.8)).unwrap();
        let cl = classify(&avar);
        assert!(!cl.completely_alternating);
        assert_eq!(cl.witness.len(), 3);
        assert!((cl.min_weight + 0.25).abs() < 1e-12);
        let ks = [SubsetMask::singleton(0), SubsetMask::singleton(1), SubsetMask::singleton(2)];
        let v = successive_difference(&avar, SubsetMask::singleton(3), &ks).unwrap();
        assert!((v - 0.25).abs() < 1e-12);

        let pw = distortion_capacity(c.clone(), &[0.25; 4], Distortion::Power(0.5)).unwrap();
        for k in crate::carrier::enumerate_subsets(&c, false) {
            assert!((pw.get(k) - (k.len() as f64 / 4.0).sqrt()).abs() < 1e-15);
        }
        assert!(classify(&pw).completely_alternating);

        let id = distortion_capacity(c.clone(), &[0.1, 0.2, 0.3, 0.4], Distortion::Avar(1.0)).unwrap();
        let cl = classify(&id);
        assert!(cl.additive && cl.completely_alternating);
        assert!(distortion_capacity(c, &[0.25; 4], Distortion::Avar(0.0)).is_err());
    }

    #[test]
    fn avar_flagged_across_the_witness_range() {
        // equal weights p/4 on four points and α in [3p/4, p)
        for p in [0.4, 0.8, 1.0] {
            for frac in [0.75, 0.8, 0.9, 0.99] {
                let alpha: f64 = frac * p;
                let t = distortion_capacity(Carrier::numbered(4).unwrap(), &[p / 4.0; 4], Distortion::Avar(alpha)).unwrap();
                let cl = classify(&t);
                assert!(!cl.completely_alternating, "p={p} α={alpha}");
                let ks = [SubsetMask::singleton(0), SubsetMask::singleton(1), SubsetMask::singleton(2)];
                let v = successive_difference(&t, SubsetMask::singleton(3), &ks).unwrap();
                assert!((v - (p / alpha - 1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn torus_storm_examples() {
        let point = [ShapeAtom { p: 1.0, cells: vec![vec![0]] }];
        let t = torus_storm_capacity(4, 1, &point, 1.0).unwrap();
        assert!(t.table().iter().enumerate().all(|(k, v)| *v == (k as u32).count_ones() as f64));
        assert!(classify(&t).additive);

        let pair = [ShapeAtom { p: 1.0, cells: vec![vec![0], vec![1]] }];
        let t = torus_storm_capacity(4, 1, &pair, 1.0).unwrap();
        assert_eq!(t.get(SubsetMask::singleton(0)), 2.0);
        assert_eq!(t.get(SubsetMask::from_points([0, 1])), 3.0);
        assert!(check_stationary(&t).unwrap());
        assert!(classify(&t).completely_alternating);
    }

    #[test]
    fn storm_capacities_are_stationary() {
        let mixed = [
            ShapeAtom { p: 0.5, cells: vec![vec![0]] },
            ShapeAtom { p: 0.3, cells: vec![vec![0], vec![1], vec![3]] },
            ShapeAtom { p: 0.2, cells: vec![vec![2], vec![-1]] },
        ];
        let t = torus_storm_capacity(5, 1, &mixed, 0.5).unwrap();
        assert!(check_stationary(&t).unwrap());
        assert!(classify(&t).completely_alternating);
        assert!((t.total() - 2.5).abs() < 1e-12);

        let planar = [
            ShapeAtom { p: 0.6, cells: vec![vec![0, 0], vec![0, 1]] },
            ShapeAtom { p: 0.4, cells: vec![vec![0, 0], vec![1, 1], vec![2, 0]] },
        ];
        let t = torus_storm_capacity(3, 2, &planar, 1.0).unwrap();
        assert!(check_stationary(&t).unwrap());
        assert!(classify(&t).completely_alternating);

        let mut table = t.table().to_vec();
        table[5] += 0.01;
        let perturbed = Capacity::new(t.carrier().clone(), table).unwrap();
        assert!(!check_stationary(&perturbed).unwrap());

        let single = torus_storm_capacity(1, 1, &[ShapeAtom { p: 1.0, cells: vec![vec![0]] }], 1.0).unwrap();
        assert!(check_stationary(&single).unwrap());

        let plain = Capacity::from_fn(Carrier::numbered(2).unwrap(), |k| k.len() as f64).unwrap();
        assert_eq!(check_stationary(&plain), Err(Error::NotTorus));
        assert!(torus_storm_capacity(25, 1, &[ShapeAtom { p: 1.0, cells: vec![vec![0]] }], 1.0).is_err());
    }
}
