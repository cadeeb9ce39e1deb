//! Choquet and extremal integrals on a finite carrier, and comonotonicity.
//!
//! Both integrals are evaluated over the distinct values of `f`, sorted in
//! decreasing order: the level sets `{f ≥ v}` grow one value at a time, so a
//! single pass over the sorted points gives every threshold.

use rand::Rng;

use crate::carrier::{PointFunction, SubsetMask};
use crate::error::Result;
use crate::random::{stream_rng, streams};
use crate::setfun::Capacity;

/// Anything that assigns a number to a nonnegative point function.
pub trait Functional {
    /// Number of carrier points the functional acts on.
    fn dim(&self) -> usize;
    fn eval(&self, f: &[f64]) -> f64;
}

impl<T: Functional + ?Sized> Functional for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, f: &[f64]) -> f64 {
        (**self).eval(f)
    }
}

/// Wraps a closure as a [`Functional`].
pub struct FnFunctional<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> Functional for FnFunctional<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, f: &[f64]) -> f64 {
        (self.f)(f)
    }
}

/// `f ↦ ∫ f dθ` as a functional.
pub struct ChoquetFunctional<'a>(pub &'a Capacity);

impl Functional for ChoquetFunctional<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, f: &[f64]) -> f64 {
        choquet_raw(f, self.0)
    }
}

/// `f ↦ ∫^e f dθ` as a functional.
pub struct ExtremalFunctional<'a>(pub &'a Capacity);

impl Functional for ExtremalFunctional<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, f: &[f64]) -> f64 {
        extremal_raw(f, self.0)
    }
}

/// Calls `visit(v, {f ≥ v}, next)` for each distinct positive value `v` of
/// `f` in decreasing order, where `next` is the next smaller distinct value
/// (0 after the last).
fn for_each_level(f: &[f64], mut visit: impl FnMut(f64, SubsetMask, f64)) {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[b].total_cmp(&f[a]).then(a.cmp(&b)));
    let mut level = SubsetMask::EMPTY;
    for (pos, &i) in order.iter().enumerate() {
        let v = f[i];
        if v <= 0.0 {
            break;
        }
        level = level.with(i);
        let next = order.get(pos + 1).map_or(0.0, |&j| f[j]);
        if next != v {
            visit(v, level, next.max(0.0));
        }
    }
}

pub(crate) fn choquet_raw(f: &[f64], theta: &Capacity) -> f64 {
    let mut acc = 0.0;
    for_each_level(f, |v, level, next| acc += (v - next) * theta.get(level));
    acc
}

pub(crate) fn extremal_raw(f: &[f64], theta: &Capacity) -> f64 {
    let mut best: f64 = 0.0;
    for_each_level(f, |v, level, _| best = best.max(v * theta.get(level)));
    best
}

/// `∫ f dθ = Σ_i (v_i − v_{i+1}) θ({f ≥ v_i})` over the distinct values
/// `v_1 > v_2 > … > v_m > v_{m+1} = 0`.
pub fn choquet_integral(f: &PointFunction, theta: &Capacity) -> Result<f64> {
    theta.carrier().check_len(f.len())?;
    Ok(choquet_raw(f.values(), theta))
}

/// `∫^e f dθ = max_v v · θ({f ≥ v})` over the distinct values of `f`.
pub fn extremal_integral(f: &PointFunction, theta: &Capacity) -> Result<f64> {
    theta.carrier().check_len(f.len())?;
    Ok(extremal_raw(f.values(), theta))
}

/// The same integral as `max_{K≠∅} θ(K) · min_{x∈K} f(x)`, by enumeration of
/// all subsets. Exponential; kept as a cross-check for small carriers.
pub fn extremal_integral_by_subsets(f: &PointFunction, theta: &Capacity) -> Result<f64> {
    theta.carrier().check_len(f.len())?;
    let v = f.values();
    Ok(crate::carrier::enumerate_subsets(theta.carrier(), true)
        .map(|k| theta.get(k) * k.points().map(|i| v[i]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max))
}

/// True iff `(f(x) − f(y))(g(x) − g(y)) ≥ 0` for all pairs of points.
pub fn comonotonic(f: &PointFunction, g: &PointFunction) -> Result<bool> {
    crate::error::check_lengths(f.len(), g.len())?;
    let (f, g) = (f.values(), g.values());
    Ok((0..f.len()).all(|x| (x + 1..f.len()).all(|y| (f[x] - f[y]) * (g[x] - g[y]) >= 0.0)))
}

/// The Choquet integral written for increasingly sorted values:
/// `u_(1) θ(E) + Σ_{k≥2} (u_(k) − u_(k−1)) θ({top d−k+1 points})`. Ties are
/// broken by carrier index.
pub fn comonotone_formula(u: &PointFunction, theta: &Capacity) -> Result<f64> {
    theta.carrier().check_len(u.len())?;
    let v = u.values();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    let mut upper = theta.carrier().full();
    let mut prev = 0.0;
    let mut acc = 0.0;
    for &i in &order {
        acc += (v[i] - prev) * theta.get(upper);
        prev = v[i];
        upper = SubsetMask(upper.0 & !(1 << i));
    }
    Ok(acc)
}

/// Outcome of [`comonotone_additivity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComonotoneReport {
    pub trials: usize,
    pub max_deviation: f64,
    /// A pair `(f, g)` whose deviation exceeds the tolerance.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

impl ComonotoneReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

pub const COMONOTONE_TOLERANCE: f64 = 1e-7;

/// A random nondecreasing step function on `[0, 1]`.
fn random_step<R: Rng + ?Sized>(rng: &mut R) -> Vec<(f64, f64)> {
    let steps = rng.random_range(1..=3);
    (0..steps)
        .map(|_| (rng.random::<f64>(), rng.random_range(-2.0..2.0f64).exp()))
        .collect()
}

fn apply_step(step: &[(f64, f64)], t: f64) -> f64 {
    step.iter().filter(|(tau, _)| t >= *tau).map(|(_, c)| c).sum()
}

/// Tests `ℓ(f + g) = ℓ(f) + ℓ(g)` on random comonotonic pairs. Each pair is
/// built as two independent random nondecreasing step transforms of one
/// shared uniform vector, so comonotonicity holds by construction.
pub fn comonotone_additivity_check(ell: &impl Functional, trials: usize, seed: u64) -> ComonotoneReport {
    let d = ell.dim();
    let mut rng = stream_rng(seed, streams::COMONOTONE);
    let mut report = ComonotoneReport { trials, max_deviation: 0.0, witness: None };
    for _ in 0..trials {
        let z: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let (s1, s2) = (random_step(&mut rng), random_step(&mut rng));
        let f: Vec<f64> = z.iter().map(|&t| apply_step(&s1, t)).collect();
        let g: Vec<f64> = z.iter().map(|&t| apply_step(&s2, t)).collect();
        let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let dev = (ell.eval(&sum) - ell.eval(&f) - ell.eval(&g)).abs();
        if dev > report.max_deviation {
            report.max_deviation = dev;
            if dev > COMONOTONE_TOLERANCE {
                report.witness = Some((f, g));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::Carrier;
    use crate::random::{random_ca_capacity, random_point_function, stream_rng};
    use crate::setfun::{classify, mobius_inverse};
    use proptest::prelude::*;
    use rand::Rng;

    fn theta2() -> Capacity {
        Capacity::new(Carrier::new(["a", "b"]).unwrap(), vec![0.0, 1.0, 1.0, 1.5]).unwrap()
    }

    fn pf(v: &[f64]) -> PointFunction {
        PointFunction::new(v.to_vec()).unwrap()
    }

    /// Layer-cake integral `∫_0^∞ θ({f ≥ t}) dt` by midpoint quadrature on
    /// each interval between consecutive values, where the integrand is
    /// constant; independent of the sorted-threshold evaluation.
    fn layer_cake(f: &[f64], theta: &Capacity) -> f64 {
        let mut cuts: Vec<f64> = f.to_vec();
        cuts.push(0.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let t = 0.5 * (w[0] + w[1]);
                let level = SubsetMask::from_points((0..f.len()).filter(|&i| f[i] >= t));
                (w[1] - w[0]) * theta.get(level)
            })
            .sum()
    }

    #[test]
    fn choquet_examples() {
        assert_eq!(choquet_integral(&pf(&[2.0, 1.0]), &theta2()).unwrap(), 2.5);
        let t = Capacity::from_fn(Carrier::numbered(3).unwrap(), |k| k.len() as f64).unwrap();
        assert_eq!(choquet_integral(&pf(&[1.0, 2.0, 3.0]), &t).unwrap(), 6.0);
        let ind = PointFunction::indicator(2, SubsetMask(1), 3.0);
        assert_eq!(choquet_integral(&ind, &theta2()).unwrap(), 3.0);
        assert!(choquet_integral(&pf(&[1.0]), &theta2()).is_err());
    }

    #[test]
    fn extremal_examples() {
        let f = pf(&[2.0, 1.0]);
        assert_eq!(extremal_integral(&f, &theta2()).unwrap(), 2.0);
        assert_eq!(extremal_integral_by_subsets(&f, &theta2()).unwrap(), 2.0);
        let ind = PointFunction::indicator(2, SubsetMask(3), 2.0);
        assert_eq!(extremal_integral(&ind, &theta2()).unwrap(), 3.0);
    }

    #[test]
    fn extremal_of_max_of_indicators_under_sup_measure() {
        // f = ⋁ a_i 1_{A_i}, θ maxitive: ∫^e f dθ = max_i a_i θ(A_i)
        let c = Carrier::numbered(4).unwrap();
        let g = [0.3, 1.2, 0.7, 2.0];
        let theta = Capacity::maxitive(c, &g).unwrap();
        let pieces = [(1.5, SubsetMask(0b0011)), (0.4, SubsetMask(0b1100)), (2.5, SubsetMask(0b0001))];
        let f: Vec<f64> = (0..4)
            .map(|x| pieces.iter().filter(|(_, a)| a.contains(x)).map(|(c, _)| *c).fold(0.0, f64::max))
            .collect();
        let expected = pieces.iter().map(|(a, k)| a * theta.get(*k)).fold(0.0, f64::max);
        assert!((extremal_integral(&pf(&f), &theta).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn comonotonic_examples() {
        assert!(comonotonic(&pf(&[1.0, 2.0]), &pf(&[5.0, 7.0])).unwrap());
        assert!(!comonotonic(&pf(&[1.0, 2.0]), &pf(&[7.0, 5.0])).unwrap());
        assert!(comonotonic(&pf(&[3.0, 3.0]), &pf(&[7.0, 5.0])).unwrap());
        assert!(comonotonic(&pf(&[3.0]), &pf(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn comonotone_formula_examples() {
        let t = Capacity::from_fn(Carrier::numbered(3).unwrap(), |k| k.len() as f64).unwrap();
        assert_eq!(comonotone_formula(&pf(&[3.0, 2.0, 1.0]), &t).unwrap(), 6.0);
        assert_eq!(comonotone_formula(&pf(&[2.0, 1.0]), &theta2()).unwrap(), 2.5);
        assert_eq!(comonotone_formula(&PointFunction::constant(2, 0.7), &theta2()).unwrap(), 0.7 * 1.5);
    }

    #[test]
    fn comonotone_additivity_examples() {
        let t = theta2();
        let r = comonotone_additivity_check(&ChoquetFunctional(&t), 1000, 1);
        assert!(r.passed(), "{r:?}");
        assert!(r.max_deviation <= COMONOTONE_TOLERANCE);

        let sup = Capacity::maxitive(Carrier::new(["a", "b"]).unwrap(), &[1.0, 0.5]).unwrap();
        let r = comonotone_additivity_check(&ExtremalFunctional(&sup), 1000, 1);
        let (f, g) = r.witness.clone().expect("extremal integral is not comonotone additive");
        assert!(comonotonic(&pf(&f), &pf(&g)).unwrap());

        let mu = [0.3, 2.0, 1.1];
        let leb = FnFunctional { dim: 3, f: |f: &[f64]| f.iter().zip(&mu).map(|(a, b)| a * b).sum() };
        let r = comonotone_additivity_check(&leb, 1000, 1);
        assert!(r.passed() && r.max_deviation < 1e-12);
    }

    #[test]
    fn generated_pairs_are_comonotonic() {
        let mut rng = stream_rng(2, 0);
        for _ in 0..200 {
            let z: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
            let (s1, s2) = (random_step(&mut rng), random_step(&mut rng));
            let f: Vec<f64> = z.iter().map(|&t| apply_step(&s1, t)).collect();
            let g: Vec<f64> = z.iter().map(|&t| apply_step(&s2, t)).collect();
            assert!(comonotonic(&pf(&f), &pf(&g)).unwrap());
        }
    }

    proptest! {
        #[test]
        fn choquet_matches_layer_cake_and_formula(seed in any::<u64>(), d in 1usize..=5) {
            let mut rng = stream_rng(seed, 0);
            let c = Carrier::numbered(d).unwrap();
            let t = crate::random::random_table(&mut rng, &c, 2.0);
            let f = random_point_function(&mut rng, d);
            let ch = choquet_integral(&f, &t).unwrap();
            prop_assert!((ch - layer_cake(f.values(), &t)).abs() <= 1e-9 * (1.0 + ch.abs()));
            // both are finite sums over the same increments
            let cf = comonotone_formula(&f, &t).unwrap();
            prop_assert!((ch - cf).abs() <= 1e-12 * (1.0 + ch.abs()));
        }

        #[test]
        fn integral_properties(seed in any::<u64>(), d in 1usize..=4, c in 0.0f64..10.0) {
            let mut rng = stream_rng(seed, 0);
            let car = Carrier::numbered(d).unwrap();
            let t = random_ca_capacity(&mut rng, &car, 0.5);
            let f = random_point_function(&mut rng, d);
            let g = random_point_function(&mut rng, d);
            let ch = choquet_integral(&f, &t).unwrap();
            let ex = extremal_integral(&f, &t).unwrap();
            let tol = 1e-9 * (1.0 + ch);
            // homogeneity
            prop_assert!((choquet_integral(&f.scaled(c), &t).unwrap() - c * ch).abs() <= tol * (1.0 + c));
            prop_assert!((extremal_integral(&f.scaled(c), &t).unwrap() - c * ex).abs() <= tol * (1.0 + c));
            // extremal ≤ Choquet for monotone θ
            prop_assert!(ex <= ch + tol);
            // the two extremal evaluations agree
            prop_assert!((ex - extremal_integral_by_subsets(&f, &t).unwrap()).abs() <= tol);
            // subadditivity for completely alternating θ
            let sum = PointFunction::new(f.values().iter().zip(g.values()).map(|(a, b)| a + b).collect()).unwrap();
            let lhs = choquet_integral(&sum, &t).unwrap();
            let rhs = ch + choquet_integral(&g, &t).unwrap();
            prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
            // indicators
            let k = SubsetMask(rng.random_range(0..(1u32 << d)));
            let ind = PointFunction::indicator(d, k, 1.0);
            prop_assert_eq!(choquet_integral(&ind, &t).unwrap(), t.get(k));
            prop_assert_eq!(extremal_integral(&ind, &t).unwrap(), t.get(k));
        }

        #[test]
        fn additive_capacity_integrates_like_a_measure(seed in any::<u64>(), d in 1usize..=6) {
            let mut rng = stream_rng(seed, 0);
            let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 3.0).collect();
            let t = Capacity::additive(Carrier::numbered(d).unwrap(), &w).unwrap();
            prop_assert!(classify(&t).additive);
            let nu = mobius_inverse(&t);
            let f = random_point_function(&mut rng, d);
            let lebesgue: f64 = (0..d).map(|x| f.values()[x] * nu.get(SubsetMask::singleton(x))).sum();
            prop_assert!((choquet_integral(&f, &t).unwrap() - lebesgue).abs() <= 1e-9);
        }
    }
}
