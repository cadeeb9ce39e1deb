//! Acceptance suite. Runs without the test harness so that every criterion
//! prints one line; exits nonzero if any criterion fails.
//!
//! Reference values are computed here from first principles (brute-force
//! Möbius sums, max-over-sets integrals) rather than through the library's
//! fast paths.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use crsm::carrier::{Carrier, SubsetMask};
use crsm::choquet_integral;
use crsm::random::{random_ca_capacity, random_nonempty_mask, random_point_function, stream_rng};
use crsm::setfun::{capacity_from_measure, classify, mobius_inverse, successive_difference, Capacity};
use crsm::simulate::{
    argmax_independence_test, cdf_check, continuity_bound_check, couple, independence_on_disjoint, scale_check,
    simulate_crsm, SimConfig, UniformSpectralSampler,
};
use crsm::tdf::{dual_greedy, dual_oracle, random_spectral, OracleMode, TailDependenceFunctional};
use crsm::transforms::{
    compose_capacity, distortion_capacity, torus_storm_capacity, BernsteinFunction, Distortion, ShapeAtom,
};

type Criterion = (&'static str, fn() -> Outcome, u64);

struct Outcome {
    pass: bool,
    detail: String,
}

fn subsets(d: usize) -> impl Iterator<Item = u32> {
    0..(1u32 << d)
}

/// `θ(K) = Σ_{F ∩ K ≠ ∅} ν(F)`, summed directly.
fn hitting_sum(nu: &[f64], d: usize) -> Vec<f64> {
    subsets(d).map(|k| subsets(d).filter(|f| f & k != 0).map(|f| nu[f as usize]).sum()).collect()
}

/// `ν(F) = −Σ_{G ⊆ F} (−1)^{|F∖G|} θ(E∖G)` for nonempty `F`, by submask
/// enumeration.
fn brute_mobius(theta: &[f64], d: usize) -> Vec<f64> {
    let full = (1u32 << d) - 1;
    let mut nu = vec![0.0; 1 << d];
    for f in 1..=full {
        let mut g = f;
        let mut acc = 0.0;
        loop {
            let sign = if (f & !g).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * theta[(full & !g) as usize];
            if g == 0 {
                break;
            }
            g = (g - 1) & f;
        }
        nu[f as usize] = -acc;
    }
    nu
}

/// `ℓ(f) = Σ_F ν(F) max_{x ∈ F} f(x)`, the CRSM functional as a mixture of
/// maxima over sets.
fn crsm_functional(nu: &[f64], f: &[f64]) -> f64 {
    (1..nu.len() as u32)
        .map(|s| {
            let m = (0..f.len()).filter(|&i| s >> i & 1 == 1).map(|i| f[i]).fold(0.0, f64::max);
            nu[s as usize] * m
        })
        .sum()
}

/// `P(X(K_i) ≤ a_i ∀i) = exp(−Σ_F ν(F) max_{i : K_i ∩ F ≠ ∅} 1/a_i)`.
fn crsm_cdf(nu: &[f64], pairs: &[(SubsetMask, f64)]) -> f64 {
    let e: f64 = (1..nu.len() as u32)
        .map(|s| {
            let m = pairs.iter().filter(|(k, _)| k.0 & s != 0).map(|(_, a)| 1.0 / a).fold(0.0, f64::max);
            nu[s as usize] * m
        })
        .sum();
    (-e).exp()
}

fn criterion_1() -> Outcome {
    let mut rng = stream_rng(101, 0);
    let mut worst = 0.0f64;
    let mut worst_nu = 0.0f64;
    for _ in 0..1000 {
        let d = rng.random_range(1..=6);
        let carrier = Carrier::numbered(d).unwrap();
        let nu: Vec<f64> = subsets(d)
            .map(|s| if s == 0 || rng.random_bool(0.4) { 0.0 } else { rng.random::<f64>() })
            .collect();
        let table = hitting_sum(&nu, d);
        let theta = Capacity::new(carrier.clone(), table.clone()).unwrap();
        let recovered = mobius_inverse(&theta);
        let back = capacity_from_measure(&recovered).unwrap();
        for (a, b) in back.table().iter().zip(&table) {
            worst = worst.max((a - b).abs());
        }
        for (a, b) in recovered.weights().iter().zip(&nu) {
            worst_nu = worst_nu.max((a - b).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-9 && worst_nu <= 1e-9,
        detail: format!("1000 capacities d ≤ 6, max table error {worst:.2e}, max weight error {worst_nu:.2e} (tol 1e-9)"),
    }
}

fn criterion_2() -> Outcome {
    let carrier = Carrier::numbered(4).unwrap();
    let theta = distortion_capacity(carrier, &[0.25; 4], Distortion::Avar(0.8)).unwrap();
    let singles: Vec<SubsetMask> = (0..3).map(SubsetMask::singleton).collect();
    let diff = successive_difference(&theta, SubsetMask::singleton(3), &singles).unwrap();
    let expected = 1.0 / 0.8 - 1.0;
    let nu = mobius_inverse(&theta);
    let three_sets: Vec<f64> = subsets(4).filter(|s| s.count_ones() == 3).map(|s| nu.get(SubsetMask(s))).collect();
    let nu_err = three_sets.iter().map(|w| (w + 0.25).abs()).fold(0.0, f64::max);
    let diff_err = (diff - expected).abs();
    Outcome {
        pass: diff_err <= 1e-12 && nu_err <= 1e-12 && three_sets.len() == 4,
        detail: format!("difference {diff} (expected {expected}), ν on 3-sets {three_sets:?} (tol 1e-12)"),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = stream_rng(103, 0);
    let mut worst = 0.0f64;
    let mut sampled_excess = f64::NEG_INFINITY;
    for i in 0..200 {
        let d = rng.random_range(1..=3);
        let theta = random_ca_capacity(&mut rng, &Carrier::numbered(d).unwrap(), 0.6);
        let f = random_point_function(&mut rng, d);
        let (_, greedy) = dual_greedy(&theta, &f).unwrap();
        let ch = choquet_integral(&f, &theta).unwrap();
        let exact = dual_oracle(&theta, &f, OracleMode::Exact).unwrap();
        worst = worst.max((greedy - ch).abs()).max((greedy - exact).abs());
        let sampled = dual_oracle(&theta, &f, OracleMode::Sampled { trials: 10_000, seed: i }).unwrap();
        sampled_excess = sampled_excess.max(sampled - greedy);
    }
    Outcome {
        pass: worst <= 1e-8 && sampled_excess <= 1e-8,
        detail: format!("200 instances d ≤ 3, max disagreement {worst:.2e}, max sampled excess {sampled_excess:.2e} (tol 1e-8)"),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = stream_rng(104, 0);
    let mut min_gap = f64::INFINITY;
    let mut indicator_gap = 0.0f64;
    for i in 0..50 {
        let d = rng.random_range(1..=5);
        let atoms = rng.random_range(1..=6);
        let indicator = i % 2 == 0;
        let ell = random_spectral(&mut rng, d, atoms, indicator);
        let envelope = ell.crsm_envelope();
        for _ in 0..10_000 {
            let f = random_point_function(&mut rng, d);
            let gap = envelope.eval(&f).unwrap() - ell.eval(&f).unwrap();
            min_gap = min_gap.min(gap);
            if indicator {
                indicator_gap = indicator_gap.max(gap.abs());
            }
        }
    }
    Outcome {
        pass: min_gap >= -1e-9 && indicator_gap <= 1e-9,
        detail: format!(
            "50 functionals × 10^4 f, min envelope gap {min_gap:.2e} (≥ −1e-9), indicator-valued max |gap| {indicator_gap:.2e}"
        ),
    }
}

fn storm() -> Capacity {
    let shape = [ShapeAtom { p: 0.5, cells: vec![vec![0]] }, ShapeAtom { p: 0.5, cells: vec![vec![0], vec![1]] }];
    torus_storm_capacity(4, 1, &shape, 0.5).unwrap()
}

fn theta2() -> Capacity {
    Capacity::new(Carrier::new(["a", "b"]).unwrap(), vec![0.0, 1.0, 1.0, 1.5]).unwrap()
}

fn criterion_5() -> Outcome {
    let models: Vec<(&str, Capacity)> = vec![
        ("theta2", theta2()),
        ("full dependence d=3", Capacity::from_fn(Carrier::numbered(3).unwrap(), |_| 1.0).unwrap()),
        ("additive d=2", Capacity::additive(Carrier::numbered(2).unwrap(), &[1.0, 2.0]).unwrap()),
        ("torus storm n=4", storm()),
    ];
    let mut failures = Vec::new();
    let mut checks = 0;
    for (m, (name, theta)) in models.iter().enumerate() {
        let d = theta.dim();
        let nu = brute_mobius(theta.table(), d);
        let batch = simulate_crsm(theta, &SimConfig::exact(500 + m as u64, 100_000)).unwrap();
        let ell = TailDependenceFunctional::Choquet(theta.clone());
        let fs: Vec<Vec<f64>> = vec![
            vec![1.0; d],
            (0..d).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            (0..d).map(|i| (i + 1) as f64).collect(),
            (0..d).map(|i| if i % 2 == 0 { 0.5 } else { 3.0 }).collect(),
            (0..d).map(|i| 2.0 / (i + 1) as f64).collect(),
        ];
        for f in &fs {
            let r = scale_check(&batch, &ell, f).unwrap();
            let oracle = crsm_functional(&nu, f);
            checks += 1;
            let ok = (r.estimate - oracle).abs() <= r.half_width && (r.expected - oracle).abs() <= 1e-12;
            if !ok {
                failures.push(format!("{name} scale f={f:?}: â={} ℓ={oracle} hw={}", r.estimate, r.half_width));
            }
        }
        let full = theta.carrier().full();
        let first = SubsetMask::singleton(0);
        let rest = full & !first;
        let at = |k: SubsetMask, q: f64| (k, theta.get(k) / -f64::ln(q));
        let mut grid = vec![vec![at(full, 0.5)], vec![at(first, 0.25)]];
        grid.push(if theta.get(rest) > 0.0 { vec![at(first, 0.75), at(rest, 0.75)] } else { vec![at(full, 0.9)] });
        for pairs in &grid {
            let r = cdf_check(&batch, &ell, pairs).unwrap();
            let oracle = crsm_cdf(&nu, pairs);
            let sigma = (oracle * (1.0 - oracle) / batch.len() as f64).sqrt();
            checks += 1;
            if !((r.empirical - oracle).abs() <= 4.0 * sigma && (r.exact - oracle).abs() <= 1e-12) {
                failures.push(format!("{name} cdf {pairs:?}: empirical {} exact {oracle} σ {sigma}", r.empirical));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("4 models, N = 10^5, {checks} checks, failures: {failures:?}"),
    }
}

fn random_bernstein<R: Rng>(rng: &mut R) -> BernsteinFunction {
    if rng.random_bool(0.3) {
        BernsteinFunction::power(rng.random_range(0.05..0.95)).unwrap()
    } else {
        let drift = if rng.random_bool(0.5) { rng.random_range(0.0..2.0) } else { 0.0 };
        let atoms = (0..rng.random_range(1..=4))
            .map(|_| (rng.random_range(-2.0..2.0f64).exp(), rng.random_range(0.1..2.0)))
            .collect();
        BernsteinFunction::levy(drift, atoms).unwrap()
    }
}

fn criterion_6() -> Outcome {
    let mut rng = stream_rng(106, 0);
    let mut min_weight = f64::INFINITY;
    let mut failed = 0;
    for _ in 0..200 {
        let d = rng.random_range(1..=5);
        let theta = random_ca_capacity(&mut rng, &Carrier::numbered(d).unwrap(), 0.5);
        let g = random_bernstein(&mut rng);
        let composed = compose_capacity(&g, &theta);
        let c = classify(&composed);
        min_weight = min_weight.min(brute_mobius(composed.table(), d).iter().skip(1).copied().fold(f64::INFINITY, f64::min));
        failed += usize::from(!c.completely_alternating);
    }
    Outcome {
        pass: failed == 0,
        detail: format!("200 pairs d ≤ 5, {failed} not completely alternating, min Möbius weight {min_weight:.3e}"),
    }
}

fn criterion_7() -> Outcome {
    let sampler = UniformSpectralSampler { dim: 4, scale: 2.0 };
    let carrier = Carrier::numbered(4).unwrap();
    let b = couple(&sampler, &carrier, &SimConfig::exact(107, 10_000)).unwrap();
    let violations = b.order_violations();
    // pointwise recount, independent of order_violations
    let mut recount = 0;
    for ((l, m), u) in b.lower.samples.iter().zip(&b.middle.samples).zip(&b.upper.samples) {
        for i in 0..4 {
            if l.values()[i] > m.values()[i] || m.values()[i] > u.values()[i] {
                recount += 1;
            }
        }
    }
    Outcome {
        pass: violations == 0 && recount == 0 && b.middle.len() == 10_000,
        detail: format!("10^4 coupled samples of a uniform spectral function, {violations} violations ({recount} on recount)"),
    }
}

fn criterion_8() -> Outcome {
    let cases = [("theta2", theta2(), SubsetMask::singleton(0)), ("torus storm", storm(), SubsetMask(0b0011))];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, theta, k)) in cases.iter().enumerate() {
        let r = argmax_independence_test(theta, &SimConfig::exact(800 + i as u64, 100_000), *k).unwrap();
        pass &= r.z.abs() <= 4.0 && r.negative_control_z.abs() > 4.0 && r.argmax_mismatches == 0;
        parts.push(format!("{name}: z = {:.3}, control z = {:.1}", r.z, r.negative_control_z));
    }
    Outcome { pass, detail: format!("N = 10^5, {}", parts.join("; ")) }
}

fn criterion_9() -> Outcome {
    let mut rng = stream_rng(109, 0);
    let mut failures = Vec::new();
    let mut max_ratio = 0.0f64;
    for i in 0..20 {
        let d = rng.random_range(1..=4);
        let theta = random_ca_capacity(&mut rng, &Carrier::numbered(d).unwrap(), 0.6);
        let k1 = random_nonempty_mask(&mut rng, d);
        let k2 = random_nonempty_mask(&mut rng, d);
        let eps = theta.total() * rng.random_range(0.05..1.5);
        let r = continuity_bound_check(&theta, k1, k2, eps, &SimConfig::exact(900 + i, 10_000)).unwrap();
        let bound = (2.0 * theta.get(k1 | k2) - theta.get(k1) - theta.get(k2)) / eps;
        let slack = 4.0 * (r.exceedance * (1.0 - r.exceedance) / 10_000.0).sqrt();
        if bound > 0.0 {
            max_ratio = max_ratio.max(r.exceedance / bound);
        }
        if !(r.exceedance <= bound + slack && (r.bound - bound).abs() <= 1e-12) {
            failures.push(format!("case {i}: p̂ {} bound {bound}", r.exceedance));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("20 capacities d ≤ 4, N = 10^4 each, max p̂/bound {max_ratio:.3}, failures: {failures:?}"),
    }
}

fn criterion_10() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let additive = [
        (Capacity::additive(Carrier::numbered(2).unwrap(), &[1.0, 1.0]).unwrap(), vec![SubsetMask(0b01), SubsetMask(0b10)]),
        (
            Capacity::additive(Carrier::numbered(4).unwrap(), &[0.5, 1.0, 2.0, 0.25]).unwrap(),
            vec![SubsetMask(0b0011), SubsetMask(0b0100), SubsetMask(0b1000)],
        ),
    ];
    for (i, (theta, parts_k)) in additive.iter().enumerate() {
        let r = independence_on_disjoint(theta, parts_k, &SimConfig::exact(1000 + i as u64, 100_000)).unwrap();
        pass &= r.additive && r.pass && r.max_deviation_sigmas <= 4.0;
        parts.push(format!("additive d={}: max dev {:.2}σ", theta.dim(), r.max_deviation_sigmas));
    }
    let r = independence_on_disjoint(&theta2(), &[SubsetMask(1), SubsetMask(2)], &SimConfig::exact(1010, 100_000)).unwrap();
    pass &= !r.additive && r.pass && r.max_deviation_sigmas > 4.0;
    parts.push(format!("theta2: max dev {:.1}σ", r.max_deviation_sigmas));
    Outcome { pass, detail: parts.join("; ") }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Möbius roundtrip", criterion_1, 5),
        ("AVaR counterexample", criterion_2, 1),
        ("duality triple agreement", criterion_3, 30),
        ("envelope domination", criterion_4, 30),
        ("simulation vs closed form", criterion_5, 60),
        ("Bernstein preservation", criterion_6, 10),
        ("pathwise coupling", criterion_7, 20),
        ("argmax independence", criterion_8, 30),
        ("continuity bound", criterion_9, 60),
        ("complete randomness", criterion_10, 20),
    ];
    let mut all = true;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let pass = out.pass && in_time;
        all &= pass;
        println!(
            "criterion {:>2} {} {name}: {}; {:.2} s (limit {limit} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}", if all { "all criteria passed" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
