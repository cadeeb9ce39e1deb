use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{Command, Format, Opts};
use crate::provenance::Provenance;
use crate::CliError;
use crsm::io::{self, Model};
use crsm::setfun::{classify_with_tolerance, TOLERANCE};
use crsm::simulate::{
    argmax_independence_test, couple, frechet_scale_estimate, simulate_crsm, simulate_spectral,
    FiniteSpectralSampler, SampleBatch, SimConfig, SimMode, DEFAULT_MAX_TERMS,
};
use crsm::tdf::{check_max_complete_alternation, dual_greedy, dual_oracle, OracleMode, ORACLE_EXACT_MAX_POINTS};
use crsm::verify::run_suite;
use crsm::{choquet_integral, extremal_integral, mobius_inverse, PointFunction, SubsetMask, TailDependenceFunctional};

/// Trials per order for the max-complete-alternation check of `check`.
const DEFAULT_CHECK_TRIALS: usize = 1_000;
/// Orders examined by `check` on functional models.
const CHECK_MAX_ORDER: usize = 3;
/// Default draws for the sampled dual oracle on carriers above three points.
const DEFAULT_ORACLE_DRAWS: usize = 10_000;

type Handler = fn(&Ctx) -> Result<(), CliError>;

struct Ctx<'a> {
    name: &'static str,
    opts: &'a Opts,
    bytes: Vec<u8>,
    model: Model,
}

pub fn run(cmd: &Command) -> Result<(), CliError> {
    let opts = cmd.opts();
    if opts.format == Format::Csv && !matches!(cmd, Command::Simulate(_)) {
        return Err(CliError::Usage("--format csv is only available for `simulate`".into()));
    }
    let bytes = fs::read(&opts.model).map_err(|source| CliError::Io { path: opts.model.display().to_string(), source })?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Usage(format!("{}: not valid UTF-8: {e}", opts.model.display())))?;
    let model = io::model_from_str(text)?;
    let (name, f): (&'static str, Handler) = match cmd {
        Command::Check(_) => ("check", check),
        Command::Mobius(_) => ("mobius", mobius),
        Command::Choquet(_) => ("choquet", choquet),
        Command::Extremal(_) => ("extremal", extremal),
        Command::Dual(_) => ("dual", dual),
        Command::Cdf(_) => ("cdf", cdf),
        Command::Simulate(_) => ("simulate", simulate),
        Command::Estimate(_) => ("estimate", estimate),
        Command::Couple(_) => ("couple", coupling),
        Command::ArgmaxTest(_) => ("argmax-test", argmax_test),
        Command::Verify(_) => ("verify", verify),
        Command::Materialize(_) => ("materialize", materialize),
    };
    f(&Ctx { name, opts, bytes, model })
}

impl Ctx<'_> {
    fn provenance(&self) -> Value {
        json!(Provenance::new(self.name, &self.bytes, self.opts.seed, self.opts.deterministic))
    }

    /// Writes `doc` with provenance attached to `--out` or stdout.
    fn emit(&self, mut doc: Value) -> Result<(), CliError> {
        doc["provenance"] = self.provenance();
        let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
        write_text(self.opts.out.as_deref(), &text)
    }

    /// Prints a bare number, or writes `{"value", "provenance"}` to `--out`.
    fn emit_number(&self, v: f64) -> Result<(), CliError> {
        match &self.opts.out {
            Some(_) => self.emit(json!({ "value": v })),
            None => write_text(None, &format!("{}\n", json!(v))),
        }
    }

    fn function(&self) -> Result<PointFunction, CliError> {
        let v = io::parse_json(self.opts.f()?).map_err(|e| CliError::Usage(format!("--f: {e}")))?;
        io::function_from_value(self.model.carrier(), &v).map_err(|e| CliError::Usage(format!("--f: {e}")))
    }

    fn sim_config(&self) -> Result<SimConfig, CliError> {
        let cfg = SimConfig {
            seed: self.opts.seed()?,
            samples: self.opts.samples()?,
            mode: self.opts.mode,
            max_terms: DEFAULT_MAX_TERMS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn simulate(&self, cfg: &SimConfig) -> Result<SampleBatch, CliError> {
        Ok(match self.model.functional() {
            TailDependenceFunctional::Spectral { carrier, atoms } => {
                simulate_spectral(&FiniteSpectralSampler::new(&atoms)?, &carrier, cfg)?
            }
            _ => simulate_crsm(&self.model.capacity(), cfg)?,
        })
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn mode_string(mode: SimMode) -> String {
    match mode {
        SimMode::Exact => "exact".into(),
        SimMode::Truncated(k) => format!("truncated:{k}"),
    }
}

fn verdict(pass: bool) -> Result<(), CliError> {
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn check(ctx: &Ctx) -> Result<(), CliError> {
    let theta = ctx.model.capacity();
    let carrier = theta.carrier();
    let tol = ctx.opts.tolerance.unwrap_or(TOLERANCE);
    let class = classify_with_tolerance(&theta, tol);
    let witness = (!class.completely_alternating)
        .then(|| json!({ "F": io::subset_to_value(carrier, class.witness), "nu": class.min_weight }));
    let mut doc = json!({
        "completely_alternating": class.completely_alternating,
        "monotone": class.monotone,
        "maxitive": class.maxitive,
        "additive": class.additive,
        "min_weight": class.min_weight,
        "tolerance": tol,
        "witness": witness,
    });
    if let (Model::Functional(ell), Some(seed)) = (&ctx.model, ctx.opts.seed) {
        let trials = ctx.opts.samples.unwrap_or(DEFAULT_CHECK_TRIALS);
        let mut orders = Vec::new();
        for order in 1..=CHECK_MAX_ORDER {
            let r = check_max_complete_alternation(ell, order, trials, seed)?;
            orders.push(json!({ "order": order, "trials": trials, "max_value": r.max_value, "pass": r.passed() }));
        }
        doc["max_complete_alternation"] = json!(orders);
    }
    ctx.emit(doc)
}

fn mobius(ctx: &Ctx) -> Result<(), CliError> {
    ctx.emit(io::mobius_to_value(&mobius_inverse(&ctx.model.capacity())))
}

fn choquet(ctx: &Ctx) -> Result<(), CliError> {
    let f = ctx.function()?;
    ctx.emit_number(choquet_integral(&f, &ctx.model.capacity())?)
}

fn extremal(ctx: &Ctx) -> Result<(), CliError> {
    let f = ctx.function()?;
    ctx.emit_number(extremal_integral(&f, &ctx.model.capacity())?)
}

fn dual(ctx: &Ctx) -> Result<(), CliError> {
    let theta = ctx.model.capacity();
    let f = ctx.function()?;
    let (mu, greedy) = dual_greedy(&theta, &f)?;
    let oracle = if theta.dim() <= ORACLE_EXACT_MAX_POINTS {
        Some(dual_oracle(&theta, &f, OracleMode::Exact)?)
    } else if let Some(seed) = ctx.opts.seed {
        let trials = ctx.opts.samples.unwrap_or(DEFAULT_ORACLE_DRAWS);
        Some(dual_oracle(&theta, &f, OracleMode::Sampled { trials, seed })?)
    } else {
        None
    };
    ctx.emit(json!({
        "greedy": greedy,
        "oracle": oracle,
        "measure": io::points_to_value(theta.carrier(), mu.weights()),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    subset: Vec<String>,
    threshold: f64,
}

fn cdf(ctx: &Ctx) -> Result<(), CliError> {
    let text = ctx.opts.pairs.as_deref().ok_or_else(|| CliError::Usage("`cdf` needs --pairs".into()))?;
    let docs: Vec<PairDoc> = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("--pairs: {e}")))?;
    let carrier = ctx.model.carrier();
    let mut pairs = Vec::with_capacity(docs.len());
    for (i, d) in docs.iter().enumerate() {
        let k = carrier.mask_from_labels(&d.subset).map_err(|e| CliError::Usage(format!("--pairs[{i}].subset: {e}")))?;
        pairs.push((k, d.threshold));
    }
    ctx.emit_number(ctx.model.functional().joint_cdf(&pairs)?)
}

fn csv_field(s: &str) -> String {
    if s.contains(['"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn simulate(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = ctx.sim_config()?;
    let batch = ctx.simulate(&cfg)?;
    let labels = batch.carrier.labels();
    match ctx.opts.format {
        Format::Csv => {
            let mut text = String::from("sample_index");
            for l in labels {
                text.push(',');
                text.push_str(&csv_field(l));
            }
            text.push('\n');
            for (j, x) in batch.samples.iter().enumerate() {
                write!(text, "{j}").unwrap();
                for v in x.values() {
                    write!(text, ",{v}").unwrap();
                }
                text.push('\n');
            }
            write_text(ctx.opts.out.as_deref(), &text)?;
            if let Some(out) = &ctx.opts.out {
                let meta = json!({
                    "artifact": out.file_name().map(|n| n.to_string_lossy().into_owned()),
                    "carrier": labels,
                    "mode": mode_string(cfg.mode),
                    "samples": cfg.samples,
                    "provenance": ctx.provenance(),
                });
                let text = serde_json::to_string_pretty(&meta).expect("JSON values serialize") + "\n";
                write_text(Some(&sidecar(out)), &text)?;
            }
            Ok(())
        }
        Format::Json => ctx.emit(json!({
            "carrier": labels,
            "mode": mode_string(cfg.mode),
            "samples": batch.samples.iter().map(|x| x.values()).collect::<Vec<_>>(),
            "terms": batch.terms,
        })),
    }
}

/// `<out>.meta.json`, holding provenance for a CSV artifact.
fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn estimate(ctx: &Ctx) -> Result<(), CliError> {
    let f = ctx.function()?;
    let cfg = ctx.sim_config()?;
    let batch = ctx.simulate(&cfg)?;
    let est = frechet_scale_estimate(&batch.extremal(f.values()))?;
    let expected = ctx.model.functional().eval(&f)?;
    ctx.emit(json!({
        "estimate": est.scale,
        "half_width": est.half_width,
        "expected": expected,
        "within": (est.scale - expected).abs() <= est.half_width,
        "mode": mode_string(cfg.mode),
        "samples": cfg.samples,
    }))
}

fn coupling(ctx: &Ctx) -> Result<(), CliError> {
    let TailDependenceFunctional::Spectral { carrier, atoms } = ctx.model.functional() else {
        return Err(CliError::Usage("`couple` needs a spectral model".into()));
    };
    let cfg = ctx.sim_config()?;
    let b = couple(&FiniteSpectralSampler::new(&atoms)?, &carrier, &cfg)?;
    let violations = b.order_violations();
    ctx.emit(json!({ "samples": cfg.samples, "violations": violations, "pass": violations == 0 }))?;
    verdict(violations == 0)
}

fn argmax_test(ctx: &Ctx) -> Result<(), CliError> {
    let theta = ctx.model.capacity();
    let k = match &ctx.opts.subset {
        Some(text) => {
            let v = io::parse_json(text).map_err(|e| CliError::Usage(format!("--subset: {e}")))?;
            io::subset_from_value(theta.carrier(), &v, "$").map_err(|e| CliError::Usage(format!("--subset: {e}")))?
        }
        None => SubsetMask::singleton(0),
    };
    let cfg = ctx.sim_config()?;
    let r = argmax_independence_test(&theta, &cfg, k)?;
    let mut doc = json!(r);
    doc["subset"] = io::subset_to_value(theta.carrier(), k);
    ctx.emit(doc)?;
    verdict(r.pass)
}

fn verify(ctx: &Ctx) -> Result<(), CliError> {
    let checks = run_suite(&ctx.model, ctx.opts.samples()?, ctx.opts.seed()?)?;
    let pass = checks.iter().all(|c| c.pass);
    ctx.emit(json!({ "checks": checks, "pass": pass }))?;
    verdict(pass)
}

fn materialize(ctx: &Ctx) -> Result<(), CliError> {
    ctx.emit(io::capacity_to_value(&ctx.model.capacity()))
}
