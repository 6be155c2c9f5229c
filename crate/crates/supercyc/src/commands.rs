//! The five subcommands. Each returns its exit code, the files to write and
//! a few human-readable lines; nothing touches the filesystem here.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use supercyc_core::criterion::{closure_supercyclic_verdict, ClosureParams, ClosureReport, Verdict, XInfSampler};
use supercyc_core::orbit::{build_witness, confinement_check, orbit_trace, verify_witness, Variant};
use supercyc_core::shift::{apply_shift, counterexample_a, counterexample_b, WeightedShift};
use supercyc_core::{Error, OperatorSeries, Rational, SparseVec, WeightSeq};

use crate::config::{Mode, RunConfig, Vector};
use crate::families::{build_family, combine, independent};
use crate::formats::{
    criterion_csv, criterion_row_json, f64_json, header, operator_json, orbit_trace_csv, table_csv, weights_json,
    witness_plan_json, OutputSet,
};
use crate::lemmas::run_suite;
use crate::num::{convert, parse_rational, sparse_from_json, sparse_to_json, ModeScalar};
use crate::{exit, ConfigError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Lemmas,
    Criterion,
    Witness,
    Isometry,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Lemmas => "lemmas",
            Command::Criterion => "criterion",
            Command::Witness => "witness",
            Command::Isometry => "isometry",
            Command::Report => "report",
        }
    }

    /// Mixed into the seed so commands draw independent streams.
    fn salt(self) -> u64 {
        match self {
            Command::Lemmas => 0x6c65_6d6d,
            Command::Criterion => 0x6372_6974,
            Command::Witness => 0x7769_746e,
            Command::Isometry => 0x6973_6f6d,
            Command::Report => 0,
        }
    }

    fn rng(self, cfg: &RunConfig) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(cfg.seed ^ self.salt())
    }
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub exit: u8,
    pub files: OutputSet,
    pub messages: Vec<String>,
}

impl Outcome {
    fn config_error(e: ConfigError) -> Self {
        Outcome {
            exit: exit::CONFIG,
            files: OutputSet::default(),
            messages: vec![e.to_string()],
        }
    }
}

/// Runs one command on a validated config.
pub fn run(cmd: Command, cfg: &RunConfig) -> Outcome {
    let result = match (cmd, cfg.mode) {
        (Command::Report, _) => return report(cfg),
        (Command::Lemmas, Mode::Exact) => lemmas::<Rational>(cfg),
        (Command::Lemmas, Mode::Float) => lemmas::<f64>(cfg),
        (Command::Criterion, Mode::Exact) => criterion::<Rational>(cfg),
        (Command::Criterion, Mode::Float) => criterion::<f64>(cfg),
        (Command::Witness, Mode::Exact) => witness::<Rational>(cfg),
        (Command::Witness, Mode::Float) => witness::<f64>(cfg),
        (Command::Isometry, Mode::Exact) => isometry::<Rational>(cfg),
        (Command::Isometry, Mode::Float) => isometry::<f64>(cfg),
    };
    result.unwrap_or_else(Outcome::config_error)
}

fn pass_or_violation(ok: bool) -> u8 {
    if ok {
        exit::PASS
    } else {
        exit::VIOLATION
    }
}

fn lemmas<S: ModeScalar>(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let mut rng = Command::Lemmas.rng(cfg);
    let out = run_suite::<S, _>(&cfg.lemmas, &cfg.tolerances, &mut rng)?;
    let mut files = OutputSet::default();
    let mut body = out.to_json();
    body["parameters"] = serde_json::to_value(&cfg.lemmas).expect("config serialises");
    files.json("lemmas_report.json", header(cfg, "lemmas"), body);
    if let Some(m) = &out.sample_matrix {
        files.json("trimatrix.json", header(cfg, "lemmas"), m.clone());
    }
    let mut messages = vec![format!("lemmas: {}", out.summary())];
    messages.extend(out.notices.iter().cloned());
    Ok(Outcome {
        exit: pass_or_violation(out.total_violations() == 0),
        files,
        messages,
    })
}

fn verdict_label(v: &Verdict) -> (&'static str, Option<String>) {
    match v {
        Verdict::Satisfied => ("satisfied", None),
        Verdict::NotCertified(why) => ("not_certified", Some(why.clone())),
        Verdict::ExcludedNullLimit => ("excluded_null_limit", Some(Error::NullLimit.to_string())),
    }
}

fn verdict_exit(v: &Verdict) -> u8 {
    match v {
        Verdict::Satisfied => exit::PASS,
        Verdict::NotCertified(_) => exit::VIOLATION,
        Verdict::ExcludedNullLimit => exit::NULL_LIMIT,
    }
}

/// Core errors raised by the pipeline: short families are a config problem,
/// anything else means the run could not certify.
fn pipeline_error(e: Error) -> Result<Outcome, ConfigError> {
    match e {
        Error::FamilyTooShort { .. } => Err(ConfigError::Invalid(e.to_string())),
        other => Ok(Outcome {
            exit: exit::VIOLATION,
            files: OutputSet::default(),
            messages: vec![format!("criterion: {other}")],
        }),
    }
}

fn closure_json<S: ModeScalar>(rep: &ClosureReport<S>, csv_prefix: Option<&str>, files: &mut OutputSet) -> Value {
    let (label, reason) = verdict_label(&rep.verdict);
    let schedule = rep.schedule.as_ref().map(|s| {
        json!({
            "m_k": s.indices,
            "m0": s.m0,
            "log_thresholds": s.log_thresholds.iter().map(|v| f64_json(*v)).collect::<Vec<_>>(),
            "log_bounds": s.log_bounds.iter().map(|v| f64_json(*v)).collect::<Vec<_>>(),
            "limit": sparse_to_json(&s.limit),
        })
    });
    let samples: Vec<Value> = rep
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r = &s.report;
            let mut v = json!({
                "id": i,
                "x0": sparse_to_json(&s.x0),
                "y0": sparse_to_json(&s.y0),
                "k0": r.k0,
                "m_k": r.m_k,
                "cond1": r.cond1,
                "cond1_from": r.cond1_from,
                "cond2": r.cond2,
                "cond2_from": r.cond2_from,
                "bounds_hold": r.bounds_hold,
                "satisfied": r.satisfied(),
                "rows": r.rows.iter().map(criterion_row_json).collect::<Vec<_>>(),
            });
            if let Some(prefix) = csv_prefix {
                let name = format!("{prefix}_{i:03}.csv");
                files.raw(&name, criterion_csv(&r.rows));
                v["csv"] = json!(name);
            }
            v
        })
        .collect();
    json!({
        "verdict": label,
        "reason": reason,
        "k0": rep.k0,
        "delta": rep.delta.as_ref().map(ModeScalar::to_json),
        "commutator_max": rep.commutator_max.as_ref().map(ModeScalar::to_json),
        "schedule": schedule,
        "schedule_error": rep.schedule_error.as_ref().map(|e| match e {
            Error::InsufficientConvergenceDepth { k, log_gap } => json!({ "message": e.to_string(), "k": k, "log_gap": f64_json(*log_gap) }),
            other => json!({ "message": other.to_string() }),
        }),
        "samples": samples,
    })
}

fn closure_params(cfg: &RunConfig) -> ClosureParams {
    ClosureParams {
        sample_count: cfg.criterion.samples,
        kmax: cfg.criterion.kmax,
        c_x: cfg.c_x,
        tol: cfg.decision_tol(),
        sampler: cfg.criterion.sampler.sampler(),
        probes: cfg.criterion.probes,
    }
}

fn criterion<S: ModeScalar>(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    if cfg.criterion.combination.is_some() {
        return combination::<S>(cfg);
    }
    let mut rng = Command::Criterion.rng(cfg);
    let w: WeightSeq<S> = cfg.weights.build()?;
    let fam = build_family::<S>(&cfg.criterion.family)?;
    let rep = match closure_supercyclic_verdict(&fam, &w, &closure_params(cfg), &mut rng) {
        Ok(r) => r,
        Err(e) => return pipeline_error(e),
    };
    let mut files = OutputSet::default();
    let mut body = closure_json(&rep, Some("criterion_sample"), &mut files);
    let (label, reason) = verdict_label(&rep.verdict);
    body["family"] = json!({
        "generator": fam.generator(),
        "len": fam.len(),
        "spec": serde_json::to_value(&cfg.criterion.family).expect("config serialises"),
    });
    body["weights"] = weights_json(&w);
    body["kmax"] = json!(cfg.criterion.kmax);
    let summary = match &reason {
        Some(r) => format!("criterion: {label} ({r})"),
        None => format!("criterion: {label} on {} sample pair(s)", rep.samples.len()),
    };
    body["summary"] = json!(summary);
    files.json("criterion_report.json", header(cfg, "criterion"), body);
    Ok(Outcome {
        exit: verdict_exit(&rep.verdict),
        files,
        messages: vec![summary],
    })
}

fn combination<S: ModeScalar>(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let spec = cfg.criterion.combination.as_ref().expect("checked by caller");
    let mut rng = Command::Criterion.rng(cfg);
    let w: WeightSeq<S> = cfg.weights.build()?;
    let coeffs = XInfSampler {
        max_index: 1,
        max_nnz: 1,
        height: spec.height.max(1),
    };
    let mut worst = exit::PASS;
    let mut satisfied = 0usize;
    let mut pairs = Vec::with_capacity(spec.pairs);
    let mut files = OutputSet::default();
    for i in 0..spec.pairs {
        let a1: Rational = coeffs.coefficient(&mut rng);
        let a2: Rational = coeffs.coefficient(&mut rng);
        let lambda = combine(&a1, &spec.lambda1.0, &a2, &spec.lambda2.0);
        let fam = supercyc_core::limits::SeqFamily::constant(convert::<S>(&lambda), spec.len.max(3));
        let rep = match closure_supercyclic_verdict(&fam, &w, &closure_params(cfg), &mut rng) {
            Ok(r) => r,
            Err(e) => return pipeline_error(e),
        };
        worst = worst.max(verdict_exit(&rep.verdict));
        satisfied += usize::from(rep.verdict == Verdict::Satisfied);
        let mut v = closure_json(&rep, None, &mut files);
        v["id"] = json!(i);
        v["alpha"] = json!([a1, a2].iter().map(ModeScalar::to_json).collect::<Vec<_>>());
        v["lambda"] = sparse_to_json(&lambda);
        pairs.push(v);
    }
    let summary = format!("criterion (combination): {satisfied}/{} verdicts satisfied", spec.pairs);
    let body = json!({
        "lambda1": sparse_to_json(&spec.lambda1.0),
        "lambda2": sparse_to_json(&spec.lambda2.0),
        "independent": independent(&spec.lambda1.0, &spec.lambda2.0),
        "weights": weights_json(&w),
        "kmax": cfg.criterion.kmax,
        "satisfied": satisfied,
        "pairs": pairs,
        "summary": summary,
    });
    files.json("combination_report.json", header(cfg, "criterion"), body);
    Ok(Outcome {
        exit: worst,
        files,
        messages: vec![summary],
    })
}

/// Targets from the inline list, a JSON file, or the seeded grid.
pub fn resolve_targets(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<SparseVec<Rational>>, ConfigError> {
    let w = &cfg.witness;
    let targets: Vec<SparseVec<Rational>> = if let Some(list) = &w.targets {
        list.iter().map(|v: &Vector| v.0.clone()).collect()
    } else if let Some(path) = &w.targets_file {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        let list = doc.get("targets").unwrap_or(&doc);
        list.as_array()
            .ok_or_else(|| ConfigError::Invalid("targets file must hold a list of vectors".into()))?
            .iter()
            .map(sparse_from_json)
            .collect::<Result<_, _>>()?
    } else {
        grid_targets(w.grid.dim, w.grid.count, w.grid.height, rng)
    };
    if targets.is_empty() {
        return Err(ConfigError::Invalid("witness target list is empty".into()));
    }
    if let Some(i) = targets.iter().position(SparseVec::is_zero) {
        return Err(ConfigError::Invalid(format!("witness target {i} is the zero vector")));
    }
    Ok(targets)
}

/// `count` distinct nonzero vectors of `X_dim` with small rational entries.
pub fn grid_targets(dim: usize, count: usize, height: i64, rng: &mut ChaCha8Rng) -> Vec<SparseVec<Rational>> {
    let sampler = XInfSampler {
        max_index: dim,
        max_nnz: dim,
        height,
    };
    let mut out: Vec<SparseVec<Rational>> = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let v = sampler.sample::<Rational, _>(rng);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn witness<S: ModeScalar>(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let mut rng = Command::Witness.rng(cfg);
    let targets_q = resolve_targets(cfg, &mut rng)?;
    let targets: Vec<SparseVec<S>> = targets_q.iter().map(convert).collect();
    let w: WeightSeq<S> = cfg.weights.build()?;
    let eps = cfg.witness.eps;
    let (x, plan) = match build_witness(&w, &targets, eps) {
        Ok(r) => r,
        Err(Error::ExactModeRequired) => {
            let msg = format!("witness: {}", Error::ExactModeRequired);
            let mut files = OutputSet::default();
            files.json(
                "witness_plan.json",
                header(cfg, "witness"),
                json!({ "error": Error::ExactModeRequired.to_string(), "weights": weights_json(&w) }),
            );
            return Ok(Outcome {
                exit: exit::EXACT_REQUIRED,
                files,
                messages: vec![msg],
            });
        }
        Err(e) => return Err(ConfigError::Invalid(e.to_string())),
    };
    let tol = cfg.tolerances.proj;
    let kmax = cfg.witness.kmax.unwrap_or(usize::MAX);
    let trace = orbit_trace(&WeightedShift(w.clone()), &x, &targets, kmax, tol).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let planned = verify_witness(&x, &plan, &targets, tol).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    // the decimal literal, not its binary rounding
    let eps_s = S::from_rational(&parse_rational(&eps.to_string())?);
    let slack = if S::EXACT { S::zero() } else { S::from_f64(tol).unwrap_or_else(S::zero) };
    let within = |d: &S| *d <= eps_s.clone() + slack.clone();
    let best: Vec<Value> = trace
        .best
        .iter()
        .zip(&planned)
        .enumerate()
        .map(|(id, ((k, d), at_plan))| {
            json!({ "target_id": id, "k": k, "proj_dist": d.to_json(), "planned_power_dist": at_plan.to_json(), "ok": within(d) })
        })
        .collect();
    let ok = trace.best.iter().all(|(_, d)| within(d)) && plan.is_consistent();
    let worst = trace.max_best_distance();
    let summary = format!(
        "witness: {} target(s), support {}, max best distance {} (eps {eps}) -> {}",
        targets.len(),
        x.degree(),
        worst.as_ref().map_or(String::from("n/a"), |d| format!("{:.3e}", d.to_f64())),
        if ok { "pass" } else { "violation" }
    );
    let mut body = witness_plan_json(&plan);
    body["witness"] = sparse_to_json(&x);
    body["targets"] = json!(targets.iter().map(sparse_to_json).collect::<Vec<_>>());
    body["per_target"] = json!(best);
    body["max_best_distance"] = worst.map_or(Value::Null, |d| d.to_json());
    body["trace_csv"] = json!("orbit_trace.csv");
    body["pass"] = json!(ok);
    body["summary"] = json!(summary);
    let mut files = OutputSet::default();
    files.json("witness_plan.json", header(cfg, "witness"), body);
    files.raw("orbit_trace.csv", orbit_trace_csv(&trace));
    Ok(Outcome {
        exit: pass_or_violation(ok),
        files,
        messages: vec![summary],
    })
}

fn isometry<S: ModeScalar>(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let mut rng = Command::Isometry.rng(cfg);
    let ic = &cfg.isometry;
    let w: WeightSeq<S> = cfg.weights.build()?;
    let unweighted = w.is_unweighted();
    let sampler = XInfSampler {
        max_index: ic.max_support,
        max_nnz: ic.max_nnz,
        height: ic.height,
    };
    let mut lambdas: Vec<SparseVec<Rational>> = ic.lambdas.iter().map(|v| v.0.clone()).collect();
    lambdas.extend((0..ic.samples).map(|_| sampler.sample::<Rational, _>(&mut rng)));

    let ftol = cfg.tolerances.float_residual;
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut csv_rows = Vec::with_capacity(lambdas.len());
    let mut violations = 0usize;
    let mut collapsed_count = 0usize;
    for (id, lam) in lambdas.iter().enumerate() {
        let op = OperatorSeries::new(convert::<S>(lam), w.clone());
        let depth = lam.degree();
        let (lower, upper) = op.norm_bracket(depth);
        let width = upper.clone() - lower.clone();
        let collapsed = if S::EXACT {
            width.is_zero()
        } else {
            width.to_f64().abs() <= ftol * upper.to_f64()
        };
        let ordered = S::EXACT && lower <= upper || !S::EXACT && lower.to_f64() <= upper.to_f64() * (1.0 + ftol);
        let ok = ordered && (collapsed || !unweighted);
        violations += usize::from(!ok);
        collapsed_count += usize::from(collapsed);
        csv_rows.push(vec![
            id.to_string(),
            depth.to_string(),
            lower.to_cell(),
            upper.to_cell(),
            width.to_cell(),
            collapsed.to_string(),
        ]);
        rows.push(json!({
            "id": id,
            "operator": operator_json(&op),
            "depth": depth,
            "lower": lower.to_json(),
            "upper": upper.to_json(),
            "width": width.to_json(),
            "collapsed": collapsed,
            "ok": ok,
        }));
    }

    // the two coordinate maps of the introduction, summing to the shift
    let one = WeightSeq::<S>::constant_one();
    let sum_mismatches = (1..=50)
        .filter(|&n| {
            let e = SparseVec::<S>::basis(n);
            &counterexample_a(&e) + &counterexample_b(&e) != apply_shift(&one, &e)
        })
        .count();
    let starts = XInfSampler {
        max_index: 30,
        max_nnz: 6,
        height: ic.height,
    };
    let mut confined = 0usize;
    let confinement_runs = ic.samples;
    for _ in 0..confinement_runs {
        let x = starts.sample::<Rational, _>(&mut rng);
        let rep = confinement_check(Variant::A, &convert::<S>(&x), 50).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        confined += usize::from(rep.certified);
    }
    violations += sum_mismatches + (confinement_runs - confined);

    let summary = format!(
        "isometry: {collapsed_count}/{} bracket(s) collapsed ({}), {} violation(s)",
        lambdas.len(),
        if unweighted { "collapse required" } else { "weighted, widths reported" },
        violations
    );
    let body = json!({
        "weights": weights_json(&w),
        "collapse_required": unweighted,
        "rows": rows,
        "collapsed": collapsed_count,
        "counterexamples": {
            "sum_equals_shift_mismatches": sum_mismatches,
            "basis_vectors_checked": 50,
            "confinement_runs": confinement_runs,
            "confinement_certified": confined,
            "orbit_powers": 50,
        },
        "violations": violations,
        "csv": "isometry.csv",
        "summary": summary,
    });
    let mut files = OutputSet::default();
    files.json("isometry_report.json", header(cfg, "isometry"), body);
    files.raw(
        "isometry.csv",
        table_csv(&["id", "depth", "lower", "upper", "width", "collapsed"], csv_rows),
    );
    Ok(Outcome {
        exit: pass_or_violation(violations == 0),
        files,
        messages: vec![summary],
    })
}

fn report(cfg: &RunConfig) -> Outcome {
    let mut all = Outcome::default();
    let mut codes = serde_json::Map::new();
    for cmd in [Command::Lemmas, Command::Criterion, Command::Witness, Command::Isometry] {
        let o = run(cmd, cfg);
        codes.insert(cmd.name().into(), json!(o.exit));
        all.exit = all.exit.max(o.exit);
        all.files.extend(o.files);
        all.messages.extend(o.messages);
    }
    let summary = format!("report: exit {}", all.exit);
    all.files.json(
        "report_summary.json",
        header(cfg, "report"),
        json!({ "exit_codes": codes, "exit": all.exit, "messages": all.messages, "summary": summary }),
    );
    all.messages.push(summary);
    all
}
