use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use covbound_core::covdeg::{
    any_curve_lower_bound, explicit_lower_bound, verify_certificate, BoundCertificate, CovdegError, Engine,
    MultiDegreeProblem, RuleConfig, DEFAULT_BUDGET,
};
use covbound_core::exact::{format_rational, parse_rational};
use covbound_core::separation::{
    default_c, default_delta, lemma54_threshold, theorem_b_bound, GonalityReport, SeparationError,
    ThresholdReport,
};
use covbound_core::snc_balance::{
    admissible_instances, check_labeling, enumerate_labelings, multiplicity_matching, BalanceError,
    Contracted, LabeledDualGraph, MatchingReport, Verdict,
};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cache::{MemoCache, CACHE_ENV};
use crate::document::{canonical_json, CertificateDocument};
use crate::graph_text::{format_graph, read_graph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn malformed(message: impl std::fmt::Display) -> Outcome {
        Outcome {
            code: EXIT_MALFORMED,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

#[derive(Parser)]
#[command(name = "covbound", version, about = "Certified lower bounds for covering degree and covering gonality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified lower bound on the covering degree
    Covdeg(CovdegArgs),
    /// Covering-gonality bound from point separation
    Gonality(GonalityArgs),
    /// Check, enumerate or convert dual-graph labelings
    #[command(subcommand)]
    Balance(BalanceCommand),
    /// Re-check a document emitted by this tool
    Verify {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Clone, Copy)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Leave wall-clock timing out so reruns are byte-identical
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Args)]
struct CovdegArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    dim: u32,
    #[arg(long)]
    codim: usize,
    /// Comma-separated degrees, each at least 1
    #[arg(long, value_delimiter = ',', num_args = 0.., value_parser = clap::value_parser!(u64).range(1..))]
    degrees: Vec<u64>,
    /// Maximum number of new memo entries
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Accept value 2 when the degrees sum to dim + codim
    #[arg(long)]
    assume_fano_floor: bool,
    /// Do not use the coprime-array exactness route
    #[arg(long)]
    no_exactness: bool,
    /// Exit 2 unless the bound equals the degree product
    #[arg(long)]
    require_exact: bool,
    /// Memo cache file
    #[arg(long, env = CACHE_ENV)]
    cache: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GonalityArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    dim: u32,
    #[arg(long)]
    codim: usize,
    #[arg(long, value_delimiter = ',', num_args = 0.., value_parser = clap::value_parser!(u64).range(1..))]
    degrees: Vec<u64>,
    /// Rational in (0, 1), as p/q
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: BigRational,
    /// Positive rational schedule perturbation
    #[arg(long, value_parser = parse_positive, default_value = "1/1000000")]
    delta: BigRational,
    /// Nonnegative rational perturbation budget
    #[arg(long, value_parser = parse_nonnegative, default_value = "1")]
    c: BigRational,
    /// Skip the threshold scan
    #[arg(long)]
    skip_threshold: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Subcommand)]
enum BalanceCommand {
    /// Check a labeled graph against the balancing conditions
    Check {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List all balanced labelings of a skeleton
    Enumerate {
        file: PathBuf,
        /// Total order n; defaults to the file's `order`
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        order: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        delta_max: u64,
        /// Also check multiplicity matching on every labeling
        #[arg(long)]
        matching: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rewrite a graph file in the other format
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Format,
    },
}

fn parse_epsilon(s: &str) -> Result<BigRational, String> {
    let q = parse_rational(s)?;
    if q <= BigRational::zero() || q >= BigRational::one() {
        return Err(format!("{s} is not in (0, 1)"));
    }
    Ok(q)
}

fn parse_positive(s: &str) -> Result<BigRational, String> {
    let q = parse_rational(s)?;
    if q <= BigRational::zero() {
        return Err(format!("{s} is not positive"));
    }
    Ok(q)
}

fn parse_nonnegative(s: &str) -> Result<BigRational, String> {
    let q = parse_rational(s)?;
    if q < BigRational::zero() {
        return Err(format!("{s} is negative"));
    }
    Ok(q)
}

/// A computed document before timing and formatting are applied.
struct Report {
    command: &'static str,
    problem: Value,
    result: Value,
    provenance: Value,
    text: String,
    code: i32,
    notes: Vec<String>,
}

enum Failure {
    Malformed(String),
    Exit(Outcome),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Malformed(e.to_string())
    }
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable")
}

fn from_value<T: for<'de> Deserialize<'de>>(value: &Value, what: &str) -> Result<T, String> {
    T::deserialize(value).map_err(|e| format!("invalid {what}: {e}"))
}

/// Runs the tool on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let invocation: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_MALFORMED,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };
    let start = Instant::now();
    let (report, output) = match cli.command {
        Command::Covdeg(a) => (covdeg(&a), a.output),
        Command::Gonality(a) => (gonality(&a), a.output),
        Command::Balance(BalanceCommand::Check { file, output }) => (balance_check(&file), output),
        Command::Balance(BalanceCommand::Enumerate {
            file,
            order,
            delta_max,
            matching,
            output,
        }) => (balance_enumerate(&file, order, delta_max, matching), output),
        Command::Balance(BalanceCommand::Convert { file, to }) => return convert(&file, to),
        Command::Verify { file, output } => (verify(&file), output),
    };
    let report = match report {
        Ok(r) => r,
        Err(Failure::Malformed(m)) => return Outcome::malformed(m),
        Err(Failure::Exit(o)) => return o,
    };
    let mut doc = CertificateDocument::new(
        report.command,
        &invocation,
        report.problem,
        report.result,
        report.provenance,
    );
    if !output.omit_timing {
        doc.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    let stdout = match output.format {
        Format::Json => doc.to_canonical_json(),
        Format::Text => report.text,
    };
    let stderr = report.notes.iter().map(|n| format!("note: {n}\n")).collect();
    Outcome {
        code: report.code,
        stdout,
        stderr,
    }
}

fn rule_config(a: &CovdegArgs) -> RuleConfig {
    RuleConfig {
        fano_floor: a.assume_fano_floor,
        exactness: !a.no_exactness,
    }
}

fn covdeg(a: &CovdegArgs) -> Result<Report, Failure> {
    if a.degrees.len() != a.codim {
        return Err(Failure::Malformed(format!(
            "--codim {} but {} degrees given",
            a.codim,
            a.degrees.len()
        )));
    }
    let problem = MultiDegreeProblem::new(a.dim, a.degrees.clone())?;
    let config = rule_config(a);
    let mut notes = Vec::new();
    let mut cache = match &a.cache {
        Some(path) => {
            let c = MemoCache::open(path)?;
            if let Some(why) = &c.ignored {
                notes.push(format!("ignoring cache contents: {why}"));
            }
            Some(c)
        }
        None => None,
    };
    let memo = cache.as_mut().map(|c| c.memo(config)).unwrap_or_default();
    let mut engine = Engine::with_memo(config, memo);
    let outcome = engine.certify(&problem, a.budget);
    if let Some(c) = cache.as_mut() {
        c.store(config, engine.memo())?;
    }
    let (cert, complete) = match outcome {
        Ok(cert) => (cert, true),
        Err(CovdegError::BudgetExhausted { partial, .. }) => (*partial, false),
        Err(e) => return Err(e.into()),
    };
    let (result, provenance) = covdeg_document(&problem, &cert, complete, config, a.budget);
    let exact = result["exact"] == Value::Bool(true);
    let code = if !complete {
        EXIT_BUDGET
    } else if a.require_exact && !exact {
        EXIT_FAILED
    } else {
        EXIT_OK
    };
    if !complete {
        notes.push(format!("budget {} exhausted; the printed bound is partial but sound", a.budget));
    }
    Ok(Report {
        command: "covdeg",
        problem: to_value(&problem),
        result,
        provenance,
        text: covdeg_text(&cert, complete, exact),
        code,
        notes,
    })
}

fn covdeg_document(
    problem: &MultiDegreeProblem,
    cert: &BoundCertificate,
    complete: bool,
    config: RuleConfig,
    budget: usize,
) -> (Value, Value) {
    let product = problem.degree_product();
    let mut rule_counts: BTreeMap<String, usize> = BTreeMap::new();
    for node in &cert.nodes {
        let name = to_value(&node.rule)["kind"].as_str().unwrap_or_default().to_string();
        *rule_counts.entry(name).or_default() += 1;
    }
    let result = json!({
        "value": cert.value().to_string(),
        "complete": complete,
        "exact": cert.value() == &product,
        "degree_product": product.to_string(),
        "explicit_lower_bound": explicit_lower_bound(problem).ok().map(|v| v.to_string()),
        "any_curve_lower_bound": any_curve_lower_bound(problem).ok().map(|v| v.to_string()),
        "certificate": to_value(cert),
    });
    let provenance = json!({
        "rule_config": to_value(&config),
        "budget": budget,
        "root_rule": cert.rule().to_string(),
        "depth": cert.depth(),
        "node_count": cert.nodes.len(),
        "rule_counts": rule_counts,
    });
    (result, provenance)
}

fn covdeg_text(cert: &BoundCertificate, complete: bool, exact: bool) -> String {
    let mut out = String::new();
    let status = match (complete, exact) {
        (_, true) => "exact",
        (true, false) => "lower bound",
        (false, false) => "partial lower bound, budget exhausted",
    };
    writeln!(out, "{} >= {} ({status})", cert.problem(), cert.value()).unwrap();
    let mut seen = vec![false; cert.nodes.len()];
    let mut stack = vec![(cert.root, 0usize)];
    while let Some((i, indent)) = stack.pop() {
        let node = &cert.nodes[i];
        let pad = "  ".repeat(indent);
        if seen[i] {
            writeln!(out, "{pad}{} = {} (shared)", node.problem, node.value).unwrap();
            continue;
        }
        seen[i] = true;
        writeln!(out, "{pad}{} = {} by {}", node.problem, node.value, node.rule).unwrap();
        for &c in node.children.iter().rev() {
            stack.push((c, indent + 1));
        }
    }
    out
}

#[derive(Serialize)]
struct Candidate {
    d1: u64,
    #[serde(with = "covbound_core::serde_big")]
    alpha: num_bigint::BigUint,
    #[serde(with = "covbound_core::serde_big")]
    bound: num_bigint::BigUint,
    feasible: bool,
}

/// Best bound over the choice of which degree plays `d_1`; ties keep the
/// larger `d_1`.
fn best_gonality(
    n: u32,
    degrees: &[u64],
    epsilon: &BigRational,
    delta: &BigRational,
    c: &BigRational,
) -> Result<(GonalityReport, u64, Vec<Candidate>), SeparationError> {
    let mut choices: Vec<u64> = degrees.to_vec();
    choices.sort_unstable_by(|a, b| b.cmp(a));
    choices.dedup();
    let mut best: Option<(GonalityReport, u64)> = None;
    let mut candidates = Vec::new();
    let mut last_err = None;
    for d1 in choices {
        let mut order = degrees.to_vec();
        let i = order.iter().position(|&d| d == d1).expect("choice comes from degrees");
        order.swap(0, i);
        match theorem_b_bound(n, &order, epsilon, delta, c) {
            Ok(report) => {
                candidates.push(Candidate {
                    d1,
                    alpha: report.alpha.clone(),
                    bound: report.bound.clone(),
                    feasible: report.schedule.feasible,
                });
                if best.as_ref().is_none_or(|(b, _)| report.bound > b.bound) {
                    best = Some((report, d1));
                }
            }
            Err(e @ SeparationError::HypothesisViolated { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    match best {
        Some((report, d1)) => Ok((report, d1, candidates)),
        None => Err(last_err.unwrap_or_else(|| {
            SeparationError::InvalidParameter("at least one degree is required".into())
        })),
    }
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct GonalityProblem {
    n: u32,
    r: usize,
    degrees: Vec<u64>,
    #[serde(with = "covbound_core::serde_big::rational")]
    epsilon: BigRational,
    #[serde(with = "covbound_core::serde_big::rational")]
    delta: BigRational,
    #[serde(with = "covbound_core::serde_big::rational")]
    c: BigRational,
    threshold: bool,
}

fn gonality_result(p: &GonalityProblem) -> Result<(Value, bool, String), Failure> {
    let (report, d1, candidates) = match best_gonality(p.n, &p.degrees, &p.epsilon, &p.delta, &p.c) {
        Ok(r) => r,
        Err(e @ SeparationError::InvalidParameter(_)) => return Err(e.into()),
        Err(e) => {
            return Err(Failure::Exit(Outcome {
                code: EXIT_FAILED,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }))
        }
    };
    let threshold: Option<ThresholdReport> = if p.threshold {
        Some(lemma54_threshold(p.n + 1, &p.epsilon, &p.c)?)
    } else {
        None
    };
    let feasible = report.schedule.feasible;
    let mut text = String::new();
    writeln!(
        text,
        "covering gonality >= {} (d1 = {d1}, alpha = {}, m = {}, {})",
        report.bound,
        report.alpha,
        report.schedule.m,
        if feasible { "feasible" } else { "infeasible" }
    )
    .unwrap();
    let a: Vec<String> = report.schedule.a.iter().map(format_rational).collect();
    writeln!(text, "schedule a = [{}], total + c < {d1}: {feasible}", a.join(", ")).unwrap();
    if let Some(t) = &threshold {
        writeln!(
            text,
            "threshold in dimension {}: d0_scan = {}, d0_closed = {}, certified = {}",
            t.n,
            t.d0_scan,
            t.d0_closed,
            t.certified()
        )
        .unwrap();
    }
    let result = json!({
        "bound": report.bound.to_string(),
        "feasible": feasible,
        "d1": d1,
        "alpha": report.alpha.to_string(),
        "achieved_ratio": format_rational(&report.achieved_ratio),
        "schedule": to_value(&report.schedule),
        "candidates": to_value(&candidates),
        "threshold": to_value(&threshold),
    });
    Ok((result, feasible, text))
}

fn gonality(a: &GonalityArgs) -> Result<Report, Failure> {
    if a.degrees.len() != a.codim {
        return Err(Failure::Malformed(format!(
            "--codim {} but {} degrees given",
            a.codim,
            a.degrees.len()
        )));
    }
    let problem = GonalityProblem {
        n: a.dim,
        r: a.codim,
        degrees: a.degrees.clone(),
        epsilon: a.epsilon.clone(),
        delta: a.delta.clone(),
        c: a.c.clone(),
        threshold: !a.skip_threshold,
    };
    let (result, feasible, text) = gonality_result(&problem)?;
    let mut notes = Vec::new();
    if !feasible {
        notes.push("no degree choice gives a feasible schedule; bound 0".into());
    }
    Ok(Report {
        command: "gonality",
        problem: to_value(&problem),
        result,
        provenance: json!({
            "separation_dimension": a.dim + 1,
            "defaults": {
                "delta": format_rational(&default_delta()),
                "c": format_rational(&default_c()),
            },
        }),
        text,
        code: if feasible { EXIT_OK } else { EXIT_FAILED },
        notes,
    })
}

fn load_graph(path: &Path) -> Result<LabeledDualGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(read_graph(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn balance_check(path: &Path) -> Result<Report, Failure> {
    let graph = load_graph(path)?;
    let verdict = check_labeling(&graph)?;
    let text = match &verdict.violation {
        None => "pass\n".to_string(),
        Some(v) => format!("fail: {v}\n"),
    };
    Ok(Report {
        command: "balance check",
        problem: json!({ "graph": to_value(&graph) }),
        result: json!({ "verdict": to_value(&verdict) }),
        provenance: json!({
            "checks": ["(ii) speed sum", "(i) support", "(iii) transport", "flag order sum", "regular flags"],
        }),
        code: if verdict.balanced { EXIT_OK } else { EXIT_FAILED },
        text,
        notes: Vec::new(),
    })
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct InstanceReport {
    contracted: Contracted,
    report: MatchingReport,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct LabelingMatching {
    labeling: usize,
    instances: Vec<InstanceReport>,
    skipped: usize,
    all_equal: bool,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct EnumerateResult {
    count: usize,
    labelings: Vec<LabeledDualGraph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matching: Option<Vec<LabelingMatching>>,
}

fn matching_for(labelings: &[LabeledDualGraph]) -> Result<Vec<LabelingMatching>, BalanceError> {
    labelings
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let (instances, skipped) = admissible_instances(g)?;
            let instances = instances
                .into_iter()
                .map(|inst| {
                    Ok(InstanceReport {
                        report: multiplicity_matching(&inst)?,
                        contracted: inst.contracted,
                    })
                })
                .collect::<Result<Vec<_>, BalanceError>>()?;
            Ok(LabelingMatching {
                labeling: i,
                all_equal: instances.iter().all(|x| x.report.equal),
                instances,
                skipped,
            })
        })
        .collect()
}

fn enumerate_result(skeleton: &LabeledDualGraph, n: u64, delta_max: u64, matching: bool) -> Result<EnumerateResult, BalanceError> {
    let labelings = enumerate_labelings(skeleton, n, delta_max)?;
    let matching = if matching {
        if skeleton.components.len() != 2 {
            return Err(BalanceError::MalformedGraph(
                "matching needs exactly two components".into(),
            ));
        }
        Some(matching_for(&labelings)?)
    } else {
        None
    };
    Ok(EnumerateResult {
        count: labelings.len(),
        labelings,
        matching,
    })
}

fn balance_enumerate(path: &Path, order: Option<u64>, delta_max: u64, matching: bool) -> Result<Report, Failure> {
    let graph = load_graph(path)?;
    let n = order
        .or(graph.n)
        .ok_or_else(|| "no --order given and the file has no order".to_string())?;
    let skeleton = graph.skeleton();
    let result = enumerate_result(&skeleton, n, delta_max, matching)?;
    let all_equal = result
        .matching
        .as_ref()
        .is_none_or(|m| m.iter().all(|x| x.all_equal));
    let mut text = format!("{} labelings\n", result.count);
    for (i, g) in result.labelings.iter().enumerate() {
        let speeds: Vec<String> = g
            .vertices
            .iter()
            .map(|v| format!("{}={:?}", v.name, v.speeds.clone().unwrap_or_default()))
            .collect();
        let deltas: Vec<String> = g
            .edges
            .iter()
            .map(|e| format!("{}={}", e.name, e.delta.unwrap_or(0)))
            .collect();
        write!(text, "#{i}: speeds {} delta {}", speeds.join(" "), deltas.join(" ")).unwrap();
        if let Some(m) = &result.matching {
            write!(
                text,
                " matching {} ({} instances)",
                if m[i].all_equal { "equal" } else { "UNEQUAL" },
                m[i].instances.len()
            )
            .unwrap();
        }
        text.push('\n');
    }
    Ok(Report {
        command: "balance enumerate",
        problem: json!({ "skeleton": to_value(&skeleton), "n": n, "delta_max": delta_max }),
        result: to_value(&result),
        provenance: json!({
            "order": "speeds per vertex lexicographic, then delta per edge",
            "matching": matching,
        }),
        code: if all_equal { EXIT_OK } else { EXIT_FAILED },
        text,
        notes: Vec::new(),
    })
}

fn convert(path: &Path, to: Format) -> Outcome {
    let graph = match load_graph(path) {
        Ok(g) => g,
        Err(Failure::Malformed(m)) => return Outcome::malformed(m),
        Err(Failure::Exit(o)) => return o,
    };
    let stdout = match to {
        Format::Json => canonical_json(&to_value(&graph)),
        Format::Text => match format_graph(&graph) {
            Ok(t) => t,
            Err(e) => return Outcome::malformed(e),
        },
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

/// Independent re-check of an emitted document. `Ok(Err(reason))` means the
/// document is well-formed but wrong.
pub fn check_document(doc: &CertificateDocument) -> Result<Result<(), String>, String> {
    match doc.command.as_str() {
        "covdeg" => {
            let problem: MultiDegreeProblem = from_value(&doc.problem, "problem")?;
            let cert: BoundCertificate = from_value(&doc.result["certificate"], "certificate")?;
            let config: RuleConfig = from_value(&doc.provenance["rule_config"], "rule config")?;
            let complete: bool = from_value(&doc.result["complete"], "completeness flag")?;
            let budget: usize = from_value(&doc.provenance["budget"], "budget")?;
            if let Err(f) = verify_certificate(&cert, &config) {
                return Ok(Err(f.to_string()));
            }
            if cert.problem() != &problem {
                return Ok(Err(format!(
                    "certificate proves {} but the document states {problem}",
                    cert.problem()
                )));
            }
            let (result, provenance) = covdeg_document(&problem, &cert, complete, config, budget);
            if result != doc.result || provenance != doc.provenance {
                return Ok(Err("summary fields disagree with the certificate".into()));
            }
            Ok(Ok(()))
        }
        "gonality" => {
            let problem: GonalityProblem = from_value(&doc.problem, "problem")?;
            match gonality_result(&problem) {
                Ok((result, _, _)) if result == doc.result => Ok(Ok(())),
                Ok(_) => Ok(Err("recomputed schedule differs from the document".into())),
                Err(Failure::Malformed(m)) => Err(m),
                Err(Failure::Exit(o)) => Ok(Err(o.stderr.trim().to_string())),
            }
        }
        "balance check" => {
            let graph: LabeledDualGraph = from_value(&doc.problem["graph"], "graph")?;
            let claimed: Verdict = from_value(&doc.result["verdict"], "verdict")?;
            let actual = check_labeling(&graph).map_err(|e| e.to_string())?;
            if actual != claimed {
                return Ok(Err(format!(
                    "document says balanced = {}, recheck says {}",
                    claimed.balanced, actual.balanced
                )));
            }
            Ok(Ok(()))
        }
        "balance enumerate" => {
            let skeleton: LabeledDualGraph = from_value(&doc.problem["skeleton"], "skeleton")?;
            let n: u64 = from_value(&doc.problem["n"], "n")?;
            let delta_max: u64 = from_value(&doc.problem["delta_max"], "delta_max")?;
            let claimed: EnumerateResult = from_value(&doc.result, "enumeration")?;
            if claimed.count != claimed.labelings.len() {
                return Ok(Err("count does not match the listed labelings".into()));
            }
            for (i, g) in claimed.labelings.iter().enumerate() {
                if g.skeleton() != skeleton {
                    return Ok(Err(format!("labeling {i} is not a labeling of the skeleton")));
                }
                match check_labeling(g) {
                    Ok(v) if v.balanced => {}
                    Ok(v) => return Ok(Err(format!("labeling {i} fails: {}", v.violation.unwrap()))),
                    Err(e) => return Ok(Err(format!("labeling {i}: {e}"))),
                }
            }
            let actual = enumerate_result(&skeleton, n, delta_max, claimed.matching.is_some())
                .map_err(|e| e.to_string())?;
            if actual != claimed {
                return Ok(Err("the enumeration is incomplete or out of order".into()));
            }
            Ok(Ok(()))
        }
        other => Err(format!("cannot verify documents of command {other:?}")),
    }
}

fn verify(path: &Path) -> Result<Report, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc = CertificateDocument::from_json(&text)?;
    let verdict = check_document(&doc)?;
    let (accepted, reason) = match &verdict {
        Ok(()) => (true, None),
        Err(r) => (false, Some(r.clone())),
    };
    let text = match &reason {
        None => format!("accepted: {} document\n", doc.command),
        Some(r) => format!("rejected: {r}\n"),
    };
    Ok(Report {
        command: "verify",
        problem: json!({ "command": doc.command, "invocation": doc.invocation }),
        result: json!({ "accepted": accepted, "reason": reason }),
        provenance: json!({ "schema_version": doc.schema_version, "tool_version": doc.tool_version }),
        code: if accepted { EXIT_OK } else { EXIT_FAILED },
        text,
        notes: Vec::new(),
    })
}
