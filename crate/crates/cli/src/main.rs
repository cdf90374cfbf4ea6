//! `xsect` command-line front end.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on a bad configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use xsect::acceptance::{self, SuiteConfig, DEFAULT_SEED};
use xsect::branching::{min_covering_level, run_branching_cross, run_branching_t, SelectionRule};
use xsect::checks::{
    exhaustive_antichain_bound, exhaustive_cited_bounds, exhaustive_shade, randomized_check,
    Property,
};
use xsect::constructions::{construct, verify_construction, ConstructionName, ConstructionSpec};
use xsect::formulas::{eval, inequality_grid, FormulaId, Params};
use xsect::search::{maximize, Objective, SearchProblem};
use xsect::text::{format_family, member_strings, parse_families};
use xsect::transversal::{basis_pair, basis_t};
use xsect::{Family, Subset};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "xsect", version, about = "Intersection counts, constructions and searches for set families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Ground set size.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Uniformity.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Intersection threshold.
    #[arg(long, global = true)]
    t: Option<usize>,
    /// Formula id for `eval`.
    #[arg(long, global = true)]
    id: Option<String>,
    /// Construction name for `construct`, suite name for `check`.
    #[arg(long, global = true)]
    name: Option<String>,
    /// Search objective.
    #[arg(long, global = true)]
    objective: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Search node budget, randomized trial count, or number of random instances.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Extra parameter `key=value`; values may be ranges `a..b` for `eval`.
    #[arg(long = "param", global = true, value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named construction and verify its advertised property.
    Construct,
    /// Evaluate a closed form.
    Eval,
    /// Run an invariant suite: inequality-grid, oracle, branching, shade, or a property name.
    Check,
    /// Maximize an objective.
    Search,
    /// Run the branching process on bases (or saturated families) read from files.
    Branch {
        files: Vec<PathBuf>,
    },
    /// Run the full acceptance suite.
    VerifyAll,
}

/// Bad configuration (exit 2) or a library error.
struct ConfigError(String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

type CliResult<T> = Result<T, ConfigError>;

fn bad<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(ConfigError(msg.into()))
}

struct Report {
    json: Value,
    text: String,
    csv: Option<String>,
    passed: bool,
}

impl Report {
    fn new(json: Value, text: String, passed: bool) -> Self {
        Report {
            json,
            text,
            csv: None,
            passed,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common.clone();
    let outcome = run(&cli.command, &common).and_then(|r| emit(&r, &common).map(|_| r.passed));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(report: &Report, c: &Common) -> CliResult<()> {
    let body = match c.format {
        Format::Json => serde_json::to_string_pretty(&report.json)? + "\n",
        Format::Text => report.text.clone(),
        Format::Csv => match &report.csv {
            Some(csv) => csv.clone(),
            None => return bad("csv output is offered for eval and the inequality grid only"),
        },
    };
    match &c.output {
        Some(path) => fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn run(cmd: &Command, c: &Common) -> CliResult<Report> {
    let extra = parse_params(&c.params)?;
    match cmd {
        Command::Construct => run_construct(c, &extra),
        Command::Eval => run_eval(c, &extra),
        Command::Check => run_check(c, &extra),
        Command::Search => run_search(c, &extra),
        Command::Branch { files } => run_branch(c, &extra, files),
        Command::VerifyAll => run_verify_all(c),
    }
}

/// `key=value` pairs; the value is kept as text.
fn parse_params(raw: &[String]) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for p in raw {
        let Some((k, v)) = p.split_once('=') else {
            return bad(format!("--param expects key=value, got {p:?}"));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn param<T: FromStr>(extra: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>> {
    match extra.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .or_else(|_| bad(format!("bad value {v:?} for parameter {key}"))),
    }
}

fn flag(extra: &BTreeMap<String, String>, key: &str) -> bool {
    matches!(extra.get(key).map(String::as_str), Some("1" | "true" | "yes"))
}

fn need<T: Copy>(v: Option<T>, name: &str) -> CliResult<T> {
    v.map_or_else(|| bad(format!("--{name} is required")), Ok)
}

fn seed(c: &Common) -> u64 {
    c.seed.unwrap_or(DEFAULT_SEED)
}

/// Fields every JSON report starts with.
fn envelope(command: &str, c: &Common, params: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(VERSION));
    m.insert("params".into(), params);
    m.insert("seed".into(), json!(seed(c)));
    m
}

fn common_params(c: &Common, extra: &BTreeMap<String, String>) -> Value {
    let mut m = Map::new();
    for (key, v) in [("n", c.n), ("k", c.k), ("t", c.t)] {
        if let Some(v) = v {
            m.insert(key.into(), json!(v));
        }
    }
    for (key, v) in [("id", &c.id), ("name", &c.name), ("objective", &c.objective)] {
        if let Some(v) = v {
            m.insert(key.into(), json!(v));
        }
    }
    if let Some(b) = c.budget {
        m.insert("budget".into(), json!(b));
    }
    m.insert("workers".into(), json!(c.workers));
    for (key, v) in extra {
        m.insert(key.clone(), json!(v));
    }
    Value::Object(m)
}

fn parse_subset(text: &str) -> CliResult<Subset> {
    let mut elements = Vec::new();
    for tok in text.split(',').filter(|s| !s.is_empty()) {
        elements.push(tok.trim().parse::<usize>()?);
    }
    if elements.iter().any(|&e| e == 0 || e > 64) {
        return bad(format!("bad element in {text:?}"));
    }
    Ok(Subset::of(&elements))
}

fn run_construct(c: &Common, extra: &BTreeMap<String, String>) -> CliResult<Report> {
    let name: ConstructionName = c
        .name
        .as_deref()
        .map_or_else(|| bad("--name is required"), |s| s.parse().map_err(ConfigError::from))?;
    let mut spec = ConstructionSpec::new(name, need(c.n, "n")?);
    if let Some(k) = c.k {
        spec = spec.k(k);
    }
    if let Some(t) = c.t {
        spec = spec.t(t);
    }
    if let Some(ell) = param::<usize>(extra, "ell")? {
        spec = spec.ell(ell);
    }
    if let Some(center) = extra.get("center") {
        spec = spec.center(parse_subset(center)?);
    }
    if let Some(x) = extra.get("x") {
        spec = spec.x(parse_subset(x)?);
    }
    let built = construct(&spec)?;
    let report = verify_construction(&spec)?;
    let families: Vec<&Family> = built.families();
    let file: String = families.iter().map(|f| format_family(f)).collect();
    let mut m = envelope("construct", c, spec.params_json());
    m.insert("report".into(), report.to_json());
    m.insert(
        "families".into(),
        json!(families.iter().map(|f| member_strings(f)).collect::<Vec<_>>()),
    );
    m.insert("family_file".into(), json!(file));
    Ok(Report::new(Value::Object(m), file, report.passed))
}

/// Expands `a..b` (inclusive) and plain integers.
fn int_values(key: &str, v: &str) -> CliResult<Vec<i64>> {
    if let Some((a, b)) = v.split_once("..") {
        let a: i64 = a.parse().or_else(|_| bad(format!("bad range for {key}")))?;
        let b: i64 = b.parse().or_else(|_| bad(format!("bad range for {key}")))?;
        if b < a || b - a > 10_000 {
            return bad(format!("range for {key} is empty or too long"));
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![v.parse().or_else(|_| bad(format!("bad value {v:?} for {key}")))?])
    }
}

fn run_eval(c: &Common, extra: &BTreeMap<String, String>) -> CliResult<Report> {
    let id: FormulaId = c
        .id
        .as_deref()
        .map_or_else(|| bad("--id is required"), |s| s.parse().map_err(ConfigError::from))?;
    let mut axes: Vec<(String, Vec<i64>)> = Vec::new();
    for (key, v) in [("n", c.n), ("k", c.k), ("t", c.t)] {
        if let Some(v) = v {
            axes.push((key.to_string(), vec![v as i64]));
        }
    }
    for (key, v) in extra {
        axes.retain(|(k, _)| k != key);
        axes.push((key.clone(), int_values(key, v)?));
    }
    // Cartesian product over the axes.
    let mut rows: Vec<Vec<i64>> = vec![Vec::new()];
    for (_, values) in &axes {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                values.iter().map(move |&v| {
                    let mut r = r.clone();
                    r.push(v);
                    r
                })
            })
            .collect();
    }
    let keys: Vec<&str> = axes.iter().map(|(k, _)| k.as_str()).collect();
    let mut table = Vec::new();
    let mut csv = format!("id,{},value\n", keys.join(","));
    let mut text = String::new();
    for row in &rows {
        let mut params = Params::new();
        for (key, &v) in keys.iter().zip(row) {
            params.set(key, v)?;
        }
        let value = eval(id, &params)?;
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        csv.push_str(&format!("{id},{},{value}\n", cells.join(",")));
        text.push_str(&format!("{value}\n"));
        table.push(json!({"params": params.to_json(), "value": value.to_string()}));
    }
    let mut m = envelope("eval", c, common_params(c, extra));
    m.insert("id".into(), json!(id.name()));
    if table.len() == 1 {
        m.insert("value".into(), table[0]["value"].clone());
    } else {
        m.insert("rows".into(), Value::Array(table));
    }
    let mut r = Report::new(Value::Object(m), text, true);
    r.csv = Some(csv);
    Ok(r)
}

fn run_check(c: &Common, extra: &BTreeMap<String, String>) -> CliResult<Report> {
    let suite = need(c.name.as_deref(), "name")?;
    let params = common_params(c, extra);
    let mut m = envelope("check", c, params);
    m.insert("suite".into(), json!(suite));
    let cfg = SuiteConfig {
        seed: seed(c),
        workers: c.workers,
    };
    let criteria_report = |ids: &[usize], m: &mut Map<String, Value>| -> (bool, String) {
        let outs: Vec<_> = ids.iter().filter_map(|&i| acceptance::run_criterion(i, cfg)).collect();
        let passed = outs.iter().all(|o| o.passed);
        m.insert("results".into(), Value::Array(outs.iter().map(|o| o.to_json()).collect()));
        (passed, outs.iter().map(|o| o.line() + "\n").collect())
    };
    let (passed, text, csv) = match suite {
        "inequality-grid" => {
            let n_max = c.n.unwrap_or(200) as i64;
            let k_max = c.k.unwrap_or(20) as i64;
            let grid = inequality_grid(n_max, k_max);
            let mut csv = String::from("inequality,checked,out_of_domain,failures\n");
            let mut text = String::new();
            let mut rows = Vec::new();
            for (ineq, tally) in &grid {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    ineq.name(),
                    tally.checked,
                    tally.out_of_domain,
                    tally.failures.len()
                ));
                text.push_str(&format!(
                    "{}: {} checked, {} out of domain, {} failures\n",
                    ineq.name(),
                    tally.checked,
                    tally.out_of_domain,
                    tally.failures.len()
                ));
                rows.push(json!({
                    "inequality": ineq.name(),
                    "checked": tally.checked,
                    "out_of_domain": tally.out_of_domain,
                    "failures": tally.failures.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
                }));
            }
            m.insert("results".into(), Value::Array(rows));
            let passed = grid.iter().all(|(_, t)| t.failures.is_empty());
            (passed, text, Some(csv))
        }
        "oracle" => {
            let (p, t) = criteria_report(&[1, 2, 3, 4], &mut m);
            (p, t, None)
        }
        "branching" => {
            let (p, t) = criteria_report(&[6], &mut m);
            (p, t, None)
        }
        "shade" => {
            let r = exhaustive_shade(c.n.unwrap_or(5))?;
            m.insert("families".into(), json!(r.families));
            m.insert(
                "failure".into(),
                json!(r.failure.as_ref().map(member_strings)),
            );
            let passed = r.failure.is_none();
            let text = format!("{} families, shade check {}\n", r.families, verdict(passed));
            (passed, text, None)
        }
        other => {
            let property: Property = other
                .parse()
                .or_else(|_| bad(format!("unknown suite {other:?}")))?;
            let n = need(c.n, "n")?;
            let reports = if flag(extra, "exhaustive") {
                match property {
                    Property::AntichainIntersections => vec![exhaustive_antichain_bound(n)?],
                    Property::LayerMatching => {
                        return bad("prop21_nu_le4 is checked on random saturated pairs only")
                    }
                    _ => exhaustive_cited_bounds(n, need(c.k, "k")?)?
                        .into_iter()
                        .filter(|r| r.property == property)
                        .collect(),
                }
            } else {
                let trials = c.budget.unwrap_or(1_000);
                vec![randomized_check(property, n, c.k, trials, seed(c))?]
            };
            let passed = reports.iter().all(|r| r.passed);
            m.insert("results".into(), Value::Array(reports.iter().map(|r| r.to_json()).collect()));
            let text = reports
                .iter()
                .map(|r| {
                    format!(
                        "{}: {} checked, {}{}\n",
                        r.property,
                        r.checked,
                        verdict(r.passed),
                        r.counterexample.as_deref().map(|c| format!(" ({c})")).unwrap_or_default()
                    )
                })
                .collect();
            (passed, text, None)
        }
    };
    m.insert("passed".into(), json!(passed));
    let mut r = Report::new(Value::Object(m), text, passed);
    r.csv = csv;
    Ok(r)
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}

fn run_search(c: &Common, extra: &BTreeMap<String, String>) -> CliResult<Report> {
    let objective: Objective = c
        .objective
        .as_deref()
        .map_or_else(|| bad("--objective is required"), |s| s.parse().map_err(ConfigError::from))?;
    let mut p = SearchProblem::new(objective, need(c.n, "n")?)
        .seed(seed(c))
        .workers(c.workers)
        .symmetry_reduction(flag(extra, "symmetry"));
    if let Some(k) = c.k {
        p = p.k(k);
    }
    if let Some(t) = c.t {
        p = p.t(t);
    }
    if let Some(b) = c.budget {
        p = p.budget(b);
    }
    if flag(extra, "randomized") {
        p = p.randomized();
    }
    let result = maximize(&p)?;
    let mut m = envelope("search", c, common_params(c, extra));
    if let Value::Object(fields) = result.to_json() {
        m.extend(fields);
    }
    let text = format!(
        "{} = {} (exhaustive {}, {} nodes)\n",
        result.objective.name(),
        result.value,
        result.exhaustive,
        result.nodes_explored
    );
    Ok(Report::new(Value::Object(m), text, true))
}

fn run_branch(c: &Common, extra: &BTreeMap<String, String>, files: &[PathBuf]) -> CliResult<Report> {
    let mut families = Vec::new();
    for path in files {
        let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        families.extend(parse_families(&text)?);
    }
    let from_family = extra.get("input").map(String::as_str) == Some("family");
    let rule = match c.seed {
        Some(s) => SelectionRule::Random(s),
        None => SelectionRule::Deterministic,
    };
    let k = |fams: &[&Family]| -> CliResult<usize> {
        match c.k {
            Some(k) => Ok(k),
            None => fams
                .iter()
                .map(|f| f.declared_uniformity().unwrap_or(f.rank()))
                .max()
                .map_or_else(|| bad("--k is required"), Ok),
        }
    };
    let report = match families.as_slice() {
        [f, g] => {
            let kk = k(&[f, g])?;
            let (b1, b2) = if from_family { basis_pair(f, g)? } else { (f.clone(), g.clone()) };
            let r = match param(extra, "r")? {
                Some(r) => r,
                None => need(min_covering_level(&b1, 1), "param r (no covering level found)")?,
            };
            run_branching_cross(&b1, &b2, kk, r, rule)?
        }
        [f] => {
            let t = c.t.unwrap_or(1);
            let kk = k(&[f])?;
            let b = if from_family { basis_t(f, t)? } else { f.clone() };
            let r = match param(extra, "r")? {
                Some(r) => r,
                None => need(min_covering_level(&b, t), "param r (no covering level found)")?,
            };
            run_branching_t(&b, t, kk, r, rule)?
        }
        _ => return bad("branch expects one family (t-intersecting) or two (cross-intersecting)"),
    };
    let mut m = envelope("branch", c, common_params(c, extra));
    m.insert(
        "rule".into(),
        json!(if c.seed.is_some() { "random" } else { "deterministic" }),
    );
    m.insert("report".into(), report.to_json(flag(extra, "survivors")));
    let text = format!(
        "total weight {}, coverage {}, level sum {}: {}\n",
        xsect::branching::rational_string(&report.total_weight),
        report.coverage_ok,
        xsect::branching::rational_string(&report.inequality_lhs),
        verdict(report.passed())
    );
    Ok(Report::new(Value::Object(m), text, report.passed()))
}

fn run_verify_all(c: &Common) -> CliResult<Report> {
    let cfg = SuiteConfig {
        seed: seed(c),
        workers: c.workers,
    };
    let outcomes = acceptance::run_all(cfg);
    let passed = outcomes.iter().all(|o| o.passed);
    let mut m = envelope("verify-all", c, json!({"workers": c.workers}));
    m.insert("criteria".into(), Value::Array(outcomes.iter().map(|o| o.to_json()).collect()));
    m.insert("passed".into(), json!(passed));
    if let Some(first) = outcomes.iter().find(|o| !o.passed) {
        m.insert("first_failure".into(), json!(first.line()));
    }
    let text = outcomes.iter().map(|o| o.line() + "\n").collect();
    Ok(Report::new(Value::Object(m), text, passed))
}
