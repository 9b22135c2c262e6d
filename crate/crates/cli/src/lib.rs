//! Command-line front-end: one subcommand per pipeline stage.
//!
//! Exit codes: 0 success, 1 usage or I/O, 2 parse error, 3 semantic error (cycles,
//! floundering, bad labels, ...), 4 resource limit (depth, node budget, enumeration cap).

pub mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use semilog::compile::{circuit_to_text, export_dot, verify_sd_dnnf, VarOrder, DEFAULT_NODE_BUDGET};
use semilog::grounding::{ground_all_with, relevant_ground_program_with, SldConfig, DEFAULT_DEPTH_LIMIT};
use semilog::inference::{CompiledQuery, PipelineOptions, Query};
use semilog::learn::{
    neural_input_dims, train, ConstantModel, LogisticModel, LossKind, Mlp, ModelRegistry, NeuralModel, ParameterStore,
    TrainConfig, TrainingExample,
};
use semilog::measures::reduce_to_probabilistic;
use semilog::oracle::{enumerate_worlds, DEFAULT_WORLD_CAP};
use semilog::propositional::{clark_completion, to_dimacs};
use semilog::semirings::{
    BooleanSemiring, CountingSemiring, GradientSemiring, MaxPlusSemiring, MpeSemiring, ProbabilitySemiring,
    SemiringKind,
};
use semilog::syntax::{atom_to_string, parse_program, pretty_print, Program};
use semilog::{Error, ErrorClass};

use output::{count, emit_json, real, reals, table};

#[derive(Debug, Parser)]
#[command(
    name = "semilog",
    version,
    about = "Probabilistic logic programs: grounding, knowledge compilation and semiring inference"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for circuit evaluation.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Maximum SLD derivation depth.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH_LIMIT)]
    depth_limit: usize,
    /// Maximum number of circuit nodes.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    /// Output format (each subcommand has its own default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// More log output on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Order {
    First,
    MinDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LossArg {
    Ce,
    Mse,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a program and print it back in normal form.
    Parse { program: PathBuf },
    /// Print the ground program relevant to a query (or the whole grounding).
    Ground {
        program: PathBuf,
        #[arg(long)]
        query: Option<String>,
        /// Print Clark's completion instead of the ground rules.
        #[arg(long, conflicts_with = "dimacs")]
        completion: bool,
        /// Print the completion as DIMACS CNF.
        #[arg(long)]
        dimacs: bool,
    },
    /// Compile a query to an sd-DNNF circuit and report its size and properties.
    Compile {
        program: PathBuf,
        #[arg(long)]
        query: String,
        /// Print the circuit in Graphviz DOT (same as --format dot).
        #[arg(long)]
        dot: bool,
        /// Print the circuit in the line-based nnf text format.
        #[arg(long, conflicts_with = "dot")]
        nnf: bool,
        #[arg(long, value_enum, default_value_t = Order::First)]
        order: Order,
    },
    /// Evaluate a query under a semiring.
    Query {
        program: PathBuf,
        /// Query atom, possibly negated (`\+ a`) or non-ground.
        #[arg(long)]
        query: String,
        /// prob, mpe, bool, count, maxplus or gradient.
        #[arg(long, default_value = "prob")]
        semiring: String,
        /// Neural model for the gradient semiring: NAME=logistic|mlp[:SEED]|const:P.
        #[arg(long = "model", value_name = "NAME=SPEC")]
        models: Vec<String>,
    },
    /// Most probable explanation of a query.
    Mpe {
        program: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Enumerate the possible worlds with their probabilities.
    Worlds {
        program: PathBuf,
        /// Largest number of labeled facts to enumerate.
        #[arg(long, default_value_t = DEFAULT_WORLD_CAP)]
        cap: usize,
    },
    /// Learn fact probabilities and neural models from query targets.
    Learn {
        program: PathBuf,
        /// JSON lines, one `{"query": "...", "p": 0.9}` per line.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 20)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[arg(long, value_enum, default_value_t = LossArg::Ce)]
        loss: LossArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Neural model: NAME=logistic|mlp[:SEED]|const:P (default logistic).
        #[arg(long = "model", value_name = "NAME=SPEC")]
        models: Vec<String>,
        /// Recompile every query each epoch instead of reusing circuits.
        #[arg(long)]
        no_reuse: bool,
    },
}

/// Failures of a run, carrying the exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Engine(e) => e.class().exit_code(),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Engine(e) => {
                let stage = match e.class() {
                    ErrorClass::Parse => "parse error",
                    ErrorClass::Semantic => "error",
                    ErrorClass::Resource => "resource limit",
                };
                write!(f, "{stage}: {e}")
            }
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(f) => {
            let _ = writeln!(err, "{f}");
            f.code()
        }
    }
}

pub fn verbosity(args: &[String]) -> log::LevelFilter {
    let mut level = 0;
    for a in args.iter().skip(1) {
        if a == "--verbose" {
            level += 1;
        } else if a.starts_with('-') && !a.starts_with("--") && a[1..].chars().all(|c| c == 'v') {
            level += a.len() - 1;
        }
    }
    match level {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    }
}

fn load(path: &Path) -> Result<Program, Failure> {
    let src =
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_program(&src).map_err(Error::from)?)
}

fn parse_query(text: &str) -> Result<Query, Failure> {
    Ok(Query::parse(text).map_err(Error::from)?)
}

fn options(cli: &Cli) -> PipelineOptions {
    let mut o = PipelineOptions { jobs: cli.jobs, ..Default::default() };
    o.sld = SldConfig { depth_limit: cli.depth_limit };
    o.compile.node_budget = cli.node_budget;
    o
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(Failure::Usage(format!("--format {f:?} is not available here").to_lowercase()));
    }
    Ok(f)
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Parse { program } => {
            let p = load(program)?;
            match format_or(cli, Format::Text, &[Format::Text, Format::Json])? {
                Format::Json => Ok(emit_json(&json!({
                    "distributions": p.distributions.len(),
                    "facts": p.facts.len(),
                    "program": pretty_print(&p),
                    "rules": p.rules.len() + p.annotated_rules.len(),
                })) + "\n"),
                _ => Ok(pretty_print(&p)),
            }
        }
        Command::Ground { program, query, completion, dimacs } => {
            let p = load(program)?;
            let sld = SldConfig { depth_limit: cli.depth_limit };
            let gp = match query {
                Some(q) => relevant_ground_program_with(&p, &[parse_query(q)?.atom], &sld).map_err(Error::from)?,
                None => ground_all_with(&p, &sld).map_err(Error::from)?,
            };
            format_or(cli, Format::Text, &[Format::Text])?;
            if *completion || *dimacs {
                let t = clark_completion(&gp).map_err(Error::from)?;
                return Ok(if *dimacs { to_dimacs(&t) } else { t.to_text() });
            }
            Ok(pretty_print(&gp.to_program()))
        }
        Command::Compile { program, query, dot, nnf, order } => {
            let p = load(program)?;
            let mut o = options(cli);
            o.compile.order = match order {
                Order::First => VarOrder::FirstAppearance,
                Order::MinDegree => VarOrder::MinDegree,
            };
            let c = CompiledQuery::compile(&p, &parse_query(query)?, &o)?;
            if *nnf {
                return Ok(circuit_to_text(&c.circuit));
            }
            let default = if *dot { Format::Dot } else { Format::Json };
            match format_or(cli, default, &[Format::Json, Format::Text, Format::Dot])? {
                Format::Dot => Ok(export_dot(&c.circuit)),
                f => {
                    let r = verify_sd_dnnf(&c.circuit);
                    let v = json!({
                        "query": c.query.to_string(),
                        "nodes": c.circuit.node_count(),
                        "edges": c.circuit.edge_count(),
                        "variables": c.theory.num_vars(),
                        "smooth": r.smooth,
                        "deterministic": r.deterministic,
                        "decomposable": r.decomposable,
                    });
                    Ok(render(f, &v, || {
                        format!(
                            "nodes {}\nedges {}\nvariables {}\nsmooth {}\ndeterministic {}\ndecomposable {}\n",
                            c.circuit.node_count(),
                            c.circuit.edge_count(),
                            c.theory.num_vars(),
                            r.smooth,
                            r.deterministic,
                            r.decomposable
                        )
                    }))
                }
            }
        }
        Command::Query { program, query, semiring, models } => {
            let p = load(program)?;
            let kind: SemiringKind =
                semiring.parse().map_err(|e: semilog::semirings::SemiringError| Failure::Usage(e.to_string()))?;
            let f = format_or(cli, Format::Json, &[Format::Json, Format::Text])?;
            let c = CompiledQuery::compile(&p, &parse_query(query)?, &options(cli))?;
            query_output(&c, kind, models, f)
        }
        Command::Mpe { program, query } => {
            let p = load(program)?;
            let f = format_or(cli, Format::Json, &[Format::Json, Format::Text])?;
            let c = CompiledQuery::compile(&p, &parse_query(query)?, &options(cli))?;
            let answers = c.mpe(&c.static_labels()?)?;
            let rows: Vec<(String, Value)> = answers
                .iter()
                .map(|a| {
                    let lits: Vec<Value> = a
                        .explanation
                        .iter()
                        .map(|(atom, sign)| {
                            Value::String(format!("{}{}", if *sign { "" } else { "\\+ " }, atom_to_string(atom)))
                        })
                        .collect();
                    (atom_to_string(&a.answer), json!({ "value": real(a.probability), "explanation": lits }))
                })
                .collect();
            Ok(render(f, &answers_json(&c, rows.clone()), || {
                rows.iter()
                    .map(|(a, v)| format!("{a}: {} [{}]\n", text_value(&v["value"]), join_strings(&v["explanation"])))
                    .collect()
            }))
        }
        Command::Worlds { program, cap } => {
            let p = load(program)?;
            let f = format_or(cli, Format::Text, &[Format::Json, Format::Text])?;
            let p = if p.has_measure_facts() { reduce_to_probabilistic(&p).map_err(Error::from)? } else { p };
            let gp = ground_all_with(&p, &SldConfig { depth_limit: cli.depth_limit }).map_err(Error::from)?;
            let worlds = enumerate_worlds(&gp, *cap).map_err(Error::from)?;
            let facts: Vec<String> = gp.labeled_facts().map(|f| atom_to_string(&f.atom)).collect();
            let total: f64 = worlds.iter().map(|w| w.probability).sum();
            let names = |atoms: &mut dyn Iterator<Item = &semilog::syntax::Atom>| -> Vec<String> {
                atoms.map(atom_to_string).collect()
            };
            let v = json!({
                "facts": facts,
                "total": real(total),
                "worlds": worlds.iter().map(|w| json!({
                    "chosen": names(&mut w.chosen_facts.iter()),
                    "entailed": names(&mut w.entailed.iter()),
                    "probability": real(w.probability),
                })).collect::<Vec<_>>(),
            });
            Ok(render(f, &v, || {
                let mut rows = vec![{
                    let mut h = vec!["world".to_string()];
                    h.extend(facts.iter().cloned());
                    h.push("entailed".into());
                    h.push("probability".into());
                    h
                }];
                for (i, w) in worlds.iter().enumerate() {
                    let mut r = vec![(i + 1).to_string()];
                    r.extend(w.chosen.iter().map(|c| if *c { "T" } else { "F" }.to_string()));
                    r.push(format!("{{{}}}", names(&mut w.entailed.iter()).join(", ")));
                    r.push(text_value(&real(w.probability)));
                    rows.push(r);
                }
                let mut s = table(&rows);
                s.push_str(&format!("total {}\n", text_value(&real(total))));
                s
            }))
        }
        Command::Learn { program, data, lr, epochs, batch, loss, seed, models, no_reuse } => {
            let p = load(program)?;
            let f = format_or(cli, Format::Json, &[Format::Json, Format::Text])?;
            let examples = load_dataset(data)?;
            let reduced = if p.has_measure_facts() { reduce_to_probabilistic(&p).map_err(Error::from)? } else { p };
            let registry = build_models(&reduced, models)?;
            let config = TrainConfig {
                lr: *lr,
                epochs: *epochs,
                batch_size: *batch,
                loss: match loss {
                    LossArg::Ce => LossKind::CrossEntropy,
                    LossArg::Mse => LossKind::Squared,
                },
                seed: *seed,
                reuse_circuits: !*no_reuse,
                pipeline: options(cli),
            };
            let report = train(&reduced, registry, &examples, &config)?;
            let store = &report.store;
            let params: Vec<Value> = store
                .slot_names()
                .into_iter()
                .enumerate()
                .map(|(i, name)| json!({ "slot": name, "value": real(store.slot_value(i)) }))
                .collect();
            let model_params: BTreeMap<&str, Value> = store
                .models()
                .iter()
                .map(|(name, m)| (name, json!({ "kind": m.kind(), "params": reals(m.params()) })))
                .collect();
            let v = json!({
                "loss": reals(&report.loss_trace),
                "parameters": params,
                "models": model_params,
                "compilations": report.compilations,
            });
            Ok(render(f, &v, || {
                let mut s = String::new();
                for (i, l) in report.loss_trace.iter().enumerate() {
                    s.push_str(&format!("epoch {} loss {}\n", i + 1, text_value(&real(*l))));
                }
                for (i, name) in store.slot_names().iter().enumerate() {
                    s.push_str(&format!("{name} = {}\n", text_value(&real(store.slot_value(i)))));
                }
                s
            }))
        }
    }
}

fn render(f: Format, v: &Value, text: impl FnOnce() -> String) -> String {
    match f {
        Format::Text => text(),
        _ => emit_json(v) + "\n",
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn join_strings(v: &Value) -> String {
    v.as_array().map(|a| a.iter().map(text_value).collect::<Vec<_>>().join(", ")).unwrap_or_default()
}

/// `{"query": q, ...fields}` for a single ground answer, `{"query": q, "answers": [...]}`
/// otherwise.
fn answers_json(c: &CompiledQuery, rows: Vec<(String, Value)>) -> Value {
    let single = c.query.atom.is_ground() && rows.len() == 1;
    let mut obj = serde_json::Map::new();
    obj.insert("query".into(), Value::String(c.query.to_string()));
    if single {
        let (_, v) = rows.into_iter().next().expect("one row");
        if let Value::Object(fields) = v {
            obj.extend(fields);
        }
    } else {
        let answers = rows
            .into_iter()
            .map(|(atom, v)| {
                let mut m = serde_json::Map::new();
                m.insert("atom".into(), Value::String(atom));
                if let Value::Object(fields) = v {
                    m.extend(fields);
                }
                Value::Object(m)
            })
            .collect();
        obj.insert("answers".into(), Value::Array(answers));
    }
    Value::Object(obj)
}

fn query_output(c: &CompiledQuery, kind: SemiringKind, models: &[String], f: Format) -> Result<String, Failure> {
    let labels = || c.static_labels();
    let rows: Vec<(String, Value)> = match kind {
        SemiringKind::Probability => {
            wrap(c.evaluate(&ProbabilitySemiring, &labels()?)?, |v| json!({ "value": real(v) }))
        }
        SemiringKind::Mpe => wrap(c.evaluate(&MpeSemiring, &labels()?)?, |v| json!({ "value": real(v) })),
        SemiringKind::MaxPlus => wrap(c.evaluate(&MaxPlusSemiring, &labels()?)?, |v| json!({ "value": real(v) })),
        SemiringKind::Boolean => wrap(c.evaluate(&BooleanSemiring, &labels()?)?, |v| json!({ "value": v })),
        SemiringKind::Counting => wrap(c.evaluate(&CountingSemiring, &labels()?)?, |v| json!({ "value": count(v) })),
        SemiringKind::Gradient => {
            let store = ParameterStore::new(&c.program, build_models(&c.program, models)?)?;
            let labels = c.labels_with(|f| store.resolve(f))?;
            let names = store.slot_names();
            wrap(
                c.evaluate(&GradientSemiring::new(store.num_slots()), &labels)?,
                |v| json!({ "value": real(v.p), "gradient": reals(&v.grad), "slots": names }),
            )
        }
    };
    let text = || {
        rows.iter()
            .map(|(a, v)| {
                let mut line = format!("{a}: {}", text_value(&v["value"]));
                if let Some(g) = v.get("gradient") {
                    line.push_str(&format!(" [{}]", join_strings(g)));
                }
                line + "\n"
            })
            .collect()
    };
    Ok(render(f, &answers_json(c, rows.clone()), text))
}

fn wrap<V>(values: Vec<(semilog::syntax::Atom, V)>, f: impl Fn(V) -> Value) -> Vec<(String, Value)> {
    values.into_iter().map(|(a, v)| (atom_to_string(&a), f(v))).collect()
}

/// Models named on the command line; every other model of the program gets a zero-weight
/// logistic regression.
fn build_models(p: &Program, specs: &[String]) -> Result<ModelRegistry, Failure> {
    let dims = neural_input_dims(p);
    let mut reg = ModelRegistry::new();
    for spec in specs {
        let (name, kind) =
            spec.split_once('=').ok_or_else(|| Failure::Usage(format!("model spec `{spec}` is not NAME=SPEC")))?;
        let dim = *dims
            .get(name)
            .ok_or_else(|| Failure::Usage(format!("the program has no neural facts for model `{name}`")))?;
        let bad = || Failure::Usage(format!("unknown model spec `{kind}` (expected logistic, mlp[:SEED] or const:P)"));
        let model: Box<dyn NeuralModel> = match kind.split_once(':') {
            None if kind == "logistic" => Box::new(LogisticModel::zeros(dim)),
            None if kind == "mlp" => Box::new(Mlp::new(dim, 0)),
            Some(("mlp", seed)) => Box::new(Mlp::new(dim, seed.parse().map_err(|_| bad())?)),
            Some(("const", p)) => {
                let p: f64 = p.parse().map_err(|_| bad())?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(Failure::Usage(format!("constant model output {p} must lie in (0, 1)")));
                }
                Box::new(ConstantModel { output: p })
            }
            _ => return Err(bad()),
        };
        reg.insert(name, model);
    }
    Ok(reg)
}

#[derive(Debug, Deserialize)]
struct DataRow {
    query: String,
    p: f64,
}

fn load_dataset(path: &Path) -> Result<Vec<TrainingExample>, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: DataRow =
            serde_json::from_str(line).map_err(|e| Failure::Usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(TrainingExample { query: parse_query(&row.query)?, target: row.p });
    }
    Ok(out)
}
