//! The `minproc` command-line tool.
//!
//! ```text
//! minproc build  --kind benevolent --r 4 [--depth 2] [--format json|dot] [--out FILE]
//! minproc run    [GRAPH | --kind K ...] --model B [--seed S] [--p P] [--max-steps N] [--audit] [--out TRACE]
//! minproc verify [GRAPH | --kind K ...] --suite all [--out REPORT]
//! minproc replay GRAPH TRACE
//! minproc stats  --r 2,4,8,16 [--depth D] [--out FILE.csv]
//! ```
//!
//! Exit codes: 0 stable (or success), 1 usage or input error, 2 step limit
//! reached, 3 cycle detected, 4 invariant violation.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::audit::{audit, InvariantObserver, Suite};
use crate::constructions::{build_adversarial, build_recursive, instance_report, InstanceReport};
use crate::engine::{run_observed, Model, Observer, Outcome, PolicyKind, RunLimits, ScheduleModel, StepEvent};
use crate::gadgets::{extend_colors, Role};
use crate::graph::Graph;
use crate::io::{read_trace, verify_trace, write_dot, write_schedule, write_trace, GraphFile, GraphMeta, TraceHeader};
use crate::state::DynamicState;
use crate::stats::{growth_slope, growth_table, write_csv};

/// Exit code: stable run or successful command.
pub const EXIT_OK: i32 = 0;
/// Exit code: bad arguments or unreadable input.
pub const EXIT_USAGE: i32 = 1;
/// Exit code: the step limit was reached.
pub const EXIT_STEP_LIMIT: i32 = 2;
/// Exit code: a cycle was detected.
pub const EXIT_CYCLE: i32 = 3;
/// Exit code: an invariant was violated.
pub const EXIT_INVARIANT: i32 = 4;

/// Minority processes: build constructions, run scheduler models, audit invariants.
#[derive(Debug, Parser)]
#[command(name = "minproc", version)]
pub struct Cli {
    /// What to do.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a construction and write it as JSON or DOT.
    Build(BuildArgs),
    /// Run a scheduler model to stabilization.
    Run(RunArgs),
    /// Run audit suites during a model-B run.
    Verify(VerifyArgs),
    /// Replay a trace file and check its footer.
    Replay(ReplayArgs),
    /// Growth table of the benevolent family with its log-log slope.
    Stats(StatsArgs),
}

/// Construction families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Quadratic family for model A, with its schedule.
    Adversarial,
    /// Family driven by rechargeable relays.
    Benevolent,
    /// The benevolent family with reusable recharging systems.
    Recursive,
    /// Two adjacent nodes of the same color.
    Pair,
}

/// Graph output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Canonical JSON graph file.
    Json,
    /// Graphviz DOT.
    Dot,
}

/// Node-choice policies for models A–D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Smallest switchable id.
    Lowest,
    /// Largest switchable id.
    Highest,
    /// Uniform over switchable nodes, seeded by `--seed`.
    Uniform,
    /// Greedy maximal independent set.
    Maximal,
    /// All switchable nodes.
    All,
}

/// Where the graph comes from: a file, or a construction built on the fly.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Graph file; when absent, `--kind` selects a construction.
    pub graph: Option<PathBuf>,
    /// Construction family.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Group size of the adversarial family.
    #[arg(long)]
    pub m: Option<u32>,
    /// Parameter r (even) of the benevolent family.
    #[arg(long)]
    pub r: Option<u32>,
    /// Number of recharging levels.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Extend the palette to this many colors (at least 3).
    #[arg(long)]
    pub colors: Option<u8>,
}

/// Arguments of `build`.
#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    source: Source,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file (default: stdout). For the adversarial family the
    /// schedule goes to `FILE.schedule.ndjson`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the instance report instead of the graph.
    #[arg(long)]
    report: bool,
}

/// Arguments of `run`.
#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Scheduler model.
    #[arg(long, default_value = "B")]
    model: char,
    /// Node-choice policy for models A–D (default: lowest for A and B,
    /// maximal for C, all for D).
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    /// Switch probability for model G.
    #[arg(long)]
    p: Option<f64>,
    /// RNG seed for models F, G and the uniform policy.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step limit.
    #[arg(long, default_value_t = 1_000_000_000)]
    max_steps: u64,
    /// States remembered for cycle detection (models D, E, G).
    #[arg(long, default_value_t = 2)]
    window: usize,
    /// Check invariants after every step.
    #[arg(long)]
    audit: bool,
    /// Write the trace to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Arguments of `verify`.
#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Audit suite.
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Step limit of the audited runs.
    #[arg(long, default_value_t = 1_000_000_000)]
    max_steps: u64,
    /// Write the report to this file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Arguments of `replay`.
#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Graph file.
    graph: PathBuf,
    /// Trace file.
    trace: PathBuf,
}

/// Arguments of `stats`.
#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Values of r, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<u32>,
    /// Number of recharging levels.
    #[arg(long, default_value_t = 1)]
    depth: u32,
    /// CSV output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    /// Exit code.
    pub code: i32,
    /// Message for stderr.
    pub message: String,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Runs a parsed command; returns the exit code.
pub fn execute(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

/// A loaded or built graph with what is known about it.
pub struct Loaded {
    /// The graph.
    pub graph: Graph,
    /// Node roles, when known.
    pub roles: Option<Vec<Role>>,
    /// Construction metadata.
    pub meta: GraphMeta,
    /// Instance report (built graphs only).
    pub report: Option<InstanceReport>,
    /// Schedule (adversarial family only).
    pub schedule: Option<Vec<Vec<u32>>>,
    /// Warnings from the builder.
    pub warnings: Vec<String>,
}

/// Loads the graph described by `src`.
pub fn load(src: &Source) -> Result<Loaded, Failure> {
    let mut loaded = match (&src.graph, src.kind) {
        (Some(_), Some(_)) => return Err(usage("give either a graph file or --kind, not both")),
        (None, None) => return Err(usage("give a graph file or --kind")),
        (Some(path), None) => {
            let file = GraphFile::read_from(BufReader::new(File::open(path).map_err(usage)?)).map_err(usage)?;
            Loaded {
                graph: file.to_graph().map_err(usage)?,
                roles: Some(file.roles()),
                meta: file.metadata,
                report: None,
                schedule: None,
                warnings: Vec::new(),
            }
        }
        (None, Some(kind)) => build_kind(kind, src)?,
    };
    if let Some(k) = src.colors {
        loaded.graph = extend_colors(&loaded.graph, k).map_err(usage)?;
        if let Some(roles) = &mut loaded.roles {
            roles.resize(loaded.graph.node_count(), Role::ColorExtension);
        }
        loaded.meta.params.insert("colors".into(), k as u64);
        loaded.report = None;
    }
    Ok(loaded)
}

fn build_kind(kind: Kind, src: &Source) -> Result<Loaded, Failure> {
    let need = |v: Option<u32>, flag: &str| v.ok_or_else(|| usage(format!("--kind {kind:?} needs --{flag}")));
    match kind {
        Kind::Adversarial => {
            let m = need(src.m, "m")?;
            let inst = build_adversarial(m).map_err(usage)?;
            let params = [("m", m as u64)];
            Ok(Loaded {
                report: Some(instance_report("adversarial", &params, &inst.built)),
                meta: meta("adversarial", &params),
                graph: inst.built.graph,
                roles: Some(inst.built.roles),
                schedule: Some(inst.schedule),
                warnings: Vec::new(),
            })
        }
        Kind::Benevolent | Kind::Recursive => {
            let r = need(src.r, "r")?;
            let depth = match kind {
                Kind::Benevolent => {
                    if src.depth.is_some_and(|d| d != 1) {
                        return Err(usage("--kind benevolent has depth 1; use --kind recursive"));
                    }
                    1
                }
                _ => src.depth.unwrap_or(2),
            };
            let inst = build_recursive(r, depth).map_err(usage)?;
            // Depth 1 is the same graph under either name.
            let name = if inst.depth == 1 { "benevolent" } else { "recursive" };
            let params = [("depth", inst.depth as u64), ("m", inst.m as u64), ("r", r as u64)];
            Ok(Loaded {
                report: Some(instance_report(name, &params, &inst.built)),
                meta: meta(name, &params),
                graph: inst.built.graph,
                roles: Some(inst.built.roles),
                schedule: None,
                warnings: inst.warnings,
            })
        }
        Kind::Pair => {
            let graph = Graph::from_edges(vec![0, 0], vec![false, false], vec![[0, 0]; 2], &[(0, 1)], 2)
                .map_err(usage)?;
            Ok(Loaded {
                graph,
                roles: None,
                meta: meta("pair", &[]),
                report: None,
                schedule: None,
                warnings: Vec::new(),
            })
        }
    }
}

fn meta(kind: &str, params: &[(&str, u64)]) -> GraphMeta {
    GraphMeta {
        kind: kind.to_string(),
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(usage)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), Failure> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(usage)?;
    writeln!(w).map_err(usage)?;
    w.flush().map_err(usage)
}

fn cmd_build(a: &BuildArgs) -> Result<i32, Failure> {
    let loaded = load(&a.source)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    if a.report {
        let report = loaded
            .report
            .as_ref()
            .ok_or_else(|| usage("a report is available for built constructions only"))?;
        write_json(a.out.as_deref(), report)?;
        return Ok(EXIT_OK);
    }
    let mut w = output(a.out.as_deref())?;
    match a.format {
        Format::Json => GraphFile::from_graph(&loaded.graph, loaded.roles.as_deref(), loaded.meta.clone())
            .write_to(&mut w)
            .map_err(usage)?,
        Format::Dot => write_dot(&mut w, &loaded.graph, loaded.roles.as_deref()).map_err(usage)?,
    }
    w.flush().map_err(usage)?;
    if let (Some(schedule), Some(out)) = (&loaded.schedule, &a.out) {
        let mut path = out.clone().into_os_string();
        path.push(".schedule.ndjson");
        let mut sw = output(Some(Path::new(&path)))?;
        write_schedule(&mut sw, schedule.iter().map(Vec::as_slice)).map_err(usage)?;
        sw.flush().map_err(usage)?;
    }
    Ok(EXIT_OK)
}

/// Parses a model letter and its options into a schedule.
pub fn schedule_from_args(
    letter: char,
    policy: Option<PolicyArg>,
    p: Option<f64>,
    seed: u64,
) -> Result<ScheduleModel, String> {
    let model = Model::from_letter(letter.to_ascii_uppercase()).ok_or_else(|| format!("unknown model {letter:?}"))?;
    let mut schedule = ScheduleModel::default_for(model, seed);
    if let Some(policy) = policy {
        if schedule.policy.is_none() {
            return Err(format!("model {} takes no policy", model.letter()));
        }
        schedule.policy = Some(match policy {
            PolicyArg::Lowest => PolicyKind::LowestId,
            PolicyArg::Highest => PolicyKind::HighestId,
            PolicyArg::Uniform => PolicyKind::SeededUniform(seed),
            PolicyArg::Maximal => PolicyKind::MaximalIndependent,
            PolicyArg::All => PolicyKind::AllSwitchable,
        });
    }
    if let Some(p) = p {
        if model != Model::G {
            return Err("--p applies to model G only".into());
        }
        schedule.p = Some(p);
    }
    schedule.validate().map_err(|e| e.to_string())?;
    Ok(schedule)
}

/// Summary printed by `run`.
#[derive(Debug, Serialize)]
struct RunSummary {
    model: char,
    nodes: usize,
    outcome: Outcome,
    step_count: u64,
    switch_count: u64,
    ties: u64,
    audit_passed: Option<bool>,
}

struct MaybeAudit(Option<InvariantObserver>);

impl Observer for MaybeAudit {
    fn wants_frontier(&self) -> bool {
        self.0.as_ref().is_some_and(|o| o.wants_frontier())
    }

    fn on_start(&mut self, g: &Graph, s: &DynamicState, frontier: &[u32]) {
        if let Some(o) = &mut self.0 {
            o.on_start(g, s, frontier);
        }
    }

    fn on_step(&mut self, e: &StepEvent<'_>) {
        if let Some(o) = &mut self.0 {
            o.on_step(e);
        }
    }
}

fn cmd_run(a: &RunArgs) -> Result<i32, Failure> {
    let schedule = schedule_from_args(a.model, a.policy, a.p, a.seed).map_err(usage)?;
    let loaded = load(&a.source)?;
    let g = &loaded.graph;
    let limits = RunLimits {
        max_steps: a.max_steps,
        cycle_detection: true,
        state_fingerprint_window: a.window,
        record_steps: a.out.is_some(),
    };
    let mut observer = MaybeAudit(a.audit.then(|| InvariantObserver::new(g, crate::audit::twin_classes(g))));
    let res = run_observed(g, DynamicState::initial(g), &schedule, &limits, &mut observer).map_err(usage)?;
    if let Some(path) = &a.out {
        let mut w = output(Some(path))?;
        write_trace(&mut w, &TraceHeader::new(g, schedule, limits), &res.trace).map_err(usage)?;
        w.flush().map_err(usage)?;
    }
    let checks = observer.0.map(InvariantObserver::into_checks);
    let audit_passed = checks.as_ref().map(|c| c.iter().all(|c| c.passed));
    if let Some(failed) = checks.iter().flatten().find(|c| !c.passed) {
        eprintln!("invariant {} violated: {:?}", failed.name, failed.counterexample);
    }
    let summary = RunSummary {
        model: schedule.model.letter(),
        nodes: g.unpinned_count(),
        outcome: res.trace.outcome,
        step_count: res.trace.step_count,
        switch_count: res.trace.switch_count,
        ties: res.trace.ties,
        audit_passed,
    };
    println!("{}", serde_json::to_string(&summary).map_err(usage)?);
    Ok(if audit_passed == Some(false) {
        EXIT_INVARIANT
    } else {
        outcome_code(res.trace.outcome)
    })
}

/// Exit code for a run outcome.
pub fn outcome_code(o: Outcome) -> i32 {
    match o {
        Outcome::Stable => EXIT_OK,
        Outcome::StepLimit | Outcome::Unfinished => EXIT_STEP_LIMIT,
        Outcome::Cycle { .. } => EXIT_CYCLE,
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32, Failure> {
    let loaded = load(&a.source)?;
    let limits = RunLimits {
        max_steps: a.max_steps,
        ..RunLimits::default()
    };
    let report = audit(&loaded.graph, a.suite, &limits).map_err(usage)?;
    write_json(a.out.as_deref(), &report)?;
    if let Some(f) = report.first_failure() {
        eprintln!("invariant {} violated: {:?}", f.name, f.counterexample);
        return Ok(EXIT_INVARIANT);
    }
    Ok(match report.outcome {
        Outcome::Stable => EXIT_OK,
        o => outcome_code(o),
    })
}

fn cmd_replay(a: &ReplayArgs) -> Result<i32, Failure> {
    let file = GraphFile::read_from(BufReader::new(File::open(&a.graph).map_err(usage)?)).map_err(usage)?;
    let g = file.to_graph().map_err(usage)?;
    let trace = read_trace(BufReader::new(File::open(&a.trace).map_err(usage)?)).map_err(usage)?;
    verify_trace(&g, &trace).map_err(|e| Failure {
        code: EXIT_INVARIANT,
        message: e.to_string(),
    })?;
    println!("{}", serde_json::to_string(&trace.footer).map_err(usage)?);
    Ok(EXIT_OK)
}

/// Output of `stats` besides the CSV.
#[derive(Debug, Serialize)]
struct StatsSummary {
    rows: usize,
    slope: Option<f64>,
}

fn cmd_stats(a: &StatsArgs) -> Result<i32, Failure> {
    let rows = growth_table(&a.r, a.depth).map_err(usage)?;
    let mut w = output(a.out.as_deref())?;
    write_csv(&mut w, &rows).map_err(usage)?;
    drop(w);
    let summary = StatsSummary {
        rows: rows.len(),
        slope: growth_slope(&rows),
    };
    let text = serde_json::to_string(&summary).map_err(usage)?;
    if a.out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    Ok(EXIT_OK)
}
