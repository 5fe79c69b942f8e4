//! Command implementations behind the `smartvote` binary.
//!
//! Every command returns the text to print on success, or a [`CliError`]
//! carrying the exit code. Reports are JSON unless `--pretty` is given.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use smartvote::analysis::{
    apply_rule, check_cast_participation, check_guru_participation, BallotSpace, RuledOutcome, VotingRule,
};
use smartvote::ballots::format::{self, FormatError};
use smartvote::ballots::{classify_language, validate_profile, PreferenceLevel, Profile, SmartBallot};
use smartvote::certificates::{
    certificate_space, check_consistent, enumerate_consistent, Certificate, Consistency, OutcomeVector,
    DEFAULT_ENUMERATION_CAP,
};
use smartvote::generators::{
    cnfsat_to_profile, fvs_to_profile, random_profile, CnfInstance, DirectedGraphInstance, Language,
};
use smartvote::greedy::{enumerate_random_branches, unravel, AssignmentSource, RandomState, UpdateKind};
use smartvote::optimal::{
    bounded_minmax, bounded_minsum, build_delegation_graph, minmax_exact_with, minmax_liquid, minsum_exact,
    minsum_liquid, Bounded, SearchLimits,
};
use smartvote::procedures::Procedure;
use smartvote::{fixtures, Error};

/// Environment variable overriding the default enumeration cap.
pub const ENUM_CAP_VAR: &str = "SMARTVOTE_ENUM_CAP";

pub const EXIT_INVALID: u8 = 1;
pub const EXIT_CAPABILITY: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
    /// Report to print on standard output despite the failure.
    pub report: Option<String>,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INVALID, message: message.into(), report: None }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotLiquid | Error::Domain(_) => EXIT_CAPABILITY,
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INVALID,
        };
        CliError { code, message: e.to_string(), report: None }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::invalid(e.to_string())
    }
}

type Outcome = Result<String, CliError>;

#[derive(Debug, Parser)]
#[command(name = "smartvote", version, about = "Unravel smart-ballot delegation profiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check ballot validity and report the languages the profile belongs to.
    Validate { file: PathBuf },
    /// Run one unravelling procedure.
    Unravel(UnravelArgs),
    /// Run several procedures side by side.
    Compare(CompareArgs),
    /// Search for participation-axiom violations.
    Axioms(AxiomArgs),
    /// Write a profile built from a graph, a CNF formula or a random draw.
    Generate(GenerateArgs),
    /// List every consistent certificate.
    Enumerate {
        file: PathBuf,
        /// Largest certificate space to enumerate [default: $SMARTVOTE_ENUM_CAP or 1000000].
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        pretty: bool,
    },
    /// Print a built-in profile in the file format.
    Fixture {
        /// Fixture name; omit to list them.
        name: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Maj,
    Rmaj,
}

impl From<RuleArg> for VotingRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Maj => VotingRule::Maj,
            RuleArg::Rmaj => VotingRule::RMaj,
        }
    }
}

fn parse_procedure(s: &str) -> Result<Procedure, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<UpdateKind, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct UnravelArgs {
    pub file: PathBuf,
    /// u, du, ru, dru, minsum, minmax, minsum-liquid or minmax-liquid.
    #[arg(long, value_parser = parse_procedure)]
    pub procedure: Procedure,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// For ru and dru, list every possible run instead of one seeded run.
    #[arg(long)]
    pub all_branches: bool,
    /// For the greedy procedures, include the assignment log.
    #[arg(long)]
    pub trace: bool,
    /// For minsum and minmax, only decide whether the optimum is at most M.
    #[arg(long, value_name = "M")]
    pub bound: Option<u64>,
    /// For minmax, return one optimal certificate instead of all of them.
    #[arg(long)]
    pub first: bool,
    /// Apply a voting rule to each outcome.
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    #[arg(long)]
    pub pretty: bool,
    /// Print the delegation graph in DOT, highlighting the chosen tree.
    #[arg(long)]
    pub dot: bool,
    /// Include the elapsed time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub file: PathBuf,
    /// Comma-separated procedures [default: u,du,ru,dru,minsum,minmax].
    #[arg(long, value_delimiter = ',', value_parser = parse_procedure)]
    pub procedures: Vec<Procedure>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxiomArg {
    Cast,
    Guru,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    LiquidStar,
    Liquid,
}

#[derive(Debug, Args)]
pub struct AxiomArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub axiom: AxiomArg,
    #[arg(long, value_enum)]
    pub rule: RuleArg,
    /// One of u, du, ru, dru.
    #[arg(long, value_parser = parse_kind)]
    pub procedure: UpdateKind,
    /// Agent whose incentives are checked; defaults to every direct voter.
    #[arg(long)]
    pub agent: Option<String>,
    /// Alternative ballots tried by the cast axiom.
    #[arg(long, value_enum, default_value = "liquid-star")]
    pub space: SpaceArg,
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Fvs,
    Cnf,
    Random,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: GenerateKind,
    /// Edge list (fvs) or DIMACS file (cnf).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Feedback vertex set budget (fvs).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Replace self-loops by a fresh vertex joined both ways (fvs).
    #[arg(long)]
    pub replace_loops: bool,
    /// Number of agents (random).
    #[arg(long, default_value_t = 6)]
    pub agents: usize,
    /// bool, liquid or liquid-star (random).
    #[arg(long, default_value = "bool", value_parser = |s: &str| s.parse::<Language>())]
    pub language: Language,
    /// Longest ballot (random).
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Probability that an agent delegates (random).
    #[arg(long, default_value_t = 0.7)]
    pub rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the profile here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Unravel(args) => cmd_unravel(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Axioms(args) => cmd_axioms(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Enumerate { file, cap, pretty } => cmd_enumerate(&file, cap, pretty),
        Command::Fixture { name } => cmd_fixture(name.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<format::Loaded, CliError> {
    format::load(&read(path)?).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Loads a profile and rejects invalid ballots.
fn load_valid(path: &Path) -> Result<Profile, CliError> {
    let profile = load(path)?.profile;
    if let Err(bad) = validate_profile(&profile) {
        let list: Vec<String> = bad
            .iter()
            .flat_map(|(a, vs)| vs.iter().map(|v| format!("{}: {v}", profile.name(*a))))
            .collect();
        return Err(CliError::invalid(format!("invalid ballots: {}", list.join("; "))));
    }
    Ok(profile)
}

fn render(value: Value) -> String {
    serde_json::to_string_pretty(&value).expect("json") + "\n"
}

fn cert_json(p: &Profile, c: &Certificate) -> Value {
    Value::Object(p.agents().iter().zip(c.levels()).map(|(a, l)| (a.clone(), json!(l))).collect())
}

fn outcome_json(p: &Profile, o: &OutcomeVector) -> Value {
    Value::Object(p.agents().iter().zip(o.votes()).map(|(a, v)| (a.clone(), json!(v.as_str()))).collect())
}

fn tuple<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// One reported (certificate, outcome) pair, checked before it is printed.
fn result_row(p: &Profile, c: &Certificate, o: &OutcomeVector, rule: Option<VotingRule>) -> Result<Map<String, Value>, CliError> {
    match check_consistent(p, c)? {
        Consistency::Consistent(w) if &w.outcome == o => {}
        _ => return Err(CliError::invalid(format!("internal error: certificate {c} does not verify"))),
    }
    let mut row = Map::new();
    row.insert("outcome".into(), outcome_json(p, o));
    row.insert("certificate".into(), cert_json(p, c));
    row.insert("rank".into(), json!(c.rank()));
    row.insert("max_level".into(), json!(c.max_level()));
    if let Some(rule) = rule {
        row.insert("result".into(), json!(apply_rule(rule, o)?.as_str()));
    }
    Ok(row)
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|i| self.rows.iter().map(|r| r[i].len()).chain([self.header[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        out += &line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
        for r in &self.rows {
            out += &line(r);
        }
        out
    }
}

fn languages(p: &Profile) -> Vec<&'static str> {
    let class = classify_language(p);
    let mut out = Vec::new();
    if class.in_bool {
        out.push("Bool");
    }
    if class.in_liquid {
        out.push("Liquid");
    }
    if class.in_liquid_star {
        out.push("Liquid*");
    }
    out
}

pub fn cmd_validate(path: &Path) -> Outcome {
    let loaded = load(path)?;
    let p = &loaded.profile;
    let class = classify_language(p);
    let mut violations = Map::new();
    let valid = match validate_profile(p) {
        Ok(()) => true,
        Err(bad) => {
            for (a, vs) in bad {
                let list: Vec<Value> = vs
                    .iter()
                    .map(|v| {
                        let kind = match v {
                            smartvote::ballots::Violation::RepeatedDelegation { .. } => "repeated-delegation",
                            smartvote::ballots::Violation::SelfDelegation { .. } => "self-delegation",
                        };
                        json!({"kind": kind, "message": v.to_string()})
                    })
                    .collect();
                violations.insert(p.name(a).to_string(), Value::Array(list));
            }
            false
        }
    };
    let rewritten: Vec<Value> = loaded
        .rewritten
        .iter()
        .map(|r| json!({"agent": p.name(r.agent), "level": r.level, "original": r.original, "completed": r.completed}))
        .collect();
    let report = json!({
        "valid": valid,
        "agents": p.len(),
        "languages": languages(p),
        "max_delegations": class.max_delegation_count,
        "violations": violations,
        "rewritten": rewritten,
    });
    if valid {
        Ok(render(report))
    } else {
        Err(CliError { code: EXIT_INVALID, message: "profile has invalid ballots".into(), report: Some(render(report)) })
    }
}

fn procedure_rows(
    p: &Profile,
    proc: Procedure,
    rule: Option<VotingRule>,
) -> Result<Vec<Map<String, Value>>, CliError> {
    match proc {
        Procedure::Greedy(kind) => enumerate_random_branches(p, kind, DEFAULT_ENUMERATION_CAP)?
            .into_iter()
            .map(|b| {
                let mut row = result_row(p, &b.certificate, &b.outcome, rule)?;
                if kind.is_randomized() {
                    row.insert("branches".into(), json!(b.branch_count));
                    row.insert("probability".into(), json!(b.probability));
                }
                Ok(row)
            })
            .collect(),
        _ => proc.possible_results(p)?.iter().map(|(c, o)| result_row(p, c, o, rule)).collect(),
    }
}

pub fn cmd_unravel(args: &UnravelArgs) -> Outcome {
    let p = load_valid(&args.file)?;
    let rule = args.rule.map(VotingRule::from);
    let start = Instant::now();
    let mut report = Map::new();
    report.insert("procedure".into(), json!(args.procedure.to_string()));

    if args.dot {
        let g = build_delegation_graph(&p)?;
        let tree = match args.procedure {
            Procedure::MinSumLiquid => Some(minsum_liquid(&p)?.arborescence),
            Procedure::MinMaxLiquid => Some(minmax_liquid(&p)?.tree),
            _ => None,
        };
        return Ok(g.to_dot(p.agents(), tree.as_ref()));
    }

    let rows: Vec<Map<String, Value>> = match args.procedure {
        Procedure::Greedy(kind) if !(kind.is_randomized() && args.all_branches) => {
            let mut rng = RandomState::new(args.seed);
            let r = unravel(&p, kind, &mut rng)?;
            if kind.is_randomized() {
                report.insert("seed".into(), json!(args.seed));
            }
            let mut row = result_row(&p, &r.certificate, &r.outcome, rule)?;
            row.insert("steps".into(), json!(r.step_count));
            if args.trace {
                let events: Vec<Value> = r
                    .trace
                    .iter()
                    .map(|e| {
                        json!({
                            "level": e.level,
                            "agent": p.name(e.agent),
                            "vote": e.vote.as_str(),
                            "source": match e.source {
                                AssignmentSource::Direct => "direct",
                                AssignmentSource::Computed => "computed",
                            },
                        })
                    })
                    .collect();
                row.insert("trace".into(), Value::Array(events));
            }
            vec![row]
        }
        Procedure::MinSum | Procedure::MinMax if args.bound.is_some() => {
            let m = args.bound.unwrap_or_default();
            let answer = if args.procedure == Procedure::MinSum { bounded_minsum(&p, m)? } else { bounded_minmax(&p, m)? };
            report.insert("bound".into(), json!(m));
            report.insert("answer".into(), json!(matches!(answer, Bounded::Yes(_))));
            match answer {
                Bounded::Yes(c) => {
                    let o = smartvote::certificates::outcome_of(&p, &c)?;
                    vec![result_row(&p, &c, &o, rule)?]
                }
                Bounded::No => Vec::new(),
            }
        }
        Procedure::MinSum => {
            let best = minsum_exact(&p)?;
            report.insert("objective".into(), json!(best.objective));
            best.solutions.iter().map(|(c, o)| result_row(&p, c, o, rule)).collect::<Result<_, _>>()?
        }
        Procedure::MinMax => {
            let best = minmax_exact_with(&p, SearchLimits::default(), args.first)?;
            report.insert("objective".into(), json!(best.objective));
            best.solutions.iter().map(|(c, o)| result_row(&p, c, o, rule)).collect::<Result<_, _>>()?
        }
        Procedure::MinMaxLiquid => {
            let r = minmax_liquid(&p)?;
            report.insert("stop_level".into(), json!(r.stop_level));
            vec![result_row(&p, &r.certificate, &r.outcome, rule)?]
        }
        proc => procedure_rows(&p, proc, rule)?,
    };
    report.insert("count".into(), json!(rows.len()));
    if args.timing {
        report.insert("elapsed_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    }
    if args.pretty {
        let mut t = results_table(rule.is_some());
        for row in &rows {
            t.push(pretty_row(&args.procedure.to_string(), row));
        }
        let mut out = t.render();
        for (key, value) in &report {
            if !matches!(key.as_str(), "procedure" | "count") {
                out += &format!("{key}: {value}\n");
            }
        }
        return Ok(out);
    }
    report.insert("results".into(), Value::Array(rows.into_iter().map(Value::Object).collect()));
    Ok(render(Value::Object(report)))
}

fn results_table(with_rule: bool) -> Table {
    if with_rule {
        Table::new(&["procedure", "outcome", "certificate", "rank", "max", "result"])
    } else {
        Table::new(&["procedure", "outcome", "certificate", "rank", "max"])
    }
}

fn pretty_row(name: &str, row: &Map<String, Value>) -> Vec<String> {
    let values = |key: &str| -> Vec<String> {
        row[key]
            .as_object()
            .map(|m| m.values().map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())).collect())
            .unwrap_or_default()
    };
    vec![
        name.to_string(),
        tuple(values("outcome")),
        tuple(values("certificate")),
        row["rank"].to_string(),
        row["max_level"].to_string(),
    ]
    .into_iter()
    .chain(row.get("result").and_then(Value::as_str).map(str::to_string))
    .collect()
}

pub fn cmd_compare(args: &CompareArgs) -> Outcome {
    let p = load_valid(&args.file)?;
    let rule = args.rule.map(VotingRule::from);
    let procs: Vec<Procedure> =
        if args.procedures.is_empty() { Procedure::STANDARD.to_vec() } else { args.procedures.clone() };
    let mut entries = Vec::new();
    let mut table = results_table(rule.is_some());
    for proc in procs {
        let rows = procedure_rows(&p, proc, rule)?;
        for row in &rows {
            table.push(pretty_row(&proc.to_string(), row));
        }
        let mut entry = Map::new();
        entry.insert("procedure".into(), json!(proc.to_string()));
        match proc {
            Procedure::MinSum | Procedure::MinSumLiquid => {
                entry.insert("objective".into(), rows.first().map(|r| r["rank"].clone()).unwrap_or(Value::Null));
            }
            Procedure::MinMax | Procedure::MinMaxLiquid => {
                entry.insert("objective".into(), rows.first().map(|r| r["max_level"].clone()).unwrap_or(Value::Null));
            }
            Procedure::Greedy(_) => {}
        }
        entry.insert("count".into(), json!(rows.len()));
        entry.insert("results".into(), Value::Array(rows.into_iter().map(Value::Object).collect()));
        entries.push(Value::Object(entry));
    }
    if args.pretty {
        return Ok(table.render());
    }
    Ok(render(json!({ "procedures": entries })))
}

fn ballot_text(p: &Profile, b: &SmartBallot) -> String {
    let parts: Vec<String> = b
        .levels()
        .iter()
        .map(|l| match l {
            PreferenceLevel::Direct(v) => v.to_string(),
            PreferenceLevel::Delegation(f) => format!("({})", f.display(p.agents())),
        })
        .collect();
    parts.join(" > ")
}

fn ruled_json(p: &Profile, r: &RuledOutcome) -> Value {
    json!({
        "outcome": outcome_json(p, &r.outcome),
        "certificate": cert_json(p, &r.certificate),
        "result": r.result.as_str(),
    })
}

pub fn cmd_axioms(args: &AxiomArgs) -> Outcome {
    let p = load_valid(&args.file)?;
    let rule = VotingRule::from(args.rule);
    let agents: Vec<usize> = match &args.agent {
        Some(name) => vec![p.agent(name).ok_or_else(|| CliError::invalid(format!("unknown agent `{name}`")))?],
        None => (0..p.len())
            .filter(|&a| matches!(p.ballot(a).levels(), [PreferenceLevel::Direct(x)] if !x.is_abstention()))
            .collect(),
    };
    let space = match args.space {
        SpaceArg::LiquidStar => BallotSpace::LiquidStar,
        SpaceArg::Liquid => BallotSpace::Liquid,
    };
    let mut violations = Vec::new();
    let mut lines = Vec::new();
    for &a in &agents {
        match args.axiom {
            AxiomArg::Cast => {
                for v in check_cast_participation(&p, a, rule, args.procedure, space)? {
                    lines.push(format!(
                        "{}: ballot {} turns {} into {}",
                        p.name(a),
                        ballot_text(&p, &v.ballot),
                        v.truthful.result,
                        v.deviating.result
                    ));
                    violations.push(json!({
                        "agent": p.name(a),
                        "ballot": ballot_text(&p, &v.ballot),
                        "truthful": ruled_json(&p, &v.truthful),
                        "deviating": ruled_json(&p, &v.deviating),
                    }));
                }
            }
            AxiomArg::Guru => {
                for v in check_guru_participation(&p, a, rule, args.procedure)? {
                    lines.push(format!(
                        "{}: if {} abstains, {} becomes {}",
                        p.name(a),
                        p.name(v.follower),
                        v.truthful.result,
                        v.deviating.result
                    ));
                    violations.push(json!({
                        "agent": p.name(a),
                        "follower": p.name(v.follower),
                        "truthful": ruled_json(&p, &v.truthful),
                        "deviating": ruled_json(&p, &v.deviating),
                    }));
                }
            }
        }
    }
    let axiom = match args.axiom {
        AxiomArg::Cast => "cast",
        AxiomArg::Guru => "guru",
    };
    if args.pretty {
        let mut out = format!(
            "{axiom}-participation, {rule}, {}: {}\n",
            Procedure::Greedy(args.procedure),
            if violations.is_empty() { "holds" } else { "violated" }
        );
        for l in lines {
            out += &format!("  {l}\n");
        }
        return Ok(out);
    }
    Ok(render(json!({
        "axiom": axiom,
        "rule": rule.to_string(),
        "procedure": Procedure::Greedy(args.procedure).to_string(),
        "agents": agents.iter().map(|&a| p.name(a)).collect::<Vec<_>>(),
        "holds": violations.is_empty(),
        "violations": violations,
    })))
}

pub fn cmd_generate(args: &GenerateArgs) -> Outcome {
    let input = || -> Result<String, CliError> {
        let path = args.input.as_ref().ok_or_else(|| CliError::invalid("--input is required for this kind"))?;
        read(path)
    };
    let (profile, note) = match args.kind {
        GenerateKind::Fvs => {
            let g = DirectedGraphInstance::parse_edge_list(&input()?, args.k, args.replace_loops)?;
            let (p, m) = fvs_to_profile(&g)?;
            (p, Some(format!("MinSum bound {m}")))
        }
        GenerateKind::Cnf => {
            let phi = CnfInstance::parse_dimacs(&input()?)?;
            let (p, m) = cnfsat_to_profile(&phi)?;
            (p, Some(format!("MinMax bound {m}")))
        }
        GenerateKind::Random => (random_profile(args.agents, args.language, args.levels, args.rate, args.seed)?, None),
    };
    let text = format::to_json(&profile)? + "\n";
    match &args.output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
            Ok(note.map(|n| n + "\n").unwrap_or_default())
        }
        None => {
            if let Some(n) = note {
                eprintln!("{n}");
            }
            Ok(text)
        }
    }
}

/// The enumeration cap from the environment, or the library default.
pub fn default_cap() -> Result<u64, CliError> {
    match std::env::var(ENUM_CAP_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| CliError::invalid(format!("{ENUM_CAP_VAR} must be a non-negative integer, got `{s}`"))),
        Err(_) => Ok(DEFAULT_ENUMERATION_CAP),
    }
}

pub fn cmd_enumerate(path: &Path, cap: Option<u64>, pretty: bool) -> Outcome {
    let p = load_valid(path)?;
    let cap = match cap {
        Some(c) => c,
        None => default_cap()?,
    };
    let all = enumerate_consistent(&p, cap)?;
    if pretty {
        let mut t = Table::new(&["certificate", "outcome", "rank", "max"]);
        for (c, o) in &all {
            t.push(vec![c.to_string(), tuple(o.votes()), c.rank().to_string(), c.max_level().to_string()]);
        }
        return Ok(t.render());
    }
    let rows: Vec<Value> = all
        .iter()
        .map(|(c, o)| {
            json!({
                "certificate": cert_json(&p, c),
                "outcome": outcome_json(&p, o),
                "rank": c.rank(),
                "max_level": c.max_level(),
            })
        })
        .collect();
    Ok(render(json!({
        "space": certificate_space(&p).to_string(),
        "consistent": rows.len(),
        "certificates": rows,
    })))
}

pub fn cmd_fixture(name: Option<&str>) -> Outcome {
    match name {
        None => Ok(fixtures::all().iter().map(|(n, _)| format!("{n}\n")).collect()),
        Some(n) => {
            let p = fixtures::by_name(n).ok_or_else(|| CliError::invalid(format!("unknown fixture `{n}`")))?;
            Ok(format::to_json(&p)? + "\n")
        }
    }
}
