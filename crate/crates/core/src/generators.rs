//! Instance generators: reductions from feedback vertex set and CNF
//! satisfiability, and seeded random profiles.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ballots::{
    Agent, Alternative, DelegationFunction, Domain, PreferenceLevel, Profile, SmartBallot,
};
use crate::dnf::{self, Cube, Literal};
use crate::error::{Error, Result};

/// Directed graph without self-loops plus a budget `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraphInstance {
    vertices: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
    k: usize,
}

impl DirectedGraphInstance {
    pub fn new(vertices: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>, k: usize) -> Result<Self> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u >= vertices.len() || v >= vertices.len() {
                return Err(Error::Parameter(format!("edge ({u}, {v}) refers to a missing vertex")));
            }
            if u == v {
                return Err(Error::SelfLoop(vertices[u].clone()));
            }
        }
        Ok(DirectedGraphInstance { vertices, edges, k })
    }

    /// Replaces every self-loop on `a` by a fresh vertex `a'` and the edges
    /// `a -> a'` and `a' -> a`. Feedback vertex sets keep their size.
    pub fn with_loops_replaced(vertices: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>, k: usize) -> Result<Self> {
        let mut vertices = vertices;
        let mut out = Vec::new();
        for (u, v) in edges {
            if u != v || u >= vertices.len() {
                out.push((u, v));
                continue;
            }
            let mut name = format!("{}'", vertices[u]);
            while vertices.contains(&name) {
                name.push('\'');
            }
            vertices.push(name);
            let d = vertices.len() - 1;
            out.push((u, d));
            out.push((d, u));
        }
        Self::new(vertices, out, k)
    }

    /// Reads one edge `u v` per line; a line with a single name declares an
    /// isolated vertex. `#` starts a comment.
    pub fn parse_edge_list(text: &str, k: usize, replace_loops: bool) -> Result<Self> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        let intern = |name: &str, vertices: &mut Vec<String>| -> usize {
            match vertices.iter().position(|v| v == name) {
                Some(i) => i,
                None => {
                    vertices.push(name.to_string());
                    vertices.len() - 1
                }
            }
        };
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            let parts: Vec<&str> = line.split_whitespace().filter(|p| *p != "->").collect();
            match parts.as_slice() {
                [] => {}
                [v] => {
                    intern(v, &mut vertices);
                }
                [u, v] => {
                    let u = intern(u, &mut vertices);
                    let v = intern(v, &mut vertices);
                    edges.push((u, v));
                }
                _ => return Err(Error::Parameter(format!("line {}: expected `u v`", no + 1))),
            }
        }
        if replace_loops {
            Self::with_loops_replaced(vertices, edges, k)
        } else {
            Self::new(vertices, edges, k)
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Each vertex delegates first to the conjunction of its out-neighbours and
/// falls back to voting 1; sinks vote 1 directly. The bound is `|V| + k`.
pub fn fvs_to_profile(g: &DirectedGraphInstance) -> Result<(Profile, u64)> {
    let n = g.vertices.len();
    let mut ballots = Vec::with_capacity(n);
    for v in 0..n {
        let outs: Vec<usize> = g.edges.iter().filter(|(u, _)| *u == v).map(|&(_, w)| w).collect();
        if outs.is_empty() {
            ballots.push(SmartBallot::direct(Alternative::one()));
            continue;
        }
        let cube = Cube::new(outs.into_iter().map(Literal::pos))?;
        let f = dnf::complete([cube])?;
        ballots.push(
            SmartBallot::new(vec![
                PreferenceLevel::Delegation(DelegationFunction::Dnf(f)),
                PreferenceLevel::Direct(Alternative::one()),
            ])
            .expect("well formed"),
        );
    }
    let profile = Profile::new(g.vertices.clone(), Domain::binary(), ballots)?;
    Ok((profile, (n + g.k) as u64))
}

/// CNF formula over variables `1..=num_vars`; literals use signed integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfInstance {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::Parameter("formula has no clauses".into()));
        }
        for (i, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::Parameter(format!("clause {} is empty", i + 1)));
            }
            if let Some(l) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars) {
                return Err(Error::Parameter(format!("literal {l} out of range")));
            }
        }
        Ok(CnfInstance { num_vars, clauses })
    }

    /// Reads the usual numeric format: optional `c` comment lines, an
    /// optional `p cnf <vars> <clauses>` header and zero-terminated clauses.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    ["p", "cnf", v, _] => {
                        declared = Some(v.parse::<usize>().map_err(|_| Error::Parameter(format!("line {}: bad header", no + 1)))?)
                    }
                    _ => return Err(Error::Parameter(format!("line {}: bad header", no + 1))),
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| Error::Parameter(format!("line {}: bad literal `{tok}`", no + 1)))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(l);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let used = clauses.iter().flatten().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        Self::new(declared.unwrap_or(used).max(used), clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// `assignment[i]` is the value of variable `i + 1`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

/// Agents `x`, `y`, one per clause (`c1`, ...) and one per variable (`v1`,
/// ...). Satisfiable formulas are exactly those whose profile has a
/// consistent certificate with every level at most 2.
pub fn cnfsat_to_profile(phi: &CnfInstance) -> Result<(Profile, u64)> {
    let m = phi.clauses.len();
    let x = 0;
    let y = 1;
    let clause = |i: usize| 2 + i;
    let var = |v: usize| 2 + m + v - 1;
    let mut names = vec!["x".to_string(), "y".to_string()];
    names.extend((1..=m).map(|i| format!("c{i}")));
    names.extend((1..=phi.num_vars).map(|v| format!("v{v}")));

    let del = |f: dnf::CompleteDnf| PreferenceLevel::Delegation(DelegationFunction::Dnf(f));
    let cube = |lits: Vec<Literal>| -> Result<dnf::CompleteDnf> { Ok(dnf::complete([Cube::new(lits)?])?) };
    let one = PreferenceLevel::Direct(Alternative::one());

    let mut ballots = vec![SmartBallot::direct(Alternative::one())];
    let all_clauses: Vec<Literal> = (0..m).map(|i| Literal::pos(clause(i))).collect();
    let mut first = vec![Literal::pos(x)];
    first.extend(all_clauses.iter().copied());
    ballots.push(SmartBallot::new(vec![del(cube(first)?), del(cube(all_clauses)?), one.clone()]).expect("well formed"));
    for c in &phi.clauses {
        let lits: BTreeSet<Literal> = c
            .iter()
            .map(|&l| if l > 0 { Literal::pos(var(l as usize)) } else { Literal::neg(var(l.unsigned_abs() as usize)) })
            .collect();
        let tautology = lits.iter().any(|l| lits.contains(&l.negate()));
        let mut levels = vec![del(dnf::CompleteDnf::variable(y))];
        if !tautology {
            let cubes = std::iter::once(Literal::pos(y)).chain(lits).map(|l| Cube::new([l])).collect::<Result<Vec<_>, _>>()?;
            levels.push(del(dnf::complete(cubes)?));
        }
        levels.push(one.clone());
        ballots.push(SmartBallot::new(levels).expect("well formed"));
    }
    for _ in 1..=phi.num_vars {
        ballots.push(
            SmartBallot::new(vec![del(dnf::CompleteDnf::variable(x)), PreferenceLevel::Direct(Alternative::zero())])
                .expect("well formed"),
        );
    }
    Ok((Profile::new(names, Domain::binary(), ballots)?, 2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    Bool,
    Liquid,
    LiquidStar,
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Bool => "bool",
            Language::Liquid => "liquid",
            Language::LiquidStar => "liquid-star",
        })
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bool" => Ok(Language::Bool),
            "liquid" => Ok(Language::Liquid),
            "liquid-star" | "liquid*" | "liquidstar" => Ok(Language::LiquidStar),
            _ => Err(format!("unknown language `{s}`")),
        }
    }
}

/// Random valid profile with agents `a0`, `a1`, ...
///
/// Each agent delegates with probability `delegation_rate`, using between 1
/// and `max_levels - 1` delegations; higher rates give denser level-1
/// cycles. Bool profiles use the domain {0, 1}; the Liquid languages use
/// {0, 1, *}.
pub fn random_profile(n: usize, language: Language, max_levels: usize, delegation_rate: f64, seed: u64) -> Result<Profile> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if max_levels == 0 {
        return Err(Error::Parameter("max_levels must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&delegation_rate) {
        return Err(Error::Parameter("delegation rate must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = match language {
        Language::Bool => Domain::binary(),
        Language::Liquid | Language::LiquidStar => Domain::with_abstention(),
    };
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let mut ballots = Vec::with_capacity(n);
    for a in 0..n {
        let others: Vec<Agent> = (0..n).filter(|&b| b != a).collect();
        let delegating = !others.is_empty() && max_levels > 1 && rng.gen_bool(delegation_rate);
        let pick_vote = |rng: &mut ChaCha8Rng| domain.alternatives()[rng.gen_range(0..domain.len())].clone();
        if !delegating {
            ballots.push(SmartBallot::direct(pick_vote(&mut rng)));
            continue;
        }
        let k = rng.gen_range(1..max_levels);
        let mut levels: Vec<PreferenceLevel> = Vec::with_capacity(k + 1);
        match language {
            Language::Liquid | Language::LiquidStar => {
                let mut pool = others.clone();
                pool.shuffle(&mut rng);
                for &d in pool.iter().take(k) {
                    levels.push(PreferenceLevel::Delegation(DelegationFunction::Identity(d)));
                }
            }
            Language::Bool => {
                let mut used: Vec<dnf::CompleteDnf> = Vec::new();
                for _ in 0..k {
                    if let Some(f) = random_formula(&others, &used, &mut rng) {
                        used.push(f.clone());
                        levels.push(PreferenceLevel::Delegation(DelegationFunction::Dnf(f)));
                    }
                }
            }
        }
        let backup = match language {
            Language::LiquidStar => Alternative::abstain(),
            _ => pick_vote(&mut rng),
        };
        levels.push(PreferenceLevel::Direct(backup));
        ballots.push(SmartBallot::new(levels).expect("well formed"));
    }
    Ok(Profile::new(names, domain, ballots)?)
}

/// Contingent formula over at most four of `others`, distinct from `used`.
fn random_formula(others: &[Agent], used: &[dnf::CompleteDnf], rng: &mut ChaCha8Rng) -> Option<dnf::CompleteDnf> {
    for _ in 0..100 {
        let size = rng.gen_range(1..=others.len().min(4));
        let pool: Vec<Agent> = others.choose_multiple(rng, size).copied().collect();
        let cubes: Vec<Cube> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let len = rng.gen_range(1..=pool.len());
                let lits = pool
                    .choose_multiple(rng, len)
                    .map(|&v| if rng.gen_bool(0.3) { Literal::neg(v) } else { Literal::pos(v) });
                Cube::new(lits.collect::<Vec<_>>()).expect("distinct variables")
            })
            .collect();
        if let Ok(f) = dnf::complete(cubes) {
            if !used.contains(&f) {
                return Some(f);
            }
        }
    }
    None
}
