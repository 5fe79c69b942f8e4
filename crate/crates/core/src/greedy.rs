//! Greedy unravelling.
//!
//! The outer loop restarts at level 1 whenever some agent received a vote;
//! the inner loop climbs levels until one update call assigns something.
//! The four update rules differ in what they assign per call:
//!
//! * `U`: every unassigned agent whose level is a direct vote or whose
//!   delegation is already determined.
//! * `DU`: direct votes first; determined delegations only when no direct
//!   vote was added.
//! * `RU`: one agent drawn uniformly among those `U` would assign.
//! * `DRU`: one agent drawn uniformly among direct voters, or among
//!   determined delegations if there are none.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ballots::{validate_profile, Agent, Alternative, PreferenceLevel, Profile};
use crate::certificates::{Certificate, OutcomeVector};
use crate::error::{Error, Result};

/// Multiplier in the step bound `4 * n^2 * max_levels * max_formula_size`.
pub const STEP_CONSTANT: u64 = 4;

/// Cap on states visited by [`enumerate_random_branches`].
pub const DEFAULT_BRANCH_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateKind {
    U,
    DU,
    RU,
    DRU,
}

impl UpdateKind {
    pub const ALL: [UpdateKind; 4] = [UpdateKind::U, UpdateKind::DU, UpdateKind::RU, UpdateKind::DRU];

    pub fn is_randomized(self) -> bool {
        matches!(self, UpdateKind::RU | UpdateKind::DRU)
    }

    fn direct_first(self) -> bool {
        matches!(self, UpdateKind::DU | UpdateKind::DRU)
    }
}

impl fmt::Display for UpdateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateKind::U => "U",
            UpdateKind::DU => "DU",
            UpdateKind::RU => "RU",
            UpdateKind::DRU => "DRU",
        })
    }
}

impl FromStr for UpdateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "U" => Ok(UpdateKind::U),
            "DU" => Ok(UpdateKind::DU),
            "RU" => Ok(UpdateKind::RU),
            "DRU" => Ok(UpdateKind::DRU),
            _ => Err(format!("unknown update rule `{s}`")),
        }
    }
}

/// Seeded source of the uniform draws made by `RU` and `DRU`.
#[derive(Debug, Clone)]
pub struct RandomState {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomState {
    pub fn new(seed: u64) -> Self {
        RandomState { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub(crate) fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

trait Chooser {
    fn choose(&mut self, options: usize) -> usize;
}

impl Chooser for RandomState {
    fn choose(&mut self, options: usize) -> usize {
        self.rng.gen_range(0..options)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentSource {
    Direct,
    Computed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub level: u32,
    pub agent: Agent,
    pub vote: Alternative,
    pub source: AssignmentSource,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    pub outcome: OutcomeVector,
    pub certificate: Certificate,
    pub trace: Vec<TraceEvent>,
    /// One step per (agent, level) inspection plus one per literal read.
    pub step_count: u64,
}

/// What a single agent offers at a given level.
enum Offer {
    Direct(Alternative),
    Computed(Alternative),
    Nothing,
}

fn offer(profile: &Profile, a: Agent, lev: u32, y: &[Option<Alternative>], steps: &mut u64) -> Offer {
    *steps += 1;
    match profile.ballot(a).level(lev) {
        None => Offer::Nothing,
        Some(PreferenceLevel::Direct(v)) => Offer::Direct(v.clone()),
        Some(PreferenceLevel::Delegation(f)) => {
            let (r, scanned) = f.necessary_winner_counted(y);
            *steps += scanned as u64;
            match r {
                Some(v) => Offer::Computed(v),
                None => Offer::Nothing,
            }
        }
    }
}

struct Run {
    votes: Vec<Option<Alternative>>,
    levels: Vec<u32>,
    trace: Vec<TraceEvent>,
    steps: u64,
}

impl Run {
    fn assign(&mut self, a: Agent, lev: u32, vote: Alternative, source: AssignmentSource) {
        self.votes[a] = Some(vote.clone());
        self.levels[a] = lev;
        self.trace.push(TraceEvent { level: lev, agent: a, vote, source });
    }
}

/// One call of the update rule at `lev`, reading from `y`. Returns whether
/// anything was assigned.
fn update(profile: &Profile, kind: UpdateKind, lev: u32, y: &[Option<Alternative>], run: &mut Run, chooser: &mut dyn Chooser) -> bool {
    let n = profile.len();
    let open: Vec<Agent> = (0..n).filter(|&a| run.votes[a].is_none()).collect();
    match kind {
        UpdateKind::U => {
            let mut changed = false;
            for a in open {
                match offer(profile, a, lev, y, &mut run.steps) {
                    Offer::Direct(v) => run.assign(a, lev, v, AssignmentSource::Direct),
                    Offer::Computed(v) => run.assign(a, lev, v, AssignmentSource::Computed),
                    Offer::Nothing => continue,
                }
                changed = true;
            }
            changed
        }
        UpdateKind::DU => {
            let mut changed = false;
            for &a in &open {
                run.steps += 1;
                if let Some(PreferenceLevel::Direct(v)) = profile.ballot(a).level(lev) {
                    run.assign(a, lev, v.clone(), AssignmentSource::Direct);
                    changed = true;
                }
            }
            if changed {
                return true;
            }
            for a in open {
                if let Offer::Computed(v) = offer(profile, a, lev, y, &mut run.steps) {
                    run.assign(a, lev, v, AssignmentSource::Computed);
                    changed = true;
                }
            }
            changed
        }
        UpdateKind::RU | UpdateKind::DRU => {
            let mut direct = Vec::new();
            let mut computed = Vec::new();
            for a in open {
                match offer(profile, a, lev, y, &mut run.steps) {
                    Offer::Direct(v) => direct.push((a, v, AssignmentSource::Direct)),
                    Offer::Computed(v) => computed.push((a, v, AssignmentSource::Computed)),
                    Offer::Nothing => {}
                }
            }
            let pool = if kind.direct_first() {
                if direct.is_empty() {
                    computed
                } else {
                    direct
                }
            } else {
                let mut all = direct;
                all.extend(computed);
                all.sort_by_key(|(a, _, _)| *a);
                all
            };
            if pool.is_empty() {
                return false;
            }
            let (a, v, source) = pool[chooser.choose(pool.len())].clone();
            run.assign(a, lev, v, source);
            true
        }
    }
}

fn run_greedy(profile: &Profile, kind: UpdateKind, chooser: &mut dyn Chooser) -> Result<GreedyResult> {
    let n = profile.len();
    let max_lev = profile.max_levels() as u32;
    let mut run = Run { votes: vec![None; n], levels: vec![0; n], trace: Vec::new(), steps: 0 };
    while run.votes.iter().any(Option::is_none) {
        let y = run.votes.clone();
        let mut lev = 1;
        loop {
            if lev > max_lev {
                return Err(Error::Stalled { level: max_lev });
            }
            let changed = update(profile, kind, lev, &y, &mut run, chooser);
            lev += 1;
            if changed {
                break;
            }
        }
    }
    Ok(GreedyResult {
        outcome: OutcomeVector::new(run.votes.into_iter().flatten().collect()),
        certificate: Certificate::new(run.levels),
        trace: run.trace,
        step_count: run.steps,
    })
}

fn ensure_valid(profile: &Profile) -> Result<()> {
    validate_profile(profile).map_err(|bad| {
        let parts: Vec<String> = bad
            .iter()
            .flat_map(|(a, vs)| vs.iter().map(move |v| format!("{}: {v}", profile.name(*a))))
            .collect();
        Error::InvalidProfile(parts.join("; "))
    })
}

/// Runs greedy unravelling. `rng` is only consulted by `RU` and `DRU`.
pub fn unravel(profile: &Profile, kind: UpdateKind, rng: &mut RandomState) -> Result<GreedyResult> {
    ensure_valid(profile)?;
    run_greedy(profile, kind, rng)
}

/// Deterministic run without the validity check, used to seed searches.
pub(crate) fn run_unchecked(profile: &Profile, kind: UpdateKind) -> Result<GreedyResult> {
    run_greedy(profile, kind, &mut RandomState::new(0))
}

/// Outcome reached by a set of random executions, with the number of choice
/// sequences leading to it and their total probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome: OutcomeVector,
    pub certificate: Certificate,
    pub branch_count: u64,
    pub probability: f64,
}

/// Replays a fixed sequence of choices.
struct Scripted<'a> {
    choices: &'a [usize],
    pos: usize,
    arity: Option<usize>,
}

impl Chooser for Scripted<'_> {
    fn choose(&mut self, options: usize) -> usize {
        self.arity = Some(options);
        let c = self.choices.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        c
    }
}

/// Every (outcome, certificate) pair that `kind` can produce.
///
/// Each outer iteration of `RU`/`DRU` assigns exactly one agent, and what
/// happens next depends only on the votes and levels assigned so far, so
/// executions are merged by that state. `node_cap` bounds the number of
/// distinct states visited.
pub fn enumerate_random_branches(profile: &Profile, kind: UpdateKind, node_cap: u64) -> Result<Vec<Branch>> {
    ensure_valid(profile)?;
    if !kind.is_randomized() {
        let r = run_greedy(profile, kind, &mut RandomState::new(0))?;
        return Ok(vec![Branch { outcome: r.outcome, certificate: r.certificate, branch_count: 1, probability: 1.0 }]);
    }
    let n = profile.len();
    let max_lev = profile.max_levels() as u32;
    type State = (Vec<Option<Alternative>>, Vec<u32>);
    let mut layer: HashMap<State, (u64, f64)> = HashMap::new();
    layer.insert((vec![None; n], vec![0; n]), (1, 1.0));
    let mut visited: u64 = 1;
    for _ in 0..n {
        let mut next: HashMap<State, (u64, f64)> = HashMap::new();
        for ((votes, levels), (count, prob)) in layer {
            let mut choice = 0;
            loop {
                let mut run = Run { votes: votes.clone(), levels: levels.clone(), trace: Vec::new(), steps: 0 };
                let y = votes.clone();
                let mut script = Scripted { choices: std::slice::from_ref(&choice), pos: 0, arity: None };
                let mut lev = 1;
                loop {
                    if lev > max_lev {
                        return Err(Error::Stalled { level: max_lev });
                    }
                    let changed = update(profile, kind, lev, &y, &mut run, &mut script);
                    lev += 1;
                    if changed {
                        break;
                    }
                }
                let arity = script.arity.expect("randomised update draws once");
                let entry = next.entry((run.votes, run.levels)).or_insert((0, 0.0));
                entry.0 = entry.0.checked_add(count).ok_or(Error::CapExceeded { required: u128::MAX, cap: node_cap })?;
                entry.1 += prob / arity as f64;
                choice += 1;
                if choice == arity {
                    break;
                }
            }
        }
        visited += next.len() as u64;
        if visited > node_cap {
            return Err(Error::CapExceeded { required: u128::from(visited), cap: node_cap });
        }
        layer = next;
    }
    let mut merged: HashMap<(OutcomeVector, Certificate), (u64, f64)> = HashMap::new();
    for ((votes, levels), (count, prob)) in layer {
        let key = (OutcomeVector::new(votes.into_iter().flatten().collect()), Certificate::new(levels));
        let e = merged.entry(key).or_insert((0, 0.0));
        e.0 += count;
        e.1 += prob;
    }
    let mut out: Vec<Branch> = merged
        .into_iter()
        .map(|((outcome, certificate), (branch_count, probability))| Branch { outcome, certificate, branch_count, probability })
        .collect();
    out.sort_by(|a, b| (&a.certificate, &a.outcome).cmp(&(&b.certificate, &b.outcome)));
    Ok(out)
}

/// `4 * n^2 * max_levels * max_formula_size`, with identity counted as size 1.
pub fn step_bound(profile: &Profile) -> u64 {
    let n = profile.len() as u64;
    let max_p = profile.max_levels() as u64;
    let max_phi = profile
        .ballots()
        .iter()
        .flat_map(|b| b.delegations())
        .map(|f| f.size() as u64)
        .max()
        .unwrap_or(1)
        .max(1);
    STEP_CONSTANT * n * n * max_p * max_phi
}

pub fn step_bound_check(profile: &Profile, result: &GreedyResult) -> bool {
    result.step_count <= step_bound(profile)
}
