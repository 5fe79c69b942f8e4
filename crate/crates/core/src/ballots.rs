//! Smart ballots and profiles.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dnf::{self, CompleteDnf, DnfError};

pub mod format;

/// Agents are identified by their position in the profile.
pub type Agent = usize;

/// Largest supported domain; alternative sets are handled as bit masks.
pub const MAX_DOMAIN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("duplicate agent `{0}`")]
    DuplicateAgent(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent `{0}` has no ballot")]
    MissingBallot(String),
    #[error("ballot for agent `{agent}`: {message}")]
    MalformedBallot { agent: String, message: String },
    #[error("alternative `{0}` is not in the domain")]
    UnknownAlternative(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("agent `{agent}`, level {level}: {source}")]
    Formula { agent: String, level: usize, source: DnfError },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alternative(String);

impl Alternative {
    pub fn new(token: impl Into<String>) -> Self {
        Alternative(token.into())
    }

    pub fn zero() -> Self {
        Alternative::new("0")
    }

    pub fn one() -> Self {
        Alternative::new("1")
    }

    pub fn abstain() -> Self {
        Alternative::new("*")
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_abstention(&self) -> bool {
        self.0 == "*"
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.0.as_str() {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Finite set of alternatives. The token `*` stands for abstention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain(Vec<Alternative>);

impl Domain {
    pub fn new(alternatives: impl IntoIterator<Item = Alternative>) -> Result<Self, ProfileError> {
        let alts: Vec<Alternative> = alternatives.into_iter().collect();
        if alts.is_empty() {
            return Err(ProfileError::InvalidDomain("domain is empty".into()));
        }
        if alts.len() > MAX_DOMAIN {
            return Err(ProfileError::InvalidDomain(format!("more than {MAX_DOMAIN} alternatives")));
        }
        for (i, a) in alts.iter().enumerate() {
            if a.0.is_empty() {
                return Err(ProfileError::InvalidDomain("empty alternative token".into()));
            }
            if alts[..i].contains(a) {
                return Err(ProfileError::InvalidDomain(format!("duplicate alternative `{a}`")));
            }
        }
        Ok(Domain(alts))
    }

    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Self, ProfileError> {
        Self::new(tokens.iter().map(|t| Alternative::new(t.as_ref())))
    }

    pub fn binary() -> Self {
        Domain(vec![Alternative::zero(), Alternative::one()])
    }

    pub fn with_abstention() -> Self {
        Domain(vec![Alternative::zero(), Alternative::one(), Alternative::abstain()])
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: &Alternative) -> bool {
        self.0.contains(a)
    }

    pub fn index_of(&self, a: &Alternative) -> Option<usize> {
        self.0.iter().position(|x| x == a)
    }

    pub fn allows_abstention(&self) -> bool {
        self.0.iter().any(Alternative::is_abstention)
    }

    /// Exactly the alternatives `0` and `1`.
    pub fn is_binary(&self) -> bool {
        self.0.len() == 2 && self.contains(&Alternative::zero()) && self.contains(&Alternative::one())
    }
}

/// Contract for delegation functions other than identity and complete DNF.
///
/// An implementation reports the agents it reads and, given the votes known
/// so far, the alternative it is forced to return regardless of the unknown
/// votes (if any). Two extension functions are treated as equal when their
/// `describe` strings are equal.
pub trait DelegationRule: Send + Sync {
    fn delegates(&self) -> Vec<Agent>;
    fn necessary_winner(&self, votes: &[Option<Alternative>]) -> Option<Alternative>;
    fn describe(&self) -> String;
}

#[derive(Clone)]
pub enum DelegationFunction {
    /// Copy the vote of a single delegate.
    Identity(Agent),
    /// Contingent Boolean function over binary votes.
    Dnf(CompleteDnf),
    Extension(Arc<dyn DelegationRule>),
}

impl fmt::Debug for DelegationFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelegationFunction::Identity(a) => f.debug_tuple("Identity").field(a).finish(),
            DelegationFunction::Dnf(d) => f.debug_tuple("Dnf").field(&d.to_string()).finish(),
            DelegationFunction::Extension(r) => f.debug_tuple("Extension").field(&r.describe()).finish(),
        }
    }
}

impl PartialEq for DelegationFunction {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Identity(a), Self::Identity(b)) => a == b,
            (Self::Dnf(a), Self::Dnf(b)) => a == b,
            (Self::Extension(a), Self::Extension(b)) => a.describe() == b.describe(),
            _ => false,
        }
    }
}

impl Eq for DelegationFunction {}

impl DelegationFunction {
    /// Delegates, ascending.
    pub fn delegates(&self) -> Vec<Agent> {
        match self {
            Self::Identity(a) => vec![*a],
            Self::Dnf(d) => d.variables().to_vec(),
            Self::Extension(r) => {
                let mut v = r.delegates();
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }

    /// Identity on `b`, or a formula that is just the literal `b`.
    pub fn as_identity(&self) -> Option<Agent> {
        match self {
            Self::Identity(a) => Some(*a),
            Self::Dnf(d) => d.as_single_variable(),
            Self::Extension(_) => None,
        }
    }

    /// Number of literals; identity counts as one.
    pub fn size(&self) -> usize {
        match self {
            Self::Identity(_) => 1,
            Self::Dnf(d) => d.size(),
            Self::Extension(r) => r.delegates().len().max(1),
        }
    }

    /// Equivalence as functions. Identity on `b` matches the formula `b`.
    pub fn equivalent(&self, other: &Self) -> bool {
        match (self.as_identity(), other.as_identity()) {
            (Some(a), Some(b)) => a == b,
            (Some(_), None) | (None, Some(_)) => false,
            (None, None) => self == other,
        }
    }

    pub fn necessary_winner(&self, votes: &[Option<Alternative>]) -> Option<Alternative> {
        self.necessary_winner_counted(votes).0
    }

    /// Necessary winner plus the number of literal reads it took.
    pub fn necessary_winner_counted(&self, votes: &[Option<Alternative>]) -> (Option<Alternative>, usize) {
        match self {
            Self::Identity(a) => (votes[*a].clone(), 1),
            Self::Dnf(d) => {
                let val = |v: usize| votes[v].as_ref().and_then(Alternative::as_bool);
                let (r, n) = d.necessary_winner_counted(&val);
                (r.map(Alternative::from_bool), n)
            }
            Self::Extension(r) => (r.necessary_winner(votes), r.delegates().len()),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> FunctionDisplay<'a> {
        FunctionDisplay { f: self, names }
    }
}

pub struct FunctionDisplay<'a> {
    f: &'a DelegationFunction,
    names: &'a [String],
}

impl fmt::Display for FunctionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            DelegationFunction::Identity(a) => f.write_str(&self.names[*a]),
            DelegationFunction::Dnf(d) => d.display(self.names).fmt(f),
            DelegationFunction::Extension(r) => f.write_str(&r.describe()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreferenceLevel {
    Delegation(DelegationFunction),
    Direct(Alternative),
}

impl PreferenceLevel {
    pub fn delegates(&self) -> Vec<Agent> {
        match self {
            PreferenceLevel::Delegation(f) => f.delegates(),
            PreferenceLevel::Direct(_) => Vec::new(),
        }
    }
}

/// Ordered preference levels; every level but the last delegates and the
/// last is a direct vote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmartBallot(Vec<PreferenceLevel>);

impl SmartBallot {
    pub fn new(levels: Vec<PreferenceLevel>) -> Result<Self, String> {
        match levels.last() {
            None => return Err("ballot has no levels".into()),
            Some(PreferenceLevel::Delegation(_)) => return Err("last level must be a direct vote".into()),
            Some(PreferenceLevel::Direct(_)) => {}
        }
        if levels[..levels.len() - 1].iter().any(|l| matches!(l, PreferenceLevel::Direct(_))) {
            return Err("only the last level may be a direct vote".into());
        }
        Ok(SmartBallot(levels))
    }

    pub fn direct(vote: Alternative) -> Self {
        SmartBallot(vec![PreferenceLevel::Direct(vote)])
    }

    pub fn levels(&self) -> &[PreferenceLevel] {
        &self.0
    }

    /// Level `h`, counting from 1.
    pub fn level(&self, h: u32) -> Option<&PreferenceLevel> {
        (h as usize).checked_sub(1).and_then(|i| self.0.get(i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn delegation_count(&self) -> usize {
        self.0.len() - 1
    }

    pub fn backup(&self) -> &Alternative {
        match self.0.last() {
            Some(PreferenceLevel::Direct(v)) => v,
            _ => unreachable!("ballot invariant"),
        }
    }

    pub fn delegations(&self) -> impl Iterator<Item = &DelegationFunction> {
        self.0.iter().filter_map(|l| match l {
            PreferenceLevel::Delegation(f) => Some(f),
            PreferenceLevel::Direct(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    agents: Vec<String>,
    index: HashMap<String, Agent>,
    domain: Domain,
    ballots: Vec<SmartBallot>,
}

impl Profile {
    /// Builds a profile; `ballots[i]` belongs to `agents[i]`.
    pub fn new(agents: Vec<String>, domain: Domain, ballots: Vec<SmartBallot>) -> Result<Self, ProfileError> {
        let mut index = HashMap::new();
        for (i, name) in agents.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| !(c.is_alphanumeric() || c == '_' || c == '\'')) {
                return Err(ProfileError::InvalidDomain(format!("invalid agent name `{name}`")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(ProfileError::DuplicateAgent(name.clone()));
            }
        }
        if ballots.len() != agents.len() {
            let missing = agents.get(ballots.len()).cloned().unwrap_or_default();
            return Err(ProfileError::MissingBallot(missing));
        }
        for (i, ballot) in ballots.iter().enumerate() {
            let bad = |message: String| ProfileError::MalformedBallot { agent: agents[i].clone(), message };
            for (h, level) in ballot.levels().iter().enumerate() {
                match level {
                    PreferenceLevel::Direct(v) => {
                        if !domain.contains(v) {
                            return Err(ProfileError::UnknownAlternative(v.to_string()));
                        }
                    }
                    PreferenceLevel::Delegation(f) => {
                        if let Some(d) = f.delegates().iter().find(|&&d| d >= agents.len()) {
                            return Err(bad(format!("level {} refers to agent #{d}", h + 1)));
                        }
                        if matches!(f, DelegationFunction::Dnf(_)) && !domain.is_binary() {
                            return Err(bad(format!("level {} uses a formula on a non-binary domain", h + 1)));
                        }
                    }
                }
            }
        }
        Ok(Profile { agents, index, domain, ballots })
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn name(&self, a: Agent) -> &str {
        &self.agents[a]
    }

    pub fn agent(&self, name: &str) -> Option<Agent> {
        self.index.get(name).copied()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn ballots(&self) -> &[SmartBallot] {
        &self.ballots
    }

    pub fn ballot(&self, a: Agent) -> &SmartBallot {
        &self.ballots[a]
    }

    pub fn max_levels(&self) -> usize {
        self.ballots.iter().map(SmartBallot::len).max().unwrap_or(0)
    }

    /// Same profile with agent `a` casting `ballot` instead.
    pub fn with_ballot(&self, a: Agent, ballot: SmartBallot) -> Result<Profile, ProfileError> {
        let mut ballots = self.ballots.clone();
        ballots[a] = ballot;
        Profile::new(self.agents.clone(), self.domain.clone(), ballots)
    }

    /// Builds a profile from textual ballot descriptions.
    pub fn build<S: AsRef<str>>(
        domain: Domain,
        agents: &[S],
        ballots: &[(&str, Vec<LevelSpec>)],
    ) -> Result<Profile, ProfileError> {
        let agents: Vec<String> = agents.iter().map(|s| s.as_ref().to_string()).collect();
        let lookup: HashMap<&str, Agent> = agents.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut slots: Vec<Option<SmartBallot>> = vec![None; agents.len()];
        for (owner, specs) in ballots {
            let a = *lookup.get(owner).ok_or_else(|| ProfileError::UnknownAgent(owner.to_string()))?;
            let mut levels = Vec::with_capacity(specs.len());
            for (h, spec) in specs.iter().enumerate() {
                levels.push(spec.resolve(&lookup, owner, h + 1)?);
            }
            let ballot = SmartBallot::new(levels)
                .map_err(|message| ProfileError::MalformedBallot { agent: owner.to_string(), message })?;
            if slots[a].replace(ballot).is_some() {
                return Err(ProfileError::MalformedBallot { agent: owner.to_string(), message: "ballot given twice".into() });
            }
        }
        let mut out = Vec::with_capacity(agents.len());
        for (i, slot) in slots.into_iter().enumerate() {
            out.push(slot.ok_or_else(|| ProfileError::MissingBallot(agents[i].clone()))?);
        }
        Profile::new(agents, domain, out)
    }
}

/// Textual form of a preference level used by [`Profile::build`].
#[derive(Debug, Clone)]
pub enum LevelSpec {
    Vote(String),
    Id(String),
    Dnf(String),
}

pub fn vote(v: &str) -> LevelSpec {
    LevelSpec::Vote(v.into())
}

pub fn id(agent: &str) -> LevelSpec {
    LevelSpec::Id(agent.into())
}

pub fn dnf(expr: &str) -> LevelSpec {
    LevelSpec::Dnf(expr.into())
}

impl LevelSpec {
    fn resolve(&self, lookup: &HashMap<&str, Agent>, owner: &str, level: usize) -> Result<PreferenceLevel, ProfileError> {
        Ok(match self {
            LevelSpec::Vote(v) => PreferenceLevel::Direct(Alternative::new(v.as_str())),
            LevelSpec::Id(a) => {
                let d = *lookup.get(a.as_str()).ok_or_else(|| ProfileError::UnknownAgent(a.clone()))?;
                PreferenceLevel::Delegation(DelegationFunction::Identity(d))
            }
            LevelSpec::Dnf(e) => {
                let f = dnf::parse(e, |n| lookup.get(n).copied())
                    .map_err(|source| ProfileError::Formula { agent: owner.to_string(), level, source })?;
                PreferenceLevel::Delegation(DelegationFunction::Dnf(f))
            }
        })
    }
}

/// A reason a ballot is not valid. Levels count from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RepeatedDelegation { first: usize, second: usize },
    SelfDelegation { level: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RepeatedDelegation { first, second } => {
                write!(f, "levels {first} and {second} delegate to the same agents with the same function")
            }
            Violation::SelfDelegation { level } => write!(f, "level {level} delegates to the voter"),
        }
    }
}

/// Checks that no two levels use the same delegates with equivalent
/// functions and that no level names the owner as a delegate.
pub fn validate_ballot(ballot: &SmartBallot, owner: Agent) -> Vec<Violation> {
    let mut out = Vec::new();
    let funcs: Vec<(usize, &DelegationFunction)> = ballot
        .levels()
        .iter()
        .enumerate()
        .filter_map(|(i, l)| match l {
            PreferenceLevel::Delegation(f) => Some((i + 1, f)),
            PreferenceLevel::Direct(_) => None,
        })
        .collect();
    for (i, &(h, f)) in funcs.iter().enumerate() {
        if f.delegates().contains(&owner) {
            out.push(Violation::SelfDelegation { level: h });
        }
        for &(k, g) in &funcs[..i] {
            if f.delegates() == g.delegates() && f.equivalent(g) {
                out.push(Violation::RepeatedDelegation { first: k, second: h });
            }
        }
    }
    out
}

pub fn validate_profile(profile: &Profile) -> Result<(), BTreeMap<Agent, Vec<Violation>>> {
    let bad: BTreeMap<Agent, Vec<Violation>> = profile
        .ballots()
        .iter()
        .enumerate()
        .map(|(a, b)| (a, validate_ballot(b, a)))
        .filter(|(_, v)| !v.is_empty())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

/// Which ballot languages a profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LanguageClass {
    /// Binary domain and every delegation is a contingent complete DNF.
    pub in_bool: bool,
    /// Every delegation copies a single agent.
    pub in_liquid: bool,
    /// Liquid, and every ballot that delegates falls back to abstention.
    pub in_liquid_star: bool,
    pub max_delegation_count: usize,
}

pub fn classify_language(profile: &Profile) -> LanguageClass {
    let delegations = || profile.ballots().iter().flat_map(SmartBallot::delegations);
    let in_bool = profile.domain().is_binary()
        && delegations().all(|f| matches!(f, DelegationFunction::Identity(_) | DelegationFunction::Dnf(_)));
    let in_liquid = delegations().all(|f| f.as_identity().is_some());
    let in_liquid_star = in_liquid
        && profile
            .ballots()
            .iter()
            .all(|b| b.delegation_count() == 0 || b.backup().is_abstention());
    LanguageClass {
        in_bool,
        in_liquid,
        in_liquid_star,
        max_delegation_count: profile.ballots().iter().map(SmartBallot::delegation_count).max().unwrap_or(0),
    }
}
