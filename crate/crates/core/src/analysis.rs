//! Comparing procedures: Pareto dominance of certificates, influence,
//! voting rules over outcome vectors, and participation axioms.
//!
//! For the participation checks an agent voting `x` directly prefers `x` to
//! both `1-x` and abstention; `1-x` and abstention are not compared. A
//! violation therefore needs the deviation to produce `x` where the truthful
//! profile did not.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::ballots::{
    validate_ballot, Agent, Alternative, DelegationFunction, PreferenceLevel, Profile, SmartBallot,
};
use crate::certificates::{check_bounds, check_consistent, Certificate, Consistency, OutcomeVector};
use crate::error::{Error, Result};
use crate::greedy::{RandomState, UpdateKind};
use crate::optimal::{find_dominating, SearchLimits};
use crate::procedures::Procedure;

/// `c1` is entrywise no larger than `c2` and smaller somewhere.
pub fn pareto_dominates(c1: &Certificate, c2: &Certificate) -> Result<bool> {
    if c1.len() != c2.len() {
        return Err(Error::AgentMismatch { expected: c1.len(), got: c2.len() });
    }
    let pairs = c1.levels().iter().zip(c2.levels());
    Ok(pairs.clone().all(|(a, b)| a <= b) && pairs.into_iter().any(|(a, b)| a < b))
}

/// No other consistent certificate dominates `cert`.
pub fn is_pareto_optimal(profile: &Profile, cert: &Certificate) -> Result<bool> {
    is_pareto_optimal_with(profile, cert, SearchLimits::default())
}

pub fn is_pareto_optimal_with(profile: &Profile, cert: &Certificate, limits: SearchLimits) -> Result<bool> {
    require_consistent(profile, cert)?;
    Ok(find_dominating(profile, cert, limits)?.is_none())
}

fn require_consistent(profile: &Profile, cert: &Certificate) -> Result<()> {
    match check_consistent(profile, cert)? {
        Consistency::Consistent(_) => Ok(()),
        Consistency::Inconsistent { stuck } => Err(Error::InconsistentCertificate {
            stuck: stuck.iter().map(|&a| profile.name(a).to_string()).collect(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InfluenceReport {
    /// Agents whose certified level delegates to the agent.
    pub direct: BTreeSet<Agent>,
    /// Agents reached by following such delegations any number of times.
    pub transitive: BTreeSet<Agent>,
}

fn followers(profile: &Profile, cert: &Certificate) -> Vec<Vec<Agent>> {
    let mut out = vec![Vec::new(); profile.len()];
    for (b, ballot) in profile.ballots().iter().enumerate() {
        if let Some(level) = ballot.level(cert.level(b)) {
            for d in level.delegates() {
                out[d].push(b);
            }
        }
    }
    out
}

pub fn influence_sets(profile: &Profile, cert: &Certificate, a: Agent) -> Result<InfluenceReport> {
    check_bounds(profile, cert)?;
    require_consistent(profile, cert)?;
    let fol = followers(profile, cert);
    let direct: BTreeSet<Agent> = fol[a].iter().copied().collect();
    let mut transitive = BTreeSet::new();
    let mut stack: Vec<Agent> = fol[a].clone();
    while let Some(b) = stack.pop() {
        if transitive.insert(b) {
            stack.extend(fol[b].iter().copied());
        }
    }
    Ok(InfluenceReport { direct, transitive })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VotingRule {
    /// Alternative with more than half of all votes, otherwise abstention.
    Maj,
    /// Whichever of 0 and 1 has more votes, abstention on a tie.
    RMaj,
}

impl fmt::Display for VotingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VotingRule::Maj => "maj",
            VotingRule::RMaj => "rmaj",
        })
    }
}

impl FromStr for VotingRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "maj" => Ok(VotingRule::Maj),
            "rmaj" => Ok(VotingRule::RMaj),
            _ => Err(format!("unknown voting rule `{s}`")),
        }
    }
}

fn tally(votes: &[Alternative]) -> Result<(usize, usize)> {
    let mut ones = 0;
    let mut zeros = 0;
    for v in votes {
        match v.as_bool() {
            Some(true) => ones += 1,
            Some(false) => zeros += 1,
            None if v.is_abstention() => {}
            None => return Err(Error::Domain(format!("vote `{v}` is not 0, 1 or *"))),
        }
    }
    Ok((zeros, ones))
}

pub fn apply_rule(rule: VotingRule, outcome: &OutcomeVector) -> Result<Alternative> {
    rule_on(rule, outcome.votes())
}

fn rule_on(rule: VotingRule, votes: &[Alternative]) -> Result<Alternative> {
    let (zeros, ones) = tally(votes)?;
    let n = votes.len();
    Ok(match rule {
        VotingRule::Maj if 2 * ones > n => Alternative::one(),
        VotingRule::Maj if 2 * zeros > n => Alternative::zero(),
        VotingRule::RMaj if ones > zeros => Alternative::one(),
        VotingRule::RMaj if zeros > ones => Alternative::zero(),
        _ => Alternative::abstain(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Monotonicity {
    Holds,
    /// `before` elects `x`; switching `agent` to `x` gives `after`, which
    /// does not.
    Counterexample { before: Vec<Alternative>, agent: Agent, after: Vec<Alternative> },
}

pub fn check_monotonicity(rule: VotingRule, trials: u64, rng: &mut RandomState) -> Monotonicity {
    check_monotonicity_with(&|v: &[Alternative]| rule_on(rule, v).expect("votes drawn from 0, 1, *"), trials, rng)
}

/// Random search for a vote vector `X` electing `x` and a voter whose switch
/// to `x` makes `x` lose.
pub fn check_monotonicity_with(
    rule: &dyn Fn(&[Alternative]) -> Alternative,
    trials: u64,
    rng: &mut RandomState,
) -> Monotonicity {
    let alts = [Alternative::zero(), Alternative::one(), Alternative::abstain()];
    let rng = rng.rng();
    for _ in 0..trials {
        let n = rng.gen_range(1..=9);
        let before: Vec<Alternative> = (0..n).map(|_| alts[rng.gen_range(0..3)].clone()).collect();
        let winner = rule(&before);
        if winner.is_abstention() {
            continue;
        }
        let agent = rng.gen_range(0..n);
        if before[agent] == winner {
            continue;
        }
        let mut after = before.clone();
        after[agent] = winner.clone();
        if rule(&after) != winner {
            return Monotonicity::Counterexample { before, agent, after };
        }
    }
    Monotonicity::Holds
}

/// One possible run of a procedure together with the rule applied to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuledOutcome {
    pub certificate: Certificate,
    pub outcome: OutcomeVector,
    pub result: Alternative,
}

fn ruled(profile: &Profile, kind: UpdateKind, rule: VotingRule) -> Result<Vec<RuledOutcome>> {
    Procedure::Greedy(kind)
        .possible_results(profile)?
        .into_iter()
        .map(|(certificate, outcome)| {
            let result = apply_rule(rule, &outcome)?;
            Ok(RuledOutcome { certificate, outcome, result })
        })
        .collect()
}

/// Truthful runs not electing `x`, each paired with a deviating run that does.
fn improvements(truthful: &[RuledOutcome], deviating: &[RuledOutcome], x: &Alternative) -> Vec<(RuledOutcome, RuledOutcome)> {
    let Some(better) = deviating.iter().find(|d| &d.result == x) else { return Vec::new() };
    truthful.iter().filter(|t| &t.result != x).map(|t| (t.clone(), better.clone())).collect()
}

fn direct_vote(profile: &Profile, a: Agent) -> Result<Alternative> {
    match profile.ballot(a).levels() {
        [PreferenceLevel::Direct(x)] if !x.is_abstention() => Ok(x.clone()),
        _ => Err(Error::Parameter(format!("agent `{}` must vote directly for a non-abstention", profile.name(a)))),
    }
}

/// Alternative ballots searched by [`check_cast_participation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallotSpace {
    /// Direct votes, plus one or two single-agent delegations ending in
    /// abstention when the domain has one.
    LiquidStar,
    /// Direct votes, plus one or two single-agent delegations ending in any
    /// alternative.
    Liquid,
}

pub fn ballot_space(profile: &Profile, a: Agent, space: BallotSpace) -> Vec<SmartBallot> {
    let domain = profile.domain().alternatives();
    let mut out: Vec<SmartBallot> = domain.iter().map(|v| SmartBallot::direct(v.clone())).collect();
    let backups: Vec<&Alternative> = match space {
        BallotSpace::LiquidStar => domain.iter().filter(|v| v.is_abstention()).collect(),
        BallotSpace::Liquid => domain.iter().collect(),
    };
    let others: Vec<Agent> = (0..profile.len()).filter(|&b| b != a).collect();
    let id = |b: Agent| PreferenceLevel::Delegation(DelegationFunction::Identity(b));
    for backup in backups {
        let end = PreferenceLevel::Direct(backup.clone());
        for &b in &others {
            out.push(SmartBallot::new(vec![id(b), end.clone()]).expect("well formed"));
            for &c in others.iter().filter(|&&c| c != b) {
                out.push(SmartBallot::new(vec![id(b), id(c), end.clone()]).expect("well formed"));
            }
        }
    }
    out.retain(|b| validate_ballot(b, a).is_empty());
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CastViolation {
    pub ballot: SmartBallot,
    pub truthful: RuledOutcome,
    pub deviating: RuledOutcome,
}

/// Searches for a ballot that agent `a`, who votes `x` directly, could cast
/// instead to make the rule return `x` where the truthful profile does not.
/// Randomised rules are compared over all of their branches.
pub fn check_cast_participation(
    profile: &Profile,
    a: Agent,
    rule: VotingRule,
    kind: UpdateKind,
    space: BallotSpace,
) -> Result<Vec<CastViolation>> {
    let x = direct_vote(profile, a)?;
    let truthful = ruled(profile, kind, rule)?;
    let mut out = Vec::new();
    for ballot in ballot_space(profile, a, space) {
        if &ballot == profile.ballot(a) {
            continue;
        }
        let deviated = profile.with_ballot(a, ballot.clone())?;
        let deviating = ruled(&deviated, kind, rule)?;
        for (t, d) in improvements(&truthful, &deviating, &x) {
            out.push(CastViolation { ballot: ballot.clone(), truthful: t, deviating: d });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuruViolation {
    pub follower: Agent,
    pub truthful: RuledOutcome,
    pub deviating: RuledOutcome,
}

/// Agents influenced by `a` in at least one possible run of `kind`.
pub fn influenced_by(profile: &Profile, a: Agent, kind: UpdateKind) -> Result<BTreeSet<Agent>> {
    let mut set = BTreeSet::new();
    for (cert, _) in Procedure::Greedy(kind).possible_results(profile)? {
        set.extend(influence_sets(profile, &cert, a)?.transitive);
    }
    set.remove(&a);
    Ok(set)
}

/// Checks whether agent `a`, voting `x` directly, would get `x` elected if
/// some agent it influences abstained instead of delegating.
pub fn check_guru_participation(profile: &Profile, a: Agent, rule: VotingRule, kind: UpdateKind) -> Result<Vec<GuruViolation>> {
    let x = direct_vote(profile, a)?;
    let followers = influenced_by(profile, a, kind)?;
    if followers.is_empty() {
        return Ok(Vec::new());
    }
    if !profile.domain().allows_abstention() {
        return Err(Error::Domain("guru participation needs `*` in the domain".into()));
    }
    let truthful = ruled(profile, kind, rule)?;
    let mut out = Vec::new();
    for b in followers {
        let deviated = profile.with_ballot(b, SmartBallot::direct(Alternative::abstain()))?;
        let deviating = ruled(&deviated, kind, rule)?;
        for (t, d) in improvements(&truthful, &deviating, &x) {
            out.push(GuruViolation { follower: b, truthful: t, deviating: d });
        }
    }
    Ok(out)
}
