//! Certificates (one chosen preference level per agent) and their outcomes.

use std::fmt;

use crate::ballots::{Agent, Alternative, PreferenceLevel, Profile};
use crate::error::{Error, Result};

/// Cap on the number of certificates [`enumerate_consistent`] will visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Chosen preference level for every agent, counting from 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Certificate(Vec<u32>);

impl Certificate {
    pub fn new(levels: Vec<u32>) -> Self {
        Certificate(levels)
    }

    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    pub fn level(&self, a: Agent) -> u32 {
        self.0[a]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self) -> u64 {
        self.0.iter().map(|&l| u64::from(l)).sum()
    }

    pub fn max_level(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, self.0.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeVector(Vec<Alternative>);

impl OutcomeVector {
    pub fn new(votes: Vec<Alternative>) -> Self {
        OutcomeVector(votes)
    }

    pub fn from_tokens(tokens: &[&str]) -> Self {
        OutcomeVector(tokens.iter().map(|t| Alternative::new(*t)).collect())
    }

    pub fn votes(&self) -> &[Alternative] {
        &self.0
    }

    pub fn get(&self, a: Agent) -> &Alternative {
        &self.0[a]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for OutcomeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, self.0.iter())
    }
}

fn write_tuple<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = T>) -> fmt::Result {
    f.write_str("(")?;
    for (i, x) in items.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyWitness {
    /// Order in which agents received their votes.
    pub ordering: Vec<Agent>,
    pub outcome: OutcomeVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    Consistent(ConsistencyWitness),
    /// Agents whose vote can never be determined.
    Inconsistent { stuck: Vec<Agent> },
}

pub(crate) struct Fixpoint {
    pub ordering: Vec<Agent>,
    pub votes: Vec<Option<Alternative>>,
    pub evaluations: usize,
}

pub fn check_bounds(profile: &Profile, cert: &Certificate) -> Result<()> {
    if cert.len() != profile.len() {
        return Err(Error::AgentMismatch { expected: profile.len(), got: cert.len() });
    }
    for (a, &l) in cert.levels().iter().enumerate() {
        let max = profile.ballot(a).len() as u32;
        if l < 1 || l > max {
            return Err(Error::Bounds { agent: profile.name(a).to_string(), level: l, max });
        }
    }
    Ok(())
}

/// Propagates votes from the direct levels of `cert` until nothing changes.
/// Direct voters come first in index order; delegating agents are then swept
/// in index order, each sweep using values set earlier in the same sweep.
pub(crate) fn fixpoint(profile: &Profile, cert: &Certificate) -> Fixpoint {
    let n = profile.len();
    let mut votes: Vec<Option<Alternative>> = vec![None; n];
    let mut ordering = Vec::with_capacity(n);
    let mut evaluations = 0;
    for (a, ballot) in profile.ballots().iter().enumerate() {
        if let Some(PreferenceLevel::Direct(v)) = ballot.level(cert.level(a)) {
            votes[a] = Some(v.clone());
            ordering.push(a);
        }
    }
    loop {
        let mut progress = false;
        for a in 0..n {
            if votes[a].is_some() {
                continue;
            }
            if let Some(PreferenceLevel::Delegation(f)) = profile.ballot(a).level(cert.level(a)) {
                evaluations += 1;
                if let Some(v) = f.necessary_winner(&votes) {
                    votes[a] = Some(v);
                    ordering.push(a);
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }
    Fixpoint { ordering, votes, evaluations }
}

pub fn check_consistent(profile: &Profile, cert: &Certificate) -> Result<Consistency> {
    check_bounds(profile, cert)?;
    let fp = fixpoint(profile, cert);
    Ok(into_consistency(fp))
}

pub(crate) fn into_consistency(fp: Fixpoint) -> Consistency {
    if fp.ordering.len() == fp.votes.len() {
        let outcome = OutcomeVector(fp.votes.into_iter().map(|v| v.expect("all assigned")).collect());
        Consistency::Consistent(ConsistencyWitness { ordering: fp.ordering, outcome })
    } else {
        let stuck = fp.votes.iter().enumerate().filter(|(_, v)| v.is_none()).map(|(a, _)| a).collect();
        Consistency::Inconsistent { stuck }
    }
}

/// Number of necessary-winner evaluations the consistency check performs;
/// never more than `n(n-1)/2 + n`.
pub fn consistency_evaluations(profile: &Profile, cert: &Certificate) -> Result<usize> {
    check_bounds(profile, cert)?;
    Ok(fixpoint(profile, cert).evaluations)
}

pub fn outcome_of(profile: &Profile, cert: &Certificate) -> Result<OutcomeVector> {
    match check_consistent(profile, cert)? {
        Consistency::Consistent(w) => Ok(w.outcome),
        Consistency::Inconsistent { stuck } => Err(Error::InconsistentCertificate {
            stuck: stuck.iter().map(|&a| profile.name(a).to_string()).collect(),
        }),
    }
}

/// Evaluates agents strictly in `ordering`. Returns `None` if some agent's
/// vote is not yet determined when its turn comes.
pub fn replay(profile: &Profile, cert: &Certificate, ordering: &[Agent]) -> Result<Option<OutcomeVector>> {
    check_bounds(profile, cert)?;
    let mut votes: Vec<Option<Alternative>> = vec![None; profile.len()];
    for &a in ordering {
        let v = match profile.ballot(a).level(cert.level(a)) {
            Some(PreferenceLevel::Direct(v)) => Some(v.clone()),
            Some(PreferenceLevel::Delegation(f)) => f.necessary_winner(&votes),
            None => None,
        };
        match v {
            Some(v) => votes[a] = Some(v),
            None => return Ok(None),
        }
    }
    if votes.iter().any(Option::is_none) {
        return Ok(None);
    }
    Ok(Some(OutcomeVector(votes.into_iter().flatten().collect())))
}

/// Number of certificates a profile admits.
pub fn certificate_space(profile: &Profile) -> u128 {
    profile.ballots().iter().fold(1u128, |acc, b| acc.saturating_mul(b.len() as u128))
}

/// All consistent certificates with their outcomes, sorted by certificate.
pub fn enumerate_consistent(profile: &Profile, cap: u64) -> Result<Vec<(Certificate, OutcomeVector)>> {
    let required = certificate_space(profile);
    if required > u128::from(cap) {
        return Err(Error::CapExceeded { required, cap });
    }
    let n = profile.len();
    let lens: Vec<u32> = profile.ballots().iter().map(|b| b.len() as u32).collect();
    let mut levels = vec![1u32; n];
    let mut out = Vec::new();
    loop {
        let cert = Certificate(levels.clone());
        if let Consistency::Consistent(w) = into_consistency(fixpoint(profile, &cert)) {
            out.push((cert, w.outcome));
        }
        // Mixed-radix increment with the last agent varying fastest.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if levels[i] < lens[i] {
                levels[i] += 1;
                break;
            }
            levels[i] = 1;
        }
    }
}
