//! Depth-first branch and bound over certificates.
//!
//! Agents are assigned levels in index order. Before descending, a cheap
//! over-approximation asks whether every agent could still end up with some
//! vote: starting from nothing, each agent collects the alternatives it could
//! produce at any level it is still allowed to pick, given what its delegates
//! can produce. If some agent collects nothing, no completion of the partial
//! certificate is consistent and the subtree is skipped. Leaves are checked
//! exactly with the consistency fixpoint.

use crate::ballots::{Agent, DelegationFunction, PreferenceLevel, Profile};
use crate::certificates::{fixpoint, Certificate, OutcomeVector};
use crate::dnf::CompleteDnf;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    Sum,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Collect {
    /// Stop at the first consistent certificate within the bound.
    First,
    /// Every consistent certificate within the bound.
    All,
    /// Every consistent certificate of least rank; the bound tightens as
    /// better certificates are found.
    Best,
}

/// Resource limits for the exact searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub nodes: u64,
    pub solutions: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { nodes: 50_000_000, solutions: 1_000_000 }
    }
}

enum Level<'a> {
    Direct(u64),
    Identity(Agent),
    Dnf(&'a CompleteDnf),
    Opaque,
}

pub(crate) struct Search<'a> {
    profile: &'a Profile,
    table: Vec<Vec<Level<'a>>>,
    full: u64,
    zero: u64,
    one: u64,
    lens: Vec<u32>,
    levels: Vec<u32>,
    goal: Goal,
    bound: u64,
    collect: Collect,
    limits: SearchLimits,
    nodes: u64,
    pub found: Vec<(Certificate, OutcomeVector)>,
}

impl<'a> Search<'a> {
    pub fn new(profile: &'a Profile, goal: Goal, bound: u64, collect: Collect, limits: SearchLimits) -> Self {
        let domain = profile.domain();
        let bit = |alt: &crate::ballots::Alternative| domain.index_of(alt).map(|i| 1u64 << i).unwrap_or(0);
        let table = profile
            .ballots()
            .iter()
            .map(|b| {
                b.levels()
                    .iter()
                    .map(|l| match l {
                        PreferenceLevel::Direct(v) => Level::Direct(bit(v)),
                        PreferenceLevel::Delegation(DelegationFunction::Identity(j)) => Level::Identity(*j),
                        PreferenceLevel::Delegation(DelegationFunction::Dnf(f)) => Level::Dnf(f),
                        PreferenceLevel::Delegation(DelegationFunction::Extension(_)) => Level::Opaque,
                    })
                    .collect()
            })
            .collect();
        let full = if domain.len() == 64 { u64::MAX } else { (1u64 << domain.len()) - 1 };
        Search {
            profile,
            table,
            full,
            zero: bit(&crate::ballots::Alternative::zero()),
            one: bit(&crate::ballots::Alternative::one()),
            lens: profile.ballots().iter().map(|b| b.len() as u32).collect(),
            levels: vec![0; profile.len()],
            goal,
            bound,
            collect,
            limits,
            nodes: 0,
            found: Vec::new(),
        }
    }

    /// Restricts every agent to levels no higher than `caps`.
    pub fn with_caps(mut self, caps: &[u32]) -> Self {
        for (len, &cap) in self.lens.iter_mut().zip(caps) {
            *len = (*len).min(cap);
        }
        self
    }

    pub fn run(&mut self) -> Result<()> {
        self.dfs(0, 0).map(|_| ())
    }

    fn produce(&self, level: &Level<'_>, vals: &[u64]) -> u64 {
        match level {
            Level::Direct(m) => *m,
            Level::Identity(j) => vals[*j],
            Level::Opaque => self.full,
            Level::Dnf(f) => {
                let can = |lit: &crate::dnf::Literal, want_true: bool| {
                    let need = if lit.satisfied_by(true) == want_true { self.one } else { self.zero };
                    vals[lit.var] & need != 0
                };
                let can_one = f.cubes().iter().any(|c| c.literals().iter().all(|l| can(l, true)));
                let can_zero = f.cubes().iter().all(|c| c.literals().iter().any(|l| can(l, false)));
                (if can_one { self.one } else { 0 }) | (if can_zero { self.zero } else { 0 })
            }
        }
    }

    /// Highest level an unassigned agent may still take.
    fn cap(&self, sum: u64, unassigned: u64) -> u64 {
        match self.goal {
            Goal::Max => self.bound,
            Goal::Sum => (self.bound + 1).saturating_sub(sum + unassigned),
        }
    }

    fn derivable(&self, sum: u64, unassigned: u64) -> bool {
        let n = self.levels.len();
        let cap = self.cap(sum, unassigned);
        let mut vals = vec![0u64; n];
        loop {
            let mut changed = false;
            for a in 0..n {
                let (lo, hi) = match self.levels[a] {
                    0 => (1, (self.lens[a] as u64).min(cap) as u32),
                    l => (l, l),
                };
                let mut out = vals[a];
                for l in lo..=hi {
                    out |= self.produce(&self.table[a][l as usize - 1], &vals);
                    if out == self.full {
                        break;
                    }
                }
                if out != vals[a] {
                    vals[a] = out;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        vals.iter().all(|&v| v != 0)
    }

    fn leaf(&mut self, sum: u64) -> Result<bool> {
        let cert = Certificate::new(self.levels.clone());
        let fp = fixpoint(self.profile, &cert);
        if fp.ordering.len() != self.levels.len() {
            return Ok(false);
        }
        let outcome = OutcomeVector::new(fp.votes.into_iter().flatten().collect());
        if self.collect == Collect::Best && sum < self.bound {
            self.bound = sum;
            self.found.clear();
        }
        self.found.push((cert, outcome));
        if self.found.len() as u64 > self.limits.solutions {
            return Err(Error::CapExceeded { required: self.found.len() as u128, cap: self.limits.solutions });
        }
        Ok(self.collect == Collect::First)
    }

    fn dfs(&mut self, a: Agent, sum: u64) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.limits.nodes {
            return Err(Error::CapExceeded { required: u128::from(self.nodes), cap: self.limits.nodes });
        }
        let n = self.levels.len();
        if a == n {
            return self.leaf(sum);
        }
        let rest = (n - a - 1) as u64;
        for l in 1..=self.lens[a] {
            let ok = match self.goal {
                Goal::Max => u64::from(l) <= self.bound,
                Goal::Sum => sum + u64::from(l) + rest <= self.bound,
            };
            if !ok {
                break;
            }
            self.levels[a] = l;
            if self.derivable(sum + u64::from(l), rest) && self.dfs(a + 1, sum + u64::from(l))? {
                return Ok(true);
            }
        }
        self.levels[a] = 0;
        Ok(false)
    }
}
