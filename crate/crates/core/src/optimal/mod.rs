//! Exact unravelling: consistent certificates of least total rank (MinSum)
//! or least maximum level (MinMax), plus the polynomial special cases for
//! Liquid profiles.

mod arborescence;
mod liquid;
mod search;

pub use arborescence::{edmonds_arborescence, is_arborescence, Arborescence, Contraction, Edge, Node, WeightedDigraph};
pub use liquid::{build_delegation_graph, minmax_liquid, minsum_liquid, LiquidMinMax, LiquidMinSum};
pub use search::SearchLimits;

use search::{Collect, Goal, Search};

use crate::ballots::Profile;
use crate::certificates::{Certificate, OutcomeVector};
use crate::error::Result;
use crate::greedy::{run_unchecked, UpdateKind};

/// Answer to a bounded decision question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bounded {
    Yes(Certificate),
    No,
}

/// Optimal objective value and the certificates attaining it, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub objective: u64,
    pub solutions: Vec<(Certificate, OutcomeVector)>,
}

fn upper_sum(profile: &Profile) -> u64 {
    profile.ballots().iter().map(|b| b.len() as u64).sum()
}

/// Is there a consistent certificate of rank at most `bound`?
pub fn bounded_minsum(profile: &Profile, bound: u64) -> Result<Bounded> {
    bounded_with(profile, Goal::Sum, bound, SearchLimits::default())
}

/// Is there a consistent certificate whose largest level is at most `bound`?
pub fn bounded_minmax(profile: &Profile, bound: u64) -> Result<Bounded> {
    bounded_with(profile, Goal::Max, bound, SearchLimits::default())
}

fn bounded_with(profile: &Profile, goal: Goal, bound: u64, limits: SearchLimits) -> Result<Bounded> {
    let mut s = Search::new(profile, goal, bound, Collect::First, limits);
    s.run()?;
    Ok(match s.found.pop() {
        Some((c, _)) => Bounded::Yes(c),
        None => Bounded::No,
    })
}

/// Some consistent certificate other than `cert` that is entrywise no
/// larger, if one exists.
pub fn find_dominating(profile: &Profile, cert: &Certificate, limits: SearchLimits) -> Result<Option<Certificate>> {
    let Some(bound) = cert.rank().checked_sub(1) else { return Ok(None) };
    let mut s = Search::new(profile, Goal::Sum, bound, Collect::First, limits).with_caps(cert.levels());
    s.run()?;
    Ok(s.found.pop().map(|(c, _)| c))
}

pub fn minsum_exact(profile: &Profile) -> Result<Optimum> {
    minsum_exact_with(profile, SearchLimits::default())
}

/// All consistent certificates of least rank. The greedy `U` and `DU`
/// certificates seed the incumbent bound.
pub fn minsum_exact_with(profile: &Profile, limits: SearchLimits) -> Result<Optimum> {
    let mut bound = upper_sum(profile);
    for kind in [UpdateKind::U, UpdateKind::DU] {
        if let Ok(r) = run_unchecked(profile, kind) {
            bound = bound.min(r.certificate.rank());
        }
    }
    let mut s = Search::new(profile, Goal::Sum, bound, Collect::Best, limits);
    s.run()?;
    let mut solutions = s.found;
    solutions.sort();
    let objective = solutions.first().map(|(c, _)| c.rank()).unwrap_or(bound);
    Ok(Optimum { objective, solutions })
}

pub fn minmax_exact(profile: &Profile) -> Result<Optimum> {
    minmax_exact_with(profile, SearchLimits::default(), false)
}

/// Least achievable maximum level. With `first` set only one optimal
/// certificate is returned; otherwise all of them.
pub fn minmax_exact_with(profile: &Profile, limits: SearchLimits, first: bool) -> Result<Optimum> {
    let top = profile.max_levels() as u64;
    let mut m = 1;
    loop {
        if let Bounded::Yes(cert) = bounded_with(profile, Goal::Max, m, limits)? {
            if first {
                let outcome = crate::certificates::outcome_of(profile, &cert)?;
                return Ok(Optimum { objective: m, solutions: vec![(cert, outcome)] });
            }
            let mut s = Search::new(profile, Goal::Max, m, Collect::All, limits);
            s.run()?;
            let mut solutions = s.found;
            solutions.sort();
            return Ok(Optimum { objective: m, solutions });
        }
        if m >= top {
            // Every agent's direct backup gives a consistent certificate, so
            // this is only reached for an empty profile.
            return Ok(Optimum { objective: 0, solutions: Vec::new() });
        }
        m += 1;
    }
}
