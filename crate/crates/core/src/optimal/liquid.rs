//! MinSum and MinMax for profiles where every delegation copies one agent.
//!
//! Such a profile is a weighted digraph: an edge `j -> i` of weight `k` when
//! agent `i` copies `j` at level `k`, and an edge `root -> i` of weight `k`
//! when `i` votes directly at level `k`. Consistent certificates correspond
//! to spanning arborescences rooted at the root, with rank equal to weight.

use std::collections::VecDeque;

use super::arborescence::{edmonds_arborescence, Arborescence, Contraction, Edge, Node, WeightedDigraph};
use crate::ballots::{classify_language, PreferenceLevel, Profile};
use crate::certificates::{outcome_of, Certificate, OutcomeVector};
use crate::error::{Error, Result};

pub fn build_delegation_graph(profile: &Profile) -> Result<WeightedDigraph> {
    if !classify_language(profile).in_liquid {
        return Err(Error::NotLiquid);
    }
    let mut g = WeightedDigraph::new(profile.len());
    for (i, ballot) in profile.ballots().iter().enumerate() {
        for (k, level) in ballot.levels().iter().enumerate() {
            let from = match level {
                PreferenceLevel::Direct(_) => Node::Root,
                PreferenceLevel::Delegation(f) => Node::Agent(f.as_identity().expect("liquid profile")),
            };
            g.add_edge(from, i, k as u32 + 1);
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiquidMinSum {
    pub certificate: Certificate,
    pub outcome: OutcomeVector,
    pub arborescence: Arborescence,
    pub contractions: Vec<Contraction>,
}

fn named(profile: &Profile, e: Error) -> Error {
    match e {
        Error::UnreachableNode(id) => {
            let name = id.trim_start_matches('#').parse::<usize>().ok().map(|a| profile.name(a).to_string());
            Error::UnreachableNode(name.unwrap_or(id))
        }
        other => other,
    }
}

fn certificate_of(tree: &Arborescence) -> Certificate {
    Certificate::new(tree.edges().iter().map(|e| e.weight).collect())
}

pub fn minsum_liquid(profile: &Profile) -> Result<LiquidMinSum> {
    let g = build_delegation_graph(profile)?;
    let (arborescence, contractions) = edmonds_arborescence(&g).map_err(|e| named(profile, e))?;
    let certificate = certificate_of(&arborescence);
    let outcome = outcome_of(profile, &certificate)?;
    Ok(LiquidMinSum { certificate, outcome, arborescence, contractions })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiquidMinMax {
    /// Smallest level at which every agent is reachable from the root.
    pub stop_level: u32,
    pub tree: Arborescence,
    pub certificate: Certificate,
    pub outcome: OutcomeVector,
}

/// Adds edges level by level until every agent is reachable from the root,
/// then takes a depth-first tree, visiting out-edges by (weight, target).
pub fn minmax_liquid(profile: &Profile) -> Result<LiquidMinMax> {
    let g = build_delegation_graph(profile)?;
    let n = profile.len();
    let top = profile.max_levels() as u32;
    for lev in 1..=top {
        let mut out: Vec<Vec<Edge>> = vec![Vec::new(); n + 1];
        for e in g.edges().iter().filter(|e| e.weight <= lev) {
            let slot = match e.from {
                Node::Root => 0,
                Node::Agent(a) => a + 1,
            };
            out[slot].push(*e);
        }
        if !all_reachable(&out, n) {
            continue;
        }
        for list in &mut out {
            list.sort_by_key(|e| (e.weight, e.to));
        }
        let mut incoming: Vec<Option<Edge>> = vec![None; n];
        let mut visited = vec![false; n + 1];
        dfs(0, &out, &mut visited, &mut incoming);
        let tree = Arborescence::from_incoming(incoming.into_iter().map(|e| e.expect("reachable")).collect());
        let certificate = certificate_of(&tree);
        let outcome = outcome_of(profile, &certificate)?;
        return Ok(LiquidMinMax { stop_level: lev, tree, certificate, outcome });
    }
    let missing = g.unreachable();
    Err(Error::UnreachableNode(missing.first().map(|&a| profile.name(a).to_string()).unwrap_or_default()))
}

fn all_reachable(out: &[Vec<Edge>], n: usize) -> bool {
    let mut seen = vec![false; n + 1];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for e in &out[u] {
            if !seen[e.to + 1] {
                seen[e.to + 1] = true;
                queue.push_back(e.to + 1);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn dfs(u: usize, out: &[Vec<Edge>], visited: &mut [bool], incoming: &mut [Option<Edge>]) {
    visited[u] = true;
    for e in &out[u] {
        if !visited[e.to + 1] {
            incoming[e.to] = Some(*e);
            dfs(e.to + 1, out, visited, incoming);
        }
    }
}
