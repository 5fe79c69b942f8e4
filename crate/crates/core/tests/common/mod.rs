//! Brute-force oracles shared by the integration tests. None of them call
//! into the algorithms they are used to check.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use smartvote::ballots::{Agent, Alternative, DelegationFunction, PreferenceLevel, Profile};
use smartvote::certificates::Certificate;

/// A cube as (variable, negated) pairs.
pub type RawCube = Vec<(usize, bool)>;

/// Truth table of a disjunction of cubes; bit `v` of the row index is the
/// value of variable `v`.
pub fn truth_table(cubes: &[RawCube], vars: usize) -> Vec<bool> {
    (0..1usize << vars)
        .map(|row| cubes.iter().any(|c| c.iter().all(|&(v, neg)| (row >> v & 1 == 1) != neg)))
        .collect()
}

fn cube_rows(cube: &RawCube, vars: usize) -> impl Iterator<Item = usize> + '_ {
    (0..1usize << vars).filter(move |row| cube.iter().all(|&(v, neg)| (row >> v & 1 == 1) != neg))
}

fn implies(cube: &RawCube, table: &[bool], vars: usize) -> bool {
    cube_rows(cube, vars).all(|row| table[row])
}

/// Every prime implicant of the function, each sorted by variable.
pub fn prime_implicants(table: &[bool], vars: usize) -> BTreeSet<RawCube> {
    let mut out = BTreeSet::new();
    // Each variable is absent, positive or negative.
    for code in 0..3usize.pow(vars as u32) {
        let mut cube = Vec::new();
        let mut c = code;
        for v in 0..vars {
            match c % 3 {
                1 => cube.push((v, false)),
                2 => cube.push((v, true)),
                _ => {}
            }
            c /= 3;
        }
        if !implies(&cube, table, vars) {
            continue;
        }
        let prime = (0..cube.len()).all(|i| {
            let mut smaller = cube.clone();
            smaller.remove(i);
            !implies(&smaller, table, vars)
        });
        if prime {
            out.insert(cube);
        }
    }
    out
}

/// Value shared by every completion of `partial`, if there is one.
pub fn forced_value(table: &[bool], partial: &[Option<bool>]) -> Option<bool> {
    let mut seen = BTreeSet::new();
    for (row, &value) in table.iter().enumerate() {
        if partial.iter().enumerate().all(|(v, p)| p.map_or(true, |b| (row >> v & 1 == 1) == b)) {
            seen.insert(value);
        }
    }
    if seen.len() == 1 {
        seen.into_iter().next()
    } else {
        None
    }
}

/// Vote forced at `level` given the known `votes`, by enumerating every
/// completion of the unknown delegates.
pub fn level_vote(level: &PreferenceLevel, votes: &[Option<Alternative>]) -> Option<Alternative> {
    match level {
        PreferenceLevel::Direct(v) => Some(v.clone()),
        PreferenceLevel::Delegation(DelegationFunction::Identity(b)) => votes[*b].clone(),
        PreferenceLevel::Delegation(DelegationFunction::Dnf(f)) => {
            let vars = f.variables().to_vec();
            let mut known = Vec::new();
            for &v in &vars {
                match &votes[v] {
                    None => known.push(None),
                    Some(x) => known.push(Some(x.as_bool()?)),
                }
            }
            let cubes: Vec<RawCube> = f
                .cubes()
                .iter()
                .map(|c| c.literals().iter().map(|l| (vars.iter().position(|&v| v == l.var).unwrap(), l.negated)).collect())
                .collect();
            forced_value(&truth_table(&cubes, vars.len()), &known).map(Alternative::from_bool)
        }
        PreferenceLevel::Delegation(DelegationFunction::Extension(_)) => None,
    }
}

/// A random ordering under which every agent's certified level is decided
/// when its turn comes, together with the votes it produces. `None` if the
/// certificate gets stuck.
pub fn random_valid_ordering(
    profile: &Profile,
    cert: &Certificate,
    rng: &mut ChaCha8Rng,
) -> Option<(Vec<Agent>, Vec<Alternative>)> {
    let n = profile.len();
    let mut votes: Vec<Option<Alternative>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready: Vec<(Agent, Alternative)> = (0..n)
            .filter(|&a| votes[a].is_none())
            .filter_map(|a| level_vote(profile.ballot(a).level(cert.level(a))?, &votes).map(|v| (a, v)))
            .collect();
        let (a, v) = ready.choose(rng)?.clone();
        votes[a] = Some(v);
        order.push(a);
    }
    Some((order, votes.into_iter().flatten().collect()))
}

/// Every certificate in the box given by the ballot lengths whose levels
/// can all be decided, by exhaustive replay.
pub fn consistent_certificates(profile: &Profile) -> BTreeSet<Certificate> {
    let lens: Vec<u32> = profile.ballots().iter().map(|b| b.len() as u32).collect();
    let mut out = BTreeSet::new();
    let mut levels = vec![1u32; lens.len()];
    loop {
        let cert = Certificate::new(levels.clone());
        if decided(profile, &cert) {
            out.insert(cert);
        }
        let mut i = 0;
        loop {
            if i == lens.len() {
                return out;
            }
            if levels[i] < lens[i] {
                levels[i] += 1;
                break;
            }
            levels[i] = 1;
            i += 1;
        }
    }
}

fn decided(profile: &Profile, cert: &Certificate) -> bool {
    let n = profile.len();
    let mut votes: Vec<Option<Alternative>> = vec![None; n];
    loop {
        let mut progress = false;
        for a in 0..n {
            if votes[a].is_none() {
                if let Some(v) = level_vote(profile.ballot(a).level(cert.level(a)).unwrap(), &votes) {
                    votes[a] = Some(v);
                    progress = true;
                }
            }
        }
        if !progress {
            return votes.iter().all(Option::is_some);
        }
    }
}

pub fn is_acyclic(n: usize, edges: &[(usize, usize)], removed: u32) -> bool {
    let alive = |v: usize| removed >> v & 1 == 0;
    let mut indeg = vec![0usize; n];
    for &(u, v) in edges {
        if alive(u) && alive(v) {
            indeg[v] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| alive(v) && indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for &(x, y) in edges {
            if x == u && alive(y) {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    stack.push(y);
                }
            }
        }
    }
    seen == (0..n).filter(|&v| alive(v)).count()
}

/// Size of a smallest feedback vertex set.
pub fn min_fvs(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n).filter(|&s| is_acyclic(n, edges, s)).map(|s| s.count_ones() as usize).min().unwrap()
}

/// Satisfiability by trying every assignment; literal `i` is variable
/// `|i|`, negated when `i < 0`.
pub fn satisfiable(vars: usize, clauses: &[Vec<i32>]) -> bool {
    (0u32..1 << vars).any(|row| {
        clauses.iter().all(|c| c.iter().any(|&l| (row >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0)))
    })
}

/// Random irreflexive edge set over `n` vertices.
pub fn random_digraph(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Every minimum-weight spanning arborescence rooted at the root node, as
/// one chosen incoming edge per agent, by trying every combination.
pub fn min_arborescences(g: &smartvote::optimal::WeightedDigraph) -> (u64, Vec<Vec<smartvote::optimal::Edge>>) {
    use smartvote::optimal::{Edge, Node};
    let n = g.agent_count();
    let incoming: Vec<Vec<Edge>> = (0..n).map(|a| g.edges().iter().filter(|e| e.to == a).copied().collect()).collect();
    let mut best = u64::MAX;
    let mut trees = Vec::new();
    let mut pick = vec![0usize; n];
    if incoming.iter().any(Vec::is_empty) {
        return (best, trees);
    }
    loop {
        let chosen: Vec<Edge> = (0..n).map(|a| incoming[a][pick[a]]).collect();
        let rooted = (0..n).all(|a| {
            let mut cur = a;
            for _ in 0..=n {
                match chosen[cur].from {
                    Node::Root => return true,
                    Node::Agent(b) => cur = b,
                }
            }
            false
        });
        if rooted {
            let w: u64 = chosen.iter().map(|e| u64::from(e.weight)).sum();
            if w < best {
                best = w;
                trees.clear();
            }
            if w == best {
                trees.push(chosen);
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return (best, trees);
            }
            if pick[i] + 1 < incoming[i].len() {
                pick[i] += 1;
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}
