//! Minimum-weight spanning arborescence (Chu-Liu/Edmonds) on delegation
//! graphs rooted at a virtual root.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::ballots::Agent;
use crate::error::{Error, Result};

/// Graph node. The root sorts before every agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Root,
    Agent(Agent),
}

impl Node {
    fn id(self) -> usize {
        match self {
            Node::Root => 0,
            Node::Agent(a) => a + 1,
        }
    }

    pub fn label(self, names: &[String]) -> String {
        match self {
            Node::Root => "r".to_string(),
            Node::Agent(a) => names[a].clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: Node,
    pub to: Agent,
    pub weight: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightedDigraph {
    agents: usize,
    edges: Vec<Edge>,
}

impl WeightedDigraph {
    pub fn new(agents: usize) -> Self {
        WeightedDigraph { agents, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: Node, to: Agent, weight: u32) {
        assert!(to < self.agents, "edge target out of range");
        if let Node::Agent(f) = from {
            assert!(f < self.agents, "edge source out of range");
        }
        self.edges.push(Edge { from, to, weight });
    }

    pub fn agent_count(&self) -> usize {
        self.agents
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Agents not reachable from the root, ascending.
    pub fn unreachable(&self) -> Vec<Agent> {
        let mut seen = vec![false; self.agents];
        let mut queue: VecDeque<Node> = VecDeque::from([Node::Root]);
        while let Some(u) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.from == u) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(Node::Agent(e.to));
                }
            }
        }
        (0..self.agents).filter(|&a| !seen[a]).collect()
    }

    /// Graphviz rendering; edges of `highlight` are drawn bold.
    pub fn to_dot(&self, names: &[String], highlight: Option<&Arborescence>) -> String {
        let mut s = String::from("digraph delegation {\n  r [shape=doublecircle];\n");
        for name in names.iter().take(self.agents) {
            let _ = writeln!(s, "  \"{name}\";");
        }
        for e in &self.edges {
            let bold = highlight.map(|t| t.incoming(e.to) == *e).unwrap_or(false);
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"{}];",
                e.from.label(names),
                names[e.to],
                e.weight,
                if bold { ", style=bold, color=blue" } else { "" }
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Spanning arborescence given by the incoming edge of every agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arborescence {
    incoming: Vec<Edge>,
}

impl Arborescence {
    pub(crate) fn from_incoming(incoming: Vec<Edge>) -> Self {
        Arborescence { incoming }
    }

    pub fn incoming(&self, a: Agent) -> Edge {
        self.incoming[a]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.incoming
    }

    pub fn total_weight(&self) -> u64 {
        self.incoming.iter().map(|e| u64::from(e.weight)).sum()
    }
}

/// One cycle contracted during the run: the edge finally chosen to enter the
/// cycle and the cycle edge it displaced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub cycle: Vec<Node>,
    pub entering: Edge,
    pub discarded: Edge,
}

/// Checks that `edges` picks exactly one incoming edge of `g` per agent and
/// that following them always reaches the root.
pub fn is_arborescence(g: &WeightedDigraph, edges: &[Edge]) -> bool {
    let n = g.agent_count();
    let mut parent: Vec<Option<Node>> = vec![None; n];
    for e in edges {
        if !g.edges().contains(e) || parent[e.to].replace(e.from).is_some() {
            return false;
        }
    }
    if parent.iter().any(Option::is_none) {
        return false;
    }
    (0..n).all(|start| {
        let mut u = Node::Agent(start);
        for _ in 0..=n {
            match u {
                Node::Root => return true,
                Node::Agent(a) => u = parent[a].expect("checked"),
            }
        }
        false
    })
}

#[derive(Clone, Copy)]
struct WorkEdge {
    from: usize,
    to: usize,
    weight: i64,
    orig: usize,
    key: (Node, Node),
}

impl WorkEdge {
    fn rank(&self) -> (i64, Node, Node) {
        (self.weight, self.key.0, self.key.1)
    }
}

/// Minimum-weight arborescence rooted at [`Node::Root`].
///
/// Each agent first takes its cheapest incoming edge. Any cycle among those
/// choices is contracted into one node; an edge `u -> v` entering the cycle
/// is reweighted to `w(u -> v) - w(best edge into v)`, and the contracted
/// graph is solved recursively. Ties between equally cheap edges go to the
/// one whose original (source, target) pair is smallest, the root first.
pub fn edmonds_arborescence(g: &WeightedDigraph) -> Result<(Arborescence, Vec<Contraction>)> {
    if let Some(&a) = g.unreachable().first() {
        return Err(Error::UnreachableNode(format!("#{a}")));
    }
    let work: Vec<WorkEdge> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.from != Node::Agent(e.to))
        .map(|(i, e)| WorkEdge {
            from: e.from.id(),
            to: e.to + 1,
            weight: i64::from(e.weight),
            orig: i,
            key: (e.from, Node::Agent(e.to)),
        })
        .collect();
    let members: Vec<Vec<Node>> =
        std::iter::once(vec![Node::Root]).chain((0..g.agent_count()).map(|a| vec![Node::Agent(a)])).collect();
    let mut log = Vec::new();
    let chosen = solve(g.agent_count() + 1, 0, &work, &members, g.edges(), &mut log);
    let mut incoming: Vec<Option<Edge>> = vec![None; g.agent_count()];
    for i in chosen {
        let e = g.edges()[i];
        incoming[e.to] = Some(e);
    }
    let incoming = incoming.into_iter().map(|e| e.expect("every agent reachable")).collect();
    Ok((Arborescence { incoming }, log))
}

fn solve(
    num: usize,
    root: usize,
    edges: &[WorkEdge],
    members: &[Vec<Node>],
    originals: &[Edge],
    log: &mut Vec<Contraction>,
) -> Vec<usize> {
    let mut best: Vec<Option<usize>> = vec![None; num];
    for (i, e) in edges.iter().enumerate() {
        if e.to == root || e.from == e.to {
            continue;
        }
        match best[e.to] {
            Some(j) if edges[j].rank() <= e.rank() => {}
            _ => best[e.to] = Some(i),
        }
    }
    let parent = |v: usize| edges[best[v].expect("reachable")].from;

    const NONE: usize = usize::MAX;
    let mut comp = vec![NONE; num];
    let mut visit = vec![NONE; num];
    let mut cycles = 0;
    for v in 0..num {
        let mut u = v;
        while u != root && visit[u] == NONE && comp[u] == NONE {
            visit[u] = v;
            u = parent(u);
        }
        if u != root && comp[u] == NONE && visit[u] == v {
            comp[u] = cycles;
            let mut x = parent(u);
            while x != u {
                comp[x] = cycles;
                x = parent(x);
            }
            cycles += 1;
        }
    }
    if cycles == 0 {
        return (0..num).filter(|&v| v != root).map(|v| edges[best[v].expect("reachable")].orig).collect();
    }
    let cycle_count = cycles;
    for c in comp.iter_mut() {
        if *c == NONE {
            *c = cycles;
            cycles += 1;
        }
    }
    let in_cycle = |v: usize| comp[v] < cycle_count;

    let mut next_members: Vec<Vec<Node>> = vec![Vec::new(); cycles];
    for v in 0..num {
        next_members[comp[v]].extend(members[v].iter().copied());
    }
    for m in &mut next_members {
        m.sort();
    }
    let mut next = Vec::new();
    let mut local: HashMap<usize, usize> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        let (u, v) = (comp[e.from], comp[e.to]);
        if u == v {
            continue;
        }
        let shift = if in_cycle(e.to) { edges[best[e.to].expect("reachable")].weight } else { 0 };
        local.insert(e.orig, i);
        next.push(WorkEdge { from: u, to: v, weight: e.weight - shift, orig: e.orig, key: e.key });
    }
    let chosen = solve(cycles, comp[root], &next, &next_members, originals, log);

    let mut out = chosen.clone();
    for c in 0..cycle_count {
        let entering = chosen
            .iter()
            .map(|o| (*o, edges[local[o]]))
            .find(|(_, e)| comp[e.to] == c)
            .expect("one edge enters each contracted cycle");
        let entered = entering.1.to;
        for v in (0..num).filter(|&v| comp[v] == c && v != entered) {
            out.push(edges[best[v].expect("reachable")].orig);
        }
        log.push(Contraction {
            cycle: next_members[c].clone(),
            entering: originals[entering.0],
            discarded: originals[edges[best[entered].expect("reachable")].orig],
        });
    }
    out
}
