//! Worked example profiles used by the tests, the acceptance suite and the
//! `fixture` CLI command.

use std::sync::Arc;

use crate::analysis::{apply_rule, VotingRule};
use crate::ballots::{
    dnf, id, vote, Agent, Alternative, DelegationFunction, DelegationRule, Domain, LevelSpec, PreferenceLevel, Profile,
    SmartBallot,
};
use crate::certificates::OutcomeVector;

fn build(domain: Domain, agents: &[&str], ballots: &[(&str, Vec<LevelSpec>)]) -> Profile {
    Profile::build(domain, agents, ballots).expect("fixture is well formed")
}

/// Five agents where the all-first-preference certificate is inconsistent.
pub fn table1() -> Profile {
    build(
        Domain::binary(),
        &["a", "b", "c", "d", "e"],
        &[
            ("a", vec![dnf("b&c"), id("d"), vote("1")]),
            ("b", vec![vote("1")]),
            ("c", vec![id("d"), vote("0")]),
            ("d", vec![id("e"), vote("1")]),
            ("e", vec![id("a"), id("b"), vote("0")]),
        ],
    )
}

/// Agents `a` to `z`: `a` delegates to shrinking disjunctions of the others,
/// everyone else copies `a` and falls back to 0.
pub fn table2() -> Profile {
    let names: Vec<String> = ('a'..='z').map(|c| c.to_string()).collect();
    let or_from = |skip: usize| names[skip..].join(" | ");
    let mut ballots: Vec<(&str, Vec<LevelSpec>)> = vec![("a", vec![dnf(&or_from(1)), dnf(&or_from(2)), dnf(&or_from(3)), vote("1")])];
    for n in &names[1..] {
        ballots.push((n.as_str(), vec![id("a"), vote("0")]));
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    build(Domain::binary(), &refs, &ballots)
}

/// Liquid profile whose first preferences form the cycle b -> c -> d -> b.
pub fn table3() -> Profile {
    build(
        Domain::from_tokens(&["0", "1", "*"]).expect("domain"),
        &["a", "b", "c", "d", "e"],
        &[
            ("a", vec![vote("1")]),
            ("b", vec![id("c"), id("a"), vote("*")]),
            ("c", vec![id("d"), id("e"), vote("*")]),
            ("d", vec![id("b"), id("e"), vote("*")]),
            ("e", vec![vote("0")]),
        ],
    )
}

/// Liquid profile on which the four greedy rules all differ.
pub fn table4() -> Profile {
    build(
        Domain::binary(),
        &["a", "b", "c", "d"],
        &[
            ("a", vec![id("b"), id("c"), id("d"), vote("1")]),
            ("b", vec![id("a"), id("c"), vote("0")]),
            ("c", vec![id("a"), id("b"), vote("1")]),
            ("d", vec![id("a"), vote("1")]),
        ],
    )
}

/// Liquid* profile where agent `a` gains when its follower `b` abstains.
pub fn table5() -> Profile {
    build(
        Domain::from_tokens(&["0", "1", "*"]).expect("domain"),
        &["a", "b", "c", "d", "e", "f"],
        &[
            ("a", vec![vote("1")]),
            ("b", vec![id("c"), id("a"), vote("*")]),
            ("c", vec![id("d"), id("f"), vote("*")]),
            ("d", vec![id("b"), id("f"), vote("*")]),
            ("e", vec![vote("1")]),
            ("f", vec![vote("0")]),
        ],
    )
}

/// Bool profile where `U` reaches a certificate that `DU` does not dominate.
pub fn table6() -> Profile {
    build(
        Domain::binary(),
        &["a", "b", "c", "d", "e", "f"],
        &[
            ("a", vec![dnf("b | e"), dnf("c | e"), vote("0")]),
            ("b", vec![dnf("c | e"), dnf("a | e"), vote("0")]),
            ("c", vec![dnf("a | e"), dnf("b | e"), vote("0")]),
            ("d", vec![vote("1")]),
            ("e", vec![id("f"), id("d"), vote("0")]),
            ("f", vec![id("e"), vote("0")]),
        ],
    )
}

/// Six agents used to contrast the four greedy rules.
pub fn figure1() -> Profile {
    build(
        Domain::binary(),
        &["a", "b", "c", "d", "e", "f"],
        &[
            ("a", vec![dnf("b&c | b&d"), id("e"), vote("1")]),
            ("b", vec![vote("1")]),
            ("c", vec![vote("0")]),
            ("d", vec![id("e"), vote("0")]),
            ("e", vec![id("f"), vote("1")]),
            ("f", vec![id("a"), id("b"), vote("1")]),
        ],
    )
}

/// Every procedure returns (*, *, 1) here.
pub fn remark4() -> Profile {
    build(
        Domain::from_tokens(&["1", "0", "*"]).expect("domain"),
        &["a", "b", "c"],
        &[("a", vec![id("b"), id("c"), vote("*")]), ("b", vec![vote("*")]), ("c", vec![vote("1")])],
    )
}

/// Bool profile where `a` does better by voting 0 instead of 1 under Maj.
pub fn cast_counterexample() -> Profile {
    build(
        Domain::binary(),
        &["a", "b", "c"],
        &[("a", vec![vote("1")]), ("b", vec![dnf("~a"), vote("0")]), ("c", vec![dnf("~a"), vote("0")])],
    )
}

/// Delegation to a voting rule applied to the delegates' votes. The forced
/// value is found by trying every completion of the unknown votes.
pub struct RuleDelegation {
    pub delegates: Vec<Agent>,
    pub rule: VotingRule,
    pub domain: Vec<Alternative>,
}

impl DelegationRule for RuleDelegation {
    fn delegates(&self) -> Vec<Agent> {
        self.delegates.clone()
    }

    fn necessary_winner(&self, votes: &[Option<Alternative>]) -> Option<Alternative> {
        let unknown: Vec<usize> = (0..self.delegates.len()).filter(|&i| votes[self.delegates[i]].is_none()).collect();
        let mut current: Vec<Alternative> =
            self.delegates.iter().map(|&d| votes[d].clone().unwrap_or_else(|| self.domain[0].clone())).collect();
        let mut result: Option<Alternative> = None;
        let mut digits = vec![0usize; unknown.len()];
        loop {
            for (slot, &i) in unknown.iter().enumerate() {
                current[i] = self.domain[digits[slot]].clone();
            }
            let r = apply_rule(self.rule, &OutcomeVector::new(current.clone())).ok()?;
            match &result {
                None => result = Some(r),
                Some(prev) if *prev != r => return None,
                Some(_) => {}
            }
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return result;
                }
                digits[i] += 1;
                if digits[i] < self.domain.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    fn describe(&self) -> String {
        let ds: Vec<String> = self.delegates.iter().map(|d| format!("#{d}")).collect();
        format!("{}({})", self.rule, ds.join(","))
    }
}

/// The sample ballots for agent `a` among six agents `a`..`f`; everyone
/// else votes directly. `which` runs from 1 to 5.
pub fn example1(which: usize) -> Profile {
    let agents = ["a", "b", "c", "d", "e", "f"];
    let ternary = Domain::from_tokens(&["1", "0", "*"]).expect("domain");
    let others = |v: &str| -> Vec<(&'static str, Vec<LevelSpec>)> {
        agents[1..].iter().map(|n| (*n, vec![vote(v)])).collect()
    };
    let with_a = |a: Vec<LevelSpec>, domain: Domain, v: &str| {
        let mut ballots = vec![("a", a)];
        ballots.extend(others(v));
        build(domain, &agents, &ballots)
    };
    let rule = |rule: VotingRule, delegates: &[Agent], domain: &Domain| {
        PreferenceLevel::Delegation(DelegationFunction::Extension(Arc::new(RuleDelegation {
            delegates: delegates.to_vec(),
            rule,
            domain: domain.alternatives().to_vec(),
        })))
    };
    match which {
        1 => with_a(vec![vote("1")], ternary, "1"),
        2 => {
            let base = with_a(vec![vote("0")], ternary.clone(), "1");
            let ballot = SmartBallot::new(vec![rule(VotingRule::RMaj, &[1, 2, 3, 4, 5], &ternary), PreferenceLevel::Direct(Alternative::zero())])
                .expect("well formed");
            base.with_ballot(0, ballot).expect("valid")
        }
        3 => with_a(vec![id("d"), id("e"), vote("*")], ternary, "*"),
        4 => with_a(vec![dnf("b | f"), dnf("c&b | ~e&b"), vote("1")], Domain::binary(), "1"),
        5 => {
            let base = with_a(vec![vote("1")], Domain::binary(), "1");
            let f = crate::dnf::parse("c&b | ~e&b", |n| agents.iter().position(|a| *a == n)).expect("formula");
            let second = PreferenceLevel::Delegation(DelegationFunction::Dnf(f));
            let ballot = SmartBallot::new(vec![
                rule(VotingRule::Maj, &[1, 2, 5], &Domain::binary()),
                second,
                PreferenceLevel::Direct(Alternative::one()),
            ])
            .expect("well formed");
            base.with_ballot(0, ballot).expect("valid")
        }
        _ => panic!("example ballots are numbered 1 to 5"),
    }
}

/// Named fixtures that have a file form.
pub fn all() -> Vec<(&'static str, Profile)> {
    vec![
        ("table1", table1()),
        ("table2", table2()),
        ("table3", table3()),
        ("table4", table4()),
        ("table5", table5()),
        ("table6", table6()),
        ("fig1", figure1()),
        ("remark4", remark4()),
        ("cast-counterexample", cast_counterexample()),
        ("example1-i", example1(1)),
        ("example1-iii", example1(3)),
        ("example1-iv", example1(4)),
    ]
}

pub fn by_name(name: &str) -> Option<Profile> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}
