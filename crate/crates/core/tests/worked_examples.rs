use std::collections::BTreeSet;

use smartvote::analysis::{
    apply_rule, check_cast_participation, check_guru_participation, influence_sets, is_pareto_optimal, pareto_dominates,
    BallotSpace, VotingRule,
};
use smartvote::ballots::{classify_language, validate_profile, Alternative};
use smartvote::certificates::{check_consistent, outcome_of, Certificate, Consistency, OutcomeVector};
use smartvote::fixtures;
use smartvote::greedy::{enumerate_random_branches, unravel, RandomState, UpdateKind, DEFAULT_BRANCH_CAP};
use smartvote::optimal::{build_delegation_graph, minmax_exact, minmax_liquid, minsum_exact, minsum_liquid, Node};
use smartvote::procedures::Procedure;

fn c(v: &[u32]) -> Certificate {
    Certificate::new(v.to_vec())
}

fn o(t: &[&str]) -> OutcomeVector {
    OutcomeVector::from_tokens(t)
}

fn run(p: &smartvote::ballots::Profile, kind: UpdateKind) -> (OutcomeVector, Certificate) {
    let r = unravel(p, kind, &mut RandomState::new(1)).unwrap();
    (r.outcome, r.certificate)
}

fn branches(p: &smartvote::ballots::Profile, kind: UpdateKind) -> BTreeSet<(OutcomeVector, Certificate)> {
    enumerate_random_branches(p, kind, DEFAULT_BRANCH_CAP)
        .unwrap()
        .into_iter()
        .map(|b| (b.outcome, b.certificate))
        .collect()
}

#[test]
fn table1_certificates() {
    let p = fixtures::table1();
    assert!(validate_profile(&p).is_ok());
    assert!(matches!(check_consistent(&p, &c(&[1, 1, 1, 1, 1])).unwrap(), Consistency::Inconsistent { .. }));
    match check_consistent(&p, &c(&[1, 1, 2, 1, 1])).unwrap() {
        Consistency::Consistent(w) => {
            assert_eq!(w.outcome, o(&["0", "1", "0", "0", "0"]));
            assert_eq!(w.ordering, vec![1, 2, 0, 4, 3]);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(outcome_of(&p, &c(&[1, 1, 1, 2, 1])).unwrap(), o(&["1", "1", "1", "1", "1"]));
    let best = minsum_exact(&p).unwrap();
    assert_eq!(best.objective, 6);
    let certs: Vec<&Certificate> = best.solutions.iter().map(|(c, _)| c).collect();
    assert!(certs.contains(&&c(&[1, 1, 2, 1, 1])));
    assert!(certs.contains(&&c(&[1, 1, 1, 2, 1])));
    assert_eq!(minmax_exact(&p).unwrap().objective, 2);
    assert!(is_pareto_optimal(&p, &c(&[1, 1, 2, 1, 1])).unwrap());
}

#[test]
fn table2_minsum_versus_minmax() {
    let p = fixtures::table2();
    let best = minsum_exact(&p).unwrap();
    let mut expected = vec![1; 26];
    expected[0] = 4;
    assert_eq!(best.objective, 29);
    assert_eq!(best.solutions.len(), 1);
    assert_eq!(best.solutions[0].0, c(&expected));

    let mm = minmax_exact(&p).unwrap();
    assert_eq!(mm.objective, 2);
    let certs: BTreeSet<Certificate> = mm.solutions.iter().map(|(c, _)| c.clone()).collect();
    let mut first = vec![2; 26];
    first[0] = 1;
    let mut second = vec![2; 26];
    second[1] = 1;
    assert_eq!(certs, [c(&first), c(&second), c(&[2; 26])].into_iter().collect());

    assert!(is_pareto_optimal(&p, &c(&first)).unwrap());
    assert!(!best.solutions.iter().any(|(x, _)| *x == c(&first)));
}

#[test]
fn figure1_greedy_rules() {
    let p = fixtures::figure1();
    assert_eq!(run(&p, UpdateKind::U), (o(&["0", "1", "0", "0", "1", "1"]), c(&[1, 1, 1, 2, 2, 2])));
    assert_eq!(run(&p, UpdateKind::DU), (o(&["0", "1", "0", "0", "1", "0"]), c(&[1, 1, 1, 2, 2, 1])));
    assert!(branches(&p, UpdateKind::RU).contains(&(o(&["1", "1", "0", "1", "1", "1"]), c(&[1, 1, 1, 1, 1, 2]))));
    let mm: Vec<Certificate> = minmax_exact(&p).unwrap().solutions.into_iter().map(|(c, _)| c).collect();
    assert!(mm.contains(&c(&[1, 1, 1, 2, 1, 1])));
    assert!(mm.contains(&c(&[2, 1, 1, 2, 2, 2])));
}

#[test]
fn table4_all_procedures() {
    let p = fixtures::table4();
    assert!(classify_language(&p).in_liquid);
    assert_eq!(run(&p, UpdateKind::U), (o(&["1", "0", "1", "1"]), c(&[3, 3, 3, 2])));
    assert_eq!(run(&p, UpdateKind::DU), (o(&["0", "0", "1", "1"]), c(&[1, 3, 3, 2])));
    let ru: BTreeSet<_> = [
        (o(&["1", "1", "1", "1"]), c(&[3, 1, 1, 2])),
        (o(&["0", "0", "0", "1"]), c(&[1, 3, 1, 2])),
        (o(&["1", "1", "1", "1"]), c(&[2, 1, 3, 2])),
        (o(&["1", "1", "1", "1"]), c(&[1, 2, 3, 2])),
    ]
    .into_iter()
    .collect();
    assert_eq!(branches(&p, UpdateKind::RU), ru);
    let dru: BTreeSet<_> = [
        (o(&["0", "0", "0", "1"]), c(&[1, 3, 1, 2])),
        (o(&["1", "1", "1", "1"]), c(&[2, 1, 3, 2])),
        (o(&["1", "1", "1", "1"]), c(&[1, 2, 3, 2])),
    ]
    .into_iter()
    .collect();
    assert_eq!(branches(&p, UpdateKind::DRU), dru);
    let ms = minsum_exact(&p).unwrap();
    assert_eq!(ms.solutions, vec![(c(&[1, 3, 1, 1]), o(&["0", "0", "0", "0"]))]);
    let mm = minmax_exact(&p).unwrap();
    assert_eq!(mm.objective, 3);
    assert!(mm.solutions.contains(&(c(&[3, 3, 2, 2]), o(&["1", "0", "0", "1"]))));

    // Dominance between the greedy certificates.
    assert!(pareto_dominates(&c(&[1, 3, 3, 2]), &c(&[3, 3, 3, 2])).unwrap());
    assert!(!pareto_dominates(&c(&[2, 1, 3, 2]), &c(&[1, 3, 3, 2])).unwrap());
    assert!(!pareto_dominates(&c(&[1, 3, 3, 2]), &c(&[2, 1, 3, 2])).unwrap());
}

#[test]
fn table6_u_not_dominated_by_du() {
    let p = fixtures::table6();
    let (uo, uc) = run(&p, UpdateKind::U);
    let (duo, duc) = run(&p, UpdateKind::DU);
    assert_eq!((uo, uc.clone()), (o(&["1", "1", "1", "1", "1", "0"]), c(&[1, 1, 1, 1, 2, 2])));
    assert_eq!((duo, duc.clone()), (o(&["0", "0", "0", "1", "0", "0"]), c(&[3, 3, 3, 1, 1, 2])));
    assert!(!pareto_dominates(&duc, &uc).unwrap());
    assert!(branches(&p, UpdateKind::RU).contains(&(o(&["0", "0", "0", "1", "0", "0"]), c(&[3, 1, 1, 1, 1, 2]))));
}

#[test]
fn table3_liquid_procedures() {
    let p = fixtures::table3();
    let class = classify_language(&p);
    assert!(class.in_liquid && class.in_liquid_star);
    let g = build_delegation_graph(&p).unwrap();
    assert_eq!(g.edges().len(), 11);
    let r = minsum_liquid(&p).unwrap();
    assert_eq!(r.arborescence.total_weight(), 6);
    assert_eq!(r.certificate, c(&[1, 2, 1, 1, 1]));
    assert_eq!(r.outcome, o(&["1", "1", "1", "1", "0"]));
    assert_eq!(r.contractions.len(), 1);
    assert_eq!(r.contractions[0].entering.from, Node::Agent(0));

    let ms: BTreeSet<Certificate> = minsum_exact(&p).unwrap().solutions.into_iter().map(|(c, _)| c).collect();
    assert_eq!(ms, [c(&[1, 2, 1, 1, 1]), c(&[1, 1, 2, 1, 1]), c(&[1, 1, 1, 2, 1])].into_iter().collect());

    let mm = minmax_liquid(&p).unwrap();
    assert_eq!(mm.stop_level, 2);
    assert_eq!(mm.certificate.max_level(), 2);
    let edges: BTreeSet<(Node, usize)> = mm.tree.edges().iter().map(|e| (e.from, e.to)).collect();
    let expected: BTreeSet<(Node, usize)> =
        [(Node::Root, 0), (Node::Root, 4), (Node::Agent(0), 1), (Node::Agent(1), 3), (Node::Agent(3), 2)].into_iter().collect();
    assert_eq!(edges, expected);
}

#[test]
fn remark4_all_agree() {
    let p = fixtures::remark4();
    for proc in Procedure::STANDARD.into_iter().chain([Procedure::MinSumLiquid, Procedure::MinMaxLiquid]) {
        let results = proc.possible_results(&p).unwrap();
        assert_eq!(results, vec![(c(&[1, 1, 1]), o(&["*", "*", "1"]))], "{proc}");
    }
}

#[test]
fn table5_guru_participation() {
    let p = fixtures::table5();
    assert_eq!(run(&p, UpdateKind::U).0, o(&["1", "1", "0", "0", "1", "0"]));
    assert_eq!(apply_rule(VotingRule::RMaj, &o(&["1", "1", "0", "0", "1", "0"])).unwrap(), Alternative::abstain());
    for kind in [UpdateKind::U, UpdateKind::DU] {
        let v = check_guru_participation(&p, 0, VotingRule::RMaj, kind).unwrap();
        assert!(v.iter().any(|v| v.follower == 1), "{kind}");
        let hit = v.iter().find(|v| v.follower == 1).unwrap();
        assert_eq!(hit.truthful.result, Alternative::abstain());
        assert_eq!(hit.deviating.outcome, o(&["1", "*", "*", "*", "1", "0"]));
        assert_eq!(hit.deviating.result, Alternative::one());
    }
    let all: BTreeSet<_> = branches(&p, UpdateKind::RU);
    assert!(all.contains(&(o(&["1", "1", "1", "1", "1", "0"]), c(&[1, 2, 1, 1, 1, 1]))));
    assert!(all.contains(&(o(&["1", "0", "0", "0", "1", "0"]), c(&[1, 1, 2, 1, 1, 1]))));
    assert!(all.contains(&(o(&["1", "0", "0", "0", "1", "0"]), c(&[1, 1, 1, 2, 1, 1]))));
    for kind in [UpdateKind::RU, UpdateKind::DRU] {
        let v = check_guru_participation(&p, 0, VotingRule::RMaj, kind).unwrap();
        let bad: BTreeSet<Certificate> = v.iter().filter(|v| v.follower == 1).map(|v| v.truthful.certificate.clone()).collect();
        assert_eq!(bad, [c(&[1, 1, 2, 1, 1, 1]), c(&[1, 1, 1, 2, 1, 1])].into_iter().collect(), "{kind}");
    }
}

#[test]
fn table5_influence() {
    let p = fixtures::table5();
    let (_, cert) = run(&p, UpdateKind::U);
    let f = influence_sets(&p, &cert, 5).unwrap();
    assert!(f.direct.is_subset(&f.transitive));
    let e = influence_sets(&p, &cert, 4).unwrap();
    assert!(e.direct.is_empty() && e.transitive.is_empty());
}

#[test]
fn cast_participation_fails_for_negated_delegations() {
    let p = fixtures::cast_counterexample();
    assert_eq!(run(&p, UpdateKind::U).0, o(&["1", "0", "0"]));
    for kind in UpdateKind::ALL {
        let v = check_cast_participation(&p, 0, VotingRule::Maj, kind, BallotSpace::LiquidStar).unwrap();
        assert!(v.iter().any(|v| v.ballot.levels().len() == 1 && v.ballot.backup() == &Alternative::zero()), "{kind}");
    }
}

#[test]
fn example_ballots_classify() {
    let c1 = classify_language(&fixtures::example1(1));
    assert_eq!(c1.max_delegation_count, 0);
    let c3 = classify_language(&fixtures::example1(3));
    assert!(c3.in_liquid_star);
    assert_eq!(c3.max_delegation_count, 2);
    let c4 = classify_language(&fixtures::example1(4));
    assert!(c4.in_bool && !c4.in_liquid);
    assert_eq!(c4.max_delegation_count, 2);
    let c5 = classify_language(&fixtures::example1(5));
    assert!(!c5.in_bool);
    for i in 1..=5 {
        assert!(validate_profile(&fixtures::example1(i)).is_ok(), "ballot {i}");
    }
    // The extension delegation behaves like a voting rule on known votes.
    let p2 = fixtures::example1(2);
    let r = unravel(&p2, UpdateKind::U, &mut RandomState::new(0)).unwrap();
    assert_eq!(r.outcome.get(0), &Alternative::one());
}
