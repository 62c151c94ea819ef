mod common;

use std::collections::{BTreeSet, HashSet};

use common::{check_dot, specs, states_only_spec, types};
use proptest::prelude::*;
use tsop_core::automaton::{
    build_automaton, build_automaton_with, export_dot, export_json, import_json, MatchingAutomaton,
};
use tsop_core::oracle::legal_states_oracle;
use tsop_core::par::Exec;
use tsop_core::spec::{parse_spec, SpecErrorKind};

fn tuples(a: &MatchingAutomaton) -> BTreeSet<Vec<tsop_core::automaton::Counter>> {
    a.states().iter().map(|s| s.counters.clone()).collect()
}

/// Every state reachable from `from` through receives of tags other than
/// `skip`, including `from` itself.
fn reachable_without(a: &MatchingAutomaton, from: usize, skip: usize) -> HashSet<usize> {
    let mut seen = HashSet::from([from]);
    let mut stack = vec![from];
    while let Some(s) = stack.pop() {
        for t in (0..a.tags().len()).filter(|&t| t != skip) {
            if let Some(j) = a.receive(s, t) {
                if seen.insert(j) {
                    stack.push(j);
                }
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn states_match_the_legal_tuple_oracle((ty, sig) in types()) {
        let parsed = parse_spec(&states_only_spec(&ty, &sig));
        if ty.semantics(&sig).is_empty() {
            prop_assert_eq!(parsed.unwrap_err().kind, SpecErrorKind::EmptyProtocol);
            return Ok(());
        }
        let spec = parsed.unwrap();
        let a = build_automaton(&spec).unwrap();
        prop_assert_eq!(tuples(&a), legal_states_oracle(&spec).unwrap());
        prop_assert_eq!(a.states()[a.initial()].counters.iter().all(|c| c.is_zero()), true);
    }

    #[test]
    fn annotations_follow_every_receive_path(spec in specs()) {
        let a = build_automaton(&spec).unwrap();
        let sig = spec.signature();
        prop_assert_eq!(&a.states()[0].annotation, &spec.protocol.semantics(sig));
        for r in a.receives() {
            let expected = a.states()[r.from].annotation.derivative(r.tag);
            prop_assert_eq!(&a.states()[r.to].annotation, &expected);
        }
        // Syntactic derivatives along a breadth-first spanning tree agree too.
        let mut ty = vec![None; a.states().len()];
        ty[0] = Some(spec.protocol.clone());
        for r in a.receives() {
            if ty[r.to].is_none() {
                let parent = ty[r.from].clone().expect("receives are in discovery order");
                ty[r.to] = Some(parent.derivative(&sig.tags()[r.tag]));
            }
        }
        for (s, t) in a.states().iter().zip(&ty) {
            prop_assert_eq!(&t.as_ref().unwrap().semantics(sig), &s.annotation);
        }
    }

    #[test]
    fn receives_are_deterministic_and_complete(spec in specs()) {
        let a = build_automaton(&spec).unwrap();
        let mut seen = HashSet::new();
        for r in a.receives() {
            prop_assert!(seen.insert((r.from, r.tag)), "two targets for ({}, {})", r.from, r.tag);
        }
        for (s, state) in a.states().iter().enumerate() {
            for t in 0..a.tags().len() {
                let legal = !state.annotation.derivative(t).is_empty();
                prop_assert_eq!(a.receive(s, t).is_some(), legal);
            }
        }
    }

    #[test]
    fn consume_targets_are_legal(spec in specs()) {
        let a = build_automaton(&spec).unwrap();
        let legal = legal_states_oracle(&spec).unwrap();
        for c in a.consumes() {
            prop_assert!(c.to < a.states().len());
            prop_assert!(legal.contains(&a.states()[c.to].counters));
            let pattern = &a.reactions()[c.reaction].pattern;
            prop_assert!(pattern.iter().all(|&t| a.states()[c.from].counters[t].is_present()));
        }
    }

    #[test]
    fn violations_persist_under_other_receives(spec in specs()) {
        let a = build_automaton(&spec).unwrap();
        for s in 0..a.states().len() {
            for t in 0..a.tags().len() {
                if a.receive(s, t).is_none() {
                    for j in reachable_without(&a, s, t) {
                        prop_assert!(a.receive(j, t).is_none(), "{} gained `{}` from {}", a.label(j), t, a.label(s));
                    }
                }
            }
        }
    }

    #[test]
    fn sequential_and_parallel_builds_agree(spec in specs()) {
        prop_assert_eq!(
            build_automaton_with(&spec, Exec::Sequential).unwrap(),
            build_automaton_with(&spec, Exec::Parallel).unwrap()
        );
    }

    #[test]
    fn json_round_trips(spec in specs()) {
        let a = build_automaton(&spec).unwrap();
        prop_assert_eq!(import_json(&export_json(&a)).unwrap(), a);
    }

    #[test]
    fn dot_output_is_well_formed(spec in specs()) {
        let a = build_automaton(&spec).unwrap();
        let dot = export_dot(&a);
        prop_assert_eq!(check_dot(&dot), Ok(()), "{}", dot);
    }

    #[test]
    fn pretty_print_round_trips(spec in specs()) {
        let text = spec.pretty_print();
        prop_assert_eq!(parse_spec(&text).unwrap(), spec.clone());
        let spaced = text.replace(", ", " ,  ").replace(" & ", "\t&\t").replace('(', " ( ");
        prop_assert_eq!(parse_spec(&spaced).unwrap(), spec);
    }
}

#[test]
fn empty_protocol_has_no_automaton() {
    let err = parse_spec("object A\nprotocol 0\nstate a()\n").unwrap_err();
    assert_eq!(err.kind, SpecErrorKind::EmptyProtocol);
    let sig = tsop_core::protocol::Signature::from_names(&["a"]).unwrap();
    let zero = tsop_core::protocol::ProtocolType::Zero;
    assert!(zero.semantics(&sig).is_empty());
    assert!(
        legal_states_oracle(&parse_spec("object A\nprotocol 1\n").unwrap())
            .unwrap()
            .len()
            == 1
    );
}

#[test]
fn generated_specs_exercise_reactions() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = specs();
    let (mut with_consumes, mut with_init) = (0, 0);
    for _ in 0..200 {
        let spec = strategy.new_tree(&mut runner).unwrap().current();
        with_consumes += usize::from(!build_automaton(&spec).unwrap().consumes().is_empty());
        with_init += usize::from(!spec.init.is_empty());
    }
    assert!(with_consumes > 40, "{with_consumes}");
    assert!(with_init > 40, "{with_init}");
}

#[test]
fn dot_checker_rejects_broken_graphs() {
    assert!(check_dot("digraph G { a -> b [label=\"x\"]; }").is_ok());
    assert!(check_dot("digraph G { a -> b [label=\"x]; }").is_err());
    assert!(check_dot("digraph G { a -> ; }").is_err());
    assert!(check_dot("digraph G { a -> b").is_err());
    assert!(check_dot("graph G { }").is_err());
}
