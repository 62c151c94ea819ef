//! The matching automaton of an object.
//!
//! States are tuples of per-tag counters describing the mailbox: an exact
//! count for bounded tags, and `0` or `$` (at least one) for unbounded tags.
//! Every state carries the semantic derivative of the protocol by its
//! mailbox contents. States whose annotation would be empty are illegal and
//! never built, so receiving a message that would lead to one shows up as a
//! missing receive transition.

mod export;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::par::{self, Exec};
use crate::protocol::{Bound, ProtocolError, SemSet, Tag};
use crate::spec::{MessageKind, ObjectSpec};

pub use export::{export_dot, export_json, import_json};

/// One counter of a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Counter {
    Exact(u32),
    /// At least one message (unbounded tags only).
    AtLeastOne,
}

impl Counter {
    pub fn is_zero(self) -> bool {
        self == Counter::Exact(0)
    }

    pub fn is_present(self) -> bool {
        !self.is_zero()
    }

    fn increment(self, bound: Bound) -> Counter {
        match (self, bound) {
            (Counter::Exact(n), Bound::Bounded(max)) => {
                assert!(n < max, "counter exceeds bound {max} on a legal transition");
                Counter::Exact(n + 1)
            }
            (_, Bound::Unbounded) => Counter::AtLeastOne,
            (Counter::AtLeastOne, Bound::Bounded(_)) => unreachable!("`$` on a bounded tag"),
        }
    }
}

impl fmt::Display for Counter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counter::Exact(n) => write!(f, "{n}"),
            Counter::AtLeastOne => f.write_str("$"),
        }
    }
}

/// Renders a counter tuple; concatenated (`01$0`) when every counter is a
/// single character.
pub fn counters_label(counters: &[Counter]) -> String {
    let parts: Vec<String> = counters.iter().map(Counter::to_string).collect();
    if parts.iter().all(|p| p.len() == 1) {
        parts.concat()
    } else {
        parts.join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterState {
    pub index: usize,
    pub counters: Vec<Counter>,
    pub annotation: SemSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReceiveTransition {
    pub from: usize,
    pub tag: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConsumeTransition {
    pub from: usize,
    pub reaction: usize,
    /// One flag per unbounded pattern tag, in signature order: whether the
    /// consumed message was the last of its kind.
    pub emptied: Vec<(usize, bool)>,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagInfo {
    pub name: Tag,
    pub kind: MessageKind,
    pub bound: Bound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionInfo {
    pub name: String,
    /// Pattern tag indices in signature order.
    pub pattern: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("empty protocol: the automaton has no legal state")]
    EmptyProtocol,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("malformed automaton: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingAutomaton {
    object: String,
    tags: Vec<TagInfo>,
    reactions: Vec<ReactionInfo>,
    states: Vec<CounterState>,
    receives: Vec<ReceiveTransition>,
    consumes: Vec<ConsumeTransition>,
    receive_table: Vec<Vec<Option<usize>>>,
    consumes_from: Vec<Vec<usize>>,
}

/// Builds the pruned matching automaton of `spec`.
pub fn build_automaton(spec: &ObjectSpec) -> Result<MatchingAutomaton, AutomatonError> {
    build_automaton_with(spec, Exec::default())
}

pub fn build_automaton_with(
    spec: &ObjectSpec,
    exec: Exec,
) -> Result<MatchingAutomaton, AutomatonError> {
    let sig = spec.signature();
    let initial = spec.protocol.semantics(sig);
    if initial.is_empty() {
        return Err(AutomatonError::EmptyProtocol);
    }
    let tags = sig
        .tags()
        .iter()
        .map(|t| {
            Ok(TagInfo {
                name: t.clone(),
                kind: spec.message(t.as_str()).expect("declared").kind,
                bound: spec.protocol.bound(t, sig)?,
            })
        })
        .collect::<Result<Vec<_>, ProtocolError>>()?;
    let names = spec.reaction_names();
    let reactions = spec
        .reactions
        .iter()
        .zip(names)
        .map(|(r, name)| {
            let mut pattern: Vec<usize> = r
                .pattern
                .iter()
                .map(|p| sig.index_of(p.tag.as_str()).expect("declared"))
                .collect();
            pattern.sort_unstable();
            ReactionInfo { name, pattern }
        })
        .collect();
    Ok(explore(spec.name.clone(), tags, reactions, initial, exec))
}

/// Breadth-first discovery from the empty mailbox; each frontier is expanded
/// in parallel and merged in (state, tag) order, so indices match a plain
/// sequential BFS.
fn explore(
    object: String,
    tags: Vec<TagInfo>,
    reactions: Vec<ReactionInfo>,
    initial: SemSet,
    exec: Exec,
) -> MatchingAutomaton {
    let n = tags.len();
    let zero = vec![Counter::Exact(0); n];
    let mut states = vec![CounterState {
        index: 0,
        counters: zero.clone(),
        annotation: initial,
    }];
    let mut index_of: HashMap<Vec<Counter>, usize> = HashMap::from([(zero, 0)]);
    let mut receives = Vec::new();
    let mut frontier = vec![0usize];

    while !frontier.is_empty() {
        let expansions = par::map(exec, &frontier, |&s| {
            let state = &states[s];
            (0..n)
                .map(|t| {
                    let annotation = state.annotation.derivative(t);
                    if annotation.is_empty() {
                        return None;
                    }
                    let mut counters = state.counters.clone();
                    counters[t] = counters[t].increment(tags[t].bound);
                    Some((counters, annotation))
                })
                .collect::<Vec<_>>()
        });
        let mut next = Vec::new();
        for (&from, row) in frontier.iter().zip(expansions) {
            for (tag, step) in row.into_iter().enumerate() {
                let Some((counters, annotation)) = step else {
                    continue;
                };
                let to = match index_of.get(&counters) {
                    Some(&j) => {
                        assert_eq!(
                            states[j].annotation,
                            annotation,
                            "annotation of {} depends on the path",
                            counters_label(&counters)
                        );
                        j
                    }
                    None => {
                        let j = states.len();
                        index_of.insert(counters.clone(), j);
                        states.push(CounterState {
                            index: j,
                            counters,
                            annotation,
                        });
                        next.push(j);
                        j
                    }
                };
                receives.push(ReceiveTransition { from, tag, to });
            }
        }
        frontier = next;
    }

    let consumes: Vec<ConsumeTransition> = par::map(exec, &states, |state| {
        let mut out = Vec::new();
        for (r, reaction) in reactions.iter().enumerate() {
            let matches = reaction.pattern.iter().all(|&t| match tags[t].bound {
                Bound::Bounded(_) => state.counters[t].is_present(),
                Bound::Unbounded => state.counters[t] == Counter::AtLeastOne,
            });
            if !matches {
                continue;
            }
            let unbounded: Vec<usize> = reaction
                .pattern
                .iter()
                .copied()
                .filter(|&t| tags[t].bound == Bound::Unbounded)
                .collect();
            for mask in 0..1u32 << unbounded.len() {
                let mut counters = state.counters.clone();
                let mut emptied = Vec::new();
                for &t in &reaction.pattern {
                    if let Counter::Exact(c) = counters[t] {
                        counters[t] = Counter::Exact(c - 1);
                    }
                }
                for (bit, &t) in unbounded.iter().enumerate() {
                    let gone = mask & (1 << bit) != 0;
                    if gone {
                        counters[t] = Counter::Exact(0);
                    }
                    emptied.push((t, gone));
                }
                let to = *index_of.get(&counters).unwrap_or_else(|| {
                    panic!(
                        "consume target {} is not a legal state",
                        counters_label(&counters)
                    )
                });
                out.push(ConsumeTransition {
                    from: state.index,
                    reaction: r,
                    emptied,
                    to,
                });
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();

    MatchingAutomaton::assemble(object, tags, reactions, states, receives, consumes)
}

impl MatchingAutomaton {
    fn assemble(
        object: String,
        tags: Vec<TagInfo>,
        reactions: Vec<ReactionInfo>,
        states: Vec<CounterState>,
        mut receives: Vec<ReceiveTransition>,
        mut consumes: Vec<ConsumeTransition>,
    ) -> MatchingAutomaton {
        receives.sort();
        consumes.sort();
        let mut receive_table = vec![vec![None; tags.len()]; states.len()];
        for r in &receives {
            receive_table[r.from][r.tag] = Some(r.to);
        }
        let mut consumes_from = vec![Vec::new(); states.len()];
        for (i, c) in consumes.iter().enumerate() {
            consumes_from[c.from].push(i);
        }
        MatchingAutomaton {
            object,
            tags,
            reactions,
            states,
            receives,
            consumes,
            receive_table,
            consumes_from,
        }
    }

    pub fn object(&self) -> &str {
        &self.object
    }

    pub fn tags(&self) -> &[TagInfo] {
        &self.tags
    }

    pub fn tag_index(&self, name: &str) -> Option<usize> {
        self.tags.iter().position(|t| t.name.as_str() == name)
    }

    pub fn reactions(&self) -> &[ReactionInfo] {
        &self.reactions
    }

    pub fn states(&self) -> &[CounterState] {
        &self.states
    }

    pub fn receives(&self) -> &[ReceiveTransition] {
        &self.receives
    }

    pub fn consumes(&self) -> &[ConsumeTransition] {
        &self.consumes
    }

    pub fn initial(&self) -> usize {
        0
    }

    /// Target of the receive transition for `tag`, `None` on a violation.
    pub fn receive(&self, state: usize, tag: usize) -> Option<usize> {
        self.receive_table[state][tag]
    }

    pub fn consumes_from(&self, state: usize) -> impl Iterator<Item = &ConsumeTransition> {
        self.consumes_from[state].iter().map(|&i| &self.consumes[i])
    }

    pub fn is_firing(&self, state: usize) -> bool {
        !self.consumes_from[state].is_empty()
    }

    /// Reactions that can fire in `state`, in declaration order.
    pub fn fireable(&self, state: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.consumes_from(state).map(|c| c.reaction).collect();
        out.dedup();
        out
    }

    /// The consume target for `reaction` selected by the actual emptiness of
    /// each unbounded pattern tag's queue.
    pub fn consume_target(
        &self,
        state: usize,
        reaction: usize,
        is_emptied: impl Fn(usize) -> bool,
    ) -> Option<usize> {
        self.consumes_from(state)
            .find(|c| c.reaction == reaction && c.emptied.iter().all(|&(t, e)| is_emptied(t) == e))
            .map(|c| c.to)
    }

    pub fn find_state(&self, counters: &[Counter]) -> Option<usize> {
        self.states.iter().position(|s| s.counters == counters)
    }

    /// The raw counter space: product of `N + 1` values per bounded tag and
    /// two per unbounded tag.
    pub fn raw_state_count(&self) -> u64 {
        self.tags
            .iter()
            .map(|t| match t.bound {
                Bound::Bounded(n) => u64::from(n) + 1,
                Bound::Unbounded => 2,
            })
            .product()
    }

    pub fn label(&self, state: usize) -> String {
        counters_label(&self.states[state].counters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;
    use crate::FUTURE_SPEC;
    use Counter::*;

    fn future() -> MatchingAutomaton {
        build_automaton(&parse_spec(FUTURE_SPEC).unwrap()).unwrap()
    }

    // EMPTY, FULL, get, put
    fn st(a: &MatchingAutomaton, c: [Counter; 4]) -> Option<usize> {
        a.find_state(&c)
    }

    #[test]
    fn future_has_ten_states() {
        let a = future();
        assert_eq!(a.states().len(), 10);
        assert_eq!(a.raw_state_count(), 16);
        assert_eq!(st(&a, [Exact(1), Exact(1), Exact(0), Exact(0)]), None);
        assert_eq!(a.initial(), 0);
        assert_eq!(a.label(0), "0000");
    }

    #[test]
    fn future_receive_edges() {
        let a = future();
        let empty = a.tag_index("EMPTY").unwrap();
        let full = a.tag_index("FULL").unwrap();
        let s1000 = st(&a, [Exact(1), Exact(0), Exact(0), Exact(0)]).unwrap();
        assert_eq!(a.receive(0, empty), Some(s1000));
        assert_eq!(a.receive(s1000, full), None);
        assert_eq!(a.receive(s1000, empty), None);
    }

    #[test]
    fn full_get_consumes() {
        let a = future();
        let firing = st(&a, [Exact(0), Exact(1), AtLeastOne, Exact(0)]).unwrap();
        let targets: Vec<usize> = a.consumes_from(firing).map(|c| c.to).collect();
        let zero = st(&a, [Exact(0); 4]).unwrap();
        let gets = st(&a, [Exact(0), Exact(0), AtLeastOne, Exact(0)]).unwrap();
        assert_eq!(targets.len(), 2);
        assert!(targets.contains(&zero) && targets.contains(&gets));
        assert_eq!(a.fireable(firing), vec![1]);
        let get = a.tag_index("get").unwrap();
        assert_eq!(a.consume_target(firing, 1, |t| t == get), Some(zero));
        assert_eq!(a.consume_target(firing, 1, |_| false), Some(gets));
    }

    #[test]
    fn fireable_states() {
        let a = future();
        assert!(a.fireable(0).is_empty());
        let ep = st(&a, [Exact(1), Exact(0), Exact(0), Exact(1)]).unwrap();
        assert_eq!(a.fireable(ep), vec![0]);
        assert_eq!(a.reactions()[0].name, "when_EMPTY_put");
        let firing: Vec<String> = (0..a.states().len())
            .filter(|&s| a.is_firing(s))
            .map(|s| a.label(s))
            .collect();
        let mut firing = firing;
        firing.sort();
        assert_eq!(firing, ["01$0", "10$1", "1001"]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let spec = parse_spec(FUTURE_SPEC).unwrap();
        assert_eq!(
            build_automaton_with(&spec, Exec::Sequential).unwrap(),
            build_automaton_with(&spec, Exec::Parallel).unwrap()
        );
    }

    #[test]
    fn protocol_one_is_a_single_state() {
        let spec = parse_spec("object Unit\nprotocol 1\n").unwrap();
        let a = build_automaton(&spec).unwrap();
        assert_eq!(a.states().len(), 1);
        assert!(a.receives().is_empty() && a.consumes().is_empty());
    }

    #[test]
    fn receiving_at_bound_is_a_violation() {
        let spec = parse_spec("object A\nprotocol a . a\nstate a()\n").unwrap();
        let a = build_automaton(&spec).unwrap();
        assert_eq!(a.tags()[0].bound, Bound::Bounded(2));
        assert_eq!(a.states().len(), 3);
        assert_eq!(a.receive(2, 0), None);
    }
}
