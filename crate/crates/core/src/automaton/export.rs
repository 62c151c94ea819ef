use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{
    counters_label, AutomatonError, ConsumeTransition, Counter, CounterState, MatchingAutomaton,
    ReactionInfo, ReceiveTransition, TagInfo,
};
use crate::protocol::{Bound, GenCount, GenVector, SemSet, Tag};
use crate::spec::MessageKind;

/// Renders the automaton as a Graphviz digraph: solid receive edges labeled
/// by tag, dashed consume edges labeled by the consumed tuple, firing states
/// double-circled.
pub fn export_dot(a: &MatchingAutomaton) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(a.object())).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [fontname=\"monospace\"];").unwrap();
    for s in a.states() {
        let shape = if a.is_firing(s.index) {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(
            out,
            "  s{} [label=\"{} ({})\", shape={shape}];",
            s.index,
            counters_label(&s.counters),
            s.index
        )
        .unwrap();
    }
    for r in a.receives() {
        writeln!(
            out,
            "  s{} -> s{} [label=\"{}\"];",
            r.from,
            r.to,
            escape(a.tags()[r.tag].name.as_str())
        )
        .unwrap();
    }
    for c in a.consumes() {
        let consumed: Vec<Counter> = (0..a.tags().len())
            .map(|t| Counter::Exact(u32::from(a.reactions()[c.reaction].pattern.contains(&t))))
            .collect();
        writeln!(
            out,
            "  s{} -> s{} [style=dashed, label=\"{}\"];",
            c.from,
            c.to,
            counters_label(&consumed)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct JsonCounter(Counter);

impl Serialize for JsonCounter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Counter::Exact(n) => s.serialize_u32(n),
            Counter::AtLeastOne => s.serialize_str("$"),
        }
    }
}

impl<'de> Deserialize<'de> for JsonCounter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(JsonCounter(Counter::Exact(n))),
            Raw::S(s) if s == "$" => Ok(JsonCounter(Counter::AtLeastOne)),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad counter `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct JsonBound(Bound);

impl Serialize for JsonBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Bound::Bounded(n) => s.serialize_u32(n),
            Bound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for JsonBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(JsonBound(Bound::Bounded(n))),
            Raw::S(s) if s == "unbounded" => Ok(JsonBound(Bound::Unbounded)),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad bound `{s}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTag {
    name: String,
    kind: MessageKind,
    bound: JsonBound,
}

#[derive(Serialize, Deserialize)]
struct JsonReaction {
    index: usize,
    name: String,
    pattern: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonState {
    index: usize,
    counters: BTreeMap<String, JsonCounter>,
    annotation: Vec<BTreeMap<String, GenCount>>,
    firing: bool,
}

#[derive(Serialize, Deserialize)]
struct JsonReceive {
    from: usize,
    tag: String,
    to: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonConsume {
    from: usize,
    reaction: usize,
    emptied: BTreeMap<String, bool>,
    to: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonAutomaton {
    object: String,
    tags: Vec<JsonTag>,
    reactions: Vec<JsonReaction>,
    states: Vec<JsonState>,
    receives: Vec<JsonReceive>,
    consumes: Vec<JsonConsume>,
}

pub fn export_json(a: &MatchingAutomaton) -> String {
    let name = |t: usize| a.tags()[t].name.to_string();
    let doc = JsonAutomaton {
        object: a.object().to_owned(),
        tags: a
            .tags()
            .iter()
            .map(|t| JsonTag {
                name: t.name.to_string(),
                kind: t.kind,
                bound: JsonBound(t.bound),
            })
            .collect(),
        reactions: a
            .reactions()
            .iter()
            .enumerate()
            .map(|(i, r)| JsonReaction {
                index: i,
                name: r.name.clone(),
                pattern: r.pattern.iter().map(|&t| name(t)).collect(),
            })
            .collect(),
        states: a
            .states()
            .iter()
            .map(|s| JsonState {
                index: s.index,
                counters: s
                    .counters
                    .iter()
                    .enumerate()
                    .map(|(t, c)| (name(t), JsonCounter(*c)))
                    .collect(),
                annotation: s
                    .annotation
                    .vectors()
                    .iter()
                    .map(|v| {
                        v.counts()
                            .iter()
                            .enumerate()
                            .map(|(t, c)| (name(t), *c))
                            .collect()
                    })
                    .collect(),
                firing: a.is_firing(s.index),
            })
            .collect(),
        receives: a
            .receives()
            .iter()
            .map(|r| JsonReceive {
                from: r.from,
                tag: name(r.tag),
                to: r.to,
            })
            .collect(),
        consumes: a
            .consumes()
            .iter()
            .map(|c| JsonConsume {
                from: c.from,
                reaction: c.reaction,
                emptied: c.emptied.iter().map(|&(t, e)| (name(t), e)).collect(),
                to: c.to,
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("serializable");
    out.push('\n');
    out
}

pub fn import_json(text: &str) -> Result<MatchingAutomaton, AutomatonError> {
    let bad = |msg: String| AutomatonError::Malformed(msg);
    let doc: JsonAutomaton = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let tags = doc
        .tags
        .into_iter()
        .map(|t| {
            Ok(TagInfo {
                name: Tag::new(t.name).map_err(|e| bad(e.to_string()))?,
                kind: t.kind,
                bound: t.bound.0,
            })
        })
        .collect::<Result<Vec<_>, AutomatonError>>()?;
    let names: Vec<&str> = tags.iter().map(|t| t.name.as_str()).collect();
    if names.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("tags must be sorted and distinct".into()));
    }
    let index = |name: &str| {
        names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| bad(format!("unknown tag `{name}`")))
    };
    let full_map = |len: usize| {
        if len == names.len() {
            Ok(())
        } else {
            Err(bad("every tag needs an entry".into()))
        }
    };
    let state_count = doc.states.len();
    let check_state = |s: usize| {
        if s < state_count {
            Ok(s)
        } else {
            Err(bad(format!("state {s} out of range")))
        }
    };

    let reactions = doc
        .reactions
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if r.index != i {
                return Err(bad(format!("reaction {} out of order", r.index)));
            }
            let pattern = r
                .pattern
                .iter()
                .map(|t| index(t))
                .collect::<Result<_, _>>()?;
            Ok(ReactionInfo {
                name: r.name,
                pattern,
            })
        })
        .collect::<Result<Vec<_>, AutomatonError>>()?;

    let mut states = Vec::new();
    for (i, s) in doc.states.into_iter().enumerate() {
        if s.index != i {
            return Err(bad(format!("state {} out of order", s.index)));
        }
        full_map(s.counters.len())?;
        let mut counters = vec![Counter::Exact(0); names.len()];
        for (t, c) in s.counters {
            counters[index(&t)?] = c.0;
        }
        let mut vectors = Vec::new();
        for v in s.annotation {
            full_map(v.len())?;
            let mut counts = vec![GenCount::Fin(0); names.len()];
            for (t, c) in v {
                counts[index(&t)?] = c;
            }
            vectors.push(GenVector::new(counts));
        }
        states.push(CounterState {
            index: i,
            counters,
            annotation: SemSet::from_vectors(vectors),
        });
    }
    let receives = doc
        .receives
        .into_iter()
        .map(|r| {
            Ok(ReceiveTransition {
                from: check_state(r.from)?,
                tag: index(&r.tag)?,
                to: check_state(r.to)?,
            })
        })
        .collect::<Result<Vec<_>, AutomatonError>>()?;
    let consumes = doc
        .consumes
        .into_iter()
        .map(|c| {
            if c.reaction >= reactions.len() {
                return Err(bad(format!("reaction {} out of range", c.reaction)));
            }
            let mut emptied = c
                .emptied
                .iter()
                .map(|(t, &e)| Ok((index(t)?, e)))
                .collect::<Result<Vec<_>, AutomatonError>>()?;
            emptied.sort_unstable();
            Ok(ConsumeTransition {
                from: check_state(c.from)?,
                reaction: c.reaction,
                emptied,
                to: check_state(c.to)?,
            })
        })
        .collect::<Result<Vec<_>, AutomatonError>>()?;
    Ok(MatchingAutomaton::assemble(
        doc.object, tags, reactions, states, receives, consumes,
    ))
}
