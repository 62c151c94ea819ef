use std::fmt;

use super::ObjectSpec;
use crate::automaton::{build_automaton, AutomatonError, MatchingAutomaton};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Warning {
    /// The object has no reactions, so no operation ever returns.
    NoReactions,
    /// No legal state matches the reaction's pattern.
    NeverFireable { reaction: usize, name: String },
    /// Whenever the reaction matches, an earlier reaction for the same
    /// operation matches too and wins.
    Shadowed {
        reaction: usize,
        name: String,
        by: String,
    },
    /// The protocol never admits this message.
    NeverReceivable { tag: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NoReactions => {
                f.write_str("object has no reactions: it can never answer operations")
            }
            Warning::NeverFireable { reaction, name } => {
                write!(
                    f,
                    "reaction #{reaction} ({name}) is never fireable in any legal state"
                )
            }
            Warning::Shadowed { reaction, name, by } => {
                write!(
                    f,
                    "reaction #{reaction} ({name}) is always shadowed by {by}"
                )
            }
            Warning::NeverReceivable { tag } => {
                write!(f, "message `{tag}` is never legal under the protocol")
            }
        }
    }
}

/// Builds the automaton and reports reactions that can never fire.
pub fn validate_against_protocol(spec: &ObjectSpec) -> Result<Vec<Warning>, AutomatonError> {
    Ok(warnings_for(spec, &build_automaton(spec)?))
}

pub fn warnings_for(spec: &ObjectSpec, a: &MatchingAutomaton) -> Vec<Warning> {
    let mut out = Vec::new();
    if spec.reactions.is_empty() {
        out.push(Warning::NoReactions);
    }
    let names = spec.reaction_names();
    for (r, reaction) in spec.reactions.iter().enumerate() {
        let states: Vec<usize> = (0..a.states().len())
            .filter(|&s| a.fireable(s).contains(&r))
            .collect();
        if states.is_empty() {
            out.push(Warning::NeverFireable {
                reaction: r,
                name: names[r].clone(),
            });
            continue;
        }
        let op = spec.operation_of(reaction);
        let winner = |s: usize| {
            a.fireable(s)
                .into_iter()
                .find(|&q| spec.reactions[q].contains(op.as_str()))
                .expect("r itself qualifies")
        };
        if states.iter().all(|&s| winner(s) != r) {
            out.push(Warning::Shadowed {
                reaction: r,
                name: names[r].clone(),
                by: names[winner(states[0])].clone(),
            });
        }
    }
    for (t, info) in a.tags().iter().enumerate() {
        if !a.receives().iter().any(|e| e.tag == t) {
            out.push(Warning::NeverReceivable {
                tag: info.name.to_string(),
            });
        }
    }
    out
}
