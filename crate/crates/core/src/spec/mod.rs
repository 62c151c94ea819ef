//! Object specifications: message declarations, join-pattern reactions,
//! the protocol, and constructor sends.
//!
//! The textual form (`.tsop`) is line oriented:
//!
//! ```text
//! object Future
//! protocol *get . (EMPTY . put + FULL)
//! state EMPTY()
//! state FULL(x)
//! operation put(x)
//! operation get() returns value
//! reaction EMPTY & put(x) -> FULL(x)
//! reaction FULL(x) & get() -> FULL(x), return x
//! init EMPTY()
//! ```

mod parse;
mod validate;

use std::fmt;

use thiserror::Error;

use crate::protocol::{ProtocolError, ProtocolType, Signature, Tag};
use crate::value::Value;

pub use parse::parse_spec;
pub use validate::{validate_against_protocol, warnings_for, Warning};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    State,
    Operation,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageKind::State => "state",
            MessageKind::Operation => "operation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageDecl {
    pub tag: Tag,
    pub kind: MessageKind,
    pub params: Vec<String>,
    /// Name of the returned kind of value; `None` is void. Always `None` for
    /// state messages.
    pub returns: Option<String>,
}

impl MessageDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// One message of a join pattern with the names its arguments bind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternItem {
    pub tag: Tag,
    pub bindings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    SendSelf { tag: Tag, args: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    /// Pattern messages in written order; each tag appears once.
    pub pattern: Vec<PatternItem>,
    pub body: Vec<Action>,
    pub returns: Option<String>,
}

impl Reaction {
    /// `when_` followed by the pattern tags joined with underscores.
    pub fn method_name(&self) -> String {
        let tags: Vec<&str> = self.pattern.iter().map(|p| p.tag.as_str()).collect();
        format!("when_{}", tags.join("_"))
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.pattern.iter().any(|p| p.tag.as_str() == tag)
    }

    /// Binding names in pattern order.
    pub fn bindings(&self) -> impl Iterator<Item = &str> + '_ {
        self.pattern
            .iter()
            .flat_map(|p| p.bindings.iter().map(String::as_str))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitSend {
    pub tag: Tag,
    pub args: Vec<Value>,
}

/// A validated object specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectSpec {
    pub name: String,
    pub messages: Vec<MessageDecl>,
    pub protocol: ProtocolType,
    pub reactions: Vec<Reaction>,
    pub init: Vec<InitSend>,
    signature: Signature,
}

impl ObjectSpec {
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn message(&self, tag: &str) -> Option<&MessageDecl> {
        self.messages.iter().find(|m| m.tag.as_str() == tag)
    }

    /// Messages in signature order.
    pub fn messages_by_signature(&self) -> Vec<&MessageDecl> {
        self.signature
            .tags()
            .iter()
            .map(|t| self.message(t.as_str()).expect("declared tag"))
            .collect()
    }

    /// The single operation tag of a reaction's pattern.
    pub fn operation_of<'a>(&self, reaction: &'a Reaction) -> &'a Tag {
        &reaction
            .pattern
            .iter()
            .find(|p| self.message(p.tag.as_str()).map(|m| m.kind) == Some(MessageKind::Operation))
            .expect("validated pattern has one operation")
            .tag
    }

    /// Distinct method names for reactions, disambiguating repeated patterns
    /// with a numeric suffix.
    pub fn reaction_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.reactions {
            let base = r.method_name();
            let mut name = base.clone();
            let mut k = 2;
            while names.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            names.push(name);
        }
        names
    }

    /// Canonical text form; `parse_spec(&s.pretty_print()) == Ok(s)`.
    pub fn pretty_print(&self) -> String {
        let mut out = format!(
            "object {}\nprotocol {}\n",
            self.name,
            self.protocol.to_ascii()
        );
        for m in &self.messages {
            out.push_str(&format!("{} {}({})", m.kind, m.tag, m.params.join(", ")));
            if let Some(r) = &m.returns {
                out.push_str(&format!(" returns {r}"));
            }
            out.push('\n');
        }
        for r in &self.reactions {
            let pattern: Vec<String> = r
                .pattern
                .iter()
                .map(|p| match p.bindings.is_empty() {
                    true => p.tag.to_string(),
                    false => format!("{}({})", p.tag, p.bindings.join(", ")),
                })
                .collect();
            let mut actions: Vec<String> = r
                .body
                .iter()
                .map(|Action::SendSelf { tag, args }| format!("{tag}({})", args.join(", ")))
                .collect();
            if let Some(x) = &r.returns {
                actions.push(format!("return {x}"));
            }
            let line = format!("reaction {} -> {}", pattern.join(" & "), actions.join(", "));
            out.push_str(line.trim_end());
            out.push('\n');
        }
        for i in &self.init {
            let args: Vec<String> = i.args.iter().map(Value::to_string).collect();
            out.push_str(&format!("init {}({})\n", i.tag, args.join(", ")));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct SpecError {
    pub line: usize,
    pub kind: SpecErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
    #[error("`{0}` declared twice")]
    Duplicate(String),
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("join pattern must contain exactly one operation, found {0}")]
    OperationCount(usize),
    #[error("tag `{0}` appears more than once in the join pattern")]
    DuplicatePatternTag(String),
    #[error("variable `{0}` bound more than once")]
    DuplicateBinding(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{tag}` takes {expected} argument(s), found {found}")]
    Arity {
        tag: String,
        expected: usize,
        found: usize,
    },
    #[error("state message `{0}` cannot declare a return value")]
    StateReturns(String),
    #[error("reaction for `{0}` must return a value")]
    MissingReturn(String),
    #[error("`{0}` returns nothing, so its reaction cannot return a value")]
    UnexpectedReturn(String),
    #[error("`{0}` is an operation; only state messages can be sent here")]
    NotAState(String),
    #[error("protocol error: {0}")]
    Protocol(#[from] ProtocolError),
    #[error("protocol is not well-formed: `{0}` occurs both starred and unstarred")]
    NotWellFormed(String),
    #[error("empty protocol: no use of the object is legal")]
    EmptyProtocol,
}
