//! Concurrent typestate objects compiled to matching automata.
//!
//! An object is declared with a set of message tags (state messages and
//! operations), join-pattern reactions over those tags, and a behavioral
//! protocol. The protocol prunes the counter-tuple state space of the
//! matching automaton: any mailbox configuration outside the protocol has
//! no state, so the arrival of an offending message shows up as a missing
//! receive transition and is reported as a [`runtime::ProtocolViolation`].
//!
//! The pipeline is
//!
//! ```
//! use tsop_core::{automaton::build_automaton, spec::parse_spec};
//!
//! let spec = parse_spec(tsop_core::FUTURE_SPEC).unwrap();
//! let automaton = build_automaton(&spec).unwrap();
//! assert_eq!(automaton.states().len(), 10);
//! ```

pub mod automaton;
pub mod codegen;
pub mod oracle;
pub mod par;
pub mod protocol;
pub mod runtime;
pub mod sim;
pub mod spec;
pub mod value;

/// The completable future variable, the running example used throughout
/// the tests and the sample corpus.
pub const FUTURE_SPEC: &str = include_str!("../../../samples/future.tsop");
