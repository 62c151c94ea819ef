//! Thread-safe execution of objects over their matching automaton.
//!
//! Every instance holds one mutex around the automaton state and the
//! message queues, and one condition variable per operation tag. Sending a
//! state message never blocks. Invoking an operation stores the message,
//! then waits until a reaction containing it can fire; the invoker consumes
//! the pattern, releases the lock and runs the reaction body itself.
//!
//! Firing is not prompt: between a notification and the wakeup of the
//! waiter, other threads may enter and change the state.

pub(crate) mod mailbox;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Condvar, Mutex, MutexGuard, PoisonError};

use thiserror::Error;

use crate::automaton::{counters_label, Counter, MatchingAutomaton};
use crate::spec::{Action, MessageKind, ObjectSpec};
use crate::value::Value;

pub use mailbox::Step;
use mailbox::{Layout, Mailbox, Payload};

/// How the pending messages of one tag are stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueueRepr {
    /// The automaton state alone tracks the count (or the blocked invoker
    /// holds the payload).
    NoQueue,
    /// Unbounded messages without arguments: just a count.
    Counter,
    /// A single optional payload.
    Slot,
    /// A real FIFO of payloads.
    Fifo,
}

impl fmt::Display for QueueRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueueRepr::NoQueue => "none",
            QueueRepr::Counter => "counter",
            QueueRepr::Slot => "slot",
            QueueRepr::Fifo => "fifo",
        })
    }
}

/// A message arrived in a state without a receive transition for it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("protocol violation on {object}: `{tag}` received in state #{state} ({counters})")]
pub struct ProtocolViolation {
    pub object: String,
    pub tag: String,
    pub state: usize,
    pub counters: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error(transparent)]
    Violation(#[from] ProtocolViolation),
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("`{0}` is not a state message")]
    NotAState(String),
    #[error("`{0}` is not an operation")]
    NotAnOperation(String),
    #[error("`{tag}` takes {expected} argument(s), got {found}")]
    Arity {
        tag: String,
        expected: usize,
        found: usize,
    },
    #[error("automaton was not built for object `{0}`")]
    AutomatonMismatch(String),
    #[error("no reaction named `{0}`")]
    UnknownReaction(String),
    #[error("reaction handler failed: {0}")]
    Handler(String),
}

impl RuntimeError {
    pub fn is_violation(&self) -> bool {
        matches!(self, RuntimeError::Violation(_))
    }
}

/// Host implementation of a reaction body. Receives the instance and the
/// bound payloads flattened in pattern order; returns the operation result.
pub type HostHandler =
    Arc<dyn Fn(&ObjectInstance, Vec<Value>) -> Result<Value, RuntimeError> + Send + Sync>;

/// A consistent view of an instance, taken under its lock.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub state: usize,
    pub counters: Vec<Counter>,
    /// Stored messages per tag; `None` for tags without a queue.
    pub occupancy: Vec<Option<usize>>,
}

impl Snapshot {
    /// Queue contents agree with the automaton counters.
    pub fn is_consistent(&self) -> bool {
        self.counters
            .iter()
            .zip(&self.occupancy)
            .all(|(c, o)| match (c, o) {
                (_, None) => true,
                (Counter::Exact(n), Some(k)) => *n as usize == *k,
                (Counter::AtLeastOne, Some(k)) => *k >= 1,
            })
    }
}

struct Guarded {
    mailbox: Mailbox,
    log: Option<Vec<Step>>,
}

pub struct ObjectInstance {
    spec: Arc<ObjectSpec>,
    automaton: Arc<MatchingAutomaton>,
    layout: Layout,
    guard: Mutex<Guarded>,
    waiters: Vec<Condvar>,
    handlers: Vec<Option<HostHandler>>,
}

impl fmt::Debug for ObjectInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectInstance")
            .field("object", &self.spec.name)
            .field("snapshot", &self.snapshot())
            .finish()
    }
}

/// Creates an instance with DSL reaction bodies and runs its constructor
/// sends.
pub fn instantiate(
    spec: Arc<ObjectSpec>,
    automaton: Arc<MatchingAutomaton>,
) -> Result<ObjectInstance, RuntimeError> {
    Builder::new(spec, automaton).build()
}

/// Configures an instance before its constructor sends run.
pub struct Builder {
    spec: Arc<ObjectSpec>,
    automaton: Arc<MatchingAutomaton>,
    handlers: HashMap<String, HostHandler>,
    record: bool,
    run_init: bool,
}

impl Builder {
    pub fn new(spec: Arc<ObjectSpec>, automaton: Arc<MatchingAutomaton>) -> Builder {
        Builder {
            spec,
            automaton,
            handlers: HashMap::new(),
            record: false,
            run_init: true,
        }
    }

    /// Replaces the DSL body of the named reaction (e.g. `when_FULL_get`).
    pub fn handler(mut self, reaction: &str, handler: HostHandler) -> Builder {
        self.handlers.insert(reaction.to_owned(), handler);
        self
    }

    /// Records every automaton step taken under the lock.
    pub fn record_steps(mut self) -> Builder {
        self.record = true;
        self
    }

    /// Leaves the instance in the initial automaton state; the constructor
    /// sends can be replayed with [`ObjectInstance::run_init`].
    pub fn skip_init(mut self) -> Builder {
        self.run_init = false;
        self
    }

    pub fn build(mut self) -> Result<ObjectInstance, RuntimeError> {
        let a = &self.automaton;
        let matches = a.object() == self.spec.name
            && a.tags()
                .iter()
                .map(|t| &t.name)
                .eq(self.spec.signature().tags())
            && a.reactions().len() == self.spec.reactions.len();
        if !matches {
            return Err(RuntimeError::AutomatonMismatch(self.spec.name.clone()));
        }
        let names = self.spec.reaction_names();
        let handlers = names.iter().map(|n| self.handlers.remove(n)).collect();
        if let Some(name) = self.handlers.keys().next() {
            return Err(RuntimeError::UnknownReaction(name.clone()));
        }
        let layout = Layout::new(&self.spec, a);
        let guard = Mutex::new(Guarded {
            mailbox: Mailbox::new(&layout),
            log: self.record.then(Vec::new),
        });
        let waiters = (0..a.tags().len()).map(|_| Condvar::new()).collect();
        let instance = ObjectInstance {
            spec: self.spec,
            automaton: self.automaton,
            layout,
            guard,
            waiters,
            handlers,
        };
        if self.run_init {
            instance.run_init()?;
        }
        Ok(instance)
    }
}

impl ObjectInstance {
    pub fn spec(&self) -> &ObjectSpec {
        &self.spec
    }

    pub fn automaton(&self) -> &MatchingAutomaton {
        &self.automaton
    }

    /// Performs the constructor sends in order.
    pub fn run_init(&self) -> Result<(), RuntimeError> {
        for init in &self.spec.init {
            self.send_state(init.tag.as_str(), init.args.clone())?;
        }
        Ok(())
    }

    pub fn queue_repr(&self, tag: &str) -> Option<QueueRepr> {
        self.automaton.tag_index(tag).map(|t| self.layout.reprs[t])
    }

    fn lock(&self) -> MutexGuard<'_, Guarded> {
        self.guard.lock().unwrap_or_else(PoisonError::into_inner)
    }

    fn resolve(&self, tag: &str, kind: MessageKind, args: &[Value]) -> Result<usize, RuntimeError> {
        let t = self
            .automaton
            .tag_index(tag)
            .ok_or_else(|| RuntimeError::UnknownTag(tag.to_owned()))?;
        if self.layout.kinds[t] != kind {
            return Err(match kind {
                MessageKind::State => RuntimeError::NotAState(tag.to_owned()),
                MessageKind::Operation => RuntimeError::NotAnOperation(tag.to_owned()),
            });
        }
        if self.layout.arities[t] != args.len() {
            return Err(RuntimeError::Arity {
                tag: tag.to_owned(),
                expected: self.layout.arities[t],
                found: args.len(),
            });
        }
        Ok(t)
    }

    fn violation(&self, state: usize, tag: usize) -> RuntimeError {
        RuntimeError::Violation(ProtocolViolation {
            object: self.spec.name.clone(),
            tag: self.automaton.tags()[tag].name.to_string(),
            state,
            counters: counters_label(&self.automaton.states()[state].counters),
        })
    }

    fn wake(&self, state: usize) {
        for &op in &self.layout.notify[state] {
            self.waiters[op].notify_all();
        }
    }

    /// Sends a state message. Never blocks beyond lock acquisition and never
    /// fires reactions. A violation is reported after the lock is released;
    /// the message stays stored.
    pub fn send_state(&self, tag: &str, args: Vec<Value>) -> Result<(), RuntimeError> {
        let t = self.resolve(tag, MessageKind::State, &args)?;
        let mut g = self.lock();
        let step = g.mailbox.receive(&self.automaton, t, args);
        if let Some(log) = &mut g.log {
            log.push(step.clone().unwrap_or_else(|v| v));
        }
        match step {
            Ok(Step::Receive { to, .. }) => {
                if self.automaton.is_firing(to) {
                    self.wake(to);
                }
                Ok(())
            }
            Ok(_) => unreachable!(),
            Err(Step::Violation { state, tag }) => {
                drop(g);
                Err(self.violation(state, tag))
            }
            Err(_) => unreachable!(),
        }
    }

    /// Invokes an operation, blocking until a reaction consuming it fires;
    /// returns the reaction's result (`Value::Unit` for void operations).
    pub fn invoke_operation(&self, tag: &str, args: Vec<Value>) -> Result<Value, RuntimeError> {
        let t = self.resolve(tag, MessageKind::Operation, &args)?;
        let a = &*self.automaton;
        let mut g = self.lock();

        let mut own = None;
        let stored = if self.layout.reprs[t] == QueueRepr::NoQueue {
            own = Some(args);
            Vec::new()
        } else {
            args
        };
        let step = g.mailbox.receive(a, t, stored);
        if let Some(log) = &mut g.log {
            log.push(step.clone().unwrap_or_else(|v| v));
        }
        if let Err(Step::Violation { state, tag }) = step {
            drop(g);
            return Err(self.violation(state, tag));
        }

        let firing = loop {
            match g.mailbox.fireable_for(a, t) {
                Some(r) => break g.mailbox.consume(a, &self.layout, r, t, &mut own),
                None => {
                    g = self.waiters[t]
                        .wait(g)
                        .unwrap_or_else(PoisonError::into_inner);
                }
            }
        };
        if let Some(log) = &mut g.log {
            log.push(Step::Consume {
                from: firing.from,
                reaction: firing.reaction,
                to: firing.to,
            });
        }
        if a.is_firing(firing.to) {
            self.wake(firing.to);
        }
        drop(g);
        self.run_body(firing.reaction, firing.payloads)
    }

    fn run_body(&self, reaction: usize, payloads: Vec<Payload>) -> Result<Value, RuntimeError> {
        if let Some(handler) = &self.handlers[reaction] {
            return handler(self, payloads.into_iter().flatten().collect());
        }
        let r = &self.spec.reactions[reaction];
        let env: HashMap<&str, Value> = r
            .pattern
            .iter()
            .zip(payloads)
            .flat_map(|(item, payload)| item.bindings.iter().map(String::as_str).zip(payload))
            .collect();
        for Action::SendSelf { tag, args } in &r.body {
            let values = args.iter().map(|x| env[x.as_str()].clone()).collect();
            self.send_state(tag.as_str(), values)?;
        }
        Ok(r.returns
            .as_ref()
            .map_or(Value::Unit, |x| env[x.as_str()].clone()))
    }

    pub fn snapshot(&self) -> Snapshot {
        let g = self.lock();
        Snapshot {
            state: g.mailbox.state,
            counters: self.automaton.states()[g.mailbox.state].counters.clone(),
            occupancy: g.mailbox.queues.iter().map(|q| q.occupancy()).collect(),
        }
    }

    /// Steps recorded so far, if recording was enabled.
    pub fn steps(&self) -> Option<Vec<Step>> {
        self.lock().log.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_automaton;
    use crate::spec::parse_spec;
    use crate::FUTURE_SPEC;
    use std::thread;
    use std::time::Duration;
    use Counter::*;

    fn future() -> ObjectInstance {
        let spec = parse_spec(FUTURE_SPEC).unwrap();
        let a = build_automaton(&spec).unwrap();
        instantiate(Arc::new(spec), Arc::new(a)).unwrap()
    }

    #[test]
    fn queue_representations() {
        let f = future();
        assert_eq!(f.queue_repr("EMPTY"), Some(QueueRepr::NoQueue));
        assert_eq!(f.queue_repr("put"), Some(QueueRepr::NoQueue));
        assert_eq!(f.queue_repr("FULL"), Some(QueueRepr::Slot));
        assert_eq!(f.queue_repr("get"), Some(QueueRepr::Counter));
        use crate::protocol::Bound::*;
        assert_eq!(
            QueueRepr::choose(MessageKind::State, Bounded(2), 1),
            QueueRepr::Fifo
        );
        assert_eq!(
            QueueRepr::choose(MessageKind::State, Unbounded, 2),
            QueueRepr::Fifo
        );
        assert_eq!(
            QueueRepr::choose(MessageKind::State, Bounded(1), 2),
            QueueRepr::Slot
        );
        assert_eq!(
            QueueRepr::choose(MessageKind::Operation, Bounded(2), 1),
            QueueRepr::Fifo
        );
    }

    #[test]
    fn init_then_put_then_get() {
        let f = future();
        assert_eq!(
            f.snapshot().counters,
            [Exact(1), Exact(0), Exact(0), Exact(0)]
        );
        assert_eq!(
            f.invoke_operation("put", vec![Value::Int(7)]).unwrap(),
            Value::Unit
        );
        let snap = f.snapshot();
        assert_eq!(snap.counters, [Exact(0), Exact(1), Exact(0), Exact(0)]);
        assert!(snap.is_consistent());
        assert_eq!(f.invoke_operation("get", vec![]).unwrap(), Value::Int(7));
        assert_eq!(f.invoke_operation("get", vec![]).unwrap(), Value::Int(7));
    }

    #[test]
    fn second_state_send_violates() {
        let f = future();
        let err = f.send_state("FULL", vec![Value::Int(1)]).unwrap_err();
        let RuntimeError::Violation(v) = err else {
            panic!("expected violation")
        };
        assert_eq!((v.tag.as_str(), v.counters.as_str()), ("FULL", "1000"));
        // the message is not rolled back and the state is unchanged
        let snap = f.snapshot();
        assert_eq!(snap.counters, [Exact(1), Exact(0), Exact(0), Exact(0)]);
        assert_eq!(snap.occupancy[1], Some(1));
    }

    #[test]
    fn double_put_violates() {
        let f = future();
        f.invoke_operation("put", vec![Value::Int(1)]).unwrap();
        assert!(f
            .invoke_operation("put", vec![Value::Int(2)])
            .unwrap_err()
            .is_violation());
    }

    #[test]
    fn misuse_errors() {
        let f = future();
        assert_eq!(
            f.send_state("nope", vec![]),
            Err(RuntimeError::UnknownTag("nope".into()))
        );
        assert_eq!(
            f.send_state("get", vec![]),
            Err(RuntimeError::NotAState("get".into()))
        );
        assert_eq!(
            f.invoke_operation("FULL", vec![Value::Int(1)]),
            Err(RuntimeError::NotAnOperation("FULL".into()))
        );
        assert!(matches!(
            f.invoke_operation("put", vec![]),
            Err(RuntimeError::Arity { .. })
        ));
    }

    #[test]
    fn blocked_get_is_released_by_put() {
        let f = Arc::new(future());
        let getter = {
            let f = Arc::clone(&f);
            thread::spawn(move || f.invoke_operation("get", vec![]))
        };
        while f.snapshot().counters[2] != AtLeastOne {
            thread::sleep(Duration::from_millis(1));
        }
        f.invoke_operation("put", vec![Value::Int(3)]).unwrap();
        assert_eq!(getter.join().unwrap().unwrap(), Value::Int(3));
        assert_eq!(
            f.snapshot().counters,
            [Exact(0), Exact(1), Exact(0), Exact(0)]
        );
    }

    #[test]
    fn host_handler_can_reenter() {
        let spec = Arc::new(parse_spec(FUTURE_SPEC).unwrap());
        let a = Arc::new(build_automaton(&spec).unwrap());
        let handler: HostHandler = Arc::new(|obj, args| {
            obj.send_state("FULL", args.clone())?;
            Ok(Value::Str(format!("got {}", args[0])))
        });
        let f = Builder::new(spec, a)
            .handler("when_FULL_get", handler)
            .record_steps()
            .build()
            .unwrap();
        f.invoke_operation("put", vec![Value::Int(5)]).unwrap();
        assert_eq!(
            f.invoke_operation("get", vec![]).unwrap(),
            Value::Str("got 5".into())
        );
        let steps = f.steps().unwrap();
        assert_eq!(steps.len(), 7);
        assert!(matches!(steps[0], Step::Receive { from: 0, .. }));
    }

    #[test]
    fn unknown_handler_rejected() {
        let spec = Arc::new(parse_spec(FUTURE_SPEC).unwrap());
        let a = Arc::new(build_automaton(&spec).unwrap());
        let err = Builder::new(spec, a)
            .handler("when_nothing", Arc::new(|_, _| Ok(Value::Unit)))
            .build()
            .unwrap_err();
        assert_eq!(err, RuntimeError::UnknownReaction("when_nothing".into()));
    }
}
