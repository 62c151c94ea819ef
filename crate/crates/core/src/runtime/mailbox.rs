use std::collections::VecDeque;

use super::QueueRepr;
use crate::automaton::MatchingAutomaton;
use crate::protocol::Bound;
use crate::spec::{MessageKind, ObjectSpec};
use crate::value::Value;

pub(crate) type Payload = Vec<Value>;

/// Per-object tables derived once from the spec and automaton.
#[derive(Debug)]
pub(crate) struct Layout {
    pub reprs: Vec<QueueRepr>,
    pub kinds: Vec<MessageKind>,
    pub arities: Vec<usize>,
    /// Pattern tag indices per reaction, in written order.
    pub patterns: Vec<Vec<usize>>,
    /// Operation tags to wake when entering each state.
    pub notify: Vec<Vec<usize>>,
}

impl Layout {
    pub fn new(spec: &ObjectSpec, a: &MatchingAutomaton) -> Layout {
        let sig = spec.signature();
        let decls = spec.messages_by_signature();
        let reprs = decls
            .iter()
            .zip(a.tags())
            .map(|(d, t)| QueueRepr::choose(d.kind, t.bound, d.arity()))
            .collect();
        let kinds = decls.iter().map(|d| d.kind).collect();
        let arities = decls.iter().map(|d| d.arity()).collect();
        let patterns = spec
            .reactions
            .iter()
            .map(|r| {
                r.pattern
                    .iter()
                    .map(|p| sig.index_of(p.tag.as_str()).unwrap())
                    .collect()
            })
            .collect();
        let operation_of: Vec<usize> = spec
            .reactions
            .iter()
            .map(|r| sig.index_of(spec.operation_of(r).as_str()).unwrap())
            .collect();
        let notify = (0..a.states().len())
            .map(|s| {
                let mut ops: Vec<usize> = a.fireable(s).iter().map(|&r| operation_of[r]).collect();
                ops.sort_unstable();
                ops.dedup();
                ops
            })
            .collect();
        Layout {
            reprs,
            kinds,
            arities,
            patterns,
            notify,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Queue {
    None,
    Counter(usize),
    Slot(Option<Payload>),
    Fifo(VecDeque<Payload>),
}

impl Queue {
    fn new(repr: QueueRepr) -> Queue {
        match repr {
            QueueRepr::NoQueue => Queue::None,
            QueueRepr::Counter => Queue::Counter(0),
            QueueRepr::Slot => Queue::Slot(None),
            QueueRepr::Fifo => Queue::Fifo(VecDeque::new()),
        }
    }

    pub fn occupancy(&self) -> Option<usize> {
        match self {
            Queue::None => None,
            Queue::Counter(n) => Some(*n),
            Queue::Slot(s) => Some(usize::from(s.is_some())),
            Queue::Fifo(q) => Some(q.len()),
        }
    }

    fn push(&mut self, payload: Payload) {
        match self {
            Queue::None => {}
            Queue::Counter(n) => *n += 1,
            Queue::Slot(s) => *s = Some(payload),
            Queue::Fifo(q) => q.push_back(payload),
        }
    }

    fn pop(&mut self) -> Payload {
        match self {
            Queue::None => Vec::new(),
            Queue::Counter(n) => {
                *n -= 1;
                Vec::new()
            }
            Queue::Slot(s) => s.take().expect("slot filled in a matching state"),
            Queue::Fifo(q) => q.pop_front().expect("queue filled in a matching state"),
        }
    }
}

/// A step of the automaton taken by a mailbox, recorded for path checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Receive {
        from: usize,
        tag: usize,
        to: usize,
    },
    Consume {
        from: usize,
        reaction: usize,
        to: usize,
    },
    Violation {
        state: usize,
        tag: usize,
    },
}

/// Automaton state plus message queues. Not synchronized by itself.
#[derive(Debug, Clone)]
pub(crate) struct Mailbox {
    pub state: usize,
    pub queues: Vec<Queue>,
}

pub(crate) struct Firing {
    pub reaction: usize,
    /// Payloads per pattern item, in written order.
    pub payloads: Vec<Payload>,
    pub from: usize,
    pub to: usize,
}

impl Mailbox {
    pub fn new(layout: &Layout) -> Mailbox {
        Mailbox {
            state: 0,
            queues: layout.reprs.iter().map(|&r| Queue::new(r)).collect(),
        }
    }

    /// Stores the message, then follows the receive transition. The message
    /// stays stored even when the transition is missing.
    pub fn receive(
        &mut self,
        a: &MatchingAutomaton,
        tag: usize,
        payload: Payload,
    ) -> Result<Step, Step> {
        self.queues[tag].push(payload);
        let from = self.state;
        match a.receive(from, tag) {
            Some(to) => {
                self.state = to;
                Ok(Step::Receive { from, tag, to })
            }
            None => Err(Step::Violation { state: from, tag }),
        }
    }

    /// Highest-priority reaction fireable now whose pattern includes `tag`.
    pub fn fireable_for(&self, a: &MatchingAutomaton, tag: usize) -> Option<usize> {
        a.fireable(self.state)
            .into_iter()
            .find(|&r| a.reactions()[r].pattern.contains(&tag))
    }

    /// Consumes the messages of `reaction`. The invoker's own message is
    /// passed in when its tag keeps no queue.
    pub fn consume(
        &mut self,
        a: &MatchingAutomaton,
        layout: &Layout,
        reaction: usize,
        own_tag: usize,
        own_payload: &mut Option<Payload>,
    ) -> Firing {
        let from = self.state;
        let payloads = layout.patterns[reaction]
            .iter()
            .map(|&t| {
                if t == own_tag && layout.reprs[t] == QueueRepr::NoQueue {
                    own_payload.take().unwrap_or_default()
                } else {
                    self.queues[t].pop()
                }
            })
            .collect();
        let to = a
            .consume_target(from, reaction, |t| self.queues[t].occupancy() == Some(0))
            .expect("consume transition for every emptiness outcome");
        self.state = to;
        Firing {
            reaction,
            payloads,
            from,
            to,
        }
    }
}

impl QueueRepr {
    /// Queue representation by kind, bound and arity. A 1-bounded operation
    /// has at most one pending message, which its blocked invoker holds, so
    /// it needs no queue.
    pub fn choose(kind: MessageKind, bound: Bound, arity: usize) -> QueueRepr {
        match (bound, arity) {
            (Bound::Bounded(_), 0) => QueueRepr::NoQueue,
            (Bound::Unbounded, 0) => QueueRepr::Counter,
            (Bound::Bounded(0 | 1), _) if kind == MessageKind::Operation => QueueRepr::NoQueue,
            (Bound::Bounded(0 | 1), _) => QueueRepr::Slot,
            _ => QueueRepr::Fifo,
        }
    }
}
