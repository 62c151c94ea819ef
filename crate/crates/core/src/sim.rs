//! Scripted simulation of one object.
//!
//! A script is a list of events, one per line:
//!
//! ```text
//! init                        # perform the constructor sends
//! send EMPTY()                # send a state message
//! call p = put(7)             # invoke an operation, possibly parking it
//! expect p returns ()
//! expect pending g
//! expect violation            # claims one recorded violation
//! expect counters {get: $, FULL: 1}
//! ```
//!
//! [`simulate`] runs a script deterministically on a single thread: after
//! every event, parked calls are fired exhaustively in arrival order, each
//! one firing the first fireable reaction (in declaration order) of its
//! operation. [`stress`] runs the same script on real threads against any
//! [`Target`] and checks only what does not depend on scheduling.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Condvar, Mutex, PoisonError};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automaton::{Counter, MatchingAutomaton};
use crate::protocol::Bound;
use crate::runtime::mailbox::{Layout, Mailbox, Payload, Step};
use crate::runtime::{ObjectInstance, QueueRepr, RuntimeError};
use crate::spec::{Action, MessageKind, ObjectSpec};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Init,
    Send {
        tag: String,
        args: Vec<Value>,
    },
    Call {
        id: String,
        tag: String,
        args: Vec<Value>,
    },
    ExpectReturns {
        id: String,
        value: Value,
    },
    ExpectViolation,
    ExpectPending {
        id: String,
    },
    ExpectCounters(Vec<(String, Counter)>),
}

impl Event {
    fn is_action(&self) -> bool {
        matches!(self, Event::Init | Event::Send { .. } | Event::Call { .. })
    }
}

fn join_values(args: &[Value]) -> String {
    args.iter()
        .map(Value::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Init => f.write_str("init"),
            Event::Send { tag, args } => write!(f, "send {tag}({})", join_values(args)),
            Event::Call { id, tag, args } => write!(f, "call {id} = {tag}({})", join_values(args)),
            Event::ExpectReturns { id, value } => write!(f, "expect {id} returns {value}"),
            Event::ExpectViolation => f.write_str("expect violation"),
            Event::ExpectPending { id } => write!(f, "expect pending {id}"),
            Event::ExpectCounters(counters) => {
                let parts: Vec<String> =
                    counters.iter().map(|(t, c)| format!("{t}: {c}")).collect();
                write!(f, "expect counters {{{}}}", parts.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptLine {
    pub line: usize,
    pub event: Event,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub lines: Vec<ScriptLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("script line {line}: {msg}")]
pub struct ScriptError {
    pub line: usize,
    pub msg: String,
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Splits on commas outside string literals.
fn split_args(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut quoted, mut escaped, mut start) = (false, false, 0);
    for (i, c) in text.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            ',' if !quoted => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// `TAG(lit, ...)` or a bare `TAG`.
fn parse_message(text: &str) -> Result<(String, Vec<Value>), String> {
    let text = text.trim();
    let (tag, args) = match text.split_once('(') {
        None => (text, ""),
        Some((tag, rest)) => {
            let inner = rest.strip_suffix(')').ok_or("missing `)`")?;
            (tag.trim(), inner)
        }
    };
    if !crate::protocol::is_identifier(tag) {
        return Err(format!("bad tag `{tag}`"));
    }
    let args = if args.trim().is_empty() {
        Vec::new()
    } else {
        split_args(args)
            .into_iter()
            .map(|a| Value::parse_literal(a).ok_or_else(|| format!("bad literal `{}`", a.trim())))
            .collect::<Result<_, _>>()?
    };
    Ok((tag.to_owned(), args))
}

fn parse_counter(text: &str) -> Result<Counter, String> {
    match text.trim() {
        "$" => Ok(Counter::AtLeastOne),
        n => n
            .parse()
            .map(Counter::Exact)
            .map_err(|_| format!("bad counter `{n}`")),
    }
}

fn parse_event(text: &str) -> Result<Event, String> {
    let (word, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    let ident = |s: &str| -> Result<String, String> {
        match crate::protocol::is_identifier(s) {
            true => Ok(s.to_owned()),
            false => Err(format!("bad call id `{s}`")),
        }
    };
    match word {
        "init" if rest.is_empty() => Ok(Event::Init),
        "send" => parse_message(rest).map(|(tag, args)| Event::Send { tag, args }),
        "call" => {
            let (id, msg) = rest
                .split_once('=')
                .ok_or("expected `call ID = TAG(...)`")?;
            let (tag, args) = parse_message(msg)?;
            Ok(Event::Call {
                id: ident(id.trim())?,
                tag,
                args,
            })
        }
        "expect" => {
            if rest == "violation" {
                return Ok(Event::ExpectViolation);
            }
            if let Some(id) = rest.strip_prefix("pending ") {
                return Ok(Event::ExpectPending {
                    id: ident(id.trim())?,
                });
            }
            if let Some(body) = rest.strip_prefix("counters") {
                let body = body.trim();
                let inner = body
                    .strip_prefix('{')
                    .and_then(|b| b.strip_suffix('}'))
                    .ok_or("expected `{tag: n, ...}`")?;
                let mut counters = Vec::new();
                for item in inner.split(',').filter(|s| !s.trim().is_empty()) {
                    let (tag, c) = item.split_once(':').ok_or("expected `tag: n`")?;
                    counters.push((tag.trim().to_owned(), parse_counter(c)?));
                }
                return Ok(Event::ExpectCounters(counters));
            }
            let (id, value) = rest.split_once(" returns ").ok_or("unknown expectation")?;
            let value = Value::parse_literal(value)
                .ok_or_else(|| format!("bad literal `{}`", value.trim()))?;
            Ok(Event::ExpectReturns {
                id: ident(id.trim())?,
                value,
            })
        }
        other => Err(format!("unknown event `{other}`")),
    }
}

pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let event = parse_event(content).map_err(|msg| ScriptError { line: i + 1, msg })?;
        lines.push(ScriptLine { line: i + 1, event });
    }
    Ok(Script { lines })
}

/// Checks tags, kinds, arities, counter ranges and call ids against the
/// object.
pub fn check_script(
    spec: &ObjectSpec,
    a: &MatchingAutomaton,
    script: &Script,
) -> Result<(), ScriptError> {
    let mut ids = HashSet::new();
    for ScriptLine { line, event } in &script.lines {
        let err = |msg: String| ScriptError { line: *line, msg };
        let message = |tag: &str, kind: MessageKind, args: &[Value]| {
            let decl = spec
                .message(tag)
                .ok_or_else(|| err(format!("unknown tag `{tag}`")))?;
            if decl.kind != kind {
                return Err(err(format!("`{tag}` is not a {kind} message")));
            }
            if decl.arity() != args.len() {
                return Err(err(format!(
                    "`{tag}` takes {} argument(s), found {}",
                    decl.arity(),
                    args.len()
                )));
            }
            Ok(())
        };
        match event {
            Event::Init | Event::ExpectViolation => {}
            Event::Send { tag, args } => message(tag, MessageKind::State, args)?,
            Event::Call { id, tag, args } => {
                message(tag, MessageKind::Operation, args)?;
                if !ids.insert(id.as_str()) {
                    return Err(err(format!("call id `{id}` used twice")));
                }
            }
            Event::ExpectReturns { id, .. } | Event::ExpectPending { id } => {
                if !ids.contains(id.as_str()) {
                    return Err(err(format!("`{id}` does not name an earlier call")));
                }
            }
            Event::ExpectCounters(counters) => {
                for (tag, c) in counters {
                    let t = a
                        .tag_index(tag)
                        .ok_or_else(|| err(format!("unknown tag `{tag}`")))?;
                    let ok = match (a.tags()[t].bound, c) {
                        (Bound::Unbounded, Counter::AtLeastOne | Counter::Exact(0)) => true,
                        (Bound::Bounded(n), Counter::Exact(k)) => *k <= n,
                        _ => false,
                    };
                    if !ok {
                        return Err(err(format!(
                            "counter {c} is out of range for `{tag}` ({})",
                            a.tags()[t].bound
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The offending tag and the state it arrived in.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub tag: String,
    pub state: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Returned(Value),
    Violated(Violation),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Returned(v) => write!(f, "returned {v}"),
            Outcome::Violated(v) => write!(f, "violated (`{}` in state#{})", v.tag, v.state),
        }
    }
}

/// Observable state after one script event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub state: usize,
    pub outcomes: BTreeMap<String, Outcome>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimRun {
    pub trace: Vec<String>,
    /// One per processed script line.
    pub checkpoints: Vec<Checkpoint>,
    pub failure: Option<Failure>,
}

impl SimRun {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    /// The trace followed by a result line.
    pub fn render(&self) -> String {
        let mut out = self.trace.join("\n");
        out.push('\n');
        match &self.failure {
            None => out.push_str("result: pass\n"),
            Some(f) => out.push_str(&format!("result: FAIL at line {}: {}\n", f.line, f.message)),
        }
        out
    }
}

struct Parked {
    id: String,
    tag: usize,
    own: Option<Payload>,
}

struct Sim<'a> {
    spec: &'a ObjectSpec,
    a: &'a MatchingAutomaton,
    layout: Layout,
    mailbox: Mailbox,
    parked: Vec<Parked>,
    outcomes: BTreeMap<String, Outcome>,
    violations: usize,
    unclaimed: usize,
    trace: Vec<String>,
}

impl Sim<'_> {
    fn receive(&mut self, tag: usize, payload: Payload) -> Result<(), Violation> {
        let name = &self.a.tags()[tag].name;
        match self.mailbox.receive(self.a, tag, payload) {
            Ok(Step::Receive { from, to, .. }) => {
                self.trace
                    .push(format!("  state#{from} --{name}--> state#{to}"));
                Ok(())
            }
            Err(Step::Violation { state, .. }) => {
                self.trace
                    .push(format!("  state#{state} --{name}--> violation"));
                self.violations += 1;
                self.unclaimed += 1;
                Err(Violation {
                    tag: name.to_string(),
                    state,
                })
            }
            _ => unreachable!("receive yields a receive step or a violation"),
        }
    }

    fn finish(&mut self, id: String, outcome: Outcome) {
        self.trace.push(format!("  {id} {outcome}"));
        self.outcomes.insert(id, outcome);
    }

    fn call(&mut self, id: &str, tag: usize, args: Vec<Value>) {
        let (stored, own) = match self.layout.reprs[tag] {
            QueueRepr::NoQueue => (Vec::new(), Some(args)),
            _ => (args, None),
        };
        match self.receive(tag, stored) {
            Ok(()) => self.parked.push(Parked {
                id: id.to_owned(),
                tag,
                own,
            }),
            Err(v) => self.finish(id.to_owned(), Outcome::Violated(v)),
        }
    }

    /// Fires parked calls until none can fire.
    fn settle(&mut self) {
        loop {
            let next = self
                .parked
                .iter()
                .enumerate()
                .find_map(|(i, p)| self.mailbox.fireable_for(self.a, p.tag).map(|r| (i, r)));
            let Some((i, r)) = next else { break };
            let mut parked = self.parked.remove(i);
            let firing = self
                .mailbox
                .consume(self.a, &self.layout, r, parked.tag, &mut parked.own);
            self.trace.push(format!(
                "  fire reaction#{r} {} for {}: state#{} ==> state#{}",
                self.a.reactions()[r].name,
                parked.id,
                firing.from,
                firing.to
            ));
            let outcome = self.run_body(r, firing.payloads);
            self.finish(parked.id, outcome);
        }
    }

    fn run_body(&mut self, r: usize, payloads: Vec<Payload>) -> Outcome {
        let reaction = &self.spec.reactions[r];
        let env: HashMap<&str, Value> = reaction
            .pattern
            .iter()
            .zip(payloads)
            .flat_map(|(item, payload)| item.bindings.iter().map(String::as_str).zip(payload))
            .collect();
        for Action::SendSelf { tag, args } in &reaction.body {
            let t = self.a.tag_index(tag.as_str()).expect("validated body tag");
            let values = args.iter().map(|x| env[x.as_str()].clone()).collect();
            if let Err(v) = self.receive(t, values) {
                return Outcome::Violated(v);
            }
        }
        Outcome::Returned(
            reaction
                .returns
                .as_ref()
                .map_or(Value::Unit, |x| env[x.as_str()].clone()),
        )
    }

    fn expect(&mut self, event: &Event) -> Result<(), String> {
        match event {
            Event::ExpectReturns { id, value } => match self.outcomes.get(id) {
                Some(Outcome::Returned(v)) if v == value => Ok(()),
                Some(other) => Err(format!("{id} {other}")),
                None => Err(format!("{id} is still pending")),
            },
            Event::ExpectViolation if self.unclaimed > 0 => {
                self.unclaimed -= 1;
                Ok(())
            }
            Event::ExpectViolation => Err("no unclaimed protocol violation".to_owned()),
            Event::ExpectPending { id } => match self.outcomes.get(id) {
                None => Ok(()),
                Some(outcome) => Err(format!("{id} {outcome}")),
            },
            Event::ExpectCounters(expected) => {
                let state = self.mailbox.state;
                let actual = &self.a.states()[state].counters;
                for (t, info) in self.a.tags().iter().enumerate() {
                    let want = expected
                        .iter()
                        .find(|(name, _)| name.as_str() == info.name.as_str())
                        .map_or(Counter::Exact(0), |(_, c)| *c);
                    if actual[t] != want {
                        return Err(format!(
                            "counter of `{}` is {} in state#{state} ({}), expected {want}",
                            info.name,
                            actual[t],
                            self.a.label(state)
                        ));
                    }
                }
                Ok(())
            }
            _ => unreachable!("not an expectation"),
        }
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            state: self.mailbox.state,
            outcomes: self.outcomes.clone(),
            violations: self.violations,
        }
    }
}

/// Runs `script` on a fresh instance in the initial automaton state. The
/// constructor sends run only on an explicit `init` event. Stops at the
/// first failed expectation; violations not claimed by `expect violation`
/// fail the run at its end.
pub fn simulate(spec: &ObjectSpec, a: &MatchingAutomaton, script: &Script) -> SimRun {
    let layout = Layout::new(spec, a);
    let mut sim = Sim {
        spec,
        a,
        mailbox: Mailbox::new(&layout),
        layout,
        parked: Vec::new(),
        outcomes: BTreeMap::new(),
        violations: 0,
        unclaimed: 0,
        trace: Vec::new(),
    };
    let mut checkpoints = Vec::new();
    for ScriptLine { line, event } in &script.lines {
        sim.trace.push(format!("{event}"));
        match event {
            Event::Init => {
                for init in &spec.init {
                    let t = a.tag_index(init.tag.as_str()).expect("validated init tag");
                    let _ = sim.receive(t, init.args.clone());
                }
            }
            Event::Send { tag, args } => {
                let t = a.tag_index(tag).expect("checked script tag");
                let _ = sim.receive(t, args.clone());
            }
            Event::Call { id, tag, args } => {
                let t = a.tag_index(tag).expect("checked script tag");
                sim.call(id, t, args.clone());
            }
            expectation => {
                if let Err(message) = sim.expect(expectation) {
                    sim.trace.push(format!("  FAILED: {message}"));
                    checkpoints.push(sim.checkpoint());
                    return SimRun {
                        trace: sim.trace,
                        checkpoints,
                        failure: Some(Failure {
                            line: *line,
                            message,
                        }),
                    };
                }
                sim.trace.push("  ok".to_owned());
            }
        }
        sim.settle();
        checkpoints.push(sim.checkpoint());
    }
    let failure = (sim.unclaimed > 0).then(|| Failure {
        line: script.lines.last().map_or(0, |l| l.line),
        message: format!(
            "{} protocol violation(s) not claimed by `expect violation`",
            sim.unclaimed
        ),
    });
    SimRun {
        trace: sim.trace,
        checkpoints,
        failure,
    }
}

/// Something a script can drive from several threads: the interpreted
/// runtime or a generated object.
pub trait Target: Send + Sync {
    fn init(&self) -> Result<(), Violation>;
    fn send(&self, tag: &str, args: Vec<Value>) -> Result<(), Violation>;
    /// Blocks until the operation's reaction has run.
    fn call(&self, tag: &str, args: Vec<Value>) -> Result<Value, Violation>;
    /// Current automaton state index.
    fn state(&self) -> usize;
}

fn runtime_violation(e: RuntimeError) -> Violation {
    match e {
        RuntimeError::Violation(v) => Violation {
            tag: v.tag,
            state: v.state,
        },
        other => panic!("script checked against the spec failed at runtime: {other}"),
    }
}

impl Target for ObjectInstance {
    fn init(&self) -> Result<(), Violation> {
        self.run_init().map_err(runtime_violation)
    }

    fn send(&self, tag: &str, args: Vec<Value>) -> Result<(), Violation> {
        self.send_state(tag, args).map_err(runtime_violation)
    }

    fn call(&self, tag: &str, args: Vec<Value>) -> Result<Value, Violation> {
        self.invoke_operation(tag, args).map_err(runtime_violation)
    }

    fn state(&self) -> usize {
        self.snapshot().state
    }
}

fn perform(target: &dyn Target, event: &Event) -> Option<Result<Value, Violation>> {
    match event {
        Event::Init => Some(target.init().map(|()| Value::Unit)),
        Event::Send { tag, args } => Some(target.send(tag, args.clone()).map(|()| Value::Unit)),
        Event::Call { tag, args, .. } => Some(target.call(tag, args.clone())),
        _ => None,
    }
}

#[derive(Default)]
struct Shared {
    next: usize,
    done: usize,
    outcomes: BTreeMap<String, Outcome>,
    violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StressReport {
    pub lines: Vec<String>,
    pub passed: bool,
}

impl StressReport {
    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out.push_str(if self.passed {
            "result: pass\n"
        } else {
            "result: FAIL\n"
        });
        out
    }
}

/// Runs the actions of `script` on `threads` worker threads, which take
/// events in script order but execute them concurrently; a blocked call
/// occupies its worker. Checks `returns` expectations, the total number of
/// violations, and `pending`/`counters` expectations placed after the last
/// action. Calls still blocked after `timeout` are abandoned.
pub fn stress(
    target: Arc<dyn Target>,
    a: &MatchingAutomaton,
    script: &Script,
    threads: usize,
    timeout: Duration,
) -> StressReport {
    let actions: Arc<Vec<Event>> = Arc::new(
        script
            .lines
            .iter()
            .map(|l| l.event.clone())
            .filter(Event::is_action)
            .collect(),
    );
    let shared = Arc::new((Mutex::new(Shared::default()), Condvar::new()));
    for _ in 0..threads.max(1) {
        let (target, actions, shared) = (target.clone(), actions.clone(), shared.clone());
        thread::spawn(move || loop {
            let i = {
                let mut s = shared.0.lock().unwrap_or_else(PoisonError::into_inner);
                if s.next == actions.len() {
                    return;
                }
                s.next += 1;
                s.next - 1
            };
            let result = perform(&*target, &actions[i]).expect("action event");
            let mut s = shared.0.lock().unwrap_or_else(PoisonError::into_inner);
            s.done += 1;
            if result.is_err() {
                s.violations += 1;
            }
            if let Event::Call { id, .. } = &actions[i] {
                let outcome = result.map_or_else(Outcome::Violated, Outcome::Returned);
                s.outcomes.insert(id.clone(), outcome);
            }
            shared.1.notify_all();
        });
    }

    let awaited: HashSet<&str> = script
        .lines
        .iter()
        .filter_map(|l| match &l.event {
            Event::ExpectReturns { id, .. } => Some(id.as_str()),
            _ => None,
        })
        .collect();
    let deadline = Instant::now() + timeout;
    let (lock, cv) = &*shared;
    let mut s = lock.lock().unwrap_or_else(PoisonError::into_inner);
    loop {
        let started_all = s.next == actions.len();
        let awaited_done = awaited.iter().all(|id| s.outcomes.contains_key(*id));
        let now = Instant::now();
        if (started_all && (s.done == actions.len() || awaited_done)) || now >= deadline {
            break;
        }
        s = cv
            .wait_timeout(s, deadline - now)
            .unwrap_or_else(PoisonError::into_inner)
            .0;
    }
    // Let calls released by the last actions finish.
    drop(s);
    thread::sleep(Duration::from_millis(50).min(timeout));
    let s = lock.lock().unwrap_or_else(PoisonError::into_inner);

    let mut lines = vec![format!("threads: {threads}")];
    let mut passed = true;
    if s.next < actions.len() {
        lines.push(format!(
            "{} action(s) never started: every worker is blocked in a call",
            actions.len() - s.next
        ));
        passed = false;
    }
    let calls = actions
        .iter()
        .filter(|e| matches!(e, Event::Call { .. }))
        .count();
    lines.push(format!("calls completed: {}/{calls}", s.outcomes.len()));
    let expected_violations = script
        .lines
        .iter()
        .filter(|l| l.event == Event::ExpectViolation)
        .count();
    let ok = s.violations == expected_violations;
    passed &= ok;
    lines.push(format!(
        "violations: {} (expected {expected_violations}){}",
        s.violations,
        if ok { "" } else { " FAILED" }
    ));
    let last_action = script.lines.iter().rposition(|l| l.event.is_action());
    for (i, l) in script.lines.iter().enumerate() {
        let terminal = last_action.is_none_or(|last| i > last);
        let verdict = match &l.event {
            Event::ExpectReturns { id, value } => Some(match s.outcomes.get(id) {
                Some(Outcome::Returned(v)) if v == value => Ok(()),
                Some(other) => Err(format!("{id} {other}")),
                None => Err(format!("{id} did not complete")),
            }),
            Event::ExpectPending { id } if terminal => Some(match s.outcomes.get(id) {
                None => Ok(()),
                Some(other) => Err(format!("{id} {other}")),
            }),
            Event::ExpectCounters(expected) if terminal => {
                let state = target.state();
                let actual = &a.states()[state].counters;
                let mismatch = a.tags().iter().enumerate().find(|(t, info)| {
                    let want = expected
                        .iter()
                        .find(|(n, _)| n.as_str() == info.name.as_str())
                        .map_or(Counter::Exact(0), |(_, c)| *c);
                    actual[*t] != want
                });
                Some(match mismatch {
                    None => Ok(()),
                    Some(_) => Err(format!("final state#{state} is {}", a.label(state))),
                })
            }
            _ => None,
        };
        match verdict {
            Some(Ok(())) => lines.push(format!("{}: ok", l.event)),
            Some(Err(msg)) => {
                passed = false;
                lines.push(format!("{}: FAILED, {msg}", l.event));
            }
            None => {}
        }
    }
    StressReport { lines, passed }
}

/// Drives `target` through `script` one event at a time on real threads,
/// waiting after each event until the target reaches the state and call
/// outcomes the deterministic run recorded. Intended for scripts with at
/// most one parked call per operation, where the two must agree exactly.
pub fn replay(
    target: Arc<dyn Target>,
    script: &Script,
    run: &SimRun,
    timeout: Duration,
) -> Result<(), String> {
    let shared = Arc::new((Mutex::new(Shared::default()), Condvar::new()));
    for (l, want) in script.lines.iter().zip(&run.checkpoints) {
        match &l.event {
            Event::Call { id, .. } => {
                let (target, shared, event, id) =
                    (target.clone(), shared.clone(), l.event.clone(), id.clone());
                thread::spawn(move || {
                    let result = perform(&*target, &event).expect("action event");
                    let mut s = shared.0.lock().unwrap_or_else(PoisonError::into_inner);
                    if result.is_err() {
                        s.violations += 1;
                    }
                    s.outcomes
                        .insert(id, result.map_or_else(Outcome::Violated, Outcome::Returned));
                    shared.1.notify_all();
                });
            }
            event if event.is_action() => {
                let result = perform(&*target, event).expect("action event");
                let mut s = shared.0.lock().unwrap_or_else(PoisonError::into_inner);
                if result.is_err() {
                    s.violations += 1;
                }
            }
            _ => continue,
        }
        let deadline = Instant::now() + timeout;
        let (lock, cv) = &*shared;
        let mut s = lock.lock().unwrap_or_else(PoisonError::into_inner);
        loop {
            let state = target.state();
            if state == want.state && s.outcomes == want.outcomes && s.violations == want.violations
            {
                break;
            }
            let now = Instant::now();
            if now >= deadline {
                return Err(format!(
                    "line {} `{}`: expected state#{} with {:?} and {} violation(s), \
                     found state#{state} with {:?} and {} violation(s)",
                    l.line,
                    l.event,
                    want.state,
                    want.outcomes,
                    want.violations,
                    s.outcomes,
                    s.violations
                ));
            }
            s = cv
                .wait_timeout(s, Duration::from_millis(2).min(deadline - now))
                .unwrap_or_else(PoisonError::into_inner)
                .0;
        }
        drop(s);
        if matches!(l.event, Event::Call { .. }) {
            // A parked call on a self-loop leaves no trace in the state;
            // give its thread time to get past the lock.
            thread::sleep(Duration::from_millis(5));
        }
    }
    Ok(())
}
