//! Rust source generation.
//!
//! The generated module is self-contained (std only) and hard-codes the
//! automaton as match arms: one method per tag, one method per reaction,
//! a mutex around the state and queues and one condition variable per
//! operation. It follows the same contract as [`crate::runtime`], so the
//! generated object and an interpreted instance behave alike.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use sha2::{Digest, Sha256};

use crate::automaton::MatchingAutomaton;
use crate::protocol::Bound;
use crate::runtime::mailbox::Layout;
use crate::runtime::QueueRepr;
use crate::spec::{Action, MessageKind, ObjectSpec};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenTag {
    pub name: String,
    pub kind: MessageKind,
    pub params: Vec<String>,
    pub returns: bool,
    pub repr: QueueRepr,
    pub unbounded: bool,
}

impl GenTag {
    fn payload_type(&self) -> String {
        match self.params.len() {
            1 => "V".to_owned(),
            n => format!("({})", vec!["V"; n].join(", ")),
        }
    }

    /// Expression packing the method parameters into one payload.
    fn payload_expr(&self) -> String {
        match self.params.len() {
            1 => self.params[0].clone(),
            _ => format!("({})", self.params.join(", ")),
        }
    }

    fn empty_check(&self) -> String {
        match self.repr {
            QueueRepr::Counter => format!("inner.queue_{} == 0", self.name),
            _ => format!("inner.queue_{}.is_empty()", self.name),
        }
    }
}

/// Receive transitions of one tag sharing a target. A self-loop arm has
/// `to == None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiveArm {
    pub from: Vec<usize>,
    pub to: Option<usize>,
    /// Operations whose waiters are woken on entry.
    pub notify: Vec<usize>,
}

/// The reaction an operation fires in one state, with its consume targets
/// keyed by the emptiness of each unbounded pattern queue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FireArm {
    pub state: usize,
    pub reaction: usize,
    pub targets: Vec<(Vec<(usize, bool)>, usize)>,
}

/// Everything the emitter needs, in signature order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenPlan {
    pub object: String,
    pub protocol: String,
    pub tags: Vec<GenTag>,
    pub labels: Vec<String>,
    pub reaction_names: Vec<String>,
    pub receive_arms: Vec<Vec<ReceiveArm>>,
    /// Per tag; empty for state tags.
    pub fire_arms: Vec<Vec<FireArm>>,
    /// Operations to wake per firing state.
    pub notify: BTreeMap<usize, Vec<usize>>,
    pub spec_hash: String,
}

impl GenPlan {
    pub fn new(spec: &ObjectSpec, a: &MatchingAutomaton) -> GenPlan {
        let layout = Layout::new(spec, a);
        let tags: Vec<GenTag> = spec
            .messages_by_signature()
            .into_iter()
            .zip(a.tags())
            .zip(&layout.reprs)
            .map(|((d, t), &repr)| GenTag {
                name: d.tag.to_string(),
                kind: d.kind,
                params: d.params.clone(),
                returns: d.returns.is_some(),
                repr,
                unbounded: t.bound == Bound::Unbounded,
            })
            .collect();
        let n = a.states().len();
        let notify: BTreeMap<usize, Vec<usize>> = (0..n)
            .filter(|&s| a.is_firing(s))
            .map(|s| (s, layout.notify[s].clone()))
            .collect();

        let receive_arms = (0..tags.len())
            .map(|t| {
                let mut loops = Vec::new();
                let mut by_target: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for s in 0..n {
                    match a.receive(s, t) {
                        Some(to) if to == s => loops.push(s),
                        Some(to) => by_target.entry(to).or_default().push(s),
                        None => {}
                    }
                }
                let mut arms: Vec<ReceiveArm> = by_target
                    .into_iter()
                    .map(|(to, from)| ReceiveArm {
                        from,
                        to: Some(to),
                        notify: notify.get(&to).cloned().unwrap_or_default(),
                    })
                    .collect();
                if !loops.is_empty() {
                    arms.push(ReceiveArm {
                        from: loops,
                        to: None,
                        notify: Vec::new(),
                    });
                }
                arms.sort_by_key(|arm| arm.from[0]);
                arms
            })
            .collect();

        let fire_arms = (0..tags.len())
            .map(|t| {
                if tags[t].kind == MessageKind::State {
                    return Vec::new();
                }
                (0..n)
                    .filter_map(|s| {
                        let r = a
                            .fireable(s)
                            .into_iter()
                            .find(|&r| a.reactions()[r].pattern.contains(&t))?;
                        let targets = a
                            .consumes_from(s)
                            .filter(|c| c.reaction == r)
                            .map(|c| (c.emptied.clone(), c.to))
                            .collect();
                        Some(FireArm {
                            state: s,
                            reaction: r,
                            targets,
                        })
                    })
                    .collect()
            })
            .collect();

        GenPlan {
            object: spec.name.clone(),
            protocol: spec.protocol.to_ascii(),
            tags,
            labels: (0..n).map(|s| a.label(s)).collect(),
            reaction_names: spec.reaction_names(),
            receive_arms,
            fire_arms,
            notify,
            spec_hash: spec_hash(spec),
        }
    }
}

/// SHA-256 of the canonical text of the spec, so comments and layout of
/// the source file do not matter.
pub fn spec_hash(spec: &ObjectSpec) -> String {
    format!("{:x}", Sha256::digest(spec.pretty_print().as_bytes()))
}

/// Emits the Rust module for `spec`. Deterministic.
pub fn generate_source(spec: &ObjectSpec, a: &MatchingAutomaton) -> String {
    let plan = GenPlan::new(spec, a);
    let mut out = String::new();
    Emitter {
        spec,
        plan: &plan,
        out: &mut out,
    }
    .emit()
    .expect("writing to a String");
    out
}

struct Emitter<'a> {
    spec: &'a ObjectSpec,
    plan: &'a GenPlan,
    out: &'a mut String,
}

fn arm_pattern(states: &[usize]) -> String {
    states
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" | ")
}

fn literal(v: &Value) -> String {
    match v {
        Value::Unit => "V::from(())".to_owned(),
        Value::Bool(b) => format!("V::from({b})"),
        Value::Int(n) => format!("V::from({n}i64)"),
        Value::Str(_) => format!("V::from({v})"),
    }
}

impl Emitter<'_> {
    fn emit(&mut self) -> fmt::Result {
        self.header()?;
        self.types()?;
        writeln!(self.out, "impl<V: Clone> {}<V> {{", self.plan.object)?;
        self.constructor()?;
        self.helpers()?;
        for t in 0..self.plan.tags.len() {
            match self.plan.tags[t].kind {
                MessageKind::State => self.state_method(t)?,
                MessageKind::Operation => self.operation_method(t)?,
            }
        }
        for r in 0..self.spec.reactions.len() {
            self.reaction_method(r)?;
        }
        writeln!(self.out, "}}")
    }

    fn header(&mut self) -> fmt::Result {
        let p = self.plan;
        let tags: Vec<&str> = p.tags.iter().map(|t| t.name.as_str()).collect();
        writeln!(
            self.out,
            "// @generated by tsop from object spec sha256:{}",
            p.spec_hash
        )?;
        writeln!(self.out, "// Do not edit; regenerate with `tsop generate`.")?;
        writeln!(self.out, "//")?;
        writeln!(self.out, "// object {}", p.object)?;
        writeln!(self.out, "// protocol {}", p.protocol)?;
        writeln!(self.out, "// states over ({}):", tags.join(", "))?;
        for (i, label) in p.labels.iter().enumerate() {
            writeln!(self.out, "//   #{i} {label}")?;
        }
        writeln!(self.out)?;
        writeln!(self.out, "#![allow(")?;
        for lint in [
            "non_snake_case",
            "non_camel_case_types",
            "dead_code",
            "unused_variables",
        ] {
            writeln!(self.out, "    {lint},")?;
        }
        writeln!(self.out, "    clippy::all")?;
        writeln!(self.out, ")]")?;
        writeln!(self.out)?;
        if p.tags.iter().any(|t| t.repr == QueueRepr::Fifo) {
            writeln!(self.out, "use std::collections::VecDeque;")?;
        }
        writeln!(self.out, "use std::fmt;")?;
        writeln!(self.out, "use std::marker::PhantomData;")?;
        writeln!(
            self.out,
            "use std::sync::{{Condvar, Mutex, MutexGuard, PoisonError}};"
        )?;
        writeln!(self.out)
    }

    fn types(&mut self) -> fmt::Result {
        let p = self.plan;
        let object = &p.object;
        writeln!(
            self.out,
            r#"/// A message arrived in a state without a receive transition for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolViolation {{
    pub tag: &'static str,
    pub state: usize,
    pub counters: &'static str,
}}

impl fmt::Display for ProtocolViolation {{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {{
        write!(
            f,
            "protocol violation on {object}: `{{}}` received in state #{{}} ({{}})",
            self.tag, self.state, self.counters
        )
    }}
}}

impl std::error::Error for ProtocolViolation {{}}

fn wait<'a, T>(cv: &Condvar, guard: MutexGuard<'a, T>) -> MutexGuard<'a, T> {{
    cv.wait(guard).unwrap_or_else(PoisonError::into_inner)
}}
"#
        )?;
        self.labels()?;

        writeln!(self.out, "struct Inner<V> {{")?;
        writeln!(self.out, "    state: usize,")?;
        for t in &p.tags {
            let ty = match t.repr {
                QueueRepr::NoQueue => continue,
                QueueRepr::Counter => "usize".to_owned(),
                QueueRepr::Slot => format!("Option<{}>", t.payload_type()),
                QueueRepr::Fifo => format!("VecDeque<{}>", t.payload_type()),
            };
            writeln!(self.out, "    queue_{}: {ty},", t.name)?;
        }
        writeln!(self.out, "    values: PhantomData<fn() -> V>,")?;
        writeln!(self.out, "}}")?;
        writeln!(self.out)?;

        writeln!(self.out, "pub struct {object}<V> {{")?;
        writeln!(self.out, "    lock: Mutex<Inner<V>>,")?;
        for t in p.tags.iter().filter(|t| t.kind == MessageKind::Operation) {
            writeln!(self.out, "    try_{}: Condvar,", t.name)?;
        }
        writeln!(self.out, "}}")?;
        writeln!(self.out)
    }

    /// The label table, laid out the way rustfmt lays out arrays: one line
    /// if it fits, packed rows for short items, one item per row otherwise.
    fn labels(&mut self) -> fmt::Result {
        let items: Vec<String> = self.plan.labels.iter().map(|l| format!("{l:?}")).collect();
        let head = format!("const LABELS: [&str; {}] = [", items.len());
        let one_line = format!("{head}{}];", items.join(", "));
        if one_line.len() <= 100 {
            return writeln!(self.out, "{one_line}\n");
        }
        writeln!(self.out, "{head}")?;
        if items.iter().all(|i| i.len() <= 10) {
            let mut row = String::new();
            for item in &items {
                if !row.is_empty() && 4 + row.len() + 1 + item.len() + 1 > 100 {
                    writeln!(self.out, "    {row}")?;
                    row.clear();
                }
                if !row.is_empty() {
                    row.push(' ');
                }
                row.push_str(item);
                row.push(',');
            }
            writeln!(self.out, "    {row}")?;
        } else {
            for item in &items {
                writeln!(self.out, "    {item},")?;
            }
        }
        writeln!(self.out, "];\n")
    }

    fn constructor(&mut self) -> fmt::Result {
        let p = self.plan;
        let mut bounds: Vec<&str> = self
            .spec
            .init
            .iter()
            .flat_map(|i| &i.args)
            .map(|v| match v {
                Value::Unit => "From<()>",
                Value::Bool(_) => "From<bool>",
                Value::Int(_) => "From<i64>",
                Value::Str(_) => "From<&'static str>",
            })
            .collect();
        bounds.sort_unstable();
        bounds.dedup();
        let where_clause = match bounds.is_empty() {
            true => String::new(),
            false => format!("\n    where\n        V: {},", bounds.join(" + ")),
        };
        writeln!(
            self.out,
            "    /// An instance in the initial state, before the constructor sends."
        )?;
        writeln!(self.out, "    pub(crate) fn uninit() -> Self {{")?;
        writeln!(self.out, "        {} {{", p.object)?;
        writeln!(self.out, "            lock: Mutex::new(Inner {{")?;
        writeln!(self.out, "                state: 0,")?;
        for t in &p.tags {
            let init = match t.repr {
                QueueRepr::NoQueue => continue,
                QueueRepr::Counter => "0",
                QueueRepr::Slot => "None",
                QueueRepr::Fifo => "VecDeque::new()",
            };
            writeln!(self.out, "                queue_{}: {init},", t.name)?;
        }
        writeln!(self.out, "                values: PhantomData,")?;
        writeln!(self.out, "            }}),")?;
        for t in p.tags.iter().filter(|t| t.kind == MessageKind::Operation) {
            writeln!(self.out, "            try_{}: Condvar::new(),", t.name)?;
        }
        writeln!(self.out, "        }}")?;
        writeln!(self.out, "    }}")?;
        writeln!(self.out)?;
        let open = |sig: &str| match where_clause.is_empty() {
            true => format!("    {sig} {{"),
            false => format!("    {sig}{where_clause}\n    {{"),
        };
        writeln!(
            self.out,
            "{}",
            open("pub fn new() -> Result<Self, ProtocolViolation>")
        )?;
        writeln!(self.out, "        let this = Self::uninit();")?;
        writeln!(self.out, "        this.run_init()?;")?;
        writeln!(self.out, "        Ok(this)")?;
        writeln!(self.out, "    }}")?;
        writeln!(self.out)?;
        writeln!(self.out, "    /// The constructor sends.")?;
        writeln!(
            self.out,
            "{}",
            open("pub(crate) fn run_init(&self) -> Result<(), ProtocolViolation>")
        )?;
        for i in &self.spec.init {
            let args: Vec<String> = i.args.iter().map(literal).collect();
            writeln!(self.out, "        self.{}({})?;", i.tag, args.join(", "))?;
        }
        writeln!(self.out, "        Ok(())")?;
        writeln!(self.out, "    }}")?;
        writeln!(self.out)
    }

    fn helpers(&mut self) -> fmt::Result {
        writeln!(
            self.out,
            r#"    /// Index of the current automaton state.
    pub fn current_state(&self) -> usize {{
        self.lock().state
    }}

    /// Counter tuple of the current state.
    pub fn counters(&self) -> &'static str {{
        LABELS[self.lock().state]
    }}

    fn lock(&self) -> MutexGuard<'_, Inner<V>> {{
        self.lock.lock().unwrap_or_else(PoisonError::into_inner)
    }}

    fn violation(tag: &'static str, state: usize) -> ProtocolViolation {{
        ProtocolViolation {{
            tag,
            state,
            counters: LABELS[state],
        }}
    }}
"#
        )?;
        writeln!(self.out, "    fn wake(&self, state: usize) {{")?;
        writeln!(self.out, "        match state {{")?;
        let mut groups: BTreeMap<&Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (s, ops) in &self.plan.notify {
            groups.entry(ops).or_default().push(*s);
        }
        let mut groups: Vec<(Vec<usize>, &Vec<usize>)> = groups
            .into_iter()
            .map(|(ops, states)| (states, ops))
            .collect();
        groups.sort();
        for (states, ops) in groups {
            self.arm_with_notify(3, &arm_pattern(&states), None, ops)?;
        }
        writeln!(self.out, "            _ => {{}}")?;
        writeln!(self.out, "        }}")?;
        writeln!(self.out, "    }}")?;
        writeln!(self.out)
    }

    /// One match arm that optionally sets the state and wakes waiters.
    fn arm_with_notify(
        &mut self,
        depth: usize,
        pattern: &str,
        to: Option<usize>,
        ops: &[usize],
    ) -> fmt::Result {
        let pad = "    ".repeat(depth);
        let mut stmts: Vec<String> = Vec::new();
        if let Some(to) = to {
            stmts.push(format!("inner.state = {to}"));
        }
        for &op in ops {
            stmts.push(format!("self.try_{}.notify_all()", self.plan.tags[op].name));
        }
        match stmts.len() {
            0 => writeln!(self.out, "{pad}{pattern} => {{}}"),
            1 => writeln!(self.out, "{pad}{pattern} => {},", stmts[0]),
            _ => {
                writeln!(self.out, "{pad}{pattern} => {{")?;
                for s in stmts {
                    writeln!(self.out, "{pad}    {s};")?;
                }
                writeln!(self.out, "{pad}}}")
            }
        }
    }

    fn signature(&self, t: usize) -> String {
        let params: Vec<String> = self.plan.tags[t]
            .params
            .iter()
            .map(|p| format!("{p}: V"))
            .collect();
        let mut args = vec!["&self".to_owned()];
        args.extend(params);
        args.join(", ")
    }

    /// Stores the message and takes the receive transition; a missing one
    /// returns the violation after releasing the lock.
    fn receive(&mut self, t: usize) -> fmt::Result {
        let tag = &self.plan.tags[t];
        writeln!(self.out, "        let mut inner = self.lock();")?;
        match tag.repr {
            QueueRepr::NoQueue => {}
            QueueRepr::Counter => writeln!(self.out, "        inner.queue_{} += 1;", tag.name)?,
            QueueRepr::Slot => writeln!(
                self.out,
                "        inner.queue_{} = Some({});",
                tag.name,
                tag.payload_expr()
            )?,
            QueueRepr::Fifo => writeln!(
                self.out,
                "        inner.queue_{}.push_back({});",
                tag.name,
                tag.payload_expr()
            )?,
        }
        writeln!(self.out, "        match inner.state {{")?;
        for arm in self.plan.receive_arms[t].clone() {
            self.arm_with_notify(3, &arm_pattern(&arm.from), arm.to, &arm.notify)?;
        }
        writeln!(self.out, "            s => {{")?;
        writeln!(self.out, "                drop(inner);")?;
        writeln!(
            self.out,
            "                return Err(Self::violation({:?}, s));",
            tag.name
        )?;
        writeln!(self.out, "            }}")?;
        writeln!(self.out, "        }}")
    }

    fn state_method(&mut self, t: usize) -> fmt::Result {
        let name = self.plan.tags[t].name.clone();
        writeln!(
            self.out,
            "    pub(crate) fn {name}({}) -> Result<(), ProtocolViolation> {{",
            self.signature(t)
        )?;
        self.receive(t)?;
        writeln!(self.out, "        Ok(())")?;
        writeln!(self.out, "    }}")?;
        writeln!(self.out)
    }

    fn operation_method(&mut self, t: usize) -> fmt::Result {
        let tag = self.plan.tags[t].clone();
        let ret = if tag.returns { "V" } else { "()" };
        writeln!(
            self.out,
            "    pub fn {}({}) -> Result<{ret}, ProtocolViolation> {{",
            tag.name,
            self.signature(t)
        )?;
        self.receive(t)?;
        writeln!(self.out, "        loop {{")?;
        writeln!(self.out, "            match inner.state {{")?;
        for arm in self.plan.fire_arms[t].clone() {
            self.fire_arm(t, &arm)?;
        }
        writeln!(
            self.out,
            "                _ => inner = wait(&self.try_{}, inner),",
            tag.name
        )?;
        writeln!(self.out, "            }}")?;
        writeln!(self.out, "        }}")?;
        writeln!(self.out, "    }}")?;
        writeln!(self.out)
    }

    fn fire_arm(&mut self, own: usize, arm: &FireArm) -> fmt::Result {
        let pad = "                    ";
        let reaction = &self.spec.reactions[arm.reaction];
        let sig = self.spec.signature();
        writeln!(self.out, "                {} => {{", arm.state)?;

        let items: Vec<(usize, &Vec<String>)> = reaction
            .pattern
            .iter()
            .map(|p| {
                (
                    sig.index_of(p.tag.as_str()).expect("pattern tag"),
                    &p.bindings,
                )
            })
            .collect();
        // The invoker's own payload is bound first: later bindings may
        // shadow parameter names.
        let ordered = items
            .iter()
            .filter(|(t, _)| *t == own)
            .chain(items.iter().filter(|(t, _)| *t != own));
        for &(t, bindings) in ordered {
            let tag = &self.plan.tags[t];
            let lhs = match bindings.len() {
                0 => None,
                1 => Some(bindings[0].clone()),
                _ => Some(format!("({})", bindings.join(", "))),
            };
            match tag.repr {
                QueueRepr::NoQueue if t == own => {
                    if let Some(lhs) = lhs {
                        let rhs = tag.payload_expr();
                        if lhs != rhs {
                            writeln!(self.out, "{pad}let {lhs} = {rhs};")?;
                        }
                    }
                }
                QueueRepr::NoQueue => {}
                QueueRepr::Counter => writeln!(self.out, "{pad}inner.queue_{} -= 1;", tag.name)?,
                QueueRepr::Slot | QueueRepr::Fifo => {
                    let take = if tag.repr == QueueRepr::Slot {
                        "take()"
                    } else {
                        "pop_front()"
                    };
                    writeln!(
                        self.out,
                        "{pad}let {} = inner.queue_{}.{take}.expect(\"{} pending\");",
                        lhs.unwrap_or_else(|| "_".to_owned()),
                        tag.name,
                        tag.name
                    )?;
                }
            }
        }

        let mut targets: Vec<usize> = arm.targets.iter().map(|(_, to)| *to).collect();
        targets.sort_unstable();
        targets.dedup();
        let flags: Vec<usize> = arm.targets[0].0.iter().map(|(t, _)| *t).collect();
        if targets.len() == 1 {
            writeln!(self.out, "{pad}inner.state = {};", targets[0])?;
        } else if flags.len() == 1 {
            let check = self.plan.tags[flags[0]].empty_check();
            let on = |e: bool| {
                arm.targets
                    .iter()
                    .find(|(f, _)| f[0].1 == e)
                    .expect("both outcomes")
                    .1
            };
            writeln!(
                self.out,
                "{pad}inner.state = if {check} {{ {} }} else {{ {} }};",
                on(true),
                on(false)
            )?;
        } else {
            let checks: Vec<String> = flags
                .iter()
                .map(|&t| self.plan.tags[t].empty_check())
                .collect();
            writeln!(
                self.out,
                "{pad}inner.state = match ({}) {{",
                checks.join(", ")
            )?;
            for (f, to) in &arm.targets {
                let pat: Vec<String> = f.iter().map(|(_, e)| e.to_string()).collect();
                writeln!(self.out, "{pad}    ({}) => {to},", pat.join(", "))?;
            }
            writeln!(self.out, "{pad}}};")?;
        }
        if targets.iter().any(|s| self.plan.notify.contains_key(s)) {
            writeln!(self.out, "{pad}self.wake(inner.state);")?;
        }
        let args: Vec<&str> = reaction.bindings().collect();
        writeln!(self.out, "{pad}drop(inner);")?;
        writeln!(
            self.out,
            "{pad}return self.{}({});",
            self.plan.reaction_names[arm.reaction],
            args.join(", ")
        )?;
        writeln!(self.out, "                }}")
    }

    fn reaction_method(&mut self, r: usize) -> fmt::Result {
        let reaction = &self.spec.reactions[r];
        let op = self.spec.operation_of(reaction);
        let returns = self
            .spec
            .message(op.as_str())
            .is_some_and(|m| m.returns.is_some());
        let params: Vec<String> = reaction.bindings().map(|b| format!("{b}: V")).collect();
        let mut args = vec!["&self".to_owned()];
        args.extend(params);
        writeln!(
            self.out,
            "    fn {}({}) -> Result<{}, ProtocolViolation> {{",
            self.plan.reaction_names[r],
            args.join(", "),
            if returns { "V" } else { "()" }
        )?;

        // Every use but the last clones.
        let mut uses: Vec<&str> = reaction
            .body
            .iter()
            .flat_map(|Action::SendSelf { args, .. }| args.iter().map(String::as_str))
            .collect();
        uses.extend(reaction.returns.as_deref());
        let mut remaining: BTreeMap<&str, usize> = BTreeMap::new();
        for u in &uses {
            *remaining.entry(u).or_default() += 1;
        }
        let mut take = |x: &str| -> String {
            let left = remaining.get_mut(x).expect("counted use");
            *left -= 1;
            if *left == 0 {
                x.to_owned()
            } else {
                format!("{x}.clone()")
            }
        };
        for Action::SendSelf { tag, args } in &reaction.body {
            let args: Vec<String> = args.iter().map(|a| take(a)).collect();
            writeln!(self.out, "        self.{tag}({})?;", args.join(", "))?;
        }
        match &reaction.returns {
            Some(x) => writeln!(self.out, "        Ok({})", take(x))?,
            None => writeln!(self.out, "        Ok(())")?,
        }
        writeln!(self.out, "    }}")?;
        if r + 1 < self.spec.reactions.len() {
            writeln!(self.out)?;
        }
        Ok(())
    }
}

/// Checks that every reaction call in generated text directly follows the
/// release of the lock.
pub fn bodies_run_unlocked(source: &str) -> bool {
    let lines: Vec<&str> = source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.starts_with("return self.when_"))
        .all(|(i, _)| i > 0 && lines[i - 1] == "drop(inner);")
}

/// A mismatch between generated and expected text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenDiff {
    /// `(line number, expected, actual)` for the first differing lines.
    pub lines: Vec<(usize, Option<String>, Option<String>)>,
    pub expected_len: usize,
    pub actual_len: usize,
}

impl fmt::Display for GoldenDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "generated source differs from golden ({} vs {} bytes)",
            self.actual_len, self.expected_len
        )?;
        for (n, expected, actual) in &self.lines {
            writeln!(f, "line {n}:")?;
            writeln!(f, "  - {}", expected.as_deref().unwrap_or("<missing>"))?;
            writeln!(f, "  + {}", actual.as_deref().unwrap_or("<missing>"))?;
        }
        Ok(())
    }
}

impl std::error::Error for GoldenDiff {}

/// Byte-compares freshly generated source against `expected`.
pub fn golden_check(
    spec: &ObjectSpec,
    a: &MatchingAutomaton,
    expected: &str,
) -> Result<(), GoldenDiff> {
    let actual = generate_source(spec, a);
    if actual == expected {
        return Ok(());
    }
    let (mut e, mut g) = (expected.split('\n'), actual.split('\n'));
    let mut lines = Vec::new();
    for n in 1.. {
        match (e.next(), g.next()) {
            (None, None) => break,
            (x, y) if x == y => {}
            (x, y) => {
                lines.push((n, x.map(str::to_owned), y.map(str::to_owned)));
                if lines.len() == 5 {
                    break;
                }
            }
        }
    }
    Err(GoldenDiff {
        lines,
        expected_len: expected.len(),
        actual_len: actual.len(),
    })
}
