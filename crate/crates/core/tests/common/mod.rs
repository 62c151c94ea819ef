//! Generators and checkers shared by the property and acceptance suites.
#![allow(dead_code)]

use proptest::prelude::*;
use tsop_core::protocol::{Bound, ProtocolType, Signature};
use tsop_core::spec::{parse_spec, ObjectSpec};

pub const TAGS: [&str; 4] = ["a", "b", "c", "d"];

/// Well-formed types over the first `k ≤ 4` tags. Each tag is either always
/// starred or never starred, which is exactly well-formedness.
pub fn types() -> impl Strategy<Value = (ProtocolType, Signature)> {
    (1usize..=4, any::<[bool; 4]>())
        .prop_flat_map(|(k, starred)| {
            let leaf = prop_oneof![
                1 => Just(ProtocolType::Zero),
                2 => Just(ProtocolType::One),
                7 => (0..k).prop_map(move |i| match starred[i] {
                    true => ProtocolType::star(TAGS[i]),
                    false => ProtocolType::atom(TAGS[i]),
                }),
            ];
            let ty = leaf.prop_recursive(4, 12, 2, |inner| {
                prop_oneof![
                    (inner.clone(), inner.clone()).prop_map(|(l, r)| ProtocolType::sum(l, r)),
                    (inner.clone(), inner).prop_map(|(l, r)| ProtocolType::shuffle(l, r)),
                ]
            });
            ty.prop_map(move |t| (t, Signature::from_names(&TAGS[..k]).unwrap()))
        })
        .prop_filter("bounds at most 2", |(t, sig)| small_bounds(t, sig))
}

pub fn small_bounds(ty: &ProtocolType, sig: &Signature) -> bool {
    if ty.semantics(sig).is_empty() {
        return true;
    }
    sig.tags().iter().all(|t| match ty.bound(t, sig).unwrap() {
        Bound::Bounded(n) => n <= 2,
        Bound::Unbounded => true,
    })
}

/// A spec declaring every tag of `sig` as an argument-free state message
/// and no reactions.
pub fn states_only_spec(ty: &ProtocolType, sig: &Signature) -> String {
    let mut text = format!("object Gen\nprotocol {}\n", ty.to_ascii());
    for t in sig.tags() {
        text.push_str(&format!("state {t}()\n"));
    }
    text
}

#[derive(Clone, Debug)]
pub struct SpecShape {
    pub is_op: [bool; 4],
    pub arity: [usize; 4],
    pub returns: [bool; 4],
    /// (operation choice, state mask, body mask)
    pub reactions: Vec<(u8, u8, u8)>,
    pub init: Vec<usize>,
}

fn spec_shapes() -> impl Strategy<Value = SpecShape> {
    (
        any::<[bool; 4]>(),
        prop::array::uniform4(0usize..=2),
        any::<[bool; 4]>(),
        prop::collection::vec(any::<(u8, u8, u8)>(), 0..=3),
        prop::collection::vec(0usize..4, 0..=2),
    )
        .prop_map(|(is_op, arity, returns, reactions, init)| SpecShape {
            is_op,
            arity,
            returns,
            reactions,
            init,
        })
}

/// Specs with mixed message kinds, arities, reactions and constructor
/// sends over the generated types. Shapes that fail validation are retried.
pub fn specs() -> impl Strategy<Value = ObjectSpec> {
    (types(), spec_shapes()).prop_filter_map("valid spec", |((ty, sig), shape)| {
        if ty.semantics(&sig).is_empty() {
            return None;
        }
        parse_spec(&spec_text(&ty, &sig, &shape)).ok()
    })
}

pub fn spec_text(ty: &ProtocolType, sig: &Signature, shape: &SpecShape) -> String {
    let k = sig.len();
    let params = |i: usize| {
        (0..shape.arity[i])
            .map(|p| format!("p{p}"))
            .collect::<Vec<_>>()
    };
    let mut text = format!("object Gen\nprotocol {}\n", ty.to_ascii());
    for (i, name) in TAGS.iter().enumerate().take(k) {
        let kind = if shape.is_op[i] { "operation" } else { "state" };
        text.push_str(&format!("{kind} {name}({})", params(i).join(", ")));
        if shape.is_op[i] && shape.returns[i] {
            text.push_str(" returns value");
        }
        text.push('\n');
    }
    let ops: Vec<usize> = (0..k).filter(|&i| shape.is_op[i]).collect();
    for &(o, smask, bmask) in &shape.reactions {
        if ops.is_empty() {
            break;
        }
        let op = ops[o as usize % ops.len()];
        let states: Vec<usize> = (0..k)
            .filter(|&i| !shape.is_op[i] && smask & (1 << i) != 0)
            .collect();
        let mut vars = Vec::new();
        let mut item = |i: usize| {
            let names: Vec<String> = (0..shape.arity[i])
                .map(|_| {
                    vars.push(format!("v{}", vars.len()));
                    vars.last().unwrap().clone()
                })
                .collect();
            format!("{}({})", TAGS[i], names.join(", "))
        };
        let mut pattern: Vec<String> = states.iter().map(|&i| item(i)).collect();
        if smask & 0x80 != 0 {
            pattern.insert(0, item(op));
        } else {
            pattern.push(item(op));
        }
        let mut actions = Vec::new();
        for j in (0..k).filter(|&j| !shape.is_op[j] && bmask & (1 << j) != 0) {
            if shape.arity[j] > 0 && vars.is_empty() {
                continue;
            }
            let args: Vec<&str> = (0..shape.arity[j])
                .map(|a| vars[(a + j) % vars.len()].as_str())
                .collect();
            actions.push(format!("{}({})", TAGS[j], args.join(", ")));
        }
        if shape.returns[op] {
            let Some(v) = vars.first() else { continue };
            actions.push(format!("return {v}"));
        }
        text.push_str(&format!(
            "reaction {} -> {}\n",
            pattern.join(" & "),
            actions.join(", ")
        ));
    }
    for &i in shape.init.iter().filter(|&&i| i < k && !shape.is_op[i]) {
        let args: Vec<String> = (0..shape.arity[i]).map(|a| a.to_string()).collect();
        text.push_str(&format!("init {}({})\n", TAGS[i], args.join(", ")));
    }
    text
}

/// Accepts the DOT subset a graph file needs: `digraph ID { stmt* }` with
/// node, edge, attribute and `a=b` statements. Returns the first problem.
pub fn check_dot(text: &str) -> Result<(), String> {
    let tokens = dot_tokens(text)?;
    let mut p = DotParser {
        tokens: &tokens,
        pos: 0,
    };
    p.keyword("digraph")?;
    if p.peek() != Some(&DotTok::Punct('{')) {
        p.id()?;
    }
    p.punct('{')?;
    while p.peek() != Some(&DotTok::Punct('}')) {
        p.stmt()?;
    }
    p.punct('}')?;
    match p.peek() {
        None => Ok(()),
        Some(t) => Err(format!("trailing token {t:?}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum DotTok {
    Id(String),
    Quoted,
    Punct(char),
    Arrow,
}

fn dot_tokens(text: &str) -> Result<Vec<DotTok>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '"' => {
                chars.next();
                loop {
                    match chars.next() {
                        None => return Err("unterminated string".into()),
                        Some('\\') => {
                            chars.next().ok_or("dangling escape")?;
                        }
                        Some('"') => break,
                        Some('\n') => return Err("newline in string".into()),
                        Some(_) => {}
                    }
                }
                out.push(DotTok::Quoted);
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some('>') => out.push(DotTok::Arrow),
                    other => return Err(format!("unexpected `-` followed by {other:?}")),
                }
            }
            '{' | '}' | '[' | ']' | ';' | ',' | '=' => {
                chars.next();
                out.push(DotTok::Punct(c));
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '.' => {
                let mut id = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '.' {
                        id.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if id.starts_with(|d: char| d.is_ascii_digit())
                    && !id.chars().all(|d| d.is_ascii_digit() || d == '.')
                {
                    return Err(format!("bad identifier `{id}`"));
                }
                out.push(DotTok::Id(id));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct DotParser<'a> {
    tokens: &'a [DotTok],
    pos: usize,
}

impl DotParser<'_> {
    fn peek(&self) -> Option<&DotTok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<DotTok, String> {
        let t = self.peek().cloned().ok_or("unexpected end of input")?;
        self.pos += 1;
        Ok(t)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), String> {
        match self.next()? {
            DotTok::Id(s) if s == kw => Ok(()),
            t => Err(format!("expected `{kw}`, found {t:?}")),
        }
    }

    fn punct(&mut self, c: char) -> Result<(), String> {
        match self.next()? {
            DotTok::Punct(d) if d == c => Ok(()),
            t => Err(format!("expected `{c}`, found {t:?}")),
        }
    }

    fn id(&mut self) -> Result<(), String> {
        match self.next()? {
            DotTok::Id(_) | DotTok::Quoted => Ok(()),
            t => Err(format!("expected an identifier, found {t:?}")),
        }
    }

    fn attr_list(&mut self) -> Result<(), String> {
        self.punct('[')?;
        while self.peek() != Some(&DotTok::Punct(']')) {
            self.id()?;
            self.punct('=')?;
            self.id()?;
            if matches!(self.peek(), Some(DotTok::Punct(',' | ';'))) {
                self.pos += 1;
            }
        }
        self.punct(']')
    }

    fn stmt(&mut self) -> Result<(), String> {
        let is_attr_stmt = matches!(self.peek(), Some(DotTok::Id(s)) if s == "graph" || s == "node" || s == "edge");
        self.id()?;
        if is_attr_stmt {
            self.attr_list()?;
        } else if self.peek() == Some(&DotTok::Punct('=')) {
            self.pos += 1;
            self.id()?;
        } else {
            while self.peek() == Some(&DotTok::Arrow) {
                self.pos += 1;
                self.id()?;
            }
            if self.peek() == Some(&DotTok::Punct('[')) {
                self.attr_list()?;
            }
        }
        if self.peek() == Some(&DotTok::Punct(';')) {
            self.pos += 1;
        }
        Ok(())
    }
}
