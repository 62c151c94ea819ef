use std::collections::HashSet;

use super::{
    Action, InitSend, MessageDecl, MessageKind, ObjectSpec, PatternItem, Reaction, SpecError,
    SpecErrorKind,
};
use crate::protocol::{is_identifier, parse_protocol, ProtocolError, Signature, Tag};
use crate::value::Value;

/// Parses and validates a `.tsop` object specification.
pub fn parse_spec(text: &str) -> Result<ObjectSpec, SpecError> {
    let mut name: Option<String> = None;
    let mut protocol: Option<(usize, String)> = None;
    let mut messages: Vec<(usize, MessageDecl)> = Vec::new();
    let mut reactions: Vec<(usize, RawReaction)> = Vec::new();
    let mut inits: Vec<(usize, RawCall)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let err = |kind| SpecError { line, kind };
        let (keyword, rest) = match content.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (content, ""),
        };
        match keyword {
            "object" => {
                if name.is_some() {
                    return Err(err(SpecErrorKind::Duplicate("object".into())));
                }
                if !is_identifier(rest) {
                    return Err(err(SpecErrorKind::Syntax(format!(
                        "bad object name `{rest}`"
                    ))));
                }
                name = Some(rest.to_owned());
            }
            "protocol" => {
                if protocol.is_some() {
                    return Err(err(SpecErrorKind::Duplicate("protocol".into())));
                }
                protocol = Some((line, rest.to_owned()));
            }
            "state" | "operation" => {
                let kind = if keyword == "state" {
                    MessageKind::State
                } else {
                    MessageKind::Operation
                };
                let decl = parse_decl(rest, kind).map_err(err)?;
                if messages.iter().any(|(_, m)| m.tag == decl.tag) {
                    return Err(err(SpecErrorKind::Duplicate(decl.tag.to_string())));
                }
                messages.push((line, decl));
            }
            "reaction" => reactions.push((line, parse_reaction(rest).map_err(err)?)),
            "init" => {
                let mut lx = Lexer::new(rest);
                let call = lx.call(true).map_err(err)?;
                lx.end().map_err(err)?;
                inits.push((line, call));
            }
            other => {
                return Err(err(SpecErrorKind::Syntax(format!(
                    "unknown declaration `{other}`"
                ))))
            }
        }
    }

    let name = name.ok_or(SpecError {
        line: 0,
        kind: SpecErrorKind::Missing("object"),
    })?;
    let (protocol_line, protocol_text) = protocol.ok_or(SpecError {
        line: 0,
        kind: SpecErrorKind::Missing("protocol"),
    })?;

    let signature =
        Signature::new(messages.iter().map(|(_, m)| m.tag.clone())).map_err(|e| SpecError {
            line: 0,
            kind: e.into(),
        })?;
    let perr = |kind| SpecError {
        line: protocol_line,
        kind,
    };
    let protocol = parse_protocol(&protocol_text, &signature).map_err(|e| match e {
        ProtocolError::UnknownTag { name, .. } => perr(SpecErrorKind::UnknownTag(name)),
        other => perr(other.into()),
    })?;
    if let Err(ProtocolError::NotWellFormed(tag)) = protocol.check_well_formed() {
        return Err(perr(SpecErrorKind::NotWellFormed(tag)));
    }
    if protocol.is_empty(&signature) {
        return Err(perr(SpecErrorKind::EmptyProtocol));
    }

    let decls: Vec<MessageDecl> = messages.into_iter().map(|(_, m)| m).collect();
    let lookup = |line: usize, tag: &str| -> Result<&MessageDecl, SpecError> {
        decls
            .iter()
            .find(|m| m.tag.as_str() == tag)
            .ok_or(SpecError {
                line,
                kind: SpecErrorKind::UnknownTag(tag.to_owned()),
            })
    };

    let mut checked_reactions = Vec::new();
    for (line, raw) in reactions {
        let err = |kind| SpecError { line, kind };
        let mut seen_tags = HashSet::new();
        let mut bound = HashSet::new();
        let mut operations = Vec::new();
        let mut pattern = Vec::new();
        for call in raw.pattern {
            let decl = lookup(line, &call.tag)?;
            if !seen_tags.insert(call.tag.clone()) {
                return Err(err(SpecErrorKind::DuplicatePatternTag(call.tag)));
            }
            if decl.arity() != call.args.len() {
                return Err(err(SpecErrorKind::Arity {
                    tag: call.tag,
                    expected: decl.arity(),
                    found: call.args.len(),
                }));
            }
            let mut bindings = Vec::new();
            for arg in call.args {
                let Arg::Name(b) = arg else {
                    return Err(err(SpecErrorKind::Syntax(
                        "join patterns bind variables, not literals".into(),
                    )));
                };
                if !bound.insert(b.clone()) {
                    return Err(err(SpecErrorKind::DuplicateBinding(b)));
                }
                bindings.push(b);
            }
            if decl.kind == MessageKind::Operation {
                operations.push(decl);
            }
            pattern.push(PatternItem {
                tag: decl.tag.clone(),
                bindings,
            });
        }
        if operations.len() != 1 {
            return Err(err(SpecErrorKind::OperationCount(operations.len())));
        }
        let operation = operations[0];
        let mut body = Vec::new();
        for call in raw.body {
            let decl = lookup(line, &call.tag)?;
            if decl.kind != MessageKind::State {
                return Err(err(SpecErrorKind::NotAState(call.tag)));
            }
            if decl.arity() != call.args.len() {
                return Err(err(SpecErrorKind::Arity {
                    tag: call.tag,
                    expected: decl.arity(),
                    found: call.args.len(),
                }));
            }
            let mut args = Vec::new();
            for arg in call.args {
                let Arg::Name(a) = arg else {
                    return Err(err(SpecErrorKind::Syntax(
                        "reaction bodies pass bound variables, not literals".into(),
                    )));
                };
                if !bound.contains(&a) {
                    return Err(err(SpecErrorKind::UnboundVariable(a)));
                }
                args.push(a);
            }
            body.push(Action::SendSelf {
                tag: decl.tag.clone(),
                args,
            });
        }
        match (&raw.returns, &operation.returns) {
            (Some(x), Some(_)) if !bound.contains(x) => {
                return Err(err(SpecErrorKind::UnboundVariable(x.clone())))
            }
            (Some(_), None) => {
                return Err(err(SpecErrorKind::UnexpectedReturn(
                    operation.tag.to_string(),
                )))
            }
            (None, Some(_)) => {
                return Err(err(SpecErrorKind::MissingReturn(operation.tag.to_string())))
            }
            _ => {}
        }
        checked_reactions.push(Reaction {
            pattern,
            body,
            returns: raw.returns,
        });
    }

    let mut init = Vec::new();
    for (line, call) in inits {
        let err = |kind| SpecError { line, kind };
        let decl = lookup(line, &call.tag)?;
        if decl.kind != MessageKind::State {
            return Err(err(SpecErrorKind::NotAState(call.tag)));
        }
        if decl.arity() != call.args.len() {
            return Err(err(SpecErrorKind::Arity {
                tag: call.tag,
                expected: decl.arity(),
                found: call.args.len(),
            }));
        }
        let args = call
            .args
            .into_iter()
            .map(|a| match a {
                Arg::Literal(v) => Ok(v),
                Arg::Name(n) => Err(err(SpecErrorKind::Syntax(format!(
                    "constructor sends take literals, found `{n}`"
                )))),
            })
            .collect::<Result<_, _>>()?;
        init.push(InitSend {
            tag: decl.tag.clone(),
            args,
        });
    }

    Ok(ObjectSpec {
        name,
        messages: decls,
        protocol,
        reactions: checked_reactions,
        init,
        signature,
    })
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if in_str => escaped = true,
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_decl(rest: &str, kind: MessageKind) -> Result<MessageDecl, SpecErrorKind> {
    let mut lx = Lexer::new(rest);
    let call = lx.call(false)?;
    let mut params = Vec::new();
    for arg in call.args {
        let Arg::Name(p) = arg else {
            unreachable!("literals disabled")
        };
        if params.contains(&p) {
            return Err(SpecErrorKind::DuplicateBinding(p));
        }
        params.push(p);
    }
    let returns = if lx.eat_word("returns") {
        let r = lx.ident()?;
        if kind == MessageKind::State {
            return Err(SpecErrorKind::StateReturns(call.tag));
        }
        Some(r)
    } else {
        None
    };
    lx.end()?;
    let tag = Tag::new(call.tag).map_err(|e| SpecErrorKind::Syntax(e.to_string()))?;
    Ok(MessageDecl {
        tag,
        kind,
        params,
        returns,
    })
}

struct RawReaction {
    pattern: Vec<RawCall>,
    body: Vec<RawCall>,
    returns: Option<String>,
}

fn parse_reaction(rest: &str) -> Result<RawReaction, SpecErrorKind> {
    let mut lx = Lexer::new(rest);
    let mut pattern = vec![lx.pattern_item()?];
    while lx.eat('&') {
        pattern.push(lx.pattern_item()?);
    }
    lx.expect_arrow()?;
    let mut body = Vec::new();
    let mut returns = None;
    if !lx.at_end() {
        loop {
            if lx.eat_word("return") {
                returns = Some(lx.ident()?);
                break;
            }
            body.push(lx.call(false)?);
            if !lx.eat(',') {
                break;
            }
        }
    }
    lx.end()?;
    Ok(RawReaction {
        pattern,
        body,
        returns,
    })
}

enum Arg {
    Name(String),
    Literal(Value),
}

struct RawCall {
    tag: String,
    args: Vec<Arg>,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn end(&mut self) -> Result<(), SpecErrorKind> {
        if self.at_end() {
            Ok(())
        } else {
            Err(SpecErrorKind::Syntax(format!(
                "unexpected `{}`",
                self.rest()
            )))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        let save = self.pos;
        match self.ident() {
            Ok(w) if w == word => true,
            _ => {
                self.pos = save;
                false
            }
        }
    }

    fn expect_arrow(&mut self) -> Result<(), SpecErrorKind> {
        self.skip_ws();
        if self.rest().starts_with("->") {
            self.pos += 2;
            Ok(())
        } else {
            Err(SpecErrorKind::Syntax("expected `->`".into()))
        }
    }

    fn ident(&mut self) -> Result<String, SpecErrorKind> {
        self.skip_ws();
        let len = self
            .rest()
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map_or(self.rest().len(), |(i, _)| i);
        let word = &self.rest()[..len];
        if !is_identifier(word) {
            let found = if self.rest().is_empty() {
                "end of line"
            } else {
                self.rest()
            };
            return Err(SpecErrorKind::Syntax(format!(
                "expected identifier, found `{found}`"
            )));
        }
        self.pos += len;
        Ok(word.to_owned())
    }

    /// `TAG(arg, ...)`; literal arguments only when `literals` is set. A bare
    /// `TAG` stands for `TAG()` when `bare_ok` is set.
    fn call_with(&mut self, literals: bool, bare_ok: bool) -> Result<RawCall, SpecErrorKind> {
        let tag = self.ident()?;
        let mut args = Vec::new();
        if !self.eat('(') {
            return if bare_ok {
                Ok(RawCall { tag, args })
            } else {
                Err(SpecErrorKind::Syntax(format!("expected `(` after `{tag}`")))
            };
        }
        if self.eat(')') {
            return Ok(RawCall { tag, args });
        }
        loop {
            self.skip_ws();
            let arg = if literals {
                let text = self.literal_text()?;
                Arg::Literal(
                    Value::parse_literal(text)
                        .ok_or_else(|| SpecErrorKind::Syntax(format!("bad literal `{text}`")))?,
                )
            } else {
                Arg::Name(self.ident()?)
            };
            args.push(arg);
            if self.eat(')') {
                return Ok(RawCall { tag, args });
            }
            if !self.eat(',') {
                return Err(SpecErrorKind::Syntax("expected `,` or `)`".into()));
            }
        }
    }

    fn call(&mut self, literals: bool) -> Result<RawCall, SpecErrorKind> {
        self.call_with(literals, false)
    }

    fn pattern_item(&mut self) -> Result<RawCall, SpecErrorKind> {
        self.call_with(false, true)
    }

    fn literal_text(&mut self) -> Result<&'a str, SpecErrorKind> {
        let rest = self.rest();
        let mut in_str = false;
        let mut escaped = false;
        let mut depth = 0usize;
        for (i, c) in rest.char_indices() {
            match c {
                _ if escaped => escaped = false,
                '\\' if in_str => escaped = true,
                '"' => in_str = !in_str,
                '(' if !in_str => depth += 1,
                ')' if !in_str && depth > 0 => depth -= 1,
                ',' | ')' if !in_str => {
                    self.pos += i;
                    return Ok(rest[..i].trim());
                }
                _ => {}
            }
        }
        Err(SpecErrorKind::Syntax("unterminated argument list".into()))
    }
}
