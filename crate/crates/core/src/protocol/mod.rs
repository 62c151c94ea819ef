//! Protocol types: `0 | 1 | M | *M | E + F | E · F`, where `·` is the
//! shuffle of two protocols and `*` iterates a single tag.
//!
//! Protocols are interpreted up to permutation of their traces. The
//! [`SemSet`] of a type is a canonical finite description of the multisets
//! of tags it admits, so type equivalence reduces to set equality.

mod parse;
mod sem;

use std::collections::BTreeSet;
use std::fmt;

pub use parse::parse_protocol;
pub use sem::{GenCount, GenVector, SemSet};

use thiserror::Error;

/// A message tag. Tags are totally ordered by name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(String);

impl Tag {
    pub fn new(name: impl Into<String>) -> Result<Tag, ProtocolError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(ProtocolError::InvalidTag(name));
        }
        Ok(Tag(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The ordered set of tags an object understands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    tags: Vec<Tag>,
}

impl Signature {
    /// Builds a signature, sorting the tags. Duplicates are rejected.
    pub fn new(tags: impl IntoIterator<Item = Tag>) -> Result<Signature, ProtocolError> {
        let mut tags: Vec<Tag> = tags.into_iter().collect();
        tags.sort();
        for pair in tags.windows(2) {
            if pair[0] == pair[1] {
                return Err(ProtocolError::DuplicateTag(pair[0].to_string()));
            }
        }
        Ok(Signature { tags })
    }

    /// Convenience constructor for tests and literals.
    pub fn from_names(names: &[&str]) -> Result<Signature, ProtocolError> {
        Signature::new(
            names
                .iter()
                .map(|n| Tag::new(*n))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.tags.binary_search_by(|t| t.as_str().cmp(name)).ok()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown tag `{name}` at {pos}")]
    UnknownTag { name: String, pos: usize },
    #[error("`*` applies to a single tag only (at {pos})")]
    StarOnExpression { pos: usize },
    #[error("invalid tag name `{0}`")]
    InvalidTag(String),
    #[error("duplicate tag `{0}`")]
    DuplicateTag(String),
    #[error("protocol is not well-formed: {0} occurs both starred and unstarred")]
    NotWellFormed(String),
    #[error("bound of `{0}` is undefined in an empty protocol")]
    EmptyProtocol(String),
    #[error("tag `{0}` is not in the signature")]
    NotInSignature(String),
}

/// Abstract syntax of protocol types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolType {
    Zero,
    One,
    Atom(Tag),
    Star(Tag),
    Sum(Box<ProtocolType>, Box<ProtocolType>),
    Shuffle(Box<ProtocolType>, Box<ProtocolType>),
}

/// Occurrence bound of a tag in a protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Unbounded,
    Bounded(u32),
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Unbounded => f.write_str("unbounded"),
            Bound::Bounded(n) => write!(f, "{n}-bounded"),
        }
    }
}

impl ProtocolType {
    pub fn atom(name: &str) -> ProtocolType {
        ProtocolType::Atom(Tag(name.to_owned()))
    }

    pub fn star(name: &str) -> ProtocolType {
        ProtocolType::Star(Tag(name.to_owned()))
    }

    pub fn sum(left: ProtocolType, right: ProtocolType) -> ProtocolType {
        ProtocolType::Sum(Box::new(left), Box::new(right))
    }

    pub fn shuffle(left: ProtocolType, right: ProtocolType) -> ProtocolType {
        ProtocolType::Shuffle(Box::new(left), Box::new(right))
    }

    /// Tags occurring under a star.
    pub fn starred(&self) -> BTreeSet<&Tag> {
        let mut out = BTreeSet::new();
        self.visit_tags(&mut |tag, starred| {
            if starred {
                out.insert(tag);
            }
        });
        out
    }

    /// Tags occurring without a star.
    pub fn unstarred(&self) -> BTreeSet<&Tag> {
        let mut out = BTreeSet::new();
        self.visit_tags(&mut |tag, starred| {
            if !starred {
                out.insert(tag);
            }
        });
        out
    }

    /// Every tag mentioned anywhere in the term.
    pub fn tags(&self) -> BTreeSet<&Tag> {
        let mut out = BTreeSet::new();
        self.visit_tags(&mut |tag, _| {
            out.insert(tag);
        });
        out
    }

    fn visit_tags<'a>(&'a self, f: &mut impl FnMut(&'a Tag, bool)) {
        match self {
            ProtocolType::Zero | ProtocolType::One => {}
            ProtocolType::Atom(t) => f(t, false),
            ProtocolType::Star(t) => f(t, true),
            ProtocolType::Sum(l, r) | ProtocolType::Shuffle(l, r) => {
                l.visit_tags(f);
                r.visit_tags(f);
            }
        }
    }

    /// No tag occurs both starred and unstarred.
    pub fn well_formed(&self) -> bool {
        self.starred().is_disjoint(&self.unstarred())
    }

    pub(crate) fn check_well_formed(&self) -> Result<(), ProtocolError> {
        let starred = self.starred();
        match self.unstarred().intersection(&starred).next() {
            Some(tag) => Err(ProtocolError::NotWellFormed(tag.to_string())),
            None => Ok(()),
        }
    }

    /// The multiset denotation of a well-formed type over `sig`.
    ///
    /// Tags outside the signature are ignored; callers validate membership
    /// when parsing.
    pub fn semantics(&self, sig: &Signature) -> SemSet {
        let dim = sig.len();
        match self {
            ProtocolType::Zero => SemSet::empty(),
            ProtocolType::One => SemSet::singleton(GenVector::zero(dim)),
            ProtocolType::Atom(t) => match sig.index_of(t.as_str()) {
                Some(i) => SemSet::singleton(GenVector::unit(dim, i, GenCount::Fin(1))),
                None => SemSet::empty(),
            },
            ProtocolType::Star(t) => match sig.index_of(t.as_str()) {
                Some(i) => SemSet::singleton(GenVector::unit(dim, i, GenCount::Omega)),
                None => SemSet::singleton(GenVector::zero(dim)),
            },
            ProtocolType::Sum(l, r) => l.semantics(sig).union(&r.semantics(sig)),
            ProtocolType::Shuffle(l, r) => l.semantics(sig).shuffle(&r.semantics(sig)),
        }
    }

    pub fn is_empty(&self, sig: &Signature) -> bool {
        self.semantics(sig).is_empty()
    }

    pub fn equiv(&self, other: &ProtocolType, sig: &Signature) -> bool {
        self.semantics(sig) == other.semantics(sig)
    }

    /// The syntactic derivative: the traces of `self` with one occurrence of
    /// `tag` removed, from those traces that contain at least one.
    pub fn derivative(&self, tag: &Tag) -> ProtocolType {
        use ProtocolType::*;
        match self {
            Zero | One => Zero,
            Atom(t) if t == tag => One,
            Atom(_) => Zero,
            Star(t) if t == tag => self.clone(),
            Star(_) => Zero,
            Sum(l, r) => ProtocolType::sum(l.derivative(tag), r.derivative(tag)),
            Shuffle(l, r) => ProtocolType::sum(
                ProtocolType::shuffle(l.derivative(tag), (**r).clone()),
                ProtocolType::shuffle((**l).clone(), r.derivative(tag)),
            ),
        }
    }

    /// Occurrence bound of `tag`. Unboundedness is syntactic: the tag occurs
    /// starred. Otherwise the bound is the maximum count over the semantics,
    /// which is undefined for empty types.
    pub fn bound(&self, tag: &Tag, sig: &Signature) -> Result<Bound, ProtocolError> {
        let sem = self.semantics(sig);
        if sem.is_empty() {
            return Err(ProtocolError::EmptyProtocol(tag.to_string()));
        }
        if self.starred().contains(tag) {
            return Ok(Bound::Unbounded);
        }
        let idx = sig
            .index_of(tag.as_str())
            .ok_or_else(|| ProtocolError::NotInSignature(tag.to_string()))?;
        let max = sem
            .vectors()
            .iter()
            .map(|v| match v.get(idx) {
                GenCount::Fin(n) => n,
                // t never starred, so every count of t is finite
                GenCount::Omega => unreachable!("omega count for unstarred tag {tag}"),
            })
            .max()
            .unwrap_or(0);
        Ok(Bound::Bounded(max))
    }

    /// ASCII rendering using `.` for shuffle, as accepted by the parser.
    pub fn to_ascii(&self) -> String {
        let mut out = String::new();
        self.render(&mut out, 0, " . ");
        out
    }

    fn render(&self, out: &mut String, prec: u8, dot: &str) {
        match self {
            ProtocolType::Zero => out.push('0'),
            ProtocolType::One => out.push('1'),
            ProtocolType::Atom(t) => out.push_str(t.as_str()),
            ProtocolType::Star(t) => {
                out.push('*');
                out.push_str(t.as_str());
            }
            ProtocolType::Sum(l, r) => {
                if prec > 0 {
                    out.push('(');
                }
                l.render(out, 0, dot);
                out.push_str(" + ");
                r.render(out, 1, dot);
                if prec > 0 {
                    out.push(')');
                }
            }
            ProtocolType::Shuffle(l, r) => {
                if prec > 1 {
                    out.push('(');
                }
                l.render(out, 1, dot);
                out.push_str(dot);
                r.render(out, 2, dot);
                if prec > 1 {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for ProtocolType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.render(&mut out, 0, "·");
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn future_sig() -> Signature {
        Signature::from_names(&["EMPTY", "FULL", "get", "put"]).unwrap()
    }

    fn future() -> ProtocolType {
        parse_protocol("*get·(EMPTY·put + FULL)", &future_sig()).unwrap()
    }

    fn p(text: &str) -> ProtocolType {
        parse_protocol(text, &future_sig()).unwrap()
    }

    fn tag(name: &str) -> Tag {
        Tag::new(name).unwrap()
    }

    #[test]
    fn signature_is_sorted_and_rejects_duplicates() {
        let sig = Signature::from_names(&["put", "EMPTY", "get", "FULL"]).unwrap();
        let names: Vec<_> = sig.tags().iter().map(Tag::as_str).collect();
        assert_eq!(names, ["EMPTY", "FULL", "get", "put"]);
        assert!(Signature::from_names(&["a", "a"]).is_err());
        assert!(Tag::new("1a").is_err());
        assert!(Tag::new("").is_err());
    }

    #[test]
    fn well_formedness() {
        let sig = Signature::from_names(&["a"]).unwrap();
        assert!(future().well_formed());
        assert!(!parse_protocol("*a · a", &sig).unwrap().well_formed());
        assert!(!parse_protocol("*a + a", &sig).unwrap().well_formed());
        assert!(parse_protocol("*a + *a", &sig).unwrap().well_formed());
    }

    #[test]
    fn future_derivatives() {
        let sig = future_sig();
        let e = future();
        let after_empty = e.derivative(&tag("EMPTY"));
        assert!(after_empty.equiv(&p("*get·put"), &sig));
        let after_put = after_empty.derivative(&tag("put"));
        assert!(after_put.equiv(&p("*get"), &sig));
        assert!(after_empty
            .derivative(&tag("FULL"))
            .equiv(&ProtocolType::Zero, &sig));
        assert!(after_empty.derivative(&tag("FULL")).is_empty(&sig));
    }

    #[test]
    fn derivative_clauses() {
        let a = tag("get");
        use ProtocolType::*;
        assert_eq!(Zero.derivative(&a), Zero);
        assert_eq!(One.derivative(&a), Zero);
        assert_eq!(Atom(a.clone()).derivative(&a), One);
        assert_eq!(Atom(tag("put")).derivative(&a), Zero);
        assert_eq!(Star(a.clone()).derivative(&a), Star(a.clone()));
        assert_eq!(Star(tag("put")).derivative(&a), Zero);
    }

    #[test]
    fn bounds_of_future() {
        let sig = future_sig();
        let e = future();
        for name in ["EMPTY", "FULL", "put"] {
            assert_eq!(
                e.bound(&tag(name), &sig).unwrap(),
                Bound::Bounded(1),
                "{name}"
            );
        }
        assert_eq!(e.bound(&tag("get"), &sig).unwrap(), Bound::Unbounded);
    }

    #[test]
    fn bound_counts_repeated_atoms() {
        let sig = Signature::from_names(&["a"]).unwrap();
        let e = parse_protocol("a·a + a", &sig).unwrap();
        assert_eq!(e.bound(&tag("a"), &sig).unwrap(), Bound::Bounded(2));
    }

    #[test]
    fn bound_rejects_empty_types() {
        let sig = Signature::from_names(&["a"]).unwrap();
        let e = parse_protocol("0·*a", &sig).unwrap();
        assert!(e.is_empty(&sig));
        assert!(matches!(
            e.bound(&tag("a"), &sig),
            Err(ProtocolError::EmptyProtocol(_))
        ));
    }

    #[test]
    fn equivalences() {
        let sig = Signature::from_names(&["a", "b"]).unwrap();
        let q = |s| parse_protocol(s, &sig).unwrap();
        assert!(q("a·b").equiv(&q("b·a"), &sig));
        assert!(!q("1").equiv(&q("0"), &sig));
        assert!(q("*a + 1").equiv(&q("*a"), &sig));
        assert!(q("a·b + b·a").equiv(&q("a·b"), &sig));
        assert!(q("0·*a").is_empty(&sig));
        assert!(ProtocolType::Zero.is_empty(&sig));
        assert!(!future().is_empty(&future_sig()));
    }

    #[test]
    fn display_and_ascii_reparse() {
        let sig = future_sig();
        let e = future();
        assert_eq!(e.to_string(), "*get·(EMPTY·put + FULL)");
        assert_eq!(e.to_ascii(), "*get . (EMPTY . put + FULL)");
        assert_eq!(parse_protocol(&e.to_ascii(), &sig).unwrap(), e);
        let nested = p("(EMPTY + FULL) + put");
        assert_eq!(parse_protocol(&nested.to_string(), &sig).unwrap(), nested);
        let right = p("EMPTY + (FULL + put)");
        assert_eq!(parse_protocol(&right.to_string(), &sig).unwrap(), right);
    }
}
