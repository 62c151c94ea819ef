use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A per-tag count: an exact number, or `Omega` for "any number".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenCount {
    Fin(u32),
    Omega,
}

impl GenCount {
    pub fn plus(self, other: GenCount) -> GenCount {
        match (self, other) {
            (GenCount::Fin(m), GenCount::Fin(n)) => GenCount::Fin(m + n),
            _ => GenCount::Omega,
        }
    }

    /// Removes one occurrence, if there is one.
    pub fn decrement(self) -> Option<GenCount> {
        match self {
            GenCount::Fin(0) => None,
            GenCount::Fin(n) => Some(GenCount::Fin(n - 1)),
            GenCount::Omega => Some(GenCount::Omega),
        }
    }

    /// `self` denotes a subset of `other`.
    pub fn subsumed_by(self, other: GenCount) -> bool {
        self == other || other == GenCount::Omega
    }
}

impl fmt::Display for GenCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenCount::Fin(n) => write!(f, "{n}"),
            GenCount::Omega => f.write_str("ω"),
        }
    }
}

impl Serialize for GenCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GenCount::Fin(n) => s.serialize_u32(*n),
            GenCount::Omega => s.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for GenCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(GenCount::Fin(n)),
            Raw::S(s) if s == "omega" => Ok(GenCount::Omega),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad count `{s}`"))),
        }
    }
}

/// A generalized count vector, indexed by signature position. Denotes every
/// multiset obtained by replacing each `Omega` with a natural number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenVector(Vec<GenCount>);

impl GenVector {
    pub fn new(counts: Vec<GenCount>) -> GenVector {
        GenVector(counts)
    }

    pub fn zero(dim: usize) -> GenVector {
        GenVector(vec![GenCount::Fin(0); dim])
    }

    pub fn unit(dim: usize, idx: usize, count: GenCount) -> GenVector {
        let mut v = GenVector::zero(dim);
        v.0[idx] = count;
        v
    }

    pub fn get(&self, idx: usize) -> GenCount {
        self.0[idx]
    }

    pub fn counts(&self) -> &[GenCount] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &GenVector) -> GenVector {
        GenVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.plus(*b))
                .collect(),
        )
    }

    pub fn decrement(&self, idx: usize) -> Option<GenVector> {
        let mut out = self.clone();
        out.0[idx] = self.0[idx].decrement()?;
        Some(out)
    }

    pub fn subsumed_by(&self, other: &GenVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.subsumed_by(*b))
    }

    /// Whether the concrete multiset `counts` belongs to this vector's
    /// denotation.
    pub fn contains(&self, counts: &[u32]) -> bool {
        self.0.iter().zip(counts).all(|(g, &c)| match g {
            GenCount::Fin(n) => *n == c,
            GenCount::Omega => true,
        })
    }
}

impl fmt::Display for GenVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A canonical antichain of generalized vectors: sorted, and no vector is
/// subsumed by another. Equality of two `SemSet`s over the same signature
/// coincides with equality of the multiset languages they denote.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SemSet {
    vectors: Vec<GenVector>,
}

impl SemSet {
    pub fn empty() -> SemSet {
        SemSet {
            vectors: Vec::new(),
        }
    }

    pub fn singleton(v: GenVector) -> SemSet {
        SemSet { vectors: vec![v] }
    }

    pub fn from_vectors(vectors: impl IntoIterator<Item = GenVector>) -> SemSet {
        let mut vectors: Vec<GenVector> = vectors.into_iter().collect();
        vectors.sort();
        vectors.dedup();
        let keep: Vec<bool> = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                !vectors
                    .iter()
                    .enumerate()
                    .any(|(j, w)| i != j && v.subsumed_by(w))
            })
            .collect();
        let vectors = vectors
            .into_iter()
            .zip(keep)
            .filter_map(|(v, k)| k.then_some(v))
            .collect();
        SemSet { vectors }
    }

    pub fn vectors(&self) -> &[GenVector] {
        &self.vectors
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn union(&self, other: &SemSet) -> SemSet {
        SemSet::from_vectors(self.vectors.iter().chain(&other.vectors).cloned())
    }

    pub fn shuffle(&self, other: &SemSet) -> SemSet {
        SemSet::from_vectors(
            self.vectors
                .iter()
                .flat_map(|v| other.vectors.iter().map(move |w| v.add(w))),
        )
    }

    /// Removes one occurrence of the tag at `idx` from every vector that has
    /// one; vectors without an occurrence disappear.
    pub fn derivative(&self, idx: usize) -> SemSet {
        SemSet::from_vectors(self.vectors.iter().filter_map(|v| v.decrement(idx)))
    }

    /// Whether the concrete multiset `counts` is denoted by this set.
    pub fn contains(&self, counts: &[u32]) -> bool {
        self.vectors.iter().any(|v| v.contains(counts))
    }

    /// No vector subsumes another.
    pub fn is_antichain(&self) -> bool {
        self.vectors.iter().enumerate().all(|(i, v)| {
            self.vectors
                .iter()
                .enumerate()
                .all(|(j, w)| i == j || !v.subsumed_by(w))
        })
    }
}

impl fmt::Display for SemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vectors.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}
