//! Brute-force reference computations used to cross-check the symbolic
//! machinery. They enumerate explicitly and are only meant for small inputs.

use std::collections::BTreeSet;

use crate::automaton::Counter;
use crate::par::{self, Exec};
use crate::protocol::{Bound, GenCount, ProtocolError, ProtocolType, SemSet, Signature};
use crate::spec::ObjectSpec;

/// A concrete multiset of tags as per-signature-position counts.
pub type Multiset = Vec<u32>;

/// Enumerates the traces of `ty` of length at most `max_len` directly from
/// the string equations (stars unrolled, shuffles interleaved), then
/// projects each trace to its multiset.
pub fn trace_oracle(ty: &ProtocolType, sig: &Signature, max_len: usize) -> BTreeSet<Multiset> {
    traces(ty, sig, max_len)
        .into_iter()
        .map(|trace| {
            let mut counts = vec![0; sig.len()];
            for t in trace {
                counts[t] += 1;
            }
            counts
        })
        .collect()
}

/// Traces (strings of signature indices) of length at most `max_len`.
pub fn traces(ty: &ProtocolType, sig: &Signature, max_len: usize) -> BTreeSet<Vec<usize>> {
    let idx = |t: &crate::protocol::Tag| sig.index_of(t.as_str()).expect("tag in signature");
    match ty {
        ProtocolType::Zero => BTreeSet::new(),
        ProtocolType::One => BTreeSet::from([vec![]]),
        ProtocolType::Atom(t) if max_len >= 1 => BTreeSet::from([vec![idx(t)]]),
        ProtocolType::Atom(_) => BTreeSet::new(),
        ProtocolType::Star(t) => (0..=max_len).map(|n| vec![idx(t); n]).collect(),
        ProtocolType::Sum(l, r) => {
            let mut out = traces(l, sig, max_len);
            out.extend(traces(r, sig, max_len));
            out
        }
        ProtocolType::Shuffle(l, r) => {
            let mut out = BTreeSet::new();
            let rights = traces(r, sig, max_len);
            for u in traces(l, sig, max_len) {
                for v in rights.iter().filter(|v| u.len() + v.len() <= max_len) {
                    interleave(&u, v, &mut Vec::new(), &mut out);
                }
            }
            out
        }
    }
}

fn interleave(u: &[usize], v: &[usize], prefix: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
    match (u.split_first(), v.split_first()) {
        (None, None) => {
            out.insert(prefix.clone());
        }
        (a, b) => {
            if let Some((&x, rest)) = a {
                prefix.push(x);
                interleave(rest, v, prefix, out);
                prefix.pop();
            }
            if let Some((&y, rest)) = b {
                prefix.push(y);
                interleave(u, rest, prefix, out);
                prefix.pop();
            }
        }
    }
}

/// The concrete multisets denoted by `sem` with at most `max_total`
/// messages in total.
pub fn concretize(sem: &SemSet, max_total: u32) -> BTreeSet<Multiset> {
    let mut out = BTreeSet::new();
    for v in sem.vectors() {
        let mut partial: Vec<Multiset> = vec![vec![]];
        for &c in v.counts() {
            let choices: Vec<u32> = match c {
                GenCount::Fin(n) => vec![n],
                GenCount::Omega => (0..=max_total).collect(),
            };
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    choices.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .filter(|p| p.iter().sum::<u32>() <= max_total)
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Every counter tuple of the raw state space that is compatible with some
/// vector of the protocol's semantics.
pub fn legal_states_oracle(spec: &ObjectSpec) -> Result<BTreeSet<Vec<Counter>>, ProtocolError> {
    legal_states_oracle_with(spec, Exec::default())
}

pub fn legal_states_oracle_with(
    spec: &ObjectSpec,
    exec: Exec,
) -> Result<BTreeSet<Vec<Counter>>, ProtocolError> {
    let sig = spec.signature();
    let sem = spec.protocol.semantics(sig);
    if sem.is_empty() {
        return Ok(BTreeSet::new());
    }
    let ranges: Vec<Vec<Counter>> = sig
        .tags()
        .iter()
        .map(|t| {
            Ok(match spec.protocol.bound(t, sig)? {
                Bound::Bounded(n) => (0..=n).map(Counter::Exact).collect(),
                Bound::Unbounded => vec![Counter::Exact(0), Counter::AtLeastOne],
            })
        })
        .collect::<Result<_, ProtocolError>>()?;
    let total: usize = ranges.iter().map(Vec::len).product();
    let tuples = par::map_range(exec, total, |mut k| {
        let mut tuple = Vec::with_capacity(ranges.len());
        for r in ranges.iter().rev() {
            tuple.push(r[k % r.len()]);
            k /= r.len();
        }
        tuple.reverse();
        let legal = sem.vectors().iter().any(|v| {
            tuple.iter().zip(v.counts()).all(|(c, g)| match (c, g) {
                (Counter::AtLeastOne, g) => *g == GenCount::Omega,
                (Counter::Exact(n), GenCount::Fin(m)) => n <= m,
                (Counter::Exact(_), GenCount::Omega) => true,
            })
        });
        legal.then_some(tuple)
    });
    Ok(tuples.into_iter().flatten().collect())
}
