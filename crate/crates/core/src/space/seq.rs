use crate::error::{Error, Result};
use crate::logic::Signature;
use crate::metric::PointId;

/// Enumeration of pairs (relation, tuple of point ids), starting at index 1.
///
/// Relations take turns: index `i` belongs to relation `(i-1) mod L` and
/// carries that relation's tuple of rank `(i-1) div L`. Tuples of arity `a`
/// are ranked shell by shell: all tuples with largest coordinate `m` come
/// after those with largest coordinate below `m`, lexicographically inside a
/// shell. The tuples over points `0..n` thus occupy ranks `0..n^a`, so the
/// enumeration is stable when a prefix grows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqIndex {
    rels: Vec<(String, usize)>,
}

impl SeqIndex {
    pub fn new(sig: &Signature) -> Self {
        SeqIndex { rels: sig.rels().iter().map(|r| (r.name.clone(), r.arity)).collect() }
    }

    pub fn relation_count(&self) -> usize {
        self.rels.len()
    }

    /// The relation index and tuple at enumeration index `i >= 1`.
    pub fn entry(&self, i: u64) -> Result<(usize, Vec<PointId>)> {
        if i == 0 || self.rels.is_empty() {
            return Err(Error::usage("enumeration indices start at 1 and need a relation"));
        }
        let l = self.rels.len() as u64;
        let j = ((i - 1) % l) as usize;
        let rank = (i - 1) / l;
        Ok((j, unrank(rank, self.rels[j].1)))
    }

    pub fn name(&self, j: usize) -> &str {
        &self.rels[j].0
    }

    /// Enumeration index of `rel(tuple)`.
    pub fn index_of(&self, rel: &str, tuple: &[PointId]) -> Result<u64> {
        let j = self
            .rels
            .iter()
            .position(|r| r.0 == rel)
            .ok_or_else(|| Error::usage(format!("unknown relation `{rel}`")))?;
        if tuple.len() != self.rels[j].1 {
            return Err(Error::usage(format!("relation `{rel}` has arity {}", self.rels[j].1)));
        }
        Ok(rank(tuple) * self.rels.len() as u64 + j as u64 + 1)
    }
}

fn pow(b: u64, e: usize) -> u64 {
    b.checked_pow(e as u32).expect("tuple rank overflow")
}

/// Number of completions of a partial tuple with `free` remaining places
/// inside the shell of maximum `m`.
fn completions(m: u64, free: usize, hit: bool) -> u64 {
    if hit {
        pow(m + 1, free)
    } else {
        pow(m + 1, free) - pow(m, free)
    }
}

fn rank(t: &[PointId]) -> u64 {
    let a = t.len();
    if a == 0 {
        return 0;
    }
    let m = *t.iter().max().unwrap() as u64;
    let mut r = pow(m, a);
    let mut hit = false;
    for (pos, &c) in t.iter().enumerate() {
        let free = a - pos - 1;
        for v in 0..c as u64 {
            r += completions(m, free, hit || v == m);
        }
        hit |= c as u64 == m;
    }
    r
}

fn unrank(mut r: u64, a: usize) -> Vec<PointId> {
    if a == 0 {
        return Vec::new();
    }
    let mut m = 0u64;
    while pow(m + 1, a) <= r {
        m += 1;
    }
    r -= pow(m, a);
    let mut t = Vec::with_capacity(a);
    let mut hit = false;
    for pos in 0..a {
        let free = a - pos - 1;
        for v in 0..=m {
            let c = completions(m, free, hit || v == m);
            if r < c {
                t.push(v as PointId);
                hit |= v == m;
                break;
            }
            r -= c;
        }
    }
    t
}
