//! The space of structures on a fixed countable carrier: the metric
//! `δ_seq`, basic cones given by interval constraints, their diameters and
//! membership.

mod seq;
pub mod text;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

pub use seq::SeqIndex;

use crate::error::{Error, Result};
use crate::logic::{FinStructure, Signature};
use crate::metric::{FinMetric, PointId};
use crate::rat::{pow2_neg, Rat01, Rational};

/// A bound interval `R(s) ∈ [lo, hi]` with each end open or closed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeConstraint {
    pub rel: String,
    pub tuple: Vec<PointId>,
    pub lo: Rat01,
    pub hi: Rat01,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl ConeConstraint {
    pub fn new(rel: &str, tuple: Vec<PointId>, lo: Rat01, hi: Rat01, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo >= hi {
            return Err(Error::usage(format!("empty interval: {lo} is not below {hi}")));
        }
        Ok(ConeConstraint { rel: rel.to_owned(), tuple, lo, hi, lo_closed, hi_closed })
    }

    pub fn contains(&self, v: &Rat01) -> bool {
        let above = if self.lo_closed { v >= &self.lo } else { v > &self.lo };
        let below = if self.hi_closed { v <= &self.hi } else { v < &self.hi };
        above && below
    }

    pub fn width(&self) -> Rational {
        self.hi.value() - self.lo.value()
    }
}

/// A nonempty subinterval of `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat01,
    pub hi: Rat01,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn full() -> Self {
        Interval { lo: Rat01::zero(), hi: Rat01::one(), lo_closed: true, hi_closed: true }
    }

    fn meet(&self, c: &ConeConstraint) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&c.lo) {
            std::cmp::Ordering::Less => (c.lo.clone(), c.lo_closed),
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Equal => (c.lo.clone(), c.lo_closed && self.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&c.hi) {
            std::cmp::Ordering::Greater => (c.hi.clone(), c.hi_closed),
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Equal => (c.hi.clone(), c.hi_closed && self.hi_closed),
        };
        let nonempty = lo < hi || (lo == hi && lo_closed && hi_closed);
        nonempty.then_some(Interval { lo, hi, lo_closed, hi_closed })
    }

    /// Whether every value of `self` lies in `c`.
    fn within(&self, c: &ConeConstraint) -> bool {
        let lo_ok = self.lo > c.lo || (self.lo == c.lo && (c.lo_closed || !self.lo_closed));
        let hi_ok = self.hi < c.hi || (self.hi == c.hi && (c.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }
}

/// A basic open-or-closed set of structures: finitely many interval
/// constraints on relation values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureCone {
    constraints: Vec<ConeConstraint>,
}

impl StructureCone {
    pub fn new(constraints: Vec<ConeConstraint>) -> Self {
        StructureCone { constraints }
    }

    pub fn constraints(&self) -> &[ConeConstraint] {
        &self.constraints
    }

    pub fn is_unconstrained(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Per enumeration index, the intersection of the constraints on it, or
    /// `None` if some intersection is empty and so is the cone.
    pub(crate) fn by_index(&self, seq: &SeqIndex) -> Result<Option<BTreeMap<u64, Interval>>> {
        let mut out: BTreeMap<u64, Interval> = BTreeMap::new();
        for c in &self.constraints {
            let i = seq.index_of(&c.rel, &c.tuple)?;
            let cur = out.remove(&i).unwrap_or_else(Interval::full);
            match cur.meet(c) {
                Some(iv) => out.insert(i, iv),
                None => return Ok(None),
            };
        }
        Ok(Some(out))
    }

    /// Widens every constraint by `tau` on each side (clipped to `[0,1]`).
    pub fn widen(&self, tau: &Rat01) -> StructureCone {
        StructureCone::new(
            self.constraints
                .iter()
                .map(|c| ConeConstraint {
                    rel: c.rel.clone(),
                    tuple: c.tuple.clone(),
                    lo: c.lo.tsub(tau),
                    hi: c.hi.tadd(tau),
                    lo_closed: c.lo_closed,
                    hi_closed: c.hi_closed,
                })
                .collect(),
        )
    }
}

/// Lower and upper bounds on `δ_seq(M, N) = Σ_i 2^-i |R_i^M - R_i^N|` from
/// the first `m` enumerated terms.
pub fn delta_seq(a: &FinStructure, b: &FinStructure, m: u64) -> Result<(Rat01, Rat01)> {
    if a.signature() != b.signature() || a.carrier() != b.carrier() {
        return Err(Error::usage("structures differ in carrier or signature"));
    }
    if m == 0 {
        return Err(Error::usage("truncation depth must be at least 1"));
    }
    let seq = SeqIndex::new(a.signature());
    let mut lo = Rational::zero();
    if seq.relation_count() > 0 {
        for i in 1..=m {
            let (j, t) = seq.entry(i)?;
            let rel = seq.name(j);
            let (va, vb) = match (a.value(rel, &t), b.value(rel, &t)) {
                (Some(x), Some(y)) => (x, y),
                _ => {
                    return Err(Error::precondition(format!(
                        "enumeration index {i} refers to {rel}{t:?}, outside the carrier"
                    )))
                }
            };
            lo += pow2_neg(i as u32) * va.absdiff(vb).value();
        }
    }
    let hi = &lo + pow2_neg(m as u32);
    Ok((Rat01::from_rational(lo)?, Rat01::clamp(hi)))
}

/// Exact diameter for `δ_seq`: `Σ_{i∉I} 2^-i + Σ_{i∈I} 2^-i w_i`, where
/// `w_i` is the width of the constraint on index `i`. An empty cone has
/// diameter 0.
pub fn cone_diam(c: &StructureCone, sig: &Signature) -> Result<Rat01> {
    let seq = SeqIndex::new(sig);
    let Some(ivs) = c.by_index(&seq)? else {
        return Ok(Rat01::zero());
    };
    if seq.relation_count() == 0 {
        return Ok(Rat01::zero());
    }
    let mut d = Rational::one();
    for (i, iv) in ivs {
        let i = u32::try_from(i).map_err(|_| Error::usage("enumeration index too large"))?;
        d -= pow2_neg(i) * (Rational::one() - (iv.hi.value() - iv.lo.value()));
    }
    Rat01::from_rational(d)
}

/// Whether the tables of `m` satisfy every constraint.
pub fn cone_member(m: &FinStructure, c: &StructureCone) -> Result<bool> {
    for con in &c.constraints {
        if m.signature().get(&con.rel).is_none() {
            return Err(Error::usage(format!("unknown relation `{}`", con.rel)));
        }
        let v = m.value(&con.rel, &con.tuple).ok_or_else(|| {
            Error::precondition(format!("tuple {:?} of `{}` is outside the carrier", con.tuple, con.rel))
        })?;
        if !con.contains(v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One side of a value range: the bound and whether it is attained.
#[derive(Clone, Debug)]
struct End {
    v: Rational,
    strict: bool,
}

/// Value ranges of relation entries inside a cone, taking into account
/// that members are tables respecting the declared moduli on `carrier`.
///
/// The constraints form a system of difference inequalities
/// `R(t) - R(s) <= n d(t, s)` with interval bounds. Since `d` is a metric,
/// composing two such inequalities never beats the direct one, so the range
/// of `R(t)` is obtained from the constrained entries in one step.
pub struct ConeRanges<'a> {
    sig: &'a Signature,
    carrier: &'a FinMetric,
    entries: Vec<(String, Vec<PointId>, Interval)>,
}

impl<'a> ConeRanges<'a> {
    /// `None` when two constraints on the same entry are disjoint.
    pub fn new(c: &StructureCone, sig: &'a Signature, carrier: &'a FinMetric) -> Result<Option<Self>> {
        let mut entries: Vec<(String, Vec<PointId>, Interval)> = Vec::new();
        for con in &c.constraints {
            let sym = sig.get(&con.rel).ok_or_else(|| Error::usage(format!("unknown relation `{}`", con.rel)))?;
            if con.tuple.len() != sym.arity {
                return Err(Error::usage(format!("relation `{}` has arity {}", sym.name, sym.arity)));
            }
            if let Some(p) = con.tuple.iter().find(|p| !carrier.contains(**p)) {
                return Err(Error::precondition(format!("point {p} is outside the carrier")));
            }
            match entries.iter_mut().find(|e| e.0 == con.rel && e.1 == con.tuple) {
                Some(e) => match e.2.meet(con) {
                    Some(iv) => e.2 = iv,
                    None => return Ok(None),
                },
                None => entries.push((con.rel.clone(), con.tuple.clone(), Interval::full().meet(con).unwrap())),
            }
        }
        Ok(Some(ConeRanges { sig, carrier, entries }))
    }

    /// Range of `rel(tuple)` over the members of the cone, `None` if the
    /// cone has no member.
    pub fn range(&self, rel: &str, tuple: &[PointId]) -> Option<Interval> {
        let n = &self.sig.get(rel).expect("checked relation").modulus;
        let mut lo = End { v: Rational::zero(), strict: false };
        let mut hi = End { v: Rational::one(), strict: false };
        for (r, s, iv) in &self.entries {
            if r != rel {
                continue;
            }
            let slack = n * self.carrier.tuple_d(tuple, s).value();
            let l = End { v: iv.lo.value() - &slack, strict: !iv.lo_closed };
            let h = End { v: iv.hi.value() + &slack, strict: !iv.hi_closed };
            if l.v > lo.v || (l.v == lo.v && l.strict) {
                lo = l;
            }
            if h.v < hi.v || (h.v == hi.v && h.strict) {
                hi = h;
            }
        }
        let nonempty = lo.v < hi.v || (lo.v == hi.v && !lo.strict && !hi.strict);
        nonempty.then(|| Interval {
            lo: Rat01::from_rational(lo.v).expect("within [0,1]"),
            hi: Rat01::from_rational(hi.v).expect("within [0,1]"),
            lo_closed: !lo.strict,
            hi_closed: !hi.strict,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().any(|(r, t, _)| self.range(r, t).is_none())
    }
}

/// Whether no table family respecting the moduli on `carrier` lies in `c`.
pub fn cone_is_empty(c: &StructureCone, sig: &Signature, carrier: &FinMetric) -> Result<bool> {
    Ok(match ConeRanges::new(c, sig, carrier)? {
        None => true,
        Some(r) => r.is_empty(),
    })
}

/// Set inclusion between cones of structures on `carrier`: every
/// constraint of `c2` must follow from those of `c1`, the metric on the
/// carrier and the moduli.
pub fn structure_cone_subset(
    c1: &StructureCone,
    c2: &StructureCone,
    sig: &Signature,
    carrier: &FinMetric,
) -> Result<bool> {
    let Some(ranges) = ConeRanges::new(c1, sig, carrier)? else {
        return Ok(true);
    };
    ConeRanges::new(c2, sig, carrier)?;
    if ranges.is_empty() {
        return Ok(true);
    }
    Ok(c2.constraints.iter().all(|con| {
        let iv = ranges.range(&con.rel, &con.tuple).expect("nonempty cone");
        iv.within(con)
    }))
}
