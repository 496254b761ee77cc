//! Feasibility of partially specified metrics.
//!
//! Upper information (exact values, upper bounds and the diameter bound 1) is
//! closed under shortest paths; the closure is the pointwise largest metric
//! compatible with the upper data, so the instance is feasible exactly when
//! the closure meets every lower bound. Strict upper bounds are carried
//! symbolically as `value - k*eta` for an infinitesimal `eta`, where `k`
//! counts strict edges along the path.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use super::{FinMetric, PointId};
use crate::error::{Error, Result};
use crate::rat::{format_rational, Rat01, Rational};

/// One side of an interval constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub value: Rat01,
    pub strict: bool,
}

impl Bound {
    pub fn closed(value: Rat01) -> Self {
        Bound { value, strict: false }
    }

    pub fn open(value: Rat01) -> Self {
        Bound { value, strict: true }
    }

    /// True if `self` is at least as restrictive as `other` for a lower bound.
    fn tighter_lower(&self, other: &Bound) -> bool {
        match self.value.cmp(&other.value) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.strict || !other.strict,
        }
    }

    fn tighter_upper(&self, other: &Bound) -> bool {
        match self.value.cmp(&other.value) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.strict || !other.strict,
        }
    }
}

fn key(a: PointId, b: PointId) -> (PointId, PointId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Exact values and one-sided bounds on some of the pairwise distances of a
/// declared point set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialConstraintSet {
    points: Vec<PointId>,
    exact: BTreeMap<(PointId, PointId), Rat01>,
    lower: BTreeMap<(PointId, PointId), Bound>,
    upper: BTreeMap<(PointId, PointId), Bound>,
}

impl PartialConstraintSet {
    pub fn new(points: Vec<PointId>) -> Result<Self> {
        let distinct: BTreeSet<_> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::usage("duplicate point in constraint set"));
        }
        Ok(PartialConstraintSet { points, ..Default::default() })
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn exact(&self) -> &BTreeMap<(PointId, PointId), Rat01> {
        &self.exact
    }

    pub fn lower(&self) -> &BTreeMap<(PointId, PointId), Bound> {
        &self.lower
    }

    pub fn upper(&self) -> &BTreeMap<(PointId, PointId), Bound> {
        &self.upper
    }

    fn check_pair(&self, a: PointId, b: PointId) -> Result<(PointId, PointId)> {
        if a == b {
            return Err(Error::usage(format!("constraint on d({a},{a})")));
        }
        for p in [a, b] {
            if !self.points.contains(&p) {
                return Err(Error::usage(format!("constraint references undeclared point {p}")));
            }
        }
        Ok(key(a, b))
    }

    /// Fixes `d(a,b)`. A second, different value for the same pair is a
    /// usage error.
    pub fn set_exact(&mut self, a: PointId, b: PointId, v: Rat01) -> Result<()> {
        let k = self.check_pair(a, b)?;
        match self.exact.get(&k) {
            Some(old) if *old != v => {
                Err(Error::usage(format!("contradictory exact values {old} and {v} for d({a},{b})")))
            }
            _ => {
                self.exact.insert(k, v);
                Ok(())
            }
        }
    }

    /// Adds a lower bound; several bounds on one pair keep the tightest.
    pub fn add_lower(&mut self, a: PointId, b: PointId, bound: Bound) -> Result<()> {
        let k = self.check_pair(a, b)?;
        match self.lower.get(&k) {
            Some(old) if old.tighter_lower(&bound) => {}
            _ => {
                self.lower.insert(k, bound);
            }
        }
        Ok(())
    }

    pub fn add_upper(&mut self, a: PointId, b: PointId, bound: Bound) -> Result<()> {
        let k = self.check_pair(a, b)?;
        match self.upper.get(&k) {
            Some(old) if old.tighter_upper(&bound) => {}
            _ => {
                self.upper.insert(k, bound);
            }
        }
        Ok(())
    }

    /// Checks a candidate distance matrix (indexed like `points`) against
    /// every constraint, exactly.
    pub fn satisfied_by(&self, m: &FinMetric) -> bool {
        let d = |a, b| m.try_d(a, b).ok();
        self.exact.iter().all(|(&(a, b), v)| d(a, b) == Some(v))
            && self.lower.iter().all(|(&(a, b), bd)| match d(a, b) {
                Some(x) => {
                    if bd.strict {
                        x > &bd.value
                    } else {
                        x >= &bd.value
                    }
                }
                None => false,
            })
            && self.upper.iter().all(|(&(a, b), bd)| match d(a, b) {
                Some(x) => {
                    if bd.strict {
                        x < &bd.value
                    } else {
                        x <= &bd.value
                    }
                }
                None => false,
            })
    }

    fn all_values(&self) -> Vec<Rational> {
        let mut vals: Vec<Rational> = self
            .exact
            .values()
            .chain(self.lower.values().map(|b| &b.value))
            .chain(self.upper.values().map(|b| &b.value))
            .map(|v| v.value().clone())
            .collect();
        vals.push(Rational::zero());
        vals.push(Rational::one());
        vals.sort();
        vals.dedup();
        vals
    }
}

/// Where a bound in a certificate came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundSource {
    Exact,
    Given,
    /// Distinct points must be at positive distance.
    Positivity,
    /// Distances are never negative (pseudometric mode).
    NonNegativity,
    /// Distances are at most 1.
    Diameter,
}

/// A refutation: the lower bound on `d(path[0], path.last())` exceeds the
/// sum of the upper bounds along `path`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub lower: Bound,
    pub lower_source: BoundSource,
    pub path: Vec<PointId>,
    pub uppers: Vec<(Bound, BoundSource)>,
}

impl Certificate {
    /// Re-derives the contradiction from the constraint set alone.
    pub fn verify(&self, c: &PartialConstraintSet, pseudometric: bool) -> bool {
        if self.path.len() < 2 || self.uppers.len() != self.path.len() - 1 {
            return false;
        }
        let (a, b) = (self.path[0], *self.path.last().unwrap());
        let lower_ok = match self.lower_source {
            BoundSource::Exact => c.exact.get(&key(a, b)).map(|v| Bound::closed(v.clone())) == Some(self.lower.clone()),
            BoundSource::Given => c.lower.get(&key(a, b)) == Some(&self.lower),
            BoundSource::Positivity => !pseudometric && a != b && self.lower == Bound::open(Rat01::zero()),
            BoundSource::NonNegativity => self.lower == Bound::closed(Rat01::zero()),
            BoundSource::Diameter => false,
        };
        if !lower_ok {
            return false;
        }
        let mut sum = Rational::zero();
        let mut strict = self.lower.strict;
        for (w, (bound, source)) in self.path.windows(2).zip(&self.uppers) {
            let k = key(w[0], w[1]);
            let ok = match source {
                BoundSource::Exact => c.exact.get(&k).map(|v| Bound::closed(v.clone())).as_ref() == Some(bound),
                BoundSource::Given => c.upper.get(&k) == Some(bound),
                BoundSource::Diameter => *bound == Bound::closed(Rat01::one()),
                _ => false,
            };
            if !ok || w[0] == w[1] {
                return false;
            }
            sum += bound.value.value();
            strict |= bound.strict;
        }
        let lo = self.lower.value.value();
        sum < *lo || (sum == *lo && strict)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.path[0], *self.path.last().unwrap());
        let op = if self.lower.strict { ">" } else { ">=" };
        write!(f, "d({a},{b}) {op} {} but", self.lower.value)?;
        let mut sum = Rational::zero();
        for (i, (w, (bound, _))) in self.path.windows(2).zip(&self.uppers).enumerate() {
            let op = if bound.strict { "<" } else { "<=" };
            let sep = if i == 0 { " " } else { " + " };
            write!(f, "{sep}d({},{}) {op} {}", w[0], w[1], bound.value)?;
            sum += bound.value.value();
        }
        write!(f, " sums to {}", format_rational(&sum))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    /// A metric on the declared points meeting every constraint. In
    /// pseudometric mode distinct points may be at distance 0.
    Feasible(FinMetric),
    Infeasible(Certificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides whether some metric of diameter at most 1 on the declared points
/// meets every constraint.
pub fn feasible(c: &PartialConstraintSet) -> Result<Feasibility> {
    solve(c, false)
}

/// As [`feasible`], but distinct points may coincide (distance 0).
pub fn feasible_pseudometric(c: &PartialConstraintSet) -> Result<Feasibility> {
    solve(c, true)
}

/// Symbolic length `value - strict * eta`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Len {
    value: Rational,
    strict: u32,
}

impl Len {
    fn lex_cmp(&self, other: &Len) -> Ordering {
        self.value.cmp(&other.value).then_with(|| other.strict.cmp(&self.strict))
    }
}

fn solve(c: &PartialConstraintSet, pseudometric: bool) -> Result<Feasibility> {
    let n = c.points.len();
    let idx = |p: PointId| c.points.iter().position(|&q| q == p).expect("declared");

    // Direct upper information per edge, with its provenance.
    let mut edge: Vec<Vec<(Bound, BoundSource)>> =
        vec![vec![(Bound::closed(Rat01::one()), BoundSource::Diameter); n]; n];
    for (&(a, b), v) in &c.upper {
        let (i, j) = (idx(a), idx(b));
        if v.tighter_upper(&edge[i][j].0) {
            edge[i][j] = (v.clone(), BoundSource::Given);
            edge[j][i] = edge[i][j].clone();
        }
    }
    for (&(a, b), v) in &c.exact {
        let (i, j) = (idx(a), idx(b));
        let bound = Bound::closed(v.clone());
        if bound.tighter_upper(&edge[i][j].0) {
            edge[i][j] = (bound, BoundSource::Exact);
            edge[j][i] = edge[i][j].clone();
        }
    }

    // Lower requirements per pair, in a fixed order of provenance.
    let mut lowers: Vec<(usize, usize, Bound, BoundSource)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let k = key(c.points[i], c.points[j]);
            if let Some(v) = c.exact.get(&k) {
                lowers.push((i, j, Bound::closed(v.clone()), BoundSource::Exact));
            }
            if let Some(b) = c.lower.get(&k) {
                lowers.push((i, j, b.clone(), BoundSource::Given));
            }
            if pseudometric {
                lowers.push((i, j, Bound::closed(Rat01::zero()), BoundSource::NonNegativity));
            } else {
                lowers.push((i, j, Bound::open(Rat01::zero()), BoundSource::Positivity));
            }
        }
    }

    // A zero-valued strict upper bound would be a negative symbolic edge;
    // such an edge refutes itself against non-negativity.
    for (i, j, low, src) in &lowers {
        let (up, up_src) = &edge[*i][*j];
        if up.value.is_zero() && (up.strict || low.strict) {
            return Ok(Feasibility::Infeasible(Certificate {
                lower: low.clone(),
                lower_source: src.clone(),
                path: vec![c.points[*i], c.points[*j]],
                uppers: vec![(up.clone(), up_src.clone())],
            }));
        }
    }

    let mut dist: Vec<Vec<Len>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Len { value: Rational::zero(), strict: 0 }
                    } else {
                        let b = &edge[i][j].0;
                        Len { value: b.value.value().clone(), strict: u32::from(b.strict) }
                    }
                })
                .collect()
        })
        .collect();
    let mut next: Vec<Vec<usize>> = (0..n).map(|_| (0..n).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i == j || i == k || j == k {
                    continue;
                }
                let via =
                    Len { value: &dist[i][k].value + &dist[k][j].value, strict: dist[i][k].strict + dist[k][j].strict };
                if via.lex_cmp(&dist[i][j]) == Ordering::Less {
                    dist[i][j] = via;
                    next[i][j] = next[i][k];
                }
            }
        }
    }

    for (i, j, low, src) in &lowers {
        let closed = &dist[*i][*j];
        let lo = low.value.value();
        let violated = closed.value < *lo || (closed.value == *lo && (low.strict || closed.strict > 0));
        if violated {
            let mut path = vec![*i];
            let mut at = *i;
            while at != *j {
                at = next[at][*j];
                path.push(at);
            }
            let uppers = path.windows(2).map(|w| edge[w[0]][w[1]].clone()).collect();
            return Ok(Feasibility::Infeasible(Certificate {
                lower: low.clone(),
                lower_source: src.clone(),
                path: path.into_iter().map(|p| c.points[p]).collect(),
                uppers,
            }));
        }
    }

    Ok(Feasibility::Feasible(witness(c, &edge, pseudometric)?))
}

/// Concrete witness: closure of the upper data with strict bounds tightened
/// by `eta`, shrinking `eta` until every constraint holds exactly.
fn witness(c: &PartialConstraintSet, edge: &[Vec<(Bound, BoundSource)>], pseudometric: bool) -> Result<FinMetric> {
    let n = c.points.len();
    let vals = c.all_values();
    let gap = vals.windows(2).map(|w| &w[1] - &w[0]).min().unwrap_or_else(Rational::one);
    let mut eta = gap / Rational::from_integer(4.into());
    for _ in 0..128 {
        let mut d: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Rational::zero()
                        } else {
                            let b = &edge[i][j].0;
                            let v = b.value.value().clone();
                            if b.strict {
                                v - &eta
                            } else {
                                v
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = &d[i][k] + &d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        let in_range = d.iter().flatten().all(|v| *v >= Rational::zero());
        if in_range {
            let rows = d.into_iter().map(|row| row.into_iter().map(Rat01::clamp).collect()).collect();
            let m = FinMetric::from_matrix_unchecked(c.points.clone(), rows)?;
            if m.validate(pseudometric).is_ok() && c.satisfied_by(&m) {
                return Ok(m);
            }
        }
        eta /= Rational::from_integer(2.into());
    }
    Err(Error::precondition("feasible instance but no witness found (internal error)"))
}
