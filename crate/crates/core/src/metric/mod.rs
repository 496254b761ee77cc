//! Finite rational metric spaces of diameter at most 1.
//!
//! Besides the plain [`FinMetric`] container this module hosts the
//! feasibility solver for partially specified metrics, the canonical
//! construction of finite prefixes of the rational Urysohn space and the
//! extension of partial isometries inside such prefixes.

mod feasible;
mod isometry;
mod prefix;
pub mod text;

use std::collections::{BTreeMap, HashMap};

pub use feasible::{
    feasible, feasible_pseudometric, Bound, BoundSource, Certificate, Feasibility, PartialConstraintSet,
};
pub use isometry::{extend_partial_isometry, PartialIsometry};
pub use prefix::{qu_extend, rationals_up_to, QUPrefix, ScheduleCursor};

use crate::error::{Error, Result};
use crate::rat::Rat01;

/// Identifier of a point. Prefix points are numbered densely in creation order.
pub type PointId = usize;

/// A finite metric space with exact rational distances bounded by 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinMetric {
    ids: Vec<PointId>,
    pos: HashMap<PointId, usize>,
    dist: Vec<Vec<Rat01>>,
}

impl Default for FinMetric {
    fn default() -> Self {
        Self::new()
    }
}

impl FinMetric {
    pub fn new() -> Self {
        FinMetric { ids: Vec::new(), pos: HashMap::new(), dist: Vec::new() }
    }

    /// Builds and validates a metric from a full distance matrix indexed by
    /// position in `ids`.
    pub fn from_matrix(ids: Vec<PointId>, dist: Vec<Vec<Rat01>>) -> Result<Self> {
        let m = Self::from_matrix_unchecked(ids, dist)?;
        m.validate(false)?;
        Ok(m)
    }

    /// Like [`FinMetric::from_matrix`] but only checks the shape; used for
    /// pseudometric witnesses where distinct ids may sit at distance 0.
    pub(crate) fn from_matrix_unchecked(ids: Vec<PointId>, dist: Vec<Vec<Rat01>>) -> Result<Self> {
        if dist.len() != ids.len() || dist.iter().any(|row| row.len() != ids.len()) {
            return Err(Error::usage("distance matrix shape does not match point list"));
        }
        let mut pos = HashMap::with_capacity(ids.len());
        for (i, &id) in ids.iter().enumerate() {
            if pos.insert(id, i).is_some() {
                return Err(Error::usage(format!("duplicate point id {id}")));
            }
        }
        Ok(FinMetric { ids, pos, dist })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.pos.contains_key(&id)
    }

    pub fn position(&self, id: PointId) -> Option<usize> {
        self.pos.get(&id).copied()
    }

    /// Distance between two points by id. Panics on unknown ids.
    pub fn d(&self, a: PointId, b: PointId) -> &Rat01 {
        let (i, j) = (self.pos[&a], self.pos[&b]);
        &self.dist[i][j]
    }

    pub fn try_d(&self, a: PointId, b: PointId) -> Result<&Rat01> {
        match (self.pos.get(&a), self.pos.get(&b)) {
            (Some(&i), Some(&j)) => Ok(&self.dist[i][j]),
            _ => Err(Error::precondition(format!("point {a} or {b} not in space"))),
        }
    }

    /// Distance by position.
    pub fn d_at(&self, i: usize, j: usize) -> &Rat01 {
        &self.dist[i][j]
    }

    /// Max-metric distance between equal-length tuples.
    pub fn tuple_d(&self, a: &[PointId], b: &[PointId]) -> Rat01 {
        a.iter().zip(b).map(|(&x, &y)| self.d(x, y).clone()).max().unwrap_or_else(Rat01::zero)
    }

    /// Checks symmetry, zero diagonal, the triangle inequality, and (unless
    /// `allow_zero`) that distinct points are at positive distance.
    pub fn validate(&self, allow_zero: bool) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if !self.dist[i][i].is_zero() {
                return Err(Error::precondition(format!("d({0},{0}) != 0", self.ids[i])));
            }
            for j in 0..n {
                if self.dist[i][j] != self.dist[j][i] {
                    return Err(Error::precondition(format!(
                        "asymmetric distance between {} and {}",
                        self.ids[i], self.ids[j]
                    )));
                }
                if i != j && !allow_zero && self.dist[i][j].is_zero() {
                    return Err(Error::precondition(format!(
                        "distinct points {} and {} at distance 0",
                        self.ids[i], self.ids[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = self.dist[i][k].value() + self.dist[k][j].value();
                    if self.dist[i][j].value() > &via {
                        return Err(Error::precondition(format!(
                            "triangle inequality fails for {}, {}, {}",
                            self.ids[i], self.ids[k], self.ids[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Appends a point after checking that the result is still a metric.
    /// `to_existing[i]` is the distance to the point at position `i`.
    pub fn push_point(&mut self, id: PointId, to_existing: Vec<Rat01>) -> Result<()> {
        if self.pos.contains_key(&id) {
            return Err(Error::usage(format!("duplicate point id {id}")));
        }
        if to_existing.len() != self.len() {
            return Err(Error::usage("wrong number of distances for new point"));
        }
        let r: BTreeMap<PointId, Rat01> = self.ids.iter().copied().zip(to_existing.iter().cloned()).collect();
        if !one_point_admissible(self, &r)? {
            return Err(Error::precondition(format!("distances for point {id} violate the triangle inequality")));
        }
        self.push_point_unchecked(id, to_existing);
        Ok(())
    }

    pub(crate) fn push_point_unchecked(&mut self, id: PointId, to_existing: Vec<Rat01>) {
        let n = self.len();
        for (row, v) in self.dist.iter_mut().zip(&to_existing) {
            row.push(v.clone());
        }
        let mut row = to_existing;
        row.push(Rat01::zero());
        self.dist.push(row);
        self.ids.push(id);
        self.pos.insert(id, n);
    }

    /// Restriction to a subset of points, in the given order.
    pub fn restrict(&self, ids: &[PointId]) -> Result<FinMetric> {
        let mut dist = Vec::with_capacity(ids.len());
        for &a in ids {
            let mut row = Vec::with_capacity(ids.len());
            for &b in ids {
                row.push(self.try_d(a, b)?.clone());
            }
            dist.push(row);
        }
        FinMetric::from_matrix_unchecked(ids.to_vec(), dist)
    }
}

/// Decides whether a new point at distances `r` from every point of `space`
/// keeps the space metric: `|r(a) - r(b)| <= d(a,b) <= r(a) + r(b)`.
pub fn one_point_admissible(space: &FinMetric, r: &BTreeMap<PointId, Rat01>) -> Result<bool> {
    for id in space.ids() {
        match r.get(id) {
            None => return Err(Error::precondition(format!("no distance given for point {id}"))),
            Some(v) if v.is_zero() => {
                return Err(Error::precondition(format!("distance 0 to point {id} would duplicate it")))
            }
            Some(_) => {}
        }
    }
    if let Some(extra) = r.keys().find(|id| !space.contains(**id)) {
        return Err(Error::precondition(format!("point {extra} not in space")));
    }
    Ok(katetov_ok(space, r))
}

fn katetov_ok(space: &FinMetric, r: &BTreeMap<PointId, Rat01>) -> bool {
    let entries: Vec<(usize, &Rat01)> = r.iter().map(|(id, v)| (space.position(*id).expect("checked"), v)).collect();
    for (x, &(i, ri)) in entries.iter().enumerate() {
        for &(j, rj) in &entries[x + 1..] {
            let d = space.d_at(i, j);
            if &ri.absdiff(rj) > d || d.value() > &(ri.value() + rj.value()) {
                return false;
            }
        }
    }
    true
}
