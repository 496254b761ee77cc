use std::collections::{BTreeMap, BTreeSet};

use super::{FinMetric, PointId, QUPrefix};
use crate::error::{Error, Result};
use crate::rat::Rat01;

/// A finite injective distance-preserving map between prefix points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialIsometry {
    pairs: Vec<(PointId, PointId)>,
}

impl PartialIsometry {
    /// Builds a map from `(source, target)` pairs; shape only, see
    /// [`PartialIsometry::validate`] for the metric check.
    pub fn new(pairs: Vec<(PointId, PointId)>) -> Result<Self> {
        let srcs: BTreeSet<_> = pairs.iter().map(|p| p.0).collect();
        let dsts: BTreeSet<_> = pairs.iter().map(|p| p.1).collect();
        if srcs.len() != pairs.len() {
            return Err(Error::usage("partial isometry maps a source twice"));
        }
        if dsts.len() != pairs.len() {
            return Err(Error::usage("partial isometry is not injective"));
        }
        Ok(PartialIsometry { pairs })
    }

    pub fn identity(points: &[PointId]) -> Self {
        PartialIsometry { pairs: points.iter().map(|&p| (p, p)).collect() }
    }

    pub fn pairs(&self) -> &[(PointId, PointId)] {
        &self.pairs
    }

    pub fn domain(&self) -> impl Iterator<Item = PointId> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn image(&self) -> impl Iterator<Item = PointId> + '_ {
        self.pairs.iter().map(|p| p.1)
    }

    pub fn get(&self, src: PointId) -> Option<PointId> {
        self.pairs.iter().find(|p| p.0 == src).map(|p| p.1)
    }

    /// Applies the map to a tuple; `None` if some coordinate is unmapped.
    pub fn apply(&self, tuple: &[PointId]) -> Option<Vec<PointId>> {
        tuple.iter().map(|&p| self.get(p)).collect()
    }

    pub fn inverse(&self) -> PartialIsometry {
        PartialIsometry { pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect() }
    }

    /// `self ∘ other`, defined where `other` lands in the domain of `self`.
    pub fn compose(&self, other: &PartialIsometry) -> PartialIsometry {
        PartialIsometry { pairs: other.pairs.iter().filter_map(|&(a, b)| self.get(b).map(|c| (a, c))).collect() }
    }

    pub fn insert(&mut self, src: PointId, dst: PointId) -> Result<()> {
        if self.get(src).is_some() || self.image().any(|d| d == dst) {
            return Err(Error::usage(format!("cannot add {src} -> {dst}: not injective")));
        }
        self.pairs.push((src, dst));
        Ok(())
    }

    /// Checks that all points lie in `space` and that distances are preserved.
    pub fn validate(&self, space: &FinMetric) -> Result<()> {
        for &(a, b) in &self.pairs {
            if !space.contains(a) || !space.contains(b) {
                return Err(Error::precondition(format!("pair {a} -> {b} leaves the space")));
            }
        }
        for (i, &(a, fa)) in self.pairs.iter().enumerate() {
            for &(b, fb) in &self.pairs[i + 1..] {
                if space.d(a, b) != space.d(fa, fb) {
                    return Err(Error::precondition(format!(
                        "d({a},{b}) = {} but d({fa},{fb}) = {}",
                        space.d(a, b),
                        space.d(fa, fb)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Extends `gamma` to every point of `new_sources`, growing the prefix with
/// targeted one-point extensions when no existing point can serve as image.
///
/// A source is preferably mapped to itself when that is consistent, then to
/// the first suitable existing point in id order.
pub fn extend_partial_isometry(
    prefix: &QUPrefix,
    gamma: &PartialIsometry,
    new_sources: &[PointId],
) -> Result<(QUPrefix, PartialIsometry)> {
    gamma.validate(prefix.space())?;
    for &s in new_sources {
        if s >= prefix.len() {
            return Err(Error::precondition(format!("source {s} not in prefix")));
        }
    }
    let mut prefix = prefix.clone();
    let mut gamma = gamma.clone();
    for &x in new_sources {
        if gamma.get(x).is_some() {
            continue;
        }
        let wanted: BTreeMap<PointId, Rat01> =
            gamma.pairs().iter().map(|&(a, fa)| (fa, prefix.d(x, a).clone())).collect();
        let used: BTreeSet<PointId> = gamma.image().collect();
        let fits = |y: PointId| !used.contains(&y) && wanted.iter().all(|(&fa, r)| prefix.d(y, fa) == r);
        let target = if fits(x) {
            x
        } else if let Some(y) = (0..prefix.len()).find(|&y| fits(y)) {
            y
        } else {
            prefix.append_point(&wanted)?
        };
        gamma.insert(x, target)?;
    }
    debug_assert!(gamma.validate(prefix.space()).is_ok());
    Ok((prefix, gamma))
}
