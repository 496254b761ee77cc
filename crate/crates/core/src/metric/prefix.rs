//! Canonical finite prefixes of the rational Urysohn space of diameter 1.
//!
//! The construction runs in stages. Stage `s` uses the denominator bound
//! `D = 2^(s-1)` and subsets of size at most `s` of the points that existed
//! when the stage began. For every such subset (by size, then
//! lexicographically) and every one-point type over it with values in the
//! stage grid (lexicographically), a point realising the type is appended
//! unless the prefix already realises it. Distances from a new point to the
//! points outside its anchor set are the smallest admissible grid values,
//! taken in id order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{katetov_ok, FinMetric, PointId};
use crate::error::{Error, Result};
use crate::rat::{Rat01, Rational};

/// All rationals in `(0,1]` with denominator at most `d`, ascending.
pub fn rationals_up_to(d: u64) -> Vec<Rat01> {
    let mut out: Vec<Rat01> = Vec::new();
    for den in 1..=d {
        for num in 1..=den {
            if num.gcd(&den) == 1 {
                out.push(Rat01::from_rational(Rational::new(BigInt::from(num), BigInt::from(den))).unwrap());
            }
        }
    }
    out.sort();
    out
}

/// Position of the construction inside its schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleCursor {
    /// Current stage, starting at 1.
    pub stage: u32,
    /// Number of points present when the stage began.
    pub snapshot: usize,
    /// Anchor subset of the next work item (ascending ids).
    pub subset: Vec<PointId>,
    /// Mixed-radix index of the next type over `subset` in the stage grid.
    pub ty: u64,
}

impl ScheduleCursor {
    fn start() -> Self {
        ScheduleCursor { stage: 1, snapshot: 0, subset: Vec::new(), ty: 0 }
    }
}

/// A finite prefix of the canonical enumeration together with the schedule
/// state needed to continue it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QUPrefix {
    space: FinMetric,
    cursor: ScheduleCursor,
    /// `stage_starts[s-1]` is the prefix length when stage `s` began.
    stage_starts: Vec<usize>,
}

impl Default for QUPrefix {
    fn default() -> Self {
        Self::new()
    }
}

impl QUPrefix {
    pub fn new() -> Self {
        QUPrefix { space: FinMetric::new(), cursor: ScheduleCursor::start(), stage_starts: vec![0] }
    }

    /// Reassembles a prefix from stored parts, validating the metric and the
    /// cursor.
    pub fn from_parts(space: FinMetric, cursor: ScheduleCursor, stage_starts: Vec<usize>) -> Result<Self> {
        space.validate(false)?;
        if space.ids().iter().enumerate().any(|(i, &id)| i != id) {
            return Err(Error::usage("prefix point ids must be 0,1,2,... in order"));
        }
        if cursor.stage == 0
            || cursor.snapshot > space.len()
            || stage_starts.len() != cursor.stage as usize
            || stage_starts.last() != Some(&cursor.snapshot)
            || stage_starts.windows(2).any(|w| w[0] > w[1])
            || cursor.subset.iter().any(|&p| p >= cursor.snapshot)
            || cursor.subset.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::usage("inconsistent schedule cursor"));
        }
        Ok(QUPrefix { space, cursor, stage_starts })
    }

    pub fn space(&self) -> &FinMetric {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn d(&self, a: PointId, b: PointId) -> &Rat01 {
        self.space.d(a, b)
    }

    pub fn cursor(&self) -> &ScheduleCursor {
        &self.cursor
    }

    pub fn stage_starts(&self) -> &[usize] {
        &self.stage_starts
    }

    /// Denominator bound of stage `s`.
    pub fn stage_denominator(s: u32) -> u64 {
        1u64 << (s - 1).min(62)
    }

    /// Largest anchor-subset size of stage `s`.
    pub fn stage_subset_size(s: u32) -> usize {
        s as usize
    }

    /// Denominator bound of the stage in progress.
    pub fn current_denominator(&self) -> u64 {
        Self::stage_denominator(self.cursor.stage)
    }

    /// Runs the schedule until stage `s` is complete.
    pub fn run_through_stage(&mut self, s: u32) {
        while self.cursor.stage <= s {
            self.next_item();
        }
    }

    /// Appends one point following the schedule.
    pub fn step(&mut self) -> PointId {
        loop {
            if let Some(id) = self.next_item() {
                return id;
            }
        }
    }

    /// Processes one work item, appending a point unless its type is
    /// inadmissible or already realised.
    fn next_item(&mut self) -> Option<PointId> {
        let grid = rationals_up_to(Self::stage_denominator(self.cursor.stage));
        let r = decode_type(&self.cursor.subset, self.cursor.ty, &grid);
        let anchors: BTreeMap<PointId, Rat01> = self.cursor.subset.iter().copied().zip(r).collect();
        let added = if katetov_ok(&self.space, &anchors) && self.realizes(&anchors).is_none() {
            Some(self.append_with_anchors(&anchors, &grid))
        } else {
            None
        };
        self.advance_cursor(grid.len());
        added
    }

    fn advance_cursor(&mut self, grid_len: usize) {
        let total = (grid_len as u64).checked_pow(self.cursor.subset.len() as u32).unwrap_or(u64::MAX);
        if self.cursor.ty + 1 < total {
            self.cursor.ty += 1;
            return;
        }
        self.cursor.ty = 0;
        let k = Self::stage_subset_size(self.cursor.stage);
        match next_subset(&self.cursor.subset, self.cursor.snapshot, k) {
            Some(s) => self.cursor.subset = s,
            None => {
                self.cursor.stage += 1;
                self.cursor.snapshot = self.space.len();
                self.cursor.subset = Vec::new();
                self.stage_starts.push(self.space.len());
            }
        }
    }

    /// A point outside the anchors at exactly the given distances, if any.
    pub fn realizes(&self, anchors: &BTreeMap<PointId, Rat01>) -> Option<PointId> {
        if anchors.is_empty() {
            return (!self.is_empty()).then_some(0);
        }
        (0..self.len()).find(|&x| !anchors.contains_key(&x) && anchors.iter().all(|(&a, r)| self.space.d_at(x, a) == r))
    }

    /// Appends a point with the given distances to the anchor points; the
    /// remaining distances follow the canonical smallest-admissible rule on
    /// the current stage grid.
    pub fn append_point(&mut self, anchors: &BTreeMap<PointId, Rat01>) -> Result<PointId> {
        for (&a, r) in anchors {
            if a >= self.len() {
                return Err(Error::precondition(format!("anchor {a} not in prefix")));
            }
            if r.is_zero() {
                return Err(Error::precondition(format!("distance 0 to anchor {a}")));
            }
        }
        if !katetov_ok(&self.space, anchors) {
            return Err(Error::precondition("anchor distances are not an admissible one-point type"));
        }
        let grid = rationals_up_to(self.current_denominator());
        Ok(self.append_with_anchors(anchors, &grid))
    }

    fn append_with_anchors(&mut self, anchors: &BTreeMap<PointId, Rat01>, grid: &[Rat01]) -> PointId {
        let n = self.len();
        let mut r: Vec<Option<Rat01>> = vec![None; n];
        for (&a, v) in anchors {
            r[a] = Some(v.clone());
        }
        let mut determined: Vec<usize> = anchors.keys().copied().collect();
        for p in 0..n {
            if r[p].is_some() {
                continue;
            }
            let mut lo = Rational::zero();
            let mut hi = Rational::one();
            for &b in &determined {
                let rb = r[b].as_ref().unwrap().value();
                let dbp = self.space.d_at(b, p).value();
                let diff = if rb > dbp { rb - dbp } else { dbp - rb };
                if diff > lo {
                    lo = diff;
                }
                let sum = rb + dbp;
                if sum < hi {
                    hi = sum;
                }
            }
            let pick =
                grid.iter().find(|g| g.value() >= &lo && g.value() <= &hi).cloned().unwrap_or_else(|| Rat01::clamp(hi));
            r[p] = Some(pick);
            determined.push(p);
        }
        let row: Vec<Rat01> = r.into_iter().map(Option::unwrap).collect();
        debug_assert!(katetov_ok(&self.space, &row.iter().cloned().enumerate().collect()));
        self.space.push_point_unchecked(n, row);
        n
    }
}

/// Advances the canonical schedule by `steps` appended points.
pub fn qu_extend(prefix: &QUPrefix, steps: usize) -> QUPrefix {
    let mut out = prefix.clone();
    for _ in 0..steps {
        out.step();
    }
    out
}

fn decode_type(subset: &[PointId], mut ty: u64, grid: &[Rat01]) -> Vec<Rat01> {
    let base = grid.len() as u64;
    let mut digits = vec![0u64; subset.len()];
    for slot in digits.iter_mut().rev() {
        *slot = ty % base;
        ty /= base;
    }
    digits.into_iter().map(|i| grid[i as usize].clone()).collect()
}

/// Successor of `s` among subsets of `0..n` of size at most `k`, ordered by
/// size and then lexicographically.
fn next_subset(s: &[PointId], n: usize, k: usize) -> Option<Vec<PointId>> {
    let m = s.len();
    // Try to bump the rightmost position that has room.
    let mut next = s.to_vec();
    for i in (0..m).rev() {
        if next[i] + (m - i) < n {
            next[i] += 1;
            for j in i + 1..m {
                next[j] = next[j - 1] + 1;
            }
            return Some(next);
        }
    }
    let m = m + 1;
    if m > k || m > n {
        return None;
    }
    Some((0..m).collect())
}
