use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{lipschitz_extend, tuples, FinStructure};
use crate::metric::{PartialIsometry, PointId, QUPrefix};
use crate::rat::{pow2_neg, ratio, Rat01, Rational};

/// `ε_k = ε / 2^(k+3)` for `k = 1..=steps`.
pub fn budget(eps: &Rat01, steps: usize) -> Vec<Rat01> {
    (1..=steps as u32).map(|k| Rat01::clamp(eps.value() * pow2_neg(k + 3))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    C,
    D,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::C => "c",
            Side::D => "d",
        })
    }
}

/// One extension step: `source` joined the `side` tuple and `image` the
/// other one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageLog {
    pub stage: usize,
    pub side: Side,
    pub source: PointId,
    pub image: PointId,
    /// Largest movement of an existing coordinate in this step.
    pub drift: Rat01,
    /// Relational agreement demanded of the new tuples.
    pub tol: Rat01,
}

impl fmt::Display for StageLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} side {} drift {} tol {}", self.stage, self.side, self.drift, self.tol)
    }
}

#[derive(Clone, Debug)]
pub struct BackForthState {
    pub stage: usize,
    pub c: Vec<PointId>,
    pub d: Vec<PointId>,
    pub alpha: PartialIsometry,
    pub eps: Vec<Rat01>,
    pub prefix: QUPrefix,
    pub structure: FinStructure,
}

/// The step at which no image could be found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stuck {
    pub stage: usize,
    pub side: Side,
    pub source: PointId,
    pub obstruction: String,
}

#[derive(Clone, Debug)]
pub struct BackForthRun {
    pub state: BackForthState,
    pub log: Vec<StageLog>,
    pub stuck: Option<Stuck>,
    /// `d(c_j, a_j)` for the original coordinates.
    pub drift: Vec<Rat01>,
    /// `Σ ε_k`.
    pub bound: Rat01,
}

impl BackForthRun {
    /// Completed and every original coordinate within the budget.
    pub fn certified(&self) -> bool {
        self.stuck.is_none() && self.drift.iter().all(|d| d <= &self.bound)
    }

    pub fn max_drift(&self) -> Rat01 {
        self.drift.iter().fold(Rat01::zero(), |a, b| a.max_with(b))
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for l in &self.log {
            s.push_str(&l.to_string());
            s.push('\n');
        }
        match &self.stuck {
            Some(st) => s.push_str(&format!(
                "stuck stage {} side {} point {}: {}\n",
                st.stage, st.side, st.source, st.obstruction
            )),
            None => s.push_str(&format!("done drift {} bound {}\n", self.max_drift(), self.bound)),
        }
        s
    }
}

fn map_tuple(a: &[PointId], b: &[PointId]) -> Result<PartialIsometry> {
    let mut pairs: BTreeMap<PointId, PointId> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        if let Some(&old) = pairs.get(&x) {
            if old != y {
                return Err(Error::precondition(format!("{x} is sent to both {old} and {y}")));
            }
        }
        pairs.insert(x, y);
    }
    PartialIsometry::new(pairs.into_iter().collect())
}

/// Largest `|R(t) - R(α t)|` over tuples from the domain of `alpha` that
/// mention `fresh` (all tuples when `fresh` is `None`).
fn disagreement(m: &FinStructure, alpha: &PartialIsometry, fresh: Option<PointId>) -> Rat01 {
    let dom: Vec<PointId> = alpha.domain().collect();
    let mut worst = Rat01::zero();
    for r in m.signature().rels() {
        for t in tuples(&dom, r.arity) {
            if fresh.is_some_and(|x| !t.contains(&x)) {
                continue;
            }
            let img = alpha.apply(&t).expect("domain tuple");
            let (u, v) = (m.value(&r.name, &t), m.value(&r.name, &img));
            worst = worst.max_with(&u.expect("total").absdiff(v.expect("total")));
        }
    }
    worst
}

/// Alternating extension of `a ↦ b` through the prefix.
///
/// Stage `l` adds to the `c` side when `l` is even and to the `d` side when
/// odd, always the least prefix point not yet on that side. Images are exact
/// (same distances to everything matched so far), taken from the prefix when
/// some point also keeps every relation within `Σ_{k≤l+1} ε_k`, otherwise
/// appended as a new point. `seed` is extended over the prefix as it grows.
pub fn back_and_forth(
    seed: &FinStructure,
    prefix: &QUPrefix,
    a: &[PointId],
    b: &[PointId],
    eps: &Rat01,
    steps: usize,
) -> Result<BackForthRun> {
    if a.len() != b.len() {
        return Err(Error::usage("tuples must have the same length"));
    }
    for &p in a.iter().chain(b) {
        if p >= prefix.len() {
            return Err(Error::precondition(format!("point {p} is not in the prefix")));
        }
    }
    let alpha = map_tuple(a, b)?;
    alpha.validate(prefix.space())?;
    map_tuple(b, a)?;
    let structure = lipschitz_extend(seed, prefix)?;
    let gap = disagreement(&structure, &alpha, None);
    if !gap.is_zero() {
        return Err(Error::precondition(format!("the tuples differ on a relation by {gap}")));
    }

    let eps_k = budget(eps, steps);
    let bound = eps_k.iter().fold(Rat01::zero(), |acc, e| acc.tadd(e));
    let mut state = BackForthState {
        stage: 0,
        c: a.to_vec(),
        d: b.to_vec(),
        alpha,
        eps: eps_k.clone(),
        prefix: prefix.clone(),
        structure,
    };
    let mut log = Vec::new();
    let mut tol = Rat01::zero();
    let mut stuck = None;
    for (l, e) in eps_k.iter().enumerate() {
        tol = tol.tadd(e);
        let side = if l % 2 == 0 { Side::C } else { Side::D };
        // work with the map from the side being extended
        let forward = match side {
            Side::C => state.alpha.clone(),
            Side::D => state.alpha.inverse(),
        };
        let taken: Vec<PointId> = forward.domain().collect();
        while (0..state.prefix.len()).all(|p| taken.contains(&p)) {
            state.prefix.step();
            state.structure = lipschitz_extend(seed, &state.prefix)?;
        }
        let x = (0..state.prefix.len()).find(|p| !taken.contains(p)).expect("grown");
        match find_image(seed, &mut state, &forward, x, &tol)? {
            Some((y, fwd)) => {
                state.alpha = match side {
                    Side::C => fwd,
                    Side::D => fwd.inverse(),
                };
                match side {
                    Side::C => {
                        state.c.push(x);
                        state.d.push(y);
                    }
                    Side::D => {
                        state.c.push(y);
                        state.d.push(x);
                    }
                }
                state.stage = l + 1;
                log.push(StageLog { stage: l, side, source: x, image: y, drift: Rat01::zero(), tol: tol.clone() });
            }
            None => {
                stuck = Some(Stuck {
                    stage: l,
                    side,
                    source: x,
                    obstruction: format!("no image keeps the relations within {tol}"),
                });
                break;
            }
        }
    }
    let drift = a.iter().enumerate().map(|(j, &aj)| state.prefix.d(state.c[j], aj).clone()).collect();
    Ok(BackForthRun { state, log, stuck, drift, bound })
}

fn find_image(
    seed: &FinStructure,
    state: &mut BackForthState,
    forward: &PartialIsometry,
    x: PointId,
    tol: &Rat01,
) -> Result<Option<(PointId, PartialIsometry)>> {
    let wanted: BTreeMap<PointId, Rat01> =
        forward.pairs().iter().map(|&(s, t)| (t, state.prefix.d(x, s).clone())).collect();
    let used: Vec<PointId> = forward.image().collect();
    let try_point = |state: &BackForthState, y: PointId| -> Result<Option<PartialIsometry>> {
        if used.contains(&y) || wanted.iter().any(|(&t, r)| state.prefix.d(y, t) != r) {
            return Ok(None);
        }
        let mut g = forward.clone();
        g.insert(x, y)?;
        let ok = disagreement(&state.structure, &g, Some(x)) <= *tol;
        Ok(ok.then_some(g))
    };
    for y in 0..state.prefix.len() {
        if let Some(g) = try_point(state, y)? {
            return Ok(Some((y, g)));
        }
    }
    let y = state.prefix.append_point(&wanted)?;
    state.structure = lipschitz_extend(seed, &state.prefix)?;
    Ok(try_point(state, y)?.map(|g| (y, g)))
}

/// Whether `Σ ε_k` stays below `ε/4`.
pub fn budget_ok(eps: &Rat01, steps: usize) -> bool {
    let sum: Rational = budget(eps, steps).iter().map(|e| e.value().clone()).sum();
    eps.is_zero() || sum * ratio(4, 1) < *eps.value()
}
