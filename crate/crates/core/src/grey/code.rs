use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::metric::text::parse_id_list;
use crate::metric::{
    feasible_pseudometric, Bound, Feasibility, FinMetric, PartialConstraintSet, PartialIsometry, PointId, QUPrefix,
};
use crate::rat::{format_rational, parse_rational, Rat01, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, v: &Rat01, thr: &Rat01) -> bool {
        match self {
            CmpOp::Lt => v < thr,
            CmpOp::Le => v <= thr,
            CmpOp::Gt => v > thr,
            CmpOp::Ge => v >= thr,
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            CmpOp::Lt => "lt",
            CmpOp::Le => "le",
            CmpOp::Gt => "gt",
            CmpOp::Ge => "ge",
        }
    }
}

impl FromStr for CmpOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lt" => CmpOp::Lt,
            "le" => CmpOp::Le,
            "gt" => CmpOp::Gt,
            "ge" => CmpOp::Ge,
            _ => return Err(Error::usage(format!("unknown comparison `{s}`"))),
        })
    }
}

/// Code of the cone `{g : min(1, q * d(g(s'), s)) ∗ thr}` of isometries,
/// the tuple distance being the max over coordinates.
///
/// With `s = s'` the function `g ↦ min(1, q * d(g(s), s))` is a grey
/// subgroup and the cone is one of its level sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GreyCosetCode {
    pub q: Rational,
    pub s: Vec<PointId>,
    pub s_prime: Vec<PointId>,
    pub thr: Rat01,
    pub op: CmpOp,
}

impl GreyCosetCode {
    /// Checks shape only; see [`GreyCosetCode::validate`] for the diagram.
    pub fn new(q: Rational, s: Vec<PointId>, s_prime: Vec<PointId>, thr: Rat01, op: CmpOp) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::usage("coset multiplier must be positive"));
        }
        if s.len() != s_prime.len() {
            return Err(Error::usage("s and s' must have the same length"));
        }
        Ok(GreyCosetCode { q, s, s_prime, thr, op })
    }

    /// The grey subgroup cone `H_{q,t} ∗ thr` with `H(g) = min(1, q d(g(t), t))`.
    pub fn subgroup(q: Rational, t: Vec<PointId>, thr: Rat01, op: CmpOp) -> Result<Self> {
        Self::new(q, t.clone(), t, thr, op)
    }

    pub fn is_subgroup(&self) -> bool {
        self.s == self.s_prime
    }

    /// Checks that all points lie in `space` and that `s` and `s'` have the
    /// same quantifier-free diagram.
    pub fn validate(&self, space: &FinMetric) -> Result<()> {
        for &p in self.s.iter().chain(&self.s_prime) {
            if !space.contains(p) {
                return Err(Error::precondition(format!("point {p} is not in the prefix")));
            }
        }
        for i in 0..self.s.len() {
            for j in i + 1..self.s.len() {
                if space.d(self.s[i], self.s[j]) != space.d(self.s_prime[i], self.s_prime[j]) {
                    return Err(Error::precondition(format!("s and s' differ on coordinates {i} and {j}")));
                }
            }
        }
        Ok(())
    }

    pub fn with_threshold(&self, thr: Rat01) -> Self {
        GreyCosetCode { thr, ..self.clone() }
    }
}

impl fmt::Display for GreyCosetCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids = |t: &[PointId]| t.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "gcone q={} s={} s'={} thr={} op={}",
            format_rational(&self.q),
            if self.s.is_empty() { "-".into() } else { ids(&self.s) },
            if self.s_prime.is_empty() { "-".into() } else { ids(&self.s_prime) },
            self.thr,
            self.op.keyword()
        )
    }
}

impl FromStr for GreyCosetCode {
    type Err = Error;

    /// Parses `gcone q=<p/q> s=<ids> s'=<ids> thr=<p/q> op=<lt|le|gt|ge>`.
    fn from_str(line: &str) -> Result<Self> {
        let mut toks = line.split_whitespace();
        if toks.next() != Some("gcone") {
            return Err(Error::parse(1, "expected `gcone`"));
        }
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for t in toks {
            let (k, v) = t.split_once('=').ok_or_else(|| Error::parse(1, format!("expected key=value, got `{t}`")))?;
            if fields.insert(k, v).is_some() {
                return Err(Error::parse(1, format!("duplicate field `{k}`")));
            }
        }
        let mut get = |k: &str| fields.remove(k).ok_or_else(|| Error::parse(1, format!("missing field `{k}`")));
        let q = parse_rational(get("q")?)?;
        let s = parse_id_list(1, get("s")?)?;
        let s_prime = parse_id_list(1, get("s'")?)?;
        let thr: Rat01 = get("thr")?.parse()?;
        let op: CmpOp = get("op")?.parse()?;
        if let Some(k) = fields.keys().next() {
            return Err(Error::parse(1, format!("unknown field `{k}`")));
        }
        GreyCosetCode::new(q, s, s_prime, thr, op)
    }
}

/// `min(1, q * max_i d(g(s'_i), s_i))`.
pub fn coset_value(code: &GreyCosetCode, g: &PartialIsometry, space: &FinMetric) -> Result<Rat01> {
    let mut worst = Rat01::zero();
    for (&a, &b) in code.s.iter().zip(&code.s_prime) {
        let gb = g.get(b).ok_or_else(|| Error::precondition(format!("isometry undefined on {b}")))?;
        worst = worst.max_with(space.try_d(gb, a)?);
    }
    Ok(worst.tmul(&code.q))
}

pub fn cone_contains(code: &GreyCosetCode, g: &PartialIsometry, space: &FinMetric) -> Result<bool> {
    Ok(code.op.holds(&coset_value(code, g, space)?, &code.thr))
}

/// A bound on `d(g(s'_i), s_i)` for one coordinate `i`.
#[derive(Clone, Debug)]
enum Side {
    Upper(Bound),
    Lower(Bound),
}

/// The cone condition rewritten in terms of the coordinate distances.
#[derive(Clone, Debug)]
enum Cond {
    All,
    Empty,
    /// Every coordinate satisfies the bound.
    Conj(Side),
    /// Some coordinate satisfies the bound.
    Disj(Side),
}

/// Removes the truncation: `min(1, qD) ∗ thr` becomes a bound on `D`, or a
/// constant when the truncation decides it.
fn normalize(q: &Rational, len: usize, thr: &Rat01, op: CmpOp) -> Cond {
    if len == 0 {
        return if op.holds(&Rat01::zero(), thr) { Cond::All } else { Cond::Empty };
    }
    let b = thr.value() / q;
    let one = Rational::one();
    let bound = |strict| Bound { value: Rat01::from_rational(b.clone()).expect("checked range"), strict };
    match op {
        CmpOp::Lt if thr.is_zero() => Cond::Empty,
        CmpOp::Lt if b > one => Cond::All,
        CmpOp::Lt => Cond::Conj(Side::Upper(bound(true))),
        CmpOp::Le if thr.is_one() || b >= one => Cond::All,
        CmpOp::Le => Cond::Conj(Side::Upper(bound(false))),
        CmpOp::Gt if thr.is_one() || b >= one => Cond::Empty,
        CmpOp::Gt => Cond::Disj(Side::Lower(bound(true))),
        CmpOp::Ge if thr.is_zero() => Cond::All,
        CmpOp::Ge if b > one => Cond::Empty,
        CmpOp::Ge => Cond::Disj(Side::Lower(bound(false))),
    }
}

/// A configuration showing that one cone is not inside another: positions
/// for the images of the `s'` points relative to the parameter points.
#[derive(Clone, Debug)]
pub struct SubsetWitness {
    /// Pseudometric on the parameter points followed by the image variables.
    pub metric: FinMetric,
    /// `(source point, variable id in `metric`)` for every image.
    pub images: Vec<(PointId, PointId)>,
}

/// Decides whether every isometry in the cone of `c1` lies in the cone of
/// `c2`; on failure returns a configuration of images realising the gap.
///
/// An isometry only matters through the images `u` of the `s'` points of
/// both codes. These images range over all tuples of the same type as the
/// sources, and may coincide with parameter points, so the question is a
/// pseudometric feasibility problem on parameters plus images.
pub fn cone_subset_witness(c1: &GreyCosetCode, c2: &GreyCosetCode, space: &FinMetric) -> Result<Option<SubsetWitness>> {
    c1.validate(space)?;
    c2.validate(space)?;
    let cond1 = normalize(&c1.q, c1.s.len(), &c1.thr, c1.op);
    let cond2 = normalize(&c2.q, c2.s.len(), &c2.thr, c2.op.negate());
    if matches!(cond1, Cond::Empty) || matches!(cond2, Cond::Empty) {
        return Ok(None);
    }

    let mut known: Vec<PointId> = c1.s.iter().chain(&c2.s).copied().collect();
    known.sort();
    known.dedup();
    let mut sources: Vec<PointId> = c1.s_prime.iter().chain(&c2.s_prime).copied().collect();
    sources.sort();
    sources.dedup();
    let base = known.iter().chain(&sources).max().map_or(0, |m| m + 1);
    let var = |src: PointId| base + sources.iter().position(|&x| x == src).expect("collected");

    let mut points = known.clone();
    points.extend(sources.iter().map(|&x| var(x)));
    let mut cs = PartialConstraintSet::new(points)?;
    for (i, &a) in known.iter().enumerate() {
        for &b in &known[i + 1..] {
            cs.set_exact(a, b, space.d(a, b).clone())?;
        }
    }
    for (i, &a) in sources.iter().enumerate() {
        for &b in &sources[i + 1..] {
            cs.set_exact(var(a), var(b), space.d(a, b).clone())?;
        }
    }

    // each branch is a list of (image variable, parameter point, bound)
    let branches = |c: &GreyCosetCode, cond: &Cond| -> Vec<Vec<(PointId, PointId, Side)>> {
        let pairs: Vec<(PointId, PointId)> = c.s_prime.iter().zip(&c.s).map(|(&sp, &s)| (var(sp), s)).collect();
        match cond {
            Cond::All => vec![Vec::new()],
            Cond::Empty => Vec::new(),
            Cond::Conj(side) => vec![pairs.iter().map(|&(u, s)| (u, s, side.clone())).collect()],
            Cond::Disj(side) => pairs.iter().map(|&(u, s)| vec![(u, s, side.clone())]).collect(),
        }
    };
    for b1 in branches(c1, &cond1) {
        for b2 in branches(c2, &cond2) {
            let mut c = cs.clone();
            for (u, s, side) in b1.iter().chain(&b2) {
                match side {
                    Side::Upper(b) => c.add_upper(*u, *s, b.clone())?,
                    Side::Lower(b) => c.add_lower(*u, *s, b.clone())?,
                }
            }
            if let Feasibility::Feasible(metric) = feasible_pseudometric(&c)? {
                return Ok(Some(SubsetWitness { metric, images: sources.iter().map(|&x| (x, var(x))).collect() }));
            }
        }
    }
    Ok(None)
}

pub fn cone_subset(c1: &GreyCosetCode, c2: &GreyCosetCode, space: &FinMetric) -> Result<bool> {
    Ok(cone_subset_witness(c1, c2, space)?.is_none())
}

/// Whether the cone contains any isometry.
pub fn cone_nonempty(c: &GreyCosetCode, space: &FinMetric) -> Result<bool> {
    let never = GreyCosetCode::new(Rational::one(), Vec::new(), Vec::new(), Rat01::zero(), CmpOp::Lt)?;
    Ok(!cone_subset(c, &never, space)?)
}

/// Turns a witness into a partial isometry of a grown prefix: each image is
/// an existing parameter point at distance 0 or a newly appended point.
pub fn realize_witness(prefix: &mut QUPrefix, w: &SubsetWitness) -> Result<PartialIsometry> {
    let m = &w.metric;
    let params: Vec<PointId> = m.ids().iter().copied().filter(|id| !w.images.iter().any(|im| im.1 == *id)).collect();
    let mut placed: Vec<(PointId, PointId)> = params.iter().map(|&p| (p, p)).collect();
    let mut pairs = Vec::new();
    for &(src, v) in &w.images {
        let target = match placed.iter().find(|(wid, _)| m.d(*wid, v).is_zero()) {
            Some(&(_, real)) => real,
            None => {
                let anchors: BTreeMap<PointId, Rat01> =
                    placed.iter().map(|&(wid, real)| (real, m.d(wid, v).clone())).collect();
                match prefix.realizes(&anchors) {
                    Some(existing) => existing,
                    None => prefix.append_point(&anchors)?,
                }
            }
        };
        placed.push((v, target));
        pairs.push((src, target));
    }
    let g = PartialIsometry::new(pairs)?;
    g.validate(prefix.space())?;
    Ok(g)
}
