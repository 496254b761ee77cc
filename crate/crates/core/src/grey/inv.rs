use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::{tuples, FinStructure, Signature, Table};
use crate::metric::{PartialIsometry, PointId, QUPrefix};
use crate::rat::{ratio, Rat01};
use crate::space::StructureCone;

use super::{coset_value, CmpOp, GreyCosetCode};

/// Distance of `m` from the centre of the cone: the largest deviation of a
/// constrained value from the midpoint of its interval.
pub fn cone_deviation(u: &StructureCone, m: &FinStructure) -> Result<Rat01> {
    moved_deviation(u, m, None)
}

fn moved_deviation(u: &StructureCone, m: &FinStructure, gamma: Option<&PartialIsometry>) -> Result<Rat01> {
    let mut worst = Rat01::zero();
    for c in u.constraints() {
        let t = match gamma {
            Some(g) => {
                g.apply(&c.tuple).ok_or_else(|| Error::precondition(format!("isometry undefined on {:?}", c.tuple)))?
            }
            None => c.tuple.clone(),
        };
        let v = m
            .value(&c.rel, &t)
            .ok_or_else(|| Error::precondition(format!("{}{t:?} is not in the structure", c.rel)))?;
        let centre = Rat01::clamp((c.lo.value() + c.hi.value()) / ratio(2, 1));
        worst = worst.max_with(&v.absdiff(&centre));
    }
    Ok(worst)
}

/// Parameters of the cone, sorted.
pub fn cone_parameters(u: &StructureCone) -> Vec<PointId> {
    let mut out: Vec<PointId> = u.constraints().iter().flat_map(|c| c.tuple.iter().copied()).collect();
    out.sort();
    out.dedup();
    out
}

/// The three sides of `φ(γ·M) ≤ φ(M) ∔ H(γ)` with `φ` the cone deviation;
/// `γ` acts by `(γ·M)(R)(x) = R(γx)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceTerms {
    pub before: Rat01,
    pub after: Rat01,
    pub h: Rat01,
}

impl InvarianceTerms {
    pub fn holds(&self) -> bool {
        self.after <= self.before.tadd(&self.h)
    }
}

pub fn invariance_terms(
    v: &GreyCosetCode,
    u: &StructureCone,
    m: &FinStructure,
    gamma: &PartialIsometry,
) -> Result<InvarianceTerms> {
    gamma.validate(m.carrier())?;
    Ok(InvarianceTerms {
        before: cone_deviation(u, m)?,
        after: moved_deviation(u, m, Some(gamma))?,
        h: coset_value(v, gamma, m.carrier())?,
    })
}

/// A structure and an isometry breaking the invariance inequality.
#[derive(Clone, Debug)]
pub struct InvWitness {
    pub gamma: PartialIsometry,
    pub structure: FinStructure,
    pub terms: InvarianceTerms,
}

#[derive(Clone, Debug)]
pub enum InvVerdict {
    Sound,
    Falsified(Box<InvWitness>),
    Unknown,
}

/// Recomputes a witness from scratch.
pub fn verify_inv_witness(v: &GreyCosetCode, u: &StructureCone, w: &InvWitness) -> Result<bool> {
    w.structure.audit_modulus()?;
    let fixes_t = v.s.iter().all(|&p| w.gamma.get(p) == Some(p));
    let terms = invariance_terms(v, u, &w.structure, &w.gamma)?;
    Ok(fixes_t && terms == w.terms && !terms.holds())
}

/// Whether the cone's deviation is invariant up to the grey subgroup `v`.
///
/// `v` must be a subgroup code `H_{p,t} < k`. Sound when the cone only
/// mentions points of `t` and `p` dominates the moduli of its relations.
/// Otherwise each parameter outside `t` is moved as far as the other
/// parameters allow, and two Lipschitz structures are tried.
pub fn inv_check(v: &GreyCosetCode, u: &StructureCone, sig: &Signature, prefix: &QUPrefix) -> Result<InvVerdict> {
    if !v.is_subgroup() || v.op != CmpOp::Lt {
        return Err(Error::usage("inv-check needs a subgroup code with op=lt"));
    }
    v.validate(prefix.space())?;
    let mut modulus = ratio(0, 1);
    for c in u.constraints() {
        let sym = sig.get(&c.rel).ok_or_else(|| Error::usage(format!("unknown relation `{}`", c.rel)))?;
        if c.tuple.len() != sym.arity {
            return Err(Error::usage(format!("relation `{}` has arity {}", sym.name, sym.arity)));
        }
        modulus = modulus.max(sym.modulus.clone());
    }
    let params = cone_parameters(u);
    for &p in &params {
        if !prefix.space().contains(p) {
            return Err(Error::precondition(format!("point {p} is not in the prefix")));
        }
    }
    if params.iter().all(|p| v.s.contains(p)) && v.q >= modulus {
        return Ok(InvVerdict::Sound);
    }

    let mut support: Vec<PointId> = params.iter().chain(&v.s).copied().collect();
    support.sort();
    support.dedup();
    for &s in params.iter().filter(|p| !v.s.contains(p)) {
        if let Some(w) = try_move(v, u, sig, prefix, &support, s)? {
            return Ok(InvVerdict::Falsified(Box::new(w)));
        }
    }
    Ok(InvVerdict::Unknown)
}

fn try_move(
    v: &GreyCosetCode,
    u: &StructureCone,
    sig: &Signature,
    prefix: &QUPrefix,
    support: &[PointId],
    s: PointId,
) -> Result<Option<InvWitness>> {
    let mut prefix = prefix.clone();
    let fixed: Vec<PointId> = support.iter().copied().filter(|&x| x != s).collect();
    let reach = fixed.iter().map(|&x| prefix.d(s, x).value() * ratio(2, 1)).min().unwrap_or_else(|| ratio(1, 1));
    let step = Rat01::clamp(reach);
    let mut anchors: BTreeMap<PointId, Rat01> = fixed.iter().map(|&x| (x, prefix.d(s, x).clone())).collect();
    anchors.insert(s, step);
    let moved = match prefix.realizes(&anchors) {
        Some(p) => p,
        None => prefix.append_point(&anchors)?,
    };
    let mut pairs: Vec<(PointId, PointId)> = fixed.iter().map(|&x| (x, x)).collect();
    pairs.push((s, moved));
    let gamma = PartialIsometry::new(pairs)?;

    let mut ids = support.to_vec();
    ids.push(moved);
    ids.sort();
    let carrier = prefix.space().restrict(&ids)?;
    for raise in [true, false] {
        let mut tables = BTreeMap::new();
        for r in sig.rels() {
            let anchors: Vec<_> = u.constraints().iter().filter(|c| c.rel == r.name).collect();
            let mut t = Table::new();
            for x in tuples(&ids, r.arity) {
                let val = if anchors.is_empty() {
                    Rat01::zero()
                } else {
                    let reach = anchors.iter().map(|c| {
                        let centre = (c.lo.value() + c.hi.value()) / ratio(2, 1);
                        let slope = &r.modulus * carrier.tuple_d(&x, &c.tuple).value();
                        if raise {
                            centre + slope
                        } else {
                            centre - slope
                        }
                    });
                    let v = if raise { reach.min() } else { reach.max() };
                    Rat01::clamp(v.expect("nonempty"))
                };
                t.insert(x, val);
            }
            tables.insert(r.name.clone(), t);
        }
        let m = FinStructure::new(sig.clone(), carrier.clone(), tables)?;
        let terms = invariance_terms(v, u, &m, &gamma)?;
        if !terms.holds() {
            return Ok(Some(InvWitness { gamma, structure: m, terms }));
        }
    }
    Ok(None)
}
