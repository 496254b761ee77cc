//! Continuous first-order logic over finite metric structures.

mod formula;
mod interval;
pub mod text;

use std::collections::{BTreeMap, HashMap};

use num_traits::Signed;

pub use formula::{is_keyword, modulus, parse, var, Formula, Term};
pub use interval::eval_interval;

use crate::error::{Error, Result};
use crate::metric::{FinMetric, PointId, QUPrefix};
use crate::rat::{format_rational, Connective, Rat01, Rational};

/// A relation symbol with its inverse modulus coefficient `n`, meaning
/// `|R(a) - R(b)| <= n * d(a, b)` for the max metric on tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelSymbol {
    pub name: String,
    pub arity: usize,
    pub modulus: Rational,
}

impl RelSymbol {
    pub fn new(name: &str, arity: usize, modulus: Rational) -> Self {
        RelSymbol { name: name.to_owned(), arity, modulus }
    }
}

/// A relational signature. The metric symbol `d` is built in and never listed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    rels: Vec<RelSymbol>,
}

impl Signature {
    pub fn new(rels: Vec<RelSymbol>) -> Result<Self> {
        for (i, r) in rels.iter().enumerate() {
            let ok_name = r.name.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
                && r.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok_name || is_keyword(&r.name) {
                return Err(Error::usage(format!("invalid relation name `{}`", r.name)));
            }
            if rels[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::usage(format!("relation `{}` declared twice", r.name)));
            }
            if r.arity == 0 {
                return Err(Error::usage(format!("relation `{}` needs positive arity", r.name)));
            }
            if !r.modulus.is_positive() {
                return Err(Error::usage(format!("relation `{}` needs a positive modulus", r.name)));
            }
        }
        Ok(Signature { rels })
    }

    pub fn rels(&self) -> &[RelSymbol] {
        &self.rels
    }

    pub fn get(&self, name: &str) -> Option<&RelSymbol> {
        self.rels.iter().find(|r| r.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.rels.iter().position(|r| r.name == name)
    }
}

/// All tuples of length `arity` over `ids`, in lexicographic order of positions.
pub fn tuples(ids: &[PointId], arity: usize) -> Vec<Vec<PointId>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                ids.iter().map(move |&p| {
                    let mut t = t.clone();
                    t.push(p);
                    t
                })
            })
            .collect();
    }
    out
}

pub type Table = HashMap<Vec<PointId>, Rat01>;

/// A metric structure on a finite carrier with total relation tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinStructure {
    sig: Signature,
    carrier: FinMetric,
    tables: BTreeMap<String, Table>,
}

impl FinStructure {
    /// Checks that every table is total on the carrier and respects its
    /// declared modulus.
    pub fn new(sig: Signature, carrier: FinMetric, tables: BTreeMap<String, Table>) -> Result<Self> {
        let s = FinStructure { sig, carrier, tables };
        s.check_shape()?;
        s.audit_modulus()?;
        Ok(s)
    }

    fn check_shape(&self) -> Result<()> {
        for name in self.tables.keys() {
            if self.sig.get(name).is_none() {
                return Err(Error::usage(format!("table for undeclared relation `{name}`")));
            }
        }
        for r in self.sig.rels() {
            let table =
                self.tables.get(&r.name).ok_or_else(|| Error::usage(format!("no table for relation `{}`", r.name)))?;
            let expected = self.carrier.len().pow(r.arity as u32);
            for t in table.keys() {
                if t.len() != r.arity || t.iter().any(|&p| !self.carrier.contains(p)) {
                    return Err(Error::usage(format!("bad tuple {t:?} for relation `{}`", r.name)));
                }
            }
            if table.len() != expected {
                return Err(Error::usage(format!("table for `{}` has {} of {expected} entries", r.name, table.len())));
            }
        }
        Ok(())
    }

    /// Exhaustive check of `|R(a) - R(b)| <= n * d(a, b)` over all tuple pairs.
    pub fn audit_modulus(&self) -> Result<()> {
        for r in self.sig.rels() {
            let entries: Vec<_> = self.tables[&r.name].iter().collect();
            for (i, (a, va)) in entries.iter().enumerate() {
                for (b, vb) in &entries[i + 1..] {
                    let gap = va.absdiff(vb);
                    let allowed = &r.modulus * self.carrier.tuple_d(a, b).value();
                    if gap.value() > &allowed {
                        return Err(Error::precondition(format!(
                            "{}{a:?} = {va} and {}{b:?} = {vb} violate modulus {}",
                            r.name,
                            r.name,
                            format_rational(&r.modulus)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn carrier(&self) -> &FinMetric {
        &self.carrier
    }

    pub fn table(&self, rel: &str) -> Option<&Table> {
        self.tables.get(rel)
    }

    pub fn value(&self, rel: &str, tuple: &[PointId]) -> Option<&Rat01> {
        self.tables.get(rel)?.get(tuple)
    }
}

pub type Assignment = BTreeMap<String, PointId>;

fn check_closed(m: &FinStructure, f: &Formula, asg: &Assignment) -> Result<()> {
    f.check(&m.sig)?;
    for v in f.free_vars() {
        match asg.get(&v) {
            None => return Err(Error::precondition(format!("free variable `{v}` is unassigned"))),
            Some(p) if !m.carrier.contains(*p) => {
                return Err(Error::precondition(format!("`{v}` is assigned to {p}, outside the carrier")))
            }
            Some(_) => {}
        }
    }
    if let Some(p) = f.constants().into_iter().find(|p| !m.carrier.contains(*p)) {
        return Err(Error::precondition(format!("constant {p} is outside the carrier")));
    }
    Ok(())
}

pub(crate) struct Env<'a> {
    asg: &'a Assignment,
    bound: Vec<(&'a str, PointId)>,
}

impl<'a> Env<'a> {
    pub(crate) fn new(asg: &'a Assignment) -> Self {
        Env { asg, bound: Vec::new() }
    }

    pub(crate) fn resolve(&self, t: &Term) -> PointId {
        match t {
            Term::Point(p) => *p,
            Term::Var(v) => self
                .bound
                .iter()
                .rev()
                .find(|b| b.0 == v)
                .map(|b| b.1)
                .or_else(|| self.asg.get(v).copied())
                .expect("checked closed"),
        }
    }

    pub(crate) fn push(&mut self, x: &'a str, p: PointId) {
        self.bound.push((x, p));
    }

    pub(crate) fn pop(&mut self) {
        self.bound.pop();
    }
}

pub(crate) fn atomic_value(m: &FinStructure, f: &Formula, env: &Env<'_>) -> Rat01 {
    match f {
        Formula::Const(v) => v.clone(),
        Formula::D(a, b) => m.carrier.d(env.resolve(a), env.resolve(b)).clone(),
        Formula::Atom(r, ts) => {
            let t: Vec<PointId> = ts.iter().map(|t| env.resolve(t)).collect();
            m.tables[r][&t].clone()
        }
        _ => unreachable!("not atomic"),
    }
}

fn eval_in<'a>(m: &FinStructure, f: &'a Formula, env: &mut Env<'a>) -> Rat01 {
    match f {
        Formula::Const(_) | Formula::D(..) | Formula::Atom(..) => atomic_value(m, f, env),
        Formula::Conn(kind, args) => {
            let vals: Vec<Rat01> = args.iter().map(|a| eval_in(m, a, env)).collect();
            apply(kind, &vals)
        }
        Formula::Sup(x, body) | Formula::Inf(x, body) => {
            let is_sup = matches!(f, Formula::Sup(..));
            let mut best: Option<Rat01> = None;
            for &p in m.carrier.ids() {
                env.push(x, p);
                let v = eval_in(m, body, env);
                env.pop();
                best = Some(match best {
                    None => v,
                    Some(b) if is_sup => b.max_with(&v),
                    Some(b) => b.min_with(&v),
                });
            }
            // empty carrier: sup of nothing is 0, inf of nothing is 1
            best.unwrap_or_else(|| if is_sup { Rat01::zero() } else { Rat01::one() })
        }
    }
}

pub(crate) fn apply(kind: &Connective, vals: &[Rat01]) -> Rat01 {
    crate::rat::connective_eval(kind, vals).expect("checked formula")
}

/// Exact value of `f` under `asg`, quantifiers ranging over the carrier.
pub fn eval(m: &FinStructure, f: &Formula, asg: &Assignment) -> Result<Rat01> {
    check_closed(m, f, asg)?;
    Ok(eval_in(m, f, &mut Env::new(asg)))
}

/// McShane extension of the seed tables to `target`:
/// `R(x) = min(1, min_s R(s) + n * d(x, s))` over seed tuples `s`.
pub fn lipschitz_extend_metric(seed: &FinStructure, target: &FinMetric) -> Result<FinStructure> {
    for &a in seed.carrier.ids() {
        if !target.contains(a) {
            return Err(Error::precondition(format!("seed point {a} is not in the target")));
        }
        for &b in seed.carrier.ids() {
            if seed.carrier.d(a, b) != target.d(a, b) {
                return Err(Error::precondition(format!("seed and target disagree on d({a},{b})")));
            }
        }
    }
    seed.audit_modulus()?;
    let mut tables = BTreeMap::new();
    for r in seed.sig.rels() {
        let seed_table: Vec<_> = seed.tables[&r.name].iter().collect();
        let mut table = Table::new();
        for x in tuples(target.ids(), r.arity) {
            let v = seed_table
                .iter()
                .map(|(s, v)| Rat01::clamp(v.value() + &r.modulus * target.tuple_d(&x, s).value()))
                .min()
                .unwrap_or_else(Rat01::one);
            table.insert(x, v);
        }
        tables.insert(r.name.clone(), table);
    }
    Ok(FinStructure { sig: seed.sig.clone(), carrier: target.clone(), tables })
}

pub fn lipschitz_extend(seed: &FinStructure, target: &QUPrefix) -> Result<FinStructure> {
    lipschitz_extend_metric(seed, target.space())
}
