#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use urysohn_core::grey::{CmpOp, GreyCosetCode};
use urysohn_core::logic::{tuples, Assignment, FinStructure, Formula, RelSymbol, Signature, Table, Term};
use urysohn_core::metric::{extend_partial_isometry, qu_extend, FinMetric, PartialIsometry, PointId, QUPrefix};
use urysohn_core::rat::{ratio, Connective, Rat01, Rational};
use urysohn_core::space::{ConeConstraint, StructureCone};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const VARS: [&str; 3] = ["x", "y", "z"];

pub fn small_rat(rng: &mut Rng64, den: i64) -> Rat01 {
    Rat01::of(rng.gen_range(0..=den), den)
}

/// A random metric: a subset of a canonical prefix.
pub fn random_carrier(rng: &mut Rng64, prefix: &QUPrefix, min: usize, max: usize) -> FinMetric {
    let mut ids: Vec<PointId> = (0..prefix.len()).collect();
    ids.shuffle(rng);
    let n = rng.gen_range(min..=max.min(prefix.len()));
    let mut ids = ids[..n].to_vec();
    ids.sort();
    prefix.space().restrict(&ids).unwrap()
}

pub fn random_signature(rng: &mut Rng64) -> Signature {
    let moduli = [ratio(1, 2), ratio(1, 1), ratio(2, 1)];
    Signature::new(vec![
        RelSymbol::new("P", 1, moduli.choose(rng).unwrap().clone()),
        RelSymbol::new("R", 2, moduli.choose(rng).unwrap().clone()),
    ])
    .unwrap()
}

/// Random tables regularised to respect the declared moduli by taking the
/// lower Lipschitz envelope of random values.
pub fn random_structure(rng: &mut Rng64, sig: &Signature, carrier: &FinMetric) -> FinStructure {
    let mut tables = BTreeMap::new();
    for r in sig.rels() {
        let ts = tuples(carrier.ids(), r.arity);
        let raw: Vec<Rat01> = ts.iter().map(|_| small_rat(rng, 12)).collect();
        let mut table = Table::new();
        for x in &ts {
            let v = ts
                .iter()
                .zip(&raw)
                .map(|(s, v)| Rat01::clamp(v.value() + &r.modulus * carrier.tuple_d(x, s).value()))
                .min()
                .unwrap();
            table.insert(x.clone(), v);
        }
        tables.insert(r.name.clone(), table);
    }
    FinStructure::new(sig.clone(), carrier.clone(), tables).unwrap()
}

fn random_term(rng: &mut Rng64, carrier: &FinMetric) -> Term {
    if rng.gen_bool(0.8) {
        Term::Var(VARS.choose(rng).unwrap().to_string())
    } else {
        Term::Point(*carrier.ids().choose(rng).unwrap())
    }
}

pub fn random_formula(rng: &mut Rng64, carrier: &FinMetric, depth: usize) -> Formula {
    let leaf = depth <= 1 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..4) {
            0 => Formula::Const(small_rat(rng, 8)),
            1 => Formula::D(random_term(rng, carrier), random_term(rng, carrier)),
            2 => Formula::Atom("P".into(), vec![random_term(rng, carrier)]),
            _ => Formula::Atom("R".into(), vec![random_term(rng, carrier), random_term(rng, carrier)]),
        };
    }
    let sub = |rng: &mut Rng64| random_formula(rng, carrier, depth - 1);
    match rng.gen_range(0..10) {
        0 => Formula::neg(sub(rng)),
        1 => Formula::half(sub(rng)),
        2 => Formula::tmul(ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)), sub(rng)),
        3 => Formula::binary(Connective::TSub, sub(rng), sub(rng)),
        4 => Formula::binary(Connective::TAdd, sub(rng), sub(rng)),
        5 => Formula::binary(Connective::Min, sub(rng), sub(rng)),
        6 => Formula::binary(Connective::Max, sub(rng), sub(rng)),
        7 => Formula::binary(Connective::AbsDiff, sub(rng), sub(rng)),
        8 => Formula::sup(VARS.choose(rng).unwrap(), sub(rng)),
        _ => Formula::inf(VARS.choose(rng).unwrap(), sub(rng)),
    }
}

pub fn random_assignment(rng: &mut Rng64, carrier: &FinMetric) -> Assignment {
    VARS.iter().map(|v| (v.to_string(), *carrier.ids().choose(rng).unwrap())).collect()
}

/// Max-metric distance between two assignments on the free variables of `f`.
pub fn assignment_distance(carrier: &FinMetric, f: &Formula, a: &Assignment, b: &Assignment) -> Rational {
    f.free_vars().iter().map(|v| carrier.d(a[v], b[v]).value().clone()).max().unwrap_or_else(|| ratio(0, 1))
}

pub fn prefix(points: usize) -> QUPrefix {
    qu_extend(&QUPrefix::new(), points)
}

/// A random isometry of the prefix restricted to `sources`, growing the
/// prefix when needed. One random pair is fixed first.
pub fn random_isometry(rng: &mut Rng64, prefix: &QUPrefix, sources: &[PointId]) -> (QUPrefix, PartialIsometry) {
    let a = rng.gen_range(0..prefix.len());
    let b = rng.gen_range(0..prefix.len());
    let mut order = sources.to_vec();
    order.shuffle(rng);
    extend_partial_isometry(prefix, &PartialIsometry::new(vec![(a, b)]).unwrap(), &order).unwrap()
}

pub fn random_interval(rng: &mut Rng64) -> (Rat01, Rat01, bool, bool) {
    loop {
        let (lo, hi) = (small_rat(rng, 8), small_rat(rng, 8));
        if lo < hi {
            return (lo, hi, rng.gen(), rng.gen());
        }
    }
}

pub fn random_cone(rng: &mut Rng64, sig: &Signature, carrier: &FinMetric, max: usize) -> StructureCone {
    let n = rng.gen_range(0..=max);
    let cons = (0..n)
        .map(|_| {
            let r = sig.rels().choose(rng).unwrap();
            let t: Vec<PointId> = (0..r.arity).map(|_| *carrier.ids().choose(rng).unwrap()).collect();
            let (lo, hi, lc, hc) = random_interval(rng);
            ConeConstraint::new(&r.name, t, lo, hi, lc, hc).unwrap()
        })
        .collect();
    StructureCone::new(cons)
}

/// A code whose `s` and `s'` have the same diagram in `space`, found by
/// rejection.
pub fn random_code(rng: &mut Rng64, space: &FinMetric, len: usize, ops: &[CmpOp]) -> GreyCosetCode {
    loop {
        let pick = |rng: &mut Rng64| -> Vec<PointId> { (0..len).map(|_| *space.ids().choose(rng).unwrap()).collect() };
        let s = pick(rng);
        let sp = if rng.gen_bool(0.3) { s.clone() } else { pick(rng) };
        let q = ratio(rng.gen_range(1..=4), rng.gen_range(1..=2));
        let c = GreyCosetCode::new(q, s, sp, small_rat(rng, 4), *ops.choose(rng).unwrap()).unwrap();
        if c.validate(space).is_ok() {
            return c;
        }
    }
}
