use num_traits::ToPrimitive;
use rand::Rng;
use urysohn_core::logic::{FinStructure, RelSymbol, Signature};
use urysohn_core::rat::{pow2_neg, ratio, Rat01};
use urysohn_core::space::{cone_diam, cone_member, delta_seq, ConeConstraint, SeqIndex, StructureCone};

use crate::common::*;
use crate::Outcome;

const PAIRS: usize = 1000;
const DEPTH: u64 = 20;

fn worked_example(sig: &Signature) -> Result<(), String> {
    let seq = SeqIndex::new(sig);
    let cons = (1..=2)
        .map(|i| {
            let (j, t) = seq.entry(i).unwrap();
            ConeConstraint::new(seq.name(j), t, Rat01::zero(), Rat01::of(1, 2), true, true).unwrap()
        })
        .collect();
    let d = cone_diam(&StructureCone::new(cons), sig).map_err(|e| e.to_string())?;
    if d != Rat01::of(5, 8) {
        return Err(format!("two half-width constraints on indices 1, 2 give {d}, want 5/8"));
    }
    let d = cone_diam(&StructureCone::new(Vec::new()), sig).map_err(|e| e.to_string())?;
    if d != Rat01::one() {
        return Err(format!("empty constraint set gives {d}, want 1"));
    }
    Ok(())
}

/// A cone over random enumeration indices whose intervals contain the values
/// of both structures.
fn cone_around(r: &mut Rng64, a: &FinStructure, b: &FinStructure) -> StructureCone {
    let seq = SeqIndex::new(a.signature());
    let k = r.gen_range(0..=8);
    let cons = (0..k)
        .map(|_| {
            let (j, t) = seq.entry(r.gen_range(1..=DEPTH)).unwrap();
            let rel = seq.name(j);
            let (x, y) = (a.value(rel, &t).unwrap(), b.value(rel, &t).unwrap());
            let (s1, s2) = (small_rat(r, 8), small_rat(r, 8));
            let mut lo = Rat01::clamp(x.min(y).value() - s1.value());
            let mut hi = Rat01::clamp(x.max(y).value() + s2.value());
            // intervals must have positive width
            if lo == hi {
                if hi.is_one() {
                    lo = Rat01::clamp(lo.value() - ratio(1, 8));
                } else {
                    hi = Rat01::clamp(hi.value() + ratio(1, 8));
                }
            }
            let lo_closed = s1.is_zero() || lo.is_zero() || r.gen();
            let hi_closed = s2.is_zero() || hi == Rat01::one() || r.gen();
            ConeConstraint::new(rel, t, lo, hi, lo_closed, hi_closed).unwrap()
        })
        .collect();
    StructureCone::new(cons)
}

pub fn run() -> Outcome {
    let mut r = rng(4);
    // two binary relations: the first 20 indices stay inside 4 points
    let carrier = prefix(4).space().clone();
    let sig = Signature::new(vec![RelSymbol::new("R", 2, ratio(1, 1)), RelSymbol::new("S", 2, ratio(2, 1))]).unwrap();
    worked_example(&sig)?;
    let mut max_ratio = 0f64;
    for trial in 0..PAIRS {
        let a = random_structure(&mut r, &sig, &carrier);
        let b = random_structure(&mut r, &sig, &carrier);
        let c = cone_around(&mut r, &a, &b);
        let member = |m| cone_member(m, &c).map_err(|e| e.to_string());
        if !member(&a)? || !member(&b)? {
            return Err(format!("trial {trial}: sampled structure outside its cone"));
        }
        let (lo, hi) = delta_seq(&a, &b, DEPTH).map_err(|e| e.to_string())?;
        let diam = cone_diam(&c, &sig).map_err(|e| e.to_string())?;
        if lo > diam {
            return Err(format!("trial {trial}: delta_seq lower bound {lo} exceeds diameter {diam}"));
        }
        if hi.value() - lo.value() > pow2_neg(DEPTH as u32) {
            return Err(format!("trial {trial}: truncation slack {} over 2^-{DEPTH}", hi.value() - lo.value()));
        }
        max_ratio = max_ratio.max(ratio_f64(&lo) / ratio_f64(&diam));
    }
    Ok(format!("5/8 example exact; {PAIRS} member pairs, lower bound <= diameter (max ratio {max_ratio:.3})"))
}

fn ratio_f64(x: &Rat01) -> f64 {
    x.value().to_f64().unwrap_or(0.0)
}
