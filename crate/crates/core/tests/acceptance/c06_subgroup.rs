use rand::Rng;
use urysohn_core::grey::{coset_value, CmpOp, GreyCosetCode};
use urysohn_core::metric::{extend_partial_isometry, PartialIsometry, PointId};
use urysohn_core::rat::{ratio, Rat01};

use crate::common::*;
use crate::Outcome;

const SAMPLES: usize = 1000;

pub fn run() -> Outcome {
    let mut r = rng(6);
    let p = prefix(8);
    let e = |x: urysohn_core::Error| x.to_string();
    for i in 0..SAMPLES {
        let len = r.gen_range(1..=3);
        let t: Vec<PointId> = (0..len).map(|_| r.gen_range(0..p.len())).collect();
        let h = GreyCosetCode::subgroup(ratio(r.gen_range(1..=4), 2), t.clone(), Rat01::of(1, 2), CmpOp::Lt).unwrap();

        let id = PartialIsometry::identity(&t);
        if !coset_value(&h, &id, p.space()).map_err(e)?.is_zero() {
            return Err(format!("sample {i}: H(1) != 0 for {h}"));
        }

        // g on t; k an inverse of g defined on t; then H(k^-1) against H(k)
        let (p1, g) = random_isometry(&mut r, &p, &t);
        let (p2, k) = extend_partial_isometry(&p1, &g.inverse(), &t).map_err(e)?;
        let (hk, hkinv) =
            (coset_value(&h, &k, p2.space()).map_err(e)?, coset_value(&h, &k.inverse(), p2.space()).map_err(e)?);
        if hk != hkinv {
            return Err(format!("sample {i}: H(g) = {hk} but H(g^-1) = {hkinv} for {h}"));
        }

        let mut onto: Vec<PointId> = t.iter().map(|&x| g.get(x).unwrap()).collect();
        onto.extend(&t);
        let (p3, g2) = random_isometry(&mut r, &p1, &onto);
        let lhs = coset_value(&h, &g2.compose(&g), p3.space()).map_err(e)?;
        let rhs = coset_value(&h, &g, p3.space()).map_err(e)?.tadd(&coset_value(&h, &g2, p3.space()).map_err(e)?);
        if lhs > rhs {
            return Err(format!("sample {i}: H(g'g) = {lhs} > {rhs} for {h}"));
        }
    }
    Ok(format!("{SAMPLES} samples, zero violations"))
}
