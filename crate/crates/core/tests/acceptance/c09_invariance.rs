use rand::Rng;
use urysohn_core::grey::{inv_check, invariance_terms, verify_inv_witness, CmpOp, GreyCosetCode, InvVerdict};
use urysohn_core::metric::{extend_partial_isometry, PartialIsometry, PointId};
use urysohn_core::rat::{ratio, Rat01};

use crate::common::*;
use crate::Outcome;

const INSTANCES: usize = 60;
const TRIALS: usize = 1000;

pub fn run() -> Outcome {
    let mut r = rng(9);
    let p = prefix(6);
    let e = |x: urysohn_core::Error| x.to_string();
    let (mut sound, mut falsified, mut unknown) = (0, 0, 0);
    for i in 0..INSTANCES {
        let sig = random_signature(&mut r);
        let t: Vec<PointId> = (0..r.gen_range(1..=3)).map(|_| r.gen_range(0..p.len())).collect();
        let carrier = if r.gen_bool(0.6) {
            let mut ids = t.clone();
            ids.sort();
            ids.dedup();
            p.space().restrict(&ids).unwrap()
        } else {
            p.space().clone()
        };
        let u = random_cone(&mut r, &sig, &carrier, 3);
        let v = GreyCosetCode::subgroup(ratio(r.gen_range(1..=4), 1), t.clone(), Rat01::of(1, 2), CmpOp::Lt).unwrap();
        match inv_check(&v, &u, &sig, &p).map_err(e)? {
            InvVerdict::Sound => {
                sound += 1;
                let mut support: Vec<PointId> =
                    u.constraints().iter().flat_map(|c| c.tuple.clone()).chain(t.clone()).collect();
                support.sort();
                support.dedup();
                for trial in 0..TRIALS {
                    // half the trials start from the identity on t, so H(g) stays small
                    let (q, g) = if trial % 2 == 0 {
                        random_isometry(&mut r, &p, &support)
                    } else {
                        let mut order = support.clone();
                        rand::seq::SliceRandom::shuffle(&mut order[..], &mut r);
                        extend_partial_isometry(&p, &PartialIsometry::identity(&t), &order).map_err(e)?
                    };
                    let mut ids: Vec<PointId> = g.domain().chain(g.image()).collect();
                    ids.sort();
                    ids.dedup();
                    let m = random_structure(&mut r, &sig, &q.space().restrict(&ids).unwrap());
                    let terms = invariance_terms(&v, &u, &m, &g).map_err(e)?;
                    if !terms.holds() {
                        return Err(format!("instance {i} trial {trial}: sound verdict broken, {terms:?}"));
                    }
                }
            }
            InvVerdict::Falsified(w) => {
                falsified += 1;
                if !verify_inv_witness(&v, &u, &w).map_err(e)? {
                    return Err(format!("instance {i}: witness does not verify"));
                }
            }
            InvVerdict::Unknown => unknown += 1,
        }
    }
    if sound == 0 || falsified == 0 {
        return Err(format!("corpus too one-sided: {sound} sound, {falsified} falsified"));
    }
    Ok(format!(
        "{INSTANCES} instances: {sound} sound x {TRIALS} trials held, {falsified} witnesses re-verified, {unknown} unknown"
    ))
}
