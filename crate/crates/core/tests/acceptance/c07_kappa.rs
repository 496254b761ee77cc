use urysohn_core::grey::{kappa, sat, OraclePoint};
use urysohn_core::rat::pow2_neg;
use urysohn_core::space::cone_diam;

use crate::common::*;
use crate::Outcome;

const POINTS: usize = 100;
const MAX_N: u32 = 10;

pub fn run() -> Outcome {
    let mut r = rng(7);
    let p = prefix(4);
    let e = |x: urysohn_core::Error| x.to_string();
    for i in 0..POINTS {
        let sig = random_signature(&mut r);
        let seed_carrier = random_carrier(&mut r, &p, 1, 3);
        let s = random_structure(&mut r, &sig, &seed_carrier);
        let mut x = OraclePoint::new(s, p.clone()).map_err(e)?;
        for n in 0..=MAX_N {
            let k = kappa(&mut x, n).map_err(e)?;
            if !sat(&mut x, &k).map_err(e)? {
                return Err(format!("point {i}: not in kappa({n})"));
            }
            let d = cone_diam(&k, &sig).map_err(e)?;
            if d.value() > &pow2_neg(n) {
                return Err(format!("point {i}: kappa({n}) has diameter {d}"));
            }
        }
    }
    Ok(format!("{POINTS} oracle points, n = 0..={MAX_N}: all satisfied, all diameters within 2^-n"))
}
