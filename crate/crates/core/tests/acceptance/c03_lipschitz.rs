use urysohn_core::logic::{eval, modulus};

use crate::common::*;
use crate::Outcome;

const TRIALS: usize = 10_000;

pub fn run() -> Outcome {
    let mut r = rng(3);
    let base = prefix(8);
    let mut tight = 0;
    for trial in 0..TRIALS {
        let carrier = random_carrier(&mut r, &base, 2, 5);
        let sig = random_signature(&mut r);
        let m = random_structure(&mut r, &sig, &carrier);
        let f = random_formula(&mut r, &carrier, 5);
        let (a, b) = (random_assignment(&mut r, &carrier), random_assignment(&mut r, &carrier));
        let gap = eval(&m, &f, &a).map_err(|e| e.to_string())?.absdiff(&eval(&m, &f, &b).map_err(|e| e.to_string())?);
        let bound = modulus(&f, &sig).map_err(|e| e.to_string())? * assignment_distance(&carrier, &f, &a, &b);
        if gap.value() > &bound {
            return Err(format!("trial {trial}: |{gap}| > {bound} for {f}"));
        }
        if !gap.is_zero() && gap.value() == &bound {
            tight += 1;
        }
    }
    Ok(format!("{TRIALS} trials, zero violations ({tight} tight)"))
}
