use urysohn_core::homog::approx_homog_test;
use urysohn_core::rat::{ratio, Rat01};

use crate::common::prefix;
use crate::Outcome;

const POINTS: usize = 12;
const STEPS: usize = 3;

pub fn run() -> Outcome {
    let p = prefix(POINTS);
    let eps = Rat01::of(1, 2);
    let rep = approx_homog_test(&p, 2, &eps, 4, STEPS).map_err(|e| e.to_string())?;
    if rep.pairs == 0 {
        return Err("no tuple pairs enumerated".into());
    }
    if !rep.all_certified() {
        return Err(rep.render());
    }
    let cap = eps.value() / ratio(8, 1);
    if rep.bound.value() > &cap || rep.max_drift > rep.bound {
        return Err(format!("drift {} bound {} against eps/8 = {cap}", rep.max_drift, rep.bound));
    }
    Ok(format!(
        "{} of {} pairs certified over {POINTS} points, max drift {} <= {} <= eps/8",
        rep.certified, rep.pairs, rep.max_drift, rep.bound
    ))
}
