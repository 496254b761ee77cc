//! Condition files for the `SC` checker: `cond <δ> <formula>` lines give
//! the family in order, `delta <i> <formula>` lines add to `Δ_i`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::Result;
use crate::logic::{parse, Formula, Signature};
use crate::metric::text::{err_at, parse_rat, tokenize};
use crate::rat::Rat01;

pub type ScSpec = (Vec<(Formula, Rat01)>, BTreeMap<usize, Vec<Formula>>);

pub fn read_sc_spec(text: &str, sig: &Signature) -> Result<ScSpec> {
    let mut family = Vec::new();
    let mut deltas: BTreeMap<usize, Vec<Formula>> = BTreeMap::new();
    for (n, toks) in tokenize(text) {
        if toks.len() < 3 {
            return Err(err_at(n, "expected `cond <δ> <formula>` or `delta <i> <formula>`"));
        }
        let f = parse(&toks[2..].join(" "), sig).map_err(|e| err_at(n, e.to_string()))?;
        match toks[0].as_str() {
            "cond" => family.push((f, parse_rat(n, &toks[1])?)),
            "delta" => {
                let i: usize = toks[1].parse().map_err(|_| err_at(n, "bad condition index"))?;
                deltas.entry(i).or_default().push(f);
            }
            other => return Err(err_at(n, format!("unexpected directive `{other}`"))),
        }
    }
    Ok((family, deltas))
}

pub fn sc_spec_to_string(family: &[(Formula, Rat01)], deltas: &BTreeMap<usize, Vec<Formula>>) -> String {
    let mut s = String::new();
    for (f, d) in family {
        writeln!(s, "cond {d} {f}").unwrap();
    }
    for (i, fs) in deltas {
        for f in fs {
            writeln!(s, "delta {i} {f}").unwrap();
        }
    }
    s
}
