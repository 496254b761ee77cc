use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{eval, tuples, Assignment, FinStructure, Formula};
use crate::metric::text::format_id_list;
use crate::metric::PointId;
use crate::rat::Rat01;

/// Variable bound to coordinate `j` (0-based) of a tuple.
pub fn coord_var(j: usize) -> String {
    format!("x{}", j + 1)
}

fn assign(t: &[PointId]) -> Assignment {
    t.iter().enumerate().map(|(j, &p)| (coord_var(j), p)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScReport {
    Pass,
    /// An `n`-tuple meeting no condition of the family.
    Uncovered {
        a: Vec<PointId>,
    },
    /// No `b` near `a` zeroes the formulas of `Δ_i` that `c` zeroes.
    NoWitness {
        i: usize,
        a: Vec<PointId>,
        c: Vec<PointId>,
        delta: Vec<Formula>,
    },
}

impl ScReport {
    pub fn passed(&self) -> bool {
        matches!(self, ScReport::Pass)
    }
}

impl fmt::Display for ScReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScReport::Pass => write!(f, "pass"),
            ScReport::Uncovered { a } => write!(f, "fail uncovered a={}", format_id_list(a)),
            ScReport::NoWitness { i, a, c, delta } => {
                let ds: Vec<String> = delta.iter().map(|d| d.to_string()).collect();
                write!(
                    f,
                    "fail witness i={i} a={} c={} delta=[{}]",
                    format_id_list(a),
                    format_id_list(c),
                    ds.join("; ")
                )
            }
        }
    }
}

/// Finite check of the two clauses defining the class `SC` on the carrier of
/// `m`, formulas using the variables `x1, x2, ...`.
///
/// Clause 1: every `n`-tuple satisfies some `φ_i ≤ δ_i`. Clause 2, read
/// literally: whenever `a` and the first `n` coordinates of an
/// `(n+1)`-tuple `c` both satisfy `φ_i ≤ δ_i`, some `(n+1)`-tuple `b` with
/// `max_{j≤n} d(a_j, b_j) ≤ ε` zeroes every formula of `Δ_i` that `c` zeroes.
pub fn sc_check(
    m: &FinStructure,
    n: usize,
    eps: &Rat01,
    family: &[(Formula, Rat01)],
    deltas: &BTreeMap<usize, Vec<Formula>>,
) -> Result<ScReport> {
    if n == 0 {
        return Err(Error::usage("tuple length must be positive"));
    }
    for &i in deltas.keys() {
        if i >= family.len() {
            return Err(Error::usage(format!("Δ given for condition {i}, family has {}", family.len())));
        }
    }
    let ids = m.carrier().ids().to_vec();
    let short = tuples(&ids, n);
    let long = tuples(&ids, n + 1);

    // holds[i][k]: the k-th n-tuple satisfies condition i
    let mut holds = vec![Vec::with_capacity(short.len()); family.len()];
    for (i, (phi, delta)) in family.iter().enumerate() {
        for t in &short {
            holds[i].push(eval(m, phi, &assign(t))? <= *delta);
        }
    }
    for (k, t) in short.iter().enumerate() {
        if !holds.iter().any(|h| h[k]) {
            return Ok(ScReport::Uncovered { a: t.clone() });
        }
    }

    let index: BTreeMap<&[PointId], usize> = short.iter().enumerate().map(|(k, t)| (t.as_slice(), k)).collect();
    for (i, ds) in deltas {
        if ds.is_empty() {
            continue;
        }
        // zeros[k][f]: formula f of Δ_i vanishes at the k-th (n+1)-tuple
        let mut zeros = Vec::with_capacity(long.len());
        for t in &long {
            let asg = assign(t);
            let row = ds.iter().map(|f| eval(m, f, &asg).map(|v| v.is_zero())).collect::<Result<Vec<bool>>>()?;
            zeros.push(row);
        }
        for (ka, a) in short.iter().enumerate() {
            if !holds[*i][ka] {
                continue;
            }
            for (kc, c) in long.iter().enumerate() {
                if !holds[*i][index[&c[..n]]] {
                    continue;
                }
                let need = &zeros[kc];
                let found = long.iter().enumerate().any(|(kb, b)| {
                    (0..n).all(|j| m.carrier().d(a[j], b[j]) <= eps)
                        && need.iter().zip(&zeros[kb]).all(|(&nd, &z)| !nd || z)
                });
                if !found {
                    let delta = ds.iter().zip(need).filter(|(_, &z)| z).map(|(f, _)| f.clone()).collect();
                    return Ok(ScReport::NoWitness { i: *i, a: a.clone(), c: c.clone(), delta });
                }
            }
        }
    }
    Ok(ScReport::Pass)
}
