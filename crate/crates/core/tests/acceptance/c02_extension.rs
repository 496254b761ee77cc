use std::collections::HashSet;

use urysohn_core::metric::{PointId, QUPrefix};
use urysohn_core::rat::Rat01;

use crate::Outcome;

const STAGE: u32 = 3;
const DENOM: i64 = 4;
const SUBSET: usize = 3;

fn grid() -> Vec<Rat01> {
    let mut g: Vec<Rat01> = (1..=DENOM).flat_map(|d| (1..=d).map(move |n| Rat01::of(n, d))).collect();
    g.sort();
    g.dedup();
    g
}

fn subsets(n: usize, k: usize) -> Vec<Vec<PointId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for last in (k - 1)..n {
        for mut s in subsets(last, k - 1) {
            s.push(last);
            out.push(s);
        }
    }
    out
}

/// Triangle inequalities between the new point and each pair of anchors.
fn admissible(p: &QUPrefix, s: &[PointId], r: &[&Rat01]) -> bool {
    (0..s.len()).all(|i| {
        (0..i).all(|j| {
            let d = p.d(s[i], s[j]);
            &r[i].absdiff(r[j]) <= d && d.value() <= &(r[i].value() + r[j].value())
        })
    })
}

pub fn run() -> Outcome {
    let mut p = QUPrefix::new();
    p.run_through_stage(STAGE);
    let base = p.stage_starts()[STAGE as usize - 1];
    let g = grid();
    let (mut types, mut misses) = (0usize, Vec::new());
    for k in 1..=SUBSET {
        for s in subsets(base, k) {
            let seen: HashSet<Vec<&Rat01>> =
                (0..p.len()).filter(|x| !s.contains(x)).map(|x| s.iter().map(|&a| p.d(x, a)).collect()).collect();
            let mut idx = vec![0usize; k];
            loop {
                let r: Vec<&Rat01> = idx.iter().map(|&i| &g[i]).collect();
                if admissible(&p, &s, &r) {
                    types += 1;
                    if !seen.contains(&r) {
                        misses.push((s.clone(), r.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
                    }
                }
                let Some(pos) = idx.iter().position(|&i| i + 1 < g.len()) else { break };
                idx[pos] += 1;
                idx[..pos].iter_mut().for_each(|i| *i = 0);
            }
        }
    }
    if let Some((s, r)) = misses.first() {
        return Err(format!("{} of {types} types missing, first over {s:?} at {r:?}", misses.len()));
    }
    Ok(format!(
        "{types} admissible types over subsets of the first {base} points, {} points total, zero misses",
        p.len()
    ))
}
