use rand::Rng;
use urysohn_core::metric::{feasible, Bound, Feasibility, PartialConstraintSet};
use urysohn_core::rat::Rat01;

use crate::common::rng;
use crate::Outcome;

/// Grid of the oracle: multiples of 1/32. Data lives on the 1/8 grid, so a
/// strict bound leaves at least one grid step of room along any path of at
/// most three edges.
const GRID: u32 = 32;
const SCALE: u32 = GRID / 8;

#[derive(Clone, Copy, Debug)]
enum Entry {
    None,
    Exact(u32),
    Lower(u32, bool),
    Upper(u32, bool),
}

fn full_menu() -> Vec<Entry> {
    let mut m = vec![Entry::None];
    for v in 0..=8 {
        m.extend([
            Entry::Exact(v),
            Entry::Lower(v, false),
            Entry::Lower(v, true),
            Entry::Upper(v, false),
            Entry::Upper(v, true),
        ]);
    }
    m
}

const SMALL_MENU: [Entry; 6] = [
    Entry::None,
    Entry::Exact(2),
    Entry::Exact(5),
    Entry::Upper(3, true),
    Entry::Lower(6, false),
    Entry::Lower(4, true),
];

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

fn build(n: usize, entries: &[Entry]) -> Option<PartialConstraintSet> {
    let mut c = PartialConstraintSet::new((0..n).collect()).unwrap();
    for (&(i, j), e) in pairs(n).iter().zip(entries) {
        let r = |v: u32| Rat01::of(v as i64, 8);
        let ok = match *e {
            Entry::None => Ok(()),
            Entry::Exact(v) => c.set_exact(i, j, r(v)),
            Entry::Lower(v, s) => c.add_lower(i, j, Bound { value: r(v), strict: s }),
            Entry::Upper(v, s) => c.add_upper(i, j, Bound { value: r(v), strict: s }),
        };
        ok.ok()?;
    }
    Some(c)
}

fn allowed(e: Entry) -> u64 {
    (1..=GRID)
        .filter(|&x| match e {
            Entry::None => true,
            Entry::Exact(v) => x == v * SCALE,
            Entry::Lower(v, s) => x > v * SCALE || (!s && x == v * SCALE),
            Entry::Upper(v, s) => x < v * SCALE || (!s && x == v * SCALE),
        })
        .fold(0, |m, x| m | 1 << x)
}

fn between(lo: u32, hi: u32) -> u64 {
    let hi = hi.min(GRID);
    ((1u64 << (hi + 1)) - 1) & !((1u64 << lo) - 1)
}

/// Backtracking search for a metric on the grid meeting every mask.
fn grid_feasible(n: usize, masks: &[u64]) -> bool {
    fn go(ps: &[(usize, usize)], masks: &[u64], d: &mut [[u32; 4]; 4], at: usize) -> bool {
        let Some(&(i, j)) = ps.get(at) else { return true };
        let mut m = masks[at];
        for k in 0..i {
            let (a, b) = (d[k][i], d[k][j]);
            m &= between(a.abs_diff(b), a + b);
        }
        while m != 0 {
            let x = m.trailing_zeros();
            m &= m - 1;
            d[i][j] = x;
            d[j][i] = x;
            if go(ps, masks, d, at + 1) {
                return true;
            }
        }
        false
    }
    go(&pairs(n), masks, &mut [[0; 4]; 4], 0)
}

struct Tally {
    instances: usize,
    feasible: usize,
}

fn check(n: usize, entries: &[Entry], t: &mut Tally) -> Result<(), String> {
    let Some(c) = build(n, entries) else { return Ok(()) };
    let masks: Vec<u64> = entries.iter().map(|&e| allowed(e)).collect();
    let want = grid_feasible(n, &masks);
    let got = feasible(&c).map_err(|e| format!("{entries:?}: {e}"))?;
    t.instances += 1;
    match (&got, want) {
        (Feasibility::Feasible(m), true) => {
            t.feasible += 1;
            if !c.satisfied_by(m) || m.validate(false).is_err() {
                return Err(format!("{entries:?}: witness violates the constraints"));
            }
        }
        (Feasibility::Infeasible(cert), false) => {
            if !cert.verify(&c, false) {
                return Err(format!("{entries:?}: certificate does not verify"));
            }
        }
        _ => return Err(format!("{entries:?}: feasible says {}, grid says {want}", got.is_feasible())),
    }
    Ok(())
}

fn exhaust(n: usize, menu: &[Entry], t: &mut Tally) -> Result<(), String> {
    let k = pairs(n).len();
    let total = menu.len().pow(k as u32);
    for code in 0..total {
        let entries: Vec<Entry> = (0..k).map(|p| menu[code / menu.len().pow(p as u32) % menu.len()]).collect();
        check(n, &entries, t)?;
    }
    Ok(())
}

pub fn run() -> Outcome {
    let full = full_menu();
    let mut t = Tally { instances: 0, feasible: 0 };
    exhaust(2, &full, &mut t)?;
    exhaust(3, &full, &mut t)?;
    exhaust(4, &SMALL_MENU, &mut t)?;
    let mut r = rng(1);
    for _ in 0..20_000 {
        let entries: Vec<Entry> = (0..6).map(|_| full[r.gen_range(0..full.len())]).collect();
        check(4, &entries, &mut t)?;
    }
    Ok(format!("{} instances ({} feasible), zero disagreements", t.instances, t.feasible))
}
