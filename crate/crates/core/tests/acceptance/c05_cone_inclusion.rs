use std::collections::HashMap;

use num_traits::ToPrimitive;
use urysohn_core::grey::{
    cone_contains, cone_subset_witness, formal_inclusion_group, realize_witness, CmpOp, GreyCosetCode,
};
use urysohn_core::metric::{PointId, QUPrefix};
use urysohn_core::rat::{ratio, Rat01};

use crate::common::prefix;
use crate::Outcome;

const OPS: [CmpOp; 4] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
const N: usize = 3;

fn corpus(p: &QUPrefix) -> Vec<GreyCosetCode> {
    let mut tuples: Vec<Vec<PointId>> = (0..N).map(|a| vec![a]).collect();
    tuples.extend((0..N).flat_map(|a| (0..N).map(move |b| vec![a, b])));
    let mut out = Vec::new();
    for s in &tuples {
        for sp in tuples.iter().filter(|t| t.len() == s.len()) {
            for q in [1, 2] {
                for t in 0..=4 {
                    for op in OPS {
                        let c = GreyCosetCode::new(ratio(q, 1), s.clone(), sp.clone(), Rat01::of(t, 4), op).unwrap();
                        if c.validate(p.space()).is_ok() {
                            out.push(c);
                        }
                    }
                }
            }
        }
    }
    out
}

fn units(x: &Rat01, per: i64) -> i64 {
    let v = x.value() * ratio(per, 1);
    assert!(v.is_integer(), "{x} is off the 1/{per} grid");
    v.to_integer().to_i64().unwrap()
}

fn q_of(c: &GreyCosetCode) -> i64 {
    assert!(c.q.is_integer());
    c.q.to_integer().to_i64().unwrap()
}

/// `min(per, q*u) op per*thr`, all in units of `1/per`.
fn holds(c: &GreyCosetCode, u: i64, per: i64) -> bool {
    let v = (q_of(c) * u).min(per);
    let t = units(&c.thr, per);
    match c.op {
        CmpOp::Lt => v < t,
        CmpOp::Le => v <= t,
        CmpOp::Gt => v > t,
        CmpOp::Ge => v >= t,
    }
}

/// Brute force over single-point codes: every pseudometric placement of two
/// images on the 1/32 grid, recorded by the pair of distances that the codes
/// read off.
struct GridOracle {
    /// `seen[(a, b, s1, s2)][u][v]`: images `y_a`, `y_b` exist with
    /// `d(y_a, s1) = u` and `d(y_b, s2) = v`.
    seen: HashMap<(PointId, PointId, PointId, PointId), Vec<[bool; 33]>>,
}

impl GridOracle {
    const PER: i64 = 32;

    fn new(p: &QUPrefix) -> Self {
        let d: Vec<Vec<i64>> = (0..N).map(|a| (0..N).map(|b| units(p.d(a, b), Self::PER)).collect()).collect();
        let g = Self::PER;
        // Katetov functions: distances from one new point to the prefix
        let mut kat = Vec::new();
        for f0 in 0..=g {
            for f1 in 0..=g {
                for f2 in 0..=g {
                    let f = [f0, f1, f2];
                    let ok = (0..N).all(|i| (0..N).all(|j| (f[i] - f[j]).abs() <= d[i][j] && d[i][j] <= f[i] + f[j]));
                    if ok {
                        kat.push(f);
                    }
                }
            }
        }
        let mut seen = HashMap::new();
        for a in 0..N {
            for b in 0..N {
                let mut t = vec![vec![[false; 33]; 33]; N * N];
                let dab = d[a][b];
                for fa in &kat {
                    for fb in &kat {
                        let joint = if a == b {
                            fa == fb
                        } else {
                            (0..N).all(|i| (fa[i] - fb[i]).abs() <= dab && dab <= fa[i] + fb[i])
                        };
                        if joint {
                            for s1 in 0..N {
                                for s2 in 0..N {
                                    t[s1 * N + s2][fa[s1] as usize][fb[s2] as usize] = true;
                                }
                            }
                        }
                    }
                }
                for s1 in 0..N {
                    for s2 in 0..N {
                        seen.insert((a, b, s1, s2), t[s1 * N + s2].clone());
                    }
                }
            }
        }
        GridOracle { seen }
    }

    fn subset(&self, c1: &GreyCosetCode, c2: &GreyCosetCode) -> bool {
        let t = &self.seen[&(c1.s_prime[0], c2.s_prime[0], c1.s[0], c2.s[0])];
        !(0..=Self::PER).any(|u| {
            (0..=Self::PER).any(|v| t[u as usize][v as usize] && holds(c1, u, Self::PER) && !holds(c2, v, Self::PER))
        })
    }
}

/// Exact oracle for any code lengths: a pseudometric on prefix plus images
/// exists iff no lower bound exceeds the upper bounds summed along a simple
/// path between its endpoints. Integers in units of 1/8.
mod cycles {
    use super::*;

    pub const PER: i64 = 8;

    #[derive(Clone, Copy)]
    pub struct B {
        pub v: i64,
        pub strict: bool,
    }

    #[derive(Clone)]
    pub struct Graph {
        pub n: usize,
        pub lo: Vec<Vec<B>>,
        pub hi: Vec<Vec<B>>,
    }

    impl Graph {
        pub fn tighten_lo(&mut self, a: usize, b: usize, x: B) {
            let cur = self.lo[a][b];
            if x.v > cur.v || (x.v == cur.v && x.strict) {
                self.lo[a][b] = x;
                self.lo[b][a] = x;
            }
        }

        pub fn tighten_hi(&mut self, a: usize, b: usize, x: B) {
            let cur = self.hi[a][b];
            if x.v < cur.v || (x.v == cur.v && x.strict) {
                self.hi[a][b] = x;
                self.hi[b][a] = x;
            }
        }

        pub fn feasible(&self) -> bool {
            for a in 0..self.n {
                for b in a + 1..self.n {
                    let mut path = vec![a];
                    if !self.paths_ok(a, b, &mut path, 0, false) {
                        return false;
                    }
                }
            }
            true
        }

        /// Every simple path from the last vertex of `path` to `b` keeps
        /// `lo[a][b]` within the accumulated upper sum.
        fn paths_ok(&self, a: usize, b: usize, path: &mut Vec<usize>, sum: i64, strict: bool) -> bool {
            let at = *path.last().unwrap();
            for next in 0..self.n {
                if path.contains(&next) {
                    continue;
                }
                let h = self.hi[at][next];
                let (s, st) = (sum + h.v, strict || h.strict);
                if next == b {
                    let l = self.lo[a][b];
                    let bad = if l.strict || st { l.v >= s } else { l.v > s };
                    if bad {
                        return false;
                    }
                } else {
                    path.push(next);
                    let ok = self.paths_ok(a, b, path, s, st);
                    path.pop();
                    if !ok {
                        return false;
                    }
                }
            }
            true
        }
    }

    /// One literal: a bound on `d(image of source, parameter)`.
    #[derive(Clone, Copy)]
    pub struct Lit {
        pub src: PointId,
        pub param: PointId,
        pub upper: bool,
        pub b: B,
    }

    /// The code's condition (or its negation) in disjunctive normal form.
    pub fn dnf(c: &GreyCosetCode, negate: bool) -> Vec<Vec<Lit>> {
        let op = match (c.op, negate) {
            (op, false) => op,
            (CmpOp::Lt, true) => CmpOp::Ge,
            (CmpOp::Le, true) => CmpOp::Gt,
            (CmpOp::Gt, true) => CmpOp::Le,
            (CmpOp::Ge, true) => CmpOp::Lt,
        };
        let t = units(&c.thr, PER);
        let q = q_of(c);
        assert_eq!(t % q, 0);
        let lim = t / q;
        let lit = |i: usize, upper, strict| Lit { src: c.s_prime[i], param: c.s[i], upper, b: B { v: lim, strict } };
        let all = |upper, strict| vec![(0..c.s.len()).map(|i| lit(i, upper, strict)).collect()];
        let any = |upper, strict| (0..c.s.len()).map(|i| vec![lit(i, upper, strict)]).collect();
        match op {
            CmpOp::Lt => all(true, true),
            CmpOp::Le if t >= PER => vec![Vec::new()],
            CmpOp::Le => all(true, false),
            CmpOp::Gt if t >= PER => Vec::new(),
            CmpOp::Gt => any(false, true),
            CmpOp::Ge => any(false, false),
        }
    }

    pub fn subset(p: &QUPrefix, c1: &GreyCosetCode, c2: &GreyCosetCode) -> bool {
        let mut srcs: Vec<PointId> = c1.s_prime.iter().chain(&c2.s_prime).copied().collect();
        srcs.sort();
        srcs.dedup();
        let n = N + srcs.len();
        let img = |x: PointId| N + srcs.iter().position(|&y| y == x).unwrap();
        let closed = |v| B { v, strict: false };
        let mut g = Graph { n, lo: vec![vec![closed(0); n]; n], hi: vec![vec![closed(PER); n]; n] };
        for a in 0..N {
            for b in 0..N {
                let v = units(p.d(a, b), PER);
                g.lo[a][b] = closed(v);
                g.hi[a][b] = closed(v);
            }
        }
        for &x in &srcs {
            for &y in &srcs {
                let v = units(p.d(x, y), PER);
                g.lo[img(x)][img(y)] = closed(v);
                g.hi[img(x)][img(y)] = closed(v);
            }
        }
        for t1 in dnf(c1, false) {
            for t2 in dnf(c2, true) {
                let mut h = g.clone();
                for l in t1.iter().chain(&t2) {
                    if l.upper {
                        h.tighten_hi(img(l.src), l.param, l.b);
                    } else {
                        h.tighten_lo(img(l.src), l.param, l.b);
                    }
                }
                if h.feasible() {
                    return false;
                }
            }
        }
        true
    }
}

pub fn run() -> Outcome {
    let p = prefix(N);
    let codes = corpus(&p);
    let grid = GridOracle::new(&p);
    let (mut pairs, mut subsets, mut witnessed, mut formal, mut grid_checked) = (0, 0, 0, 0, 0);
    for c1 in &codes {
        for c2 in &codes {
            pairs += 1;
            let w = cone_subset_witness(c1, c2, p.space()).map_err(|e| format!("{c1} / {c2}: {e}"))?;
            let got = w.is_none();
            let want = cycles::subset(&p, c1, c2);
            if got != want {
                return Err(format!("{c1} inside {c2}: got {got}, cycle oracle says {want}"));
            }
            if c1.s.len() == 1 && c2.s.len() == 1 {
                grid_checked += 1;
                let g = grid.subset(c1, c2);
                if got != g {
                    return Err(format!("{c1} inside {c2}: got {got}, grid oracle says {g}"));
                }
            }
            match w {
                None => subsets += 1,
                Some(w) => {
                    let mut grown = p.clone();
                    let g = realize_witness(&mut grown, &w).map_err(|e| e.to_string())?;
                    let inside = |c| cone_contains(c, &g, grown.space()).map_err(|e| e.to_string());
                    if !inside(c1)? || inside(c2)? {
                        return Err(format!("{c1} / {c2}: witness isometry does not separate the cones"));
                    }
                    witnessed += 1;
                }
            }
            if c1.op == CmpOp::Lt
                && c2.op == CmpOp::Lt
                && formal_inclusion_group(c1, c2, p.space()).map_err(|e| e.to_string())?
            {
                formal += 1;
                if !got {
                    return Err(format!("formal inclusion of {c1} in {c2} without containment"));
                }
            }
        }
    }
    Ok(format!(
        "{} codes, {pairs} pairs ({grid_checked} on the grid oracle): {subsets} inclusions, {witnessed} separations re-verified, {formal} formal inclusions all sound",
        codes.len()
    ))
}
