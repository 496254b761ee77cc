//! Line-oriented text formats for metrics, prefixes, constraint sets and
//! partial isometries.
//!
//! ```text
//! point 0
//! point 1
//! dist 0 1 1/2
//! lower 0 2 3/4 strict
//! ```
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Bound, FinMetric, PartialConstraintSet, PartialIsometry, PointId, QUPrefix, ScheduleCursor};
use crate::error::{Error, Result};
use crate::rat::Rat01;

/// A tokenised line with its 1-based line number.
pub type Line = (usize, Vec<String>);

pub fn tokenize(text: &str) -> Vec<Line> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                None
            } else {
                Some((i + 1, l.split_whitespace().map(str::to_owned).collect()))
            }
        })
        .collect()
}

pub fn err_at(line: usize, msg: impl Into<String>) -> Error {
    Error::parse(line, msg.into())
}

pub fn parse_id(line: usize, tok: &str) -> Result<PointId> {
    tok.parse().map_err(|_| err_at(line, format!("invalid point id `{tok}`")))
}

pub fn parse_rat(line: usize, tok: &str) -> Result<Rat01> {
    tok.parse().map_err(|_| err_at(line, format!("invalid rational `{tok}`")))
}

/// Parses a comma-separated id list; `-` or the empty string is the empty list.
pub fn parse_id_list(line: usize, tok: &str) -> Result<Vec<PointId>> {
    if tok.is_empty() || tok == "-" {
        return Ok(Vec::new());
    }
    tok.split(',').map(|t| parse_id(line, t)).collect()
}

pub fn format_id_list(ids: &[PointId]) -> String {
    if ids.is_empty() {
        "-".to_owned()
    } else {
        ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Consumes `point`/`dist` lines and returns the metric with the lines it
/// did not recognise.
pub fn split_metric(lines: Vec<Line>) -> Result<(FinMetric, Vec<Line>)> {
    let mut ids = Vec::new();
    let mut dists: BTreeMap<(PointId, PointId), Rat01> = BTreeMap::new();
    let mut rest = Vec::new();
    for (n, toks) in lines {
        match toks[0].as_str() {
            "point" => {
                if toks.len() != 2 {
                    return Err(err_at(n, "expected `point <id>`"));
                }
                ids.push(parse_id(n, &toks[1])?);
            }
            "dist" => {
                if toks.len() != 4 {
                    return Err(err_at(n, "expected `dist <id> <id> <p/q>`"));
                }
                let (a, b) = (parse_id(n, &toks[1])?, parse_id(n, &toks[2])?);
                let v = parse_rat(n, &toks[3])?;
                let k = if a <= b { (a, b) } else { (b, a) };
                if let Some(old) = dists.insert(k, v.clone()) {
                    if old != v {
                        return Err(err_at(n, format!("conflicting distances for {a} {b}")));
                    }
                }
            }
            _ => rest.push((n, toks)),
        }
    }
    let pos: BTreeMap<PointId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut matrix = vec![vec![Rat01::zero(); ids.len()]; ids.len()];
    for (&(a, b), v) in &dists {
        let (Some(&i), Some(&j)) = (pos.get(&a), pos.get(&b)) else {
            return Err(Error::parse(0, format!("dist references undeclared point {a} or {b}")));
        };
        if i == j && !v.is_zero() {
            return Err(Error::parse(0, format!("nonzero self-distance for {a}")));
        }
        matrix[i][j] = v.clone();
        matrix[j][i] = v.clone();
    }
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let k = (ids[i].min(ids[j]), ids[i].max(ids[j]));
            if !dists.contains_key(&k) {
                return Err(Error::parse(0, format!("missing distance between {} and {}", ids[i], ids[j])));
            }
        }
    }
    let m = FinMetric::from_matrix(ids, matrix)?;
    Ok((m, rest))
}

pub fn write_metric(out: &mut String, m: &FinMetric) {
    for id in m.ids() {
        writeln!(out, "point {id}").unwrap();
    }
    let ids = m.ids();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            writeln!(out, "dist {} {} {}", ids[i], ids[j], m.d_at(i, j)).unwrap();
        }
    }
}

fn reject_rest(rest: &[Line]) -> Result<()> {
    match rest.first() {
        Some((n, toks)) => Err(err_at(*n, format!("unexpected directive `{}`", toks[0]))),
        None => Ok(()),
    }
}

pub fn read_metric(text: &str) -> Result<FinMetric> {
    let (m, rest) = split_metric(tokenize(text))?;
    reject_rest(&rest)?;
    Ok(m)
}

pub fn metric_to_string(m: &FinMetric) -> String {
    let mut s = String::new();
    write_metric(&mut s, m);
    s
}

/// Prefix format: the metric block plus `stage <s> <start>` lines and one
/// `cursor <stage> <snapshot> <type-index> <subset>` line. A file with only
/// a metric block is accepted as a prefix whose schedule has not started
/// only if it is empty; otherwise the cursor is required.
pub fn read_prefix(text: &str) -> Result<QUPrefix> {
    let (m, rest) = split_metric(tokenize(text))?;
    let mut stages: Vec<(u32, usize)> = Vec::new();
    let mut cursor = None;
    for (n, toks) in rest {
        match toks[0].as_str() {
            "stage" if toks.len() == 3 => {
                let s: u32 = toks[1].parse().map_err(|_| err_at(n, "bad stage number"))?;
                let start: usize = toks[2].parse().map_err(|_| err_at(n, "bad stage start"))?;
                stages.push((s, start));
            }
            "cursor" if toks.len() == 5 => {
                let stage: u32 = toks[1].parse().map_err(|_| err_at(n, "bad cursor stage"))?;
                let snapshot: usize = toks[2].parse().map_err(|_| err_at(n, "bad cursor snapshot"))?;
                let ty: u64 = toks[3].parse().map_err(|_| err_at(n, "bad cursor type index"))?;
                let subset = parse_id_list(n, &toks[4])?;
                cursor = Some(ScheduleCursor { stage, snapshot, subset, ty });
            }
            other => return Err(err_at(n, format!("unexpected directive `{other}`"))),
        }
    }
    stages.sort();
    if stages.iter().enumerate().any(|(i, (s, _))| *s as usize != i + 1) {
        return Err(Error::parse(0, "stage lines must number 1,2,3,..."));
    }
    match cursor {
        Some(c) => QUPrefix::from_parts(m, c, stages.into_iter().map(|p| p.1).collect()),
        None if m.is_empty() && stages.is_empty() => Ok(QUPrefix::new()),
        None => Err(Error::parse(0, "prefix file lacks a cursor line")),
    }
}

pub fn prefix_to_string(p: &QUPrefix) -> String {
    let mut s = String::new();
    write_metric(&mut s, p.space());
    for (i, start) in p.stage_starts().iter().enumerate() {
        writeln!(s, "stage {} {}", i + 1, start).unwrap();
    }
    let c = p.cursor();
    writeln!(s, "cursor {} {} {} {}", c.stage, c.snapshot, c.ty, format_id_list(&c.subset)).unwrap();
    s
}

/// Constraint format: `point`, `dist` (exact values), and
/// `lower|upper <id> <id> <p/q> [strict]`.
pub fn read_constraints(text: &str) -> Result<PartialConstraintSet> {
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for (n, toks) in tokenize(text) {
        if toks[0] == "point" {
            if toks.len() != 2 {
                return Err(err_at(n, "expected `point <id>`"));
            }
            points.push(parse_id(n, &toks[1])?);
        } else {
            rows.push((n, toks));
        }
    }
    let mut c = PartialConstraintSet::new(points)?;
    for (n, toks) in rows {
        let kind = toks[0].as_str();
        let strict = match (kind, toks.len()) {
            ("dist", 4) | ("lower", 4) | ("upper", 4) => false,
            ("lower", 5) | ("upper", 5) if toks[4] == "strict" => true,
            _ => return Err(err_at(n, format!("malformed `{kind}` line"))),
        };
        let (a, b) = (parse_id(n, &toks[1])?, parse_id(n, &toks[2])?);
        let v = parse_rat(n, &toks[3])?;
        let with_line = |e: Error| match e {
            Error::Usage(m) => err_at(n, m),
            other => other,
        };
        match kind {
            "dist" => c.set_exact(a, b, v).map_err(with_line)?,
            "lower" => c.add_lower(a, b, Bound { value: v, strict }).map_err(with_line)?,
            _ => c.add_upper(a, b, Bound { value: v, strict }).map_err(with_line)?,
        }
    }
    Ok(c)
}

pub fn constraints_to_string(c: &PartialConstraintSet) -> String {
    let mut s = String::new();
    for p in c.points() {
        writeln!(s, "point {p}").unwrap();
    }
    for (&(a, b), v) in c.exact() {
        writeln!(s, "dist {a} {b} {v}").unwrap();
    }
    for (kind, map) in [("lower", c.lower()), ("upper", c.upper())] {
        for (&(a, b), bd) in map {
            let flag = if bd.strict { " strict" } else { "" };
            writeln!(s, "{kind} {a} {b} {}{flag}", bd.value).unwrap();
        }
    }
    s
}

/// Partial isometry format: one `map <src> <dst>` line per pair.
pub fn read_isometry(text: &str) -> Result<PartialIsometry> {
    let mut pairs = Vec::new();
    for (n, toks) in tokenize(text) {
        if toks.len() != 3 || toks[0] != "map" {
            return Err(err_at(n, "expected `map <src> <dst>`"));
        }
        pairs.push((parse_id(n, &toks[1])?, parse_id(n, &toks[2])?));
    }
    PartialIsometry::new(pairs)
}

pub fn isometry_to_string(g: &PartialIsometry) -> String {
    g.pairs().iter().map(|(a, b)| format!("map {a} {b}\n")).collect()
}
