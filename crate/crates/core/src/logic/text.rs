//! Text formats for signatures and finite structures.
//!
//! ```text
//! point 0
//! point 1
//! dist 0 1 1/2
//! rel R 1 2
//! val R 0 1/4
//! val R 1 1/2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{tuples, FinStructure, RelSymbol, Signature, Table};
use crate::error::Result;
use crate::metric::text::{err_at, parse_id, parse_rat, split_metric, tokenize, write_metric, Line};
use crate::rat::{format_rational, parse_rational};

fn rel_line(n: usize, toks: &[String]) -> Result<RelSymbol> {
    if toks.len() != 4 {
        return Err(err_at(n, "expected `rel <name> <arity> <modulus>`"));
    }
    let arity = toks[2].parse().map_err(|_| err_at(n, "bad arity"))?;
    let modulus = parse_rational(&toks[3]).map_err(|_| err_at(n, "bad modulus"))?;
    Ok(RelSymbol::new(&toks[1], arity, modulus))
}

/// Reads `rel` lines, returning the signature and the remaining lines.
pub fn split_signature(lines: Vec<Line>) -> Result<(Signature, Vec<Line>)> {
    let mut rels = Vec::new();
    let mut rest = Vec::new();
    let mut first = 0;
    for (n, toks) in lines {
        if toks[0] == "rel" {
            first = if first == 0 { n } else { first };
            rels.push(rel_line(n, &toks)?);
        } else {
            rest.push((n, toks));
        }
    }
    let sig = Signature::new(rels).map_err(|e| err_at(first, e.to_string()))?;
    Ok((sig, rest))
}

pub fn read_signature(text: &str) -> Result<Signature> {
    let (sig, rest) = split_signature(tokenize(text))?;
    if let Some((n, toks)) = rest.first() {
        return Err(err_at(*n, format!("unexpected directive `{}`", toks[0])));
    }
    Ok(sig)
}

pub fn write_signature(out: &mut String, sig: &Signature) {
    for r in sig.rels() {
        writeln!(out, "rel {} {} {}", r.name, r.arity, format_rational(&r.modulus)).unwrap();
    }
}

pub fn signature_to_string(sig: &Signature) -> String {
    let mut s = String::new();
    write_signature(&mut s, sig);
    s
}

pub fn read_structure(text: &str) -> Result<FinStructure> {
    let (carrier, rest) = split_metric(tokenize(text))?;
    let (sig, rest) = split_signature(rest)?;
    let mut tables: BTreeMap<String, Table> = sig.rels().iter().map(|r| (r.name.clone(), Table::new())).collect();
    for (n, toks) in rest {
        if toks[0] != "val" || toks.len() < 3 {
            return Err(err_at(n, format!("unexpected directive `{}`", toks[0])));
        }
        let sym = sig.get(&toks[1]).ok_or_else(|| err_at(n, format!("unknown relation `{}`", toks[1])))?;
        if toks.len() != sym.arity + 3 {
            return Err(err_at(n, format!("relation `{}` has arity {}", sym.name, sym.arity)));
        }
        let tuple = toks[2..2 + sym.arity].iter().map(|t| parse_id(n, t)).collect::<Result<Vec<_>>>()?;
        let v = parse_rat(n, &toks[2 + sym.arity])?;
        if tables.get_mut(&sym.name).unwrap().insert(tuple, v).is_some() {
            return Err(err_at(n, "duplicate value"));
        }
    }
    FinStructure::new(sig, carrier, tables)
}

pub fn structure_to_string(m: &FinStructure) -> String {
    let mut s = String::new();
    write_metric(&mut s, m.carrier());
    write_signature(&mut s, m.signature());
    for r in m.signature().rels() {
        let table = m.table(&r.name).expect("total");
        for t in tuples(m.carrier().ids(), r.arity) {
            let ids: Vec<String> = t.iter().map(|p| p.to_string()).collect();
            writeln!(s, "val {} {} {}", r.name, ids.join(" "), table[&t]).unwrap();
        }
    }
    s
}
