//! Cone files: one `con <rel> <id...> <lo> <hi> <oo|oc|co|cc>` line per
//! constraint, the flag letters giving the lower then the upper end.

use std::fmt::Write as _;

use super::{ConeConstraint, StructureCone};
use crate::error::Result;
use crate::logic::Signature;
use crate::metric::text::{err_at, parse_id, parse_rat, tokenize};

pub fn read_cone(text: &str, sig: &Signature) -> Result<StructureCone> {
    let mut out = Vec::new();
    for (n, toks) in tokenize(text) {
        if toks[0] != "con" || toks.len() < 2 {
            return Err(err_at(n, format!("unexpected directive `{}`", toks[0])));
        }
        let sym = sig.get(&toks[1]).ok_or_else(|| err_at(n, format!("unknown relation `{}`", toks[1])))?;
        if toks.len() != sym.arity + 5 {
            return Err(err_at(n, format!("expected `con {} <{} ids> <lo> <hi> <flags>`", sym.name, sym.arity)));
        }
        let tuple = toks[2..2 + sym.arity].iter().map(|t| parse_id(n, t)).collect::<Result<Vec<_>>>()?;
        let lo = parse_rat(n, &toks[2 + sym.arity])?;
        let hi = parse_rat(n, &toks[3 + sym.arity])?;
        let flag = |c: u8| match c {
            b'o' => Ok(false),
            b'c' => Ok(true),
            _ => Err(err_at(n, "flags must be one of oo, oc, co, cc")),
        };
        let f = toks[4 + sym.arity].as_bytes();
        if f.len() != 2 {
            return Err(err_at(n, "flags must be one of oo, oc, co, cc"));
        }
        let c = ConeConstraint::new(&sym.name, tuple, lo, hi, flag(f[0])?, flag(f[1])?)
            .map_err(|e| err_at(n, e.to_string()))?;
        out.push(c);
    }
    Ok(StructureCone::new(out))
}

pub fn cone_to_string(c: &StructureCone) -> String {
    let mut s = String::new();
    for con in c.constraints() {
        let ids: Vec<String> = con.tuple.iter().map(|p| p.to_string()).collect();
        let flag = |closed: bool| if closed { 'c' } else { 'o' };
        writeln!(
            s,
            "con {} {} {} {} {}{}",
            con.rel,
            ids.join(" "),
            con.lo,
            con.hi,
            flag(con.lo_closed),
            flag(con.hi_closed)
        )
        .unwrap();
    }
    s
}
