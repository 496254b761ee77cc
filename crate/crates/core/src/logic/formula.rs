use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use super::Signature;
use crate::error::{Error, Result};
use crate::metric::PointId;
use crate::rat::{format_rational, parse_rational, Connective, Rat01, Rational};

const KEYWORDS: &[&str] = &["neg", "half", "tsub", "tadd", "tmul", "min", "max", "absdiff", "sup", "inf", "d"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Point(PointId),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Point(p) => write!(f, "{p}"),
        }
    }
}

/// A continuous first-order formula over a relational signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(Rat01),
    Atom(String, Vec<Term>),
    D(Term, Term),
    Conn(Connective, Vec<Formula>),
    Sup(String, Box<Formula>),
    Inf(String, Box<Formula>),
}

pub fn var(name: &str) -> Term {
    Term::Var(name.to_owned())
}

impl Formula {
    pub fn constant(v: Rat01) -> Self {
        Formula::Const(v)
    }

    pub fn atom(rel: &str, args: Vec<Term>) -> Self {
        Formula::Atom(rel.to_owned(), args)
    }

    pub fn dist(a: Term, b: Term) -> Self {
        Formula::D(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Self {
        Formula::Conn(Connective::Neg, vec![a])
    }

    pub fn half(a: Formula) -> Self {
        Formula::Conn(Connective::Half, vec![a])
    }

    pub fn tmul(q: Rational, a: Formula) -> Self {
        Formula::Conn(Connective::TMul(q), vec![a])
    }

    pub fn binary(kind: Connective, a: Formula, b: Formula) -> Self {
        debug_assert_eq!(kind.arity(), 2);
        Formula::Conn(kind, vec![a, b])
    }

    pub fn sup(x: &str, body: Formula) -> Self {
        Formula::Sup(x.to_owned(), Box::new(body))
    }

    pub fn inf(x: &str, body: Formula) -> Self {
        Formula::Inf(x.to_owned(), Box::new(body))
    }

    /// Free variables in sorted order.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Const(_) => {}
            Formula::Atom(_, ts) => ts.iter().for_each(|t| term(t, bound)),
            Formula::D(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Conn(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Formula::Sup(x, body) | Formula::Inf(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Point ids used as constants.
    pub fn constants(&self) -> BTreeSet<PointId> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Point(p) = t {
                out.insert(*p);
            }
        });
        out
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(_, ts) => ts.iter().for_each(&mut *f),
            Formula::D(a, b) => {
                f(a);
                f(b);
            }
            Formula::Conn(_, args) => args.iter().for_each(|a| a.visit_terms(f)),
            Formula::Sup(_, body) | Formula::Inf(_, body) => body.visit_terms(f),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Atom(..) | Formula::D(..) => 1,
            Formula::Conn(_, args) => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Sup(_, b) | Formula::Inf(_, b) => 1 + b.depth(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Const(_) | Formula::Atom(..) | Formula::D(..) => true,
            Formula::Conn(_, args) => args.iter().all(Formula::is_quantifier_free),
            Formula::Sup(..) | Formula::Inf(..) => false,
        }
    }

    /// Checks relation names, arities and connective shapes against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            Formula::Const(_) | Formula::D(..) => Ok(()),
            Formula::Atom(r, ts) => {
                let sym = sig.get(r).ok_or_else(|| Error::usage(format!("unknown relation `{r}`")))?;
                if sym.arity != ts.len() {
                    return Err(Error::usage(format!(
                        "relation `{r}` has arity {}, got {} argument(s)",
                        sym.arity,
                        ts.len()
                    )));
                }
                Ok(())
            }
            Formula::Conn(kind, args) => {
                if args.len() != kind.arity() {
                    return Err(Error::usage(format!("{} expects {} argument(s)", kind.keyword(), kind.arity())));
                }
                if let Connective::TMul(q) = kind {
                    if !q.is_positive() {
                        return Err(Error::usage("tmul multiplier must be positive"));
                    }
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
            Formula::Sup(_, b) | Formula::Inf(_, b) => b.check(sig),
        }
    }
}

/// Inverse continuity modulus coefficient `k`: the formula is
/// `k`-Lipschitz in its free variables jointly, for the max metric on tuples.
pub fn modulus(f: &Formula, sig: &Signature) -> Result<Rational> {
    Ok(match f {
        Formula::Const(_) => Rational::zero(),
        Formula::D(..) => Rational::from_integer(2.into()),
        Formula::Atom(r, _) => {
            sig.get(r).ok_or_else(|| Error::usage(format!("unknown relation `{r}`")))?.modulus.clone()
        }
        Formula::Sup(_, b) | Formula::Inf(_, b) => modulus(b, sig)?,
        Formula::Conn(kind, args) => {
            let ks = args.iter().map(|a| modulus(a, sig)).collect::<Result<Vec<_>>>()?;
            match kind {
                Connective::Neg => ks[0].clone(),
                Connective::Half => &ks[0] / Rational::from_integer(2.into()),
                Connective::TMul(q) => q * &ks[0],
                Connective::Min | Connective::Max => ks[0].clone().max(ks[1].clone()),
                Connective::TSub | Connective::TAdd | Connective::AbsDiff => &ks[0] + &ks[1],
            }
        }
    })
}

fn write_args(f: &mut fmt::Formatter<'_>, head: &str, args: &[&dyn fmt::Display]) -> fmt::Result {
    write!(f, "{head}(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(v) => write!(f, "{v}"),
            Formula::Atom(r, ts) => {
                let args: Vec<&dyn fmt::Display> = ts.iter().map(|t| t as &dyn fmt::Display).collect();
                write_args(f, r, &args)
            }
            Formula::D(a, b) => write_args(f, "d", &[a, b]),
            Formula::Conn(Connective::TMul(q), args) => {
                let q = format_rational(q);
                write_args(f, "tmul", &[&q, &args[0]])
            }
            Formula::Conn(kind, args) => {
                let args: Vec<&dyn fmt::Display> = args.iter().map(|a| a as &dyn fmt::Display).collect();
                write_args(f, kind.keyword(), &args)
            }
            Formula::Sup(x, b) => write_args(f, "sup", &[x, b]),
            Formula::Inf(x, b) => write_args(f, "inf", &[x, b]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Comma,
}

/// Splits the input into tokens paired with their 1-based column.
fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        let col = at + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '(' | ')' | ',' => {
                out.push((
                    col,
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Comma,
                    },
                ));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push((col, Tok::Ident(chars[start..i].iter().map(|p| p.1).collect())));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '/') {
                    i += 1;
                }
                out.push((col, Tok::Num(chars[start..i].iter().map(|p| p.1).collect())));
            }
            other => return Err(Error::parse(col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.0)
    }

    fn next(&mut self) -> Result<(usize, Tok)> {
        let t = self.toks.get(self.i).cloned().ok_or_else(|| Error::parse(self.end, "unexpected end of input"))?;
        self.i += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let (pos, t) = self.next()?;
        if t == want {
            Ok(())
        } else {
            Err(Error::parse(pos, format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let (pos, t) = self.next()?;
        match t {
            Tok::Num(s) => {
                let v = parse_rational(&s)
                    .and_then(Rat01::from_rational)
                    .map_err(|_| Error::parse(pos, format!("`{s}` is not a rational in [0,1]")))?;
                Ok(Formula::Const(v))
            }
            Tok::Ident(name) => {
                self.expect(Tok::LParen, "`(`")?;
                let f = match name.as_str() {
                    "d" => {
                        let a = self.term()?;
                        self.expect(Tok::Comma, "`,`")?;
                        Formula::D(a, self.term()?)
                    }
                    "neg" => Formula::neg(self.formula()?),
                    "half" => Formula::half(self.formula()?),
                    "tmul" => {
                        let (qpos, qt) = self.next()?;
                        let q = match qt {
                            Tok::Num(s) => parse_rational(&s)
                                .ok()
                                .filter(|q| q.is_positive())
                                .ok_or_else(|| Error::parse(qpos, "tmul multiplier must be a positive rational"))?,
                            _ => return Err(Error::parse(qpos, "expected tmul multiplier")),
                        };
                        self.expect(Tok::Comma, "`,`")?;
                        Formula::tmul(q, self.formula()?)
                    }
                    "tsub" | "tadd" | "min" | "max" | "absdiff" => {
                        let kind = match name.as_str() {
                            "tsub" => Connective::TSub,
                            "tadd" => Connective::TAdd,
                            "min" => Connective::Min,
                            "max" => Connective::Max,
                            _ => Connective::AbsDiff,
                        };
                        let a = self.formula()?;
                        self.expect(Tok::Comma, "`,`")?;
                        Formula::binary(kind, a, self.formula()?)
                    }
                    "sup" | "inf" => {
                        let (vpos, vt) = self.next()?;
                        let x = match vt {
                            Tok::Ident(x) if !is_keyword(&x) => x,
                            _ => return Err(Error::parse(vpos, "expected a variable")),
                        };
                        self.expect(Tok::Comma, "`,`")?;
                        let body = self.formula()?;
                        if name == "sup" {
                            Formula::sup(&x, body)
                        } else {
                            Formula::inf(&x, body)
                        }
                    }
                    rel => {
                        let sym =
                            self.sig.get(rel).ok_or_else(|| Error::parse(pos, format!("unknown relation `{rel}`")))?;
                        let arity = sym.arity;
                        let mut args = vec![self.term()?];
                        while self.toks.get(self.i).map(|t| &t.1) == Some(&Tok::Comma) {
                            self.i += 1;
                            args.push(self.term()?);
                        }
                        if args.len() != arity {
                            return Err(Error::parse(
                                pos,
                                format!("relation `{rel}` has arity {arity}, got {}", args.len()),
                            ));
                        }
                        Formula::Atom(rel.to_owned(), args)
                    }
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(Error::parse(pos, "expected a formula")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let (pos, t) = self.next()?;
        match t {
            Tok::Ident(x) if !is_keyword(&x) => Ok(Term::Var(x)),
            Tok::Num(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                s.parse().map(Term::Point).map_err(|_| Error::parse(pos, "point id out of range"))
            }
            _ => Err(Error::parse(pos, "expected a variable or point id")),
        }
    }
}

/// Parses the function-style surface syntax, e.g.
/// `sup(x, min(R(x, y), neg(R(y, x))))`. Digit strings in term position are
/// point ids, in formula position rational constants.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, i: 0, end: text.len() + 1, sig };
    let f = p.formula()?;
    if p.i != p.toks.len() {
        return Err(Error::parse(p.pos(), "trailing input"));
    }
    Ok(f)
}
