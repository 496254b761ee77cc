use super::{apply, atomic_value, check_closed, modulus, Assignment, Env, FinStructure, Formula};
use crate::error::Result;
use crate::rat::{Connective, Rat01};

/// Bounds on the value of `f` in any structure whose carrier contains the
/// carrier of `m` as an `r`-dense subset and whose tables are Lipschitz
/// extensions of those of `m` with the same moduli.
///
/// Each quantifier widens the interval by `k * r` on one side, where `k` is
/// the modulus of its body. Quantifier-free formulas get width 0.
pub fn eval_interval(m: &FinStructure, f: &Formula, asg: &Assignment, r: &Rat01) -> Result<(Rat01, Rat01)> {
    check_closed(m, f, asg)?;
    Ok(bounds(m, f, &mut Env::new(asg), r))
}

fn bounds<'a>(m: &FinStructure, f: &'a Formula, env: &mut Env<'a>, r: &Rat01) -> (Rat01, Rat01) {
    match f {
        Formula::Const(_) | Formula::D(..) | Formula::Atom(..) => {
            let v = atomic_value(m, f, env);
            (v.clone(), v)
        }
        Formula::Conn(kind, args) => {
            let iv: Vec<(Rat01, Rat01)> = args.iter().map(|a| bounds(m, a, env, r)).collect();
            combine(kind, &iv)
        }
        Formula::Sup(x, body) | Formula::Inf(x, body) => {
            let is_sup = matches!(f, Formula::Sup(..));
            let k = modulus(body, m.signature()).expect("checked formula");
            let slack = Rat01::clamp(k * r.value());
            let mut acc: Option<(Rat01, Rat01)> = None;
            for &p in m.carrier().ids() {
                env.push(x, p);
                let (lo, hi) = bounds(m, body, env, r);
                env.pop();
                acc = Some(match acc {
                    None => (lo, hi),
                    Some((a, b)) if is_sup => (a.max_with(&lo), b.max_with(&hi)),
                    Some((a, b)) => (a.min_with(&lo), b.min_with(&hi)),
                });
            }
            match acc {
                // an empty carrier is dense in nothing; report the trivial bounds
                None => (Rat01::zero(), Rat01::one()),
                Some((lo, hi)) if is_sup => (lo, hi.tadd(&slack)),
                Some((lo, hi)) => (lo.tsub(&slack), hi),
            }
        }
    }
}

/// Interval extension of a connective. Every connective is monotone in
/// each argument, so endpoints map to endpoints except for `absdiff`.
fn combine(kind: &Connective, iv: &[(Rat01, Rat01)]) -> (Rat01, Rat01) {
    let lo = |i: usize| iv[i].0.clone();
    let hi = |i: usize| iv[i].1.clone();
    match kind {
        Connective::Neg => (hi(0).neg(), lo(0).neg()),
        Connective::TSub => (lo(0).tsub(&iv[1].1), hi(0).tsub(&iv[1].0)),
        Connective::AbsDiff => {
            let top = iv[0].1.absdiff(&iv[1].0).max_with(&iv[0].0.absdiff(&iv[1].1));
            let bottom = iv[1].0.tsub(&iv[0].1).max_with(&iv[0].0.tsub(&iv[1].1));
            (bottom, top)
        }
        _ => {
            let los: Vec<Rat01> = iv.iter().map(|p| p.0.clone()).collect();
            let his: Vec<Rat01> = iv.iter().map(|p| p.1.clone()).collect();
            (apply(kind, &los), apply(kind, &his))
        }
    }
}
