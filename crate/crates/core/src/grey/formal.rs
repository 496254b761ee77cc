use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::logic::Signature;
use crate::metric::FinMetric;
use crate::rat::{pow2_neg, ratio, Rat01, Rational};
use crate::space::{cone_diam, cone_is_empty, structure_cone_subset, StructureCone};

use super::{cone_nonempty, cone_subset, CmpOp, GreyCosetCode};

/// Slack values `2^-k` tried when looking for a larger cone still inside
/// the target.
const SLACK_STEPS: u32 = 12;

/// `c1 ≪ c2` for structure cones: some widening of `c1` lies in `c2` and
/// `c1` is at most half as wide.
pub fn formal_inclusion_structure(
    c1: &StructureCone,
    c2: &StructureCone,
    sig: &Signature,
    carrier: &FinMetric,
) -> Result<bool> {
    if cone_is_empty(c1, sig, carrier)? {
        return Ok(true);
    }
    let d1 = cone_diam(c1, sig)?;
    let d2 = cone_diam(c2, sig)?;
    if d1.value() * ratio(2, 1) > *d2.value() {
        return Ok(false);
    }
    for k in 1..=SLACK_STEPS {
        let tau = Rat01::from_rational(pow2_neg(k))?;
        if structure_cone_subset(&c1.widen(&tau), c2, sig, carrier)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn require_lt(c: &GreyCosetCode) -> Result<()> {
    if c.op != CmpOp::Lt {
        return Err(Error::usage("group-side formal inclusion needs op=lt codes"));
    }
    Ok(())
}

/// Upper bound on the `ρ`-diameter of an isometry cone, the enumerated
/// points being the points of `space` in order. Inside the cone every
/// `g(s'_j)` is within `b = thr/q` of `s_j`, so two members move a point
/// `x` apart by at most `2 d(x, s'_j) + 2b`.
pub fn group_diam_upper(c: &GreyCosetCode, space: &FinMetric) -> Result<Rat01> {
    require_lt(c)?;
    if !cone_nonempty(c, space)? {
        return Ok(Rat01::zero());
    }
    let b = c.thr.value() / &c.q;
    let ids = space.ids();
    let mut sum = Rational::zero();
    for (i, &x) in ids.iter().enumerate() {
        let bound = if b >= Rational::one() {
            Rational::one()
        } else {
            c.s_prime
                .iter()
                .map(|&sp| (space.d(x, sp).value() + &b) * ratio(2, 1))
                .fold(Rational::one(), |acc, v| acc.min(v))
        };
        sum += pow2_neg(i as u32 + 1) * bound;
    }
    sum += pow2_neg(ids.len() as u32);
    Ok(Rat01::clamp(sum))
}

/// Lower bound on the `ρ`-diameter: composing a member with an isometry
/// fixing `s'` moves `x` by up to `min(1, 2 d(x, s'))` without leaving the
/// cone.
pub fn group_diam_lower(c: &GreyCosetCode, space: &FinMetric) -> Result<Rat01> {
    require_lt(c)?;
    if !cone_nonempty(c, space)? {
        return Ok(Rat01::zero());
    }
    let mut best = Rational::zero();
    for (i, &x) in space.ids().iter().enumerate() {
        let reach =
            c.s_prime.iter().map(|&sp| space.d(x, sp).value() * ratio(2, 1)).fold(Rational::one(), |acc, v| acc.min(v));
        best = best.max(pow2_neg(i as u32 + 1) * reach);
    }
    Ok(Rat01::clamp(best))
}

/// `c1 ≪ c2` for isometry cones, with the diameters replaced by the
/// bounds above, so a `true` answer is always correct.
pub fn formal_inclusion_group(c1: &GreyCosetCode, c2: &GreyCosetCode, space: &FinMetric) -> Result<bool> {
    require_lt(c1)?;
    require_lt(c2)?;
    if !cone_nonempty(c1, space)? {
        return Ok(true);
    }
    let up = group_diam_upper(c1, space)?;
    let low = group_diam_lower(c2, space)?;
    if up.value() * ratio(2, 1) > *low.value() {
        return Ok(false);
    }
    for k in 1..=SLACK_STEPS {
        let r1 = c1.thr.value() + pow2_neg(k);
        if r1 > Rational::one() {
            continue;
        }
        if cone_subset(&c1.with_threshold(Rat01::from_rational(r1)?), c2, space)? {
            return Ok(true);
        }
    }
    Ok(false)
}
