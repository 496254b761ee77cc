use num_traits::Zero;

use crate::error::{Error, Result};
use crate::logic::{lipschitz_extend, FinStructure};
use crate::metric::{FinMetric, PartialIsometry, PointId, QUPrefix};
use crate::rat::{pow2_neg, Rat01, Rational};
use crate::space::{cone_member, ConeConstraint, SeqIndex, StructureCone};

/// A computable structure on the canonical prefix: a finite seed extended
/// by the Lipschitz formula to as many prefix points as queries need.
#[derive(Clone, Debug)]
pub struct OraclePoint {
    seed: FinStructure,
    prefix: QUPrefix,
    current: FinStructure,
}

impl OraclePoint {
    /// The seed carrier must be a subspace of `prefix`.
    pub fn new(seed: FinStructure, prefix: QUPrefix) -> Result<Self> {
        let current = lipschitz_extend(&seed, &prefix)?;
        Ok(OraclePoint { seed, prefix, current })
    }

    pub fn seed(&self) -> &FinStructure {
        &self.seed
    }

    pub fn prefix(&self) -> &QUPrefix {
        &self.prefix
    }

    pub fn structure(&self) -> &FinStructure {
        &self.current
    }

    /// Grows the prefix until it contains `point`.
    pub fn ensure(&mut self, point: PointId) -> Result<()> {
        if point < self.prefix.len() {
            return Ok(());
        }
        while self.prefix.len() <= point {
            self.prefix.step();
        }
        self.current = lipschitz_extend(&self.seed, &self.prefix)?;
        Ok(())
    }

    pub fn value(&mut self, rel: &str, tuple: &[PointId]) -> Result<Rat01> {
        if let Some(&m) = tuple.iter().max() {
            self.ensure(m)?;
        }
        self.current
            .value(rel, tuple)
            .cloned()
            .ok_or_else(|| Error::usage(format!("unknown relation `{rel}` or wrong arity")))
    }
}

/// Whether the oracle's structure lies in the cone.
pub fn sat(x: &mut OraclePoint, c: &StructureCone) -> Result<bool> {
    if let Some(m) = c.constraints().iter().flat_map(|con| con.tuple.iter()).max() {
        x.ensure(*m)?;
    }
    cone_member(x.structure(), c)
}

/// A closed cone around `x` of diameter at most `2^-n`: the first `n+1`
/// enumerated entries are pinned to intervals of width `2^-(n+1)` centred
/// at the oracle's values (clipped to `[0,1]`).
pub fn kappa(x: &mut OraclePoint, n: u32) -> Result<StructureCone> {
    let seq = SeqIndex::new(x.structure().signature());
    if seq.relation_count() == 0 {
        return Ok(StructureCone::default());
    }
    let half = pow2_neg(n + 2);
    let mut out = Vec::new();
    for i in 1..=u64::from(n) + 1 {
        let (j, t) = seq.entry(i)?;
        let rel = seq.name(j).to_owned();
        let v = x.value(&rel, &t)?;
        let lo = Rat01::clamp(v.value() - &half);
        let hi = Rat01::clamp(v.value() + &half);
        out.push(ConeConstraint::new(&rel, t, lo, hi, true, true)?);
    }
    Ok(StructureCone::new(out))
}

/// Bounds on `ρ(g, h) = Σ_i 2^-i min(1, d(g(s_i), h(s_i)))` where `s_i` is
/// prefix point `i - 1`, from the first `n` terms.
pub fn rho_s(g: &PartialIsometry, h: &PartialIsometry, n: usize, space: &FinMetric) -> Result<(Rat01, Rat01)> {
    let mut lo = Rational::zero();
    for i in 0..n {
        let (gi, hi) = match (g.get(i), h.get(i)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::precondition(format!("isometries must be defined on points 0..{n}"))),
        };
        lo += pow2_neg(i as u32 + 1) * space.try_d(gi, hi)?.value();
    }
    let hi = &lo + pow2_neg(n as u32);
    Ok((Rat01::from_rational(lo)?, Rat01::clamp(hi)))
}
