mod backforth;
mod sc;
pub mod text;

use std::fmt::Write as _;

use num_traits::ToPrimitive;

pub use backforth::*;
pub use sc::*;

use crate::error::{Error, Result};
use crate::logic::{tuples, FinStructure, Signature};
use crate::metric::{PointId, QUPrefix};
use crate::rat::Rat01;

#[derive(Clone, Debug, Default)]
pub struct HomogReport {
    pub pairs: usize,
    pub certified: usize,
    pub max_drift: Rat01,
    pub bound: Rat01,
    /// Pairs that got stuck or exceeded the budget.
    pub failures: Vec<(Vec<PointId>, Vec<PointId>, String)>,
}

impl HomogReport {
    pub fn all_certified(&self) -> bool {
        self.pairs == self.certified
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "pairs {} certified {} max-drift {} bound {}\n",
            self.pairs, self.certified, self.max_drift, self.bound
        );
        for (a, b, why) in &self.failures {
            writeln!(s, "failed {a:?} {b:?}: {why}").unwrap();
        }
        s
    }
}

fn small_denominators(p: &QUPrefix, t: &[PointId], bound: u64) -> bool {
    t.iter().all(|&x| t.iter().all(|&y| p.d(x, y).denom().to_u64().is_some_and(|d| d <= bound)))
}

fn same_diagram(p: &QUPrefix, a: &[PointId], b: &[PointId]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| p.d(a[i], a[j]) == p.d(b[i], b[j])))
}

/// Runs `steps` rounds of back-and-forth on the bare metric for every pair
/// of `n`-tuples of the prefix with equal diagrams whose distances have
/// denominators at most `denom_bound`.
pub fn approx_homog_test(
    prefix: &QUPrefix,
    n: usize,
    eps: &Rat01,
    denom_bound: u64,
    steps: usize,
) -> Result<HomogReport> {
    if prefix.is_empty() {
        return Err(Error::precondition("the prefix is empty"));
    }
    let bare = FinStructure::new(Signature::new(Vec::new())?, prefix.space().clone(), Default::default())?;
    let ids: Vec<PointId> = (0..prefix.len()).collect();
    let cands: Vec<Vec<PointId>> =
        tuples(&ids, n).into_iter().filter(|t| small_denominators(prefix, t, denom_bound)).collect();
    let mut report = HomogReport::default();
    for a in &cands {
        for b in &cands {
            if !same_diagram(prefix, a, b) {
                continue;
            }
            report.pairs += 1;
            let run = back_and_forth(&bare, prefix, a, b, eps, steps)?;
            report.bound = run.bound.clone();
            report.max_drift = report.max_drift.max_with(&run.max_drift());
            if run.certified() {
                report.certified += 1;
            } else {
                let why = match &run.stuck {
                    Some(s) => format!("stuck at stage {}", s.stage),
                    None => format!("drift {} over {}", run.max_drift(), run.bound),
                };
                report.failures.push((a.clone(), b.clone(), why));
            }
        }
    }
    Ok(report)
}
