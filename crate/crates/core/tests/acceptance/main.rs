//! Acceptance run: one line per criterion, non-zero exit if any fails.

// grid oracles index small distance tables directly
#![allow(clippy::needless_range_loop)]

#[path = "../common/mod.rs"]
mod common;

mod c01_feasibility;
mod c02_extension;
mod c03_lipschitz;
mod c04_diameter;
mod c05_cone_inclusion;
mod c06_subgroup;
mod c07_kappa;
mod c08_backforth;
mod c09_invariance;
mod c10_roundtrip;

use std::time::Instant;

/// Outcome detail on success, reason on failure.
pub type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("feasibility agrees with the grid oracle", c01_feasibility::run),
        ("prefix realizes every small extension type", c02_extension::run),
        ("evaluation is Lipschitz in the assignment", c03_lipschitz::run),
        ("cone diameter formula", c04_diameter::run),
        ("grey cone inclusion", c05_cone_inclusion::run),
        ("grey subgroup axioms", c06_subgroup::run),
        ("kappa contract", c07_kappa::run),
        ("back-and-forth certificates", c08_backforth::run),
        ("invariance check is one-sided", c09_invariance::run),
        ("determinism and round trips", c10_roundtrip::run),
    ];
    // ACCEPTANCE_ONLY=4,5 runs a subset
    let only: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let (mut ran, mut failed) = (0, 0);
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {ran} criteria pass", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
