use std::fmt::Debug;
use std::path::{Path, PathBuf};
use std::process::Command;

use urysohn_core::grey::GreyCosetCode;
use urysohn_core::homog::text::{read_sc_spec, sc_spec_to_string};
use urysohn_core::logic::text::{read_signature, read_structure, signature_to_string, structure_to_string};
use urysohn_core::logic::{parse, Signature};
use urysohn_core::metric::text::{
    constraints_to_string, isometry_to_string, metric_to_string, prefix_to_string, read_constraints, read_isometry,
    read_metric, read_prefix,
};
use urysohn_core::metric::{qu_extend, QUPrefix};
use urysohn_core::space::text::{cone_to_string, read_cone};

use crate::common::*;
use crate::Outcome;

const STEPS: usize = 40;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// read, write, read again: same value, and writing is a fixed point.
fn cycle<T: PartialEq + Debug>(
    name: &str,
    text: &str,
    read: impl Fn(&str) -> urysohn_core::Result<T>,
    write: impl Fn(&T) -> String,
) -> Result<(), String> {
    let a = read(text).map_err(|e| format!("{name}: {e}"))?;
    let s = write(&a);
    let b = read(&s).map_err(|e| format!("{name} rewritten: {e}"))?;
    if a != b || write(&b) != s {
        return Err(format!("{name}: value changed through a write/read cycle"));
    }
    Ok(())
}

fn lines<T: PartialEq + Debug>(
    name: &str,
    text: &str,
    read: impl Fn(&str) -> urysohn_core::Result<T>,
    write: impl Fn(&T) -> String,
) -> Result<usize, String> {
    let mut n = 0;
    for l in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        cycle(&format!("{name}: `{l}`"), l, &read, &write)?;
        n += 1;
    }
    Ok(n)
}

fn corpus(sig: &Signature) -> Result<usize, String> {
    let mut files: Vec<PathBuf> =
        std::fs::read_dir(fixtures()).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    files.sort();
    let mut count = 0;
    for f in &files {
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(f).map_err(|e| e.to_string())?;
        match f.extension().and_then(|e| e.to_str()) {
            Some("prefix") => cycle(&name, &text, read_prefix, prefix_to_string)?,
            Some("metric") => cycle(&name, &text, read_metric, metric_to_string)?,
            Some("cons") => cycle(&name, &text, read_constraints, constraints_to_string)?,
            Some("iso") => cycle(&name, &text, read_isometry, isometry_to_string)?,
            Some("sig") => cycle(&name, &text, read_signature, signature_to_string)?,
            Some("struct") => cycle(&name, &text, read_structure, structure_to_string)?,
            Some("cone") => cycle(&name, &text, |t| read_cone(t, sig), cone_to_string)?,
            Some("sc") => cycle(&name, &text, |t| read_sc_spec(t, sig), |(f, d)| sc_spec_to_string(f, d))?,
            Some("gcone") => {
                lines(&name, &text, |l| l.parse::<GreyCosetCode>(), |c| c.to_string())?;
            }
            Some("formulas") => {
                lines(&name, &text, |l| parse(l, sig), |f| f.to_string())?;
            }
            _ => return Err(format!("{name}: no reader for this fixture")),
        }
        count += 1;
    }
    Ok(count)
}

/// Random objects through the same cycles.
fn generated() -> Result<usize, String> {
    let mut r = rng(10);
    let base = prefix(8);
    for i in 0..200 {
        let carrier = random_carrier(&mut r, &base, 1, 5);
        let sig = random_signature(&mut r);
        let m = random_structure(&mut r, &sig, &carrier);
        let f = random_formula(&mut r, &carrier, 5);
        let c = random_cone(&mut r, &sig, &carrier, 4);
        let tag = format!("generated {i}");
        cycle(&tag, &structure_to_string(&m), read_structure, structure_to_string)?;
        cycle(&tag, &metric_to_string(&carrier), read_metric, metric_to_string)?;
        cycle(&tag, &f.to_string(), |t| parse(t, &sig), |f| f.to_string())?;
        cycle(&tag, &cone_to_string(&c), |t| read_cone(t, &sig), cone_to_string)?;
        if parse(&f.to_string(), &sig).map_err(|e| e.to_string())? != f {
            return Err(format!("{tag}: printed formula parses to a different tree"));
        }
    }
    Ok(200)
}

fn determinism() -> Result<(), String> {
    let a = prefix_to_string(&qu_extend(&QUPrefix::new(), STEPS));
    let b = prefix_to_string(&qu_extend(&QUPrefix::new(), STEPS));
    if a != b {
        return Err("two builds differ".into());
    }
    let half = qu_extend(&QUPrefix::new(), STEPS / 2);
    let resumed = read_prefix(&prefix_to_string(&half)).map_err(|e| e.to_string())?;
    if prefix_to_string(&qu_extend(&resumed, STEPS - STEPS / 2)) != a {
        return Err("resuming from a saved prefix diverges from a direct build".into());
    }
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_urysohn"))
            .args(["qu-build", "--steps", &STEPS.to_string()])
            .output()
            .map_err(|e| e.to_string())
    };
    let (x, y) = (run()?, run()?);
    if !x.status.success() || x.stdout != y.stdout || x.stdout != a.as_bytes() {
        return Err("qu-build output is not byte-identical across runs and with the library".into());
    }
    Ok(())
}

pub fn run() -> Outcome {
    determinism()?;
    let sig =
        read_signature(&std::fs::read_to_string(fixtures().join("base.sig")).unwrap()).map_err(|e| e.to_string())?;
    let files = corpus(&sig)?;
    let gen = generated()?;
    Ok(format!(
        "qu-build replay byte-identical at {STEPS} points; {files} fixture files and {gen} generated cases round-trip"
    ))
}
