//! Batch front end. Every subcommand reads the text formats of the library
//! modules, runs one operation and prints a deterministic answer.
//!
//! Exit codes: 0 success, 1 negative decision, 2 usage or parse error,
//! 3 violated precondition.

mod workspace;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use workspace::{read_file, Workspace};

use crate::error::{Error, Result};
use crate::grey::{
    cone_subset, formal_inclusion_group, formal_inclusion_structure, inv_check, kappa, rho_s, sat, GreyCosetCode,
    InvVerdict, OraclePoint,
};
use crate::homog::text::read_sc_spec;
use crate::homog::{approx_homog_test, back_and_forth, sc_check};
use crate::logic::text::structure_to_string;
use crate::logic::{eval, eval_interval, modulus, parse, Assignment, Signature};
use crate::metric::text::{isometry_to_string, metric_to_string, prefix_to_string, read_constraints, read_isometry};
use crate::metric::{extend_partial_isometry, feasible, qu_extend, Feasibility, PointId, QUPrefix};
use crate::rat::{format_rational, Rat01};
use crate::space::text::{cone_to_string, read_cone};
use crate::space::{cone_diam, cone_member, delta_seq, structure_cone_subset, StructureCone};

#[derive(Parser, Debug)]
#[command(name = "urysohn", about = "Exact experiments on the rational Urysohn space", version)]
struct Cli {
    /// Directory holding a `manifest` with default signature and prefix.
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build the canonical prefix with the given number of points.
    QuBuild {
        #[arg(long)]
        steps: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Distance between two prefix points.
    Dist {
        #[arg(long)]
        prefix: Option<PathBuf>,
        a: PointId,
        b: PointId,
    },
    /// Extend a partial isometry to more sources, growing the prefix if needed.
    ExtendIso {
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        iso: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sources: Vec<PointId>,
        /// Where to write the grown prefix.
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
    /// Parse and print a formula in normal form.
    Parse {
        #[arg(long)]
        sig: Option<PathBuf>,
        formula: String,
    },
    /// Lipschitz modulus of a formula.
    Modulus {
        #[arg(long)]
        sig: Option<PathBuf>,
        formula: String,
    },
    /// Value of a formula in a finite structure.
    Eval {
        #[arg(long)]
        structure: PathBuf,
        /// `x=0,y=2`
        #[arg(long, default_value = "")]
        assign: String,
        formula: String,
    },
    /// Bounds on a formula's value in any structure the carrier is dense in.
    EvalInterval {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value = "")]
        assign: String,
        /// Density radius of the carrier in the ambient space.
        #[arg(long)]
        radius: Rat01,
        formula: String,
    },
    /// Bracket for the sequence distance of two structures on a shared carrier.
    DeltaSeq {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        m: u64,
    },
    /// Diameter of a structure cone.
    ConeDiam {
        #[arg(long)]
        sig: Option<PathBuf>,
        cone: PathBuf,
    },
    /// Whether a structure lies in a structure cone.
    ConeMember {
        #[arg(long)]
        structure: PathBuf,
        cone: PathBuf,
    },
    /// Inclusion of isometry cones (`gcone ...` codes or files holding one),
    /// or of structure cone files when `--sig` is given.
    ConeSubset {
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        sig: Option<PathBuf>,
        first: String,
        second: String,
    },
    /// Whether a cone is invariant under an isometry-cone subgroup.
    InvCheck {
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Subgroup code `gcone q=p s=t s'=t thr=k op=lt`.
        #[arg(long)]
        code: String,
        cone: PathBuf,
    },
    /// Truncated distance between two isometries of the prefix.
    Rho {
        #[arg(long)]
        prefix: Option<PathBuf>,
        g: PathBuf,
        h: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Membership of the oracle structure grown from a seed.
    Sat {
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        seed: PathBuf,
        cone: PathBuf,
    },
    /// Cone around the oracle structure at precision `n`.
    Kappa {
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        n: u32,
    },
    /// Formal inclusion test for two cones of the same kind.
    FormalIncl {
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        sig: Option<PathBuf>,
        first: String,
        second: String,
    },
    /// Back-and-forth between two tuples, one log line per stage.
    Backforth {
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<PointId>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<PointId>,
        #[arg(long)]
        eps: Rat01,
        #[arg(long)]
        steps: usize,
    },
    /// Check a family of conditions for approximate homogeneity.
    ScCheck {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: Rat01,
        conditions: PathBuf,
    },
    /// Back-and-forth over every pair of prefix tuples with equal diagrams.
    HomogTest {
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: Rat01,
        #[arg(long)]
        denom: u64,
        #[arg(long, default_value_t = 3)]
        steps: usize,
    },
    /// Decide a partially specified metric.
    Feas { constraints: PathBuf },
}

/// What a command printed and how it ended.
struct Outcome {
    text: String,
    negative: bool,
}

impl Outcome {
    fn yes(text: String) -> Self {
        Outcome { text, negative: false }
    }

    fn decision(ok: bool) -> Self {
        Outcome { text: format!("{ok}\n"), negative: !ok }
    }
}

fn parse_assignment(s: &str) -> Result<Assignment> {
    let mut out = Assignment::new();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (v, p) =
            part.split_once('=').ok_or_else(|| Error::usage(format!("bad assignment `{part}`, expected var=id")))?;
        let id = p.trim().parse().map_err(|_| Error::usage(format!("bad point id `{p}`")))?;
        out.insert(v.trim().to_owned(), id);
    }
    Ok(out)
}

fn read_code(s: &str) -> Result<GreyCosetCode> {
    if s.trim_start().starts_with("gcone") {
        s.parse()
    } else {
        read_file(Path::new(s))?.trim().parse()
    }
}

fn read_cone_file(path: &Path, sig: &Signature) -> Result<StructureCone> {
    read_cone(&read_file(path)?, sig)
}

fn pair(lo: &Rat01, hi: &Rat01) -> String {
    format!("{lo} {hi}\n")
}

fn run(cli: Cli) -> Result<Outcome> {
    let ws = match &cli.workspace {
        Some(dir) => Workspace::load(dir)?,
        None => Workspace::default(),
    };
    Ok(match cli.cmd {
        Cmd::QuBuild { steps, out } => {
            let text = prefix_to_string(&qu_extend(&QUPrefix::new(), steps));
            match out {
                Some(path) => {
                    std::fs::write(&path, &text)?;
                    Outcome::yes(String::new())
                }
                None => Outcome::yes(text),
            }
        }
        Cmd::Dist { prefix, a, b } => {
            let p = ws.prefix(prefix.as_ref())?;
            Outcome::yes(format!("{}\n", p.space().try_d(a, b)?))
        }
        Cmd::ExtendIso { prefix, iso, sources, out_prefix } => {
            let p = ws.prefix(prefix.as_ref())?;
            let g = read_isometry(&read_file(&iso)?)?;
            let (grown, g) = extend_partial_isometry(&p, &g, &sources)?;
            if let Some(path) = out_prefix {
                std::fs::write(path, prefix_to_string(&grown))?;
            }
            Outcome::yes(isometry_to_string(&g))
        }
        Cmd::Parse { sig, formula } => {
            let sig = ws.signature(sig.as_ref())?;
            Outcome::yes(format!("{}\n", parse(&formula, &sig)?))
        }
        Cmd::Modulus { sig, formula } => {
            let sig = ws.signature(sig.as_ref())?;
            let f = parse(&formula, &sig)?;
            Outcome::yes(format!("{}\n", format_rational(&modulus(&f, &sig)?)))
        }
        Cmd::Eval { structure, assign, formula } => {
            let m = ws.structure(&structure)?;
            let f = parse(&formula, m.signature())?;
            Outcome::yes(format!("{}\n", eval(&m, &f, &parse_assignment(&assign)?)?))
        }
        Cmd::EvalInterval { structure, assign, radius, formula } => {
            let m = ws.structure(&structure)?;
            let f = parse(&formula, m.signature())?;
            let (lo, hi) = eval_interval(&m, &f, &parse_assignment(&assign)?, &radius)?;
            Outcome::yes(pair(&lo, &hi))
        }
        Cmd::DeltaSeq { a, b, m } => {
            let (lo, hi) = delta_seq(&ws.structure(&a)?, &ws.structure(&b)?, m)?;
            Outcome::yes(pair(&lo, &hi))
        }
        Cmd::ConeDiam { sig, cone } => {
            let sig = ws.signature(sig.as_ref())?;
            Outcome::yes(format!("{}\n", cone_diam(&read_cone_file(&cone, &sig)?, &sig)?))
        }
        Cmd::ConeMember { structure, cone } => {
            let m = ws.structure(&structure)?;
            Outcome::decision(cone_member(&m, &read_cone_file(&cone, m.signature())?)?)
        }
        Cmd::ConeSubset { prefix, sig, first, second } => {
            let p = ws.prefix(prefix.as_ref())?;
            let ok = match sig {
                Some(path) => {
                    let sig = ws.signature(Some(&path))?;
                    let (c1, c2) =
                        (read_cone_file(Path::new(&first), &sig)?, read_cone_file(Path::new(&second), &sig)?);
                    structure_cone_subset(&c1, &c2, &sig, p.space())?
                }
                None => cone_subset(&read_code(&first)?, &read_code(&second)?, p.space())?,
            };
            Outcome::decision(ok)
        }
        Cmd::FormalIncl { prefix, sig, first, second } => {
            let p = ws.prefix(prefix.as_ref())?;
            let ok = match sig {
                Some(path) => {
                    let sig = ws.signature(Some(&path))?;
                    let (c1, c2) =
                        (read_cone_file(Path::new(&first), &sig)?, read_cone_file(Path::new(&second), &sig)?);
                    formal_inclusion_structure(&c1, &c2, &sig, p.space())?
                }
                None => formal_inclusion_group(&read_code(&first)?, &read_code(&second)?, p.space())?,
            };
            Outcome::decision(ok)
        }
        Cmd::InvCheck { prefix, sig, code, cone } => {
            let p = ws.prefix(prefix.as_ref())?;
            let sig = ws.signature(sig.as_ref())?;
            let u = read_cone_file(&cone, &sig)?;
            match inv_check(&read_code(&code)?, &u, &sig, &p)? {
                InvVerdict::Sound => Outcome::yes("sound\n".into()),
                InvVerdict::Unknown => Outcome::yes("unknown\n".into()),
                InvVerdict::Falsified(w) => Outcome {
                    text: format!(
                        "falsified before {} after {} h {}\n{}{}",
                        w.terms.before,
                        w.terms.after,
                        w.terms.h,
                        isometry_to_string(&w.gamma),
                        structure_to_string(&w.structure)
                    ),
                    negative: true,
                },
            }
        }
        Cmd::Rho { prefix, g, h, n } => {
            let p = ws.prefix(prefix.as_ref())?;
            let g = read_isometry(&read_file(&g)?)?;
            let h = read_isometry(&read_file(&h)?)?;
            let (lo, hi) = rho_s(&g, &h, n, p.space())?;
            Outcome::yes(pair(&lo, &hi))
        }
        Cmd::Sat { prefix, seed, cone } => {
            let p = ws.prefix(prefix.as_ref())?;
            let seed = ws.structure(&seed)?;
            let c = read_cone_file(&cone, seed.signature())?;
            let mut x = OraclePoint::new(seed, p)?;
            Outcome::decision(sat(&mut x, &c)?)
        }
        Cmd::Kappa { prefix, seed, n } => {
            let p = ws.prefix(prefix.as_ref())?;
            let mut x = OraclePoint::new(ws.structure(&seed)?, p)?;
            Outcome::yes(cone_to_string(&kappa(&mut x, n)?))
        }
        Cmd::Backforth { prefix, structure, a, b, eps, steps } => {
            let p = ws.prefix(prefix.as_ref())?;
            let run = back_and_forth(&ws.structure(&structure)?, &p, &a, &b, &eps, steps)?;
            Outcome { negative: !run.certified(), text: run.report() }
        }
        Cmd::ScCheck { structure, n, eps, conditions } => {
            let m = ws.structure(&structure)?;
            let (family, deltas) = read_sc_spec(&read_file(&conditions)?, m.signature())?;
            let r = sc_check(&m, n, &eps, &family, &deltas)?;
            Outcome { negative: !r.passed(), text: format!("{r}\n") }
        }
        Cmd::HomogTest { prefix, n, eps, denom, steps } => {
            let p = ws.prefix(prefix.as_ref())?;
            let r = approx_homog_test(&p, n, &eps, denom, steps)?;
            Outcome { negative: !r.all_certified(), text: r.render() }
        }
        Cmd::Feas { constraints } => {
            let c = read_constraints(&read_file(&constraints)?)?;
            match feasible(&c)? {
                Feasibility::Feasible(m) => Outcome::yes(format!("feasible\n{}", metric_to_string(&m))),
                Feasibility::Infeasible(cert) => Outcome { text: format!("infeasible\n{cert}\n"), negative: true },
            }
        }
    })
}

/// Runs one command line, writing the answer to `out` and diagnostics to
/// `err`; returns the exit code.
pub fn dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            i32::from(o.negative)
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    dispatch_to(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
