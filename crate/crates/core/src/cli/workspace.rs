//! Manifest-backed default inputs. A manifest is a file named `manifest`
//! with lines `sig <file>`, `prefix <file>` and `stage <int>`, paths being
//! relative to its directory.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::logic::text::{read_signature, read_structure};
use crate::logic::{FinStructure, Signature};
use crate::metric::text::{err_at, prefix_to_string, read_prefix, tokenize};
use crate::metric::{qu_extend, QUPrefix};

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub sig: Option<Signature>,
    pub prefix: Option<QUPrefix>,
}

impl Workspace {
    pub fn load(dir: &Path) -> Result<Self> {
        let text = read_file(&dir.join("manifest"))?;
        let mut ws = Workspace::default();
        let mut stage = None;
        for (n, toks) in tokenize(&text) {
            if toks.len() != 2 {
                return Err(err_at(n, "manifest lines are `<key> <value>`"));
            }
            match toks[0].as_str() {
                "sig" => ws.sig = Some(read_signature(&read_file(&dir.join(&toks[1]))?)?),
                "prefix" => ws.prefix = Some(read_prefix(&read_file(&dir.join(&toks[1]))?)?),
                "stage" => stage = Some(toks[1].parse::<u32>().map_err(|_| err_at(n, "bad stage"))?),
                other => return Err(err_at(n, format!("unknown manifest key `{other}`"))),
            }
        }
        if let Some(p) = &ws.prefix {
            let replay = qu_extend(&QUPrefix::new(), p.len());
            if prefix_to_string(&replay) != prefix_to_string(p) {
                return Err(Error::precondition("prefix file is not a replay of the canonical schedule"));
            }
            if let Some(s) = stage {
                if s != p.cursor().stage {
                    return Err(Error::precondition(format!(
                        "manifest stage {s} but the prefix is at stage {}",
                        p.cursor().stage
                    )));
                }
            }
        } else if stage.is_some() {
            return Err(Error::usage("manifest gives a stage without a prefix"));
        }
        Ok(ws)
    }

    pub fn signature(&self, path: Option<&PathBuf>) -> Result<Signature> {
        match (path, &self.sig) {
            (Some(p), _) => read_signature(&read_file(p)?),
            (None, Some(s)) => Ok(s.clone()),
            (None, None) => Err(Error::usage("no signature: pass --sig or a workspace with one")),
        }
    }

    pub fn prefix(&self, path: Option<&PathBuf>) -> Result<QUPrefix> {
        match (path, &self.prefix) {
            (Some(p), _) => read_prefix(&read_file(p)?),
            (None, Some(p)) => Ok(p.clone()),
            (None, None) => Err(Error::usage("no prefix: pass --prefix or a workspace with one")),
        }
    }

    /// Reads a structure file, checking it against the manifest signature.
    pub fn structure(&self, path: &Path) -> Result<FinStructure> {
        let m = read_structure(&read_file(path)?)?;
        if let Some(s) = &self.sig {
            if s != m.signature() {
                return Err(Error::precondition(format!("{} does not use the workspace signature", path.display())));
            }
        }
        Ok(m)
    }
}
