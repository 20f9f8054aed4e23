//! Versioned text snapshots of parameter objects.
//!
//! ```text
//! fairmax-params v1
//! kind mlp
//! arch 8 32 32 32 1
//! count 2433
//! <one value per line, shortest round-trip decimal>
//! ```
//!
//! Adversaries use `kind adversary` and `arch 2`.

use std::fs;
use std::path::Path;

use super::{AdversaryParams, ModelKind, ModelParams};
use crate::error::{Error, Result};

pub const SNAPSHOT_HEADER: &str = "fairmax-params v1";

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Classifier(ModelParams),
    Adversary(AdversaryParams),
}

impl Snapshot {
    pub fn to_text(&self) -> String {
        let (kind, arch, values) = match self {
            Snapshot::Classifier(p) => (p.kind().name(), p.architecture(), p.to_flat()),
            Snapshot::Adversary(a) => ("adversary", vec![2], a.weights.to_vec()),
        };
        let arch: Vec<String> = arch.iter().map(usize::to_string).collect();
        let mut out = format!(
            "{SNAPSHOT_HEADER}\nkind {kind}\narch {}\ncount {}\n",
            arch.join(" "),
            values.len()
        );
        for v in values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Snapshot> {
        let bad = |msg: String| Error::format(origin, msg);
        let mut lines = text.lines();
        if lines.next() != Some(SNAPSHOT_HEADER) {
            return Err(bad(format!("expected header `{SNAPSHOT_HEADER}`")));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing `{name}` line")))?;
            line.strip_prefix(name)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| bad(format!("expected `{name} ...`, got `{line}`")))
        };
        let kind = field("kind")?;
        let arch: Vec<usize> = field("arch")?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad architecture entry `{t}`"))))
            .collect::<Result<_>>()?;
        let count: usize = field("count")?
            .trim()
            .parse()
            .map_err(|_| bad("bad count".into()))?;
        let values: Vec<f64> = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse().map_err(|_| bad(format!("bad value `{l}`"))))
            .collect::<Result<_>>()?;
        if values.len() != count {
            return Err(bad(format!("expected {count} values, found {}", values.len())));
        }
        match kind.as_str() {
            "adversary" => {
                if values.len() != 2 {
                    return Err(bad("adversary snapshot must hold 2 values".into()));
                }
                Ok(Snapshot::Adversary(AdversaryParams::new(values[0], values[1])))
            }
            other => {
                let kind: ModelKind = other.parse()?;
                Ok(Snapshot::Classifier(ModelParams::from_flat(kind, &arch, &values)?))
            }
        }
    }
}

fn write(snapshot: &Snapshot, path: &Path) -> Result<()> {
    fs::write(path, snapshot.to_text()).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Snapshot::parse(&text, path)
}

pub fn write_params(params: &ModelParams, path: impl AsRef<Path>) -> Result<()> {
    write(&Snapshot::Classifier(params.clone()), path.as_ref())
}

pub fn write_adversary(adv: &AdversaryParams, path: impl AsRef<Path>) -> Result<()> {
    write(&Snapshot::Adversary(*adv), path.as_ref())
}

pub fn read_params(path: impl AsRef<Path>) -> Result<ModelParams> {
    let path = path.as_ref();
    match read(path)? {
        Snapshot::Classifier(p) => Ok(p),
        Snapshot::Adversary(_) => Err(Error::format(path, "expected classifier parameters")),
    }
}

pub fn read_adversary(path: impl AsRef<Path>) -> Result<AdversaryParams> {
    let path = path.as_ref();
    match read(path)? {
        Snapshot::Adversary(a) => Ok(a),
        Snapshot::Classifier(_) => Err(Error::format(path, "expected adversary parameters")),
    }
}
