//! Command-line workbench: experiment configs, result records and tables.

pub mod commands;
pub mod names;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use commands::*;

pub const TOOL_VERSION: &str = concat!("hyperstab ", env!("CARGO_PKG_VERSION"));

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Build a named construction.
    Make(MakeArgs),
    /// Report invariants, freeness and hull membership of a graph.
    Check(CheckArgs),
    /// Exact extremal numbers by exhaustive search or pattern blowups.
    Ex(ExArgs),
    /// Maximize the Lagrangian of one or more graphs.
    Lagrangian(LagrangianArgs),
    /// Symmetrize a family-free graph.
    Symmetrize(SymmetrizeArgs),
    /// Scan every free graph in a range for stability counterexamples.
    Scan(ScanArgs),
    /// Test vertex-extendability of one graph, or of every free graph in a range.
    Extendable(ExtendableArgs),
    /// Count free graphs up to isomorphism.
    Enum(EnumArgs),
    /// Look for free graphs that admit a homomorphism from a member.
    Invariance(InvarianceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Make(_) => "make",
            Command::Check(_) => "check",
            Command::Ex(_) => "ex",
            Command::Lagrangian(_) => "lagrangian",
            Command::Symmetrize(_) => "symmetrize",
            Command::Scan(_) => "scan",
            Command::Extendable(_) => "extendable",
            Command::Enum(_) => "enum",
            Command::Invariance(_) => "invariance",
        }
    }

    pub fn execute(&self, ctx: &Ctx) -> Result<Output> {
        match self {
            Command::Make(a) => a.execute(ctx),
            Command::Check(a) => a.execute(ctx),
            Command::Ex(a) => a.execute(ctx),
            Command::Lagrangian(a) => a.execute(ctx),
            Command::Symmetrize(a) => a.execute(ctx),
            Command::Scan(a) => a.execute(ctx),
            Command::Extendable(a) => a.execute(ctx),
            Command::Enum(a) => a.execute(ctx),
            Command::Invariance(a) => a.execute(ctx),
        }
    }

    /// Builds a command from its name and a flat argument object.
    pub fn from_value(name: &str, args: Value) -> Result<Command> {
        fn de<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
            serde_json::from_value(v).map_err(|e| hyperstab::Error::Parse(format!("config: {e}")).into())
        }
        Ok(match name {
            "make" => Command::Make(de(args)?),
            "check" => Command::Check(de(args)?),
            "ex" => Command::Ex(de(args)?),
            "lagrangian" => Command::Lagrangian(de(args)?),
            "symmetrize" => Command::Symmetrize(de(args)?),
            "scan" => Command::Scan(de(args)?),
            "extendable" => Command::Extendable(de(args)?),
            "enum" => Command::Enum(de(args)?),
            "invariance" => Command::Invariance(de(args)?),
            other => bail!(hyperstab::Error::Parse(format!("unknown command `{other}`"))),
        })
    }
}

/// One experiment as a single JSON document.
///
/// `params` holds the command's arguments by their long-flag names with
/// underscores (`n`, `eps`, `witness_dir`, ...) plus the optional `seed` and
/// `max_graphs`. `outputs` maps `record` and `table` to paths for the result
/// record and its CSV table; any other key is passed through as a path argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub outputs: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| hyperstab::Error::Parse(format!("config: {e}")).into())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    /// The on-disk form: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    /// SHA-256 of the on-disk form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn context(&self) -> Result<Ctx> {
        let seed = match self.params.get("seed") {
            None => 0,
            Some(v) => v.as_u64().ok_or_else(|| hyperstab::Error::Parse("config: seed must be an unsigned integer".into()))?,
        };
        let max_graphs = match self.params.get("max_graphs") {
            None => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| hyperstab::Error::Parse("config: max_graphs must be an unsigned integer".into()))? as usize),
        };
        Ok(Ctx { seed, max_graphs })
    }

    pub fn to_command(&self) -> Result<Command> {
        let mut args = Map::new();
        for (k, v) in &self.params {
            if k != "seed" && k != "max_graphs" {
                args.insert(k.clone(), v.clone());
            }
        }
        if let Some(f) = &self.family {
            args.insert("family".into(), Value::String(f.clone()));
        }
        if let Some(c) = &self.class {
            args.insert("class".into(), Value::String(c.clone()));
        }
        for (k, v) in &self.outputs {
            if k != "record" && k != "table" {
                args.insert(k.clone(), Value::String(v.clone()));
            }
        }
        Command::from_value(&self.command, Value::Object(args))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_digest: String,
    pub command: String,
    pub tool_version: String,
    /// Only filled with `--timing`, so that records stay reproducible by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    /// Files written by the command, in order.
    pub files: Vec<String>,
    pub outputs: Value,
}

/// Runs a config. Returns the record together with the command output so the
/// caller can write its files.
pub fn run(config: &ExperimentConfig, timing: bool) -> Result<(ResultRecord, Output)> {
    let ctx = config.context()?;
    let cmd = config.to_command()?;
    let start = std::time::Instant::now();
    let out = cmd.execute(&ctx)?;
    let wall = start.elapsed().as_millis() as u64;
    let record = ResultRecord {
        config_digest: config.digest(),
        command: cmd.name().to_string(),
        tool_version: TOOL_VERSION.to_string(),
        wall_time_ms: timing.then_some(wall),
        files: out.files.iter().map(|(p, _)| p.display().to_string()).collect(),
        outputs: out.json.clone(),
    };
    Ok((record, out))
}

/// Writes the files of an output, creating parent directories.
pub fn write_files(files: &[(PathBuf, String)]) -> Result<()> {
    for (path, body) in files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Formats a float with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        format!("{:.*}", (11 - e).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&if prefix.is_empty() { i.to_string() } else { format!("{prefix}.{i}") }, x, rows);
            }
        }
        Value::Number(n) if n.is_f64() => rows.push((prefix.to_string(), fmt12(n.as_f64().unwrap()))),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// One CSV row per leaf of each record's outputs.
///
/// Columns: `config_digest`, `command`, `field`, `value`. Fields are dotted
/// paths into the output JSON, array elements by index.
pub fn emit_table(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["config_digest", "command", "field", "value"])?;
    for r in records {
        let mut rows = Vec::new();
        flatten("", &r.outputs, &mut rows);
        for (field, value) in rows {
            w.write_record([r.config_digest.as_str(), r.command.as_str(), field.as_str(), value.as_str()])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Exit status for an error: 2 parse, 3 budget, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<hyperstab::Error>() {
            return match e {
                hyperstab::Error::Parse(_)
                | hyperstab::Error::BadEdge { .. }
                | hyperstab::Error::DuplicateEdge(_)
                | hyperstab::Error::VertexOutOfRange { .. }
                | hyperstab::Error::TooManyVertices(_) => 2,
                hyperstab::Error::Budget(_) => 3,
                _ => 1,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
    }
    1
}
