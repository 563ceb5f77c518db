//! Merging a TOML flag file into the command line.
//!
//! Keys are flag names without the leading dashes. They are inserted right
//! after the subcommand name, so anything given on the command line wins
//! (repeatable flags accumulate).

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use csir_core::KvBlock;
use serde::Serialize;

const SUBCOMMANDS: [&str; 7] = [
    "induce-lexicon",
    "code-switch",
    "mix",
    "eval",
    "analyze-overlap",
    "toy-experiment",
    "lexicon-stats",
];

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn flag_args(table: &toml::Table) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &toml::Value| -> Result<String> {
            Ok(match v {
                toml::Value::String(s) => s.clone(),
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                other => bail!("config key {key}: unsupported value {other}"),
            })
        };
        match value {
            toml::Value::Boolean(true) => out.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                for item in items {
                    out.push(flag.clone().into());
                    out.push(scalar(item)?.into());
                }
            }
            v => {
                out.push(flag.into());
                out.push(scalar(v)?.into());
            }
        }
    }
    Ok(out)
}

/// Returns `args` with the config file's flags spliced in.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table =
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let extra = flag_args(&table)?;
    let pos = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map_or(args.len(), |i| i + 1);
    let mut merged = args[..pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[pos..]);
    Ok(merged)
}

/// Flattens the resolved arguments into `key=value` pairs.
pub fn resolved<T: Serialize>(value: &T) -> Result<KvBlock> {
    let v = toml::Value::try_from(value).context("serializing resolved config")?;
    let mut kv = KvBlock::new();
    flatten("", &v, &mut kv);
    Ok(kv)
}

fn flatten(prefix: &str, v: &toml::Value, kv: &mut KvBlock) {
    match v {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, kv);
            }
        }
        toml::Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(render).collect();
            kv.push(prefix, parts.join(","));
        }
        other => {
            kv.push(prefix, render(other));
        }
    }
}

fn render(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
