//! Merging a TOML defaults file into the command line.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};

const SUBCOMMANDS: [&str; 5] = ["gen", "verify", "sweep", "stats", "classes"];
const GLOBAL_WITH_VALUE: [&str; 5] = ["-o", "--output", "--threads", "--config", "--reproduce"];

/// Flags encoded by a TOML table. Arrays become comma lists, `true` becomes a
/// bare switch and `false` is dropped.
pub fn flags_from_toml(text: &str) -> Result<Vec<OsString>> {
    let table: toml::Table = text.parse().context("config file is not valid TOML")?;
    let mut out = Vec::new();
    for (key, value) in table {
        if key == "config" {
            bail!("config files cannot include other config files");
        }
        let flag = format!("--{key}");
        match value {
            toml::Value::Boolean(true) => out.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(scalar).collect::<Result<_>>()?;
                out.push(flag.into());
                out.push(parts.join(",").into());
            }
            v => {
                out.push(flag.into());
                out.push(scalar(&v)?.into());
            }
        }
    }
    Ok(out)
}

fn scalar(v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        other => bail!("unsupported config value {other}"),
    })
}

/// Path given to `--config`, if any.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
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

/// Drop config flags that are also given explicitly. List flags append in
/// clap rather than override, so this has to happen before parsing.
fn without_explicit(extra: Vec<OsString>, args: &[OsString]) -> Vec<OsString> {
    let given: Vec<String> = args
        .iter()
        .filter_map(|a| a.to_str())
        .filter(|a| a.starts_with("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut out = Vec::new();
    let mut skipping = false;
    for a in extra {
        let s = a.to_string_lossy().into_owned();
        if s.starts_with("--") {
            skipping = given.contains(&s);
        }
        if !skipping {
            out.push(a);
        }
    }
    out
}

/// Insert config flags right after the subcommand (or at the end). Flags
/// given on the command line win.
pub fn merge(args: Vec<OsString>, config: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(config)
        .with_context(|| format!("cannot read config file {}", config.display()))?;
    let extra = without_explicit(flags_from_toml(&text)?, &args);
    let mut pos = args.len();
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&s.as_ref()) {
            pos = i + 1;
            break;
        }
        i += 1;
    }
    let mut out = args[..pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[pos..]);
    Ok(out)
}
