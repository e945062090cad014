//! `--config FILE`: a flat JSON object whose keys are long flag names of the
//! chosen subcommand. Its values are appended as ordinary flags for every
//! argument the command line did not set, then the whole thing is parsed
//! again.

use anyhow::{bail, Context, Result};
use clap::parser::ValueSource;
use clap::{ArgMatches, Command};
use serde_json::Value;
use std::ffi::OsString;
use std::path::Path;

fn scalar(v: &Value, key: &str) -> Result<String> {
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        _ => bail!("config key `{key}`: expected a string, number, boolean or array of those"),
    })
}

/// Tokens to append to `argv` so the config values take effect.
pub fn config_tokens(path: &Path, cmd: &Command, matches: &ArgMatches) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let json: Value = serde_json::from_str(&text).with_context(|| format!("config {} is not valid JSON", path.display()))?;
    let Value::Object(map) = json else {
        bail!("config {} must hold a JSON object", path.display());
    };
    let Some((name, sub_matches)) = matches.subcommand() else {
        return Ok(Vec::new());
    };
    let sub = cmd
        .find_subcommand(name)
        .expect("matched subcommand exists");

    let mut tokens = Vec::new();
    for (key, value) in map {
        let flag = key.replace('_', "-");
        if flag == "config" {
            bail!("config files cannot nest `config`");
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(flag.as_str())) else {
            bail!("unknown config key `{key}` for `{name}`");
        };
        let id = arg.get_id().as_str();
        if sub_matches.value_source(id) == Some(ValueSource::CommandLine) {
            continue;
        }
        let takes_value = arg.get_num_args().map(|r| r.takes_values()).unwrap_or(true);
        if !takes_value {
            match value {
                Value::Bool(true) => tokens.push(format!("--{flag}").into()),
                Value::Bool(false) => {}
                _ => bail!("config key `{key}` is a switch and needs true or false"),
            }
            continue;
        }
        let text = match &value {
            Value::Array(items) => items
                .iter()
                .map(|v| scalar(v, &key))
                .collect::<Result<Vec<_>>>()?
                .join(","),
            Value::Null => continue,
            v => scalar(v, &key)?,
        };
        tokens.push(format!("--{flag}={text}").into());
    }
    Ok(tokens)
}
