//! key=value configuration files.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::Value;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got {raw:?}", i + 1);
        };
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn given(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&prefix)
    })
}

/// Appends options from the `--config` file that the command line does not set.
pub fn merge(mut args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", Path::new(&path).display()))?;
    for (key, value) in parse(&text)? {
        if given(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => args.push(format!("--{key}={value}").into()),
        }
    }
    Ok(args)
}

/// Renders the options of a run as key=value lines that [`merge`] accepts.
pub fn render<T: Serialize>(options: &T, jobs: Option<usize>) -> anyhow::Result<String> {
    let Value::Object(map) = serde_json::to_value(options)? else {
        bail!("options do not serialize to a map");
    };
    let mut out = String::new();
    if let Some(j) = jobs {
        out.push_str(&format!("jobs={j}\n"));
    }
    for (k, v) in map {
        let key = k.replace('_', "-");
        let text = match v {
            Value::Null => continue,
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => n.to_string(),
            Value::String(s) => s,
            Value::Array(items) if items.is_empty() => continue,
            Value::Array(items) => items
                .iter()
                .map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()))
                .collect::<Vec<_>>()
                .join(","),
            Value::Object(_) => bail!("nested option {k}"),
        };
        out.push_str(&format!("{key}={text}\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parse_skips_comments() {
        let kv = parse("# run\nomega = 3\n\nd_max=9 # trailing\n").unwrap();
        assert_eq!(kv, vec![("omega".into(), "3".into()), ("d-max".into(), "9".into())]);
        assert!(parse("nonsense").is_err());
    }

    #[test]
    fn command_line_wins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "omega=3\noracle=true\nmodel=pure-z\n").unwrap();
        let args = os(&["gtclab", "distance", "--omega=2", "--config", path.to_str().unwrap()]);
        let merged = merge(args).unwrap();
        let tail: Vec<String> = merged[5..].iter().map(|s| s.to_string_lossy().into_owned()).collect();
        assert_eq!(tail, vec!["--oracle", "--model=pure-z"]);
    }
}
