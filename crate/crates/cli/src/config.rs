//! `--config FILE`: each `key = value` of a TOML table becomes `--key value`
//! inserted right after the subcommand, so flags given on the command line
//! still win.

use std::ffi::OsString;
use std::path::Path;

use crate::Failure;

const SUBCOMMANDS: [&str; 5] = ["simulate", "estimate", "dist", "cite", "rerun"];

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

fn to_flags(table: &toml::Table) -> Result<Vec<OsString>, Failure> {
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        let values = match value {
            toml::Value::Array(items) => items.clone(),
            other => vec![other.clone()],
        };
        for v in values {
            match v {
                toml::Value::Boolean(true) => out.push(flag.clone().into()),
                toml::Value::Boolean(false) => {}
                toml::Value::String(s) => out.extend([flag.clone().into(), s.into()]),
                toml::Value::Integer(i) => out.extend([flag.clone().into(), i.to_string().into()]),
                toml::Value::Float(x) => out.extend([flag.clone().into(), x.to_string().into()]),
                toml::Value::Datetime(d) => out.extend([flag.clone().into(), d.to_string().into()]),
                toml::Value::Array(_) | toml::Value::Table(_) => {
                    return Err(Failure::Invalid(format!("config key `{key}`: nested values are not supported")));
                }
            }
        }
    }
    Ok(out)
}

pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Failure::Invalid(format!("{}: {e}", Path::new(&path).display())))?;
    let flags = to_flags(&table)?;
    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut out = args[..=pos].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_from_table() {
        let table: toml::Table = "m = 5\nm_hat = 3\nalpha = 0.6\nexport_graph = true\nstrict_seed = false\nseed = \"complete:3\"\ncutoff = 1992-02-29"
            .parse()
            .unwrap();
        let flags: Vec<String> = to_flags(&table)
            .unwrap()
            .into_iter()
            .map(|s| s.into_string().unwrap())
            .collect();
        assert_eq!(
            flags,
            [
                "--alpha", "0.6", "--cutoff", "1992-02-29", "--export-graph", "--m", "5", "--m-hat", "3", "--seed",
                "complete:3"
            ]
        );
    }

    #[test]
    fn no_config_is_identity() {
        let args = os(&["pamix", "simulate", "--m", "2"]);
        assert_eq!(expand(args.clone()).unwrap(), args);
    }
}
