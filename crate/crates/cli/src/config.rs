//! `--config FILE` support.
//!
//! Each `key = value` entry becomes `--key value` (underscores read as dashes),
//! inserted directly after the subcommand so that flags given on the command
//! line override it. `true` / `false` turn a switch on or leave it off.

use std::ffi::OsString;
use std::fmt;
use std::fs;

use bowclf::corpus::synth::parse_flat_config;

#[derive(Debug)]
pub enum ConfigError {
    Io {
        path: String,
        source: std::io::Error,
    },
    Syntax {
        path: String,
        message: String,
    },
}

impl ConfigError {
    pub fn exit_code(&self) -> u8 {
        match self {
            ConfigError::Io { .. } => 1,
            ConfigError::Syntax { .. } => 2,
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "reading config {path}: {source}"),
            ConfigError::Syntax { path, message } => write!(f, "config {path}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Position of the subcommand and the value of `--config`, if any.
fn locate(argv: &[OsString]) -> Option<(usize, Option<OsString>)> {
    let sub = argv
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))?
        + 1;
    let mut rest = argv[sub + 1..].iter();
    while let Some(arg) = rest.next() {
        let s = arg.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return Some((sub, rest.next().cloned()));
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some((sub, Some(v.into())));
        }
    }
    Some((sub, None))
}

pub fn flags_from(text: &str) -> Result<Vec<OsString>, String> {
    let mut flags = Vec::new();
    for (key, value) in parse_flat_config(text)? {
        if key == "config" {
            return Err("config files cannot include other config files".into());
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value.as_str() {
            "true" => flags.push(flag.into()),
            "false" => {}
            _ => {
                flags.push(flag.into());
                flags.push(value.into());
            }
        }
    }
    Ok(flags)
}

pub fn expand(mut argv: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some((sub, Some(path))) = locate(&argv) else {
        return Ok(argv);
    };
    let shown = path.to_string_lossy().into_owned();
    let text = fs::read_to_string(&path).map_err(|source| ConfigError::Io {
        path: shown.clone(),
        source,
    })?;
    let flags = flags_from(&text).map_err(|message| ConfigError::Syntax {
        path: shown,
        message,
    })?;
    argv.splice(sub + 1..sub + 1, flags);
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn entries_become_flags() {
        let flags = flags_from("# run\nfolds = 3\nmax_iter = 7\nleakage = true\nverbose = false\n")
            .unwrap();
        assert_eq!(flags, os(&["--folds", "3", "--max-iter", "7", "--leakage"]));
    }

    #[test]
    fn inserted_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "folds = 3\n").unwrap();
        let p = path.to_str().unwrap();
        let argv = expand(os(&["bowclf", "eval", "--config", p, "--folds", "4"])).unwrap();
        assert_eq!(
            argv,
            os(&["bowclf", "eval", "--folds", "3", "--config", p, "--folds", "4"])
        );
    }

    #[test]
    fn untouched_without_config() {
        let argv = os(&["bowclf", "train", "--input", "x.jsonl"]);
        assert_eq!(expand(argv.clone()).unwrap(), argv);
        assert_eq!(expand(os(&["bowclf"])).unwrap(), os(&["bowclf"]));
    }

    #[test]
    fn errors() {
        assert!(flags_from("no equals sign").is_err());
        assert!(flags_from("config = other.conf").is_err());
        match expand(os(&["bowclf", "eval", "--config", "/nonexistent/x.conf"])) {
            Err(e) => assert_eq!(e.exit_code(), 1),
            Ok(_) => panic!("missing file accepted"),
        }
    }
}
