//! `key = value` config files, merged into the argument list ahead of the
//! command-line flags so that explicit flags win.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines; `#` starts a comment. `key = true` becomes a
/// bare `--key`, `key = false` is dropped.
pub fn parse(text: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got '{raw}'", lineno + 1);
        };
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            bail!("config line {}: bad key '{key}'", lineno + 1);
        }
        if key == "config" {
            bail!("config line {}: config files cannot include other config files", lineno + 1);
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}

/// Removes `--config PATH` (or `--config=PATH`) from `argv` and splices the
/// file's flags in directly after the subcommand name.
pub fn expand(mut argv: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = if let Some(p) = argv[pos].strip_prefix("--config=") {
        let p = p.to_string();
        argv.remove(pos);
        p
    } else {
        if pos + 1 >= argv.len() {
            bail!("--config needs a file path");
        }
        let p = argv.remove(pos + 1);
        argv.remove(pos);
        p
    };
    if argv.iter().any(|a| a == "--config" || a.starts_with("--config=")) {
        bail!("--config may be given only once");
    }
    let text = fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config file {path}"))?;
    let extra = parse(&text)?;
    // argv[0] is the program, argv[1] the subcommand.
    let at = argv.len().min(2);
    argv.splice(at..at, extra);
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_flags_and_comments() {
        let args = parse("# sweep\nnu = 0.5\n--t-grid=0:1:3 # inline\nquick = true\nparallel = false\n\n").unwrap();
        assert_eq!(args, ["--nu", "0.5", "--t-grid", "0:1:3", "--quick"]);
        assert!(parse("nu 0.5").is_err());
        assert!(parse("config = other.cfg").is_err());
    }

    #[test]
    fn config_flags_precede_command_line_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "nu = 0.3\nsigma = 2\n").unwrap();
        let argv: Vec<String> = ["tfse", "ml", "--config", path.to_str().unwrap(), "--nu", "0.7"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let out = expand(argv).unwrap();
        assert_eq!(out, ["tfse", "ml", "--nu", "0.3", "--sigma", "2", "--nu", "0.7"]);
        let untouched = vec!["tfse".to_string(), "verify".to_string()];
        assert_eq!(expand(untouched.clone()).unwrap(), untouched);
    }
}
