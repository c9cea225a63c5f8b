//! Optional `key = value` parameter files.
//!
//! Keys mirror long flag names. File values are spliced into the argument
//! list ahead of the user's own flags, and since every argument overrides
//! itself, a flag given on the command line wins.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, CommandFactory};

use crate::cli::Cli;

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!(
                "line {}: expected `key = value`, got `{}`",
                no + 1,
                raw.trim()
            );
        };
        let key = k.trim().replace('_', "-");
        let value = v.trim().to_string();
        if key.is_empty() {
            bail!("line {}: empty key", no + 1);
        }
        out.push((key, value));
    }
    Ok(out)
}

/// Position of the `--config` value and the index just past the leaf
/// subcommand name, if both are present.
fn locate(args: &[OsString]) -> (Option<String>, Option<(usize, Vec<String>)>) {
    let root = Cli::command();
    let mut config = None;
    let mut path: Vec<String> = Vec::new();
    let mut cmd = &root;
    let mut insert_at = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--config" {
            config = args.get(i + 1).map(|v| v.to_string_lossy().into_owned());
            i += 2;
            continue;
        }
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.to_string());
        } else if !a.starts_with('-') && insert_at.is_none() {
            if let Some(sub) = cmd.find_subcommand(&a) {
                path.push(a.clone());
                cmd = sub;
                if !cmd.has_subcommands() {
                    insert_at = Some(i + 1);
                }
            }
        }
        i += 1;
    }
    (config, insert_at.map(|at| (at, path)))
}

/// Expands `--config FILE` into flags for the chosen subcommand.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let (Some(file), Some((at, path))) = locate(&args) else {
        return Ok(args);
    };
    let entries = read(Path::new(&file))?;

    let root = Cli::command();
    let mut leaf = &root;
    for name in &path {
        leaf = leaf.find_subcommand(name).expect("path found by locate");
    }
    let every_flag = all_long_flags(&root);

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if !every_flag.contains(&key) {
            bail!("{file}: unknown key `{key}`");
        }
        if key == "config" {
            bail!("{file}: config files cannot include other config files");
        }
        let arg = leaf
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()));
        // keys that belong to other subcommands are ignored so one file can
        // serve several commands
        let Some(arg) = arg else { continue };
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => injected.push(format!("--{key}").into()),
                "false" => {}
                _ => bail!("{file}: `{key}` takes true or false, got `{value}`"),
            }
        } else {
            injected.push(format!("--{key}={value}").into());
        }
    }
    let mut out = args[..at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn read(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

fn all_long_flags(cmd: &clap::Command) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = cmd
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();
    for sub in cmd.get_subcommands() {
        out.extend(all_long_flags(sub));
    }
    out
}
