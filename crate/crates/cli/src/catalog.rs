//! Scenario lookup: the bundled set plus any JSON files in a directory.

use std::fs;
use std::path::Path;

use colav_core::scenario::load_scenario_with;
use colav_core::{bundled_scenarios, Error, Result, Scenario};

/// Bundled scenarios followed by every `*.json` file in `dir`, sorted by
/// file name. A file whose id matches a bundled scenario replaces it.
pub fn load_catalog(dir: Option<&Path>, max_speed: f64) -> Result<Vec<Scenario>> {
    let mut out = bundled_scenarios();
    let Some(dir) = dir else {
        return Ok(out);
    };
    let mut files: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    for path in files {
        let scenario = load_file(&path, max_speed)?;
        match out.iter_mut().find(|s| s.id == scenario.id) {
            Some(slot) => *slot = scenario,
            None => out.push(scenario),
        }
    }
    Ok(out)
}

pub fn load_file(path: &Path, max_speed: f64) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_scenario_with(&text, max_speed).map_err(|e| match e {
        Error::Parse { path: field, message } => Error::Parse {
            path: format!("{}: {field}", path.display()),
            message,
        },
        Error::Validation { path: field, message } => Error::Validation {
            path: format!("{}: {field}", path.display()),
            message,
        },
        other => other,
    })
}

/// Resolves `--scenario`: an existing file path, otherwise a bundled id.
pub fn resolve(arg: &str, max_speed: f64) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.is_file() {
        return load_file(path, max_speed);
    }
    let all = bundled_scenarios();
    let ids: Vec<&str> = all.iter().map(|s| s.id.as_str()).collect();
    all.iter().find(|s| s.id == arg).cloned().ok_or_else(|| {
        Error::NotFound(format!(
            "`{arg}` is neither a file nor a bundled scenario ({})",
            ids.join(", ")
        ))
    })
}
