//! Bundled scenario configs and user scenario directories.

use std::path::{Path, PathBuf};

use crate::config::ScenarioConfig;
use crate::error::RunError;

/// Environment variable naming an extra directory of `*.json` scenarios.
pub const SCENARIO_DIR_ENV: &str = "SCRAP_SCENARIO_DIR";

/// Bundled scenarios in listing order.
pub const BUNDLED: [(&str, &str); 10] = [
    ("fig3", include_str!("../scenarios/fig3.json")),
    ("fig4", include_str!("../scenarios/fig4.json")),
    ("fig5_damp10", include_str!("../scenarios/fig5_damp10.json")),
    ("fig6_damp3000", include_str!("../scenarios/fig6_damp3000.json")),
    ("fig7", include_str!("../scenarios/fig7.json")),
    ("entangle", include_str!("../scenarios/entangle.json")),
    ("qst_atom", include_str!("../scenarios/qst_atom.json")),
    ("qst_cavity", include_str!("../scenarios/qst_cavity.json")),
    ("network3", include_str!("../scenarios/network3.json")),
    ("surface", include_str!("../scenarios/surface.json")),
];

/// The damped photon-generation run written in laboratory units. Shipped as
/// an example file, not part of the bundled list.
pub const PHYSICAL_EXAMPLE: &str = include_str!("../scenarios/examples/fig5_physical_units.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Bundled,
    User(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioEntry {
    pub name: String,
    pub source: Source,
}

pub fn bundled(name: &str) -> Option<ScenarioConfig> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ScenarioConfig::from_json(text).expect("bundled scenarios are valid"))
}

fn user_entries(dir: &Path) -> Vec<ScenarioEntry> {
    let Ok(read) = std::fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut paths: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .filter_map(|p| {
            let name = p.file_stem()?.to_str()?.to_string();
            Some(ScenarioEntry { name, source: Source::User(p) })
        })
        .collect()
}

/// Bundled scenarios, then the `*.json` files of `user_dir` sorted by name.
/// A missing user directory contributes nothing.
pub fn list_scenarios(user_dir: Option<&Path>) -> Vec<ScenarioEntry> {
    let mut out: Vec<ScenarioEntry> = BUNDLED
        .iter()
        .map(|(n, _)| ScenarioEntry { name: n.to_string(), source: Source::Bundled })
        .collect();
    if let Some(dir) = user_dir {
        out.extend(user_entries(dir));
    }
    out
}

/// Text form of [`list_scenarios`], one scenario per line.
pub fn listing(user_dir: Option<&Path>) -> String {
    let mut out = String::new();
    for e in list_scenarios(user_dir) {
        match e.source {
            Source::Bundled => out.push_str(&format!("{}\tbundled\n", e.name)),
            Source::User(p) => out.push_str(&format!("{}\t{}\n", e.name, p.display())),
        }
    }
    out
}

/// Resolves a `run` argument: an existing file path first, then a bundled
/// name, then a name in the user directory.
pub fn resolve(arg: &str, user_dir: Option<&Path>) -> Result<ScenarioConfig, RunError> {
    let path = Path::new(arg);
    if path.is_file() {
        return ScenarioConfig::from_path(path);
    }
    if let Some((_, text)) = BUNDLED.iter().find(|(n, _)| *n == arg) {
        return ScenarioConfig::from_json(text);
    }
    if let Some(dir) = user_dir {
        let candidate = dir.join(format!("{arg}.json"));
        if candidate.is_file() {
            return ScenarioConfig::from_path(&candidate);
        }
    }
    Err(RunError::Config(format!("no config file or scenario named `{arg}`")))
}
