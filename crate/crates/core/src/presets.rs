//! Bundled experiment configurations.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

const PRESETS: [(&str, &str); 5] = [
    (
        "example_chaotic",
        include_str!("../presets/example_chaotic.json"),
    ),
    (
        "example_supercyclic_only",
        include_str!("../presets/example_supercyclic_only.json"),
    ),
    ("bergman", include_str!("../presets/bergman.json")),
    (
        "zero_one_failure",
        include_str!("../presets/zero_one_failure.json"),
    ),
    (
        "classical_rolewicz",
        include_str!("../presets/classical_rolewicz.json"),
    ),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

/// Raw JSON of a preset. A trailing `.json` in `name` is ignored.
pub fn preset_source(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
}

pub fn load_preset(name: &str) -> Result<ExperimentConfig> {
    let src = preset_source(name).ok_or_else(|| {
        let known: Vec<&str> = preset_names().collect();
        Error::Config(format!(
            "unknown preset `{name}`; available: {}",
            known.join(", ")
        ))
    })?;
    ExperimentConfig::from_json(src)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse() {
        for name in preset_names() {
            load_preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset_source("bergman.json").is_some());
        assert!(load_preset("nope").is_err());
    }
}
