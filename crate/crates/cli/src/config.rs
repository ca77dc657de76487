use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use ordgeo::search::SearchConfig;
use ordgeo::Signature;
use serde::Deserialize;

/// Optional TOML file: extra signature symbols and search bounds.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub signature: SignatureSection,
    pub search: SearchConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignatureSection {
    /// Predicate name to arity.
    pub predicates: BTreeMap<String, usize>,
    /// Function name to arity.
    pub functions: BTreeMap<String, usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<ConfigFile> {
        let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&src).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn signature(&self, with_definitions: bool) -> Signature {
        let mut sig = if with_definitions { Signature::with_definitions() } else { Signature::geometry() };
        for (name, arity) in &self.signature.predicates {
            sig.add_predicate(name, *arity);
        }
        for (name, arity) in &self.signature.functions {
            sig.add_function(name, *arity);
        }
        sig
    }
}
