use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AutomatonSystem, GeneratorSpec};
use crate::error::{Error, Result};
use crate::word::Letter;

/// An action system as read from a JSON or TOML file.
///
/// ```json
/// {"alphabet": 2,
///  "generators": [{"name": "t", "table": [{"image": 1}, {"image": 0, "restriction": ["t"]}]}]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub alphabet: usize,
    pub generators: Vec<GeneratorEntry>,
    /// Kept for documentation; not used by any computation.
    #[serde(default)]
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub name: String,
    pub table: Vec<TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub image: Letter,
    #[serde(default)]
    pub restriction: RestrictionWord,
}

/// A generator word, either as a list of names (`["b", "c^-1"]`) or as a
/// string of one-character names (`"bc"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RestrictionWord {
    Names(Vec<String>),
    Compact(String),
}

impl Default for RestrictionWord {
    fn default() -> Self {
        RestrictionWord::Names(Vec::new())
    }
}

impl RestrictionWord {
    fn names(&self) -> Vec<String> {
        match self {
            RestrictionWord::Names(v) => v.iter().filter(|s| s.as_str() != "e").cloned().collect(),
            RestrictionWord::Compact(s) => {
                let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
                let mut out = Vec::new();
                let mut i = 0;
                while i < chars.len() {
                    let mut t = chars[i].to_string();
                    i += 1;
                    if chars[i..].starts_with(&['^', '-', '1']) {
                        t.push_str("^-1");
                        i += 3;
                    }
                    if t != "e" {
                        out.push(t);
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecFormat {
    Json,
    Toml,
}

impl SystemSpec {
    pub fn build(&self) -> Result<AutomatonSystem> {
        let gens = self
            .generators
            .iter()
            .map(|g| GeneratorSpec {
                name: g.name.clone(),
                table: g.table.iter().map(|t| (t.image, t.restriction.names())).collect(),
            })
            .collect();
        let name = self.name.clone().unwrap_or_else(|| "custom".to_string());
        AutomatonSystem::new(&name, self.alphabet, gens, self.relations.clone())
    }
}

pub fn parse_spec(text: &str, format: SpecFormat) -> Result<AutomatonSystem> {
    let spec: SystemSpec = match format {
        SpecFormat::Json => serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec file: {e}")))?,
        SpecFormat::Toml => toml::from_str(text).map_err(|e| Error::Parse(format!("spec file: {e}")))?,
    };
    spec.build()
}

/// Loads a spec file; `.toml` files are read as TOML, anything else as JSON.
pub fn load_spec(path: &Path) -> Result<AutomatonSystem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => SpecFormat::Toml,
        _ => SpecFormat::Json,
    };
    parse_spec(&text, format)
}
