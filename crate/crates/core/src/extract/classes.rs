use std::collections::HashMap;
use std::path::Path;

use super::ExtractError;

/// One-level mapping from word senses to semantic class names.
///
/// File format: UTF-8, two tab-separated columns `sense<TAB>class`, one entry
/// per line, `#` starts a comment. Lookups are case-insensitive and unknown
/// senses map to themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassMap {
    classes: HashMap<String, String>,
}

const BUNDLED: &str = include_str!("../../data/atis.classes");

impl ClassMap {
    pub fn new() -> Self {
        ClassMap::default()
    }

    /// The class list that ships with the bundled grammar.
    pub fn bundled() -> ClassMap {
        ClassMap::parse(BUNDLED).expect("bundled class list is valid")
    }

    pub fn insert(&mut self, sense: &str, class: impl Into<String>) {
        self.classes.insert(sense.to_lowercase(), class.into());
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn get(&self, sense: &str) -> Option<&str> {
        self.classes.get(&sense.to_lowercase()).map(String::as_str)
    }

    pub fn parse(text: &str) -> Result<ClassMap, ExtractError> {
        let mut map = ClassMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(s), Some(c), None) if !s.trim().is_empty() && !c.trim().is_empty() => {
                    map.insert(s.trim(), c.trim());
                }
                _ => {
                    return Err(ExtractError::ClassMapSyntax {
                        line: n + 1,
                        message: "expected two tab-separated columns".into(),
                    })
                }
            }
        }
        Ok(map)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ClassMap, ExtractError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ExtractError::Io(format!("{}: {e}", path.display())))?;
        ClassMap::parse(&text)
    }
}
