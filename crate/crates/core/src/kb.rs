//! The entity catalog.
//!
//! Entities file format, one record per line, tab separated:
//!
//! ```text
//! id<TAB>name<TAB>description[<TAB>industry]
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Two entities may
//! share a name; ids must be unique.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: String,
    pub name: String,
    /// May be empty.
    pub description: String,
    pub industry: Option<String>,
}

impl Entity {
    pub fn new(id: impl Into<String>, name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            description: description.into(),
            industry: None,
        }
    }

    pub fn with_industry(mut self, industry: impl Into<String>) -> Self {
        self.industry = Some(industry.into());
        self
    }
}

/// Immutable after construction.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    entities: Vec<Entity>,
    by_id: HashMap<String, usize>,
    by_name: HashMap<String, Vec<usize>>,
}

impl KnowledgeBase {
    pub fn from_entities(entities: Vec<Entity>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(entities.len());
        let mut by_name: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in entities.iter().enumerate() {
            if e.id.is_empty() {
                return Err(Error::Config(format!("entity #{i} has an empty id")));
            }
            if e.name.is_empty() {
                return Err(Error::Config(format!("entity `{}` has an empty name", e.id)));
            }
            if by_id.insert(e.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            by_name.entry(e.name.clone()).or_default().push(i);
        }
        Ok(Self {
            entities,
            by_id,
            by_name,
        })
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entities = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (line_no, line) in fsutil::data_lines(text) {
            let fields: Vec<&str> = line.split('\t').collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("expected 3 or 4 tab-separated fields, found {}", fields.len()),
                ));
            }
            let (id, name) = (fields[0].trim(), fields[1].trim());
            if id.is_empty() {
                return Err(Error::parse(origin, line_no, "empty entity id"));
            }
            if name.is_empty() {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("entity `{id}` has an empty name"),
                ));
            }
            if seen.insert(id.to_string(), line_no).is_some() {
                return Err(Error::DuplicateId(id.to_string()));
            }
            let industry = fields
                .get(3)
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(str::to_string);
            entities.push(Entity {
                id: id.to_string(),
                name: name.to_string(),
                description: fields[2].trim().to_string(),
                industry,
            });
        }
        Self::from_entities(entities)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.entities {
            out.push_str(&e.id);
            out.push('\t');
            out.push_str(&e.name);
            out.push('\t');
            out.push_str(&e.description);
            if let Some(ind) = &e.industry {
                out.push('\t');
                out.push_str(ind);
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fsutil::write_text(path, &self.to_tsv())
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn get(&self, id: &str) -> Option<&Entity> {
        self.by_id.get(id).map(|&i| &self.entities[i])
    }

    /// Position of `id` in load order.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    /// Ids of every entity with exactly this name, in load order.
    pub fn ids_named(&self, name: &str) -> Vec<&str> {
        self.by_name
            .get(name)
            .map(|ix| ix.iter().map(|&i| self.entities[i].id.as_str()).collect())
            .unwrap_or_default()
    }

    /// Number of distinct names.
    pub fn name_count(&self) -> usize {
        self.by_name.len()
    }

    #[cfg(test)]
    pub(crate) fn name_index_size(&self) -> usize {
        self.by_name.values().map(Vec::len).sum()
    }
}

/// Loads and validates an entities file.
pub fn load_kb(path: &Path) -> Result<KnowledgeBase> {
    let text = fsutil::read_text(path)?;
    let kb = KnowledgeBase::parse(&text, &path.display().to_string())?;
    log::info!("loaded {} entities from {}", kb.len(), path.display());
    Ok(kb)
}

pub fn get_entity<'a>(kb: &'a KnowledgeBase, id: &str) -> Option<&'a Entity> {
    kb.get(id)
}
