//! Versioned template store laid out as `{root}/{id}/{version}.json`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::template::{parse_template, render_template, SemanticError, Template, TemplateError, Version};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("i/o error at {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("stored template {path} is invalid: {source}")]
    Corrupt {
        path: PathBuf,
        #[source]
        source: TemplateError,
    },
    #[error("stored template {path} declares {found}, expected {expected}")]
    Misplaced {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("template is invalid: {0}")]
    Invalid(#[from] SemanticError),
    #[error("{id}@{version} is already registered with different content")]
    Conflict { id: String, version: Version },
}

impl RegistryError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        RegistryError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterOutcome {
    Created,
    /// The same content was already stored under this id and version.
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateSummary {
    pub id: String,
    pub version: Version,
    pub name: String,
}

type Index = BTreeMap<(String, Version), Arc<Template>>;

/// Thread-safe template store. Reads go through an in-memory index; writes
/// are serialized and land on disk by write-then-rename before the index
/// sees them. A registry without a root lives in memory only.
#[derive(Debug)]
pub struct TemplateRegistry {
    root: Option<PathBuf>,
    index: RwLock<Index>,
    writer: Mutex<()>,
}

impl TemplateRegistry {
    pub fn in_memory() -> Self {
        Self {
            root: None,
            index: RwLock::new(BTreeMap::new()),
            writer: Mutex::new(()),
        }
    }

    /// Opens (creating if needed) the directory at `root` and indexes every
    /// stored template.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, RegistryError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| RegistryError::io(&root, e))?;
        let index = load_index(&root)?;
        Ok(Self {
            root: Some(root),
            index: RwLock::new(index),
            writer: Mutex::new(()),
        })
    }

    /// In-memory registry holding the bundled fixture templates.
    pub fn with_fixtures() -> Self {
        let registry = Self::in_memory();
        for template in crate::fixtures::templates() {
            registry
                .register(template)
                .expect("bundled templates register cleanly");
        }
        registry
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn register(&self, template: Template) -> Result<RegisterOutcome, RegistryError> {
        template.check()?;
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let key = (template.id.clone(), template.version);
        if let Some(existing) = self.read().get(&key) {
            return if **existing == template {
                Ok(RegisterOutcome::Unchanged)
            } else {
                Err(RegistryError::Conflict {
                    id: template.id,
                    version: template.version,
                })
            };
        }
        if let Some(root) = &self.root {
            persist(root, &template)?;
        }
        self.index
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, Arc::new(template));
        Ok(RegisterOutcome::Created)
    }

    pub fn get(&self, id: &str, version: &Version) -> Option<Arc<Template>> {
        self.read().get(&(id.to_string(), *version)).cloned()
    }

    /// Highest registered version of `id`.
    pub fn latest(&self, id: &str) -> Option<Arc<Template>> {
        self.read()
            .range((id.to_string(), Version::new(0, 0, 0))..)
            .take_while(|((k, _), _)| k == id)
            .last()
            .map(|(_, t)| t.clone())
    }

    /// Every template, ordered by id then version.
    pub fn templates(&self) -> Vec<Arc<Template>> {
        self.read().values().cloned().collect()
    }

    pub fn list(&self) -> Vec<TemplateSummary> {
        self.read()
            .values()
            .map(|t| TemplateSummary {
                id: t.id.clone(),
                version: t.version,
                name: t.name.clone(),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.read().is_empty()
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Index> {
        self.index.read().unwrap_or_else(|e| e.into_inner())
    }
}

fn load_index(root: &Path) -> Result<Index, RegistryError> {
    let mut index = BTreeMap::new();
    let dirs = fs::read_dir(root).map_err(|e| RegistryError::io(root, e))?;
    for dir in dirs {
        let dir = dir.map_err(|e| RegistryError::io(root, e))?.path();
        if !dir.is_dir() {
            continue;
        }
        let files = fs::read_dir(&dir).map_err(|e| RegistryError::io(&dir, e))?;
        for file in files {
            let path = file.map_err(|e| RegistryError::io(&dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let bytes = fs::read(&path).map_err(|e| RegistryError::io(&path, e))?;
            let template = parse_template(&bytes).map_err(|source| RegistryError::Corrupt {
                path: path.clone(),
                source,
            })?;
            let expected = format!(
                "{}@{}",
                dir.file_name().unwrap_or_default().to_string_lossy(),
                path.file_stem().unwrap_or_default().to_string_lossy()
            );
            if template.reference() != expected {
                return Err(RegistryError::Misplaced {
                    path,
                    expected,
                    found: template.reference(),
                });
            }
            index.insert((template.id.clone(), template.version), Arc::new(template));
        }
    }
    Ok(index)
}

fn persist(root: &Path, template: &Template) -> Result<(), RegistryError> {
    let dir = root.join(&template.id);
    fs::create_dir_all(&dir).map_err(|e| RegistryError::io(&dir, e))?;
    let target = dir.join(format!("{}.json", template.version));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| RegistryError::io(&dir, e))?;
    tmp.write_all(render_template(template).as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| RegistryError::io(tmp.path(), e))?;
    tmp.persist(&target)
        .map_err(|e| RegistryError::io(&target, e.error))?;
    Ok(())
}
