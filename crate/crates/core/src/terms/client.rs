use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;
use url::Url;

use crate::template::{parse_value_set, ValueSet};

pub const DEFAULT_CACHE_TTL: Duration = Duration::from_secs(86_400);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("value set '{0}' not found")]
    NotFound(String),
    /// The backend could not be reached; callers may retry.
    #[error("terminology backend unavailable for '{set_id}': {message}")]
    Transport { set_id: String, message: String },
    #[error("malformed value set '{set_id}': {message}")]
    Malformed { set_id: String, message: String },
}

/// Anything that can hand out value sets by id.
pub trait TermProvider: Send + Sync {
    fn value_set(&self, set_id: &str) -> Result<Arc<ValueSet>, TermError>;
}

/// Uncached storage a [`TermClient`] reads from.
pub trait ValueSetBackend: Send + Sync {
    fn load(&self, set_id: &str) -> Result<ValueSet, TermError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceLocation {
    Fixture(PathBuf),
    Remote(Url),
}

/// Where value sets come from, and how long fetched sets stay cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminologySource {
    pub location: SourceLocation,
    pub cache_ttl: Duration,
}

impl TerminologySource {
    pub fn fixture(dir: impl Into<PathBuf>) -> Self {
        Self {
            location: SourceLocation::Fixture(dir.into()),
            cache_ttl: DEFAULT_CACHE_TTL,
        }
    }

    pub fn remote(base_url: Url) -> Self {
        Self {
            location: SourceLocation::Remote(base_url),
            cache_ttl: DEFAULT_CACHE_TTL,
        }
    }

    pub fn with_ttl(mut self, ttl: Duration) -> Self {
        self.cache_ttl = ttl;
        self
    }

    /// `http://` and `https://` strings are remote bases; anything else is a
    /// fixture directory.
    pub fn parse(source: &str) -> Result<Self, url::ParseError> {
        if source.starts_with("http://") || source.starts_with("https://") {
            Url::parse(source).map(Self::remote)
        } else {
            Ok(Self::fixture(source))
        }
    }
}

impl fmt::Display for TerminologySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            SourceLocation::Fixture(dir) => write!(f, "{}", dir.display()),
            SourceLocation::Remote(url) => write!(f, "{url}"),
        }
    }
}

/// Reads `{dir}/{set_id}.json`.
#[derive(Debug, Clone)]
pub struct FixtureBackend {
    dir: PathBuf,
}

impl FixtureBackend {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

fn is_safe_set_id(set_id: &str) -> bool {
    !set_id.is_empty()
        && set_id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
        && !set_id.starts_with('.')
}

fn decode(set_id: &str, bytes: &[u8]) -> Result<ValueSet, TermError> {
    let set = parse_value_set(bytes).map_err(|message| TermError::Malformed {
        set_id: set_id.to_string(),
        message,
    })?;
    if set.set_id != set_id {
        return Err(TermError::Malformed {
            set_id: set_id.to_string(),
            message: format!("document declares set_id '{}'", set.set_id),
        });
    }
    Ok(set)
}

impl ValueSetBackend for FixtureBackend {
    fn load(&self, set_id: &str) -> Result<ValueSet, TermError> {
        if !is_safe_set_id(set_id) {
            return Err(TermError::NotFound(set_id.to_string()));
        }
        if !self.dir.is_dir() {
            return Err(TermError::Transport {
                set_id: set_id.to_string(),
                message: format!("fixture directory {} does not exist", self.dir.display()),
            });
        }
        let path = self.dir.join(format!("{set_id}.json"));
        match std::fs::read(&path) {
            Ok(bytes) => decode(set_id, &bytes),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(TermError::NotFound(set_id.to_string()))
            }
            Err(e) => Err(TermError::Transport {
                set_id: set_id.to_string(),
                message: e.to_string(),
            }),
        }
    }
}

/// `GET {base_url}/value-sets/{set_id}`; 404 means not found.
#[derive(Debug, Clone)]
pub struct RemoteBackend {
    base_url: Url,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(base_url: Url) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .build();
        Self {
            base_url,
            agent: config.into(),
        }
    }

    fn url_for(&self, set_id: &str) -> Result<Url, TermError> {
        let mut url = self.base_url.clone();
        url.path_segments_mut()
            .map_err(|_| TermError::Transport {
                set_id: set_id.to_string(),
                message: format!("base url {} cannot carry a path", self.base_url),
            })?
            .pop_if_empty()
            .push("value-sets")
            .push(set_id);
        Ok(url)
    }
}

impl ValueSetBackend for RemoteBackend {
    fn load(&self, set_id: &str) -> Result<ValueSet, TermError> {
        let url = self.url_for(set_id)?;
        let transport = |message: String| TermError::Transport {
            set_id: set_id.to_string(),
            message,
        };
        match self.agent.get(url.as_str()).call() {
            Ok(mut response) => {
                let body = response
                    .body_mut()
                    .read_to_vec()
                    .map_err(|e| transport(e.to_string()))?;
                decode(set_id, &body)
            }
            Err(ureq::Error::StatusCode(404)) => Err(TermError::NotFound(set_id.to_string())),
            Err(e) => Err(transport(e.to_string())),
        }
    }
}

/// In-memory sets, e.g. the bundled fixtures.
#[derive(Debug, Clone, Default)]
pub struct StaticBackend {
    sets: HashMap<String, ValueSet>,
}

impl StaticBackend {
    pub fn new(sets: impl IntoIterator<Item = ValueSet>) -> Self {
        Self {
            sets: sets.into_iter().map(|s| (s.set_id.clone(), s)).collect(),
        }
    }
}

impl ValueSetBackend for StaticBackend {
    fn load(&self, set_id: &str) -> Result<ValueSet, TermError> {
        self.sets
            .get(set_id)
            .cloned()
            .ok_or_else(|| TermError::NotFound(set_id.to_string()))
    }
}

type Slot = Arc<Mutex<Option<(Instant, Arc<ValueSet>)>>>;

/// Caching front end over a [`ValueSetBackend`].
///
/// Entries live for the configured TTL. Each set id has its own slot lock, so
/// concurrent requests for the same set wait on a single backend read.
pub struct TermClient {
    backend: Box<dyn ValueSetBackend>,
    ttl: Duration,
    slots: Mutex<HashMap<String, Slot>>,
    reads: AtomicU64,
    description: String,
}

impl fmt::Debug for TermClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TermClient")
            .field("source", &self.description)
            .field("ttl", &self.ttl)
            .field("reads", &self.reads())
            .finish()
    }
}

impl TermClient {
    pub fn new(source: &TerminologySource) -> Self {
        let backend: Box<dyn ValueSetBackend> = match &source.location {
            SourceLocation::Fixture(dir) => Box::new(FixtureBackend::new(dir.clone())),
            SourceLocation::Remote(url) => Box::new(RemoteBackend::new(url.clone())),
        };
        let mut client = Self::with_backend(backend, source.cache_ttl);
        client.description = source.to_string();
        client
    }

    pub fn with_backend(backend: Box<dyn ValueSetBackend>, ttl: Duration) -> Self {
        Self {
            backend,
            ttl,
            slots: Mutex::new(HashMap::new()),
            reads: AtomicU64::new(0),
            description: "custom backend".into(),
        }
    }

    /// Client over the value sets bundled with this crate.
    pub fn builtin() -> Self {
        let mut client = Self::with_backend(
            Box::new(StaticBackend::new(crate::fixtures::value_sets())),
            DEFAULT_CACHE_TTL,
        );
        client.description = "builtin fixtures".into();
        client
    }

    /// Number of backend reads so far; cache hits do not count.
    pub fn reads(&self) -> u64 {
        self.reads.load(Ordering::SeqCst)
    }

    pub fn source_description(&self) -> &str {
        &self.description
    }

    pub fn fetch_value_set(&self, set_id: &str) -> Result<Arc<ValueSet>, TermError> {
        let slot = {
            let mut slots = self.slots.lock().unwrap_or_else(|e| e.into_inner());
            slots.entry(set_id.to_string()).or_default().clone()
        };
        let mut entry = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((fetched, set)) = entry.as_ref() {
            if fetched.elapsed() < self.ttl {
                return Ok(set.clone());
            }
        }
        self.reads.fetch_add(1, Ordering::SeqCst);
        let set = Arc::new(self.backend.load(set_id)?);
        *entry = Some((Instant::now(), set.clone()));
        Ok(set)
    }
}

impl TermProvider for TermClient {
    fn value_set(&self, set_id: &str) -> Result<Arc<ValueSet>, TermError> {
        self.fetch_value_set(set_id)
    }
}

impl<T: TermProvider + ?Sized> TermProvider for Arc<T> {
    fn value_set(&self, set_id: &str) -> Result<Arc<ValueSet>, TermError> {
        (**self).value_set(set_id)
    }
}
