//! Value sets from an external terminology repository.

mod client;
mod synonyms;

pub use client::{
    FixtureBackend, RemoteBackend, SourceLocation, StaticBackend, TermClient, TermError,
    TermProvider, TerminologySource, ValueSetBackend, DEFAULT_CACHE_TTL,
};
pub use synonyms::{build_synonym_index, normalize, SynonymIndex};
