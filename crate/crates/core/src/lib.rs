//! Expert finding for programming languages.
//!
//! A search for a language pulls recent microblog posts mentioning it, keeps
//! authors who hold a code-host account under the same name, scores each
//! candidate's timeline against the language's Linked-Data abstract with a
//! feature-hashing / cosine-similarity pipeline, and ranks candidates by bytes
//! of code, code-host followers, similarity and microblog followers.
//!
//! * [`textpipe`]: cleaning, noun/verb filter, Porter stemming, hashing, cosine
//! * [`sources`]: microblog, code-host and encyclopedia clients (live or fixture)
//! * [`search`]: the orchestrator and ranking
//! * [`eval`]: precision/recall harness
//! * [`service`]: HTTP API
//! * [`config`]: CLI configuration resolution

pub mod config;
pub mod eval;
pub mod search;
pub mod service;
pub mod sources;
pub mod textpipe;

pub use search::{CandidateProfile, ExpertFinder, LanguageEntry, LanguageList, SearchError, SearchParams};
pub use textpipe::{cosine_similarity, vectorize, FeatureVector, Similarity};
