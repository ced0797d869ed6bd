//! File formats, corpus access and the example-reproduction suite for the
//! `disco` command-line tool. The underlying logic lives in `disco-core`;
//! this crate only adds IO.

pub mod formats;
pub mod reproduce;

/// Directory holding the shipped corpus games and strategies.
pub fn default_corpus_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}
