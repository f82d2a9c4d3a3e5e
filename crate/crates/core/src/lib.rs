//! Extraction of financial-institution names from filings and resolution of
//! the extracted mentions against a corpus of normalized names.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`dict_gen`] derives root and suffix dictionaries from name lists;
//! 2. [`ner`] scans documents for root entries extended by suffixes;
//! 3. [`er`] ranks corpus entries for each mention;
//! 4. [`eval`] measures the extraction and the resolution.

pub mod cli;
pub mod dict_gen;
pub mod er;
mod error;
pub mod eval;
pub mod ingest;
pub mod kv;
pub mod ner;
pub mod text;

pub use error::{Error, Result};
