//! Rank-based entity resolution against a normalized corpus of names.
//!
//! Mentions and corpus names go through the same preprocessing (uppercase,
//! punctuation stripped, abbreviations expanded, stop words removed). A
//! mention is scored against every corpus entry sharing at least one token
//! with it, and the best entry wins if its score reaches the threshold.

mod score;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::text::tokenize_upper;

pub use score::{
    map_token, ordered_prefix_end, score_idf, score_sb, score_sc, score_sq, ScoreParts, Variant,
};

pub const DEFAULT_THRESHOLD: f64 = 0.085;

/// Scores closer than this are treated as a tie.
pub const TIE_EPSILON: f64 = 1e-12;

pub fn default_stop_words() -> BTreeSet<String> {
    [
        "THE", "OF", "AND", "A", "AN", "FOR", "LLC", "INC", "LTD", "LP",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

pub fn default_abbreviations() -> BTreeMap<String, Vec<String>> {
    BTreeMap::from([(
        "WAMU".to_string(),
        vec!["WASHINGTON".to_string(), "MUTUAL".to_string()],
    )])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErConfig {
    pub threshold: f64,
    pub stop_words: BTreeSet<String>,
    pub abbreviations: BTreeMap<String, Vec<String>>,
    pub weight_overrides: BTreeMap<String, f64>,
}

impl Default for ErConfig {
    fn default() -> Self {
        ErConfig {
            threshold: DEFAULT_THRESHOLD,
            stop_words: default_stop_words(),
            abbreviations: default_abbreviations(),
            weight_overrides: BTreeMap::new(),
        }
    }
}

impl ErConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(Error::Invalid(format!(
                "threshold must be a finite value >= 0, got {}",
                self.threshold
            )));
        }
        if let Some((tok, w)) = self
            .weight_overrides
            .iter()
            .find(|(_, w)| !(**w >= 0.0 && w.is_finite()))
        {
            return Err(Error::Invalid(format!(
                "weight override for {tok} must be >= 0, got {w}"
            )));
        }
        Ok(())
    }
}

/// Uppercases a token and drops every non-alphanumeric character.
pub fn clean_token(token: &str) -> String {
    token
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_uppercase)
        .collect()
}

fn clean_tokens(text: &str) -> Vec<String> {
    tokenize_upper(text)
        .iter()
        .map(|t| clean_token(t))
        .filter(|t| !t.is_empty())
        .collect()
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn tab_pair<'a>(path: &Path, line_no: usize, line: &'a str) -> Result<(&'a str, &'a str)> {
    line.split_once('\t')
        .map(|(a, b)| (a.trim(), b.trim()))
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .ok_or_else(|| Error::parse(path, line_no, "expected two tab-separated fields"))
}

/// One token per line.
pub fn load_stop_words(path: &Path) -> Result<BTreeSet<String>> {
    let text = read(path)?;
    Ok(data_lines(&text)
        .map(|(_, l)| clean_token(l))
        .filter(|t| !t.is_empty())
        .collect())
}

/// `ABBREV<TAB>EXPANSION` per line.
pub fn load_abbreviations(path: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    let text = read(path)?;
    let mut map = BTreeMap::new();
    for (line_no, line) in data_lines(&text) {
        let (abbrev, expansion) = tab_pair(path, line_no, line)?;
        let key = clean_token(abbrev);
        let value = clean_tokens(expansion);
        if key.is_empty() || value.is_empty() {
            return Err(Error::parse(
                path,
                line_no,
                "abbreviation or expansion has no letters",
            ));
        }
        map.insert(key, value);
    }
    Ok(map)
}

/// `TOKEN<TAB>weight` per line.
pub fn load_weight_overrides(path: &Path) -> Result<BTreeMap<String, f64>> {
    let text = read(path)?;
    let mut map = BTreeMap::new();
    for (line_no, line) in data_lines(&text) {
        let (token, weight) = tab_pair(path, line_no, line)?;
        let weight: f64 = weight
            .parse()
            .ok()
            .filter(|w: &f64| *w >= 0.0 && w.is_finite())
            .ok_or_else(|| Error::parse(path, line_no, format!("bad weight `{weight}`")))?;
        map.insert(clean_token(token), weight);
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub original: String,
    pub tokens: Vec<String>,
}

impl Query {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn preprocess(mention: &str, config: &ErConfig) -> Query {
    let mut tokens = Vec::new();
    for tok in clean_tokens(mention) {
        match config.abbreviations.get(&tok) {
            Some(expansion) => tokens.extend(expansion.iter().cloned()),
            None => tokens.push(tok),
        }
    }
    tokens.retain(|t| !config.stop_words.contains(t));
    Query {
        original: mention.to_string(),
        tokens,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub tokens: Vec<String>,
}

/// Immutable bag-of-words view of the corpus.
#[derive(Debug, Clone)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
    index: HashMap<String, Vec<usize>>,
    idf: HashMap<String, f64>,
    overrides: BTreeMap<String, f64>,
    unseen_weight: f64,
}

impl Corpus {
    /// Entry ids follow the order of `names`; repeated names keep their
    /// first position.
    pub fn build<S: AsRef<str>>(names: &[S], config: &ErConfig) -> Result<Self> {
        config.validate()?;
        let mut seen = BTreeSet::new();
        let mut entries = Vec::new();
        for raw in names {
            let name = raw
                .as_ref()
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            if name.is_empty() || !seen.insert(name.clone()) {
                continue;
            }
            let mut tokens = preprocess(&name, config).tokens;
            if tokens.is_empty() {
                log::warn!(
                    "corpus name `{name}` has no tokens after preprocessing; keeping raw tokens"
                );
                tokens = tokenize_upper(&name);
            }
            entries.push(CorpusEntry { name, tokens });
        }
        if entries.is_empty() {
            return Err(Error::Invalid("corpus has no names".into()));
        }
        Ok(Self::from_entries(entries, config.weight_overrides.clone()))
    }

    pub fn from_entries(entries: Vec<CorpusEntry>, overrides: BTreeMap<String, f64>) -> Self {
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (id, entry) in entries.iter().enumerate() {
            for tok in entry.tokens.iter().collect::<BTreeSet<_>>() {
                index.entry(tok.clone()).or_default().push(id);
            }
        }
        let n = entries.len() as f64;
        let idf = index
            .iter()
            .map(|(tok, ids)| (tok.clone(), (n / ids.len() as f64).ln()))
            .collect();
        Corpus {
            entries,
            index,
            idf,
            overrides,
            unseen_weight: n.ln(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn entry(&self, id: usize) -> &CorpusEntry {
        &self.entries[id]
    }

    /// Ids of the entries containing `token`, ascending.
    pub fn postings(&self, token: &str) -> &[usize] {
        self.index.get(token).map_or(&[], Vec::as_slice)
    }

    pub fn document_frequency(&self, token: &str) -> usize {
        self.postings(token).len()
    }

    /// IDF before overrides; unseen tokens get `ln N`.
    pub fn idf(&self, token: &str) -> f64 {
        self.idf.get(token).copied().unwrap_or(self.unseen_weight)
    }

    /// Token weight used in scoring: the override if present, else IDF.
    pub fn weight(&self, token: &str) -> f64 {
        self.overrides
            .get(token)
            .copied()
            .unwrap_or_else(|| self.idf(token))
    }

    /// Entries sharing at least one token with `tokens`, ascending by id.
    pub fn candidates<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        let ids: BTreeSet<usize> = tokens
            .iter()
            .flat_map(|t| self.postings(t.as_ref()).iter().copied())
            .collect();
        ids.into_iter().collect()
    }

    /// Best candidate under `variant`: highest score, lowest id among ties.
    pub fn best_match(&self, query: &Query, variant: Variant) -> Option<(usize, f64)> {
        let weight = |t: &str| self.weight(t);
        let scored: Vec<(usize, f64)> = self
            .candidates(&query.tokens)
            .into_iter()
            .map(|id| {
                (
                    id,
                    variant.score(&query.tokens, &self.entries[id].tokens, weight),
                )
            })
            .collect();
        let top = scored
            .iter()
            .map(|&(_, s)| s)
            .fold(f64::NEG_INFINITY, f64::max);
        scored.into_iter().find(|&(_, s)| s >= top - TIE_EPSILON)
    }

    /// Best candidate under the full score, with its components.
    pub fn rank(&self, query: &Query) -> Option<MatchResult> {
        let (entry_id, _) = self.best_match(query, Variant::Full)?;
        let parts = ScoreParts::compute(&query.tokens, &self.entries[entry_id].tokens, |t| {
            self.weight(t)
        });
        Some(MatchResult {
            query: query.clone(),
            entry_id,
            score: parts.total(),
            sq: parts.sq,
            sc: parts.sc,
            sb: parts.sb,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub query: Query,
    pub entry_id: usize,
    pub score: f64,
    pub sq: f64,
    pub sc: f64,
    pub sb: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    Matched(MatchResult),
    /// The best candidate scored under the threshold.
    BelowThreshold(MatchResult),
    /// No corpus entry shares a token with the query.
    NoCandidate(Query),
    /// Preprocessing left no tokens.
    EmptyQuery(Query),
}

impl Resolution {
    pub fn matched(&self) -> Option<&MatchResult> {
        match self {
            Resolution::Matched(m) => Some(m),
            _ => None,
        }
    }

    /// Best candidate regardless of the threshold.
    pub fn best(&self) -> Option<&MatchResult> {
        match self {
            Resolution::Matched(m) | Resolution::BelowThreshold(m) => Some(m),
            _ => None,
        }
    }

    pub fn query(&self) -> &Query {
        match self {
            Resolution::Matched(m) | Resolution::BelowThreshold(m) => &m.query,
            Resolution::NoCandidate(q) | Resolution::EmptyQuery(q) => q,
        }
    }
}

pub fn resolve_query(query: Query, corpus: &Corpus, threshold: f64) -> Resolution {
    if query.is_empty() {
        return Resolution::EmptyQuery(query);
    }
    match corpus.rank(&query) {
        None => Resolution::NoCandidate(query),
        Some(m) if m.score >= threshold => Resolution::Matched(m),
        Some(m) => Resolution::BelowThreshold(m),
    }
}

pub fn resolve(mention: &str, corpus: &Corpus, config: &ErConfig) -> Resolution {
    resolve_query(preprocess(mention, config), corpus, config.threshold)
}

/// Resolves every mention, in parallel, preserving input order.
pub fn resolve_batch<S: AsRef<str> + Sync>(
    mentions: &[S],
    corpus: &Corpus,
    config: &ErConfig,
) -> Vec<Resolution> {
    mentions
        .par_iter()
        .map(|m| resolve(m.as_ref(), corpus, config))
        .collect()
}
