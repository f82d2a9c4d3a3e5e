//! Dictionary-based extraction of institution names.
//!
//! A mention starts with the longest root-dictionary entry found at a token
//! position. Suffix entries (literal or pattern) that immediately follow are
//! appended one at a time, longest first, until none applies. Scanning then
//! resumes after the mention. Matching works on tokens, so line breaks inside
//! a name do not matter.
//!
//! Not handled: names whose fragments are separated by unrelated text, such
//! as `Wells \n abc def xxx \n Fargo Bank`.

mod trie;

use std::collections::BTreeSet;
use std::ops::Range;

use crate::dict_gen::{RootDictionary, SuffixDictionary, SuffixPattern};
use crate::error::{Error, Result};
use crate::ingest::{Document, SectionLabel};
use crate::text::{is_punct, token_spans, Phrase};

pub use trie::PhraseTrie;

/// Window used by [`filter_by_role_keyword`] unless configured otherwise.
pub const DEFAULT_ROLE_WINDOW: usize = 10;

pub fn default_role_keywords() -> BTreeSet<String> {
    [
        "SERVICER",
        "SERVICERS",
        "ISSUER",
        "SPONSOR",
        "DEPOSITOR",
        "TRUSTEE",
        "UNDERWRITER",
        "ORIGINATOR",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Uppercased token text.
    pub text: String,
    /// Character offsets in the source text.
    pub start: usize,
    pub end: usize,
    pub bytes: Range<usize>,
    pub preceded_by_newline: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn from_text(text: &str) -> Self {
        let tokens = token_spans(text)
            .into_iter()
            .map(|s| Token {
                text: text[s.bytes.clone()].to_uppercase(),
                start: s.chars.start,
                end: s.chars.end,
                bytes: s.bytes,
                preceded_by_newline: s.preceded_by_newline,
            })
            .collect();
        TokenStream { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    fn phrase(&self, range: Range<usize>) -> Phrase {
        Phrase::from_tokens(self.tokens[range].iter().map(|t| t.text.clone()))
    }

    fn chars(&self, range: &Range<usize>) -> Range<usize> {
        self.tokens[range.start].start..self.tokens[range.end - 1].end
    }
}

pub fn tokenize(doc: &Document) -> TokenStream {
    TokenStream::from_text(&doc.raw_text)
}

/// An extracted name candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub doc_id: String,
    /// Character range in the document text.
    pub span: Range<usize>,
    /// Source text of the span with whitespace runs collapsed.
    pub surface: String,
    pub root_span: Range<usize>,
    pub suffix_spans: Vec<Range<usize>>,
    pub section: SectionLabel,
    /// Token range in the document's token stream.
    pub tokens: Range<usize>,
    /// Uppercased tokens of the whole mention and of its root.
    pub phrase: Phrase,
    pub root: Phrase,
}

/// User-maintained additions to the generated dictionaries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CustomizationDictionaries {
    custom_roots: BTreeSet<Phrase>,
    custom_suffixes: BTreeSet<Phrase>,
    invalid_elements: BTreeSet<Phrase>,
}

impl CustomizationDictionaries {
    /// Fails when an invalid element is also a custom root or suffix.
    pub fn new(
        custom_roots: BTreeSet<Phrase>,
        custom_suffixes: BTreeSet<Phrase>,
        invalid_elements: BTreeSet<Phrase>,
    ) -> Result<Self> {
        if let Some(clash) = invalid_elements
            .iter()
            .find(|e| custom_roots.contains(e) || custom_suffixes.contains(e))
        {
            return Err(Error::Invalid(format!(
                "`{clash}` is both an invalid element and a custom entry"
            )));
        }
        Ok(CustomizationDictionaries {
            custom_roots,
            custom_suffixes,
            invalid_elements,
        })
    }

    pub fn custom_roots(&self) -> &BTreeSet<Phrase> {
        &self.custom_roots
    }

    pub fn custom_suffixes(&self) -> &BTreeSet<Phrase> {
        &self.custom_suffixes
    }

    pub fn invalid_elements(&self) -> &BTreeSet<Phrase> {
        &self.invalid_elements
    }
}

/// A suffix extension of a root match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    /// Token range of the full mention.
    pub tokens: Range<usize>,
    /// Token ranges of the appended suffixes, in order.
    pub suffixes: Vec<Range<usize>>,
}

/// Compiled dictionaries, shared read-only across documents.
#[derive(Debug, Clone)]
pub struct Matcher {
    roots: PhraseTrie,
    suffixes: PhraseTrie,
    patterns: Vec<SuffixPattern>,
    invalid: BTreeSet<Phrase>,
}

impl Matcher {
    pub fn new(
        roots: &RootDictionary,
        suffixes: &SuffixDictionary,
        custom: &CustomizationDictionaries,
    ) -> Self {
        Matcher {
            roots: roots.entries.iter().chain(&custom.custom_roots).collect(),
            suffixes: suffixes
                .literal_entries
                .iter()
                .chain(&custom.custom_suffixes)
                .collect(),
            patterns: suffixes.pattern_entries.clone(),
            invalid: custom.invalid_elements.clone(),
        }
    }

    /// Longest root entry starting at `pos`, as a token count.
    fn root_at(&self, texts: &[&str], pos: usize) -> Option<usize> {
        self.roots.longest_prefix(&texts[pos..])
    }

    /// Longest literal or pattern suffix starting at `pos`, as a token count.
    fn suffix_at(&self, texts: &[&str], pos: usize) -> Option<usize> {
        let literal = self.suffixes.longest_prefix(&texts[pos..]);
        let pattern = self
            .patterns
            .iter()
            .filter(|p| p.matches_at(texts, pos))
            .map(SuffixPattern::token_len)
            .max();
        literal.max(pattern)
    }

    /// Leftmost-longest, non-overlapping root matches.
    pub fn match_roots(&self, stream: &TokenStream) -> Vec<Range<usize>> {
        let texts = stream.texts();
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < texts.len() {
            match self.root_at(&texts, pos) {
                Some(len) => {
                    out.push(pos..pos + len);
                    pos += len;
                }
                None => pos += 1,
            }
        }
        out
    }

    /// Appends following suffix entries to `root` until none matches.
    pub fn extend_suffix(&self, stream: &TokenStream, root: Range<usize>) -> Extension {
        self.extend(&stream.texts(), root)
    }

    fn extend(&self, texts: &[&str], root: Range<usize>) -> Extension {
        let mut end = root.end;
        let mut suffixes = Vec::new();
        while end < texts.len() {
            match self.suffix_at(texts, end) {
                Some(len) => {
                    suffixes.push(end..end + len);
                    end += len;
                }
                None => break,
            }
        }
        Extension {
            tokens: root.start..end,
            suffixes,
        }
    }

    /// Extracts mentions from a document, sorted by start offset.
    pub fn extract(&self, doc: &Document) -> Vec<Mention> {
        let stream = tokenize(doc);
        self.extract_from(doc, &stream)
    }

    /// Same as [`Matcher::extract`] with a precomputed token stream.
    pub fn extract_from(&self, doc: &Document, stream: &TokenStream) -> Vec<Mention> {
        let texts = stream.texts();
        let mut mentions = Vec::new();
        let mut pos = 0;
        while pos < texts.len() {
            let Some(len) = self.root_at(&texts, pos) else {
                pos += 1;
                continue;
            };
            let root = pos..pos + len;
            let ext = self.extend(&texts, root.clone());
            pos = ext.tokens.end;
            mentions.push(build_mention(doc, stream, root, ext));
        }
        filter_invalid(mentions, &self.invalid)
    }
}

fn build_mention(
    doc: &Document,
    stream: &TokenStream,
    root: Range<usize>,
    ext: Extension,
) -> Mention {
    let span = stream.chars(&ext.tokens);
    let first = &stream.tokens[ext.tokens.start];
    let last = &stream.tokens[ext.tokens.end - 1];
    let surface = collapse_whitespace(&doc.raw_text[first.bytes.start..last.bytes.end]);
    Mention {
        doc_id: doc.doc_id.clone(),
        section: doc.section_at(span.start),
        surface,
        root_span: stream.chars(&root),
        suffix_spans: ext.suffixes.iter().map(|r| stream.chars(r)).collect(),
        phrase: stream.phrase(ext.tokens.clone()),
        root: stream.phrase(root),
        tokens: ext.tokens,
        span,
    }
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split(|c: char| c.is_whitespace() || c.is_control())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Drops mentions whose full text or root is an invalid element.
pub fn filter_invalid(mentions: Vec<Mention>, invalid: &BTreeSet<Phrase>) -> Vec<Mention> {
    if invalid.is_empty() {
        return mentions;
    }
    mentions
        .into_iter()
        .filter(|m| !invalid.contains(&m.phrase) && !invalid.contains(&m.root))
        .collect()
}

fn keyword_form(token: &str) -> String {
    token.chars().filter(|c| c.is_alphanumeric()).collect()
}

/// Keeps mentions preceded by a role keyword with at most `window` word
/// tokens in between. Punctuation tokens are not counted.
pub fn filter_by_role_keyword(
    mentions: Vec<Mention>,
    stream: &TokenStream,
    keywords: &BTreeSet<String>,
    window: usize,
) -> Vec<Mention> {
    let keywords: BTreeSet<String> = keywords
        .iter()
        .map(|k| keyword_form(&k.to_uppercase()))
        .collect();
    mentions
        .into_iter()
        .filter(|m| {
            let mut between = 0;
            for tok in stream.tokens[..m.tokens.start].iter().rev() {
                if is_punct(&tok.text) {
                    continue;
                }
                if keywords.contains(&keyword_form(&tok.text)) {
                    return true;
                }
                between += 1;
                if between > window {
                    break;
                }
            }
            false
        })
        .collect()
}
