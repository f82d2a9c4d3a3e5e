//! Canonical text forms shared by every stage of the pipeline.
//!
//! Names, dictionary entries and documents all go through the same
//! tokenizer, so a dictionary entry matches a document exactly when their
//! token sequences agree. Tokens are whitespace-delimited chunks with a few
//! punctuation marks peeled off as tokens of their own:
//!
//! * a comma is always its own token, except between two digits (`1,000`);
//! * brackets, quotes, `;`, `:`, `!` and `?` are peeled from chunk edges;
//! * a trailing period is peeled when the rest of the chunk has no period,
//!   so `INC.` becomes `INC` `.` while `N.A.` stays whole.

use std::fmt;
use std::ops::Range;

const OPENING: &[char] = &['(', '[', '{', '"', '\u{201c}', '\u{2018}'];
const CLOSING: &[char] = &[
    ')', ']', '}', '"', '\u{201d}', '\u{2019}', ';', ':', '!', '?',
];

/// A token located in its source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSpan {
    /// Character offsets into the source text.
    pub chars: Range<usize>,
    /// Byte offsets into the source text.
    pub bytes: Range<usize>,
    /// True when the whitespace before this token contains a line break.
    pub preceded_by_newline: bool,
}

/// Splits `text` into token spans. Token text is `&text[span.bytes]`.
pub fn token_spans(text: &str) -> Vec<TokenSpan> {
    let mut out = Vec::new();
    let mut chunk: Vec<(usize, usize, char)> = Vec::new();
    let mut newline = false;
    let mut chunk_newline = false;

    for (ci, (bi, ch)) in text.char_indices().enumerate() {
        if ch.is_whitespace() || ch.is_control() {
            if !chunk.is_empty() {
                split_chunk(&chunk, text.len(), chunk_newline, &mut out);
                chunk.clear();
            }
            if ch == '\n' || ch == '\r' {
                newline = true;
            }
        } else {
            if chunk.is_empty() {
                chunk_newline = newline;
                newline = false;
            }
            chunk.push((ci, bi, ch));
        }
    }
    if !chunk.is_empty() {
        split_chunk(&chunk, text.len(), chunk_newline, &mut out);
    }
    out
}

fn split_chunk(
    chunk: &[(usize, usize, char)],
    text_len: usize,
    newline: bool,
    out: &mut Vec<TokenSpan>,
) {
    let first = out.len();
    let n = chunk.len();
    let mut start = 0;
    for i in 0..n {
        if chunk[i].2 != ',' {
            continue;
        }
        let numeric = i > 0
            && i + 1 < n
            && chunk[i - 1].2.is_ascii_digit()
            && chunk[i + 1].2.is_ascii_digit();
        if numeric {
            continue;
        }
        peel(chunk, start, i, text_len, out);
        push_span(chunk, i, i + 1, text_len, out);
        start = i + 1;
    }
    peel(chunk, start, n, text_len, out);
    if newline && out.len() > first {
        out[first].preceded_by_newline = true;
    }
}

fn peel(
    chunk: &[(usize, usize, char)],
    mut lo: usize,
    mut hi: usize,
    text_len: usize,
    out: &mut Vec<TokenSpan>,
) {
    while lo < hi && OPENING.contains(&chunk[lo].2) {
        push_span(chunk, lo, lo + 1, text_len, out);
        lo += 1;
    }
    let mut trailing = Vec::new();
    while hi > lo {
        let ch = chunk[hi - 1].2;
        let bare_period =
            ch == '.' && hi - lo >= 2 && !chunk[lo..hi - 1].iter().any(|c| c.2 == '.');
        if CLOSING.contains(&ch) || bare_period {
            trailing.push(hi - 1);
            hi -= 1;
        } else {
            break;
        }
    }
    if lo < hi {
        push_span(chunk, lo, hi, text_len, out);
    }
    for &i in trailing.iter().rev() {
        push_span(chunk, i, i + 1, text_len, out);
    }
}

fn push_span(
    chunk: &[(usize, usize, char)],
    lo: usize,
    hi: usize,
    text_len: usize,
    out: &mut Vec<TokenSpan>,
) {
    let byte_end = if hi < chunk.len() {
        chunk[hi].1
    } else {
        let (_, b, c) = chunk[hi - 1];
        (b + c.len_utf8()).min(text_len)
    };
    out.push(TokenSpan {
        chars: chunk[lo].0..chunk[hi - 1].0 + 1,
        bytes: chunk[lo].1..byte_end,
        preceded_by_newline: false,
    });
}

/// Uppercased token texts of `text`.
pub fn tokenize_upper(text: &str) -> Vec<String> {
    token_spans(text)
        .into_iter()
        .map(|s| text[s.bytes].to_uppercase())
        .collect()
}

/// Canonical form: uppercase, no control characters, single spaces, commas
/// and bare periods attached to the preceding token.
pub fn normalize(text: &str) -> String {
    Phrase::parse(text).to_string()
}

/// True for tokens made only of punctuation (no letter or digit).
pub fn is_punct(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

/// An uppercase token sequence: a dictionary entry, a name, or a slice of a
/// document.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phrase(Vec<String>);

impl Phrase {
    pub fn parse(text: &str) -> Self {
        Phrase(tokenize_upper(text))
    }

    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Phrase(tokens.into_iter().map(Into::into).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_token(&self, token: &str) -> bool {
        self.0.iter().any(|t| t == token)
    }

    /// Number of word tokens (tokens that are not pure punctuation).
    pub fn word_count(&self) -> usize {
        self.0.iter().filter(|t| !is_punct(t)).count()
    }

    pub fn slice(&self, range: Range<usize>) -> Phrase {
        Phrase(self.0[range].to_vec())
    }

    pub fn concat(&self, other: &Phrase) -> Phrase {
        let mut tokens = self.0.clone();
        tokens.extend_from_slice(&other.0);
        Phrase(tokens)
    }
}

impl From<Vec<String>> for Phrase {
    fn from(tokens: Vec<String>) -> Self {
        Phrase(tokens)
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tok) in self.0.iter().enumerate() {
            if i > 0 && !attaches(&self.0, i) {
                f.write_str(" ")?;
            }
            f.write_str(tok)?;
        }
        Ok(())
    }
}

// Whether token `i` is written directly after token `i - 1`.
fn attaches(tokens: &[String], i: usize) -> bool {
    match tokens[i].as_str() {
        "," => true,
        "." => !tokens[i - 1].contains('.'),
        _ => i == 1 && tokens[0] == ",",
    }
}
