//! Token-level suffix patterns such as `TRUST \d{4}-[A-Z0-9]+`.
//!
//! A pattern is a whitespace-separated list of token patterns; the n-th token
//! pattern must match the whole n-th token. Inside a token pattern:
//!
//! | syntax       | matches                          |
//! |--------------|----------------------------------|
//! | `\d{n}`      | exactly `n` ASCII digits         |
//! | `\d+`        | one or more ASCII digits         |
//! | `[A-Z0-9]+`  | one or more uppercase letters or digits |
//! | `[A-Z]+`     | one or more uppercase letters    |
//! | `\c`         | the literal character `c`        |
//! | any other    | itself (case-insensitive)        |

use std::fmt;

use crate::error::{Error, Result};
use crate::text::Phrase;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Elem {
    Literal(char),
    Digits(usize),
    DigitRun,
    AlnumRun,
    AlphaRun,
}

#[derive(Debug, Clone)]
pub struct SuffixPattern {
    pattern_text: String,
    positive_examples: Vec<String>,
    tokens: Vec<Vec<Elem>>,
}

impl PartialEq for SuffixPattern {
    fn eq(&self, other: &Self) -> bool {
        self.pattern_text == other.pattern_text
    }
}

impl Eq for SuffixPattern {}

impl SuffixPattern {
    /// Compiles a pattern and checks that every example matches it.
    pub fn new(pattern_text: &str, positive_examples: &[&str]) -> Result<Self> {
        let pattern_text = pattern_text
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        let tokens = pattern_text
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(|t| {
                compile_token(t).map_err(|message| Error::Pattern {
                    pattern: pattern_text.clone(),
                    message,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if tokens.is_empty() {
            return Err(Error::Pattern {
                pattern: pattern_text,
                message: "empty pattern".into(),
            });
        }
        let pattern = SuffixPattern {
            pattern_text,
            positive_examples: positive_examples.iter().map(|s| s.to_string()).collect(),
            tokens,
        };
        for example in &pattern.positive_examples {
            if !pattern.matches_phrase(&Phrase::parse(example)) {
                return Err(Error::Pattern {
                    pattern: pattern.pattern_text.clone(),
                    message: format!("does not match its example `{example}`"),
                });
            }
        }
        Ok(pattern)
    }

    pub fn pattern_text(&self) -> &str {
        &self.pattern_text
    }

    pub fn positive_examples(&self) -> &[String] {
        &self.positive_examples
    }

    /// Number of tokens a match covers.
    pub fn token_len(&self) -> usize {
        self.tokens.len()
    }

    /// True when the pattern matches `tokens[pos..pos + self.token_len()]`.
    pub fn matches_at<S: AsRef<str>>(&self, tokens: &[S], pos: usize) -> bool {
        let end = pos + self.tokens.len();
        end <= tokens.len()
            && self
                .tokens
                .iter()
                .zip(&tokens[pos..end])
                .all(|(elems, tok)| match_token(elems, &tok.as_ref().chars().collect::<Vec<_>>()))
    }

    pub fn matches_phrase(&self, phrase: &Phrase) -> bool {
        phrase.len() == self.tokens.len() && self.matches_at(phrase.tokens(), 0)
    }
}

impl fmt::Display for SuffixPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern_text)
    }
}

/// Patterns every generated suffix dictionary carries.
pub fn builtin_patterns() -> Vec<SuffixPattern> {
    [
        (
            r"TRUST \d{4}-[A-Z0-9]+",
            &["TRUST 2006-1", "TRUST 2006-A1"][..],
        ),
        (
            r"SERIES \d{4}-[A-Z0-9]+",
            &["SERIES 2005-HE3", "SERIES 2006-1"][..],
        ),
    ]
    .into_iter()
    .map(|(p, ex)| SuffixPattern::new(p, ex).expect("built-in pattern"))
    .collect()
}

fn compile_token(src: &str) -> std::result::Result<Vec<Elem>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut elems = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '\\' => {
                let Some(&next) = chars.get(i + 1) else {
                    return Err("dangling `\\`".into());
                };
                if next != 'd' {
                    elems.push(Elem::Literal(next.to_ascii_uppercase()));
                    i += 2;
                    continue;
                }
                match chars.get(i + 2) {
                    Some('+') => {
                        elems.push(Elem::DigitRun);
                        i += 3;
                    }
                    Some('{') => {
                        let close = chars[i + 3..]
                            .iter()
                            .position(|&c| c == '}')
                            .ok_or("unterminated `\\d{`")?;
                        let count: String = chars[i + 3..i + 3 + close].iter().collect();
                        let n: usize = count
                            .parse()
                            .map_err(|_| format!("bad repeat count `{count}`"))?;
                        if n == 0 {
                            return Err("repeat count must be positive".into());
                        }
                        elems.push(Elem::Digits(n));
                        i += 4 + close;
                    }
                    _ => return Err("`\\d` must be followed by `+` or `{n}`".into()),
                }
            }
            '[' => {
                let rest: String = chars[i..].iter().collect();
                if rest.starts_with("[A-Z0-9]+") {
                    elems.push(Elem::AlnumRun);
                    i += 9;
                } else if rest.starts_with("[A-Z]+") {
                    elems.push(Elem::AlphaRun);
                    i += 6;
                } else {
                    return Err(format!("unsupported class at `{rest}`"));
                }
            }
            c => {
                elems.push(Elem::Literal(c.to_ascii_uppercase()));
                i += 1;
            }
        }
    }
    Ok(elems)
}

fn match_token(elems: &[Elem], s: &[char]) -> bool {
    let Some((first, rest)) = elems.split_first() else {
        return s.is_empty();
    };
    let run = |pred: fn(&char) -> bool| {
        let max = s.iter().take_while(|c| pred(c)).count();
        (1..=max).rev().any(|k| match_token(rest, &s[k..]))
    };
    match first {
        Elem::Literal(c) => s.first() == Some(c) && match_token(rest, &s[1..]),
        Elem::Digits(n) => {
            s.len() >= *n && s[..*n].iter().all(char::is_ascii_digit) && match_token(rest, &s[*n..])
        }
        Elem::DigitRun => run(char::is_ascii_digit),
        Elem::AlnumRun => run(|c| c.is_ascii_uppercase() || c.is_ascii_digit()),
        Elem::AlphaRun => run(char::is_ascii_uppercase),
    }
}
