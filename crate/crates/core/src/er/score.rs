//! Scoring a query token sequence `q` against a candidate name `p`.
//!
//! * `s_q`: decayed (`0.5^i`), weighted sum of query tokens found in the
//!   candidate, over the ordered prefix of the query;
//! * `s_c`: decayed fraction of candidate tokens found in the query, over
//!   the ordered prefix of the candidate;
//! * `s_b`: bonus when the candidate occurs contiguously in the query.
//!
//! The full score is `s_q * s_c + s_b`.
//!
//! The ordered prefix of a token sequence against another is read as
//! follows: walk the tokens in order, map each to the index of its first
//! occurrence in the other sequence (`-1` when absent), and stop at the first
//! token whose mapped index does not exceed every index mapped before it.
//! The last accepted position bounds the sum.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

const DECAY: f64 = 0.5;

/// Index of the first occurrence of `token` in `candidate`.
pub fn map_token<S: AsRef<str>>(token: &str, candidate: &[S]) -> Option<usize> {
    candidate.iter().position(|c| c.as_ref() == token)
}

/// Last index of the ordered prefix of `from` with respect to `to`, or
/// `None` when `from` is empty.
pub fn ordered_prefix_end<A: AsRef<str>, B: AsRef<str>>(from: &[A], to: &[B]) -> Option<usize> {
    let mut last = None;
    let mut highest: i64 = i64::MIN;
    for (i, tok) in from.iter().enumerate() {
        let mapped = map_token(tok.as_ref(), to).map_or(-1, |j| j as i64);
        if i > 0 && mapped <= highest {
            break;
        }
        highest = highest.max(mapped);
        last = Some(i);
    }
    last
}

fn decayed_hits<A: AsRef<str>, B: AsRef<str>>(
    from: &[A],
    to: &[B],
    weight: impl Fn(&str) -> f64,
) -> f64 {
    let Some(end) = ordered_prefix_end(from, to) else {
        return 0.0;
    };
    let mut decay = 1.0;
    let mut sum = 0.0;
    for tok in &from[..=end] {
        if map_token(tok.as_ref(), to).is_some() {
            sum += decay * weight(tok.as_ref());
        }
        decay *= DECAY;
    }
    sum
}

fn decay_sum(range: std::ops::Range<usize>) -> f64 {
    range.map(|i| DECAY.powi(i as i32)).sum()
}

pub fn score_sq<A: AsRef<str>, B: AsRef<str>>(
    q: &[A],
    p: &[B],
    weight: impl Fn(&str) -> f64,
) -> f64 {
    decayed_hits(q, p, weight)
}

pub fn score_sc<A: AsRef<str>, B: AsRef<str>>(q: &[A], p: &[B]) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    decayed_hits(p, q, |_| 1.0) / decay_sum(0..p.len())
}

pub fn score_sb<A: AsRef<str>, B: AsRef<str>>(q: &[A], p: &[B]) -> f64 {
    if p.is_empty() || p.len() > q.len() {
        return 0.0;
    }
    let start = q
        .windows(p.len())
        .position(|w| w.iter().zip(p).all(|(a, b)| a.as_ref() == b.as_ref()));
    match start {
        Some(i) => decay_sum(i..i + p.len()) / decay_sum(0..q.len()),
        None => 0.0,
    }
}

/// Plain IDF overlap: weights of query tokens present in the candidate, with
/// no decay and no ordering.
pub fn score_idf<A: AsRef<str>, B: AsRef<str>>(
    q: &[A],
    p: &[B],
    weight: impl Fn(&str) -> f64,
) -> f64 {
    q.iter()
        .filter(|t| map_token(t.as_ref(), p).is_some())
        .map(|t| weight(t.as_ref()))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreParts {
    pub sq: f64,
    pub sc: f64,
    pub sb: f64,
}

impl ScoreParts {
    pub fn compute<A: AsRef<str>, B: AsRef<str>>(
        q: &[A],
        p: &[B],
        weight: impl Fn(&str) -> f64,
    ) -> Self {
        ScoreParts {
            sq: score_sq(q, p, weight),
            sc: score_sc(q, p),
            sb: score_sb(q, p),
        }
    }

    pub fn total(&self) -> f64 {
        self.sq * self.sc + self.sb
    }
}

/// Scoring functions: the full score and the three reduced baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Idf,
    Sq,
    SqSc,
    Full,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Idf, Variant::Sq, Variant::SqSc, Variant::Full];

    pub fn score<A: AsRef<str>, B: AsRef<str>>(
        self,
        q: &[A],
        p: &[B],
        weight: impl Fn(&str) -> f64,
    ) -> f64 {
        match self {
            Variant::Idf => score_idf(q, p, weight),
            Variant::Sq => score_sq(q, p, weight),
            Variant::SqSc => score_sq(q, p, weight) * score_sc(q, p),
            Variant::Full => ScoreParts::compute(q, p, weight).total(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Idf => "idf",
            Variant::Sq => "sq",
            Variant::SqSc => "sqsc",
            Variant::Full => "full",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "idf" => Ok(Variant::Idf),
            "sq" => Ok(Variant::Sq),
            "sqsc" => Ok(Variant::SqSc),
            "full" => Ok(Variant::Full),
            other => Err(Error::Invalid(format!("unknown scoring variant `{other}`"))),
        }
    }
}
