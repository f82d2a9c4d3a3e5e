//! Brute-force reference implementations used by the integration tests.
//!
//! Nothing here calls into the library's scoring or matching code; the
//! oracles restate the definitions as directly as possible.

#![allow(dead_code)]

use std::collections::HashSet;

use regex::Regex;

pub const DECAY: f64 = 0.5;

pub fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

// ---------------------------------------------------------------- ER oracle

/// First index of `t` in `p`, or -1.
pub fn map(t: &str, p: &[String]) -> i64 {
    for (j, x) in p.iter().enumerate() {
        if x == t {
            return j as i64;
        }
    }
    -1
}

pub fn sgn(t: &str, p: &[String]) -> f64 {
    if map(t, p) >= 0 {
        1.0
    } else {
        0.0
    }
}

/// Largest `i` such that every `i' <= i` maps strictly above all earlier
/// positions (position 0 always qualifies).
pub fn limit(a: &[String], b: &[String]) -> Option<usize> {
    let mut best = None;
    for i in 0..a.len() {
        let ok = (0..=i).all(|ip| (0..ip).all(|k| map(&a[ip], b) > map(&a[k], b)));
        if ok {
            best = Some(i);
        }
    }
    best
}

pub fn s_q(q: &[String], p: &[String], w: &dyn Fn(&str) -> f64) -> f64 {
    match limit(q, p) {
        None => 0.0,
        Some(imax) => (0..=imax)
            .map(|i| DECAY.powf(i as f64) * sgn(&q[i], p) * w(&q[i]))
            .sum(),
    }
}

pub fn s_c(q: &[String], p: &[String]) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    let den: f64 = (0..p.len()).map(|j| DECAY.powf(j as f64)).sum();
    let num: f64 = match limit(p, q) {
        None => 0.0,
        Some(jmax) => (0..=jmax)
            .map(|j| DECAY.powf(j as f64) * sgn(&p[j], q))
            .sum(),
    };
    num / den
}

pub fn s_b(q: &[String], p: &[String]) -> f64 {
    if p.is_empty() || p.len() > q.len() {
        return 0.0;
    }
    let m = p.len() - 1;
    let n = q.len() - 1;
    for i_min in 0..=(q.len() - p.len()) {
        if (0..=m).all(|k| q[i_min + k] == p[k]) {
            let num: f64 = (i_min..=i_min + m).map(|i| DECAY.powf(i as f64)).sum();
            let den: f64 = (0..=n).map(|i| DECAY.powf(i as f64)).sum();
            return num / den;
        }
    }
    0.0
}

pub fn score(q: &[String], p: &[String], w: &dyn Fn(&str) -> f64) -> f64 {
    s_q(q, p, w) * s_c(q, p) + s_b(q, p)
}

/// `ln(N / df)` per token, `ln N` for unseen tokens.
pub fn idf(corpus: &[Vec<String>], t: &str) -> f64 {
    let n = corpus.len() as f64;
    let df = corpus.iter().filter(|e| e.iter().any(|x| x == t)).count();
    if df == 0 {
        n.ln()
    } else {
        (n / df as f64).ln()
    }
}

/// Best entry among those sharing a token with `q`: highest score, lowest
/// id on ties.
pub fn resolve(
    q: &[String],
    corpus: &[Vec<String>],
    w: &dyn Fn(&str) -> f64,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (id, p) in corpus.iter().enumerate() {
        if !q.iter().any(|t| p.contains(t)) {
            continue;
        }
        let s = score(q, p, w);
        match best {
            Some((_, b)) if s <= b + 1e-12 => {}
            _ => best = Some((id, s)),
        }
    }
    best
}

// --------------------------------------------------------------- NER oracle

pub struct Dicts {
    pub roots: HashSet<Vec<String>>,
    pub suffixes: HashSet<Vec<String>>,
    /// Anchored regex over space-joined tokens, and its token count.
    pub patterns: Vec<(Regex, usize)>,
    pub invalid: HashSet<Vec<String>>,
}

impl Dicts {
    pub fn new(roots: &[&str], suffixes: &[&str], patterns: &[&str], invalid: &[&str]) -> Self {
        let set = |xs: &[&str]| xs.iter().map(|s| toks(&s.to_uppercase())).collect();
        Dicts {
            roots: set(roots),
            suffixes: set(suffixes),
            patterns: patterns
                .iter()
                .map(|p| {
                    let n = p.split_whitespace().count();
                    (Regex::new(&format!("^{p}$")).unwrap(), n)
                })
                .collect(),
            invalid: set(invalid),
        }
    }

    fn is_suffix(&self, span: &[String]) -> bool {
        self.suffixes.contains(span)
            || self
                .patterns
                .iter()
                .any(|(re, n)| *n == span.len() && re.is_match(&span.join(" ")))
    }
}

/// Whitespace tokens with character offsets.
pub fn char_tokens(text: &str) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    let mut n = 0;
    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            if !cur.is_empty() {
                out.push((std::mem::take(&mut cur).to_uppercase(), start, i));
            }
        } else {
            if cur.is_empty() {
                start = i;
            }
            cur.push(c);
        }
        n = i + 1;
    }
    if !cur.is_empty() {
        out.push((cur.to_uppercase(), start, n));
    }
    out
}

/// Mentions as (start char, end char, surface), trying every token range.
pub fn extract(text: &str, d: &Dicts) -> Vec<(usize, usize, String)> {
    let toks = char_tokens(text);
    let words: Vec<String> = toks.iter().map(|t| t.0.clone()).collect();
    let n = words.len();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < n {
        let root_end = (pos + 1..=n)
            .filter(|&e| d.roots.contains(&words[pos..e]))
            .max();
        let Some(root_end) = root_end else {
            pos += 1;
            continue;
        };
        let mut end = root_end;
        while let Some(e) = (end + 1..=n).filter(|&e| d.is_suffix(&words[end..e])).max() {
            end = e;
        }
        let keep =
            !d.invalid.contains(&words[pos..end]) && !d.invalid.contains(&words[pos..root_end]);
        if keep {
            let surface = words_surface(text, toks[pos].1, toks[end - 1].2);
            out.push((toks[pos].1, toks[end - 1].2, surface));
        }
        pos = end;
    }
    out
}

fn words_surface(text: &str, start: usize, end: usize) -> String {
    let s: String = text.chars().skip(start).take(end - start).collect();
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

// ----------------------------------------------------------------- fixtures

/// Entity-resolution fixture: corpus names, and queries labeled with the
/// corpus name they were built from (`None` for pure distractors).
pub struct ResolutionFixture {
    pub corpus: Vec<String>,
    pub labeled: Vec<(String, Option<String>)>,
}

const GENERIC: [&str; 12] = [
    "BANK",
    "TRUST",
    "MORTGAGE",
    "CAPITAL",
    "FUNDING",
    "SECURITIES",
    "FINANCIAL",
    "HOLDINGS",
    "NATIONAL",
    "ASSET",
    "SERVICES",
    "CORPORATION",
];
const NOISE: [&str; 8] = [
    "SERVICER", "ISSUER", "SPONSOR", "NA", "COMPANY", "SERIES", "2006", "AS",
];

fn made_up_word(rng: &mut impl rand::Rng) -> String {
    const C: &[u8] = b"BDFGKLMNPRSTVZ";
    const V: &[u8] = b"AEIOU";
    (0..3)
        .flat_map(|_| {
            [
                C[rng.gen_range(0..C.len())] as char,
                V[rng.gen_range(0..V.len())] as char,
            ]
        })
        .collect()
}

/// `entries` corpus names of 1-2 distinctive and 1-2 generic tokens;
/// three quarters of the queries contain one name verbatim followed by up
/// to two noise tokens (and, with `leading_noise`, preceded by up to two),
/// the rest are distractors.
pub fn resolution_fixture(
    seed: u64,
    entries: usize,
    queries: usize,
    leading_noise: bool,
) -> ResolutionFixture {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let mut pool = Vec::new();
    while pool.len() < entries * 2 + 20 {
        let w = made_up_word(&mut rng);
        if !pool.contains(&w) {
            pool.push(w);
        }
    }
    let (used, unused) = pool.split_at(entries * 2);

    let mut corpus: Vec<Vec<String>> = Vec::new();
    while corpus.len() < entries {
        let mut name: Vec<String> = (0..rng.gen_range(1..=2))
            .map(|_| used.choose(&mut rng).unwrap().clone())
            .collect();
        name.dedup();
        for _ in 0..rng.gen_range(1..=2) {
            let g = GENERIC.choose(&mut rng).unwrap().to_string();
            if !name.contains(&g) {
                name.push(g);
            }
        }
        if !corpus.contains(&name) {
            corpus.push(name);
        }
    }

    let noise_token = |rng: &mut rand_chacha::ChaCha8Rng, corpus: &[Vec<String>]| -> String {
        match rng.gen_range(0..3) {
            0 => NOISE.choose(rng).unwrap().to_string(),
            1 => GENERIC.choose(rng).unwrap().to_string(),
            _ => corpus.choose(rng).unwrap()[0].clone(),
        }
    };

    let planted = queries * 3 / 4;
    let mut labeled = Vec::new();
    for i in 0..queries {
        if i < planted {
            let e = rng.gen_range(0..corpus.len());
            let mut q: Vec<String> = Vec::new();
            let lead = if leading_noise {
                rng.gen_range(0..=2)
            } else {
                0
            };
            for _ in 0..lead {
                q.push(noise_token(&mut rng, &corpus));
            }
            q.extend(corpus[e].iter().cloned());
            for _ in 0..rng.gen_range(0..=2) {
                q.push(noise_token(&mut rng, &corpus));
            }
            labeled.push((q.join(" "), Some(corpus[e].join(" "))));
        } else {
            let mut q = vec![unused.choose(&mut rng).unwrap().clone()];
            for _ in 0..rng.gen_range(1..=3) {
                q.push(noise_token(&mut rng, &corpus));
            }
            q.shuffle(&mut rng);
            labeled.push((q.join(" "), None));
        }
    }
    ResolutionFixture {
        corpus: corpus.iter().map(|n| n.join(" ")).collect(),
        labeled,
    }
}
