//! Root and suffix dictionary generation from name lists.
//!
//! Every name contributes through each heuristic that applies to it and the
//! results are unioned: comma splitting, trailing-suffix extraction, root
//! variants, splitting on special tokens and stop-free trigrams. Filters run
//! last, and the suffix dictionary also carries token patterns for
//! series-numbered issuer suffixes.

mod pattern;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{strip_trailing_garbage, NameList, NormalizedName, MIN_NAME_CHARS};
use crate::text::{is_punct, Phrase};

pub use pattern::{builtin_patterns, SuffixPattern};

const PATTERN_PREFIX: &str = "re:";

/// Names with at least this many word tokens also contribute trigrams.
pub const LONG_NAME_TOKENS: usize = 5;

fn token_set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn default_stop_tokens() -> BTreeSet<String> {
    token_set(&["THE", "OF", "AND", "A", "AN"])
}

pub fn default_special_tokens() -> BTreeSet<String> {
    token_set(&["BANK", "FUND", "TRUST", "CORP", "GROUP"])
}

pub fn default_address_terms() -> BTreeSet<String> {
    token_set(&[
        "STREET",
        "ST",
        "CENTER",
        "CENTRE",
        "AVENUE",
        "AVE",
        "ROAD",
        "RD",
        "BOULEVARD",
        "BLVD",
        "DRIVE",
        "LANE",
        "PLAZA",
        "SUITE",
        "FLOOR",
        "BUILDING",
        "TOWER",
        "SQUARE",
        "PLACE",
        "PARKWAY",
        "HIGHWAY",
        "BOX",
    ])
}

pub fn default_location_terms() -> BTreeSet<String> {
    token_set(&[
        "ATLANTA",
        "BALTIMORE",
        "BOSTON",
        "CHARLOTTE",
        "CHICAGO",
        "CLEVELAND",
        "DALLAS",
        "DENVER",
        "DETROIT",
        "HOUSTON",
        "IRVINE",
        "LONDON",
        "MIAMI",
        "MINNEAPOLIS",
        "NEWARK",
        "PASADENA",
        "PHILADELPHIA",
        "PHOENIX",
        "PITTSBURGH",
        "SEATTLE",
        "TORONTO",
        "AMERICA",
        "AMERICAN",
        "CALIFORNIA",
        "DELAWARE",
        "FLORIDA",
        "ILLINOIS",
        "MINNESOTA",
        "NEVADA",
        "OHIO",
        "PENNSYLVANIA",
        "TEXAS",
        "VIRGINIA",
    ])
}

/// Term lists used to drop unhelpful dictionary entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterSet {
    pub address_terms: BTreeSet<String>,
    pub location_terms: BTreeSet<String>,
    pub stop_tokens: BTreeSet<String>,
    /// Entries that must never appear in a generated dictionary.
    pub invalid: BTreeSet<Phrase>,
}

impl Default for FilterSet {
    fn default() -> Self {
        FilterSet {
            address_terms: default_address_terms(),
            location_terms: default_location_terms(),
            stop_tokens: default_stop_tokens(),
            invalid: BTreeSet::new(),
        }
    }
}

impl FilterSet {
    fn is_stop_only(&self, entry: &Phrase) -> bool {
        entry
            .tokens()
            .iter()
            .all(|t| is_punct(t) || self.stop_tokens.contains(t))
    }

    fn is_single_place_term(&self, entry: &Phrase) -> bool {
        match entry.tokens() {
            [t] => self.address_terms.contains(t) || self.location_terms.contains(t),
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub filters: FilterSet,
    pub special_tokens: BTreeSet<String>,
    /// Patterns added to the suffix dictionary besides the built-in ones.
    pub extra_patterns: Vec<SuffixPattern>,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            filters: FilterSet::default(),
            special_tokens: default_special_tokens(),
            extra_patterns: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RootDictionary {
    pub entries: BTreeSet<Phrase>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuffixDictionary {
    pub literal_entries: BTreeSet<Phrase>,
    pub pattern_entries: Vec<SuffixPattern>,
}

impl RootDictionary {
    pub fn contains(&self, text: &str) -> bool {
        self.entries.contains(&Phrase::parse(text))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Self {
        RootDictionary {
            entries: read_entries(text),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_text(&text))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_text())
    }
}

impl SuffixDictionary {
    /// True when `text` is a literal entry or matches a pattern entry.
    pub fn contains(&self, text: &str) -> bool {
        let phrase = Phrase::parse(text);
        self.literal_entries.contains(&phrase)
            || self
                .pattern_entries
                .iter()
                .any(|p| p.matches_phrase(&phrase))
    }

    pub fn len(&self) -> usize {
        self.literal_entries.len() + self.pattern_entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn add_patterns(&mut self, patterns: impl IntoIterator<Item = SuffixPattern>) {
        for p in patterns {
            if !self.pattern_entries.contains(&p) {
                self.pattern_entries.push(p);
            }
        }
        self.pattern_entries
            .sort_by(|a, b| a.pattern_text().cmp(b.pattern_text()));
    }

    /// Literal entries one per line, then `re:` pattern lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.literal_entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        for p in &self.pattern_entries {
            out.push_str(PATTERN_PREFIX);
            out.push_str(p.pattern_text());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut dict = SuffixDictionary::default();
        let mut patterns = Vec::new();
        for line in text.lines() {
            if let Some(p) = line.strip_prefix(PATTERN_PREFIX) {
                patterns.push(SuffixPattern::new(p, &[])?);
            } else {
                let phrase = Phrase::parse(line);
                if !phrase.is_empty() {
                    dict.literal_entries.insert(phrase);
                }
            }
        }
        dict.add_patterns(patterns);
        Ok(dict)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_text())
    }
}

/// Parses dictionary lines (one entry per line, blanks skipped).
pub fn read_entries(text: &str) -> BTreeSet<Phrase> {
    text.lines()
        .map(Phrase::parse)
        .filter(|p| !p.is_empty())
        .collect()
}

/// Reads a pattern file: one pattern per line, optionally followed by
/// tab-separated positive examples. A leading `re:` is accepted. Blank lines
/// and lines starting with `#` are skipped.
pub fn load_patterns(path: &Path) -> Result<Vec<SuffixPattern>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let pattern = fields.next().unwrap_or_default();
        let pattern = pattern.strip_prefix(PATTERN_PREFIX).unwrap_or(pattern);
        let examples: Vec<&str> = fields.filter(|f| !f.trim().is_empty()).collect();
        let compiled = SuffixPattern::new(pattern, &examples)
            .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        out.push(compiled);
    }
    Ok(out)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Result of splitting a name of the form `A, B, ..., D, E`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommaSplit {
    pub roots: Vec<Phrase>,
    pub suffixes: Vec<Phrase>,
}

fn is_long_segment(segment: &[String]) -> bool {
    let words = segment.iter().filter(|t| !is_punct(t)).count();
    let chars: usize =
        segment.iter().map(|t| t.chars().count()).sum::<usize>() + segment.len().saturating_sub(1);
    words >= 2 || chars >= 8
}

/// Comma-prefix roots (`A`, `A, B`, ... `A, ..., D`), long middle segments
/// as roots, and every trailing segment with its comma as a suffix.
/// Returns `None` when the name has no comma.
pub fn split_on_commas(name: &Phrase) -> Option<CommaSplit> {
    let tokens = name.tokens();
    if !name.contains_token(",") {
        return None;
    }
    let mut segments: Vec<&[String]> = Vec::new();
    let mut bounds = Vec::new();
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        if t == "," {
            segments.push(&tokens[start..i]);
            bounds.push(i);
            start = i + 1;
        }
    }
    segments.push(&tokens[start..]);

    let mut split = CommaSplit::default();
    for (k, &comma) in bounds.iter().enumerate() {
        // Prefix ending just before the k-th comma.
        if !segments[k].is_empty() && comma > 0 {
            split.roots.push(name.slice(0..comma));
        }
        let seg = segments[k + 1];
        if !seg.is_empty() {
            split
                .suffixes
                .push(name.slice(comma..comma + 1 + seg.len()));
        }
    }
    let last = segments.len() - 1;
    for seg in &segments[1..last] {
        if !seg.is_empty() && is_long_segment(seg) {
            split.roots.push(Phrase::from_tokens(seg.iter().cloned()));
        }
    }
    split.suffixes.reverse();
    dedup(&mut split.roots);
    dedup(&mut split.suffixes);
    Some(split)
}

fn dedup(v: &mut Vec<Phrase>) {
    let mut seen = BTreeSet::new();
    v.retain(|p| seen.insert(p.clone()));
}

fn short_or_numeric(token: &str) -> bool {
    let chars = token.chars().count();
    let digits = token.chars().filter(char::is_ascii_digit).count();
    chars <= 3 || 2 * digits >= chars
}

/// The trailing suffix of a comma-free name: its last token, or the last
/// two when the last is short (at most three characters) or at least half
/// digits. Trailing bare periods stay attached. `None` when the name
/// contains `OF` or a comma, or when the suffix would be the whole name.
pub fn extract_trailing_suffix(name: &Phrase) -> Option<Phrase> {
    if name.contains_token("OF") || name.contains_token(",") {
        return None;
    }
    let tokens = name.tokens();
    let core = tokens.iter().rposition(|t| t != ".")? + 1;
    if core < 2 {
        return None;
    }
    let take = if core >= 3 && short_or_numeric(&tokens[core - 1]) {
        2
    } else {
        1
    };
    Some(name.slice(core - take..tokens.len()))
}

fn strip_leading_punct(mut p: Phrase) -> Phrase {
    let skip = p.tokens().iter().take_while(|t| is_punct(t)).count();
    if skip > 0 {
        p = p.slice(skip..p.len());
    }
    p
}

/// The whole name, the name without its suffix, without its first token,
/// and without both. Variants that are empty, punctuation-only, or nothing
/// but the suffix itself are dropped.
pub fn root_variants(name: &Phrase, suffix: Option<&Phrase>) -> Vec<Phrase> {
    let n = name.len();
    let suffix_len = suffix
        .filter(|s| !s.is_empty() && s.len() <= n && name.tokens()[n - s.len()..] == *s.tokens())
        .map_or(0, Phrase::len);

    let mut out = vec![name.clone()];
    if suffix_len > 0 {
        out.push(name.slice(0..n - suffix_len));
    }
    if n > 1 {
        out.push(strip_leading_punct(name.slice(1..n)));
        if suffix_len > 0 && n - suffix_len > 1 {
            out.push(strip_leading_punct(name.slice(1..n - suffix_len)));
        }
    }
    let bare_suffix = suffix
        .filter(|_| suffix_len > 0)
        .map(|s| strip_leading_punct(s.clone()));
    out.retain(|p| p.word_count() > 0 && Some(p) != bare_suffix.as_ref());
    dedup(&mut out);
    out
}

/// Result of splitting a name at its first special token.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecialSplit {
    pub roots: Vec<Phrase>,
    pub suffix: Option<Phrase>,
}

/// Splits at the first special token: the part before goes to the roots,
/// the rest to the suffixes, unless the rest contains `OF`, in which case
/// the part from `OF` onward becomes a root instead.
pub fn split_on_special_token(name: &Phrase, special: &BTreeSet<String>) -> Option<SpecialSplit> {
    let tokens = name.tokens();
    let at = tokens.iter().position(|t| special.contains(t))?;
    let mut split = SpecialSplit::default();
    if at > 0 {
        split.roots.push(name.slice(0..at));
    }
    match tokens[at..].iter().position(|t| t == "OF") {
        Some(of) => split.roots.push(name.slice(at + of..tokens.len())),
        None => split.suffix = Some(name.slice(at..tokens.len())),
    }
    Some(split)
}

/// Consecutive three-token windows of a long name that contain neither a
/// stop token nor punctuation.
pub fn trigram_roots(name: &Phrase, stop_tokens: &BTreeSet<String>) -> BTreeSet<Phrase> {
    if name.word_count() < LONG_NAME_TOKENS {
        return BTreeSet::new();
    }
    name.tokens()
        .windows(3)
        .filter(|w| w.iter().all(|t| !is_punct(t) && !stop_tokens.contains(t)))
        .map(|w| Phrase::from_tokens(w.iter().cloned()))
        .collect()
}

/// Drops entries that are a single address or location term, entries made
/// only of stop tokens and punctuation, and entries listed as invalid.
/// Multi-token entries are never edited.
pub fn apply_filters(entries: BTreeSet<Phrase>, filters: &FilterSet) -> BTreeSet<Phrase> {
    entries
        .into_iter()
        .filter(|e| {
            !e.is_empty()
                && !filters.is_single_place_term(e)
                && !filters.is_stop_only(e)
                && !filters.invalid.contains(e)
        })
        .collect()
}

#[derive(Default)]
struct Candidates {
    roots: BTreeSet<Phrase>,
    suffixes: BTreeSet<Phrase>,
}

impl Candidates {
    fn merge(mut self, other: Candidates) -> Candidates {
        self.roots.extend(other.roots);
        self.suffixes.extend(other.suffixes);
        self
    }
}

fn candidates_for(name: &NormalizedName, options: &GenOptions) -> Candidates {
    let mut c = Candidates::default();
    let stripped = NormalizedName::new(&strip_trailing_garbage(name.text()));
    if stripped.char_len() < MIN_NAME_CHARS {
        return c;
    }
    let tokens = stripped.tokens();

    let suffix = match split_on_commas(tokens) {
        Some(split) => {
            c.roots.extend(split.roots);
            let last = split.suffixes.first().cloned();
            c.suffixes.extend(split.suffixes);
            last
        }
        None => {
            let s = extract_trailing_suffix(tokens);
            c.suffixes.extend(s.clone());
            s
        }
    };
    c.roots.extend(root_variants(tokens, suffix.as_ref()));
    if let Some(split) = split_on_special_token(tokens, &options.special_tokens) {
        c.roots.extend(split.roots);
        c.suffixes.extend(split.suffix);
    }
    c.roots
        .extend(trigram_roots(tokens, &options.filters.stop_tokens));
    c
}

/// Builds both dictionaries from the given lists. Output is a deterministic
/// function of the set of input names.
pub fn generate_dictionaries(
    lists: &[NameList],
    options: &GenOptions,
) -> (RootDictionary, SuffixDictionary) {
    let names: Vec<&NormalizedName> = lists.iter().flat_map(NameList::iter).collect();
    let merged = names
        .par_iter()
        .map(|n| candidates_for(n, options))
        .reduce(Candidates::default, Candidates::merge);

    let roots = RootDictionary {
        entries: apply_filters(merged.roots, &options.filters),
    };
    let mut suffixes = SuffixDictionary {
        literal_entries: apply_filters(merged.suffixes, &options.filters),
        pattern_entries: Vec::new(),
    };
    suffixes.add_patterns(builtin_patterns());
    suffixes.add_patterns(options.extra_patterns.iter().cloned());
    (roots, suffixes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Phrase {
        Phrase::parse(s)
    }

    fn set(items: &[&str]) -> BTreeSet<Phrase> {
        items.iter().map(|s| p(s)).collect()
    }

    #[test]
    fn comma_split_worked_example() {
        let split = split_on_commas(&p("SOUTHEAST INVESTMENTS, N.C., INC.")).unwrap();
        assert!(split.roots.contains(&p("SOUTHEAST INVESTMENTS")));
        assert!(split.roots.contains(&p("SOUTHEAST INVESTMENTS, N.C.")));
        assert!(split.suffixes.contains(&p(", N.C.")));
        assert!(split.suffixes.contains(&p(",INC.")));
        // N.C. is a short middle segment and does not become a root.
        assert!(!split.roots.contains(&p("N.C.")));
    }

    #[test]
    fn comma_split_two_segments() {
        let split = split_on_commas(&p("ACME, LLC")).unwrap();
        assert_eq!(split.roots, vec![p("ACME")]);
        assert_eq!(split.suffixes, vec![p(",LLC")]);
    }

    #[test]
    fn comma_split_long_middle_segment() {
        let split = split_on_commas(&p("ALPHA, BETA CAPITAL, INC.")).unwrap();
        assert!(split.roots.contains(&p("BETA CAPITAL")));
        assert!(split.suffixes.contains(&p(", BETA CAPITAL")));
    }

    #[test]
    fn comma_split_requires_comma() {
        assert_eq!(split_on_commas(&p("WELLS FARGO BANK")), None);
    }

    #[test]
    fn trailing_suffix_rules() {
        assert_eq!(
            extract_trailing_suffix(&p("WELLS FARGO BANK")),
            Some(p("BANK"))
        );
        assert_eq!(extract_trailing_suffix(&p("BANK OF AMERICA")), None);
        assert_eq!(
            extract_trailing_suffix(&p("ALTERNATIVE LOAN TRUST 2006-A1")),
            Some(p("TRUST 2006-A1"))
        );
        assert_eq!(
            extract_trailing_suffix(&p("ACME HOLDINGS INC.")),
            Some(p("HOLDINGS INC."))
        );
        assert_eq!(extract_trailing_suffix(&p("ACME CO.")), Some(p("CO.")));
        assert_eq!(extract_trailing_suffix(&p("ACMECO")), None);
    }

    #[test]
    fn root_variants_worked_example() {
        let name = p("J.P. MORGAN ALTERNATIVE LOAN TRUST 2006-A1");
        let v = root_variants(&name, Some(&p("TRUST 2006-A1")));
        for want in [
            "J.P. MORGAN ALTERNATIVE LOAN TRUST 2006-A1",
            "J.P. MORGAN ALTERNATIVE LOAN",
            "MORGAN ALTERNATIVE LOAN",
        ] {
            assert!(v.contains(&p(want)), "missing {want}");
        }
    }

    #[test]
    fn root_variants_small_names() {
        assert_eq!(root_variants(&p("ACMECO"), None), vec![p("ACMECO")]);
        let v: BTreeSet<_> = root_variants(&p("ACME CAPITAL"), None)
            .into_iter()
            .collect();
        assert_eq!(v, set(&["ACME CAPITAL", "CAPITAL"]));
    }

    #[test]
    fn root_variants_skip_leading_comma() {
        let v: BTreeSet<_> = root_variants(&p("ACME, LLC"), Some(&p(",LLC")))
            .into_iter()
            .collect();
        assert_eq!(v, set(&["ACME, LLC", "ACME"]));
        let v: BTreeSet<_> = root_variants(&p("ACME CAPITAL"), Some(&p("CAPITAL")))
            .into_iter()
            .collect();
        assert_eq!(v, set(&["ACME CAPITAL", "ACME"]));
    }

    #[test]
    fn special_token_split() {
        let special = default_special_tokens();
        let s =
            split_on_special_token(&p("SAVINGS BANK OF THE FINGER LAKES FSB"), &special).unwrap();
        assert!(s.roots.contains(&p("OF THE FINGER LAKES FSB")));
        assert_eq!(s.suffix, None);

        let s = split_on_special_token(&p("WELLS FARGO BANK"), &special).unwrap();
        assert_eq!(s.roots, vec![p("WELLS FARGO")]);
        assert_eq!(s.suffix, Some(p("BANK")));

        assert_eq!(split_on_special_token(&p("ACME HOLDINGS"), &special), None);
    }

    #[test]
    fn trigrams() {
        let stop = default_stop_tokens();
        assert_eq!(trigram_roots(&p("A1 B2 C3 D4 E5 F6"), &stop).len(), 4);
        let t = trigram_roots(&p("MORTGAGE TRUST OF NEW YORK CITY"), &stop);
        assert_eq!(t, set(&["NEW YORK CITY"]));
        assert!(trigram_roots(&p("ONE TWO THREE FOUR"), &stop).is_empty());
    }

    #[test]
    fn filters() {
        let f = FilterSet::default();
        assert!(apply_filters(set(&["STREET"]), &f).is_empty());
        assert_eq!(
            apply_filters(set(&["WALL STREET FUNDING"]), &f),
            set(&["WALL STREET FUNDING"])
        );
        assert!(apply_filters(BTreeSet::new(), &f).is_empty());
        assert!(apply_filters(set(&["OF THE"]), &f).is_empty());
    }

    #[test]
    fn empty_input_gives_pattern_only_dictionaries() {
        let (roots, suffixes) =
            generate_dictionaries(&[NameList::new("x")], &GenOptions::default());
        assert!(roots.is_empty());
        assert!(suffixes.literal_entries.is_empty());
        assert_eq!(suffixes.pattern_entries.len(), 2);
    }

    #[test]
    fn trailing_suffix_lands_in_generated_dictionary() {
        let list = NameList::from_lines("t", ["Wells Fargo Bank"]).0;
        let (roots, suffixes) = generate_dictionaries(&[list], &GenOptions::default());
        assert!(suffixes.contains("BANK"));
        assert!(roots.contains("WELLS FARGO"));
    }

    #[test]
    fn duplicated_list_is_idempotent() {
        let list = NameList::from_lines("t", ["Wells Fargo Bank", "Acme Capital Trust 2006-1"]).0;
        let once = generate_dictionaries(std::slice::from_ref(&list), &GenOptions::default());
        let twice = generate_dictionaries(&[list.clone(), list], &GenOptions::default());
        assert_eq!(once, twice);
    }

    #[test]
    fn serialization_round_trips() {
        let list = NameList::from_lines(
            "t",
            [
                "Southeast Investments, N.C., Inc.",
                "Wells Fargo Bank, N.A.",
            ],
        )
        .0;
        let (roots, suffixes) = generate_dictionaries(&[list], &GenOptions::default());
        assert_eq!(RootDictionary::from_text(&roots.to_text()), roots);
        let back = SuffixDictionary::from_text(&suffixes.to_text()).unwrap();
        assert_eq!(back, suffixes);
        assert!(suffixes.to_text().contains("re:TRUST \\d{4}-[A-Z0-9]+\n"));
    }
}
