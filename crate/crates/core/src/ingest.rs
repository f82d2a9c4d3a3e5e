//! Loading name lists and documents into canonical in-memory forms.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kv;
use crate::text::Phrase;

/// Names shorter than this (in characters, after normalization) are dropped.
pub const MIN_NAME_CHARS: usize = 5;

const GARBAGE_DELIMITERS: &[char] = &['\\', '/', '#'];
const GARBAGE_MAX_CHARS: usize = 4;

/// An uppercase, whitespace-collapsed name together with its tokens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalizedName {
    text: String,
    tokens: Phrase,
}

impl NormalizedName {
    pub fn new(raw: &str) -> Self {
        let tokens = Phrase::parse(raw);
        NormalizedName {
            text: tokens.to_string(),
            tokens,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &Phrase {
        &self.tokens
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

impl fmt::Display for NormalizedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A deduplicated set of names from one source.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameList {
    pub source_id: String,
    names: BTreeSet<NormalizedName>,
}

/// What happened to the input lines of a name list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub lines: usize,
    pub dropped_short: usize,
    pub duplicates: usize,
}

impl NameList {
    pub fn new(source_id: impl Into<String>) -> Self {
        NameList {
            source_id: source_id.into(),
            names: BTreeSet::new(),
        }
    }

    /// Builds a list from raw lines, applying normalization, the minimum
    /// length rule and deduplication.
    pub fn from_lines<'a, I>(source_id: impl Into<String>, lines: I) -> (Self, LoadStats)
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut list = NameList::new(source_id);
        let mut stats = LoadStats::default();
        for line in lines {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            stats.lines += 1;
            let name = NormalizedName::new(line);
            if name.char_len() < MIN_NAME_CHARS {
                stats.dropped_short += 1;
            } else if !list.names.insert(name) {
                stats.duplicates += 1;
            }
        }
        (list, stats)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NormalizedName> {
        self.names.iter()
    }

    pub fn contains(&self, text: &str) -> bool {
        self.names.contains(&NormalizedName::new(text))
    }
}

/// Reads a UTF-8 name list, one name per line; `#` at column 0 starts a
/// comment.
pub fn load_name_list(path: &Path, source_id: &str) -> Result<(NameList, LoadStats)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (list, stats) = NameList::from_lines(source_id, text.lines());
    log::info!(
        "{}: {} names ({} short dropped, {} duplicates)",
        path.display(),
        list.len(),
        stats.dropped_short,
        stats.duplicates
    );
    Ok((list, stats))
}

/// Removes a short fragment (one token of at most four characters) that
/// follows the last `\`, `/` or `#`, together with the delimiter. Repeats
/// until nothing changes, and never strips a name down to nothing.
pub fn strip_trailing_garbage(name: &str) -> String {
    let mut current = name.trim_end().to_string();
    loop {
        let Some(pos) = current.rfind(GARBAGE_DELIMITERS) else {
            return current;
        };
        let fragment = current[pos + 1..].trim();
        let short = !fragment.contains(char::is_whitespace)
            && fragment.chars().count() <= GARBAGE_MAX_CHARS;
        let rest = current[..pos].trim_end();
        if !short || rest.is_empty() {
            return current;
        }
        current = rest.to_string();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SectionLabel {
    Header,
    Summary,
    Body,
}

impl SectionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SectionLabel::Header => "HEADER",
            SectionLabel::Summary => "SUMMARY",
            SectionLabel::Body => "BODY",
        }
    }
}

impl fmt::Display for SectionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SectionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "HEADER" => Ok(SectionLabel::Header),
            "SUMMARY" => Ok(SectionLabel::Summary),
            "BODY" => Ok(SectionLabel::Body),
            other => Err(Error::Invalid(format!("unknown section `{other}`"))),
        }
    }
}

/// A labeled character range of a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub label: SectionLabel,
    pub chars: Range<usize>,
}

/// Marker strings used to cut a document into header, summary and body.
///
/// A marker matches a line whose text, ignoring leading whitespace and case,
/// starts with the marker followed by a non-alphanumeric character or the
/// end of the line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionConfig {
    pub header_markers: Vec<String>,
    pub summary_end_markers: Vec<String>,
}

impl Default for SectionConfig {
    fn default() -> Self {
        SectionConfig {
            header_markers: vec!["SUMMARY".into(), "PROSPECTUS SUPPLEMENT".into()],
            summary_end_markers: vec!["TABLE OF CONTENTS".into()],
        }
    }
}

impl SectionConfig {
    /// Reads `header_markers` and `summary_end_markers` from a key=value
    /// file; missing keys keep their defaults.
    pub fn load(path: &Path) -> Result<Self> {
        let map = kv::load(path)?;
        let mut config = SectionConfig::default();
        for key in map.keys() {
            if key != "header_markers" && key != "summary_end_markers" {
                return Err(Error::Invalid(format!(
                    "{}: unknown key `{key}`",
                    path.display()
                )));
            }
        }
        if let Some(v) = map.get("header_markers") {
            config.header_markers = kv::list(v);
        }
        if let Some(v) = map.get("summary_end_markers") {
            config.summary_end_markers = kv::list(v);
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub raw_text: String,
    pub sections: Vec<Section>,
}

impl Document {
    pub fn new(
        doc_id: impl Into<String>,
        raw_text: impl Into<String>,
        config: &SectionConfig,
    ) -> Self {
        let raw_text = raw_text.into();
        let sections = detect_sections(&raw_text, config);
        Document {
            doc_id: doc_id.into(),
            raw_text,
            sections,
        }
    }

    /// Section containing the character at `offset`. Offsets outside every
    /// section count as body text.
    pub fn section_at(&self, offset: usize) -> SectionLabel {
        self.sections
            .iter()
            .find(|s| s.chars.contains(&offset))
            .map_or(SectionLabel::Body, |s| s.label)
    }
}

/// Reads a document; its id is the file name.
pub fn load_document(path: &Path, config: &SectionConfig) -> Result<Document> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc_id = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(Document::new(doc_id, raw, config))
}

fn detect_sections(text: &str, config: &SectionConfig) -> Vec<Section> {
    let total = text.chars().count();
    if total == 0 {
        return Vec::new();
    }
    let header_markers = upper_all(&config.header_markers);
    let end_markers = upper_all(&config.summary_end_markers);

    let mut summary_start = None;
    let mut body_start = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let upper = line.trim_start().to_uppercase();
        match summary_start {
            None if starts_with_marker(&upper, &header_markers) => summary_start = Some(offset),
            Some(_) if starts_with_marker(&upper, &end_markers) => {
                body_start = Some(offset);
                break;
            }
            _ => {}
        }
        offset += line.chars().count();
    }

    let Some(summary_start) = summary_start else {
        return vec![Section {
            label: SectionLabel::Body,
            chars: 0..total,
        }];
    };
    let summary_end = body_start.unwrap_or(total);
    let mut sections = Vec::with_capacity(3);
    if summary_start > 0 {
        sections.push(Section {
            label: SectionLabel::Header,
            chars: 0..summary_start,
        });
    }
    sections.push(Section {
        label: SectionLabel::Summary,
        chars: summary_start..summary_end,
    });
    if summary_end < total {
        sections.push(Section {
            label: SectionLabel::Body,
            chars: summary_end..total,
        });
    }
    sections
}

fn upper_all(markers: &[String]) -> Vec<String> {
    markers
        .iter()
        .map(|m| m.trim().to_uppercase())
        .filter(|m| !m.is_empty())
        .collect()
}

fn starts_with_marker(line: &str, markers: &[String]) -> bool {
    markers.iter().any(|m| {
        line.strip_prefix(m.as_str())
            .is_some_and(|rest| !rest.starts_with(char::is_alphanumeric))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_folded_duplicates_collapse() {
        let (list, stats) =
            NameList::from_lines("t", ["Wells Fargo Bank, N.A.", "wells fargo bank, n.a."]);
        assert_eq!(list.len(), 1);
        assert!(list.contains("WELLS FARGO BANK, N.A."));
        assert_eq!(stats.duplicates, 1);
    }

    #[test]
    fn short_names_are_dropped() {
        let (list, stats) = NameList::from_lines("t", ["O"]);
        assert!(list.is_empty());
        assert_eq!(stats.dropped_short, 1);
    }

    #[test]
    fn three_distinct_names_in_any_order() {
        let a = NameList::from_lines("t", ["Alpha Bank", "Beta Trust", "Gamma Fund"]).0;
        let b = NameList::from_lines("t", ["Gamma Fund", "Alpha Bank", "Beta Trust"]).0;
        assert_eq!(a.len(), 3);
        assert_eq!(a, b);
    }

    #[test]
    fn comment_lines_and_blanks_are_skipped() {
        let (list, stats) = NameList::from_lines("t", ["# header", "", "Alpha Bank"]);
        assert_eq!(list.len(), 1);
        assert_eq!(stats.lines, 1);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = load_name_list(Path::new("/nonexistent/names.txt"), "x").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn strips_short_trailing_fragments() {
        assert_eq!(
            strip_trailing_garbage("B HANAUER & CO /BD"),
            "B HANAUER & CO"
        );
        assert_eq!(strip_trailing_garbage("WELLS FARGO"), "WELLS FARGO");
        assert_eq!(strip_trailing_garbage("ACME #A1"), "ACME");
        assert_eq!(strip_trailing_garbage("ACME"), "ACME");
    }

    #[test]
    fn keeps_long_or_multi_token_fragments() {
        assert_eq!(
            strip_trailing_garbage("ALPHA/BETA HOLDINGS GROUP"),
            "ALPHA/BETA HOLDINGS GROUP"
        );
        assert_eq!(strip_trailing_garbage("ACME /DELAWARE"), "ACME /DELAWARE");
        assert_eq!(strip_trailing_garbage("/BD"), "/BD");
    }

    #[test]
    fn strip_is_idempotent_on_stacked_fragments() {
        let once = strip_trailing_garbage("ACME CORP /BD #X");
        assert_eq!(once, "ACME CORP");
        assert_eq!(strip_trailing_garbage(&once), once);
    }

    #[test]
    fn summary_marker_splits_header() {
        let text = "ACME TRUST 2006-1\nIssuer\nSUMMARY\nThe sponsor is Acme.\n";
        let k = text.find("SUMMARY").unwrap();
        let doc = Document::new("d", text, &SectionConfig::default());
        assert_eq!(
            doc.sections,
            vec![
                Section {
                    label: SectionLabel::Header,
                    chars: 0..k
                },
                Section {
                    label: SectionLabel::Summary,
                    chars: k..text.len()
                },
            ]
        );
    }

    #[test]
    fn end_marker_starts_body() {
        let text = "Cover\nSummary of Terms\nfoo\nTable of Contents\nbody text\n";
        let doc = Document::new("d", text, &SectionConfig::default());
        let s = text.find("Summary").unwrap();
        let b = text.find("Table").unwrap();
        let labels: Vec<_> = doc
            .sections
            .iter()
            .map(|s| (s.label, s.chars.clone()))
            .collect();
        assert_eq!(
            labels,
            vec![
                (SectionLabel::Header, 0..s),
                (SectionLabel::Summary, s..b),
                (SectionLabel::Body, b..text.len()),
            ]
        );
        assert_eq!(doc.section_at(b + 2), SectionLabel::Body);
    }

    #[test]
    fn marker_must_be_a_whole_word_at_line_start() {
        let text = "SUMMARYLIKE line\nsee the summary below\n";
        let doc = Document::new("d", text, &SectionConfig::default());
        assert_eq!(doc.sections.len(), 1);
        assert_eq!(doc.sections[0].label, SectionLabel::Body);
    }

    #[test]
    fn empty_and_unmarked_documents() {
        let empty = Document::new("e", "", &SectionConfig::default());
        assert!(empty.sections.is_empty());
        let plain = Document::new("p", "just text", &SectionConfig::default());
        assert_eq!(
            plain.sections,
            vec![Section {
                label: SectionLabel::Body,
                chars: 0..9
            }]
        );
    }

    #[test]
    fn section_offsets_count_characters() {
        let text = "Émetteur\nSUMMARY\n";
        let doc = Document::new("d", text, &SectionConfig::default());
        assert_eq!(doc.sections[0].chars, 0..9);
    }
}
