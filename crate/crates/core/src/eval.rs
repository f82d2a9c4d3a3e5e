//! Extraction and resolution quality measures.
//!
//! Extraction is counted with four numbers: ALL (mentions produced), WRO
//! (mentions touching no gold mention), PAR (mentions overlapping a gold
//! mention without matching its span) and MIS (gold mentions no extracted
//! mention touches). Resolution quality is read off a precision/recall curve
//! over the best-match scores.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::ops::Range;

use crate::er::{Corpus, Variant};
use crate::error::{Error, Result};

/// A span of a document, as read from a mention or gold TSV.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Annotation {
    pub doc_id: String,
    pub span: Range<usize>,
    pub surface: String,
}

impl Annotation {
    pub fn new(doc_id: impl Into<String>, span: Range<usize>, surface: impl Into<String>) -> Self {
        Annotation {
            doc_id: doc_id.into(),
            span,
            surface: surface.into(),
        }
    }

    fn overlaps(&self, other: &Annotation) -> bool {
        self.doc_id == other.doc_id
            && self.span.start < other.span.end
            && other.span.start < self.span.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Correct,
    Wro,
    Par,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMention {
    pub doc_id: String,
    pub span: Range<usize>,
    pub label: Label,
    pub gold_span: Option<Range<usize>>,
}

/// Fails if two gold mentions of the same document overlap.
pub fn validate_gold(gold: &[Annotation]) -> Result<()> {
    let mut sorted: Vec<&Annotation> = gold.iter().collect();
    sorted.sort_by(|a, b| (&a.doc_id, a.span.start).cmp(&(&b.doc_id, b.span.start)));
    for pair in sorted.windows(2) {
        if pair[0].overlaps(pair[1]) {
            return Err(Error::Invalid(format!(
                "overlapping gold mentions in {}: {}..{} and {}..{}",
                pair[0].doc_id,
                pair[0].span.start,
                pair[0].span.end,
                pair[1].span.start,
                pair[1].span.end
            )));
        }
    }
    Ok(())
}

/// Labels each mention against the gold set: an identical span is correct,
/// an overlapping one partial, anything else wrong.
pub fn label_mentions(mentions: &[Annotation], gold: &[Annotation]) -> Result<Vec<LabeledMention>> {
    validate_gold(gold)?;
    Ok(mentions
        .iter()
        .map(|m| {
            let exact = gold
                .iter()
                .find(|g| g.doc_id == m.doc_id && g.span == m.span);
            let (label, gold_span) = match exact {
                Some(g) => (Label::Correct, Some(g.span.clone())),
                None => match gold.iter().find(|g| g.overlaps(m)) {
                    Some(g) => (Label::Par, Some(g.span.clone())),
                    None => (Label::Wro, None),
                },
            };
            LabeledMention {
                doc_id: m.doc_id.clone(),
                span: m.span.clone(),
                label,
                gold_span,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub all: usize,
    pub wro: usize,
    pub par: usize,
    pub mis: usize,
}

impl EvalCounts {
    pub fn new(all: usize, wro: usize, par: usize, mis: usize) -> Result<Self> {
        if wro + par > all {
            return Err(Error::Invalid(format!(
                "WRO + PAR ({}) exceeds ALL ({all})",
                wro + par
            )));
        }
        Ok(EvalCounts { all, wro, par, mis })
    }

    pub fn merge(self, other: EvalCounts) -> EvalCounts {
        EvalCounts {
            all: self.all + other.all,
            wro: self.wro + other.wro,
            par: self.par + other.par,
            mis: self.mis + other.mis,
        }
    }
}

pub fn count(labeled: &[LabeledMention], gold: &[Annotation]) -> Result<EvalCounts> {
    validate_gold(gold)?;
    let touches = |g: &Annotation, m: &LabeledMention| {
        g.doc_id == m.doc_id && g.span.start < m.span.end && m.span.start < g.span.end
    };
    Ok(EvalCounts {
        all: labeled.len(),
        wro: labeled.iter().filter(|m| m.label == Label::Wro).count(),
        par: labeled.iter().filter(|m| m.label == Label::Par).count(),
        mis: gold
            .iter()
            .filter(|g| !labeled.iter().any(|m| touches(g, m)))
            .count(),
    })
}

/// Metric values as fractions; `None` where a denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub pre: Option<f64>,
    pub par_pre: Option<f64>,
    pub rec: Option<f64>,
    pub par_rec: Option<f64>,
    pub f1: Option<f64>,
    pub par_f1: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn harmonic(p: Option<f64>, r: Option<f64>) -> Option<f64> {
    let (p, r) = (p?, r?);
    Some(if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    })
}

pub fn metrics(c: EvalCounts) -> MetricReport {
    let exact = c.all - c.wro - c.par;
    let touched = c.all - c.wro;
    let pre = ratio(exact, c.all);
    let par_pre = ratio(touched, c.all);
    let rec = ratio(exact, exact + c.mis);
    let par_rec = ratio(touched, touched + c.mis);
    MetricReport {
        pre,
        par_pre,
        rec,
        par_rec,
        f1: harmonic(pre, rec),
        par_f1: harmonic(par_pre, par_rec),
    }
}

impl MetricReport {
    pub fn rows(&self) -> [(&'static str, Option<f64>); 6] {
        [
            ("PRE", self.pre),
            ("PAR_PRE", self.par_pre),
            ("REC", self.rec),
            ("PAR_REC", self.par_rec),
            ("F1", self.f1),
            ("PAR_F1", self.par_f1),
        ]
    }
}

fn or_undef(v: Option<f64>, fmt: impl Fn(f64) -> String) -> String {
    v.map_or_else(|| "undef".to_string(), fmt)
}

/// Human-readable report: counts, then percentages and F-scores.
pub fn render_table(c: &EvalCounts, m: &MetricReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>8}", "ALL", c.all);
    let _ = writeln!(out, "{:<8} {:>8}", "WRO", c.wro);
    let _ = writeln!(out, "{:<8} {:>8}", "PAR", c.par);
    let _ = writeln!(out, "{:<8} {:>8}", "MIS", c.mis);
    for (name, value) in m.rows() {
        let shown = if name.ends_with("F1") {
            or_undef(value, |v| format!("{v:.4}"))
        } else {
            or_undef(value, |v| format!("{:.2}%", v * 100.0))
        };
        let _ = writeln!(out, "{name:<8} {shown:>8}");
    }
    out
}

/// `metric<TAB>value` lines, values as fractions with six decimals.
pub fn render_tsv(c: &EvalCounts, m: &MetricReport) -> String {
    let mut out = String::from("metric\tvalue\n");
    for (name, v) in [
        ("ALL", c.all),
        ("WRO", c.wro),
        ("PAR", c.par),
        ("MIS", c.mis),
    ] {
        let _ = writeln!(out, "{name}\t{v}");
    }
    for (name, value) in m.rows() {
        let _ = writeln!(out, "{name}\t{}", or_undef(value, |v| format!("{v:.6}")));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// One point per distinct score, thresholds descending. A result counts at
/// threshold `t` when its score is at least `t`.
pub fn pr_curve(results: &[(f64, bool)]) -> Result<Vec<PrPoint>> {
    if results.iter().any(|(s, _)| s.is_nan()) {
        return Err(Error::Invalid("score is NaN".into()));
    }
    let total_correct = results.iter().filter(|(_, c)| *c).count();
    if total_correct == 0 {
        return Err(Error::Invalid(
            "no correct results; recall is undefined".into(),
        ));
    }
    let mut sorted = results.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
    let mut points = Vec::new();
    let (mut above, mut correct) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == t {
            above += 1;
            correct += usize::from(sorted[i].1);
            i += 1;
        }
        points.push(PrPoint {
            threshold: t,
            precision: correct as f64 / above as f64,
            recall: correct as f64 / total_correct as f64,
        });
    }
    Ok(points)
}

pub fn render_pr_csv(points: &[PrPoint]) -> String {
    let mut out = String::from("threshold,precision,recall\n");
    for p in points {
        let _ = writeln!(out, "{:.6},{:.6},{:.6}", p.threshold, p.precision, p.recall);
    }
    out
}

/// Best precision among points reaching at least `recall`.
pub fn interpolated_precision(points: &[PrPoint], recall: f64) -> Option<f64> {
    points
        .iter()
        .filter(|p| p.recall >= recall - 1e-12)
        .map(|p| p.precision)
        .fold(None, |acc, p| Some(acc.map_or(p, |a: f64| a.max(p))))
}

/// True when `a`'s interpolated precision is at least `b`'s at every recall
/// level that appears on both curves.
pub fn weakly_dominates(a: &[PrPoint], b: &[PrPoint]) -> bool {
    b.iter()
        .filter(|pb| a.iter().any(|pa| (pa.recall - pb.recall).abs() < 1e-9))
        .all(|pb| {
            let pa = interpolated_precision(a, pb.recall).unwrap_or(0.0);
            let pbi = interpolated_precision(b, pb.recall).unwrap_or(0.0);
            pa + 1e-12 >= pbi
        })
}

/// Score of `q` against `p` under one of the scoring variants, with the
/// corpus weights.
pub fn baseline_score<A: AsRef<str>, B: AsRef<str>>(
    variant: Variant,
    q: &[A],
    p: &[B],
    corpus: &Corpus,
) -> f64 {
    variant.score(q, p, |t| corpus.weight(t))
}

/// Fraction of best-match scores at or above `threshold`.
pub fn pseudo_recall(scores: &[f64], threshold: f64) -> Option<f64> {
    ratio(
        scores.iter().filter(|&&s| s >= threshold).count(),
        scores.len(),
    )
}
