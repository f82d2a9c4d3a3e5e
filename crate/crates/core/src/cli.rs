//! Command-line front end.
//!
//! Settings come from an optional `key=value` file (`--config`) and are
//! overridden by flags of the same name (`name_lists` is `--name-lists`).
//! Relative paths in the config file are taken relative to the file.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::dict_gen::{self, GenOptions, RootDictionary, SuffixDictionary};
use crate::er::{self, Corpus, ErConfig, Resolution, Variant};
use crate::error::{Error, Result};
use crate::eval::{self, Annotation, EvalCounts};
use crate::ingest::{self, SectionConfig, SectionLabel};
use crate::kv;
use crate::ner::{self, CustomizationDictionaries, Matcher};
use crate::text::Phrase;

#[derive(Debug, Parser)]
#[command(
    name = "fi-extract",
    version,
    about = "Extract and resolve financial-institution names"
)]
pub struct Cli {
    /// key=value settings file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Write the command's report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(flatten)]
    pub settings: SettingFlags,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags mirroring the config file keys.
#[derive(Debug, Default, Args)]
pub struct SettingFlags {
    /// Comma-separated name-list files
    #[arg(long, global = true, value_name = "PATHS")]
    pub name_lists: Option<String>,
    /// Root dictionary (written by build-dicts, read by extract)
    #[arg(long, global = true, value_name = "PATH")]
    pub roots: Option<PathBuf>,
    /// Suffix dictionary (written by build-dicts, read by extract)
    #[arg(long, global = true, value_name = "PATH")]
    pub suffixes: Option<PathBuf>,
    /// Extra roots added at extraction time
    #[arg(long, global = true, value_name = "PATH")]
    pub custom_roots: Option<PathBuf>,
    /// Extra suffixes added at extraction time
    #[arg(long, global = true, value_name = "PATH")]
    pub custom_suffixes: Option<PathBuf>,
    /// Entries never emitted as dictionary entries or mentions
    #[arg(long, global = true, value_name = "PATH")]
    pub invalid: Option<PathBuf>,
    /// Normalized names to resolve against, one per line
    #[arg(long, global = true, value_name = "PATH")]
    pub corpus: Option<PathBuf>,
    /// Tokens dropped before scoring, one per line
    #[arg(long, global = true, value_name = "PATH")]
    pub stop_words: Option<PathBuf>,
    /// ABBREV<TAB>EXPANSION lines
    #[arg(long, global = true, value_name = "PATH")]
    pub abbreviations: Option<PathBuf>,
    /// TOKEN<TAB>weight lines replacing IDF weights
    #[arg(long, global = true, value_name = "PATH")]
    pub weight_overrides: Option<PathBuf>,
    /// key=value file with header_markers and summary_end_markers
    #[arg(long, global = true, value_name = "PATH")]
    pub section_markers: Option<PathBuf>,
    /// Additional suffix patterns, one per line
    #[arg(long, global = true, value_name = "PATH")]
    pub suffix_patterns: Option<PathBuf>,
    /// Minimum score for a match [default: 0.085]
    #[arg(long, global = true, value_name = "X")]
    pub threshold: Option<f64>,
    /// Comma-separated role keywords
    #[arg(long, global = true, value_name = "WORDS")]
    pub role_keywords: Option<String>,
    /// Tokens after a role keyword searched by --role-filter [default: 10]
    #[arg(long, global = true, value_name = "N")]
    pub window: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate root and suffix dictionaries from name lists
    BuildDicts,
    /// Extract mentions from documents as TSV
    Extract {
        /// Document files or directories
        docs: Vec<PathBuf>,
        /// `all` or a comma-separated subset of header,summary,body
        #[arg(long, default_value = "all")]
        sections: String,
        /// Keep only mentions shortly after a role keyword
        #[arg(long)]
        role_filter: bool,
    },
    /// Resolve mentions against the corpus
    Resolve {
        /// Mention TSV (extract output) or one mention per line
        mentions: PathBuf,
    },
    /// Count and score extracted mentions against gold annotations
    Eval {
        /// Mention TSV from extract
        #[arg(required_unless_present = "counts")]
        mentions: Option<PathBuf>,
        /// Gold TSV: doc_id, start, end, surface
        #[arg(required_unless_present = "counts")]
        gold: Option<PathBuf>,
        /// Score given counts ALL,WRO,PAR,MIS instead of files
        #[arg(long, conflicts_with_all = ["mentions", "gold"])]
        counts: Option<String>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
    },
    /// Precision/recall curve of best-match scores
    PrCurve {
        /// TSV: mention, expected corpus name or `-`
        labeled: PathBuf,
        #[arg(long, default_value = "full")]
        variant: Variant,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Tsv,
}

/// Effective settings after merging the config file and flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineConfig {
    pub name_lists: Vec<PathBuf>,
    pub roots: Option<PathBuf>,
    pub suffixes: Option<PathBuf>,
    pub custom_roots: Option<PathBuf>,
    pub custom_suffixes: Option<PathBuf>,
    pub invalid: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub stop_words: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    pub weight_overrides: Option<PathBuf>,
    pub section_markers: Option<PathBuf>,
    pub suffix_patterns: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub role_keywords: Option<Vec<String>>,
    pub window: Option<usize>,
}

impl PipelineConfig {
    /// Reads settings from a config file map. `base` anchors relative paths.
    pub fn from_map(map: &BTreeMap<String, String>, base: &Path) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        let path = |v: &str| base.join(v);
        for (key, value) in map {
            match key.as_str() {
                "name_lists" => cfg.name_lists = kv::list(value).iter().map(|v| path(v)).collect(),
                "roots" => cfg.roots = Some(path(value)),
                "suffixes" => cfg.suffixes = Some(path(value)),
                "custom_roots" => cfg.custom_roots = Some(path(value)),
                "custom_suffixes" => cfg.custom_suffixes = Some(path(value)),
                "invalid" => cfg.invalid = Some(path(value)),
                "corpus" => cfg.corpus = Some(path(value)),
                "stop_words" => cfg.stop_words = Some(path(value)),
                "abbreviations" => cfg.abbreviations = Some(path(value)),
                "weight_overrides" => cfg.weight_overrides = Some(path(value)),
                "section_markers" => cfg.section_markers = Some(path(value)),
                "suffix_patterns" => cfg.suffix_patterns = Some(path(value)),
                "threshold" => {
                    cfg.threshold = Some(value.parse().map_err(|_| {
                        Error::Invalid(format!("config: threshold `{value}` is not a number"))
                    })?)
                }
                "role_keywords" => cfg.role_keywords = Some(kv::list(value)),
                "window" => {
                    cfg.window = Some(value.parse().map_err(|_| {
                        Error::Invalid(format!("config: window `{value}` is not a count"))
                    })?)
                }
                other => return Err(Error::Invalid(format!("config: unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(config: Option<&Path>, flags: &SettingFlags) -> Result<Self> {
        let mut cfg = match config {
            Some(path) => {
                let base = path.parent().unwrap_or(Path::new(""));
                Self::from_map(&kv::load(path)?, base)?
            }
            None => PipelineConfig::default(),
        };
        cfg.apply(flags);
        if let Some(t) = cfg.threshold {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Invalid(format!("threshold must be >= 0, got {t}")));
            }
        }
        Ok(cfg)
    }

    fn apply(&mut self, f: &SettingFlags) {
        if let Some(v) = &f.name_lists {
            self.name_lists = kv::list(v).into_iter().map(PathBuf::from).collect();
        }
        let set = |slot: &mut Option<PathBuf>, flag: &Option<PathBuf>| {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        };
        set(&mut self.roots, &f.roots);
        set(&mut self.suffixes, &f.suffixes);
        set(&mut self.custom_roots, &f.custom_roots);
        set(&mut self.custom_suffixes, &f.custom_suffixes);
        set(&mut self.invalid, &f.invalid);
        set(&mut self.corpus, &f.corpus);
        set(&mut self.stop_words, &f.stop_words);
        set(&mut self.abbreviations, &f.abbreviations);
        set(&mut self.weight_overrides, &f.weight_overrides);
        set(&mut self.section_markers, &f.section_markers);
        set(&mut self.suffix_patterns, &f.suffix_patterns);
        if f.threshold.is_some() {
            self.threshold = f.threshold;
        }
        if let Some(v) = &f.role_keywords {
            self.role_keywords = Some(kv::list(v));
        }
        if f.window.is_some() {
            self.window = f.window;
        }
    }

    fn required<'a>(slot: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
        let path = slot.as_deref().ok_or_else(|| {
            Error::Invalid(format!(
                "`{key}` is not set (config key or --{})",
                key.replace('_', "-")
            ))
        })?;
        Ok(path)
    }

    fn existing<'a>(slot: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
        let path = Self::required(slot, key)?;
        if !path.exists() {
            return Err(Error::Invalid(format!(
                "{key}: {} does not exist",
                path.display()
            )));
        }
        Ok(path)
    }

    pub fn er_config(&self) -> Result<ErConfig> {
        let mut cfg = ErConfig::default();
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        if self.stop_words.is_some() {
            cfg.stop_words = er::load_stop_words(Self::existing(&self.stop_words, "stop_words")?)?;
        }
        if self.abbreviations.is_some() {
            cfg.abbreviations =
                er::load_abbreviations(Self::existing(&self.abbreviations, "abbreviations")?)?;
        }
        if self.weight_overrides.is_some() {
            cfg.weight_overrides = er::load_weight_overrides(Self::existing(
                &self.weight_overrides,
                "weight_overrides",
            )?)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn corpus(&self, er_config: &ErConfig) -> Result<Corpus> {
        let path = Self::existing(&self.corpus, "corpus")?;
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let names: Vec<&str> = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .collect();
        Corpus::build(&names, er_config)
    }

    fn phrases(slot: &Option<PathBuf>, key: &str) -> Result<BTreeSet<Phrase>> {
        if slot.is_none() {
            return Ok(BTreeSet::new());
        }
        let path = Self::existing(slot, key)?;
        Ok(RootDictionary::load(path)?.entries)
    }
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    /// Some inputs were skipped.
    Partial,
}

/// Runs a parsed command line, writing the report to `--output` or stdout.
pub fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Invalid("--threads must be positive".into()));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let cfg = PipelineConfig::load(cli.config.as_deref(), &cli.settings)?;
    let (report, outcome) = match &cli.command {
        Command::BuildDicts => (build_dicts(&cfg)?, Outcome::Complete),
        Command::Extract {
            docs,
            sections,
            role_filter,
        } => extract(&cfg, docs, sections, *role_filter)?,
        Command::Resolve { mentions } => (resolve(&cfg, mentions)?, Outcome::Complete),
        Command::Eval {
            mentions,
            gold,
            counts,
            format,
        } => (
            evaluate(
                mentions.as_deref(),
                gold.as_deref(),
                counts.as_deref(),
                *format,
            )?,
            Outcome::Complete,
        ),
        Command::PrCurve { labeled, variant } => {
            (pr_curve(&cfg, labeled, *variant)?, Outcome::Complete)
        }
    };
    emit(cli.output.as_deref(), &report)?;
    Ok(outcome)
}

fn emit(path: Option<&Path>, report: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, report).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(report.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })
        }
    }
}

pub fn build_dicts(cfg: &PipelineConfig) -> Result<String> {
    if cfg.name_lists.is_empty() {
        return Err(Error::Invalid("no name lists given (name_lists)".into()));
    }
    let roots_out = PipelineConfig::required(&cfg.roots, "roots")?;
    let suffixes_out = PipelineConfig::required(&cfg.suffixes, "suffixes")?;
    let mut lists = Vec::new();
    let mut lines = 0;
    for path in &cfg.name_lists {
        let (list, stats) = ingest::load_name_list(path, &path.display().to_string())?;
        log::info!(
            "{}: {} lines, {} short names dropped, {} duplicates",
            path.display(),
            stats.lines,
            stats.dropped_short,
            stats.duplicates
        );
        lines += stats.lines;
        lists.push(list);
    }
    let mut options = GenOptions::default();
    options.filters.invalid = PipelineConfig::phrases(&cfg.invalid, "invalid")?;
    if cfg.suffix_patterns.is_some() {
        options.extra_patterns = dict_gen::load_patterns(PipelineConfig::existing(
            &cfg.suffix_patterns,
            "suffix_patterns",
        )?)?;
    }
    let (roots, suffixes) = dict_gen::generate_dictionaries(&lists, &options);
    roots.save(roots_out)?;
    suffixes.save(suffixes_out)?;
    let names: usize = lists.iter().map(|l| l.len()).sum();
    Ok(format!(
        "names={names} lines={lines} roots={} suffixes={} patterns={}\n",
        roots.len(),
        suffixes.literal_entries.len(),
        suffixes.pattern_entries.len()
    ))
}

fn parse_sections(value: &str) -> Result<BTreeSet<SectionLabel>> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok([
            SectionLabel::Header,
            SectionLabel::Summary,
            SectionLabel::Body,
        ]
        .into());
    }
    let set: BTreeSet<SectionLabel> = kv::list(value)
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    if set.is_empty() {
        return Err(Error::Invalid("--sections is empty".into()));
    }
    Ok(set)
}

fn expand_doc_paths(paths: &[PathBuf]) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            match fs::read_dir(p) {
                Ok(entries) => {
                    let mut files: Vec<PathBuf> = entries
                        .filter_map(|e| e.ok().map(|e| e.path()))
                        .filter(|p| p.is_file())
                        .collect();
                    files.sort();
                    out.extend(files);
                }
                // Left in so the read error is reported and counted as skipped.
                Err(_) => out.push(p.clone()),
            }
        } else {
            out.push(p.clone());
        }
    }
    out
}

/// Mention TSV line: doc_id, start, end, section, surface.
pub fn format_mention(m: &ner::Mention) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}",
        m.doc_id, m.span.start, m.span.end, m.section, m.surface
    )
}

pub fn extract(
    cfg: &PipelineConfig,
    docs: &[PathBuf],
    sections: &str,
    role_filter: bool,
) -> Result<(String, Outcome)> {
    let wanted = parse_sections(sections)?;
    let roots = RootDictionary::load(PipelineConfig::existing(&cfg.roots, "roots")?)?;
    let suffixes = SuffixDictionary::load(PipelineConfig::existing(&cfg.suffixes, "suffixes")?)?;
    let custom = CustomizationDictionaries::new(
        PipelineConfig::phrases(&cfg.custom_roots, "custom_roots")?,
        PipelineConfig::phrases(&cfg.custom_suffixes, "custom_suffixes")?,
        PipelineConfig::phrases(&cfg.invalid, "invalid")?,
    )?;
    let section_cfg = match &cfg.section_markers {
        Some(_) => SectionConfig::load(PipelineConfig::existing(
            &cfg.section_markers,
            "section_markers",
        )?)?,
        None => SectionConfig::default(),
    };
    let keywords: BTreeSet<String> = match &cfg.role_keywords {
        Some(k) => k.iter().cloned().collect(),
        None => ner::default_role_keywords(),
    };
    let window = cfg.window.unwrap_or(ner::DEFAULT_ROLE_WINDOW);
    let matcher = Matcher::new(&roots, &suffixes, &custom);

    let paths = expand_doc_paths(docs);
    let results: Vec<Option<Vec<ner::Mention>>> = paths
        .par_iter()
        .map(|path| match ingest::load_document(path, &section_cfg) {
            Ok(doc) => {
                let stream = ner::tokenize(&doc);
                let mut mentions = matcher.extract_from(&doc, &stream);
                if role_filter {
                    mentions = ner::filter_by_role_keyword(mentions, &stream, &keywords, window);
                }
                mentions.retain(|m| wanted.contains(&m.section));
                Some(mentions)
            }
            Err(e) => {
                log::error!("skipping document: {e}");
                None
            }
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let mut mentions: Vec<ner::Mention> = results.into_iter().flatten().flatten().collect();
    mentions.sort_by(|a, b| {
        (&a.doc_id, a.span.start, a.span.end).cmp(&(&b.doc_id, b.span.start, b.span.end))
    });
    let mut out = String::new();
    for m in &mentions {
        out.push_str(&format_mention(m));
        out.push('\n');
    }
    let outcome = if skipped > 0 {
        log::warn!("{skipped} document(s) skipped");
        Outcome::Partial
    } else {
        Outcome::Complete
    };
    Ok((out, outcome))
}

fn read_lines(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn tsv_records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split('\t').collect()))
}

/// Reads mention surfaces from extract output (5 columns) or a plain list.
pub fn read_mention_surfaces(path: &Path) -> Result<Vec<String>> {
    let text = read_lines(path)?;
    tsv_records(&text)
        .map(|(line, fields)| match fields.len() {
            1 => Ok(fields[0].trim().to_string()),
            5 => Ok(fields[4].trim().to_string()),
            n => Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected 1 or 5 tab-separated fields, found {n}"),
            }),
        })
        .collect()
}

fn parse_span(path: &Path, line: usize, start: &str, end: &str) -> Result<std::ops::Range<usize>> {
    let bad = |what: &str| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("bad {what} offset"),
    };
    let s: usize = start.trim().parse().map_err(|_| bad("start"))?;
    let e: usize = end.trim().parse().map_err(|_| bad("end"))?;
    if e <= s {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("empty span {s}..{e}"),
        });
    }
    Ok(s..e)
}

/// Reads extract output: doc_id, start, end, section, surface.
pub fn read_mentions_tsv(path: &Path) -> Result<Vec<Annotation>> {
    let text = read_lines(path)?;
    tsv_records(&text)
        .map(|(line, f)| {
            if f.len() != 5 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("expected 5 tab-separated fields, found {}", f.len()),
                });
            }
            Ok(Annotation::new(
                f[0],
                parse_span(path, line, f[1], f[2])?,
                f[4],
            ))
        })
        .collect()
}

/// Reads gold annotations: doc_id, start, end, surface.
pub fn read_gold_tsv(path: &Path) -> Result<Vec<Annotation>> {
    let text = read_lines(path)?;
    tsv_records(&text)
        .map(|(line, f)| {
            if f.len() != 4 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("expected 4 tab-separated fields, found {}", f.len()),
                });
            }
            Ok(Annotation::new(
                f[0],
                parse_span(path, line, f[1], f[2])?,
                f[3],
            ))
        })
        .collect()
}

pub fn resolve(cfg: &PipelineConfig, mentions_path: &Path) -> Result<String> {
    let er_cfg = cfg.er_config()?;
    let corpus = cfg.corpus(&er_cfg)?;
    let mentions = read_mention_surfaces(mentions_path)?;

    // Score each distinct preprocessed query once.
    let queries: Vec<er::Query> = mentions
        .iter()
        .map(|m| er::preprocess(m, &er_cfg))
        .collect();
    let mut unique: Vec<&Vec<String>> = queries.iter().map(|q| &q.tokens).collect();
    unique.sort();
    unique.dedup();
    let resolved: HashMap<&Vec<String>, Resolution> = unique
        .par_iter()
        .map(|tokens| {
            let q = er::Query {
                original: String::new(),
                tokens: (*tokens).clone(),
            };
            (*tokens, er::resolve_query(q, &corpus, er_cfg.threshold))
        })
        .collect();

    let mut out = String::new();
    let mut best_scores = Vec::with_capacity(mentions.len());
    for (mention, query) in mentions.iter().zip(&queries) {
        let r = &resolved[&query.tokens];
        let score = r.best().map_or(0.0, |m| m.score);
        best_scores.push(score);
        let (name, flag) = match r.matched() {
            Some(m) => (corpus.entry(m.entry_id).name.as_str(), 1),
            None => ("-", 0),
        };
        let _ = writeln!(out, "{mention}\t{name}\t{score:.6}\t{flag}");
    }
    if let Some(pr) = eval::pseudo_recall(&best_scores, er_cfg.threshold) {
        log::info!(
            "{} mentions, {} distinct, pseudo recall {:.4} at threshold {}",
            mentions.len(),
            unique.len(),
            pr,
            er_cfg.threshold
        );
    }
    Ok(out)
}

fn parse_counts(value: &str) -> Result<EvalCounts> {
    let nums: Vec<usize> = kv::list(value)
        .iter()
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Invalid(format!("--counts: `{s}` is not a count")))
        })
        .collect::<Result<_>>()?;
    match nums[..] {
        [all, wro, par, mis] => EvalCounts::new(all, wro, par, mis),
        _ => Err(Error::Invalid("--counts takes ALL,WRO,PAR,MIS".into())),
    }
}

pub fn evaluate(
    mentions: Option<&Path>,
    gold: Option<&Path>,
    counts: Option<&str>,
    format: ReportFormat,
) -> Result<String> {
    let counts = match (counts, mentions, gold) {
        (Some(value), _, _) => parse_counts(value)?,
        (None, Some(m), Some(g)) => {
            let gold = read_gold_tsv(g)?;
            if gold.is_empty() {
                return Err(Error::Invalid(format!(
                    "{}: no gold annotations",
                    g.display()
                )));
            }
            let mentions = read_mentions_tsv(m)?;
            let labeled = eval::label_mentions(&mentions, &gold)?;
            eval::count(&labeled, &gold)?
        }
        _ => {
            return Err(Error::Invalid(
                "eval needs MENTIONS and GOLD, or --counts".into(),
            ))
        }
    };
    let report = eval::metrics(counts);
    Ok(match format {
        ReportFormat::Table => eval::render_table(&counts, &report),
        ReportFormat::Tsv => eval::render_tsv(&counts, &report),
    })
}

/// Labeled queries: mention and the corpus name it should resolve to, or `-`.
pub fn read_labeled(path: &Path) -> Result<Vec<(String, Option<String>)>> {
    let text = read_lines(path)?;
    tsv_records(&text)
        .map(|(line, f)| {
            if f.len() != 2 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("expected 2 tab-separated fields, found {}", f.len()),
                });
            }
            let gold = f[1].trim();
            Ok((
                f[0].trim().to_string(),
                (gold != "-").then(|| ner::collapse_whitespace(gold)),
            ))
        })
        .collect()
}

/// Ranks each labeled query under `variant` and marks it correct when the
/// best candidate is the expected name. Queries without candidates score 0.
pub fn score_labeled(
    labeled: &[(String, Option<String>)],
    corpus: &Corpus,
    er_cfg: &ErConfig,
    variant: Variant,
) -> Vec<(f64, bool)> {
    labeled
        .par_iter()
        .map(|(mention, gold)| {
            let q = er::preprocess(mention, er_cfg);
            match corpus.best_match(&q, variant) {
                Some((id, score)) => {
                    let name = &corpus.entry(id).name;
                    let correct = gold.as_ref().is_some_and(|g| g.eq_ignore_ascii_case(name));
                    (score, correct)
                }
                None => (0.0, false),
            }
        })
        .collect()
}

pub fn pr_curve(cfg: &PipelineConfig, labeled_path: &Path, variant: Variant) -> Result<String> {
    let er_cfg = cfg.er_config()?;
    let corpus = cfg.corpus(&er_cfg)?;
    let labeled = read_labeled(labeled_path)?;
    let scored = score_labeled(&labeled, &corpus, &er_cfg, variant);
    let points = eval::pr_curve(&scored)?;
    Ok(eval::render_pr_csv(&points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_map_resolves_relative_paths() {
        let map = BTreeMap::from([
            ("corpus".to_string(), "corpus.txt".to_string()),
            ("name_lists".to_string(), "a.txt, b.txt".to_string()),
            ("threshold".to_string(), "0.2".to_string()),
            ("window".to_string(), "4".to_string()),
        ]);
        let cfg = PipelineConfig::from_map(&map, Path::new("/etc/fi")).unwrap();
        assert_eq!(cfg.corpus, Some(PathBuf::from("/etc/fi/corpus.txt")));
        assert_eq!(cfg.name_lists.len(), 2);
        assert_eq!(cfg.threshold, Some(0.2));
        assert_eq!(cfg.window, Some(4));
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_numbers() {
        let bad = BTreeMap::from([("colour".to_string(), "x".to_string())]);
        assert!(PipelineConfig::from_map(&bad, Path::new("")).is_err());
        let bad = BTreeMap::from([("threshold".to_string(), "high".to_string())]);
        assert!(PipelineConfig::from_map(&bad, Path::new("")).is_err());
    }

    #[test]
    fn flags_override_config() {
        let mut cfg = PipelineConfig {
            threshold: Some(0.5),
            corpus: Some("a".into()),
            ..Default::default()
        };
        cfg.apply(&SettingFlags {
            threshold: Some(0.1),
            ..Default::default()
        });
        assert_eq!(cfg.threshold, Some(0.1));
        assert_eq!(cfg.corpus, Some(PathBuf::from("a")));
    }

    #[test]
    fn section_lists() {
        assert_eq!(parse_sections("all").unwrap().len(), 3);
        assert_eq!(
            parse_sections("header, summary").unwrap(),
            BTreeSet::from([SectionLabel::Header, SectionLabel::Summary])
        );
        assert!(parse_sections("footer").is_err());
        assert!(parse_sections(",").is_err());
    }

    #[test]
    fn counts_flag() {
        assert_eq!(
            parse_counts("410,0,24,16").unwrap(),
            EvalCounts::new(410, 0, 24, 16).unwrap()
        );
        assert!(parse_counts("1,2,3").is_err());
        assert!(parse_counts("1,1,1,0").is_err());
    }
}
