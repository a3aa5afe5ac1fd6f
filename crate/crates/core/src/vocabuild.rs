//! Building a morpheme-aware vocabulary from a terminology resource.
//!
//! Concept phrases are split into words, every unique word is segmented,
//! segments are counted in their positional form (word-initial or
//! continuation), rare subwords are filtered out and the survivors are
//! appended to a base vocabulary.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::MorphemeAnnotation;
use crate::tagger::{segment_word, SegmentError, Segmenter};
use crate::tokenizer::{is_punctuation, normalize, pretokenize, TokenizerConfig};
use crate::vocab::{VocabError, Vocabulary, DEFAULT_CONTINUATION_PREFIX};

pub const DEFAULT_RRF_COLUMN: usize = 14;
pub const DEFAULT_RRF_DELIMITER: &str = "|";
pub const DEFAULT_MIN_COUNT: u64 = 2;
pub const DEFAULT_BIOMED_MIN_COUNT: u64 = 5;

#[derive(Debug, Error)]
pub enum VocabBuildError {
    #[error("no words to segment")]
    NoWords,
    #[error("column {column} is out of range on every line")]
    BadColumn { column: usize },
    #[error("min_count must be at least 1")]
    ZeroMinCount,
    #[error("line {line}: {message}")]
    Read { line: usize, message: String },
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

/// Word counts extracted from phrases; keys are normalized words.
pub type WordCounts = BTreeMap<String, u64>;

/// Counts every non-punctuation word of every phrase.
pub fn extract_unique_words<I, S>(phrases: I, cfg: &TokenizerConfig) -> WordCounts
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts = WordCounts::new();
    for phrase in phrases {
        let normalized = normalize(phrase.as_ref(), cfg);
        for word in pretokenize(&normalized) {
            if word.chars().all(is_punctuation) {
                continue;
            }
            *counts.entry(word.to_string()).or_insert(0) += 1;
        }
    }
    counts
}

/// Streams one column out of a delimiter-separated concept table.
///
/// Lines with too few fields are skipped and counted. If the input had
/// lines but none of them reached `column`, the iterator ends with
/// [`VocabBuildError::BadColumn`].
pub struct RrfPhrases<R> {
    lines: std::io::Lines<R>,
    column: usize,
    delimiter: String,
    line: usize,
    yielded: usize,
    skipped: usize,
    finished: bool,
}

pub fn parse_rrf<R: BufRead>(source: R, column: usize, delimiter: &str) -> RrfPhrases<R> {
    RrfPhrases {
        lines: source.lines(),
        column,
        delimiter: delimiter.to_string(),
        line: 0,
        yielded: 0,
        skipped: 0,
        finished: false,
    }
}

impl<R> RrfPhrases<R> {
    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

impl<R: BufRead> Iterator for RrfPhrases<R> {
    type Item = Result<String, VocabBuildError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        loop {
            match self.lines.next() {
                None => {
                    self.finished = true;
                    if self.yielded == 0 && self.skipped > 0 {
                        return Some(Err(VocabBuildError::BadColumn {
                            column: self.column,
                        }));
                    }
                    return None;
                }
                Some(Err(e)) => {
                    self.finished = true;
                    return Some(Err(VocabBuildError::Read {
                        line: self.line + 1,
                        message: e.to_string(),
                    }));
                }
                Some(Ok(line)) => {
                    self.line += 1;
                    let line = line.trim_end_matches('\r');
                    if line.is_empty() {
                        continue;
                    }
                    match line.split(self.delimiter.as_str()).nth(self.column) {
                        Some(field) => {
                            self.yielded += 1;
                            return Some(Ok(field.to_string()));
                        }
                        None => self.skipped += 1,
                    }
                }
            }
        }
    }
}

/// Occurrence counts of positional subwords.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubwordCounts {
    counts: BTreeMap<String, u64>,
}

impl SubwordCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, subword: &str, count: u64) {
        if count > 0 {
            *self.counts.entry(subword.to_string()).or_insert(0) += count;
        }
    }

    pub fn merge(mut self, other: SubwordCounts) -> Self {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self
    }

    pub fn get(&self, subword: &str) -> u64 {
        self.counts.get(subword).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

impl FromIterator<(String, u64)> for SubwordCounts {
    fn from_iter<T: IntoIterator<Item = (String, u64)>>(iter: T) -> Self {
        let mut out = SubwordCounts::new();
        for (k, v) in iter {
            out.add(&k, v);
        }
        out
    }
}

/// A word the segmenter could not handle; it contributes nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedWord {
    pub word: String,
    pub error: SegmentError,
}

/// Segments every word once and counts its positional subwords.
///
/// Each unique word contributes 1 per subword unless `weight_by_count`, in
/// which case it contributes its corpus count.
pub fn count_subwords<S: Segmenter + ?Sized>(
    segmenter: &S,
    words: &WordCounts,
    weight_by_count: bool,
    continuation_prefix: &str,
) -> Result<(SubwordCounts, Vec<SkippedWord>), VocabBuildError> {
    if words.is_empty() {
        return Err(VocabBuildError::NoWords);
    }
    let entries: Vec<(&String, &u64)> = words.iter().collect();
    let (counts, mut skipped) = entries
        .par_iter()
        .fold(
            || (SubwordCounts::new(), Vec::new()),
            |(mut counts, mut skipped), (word, &count)| {
                match segment_word(segmenter, word) {
                    Ok(seg) => {
                        let weight = if weight_by_count { count } else { 1 };
                        for (i, piece) in seg.segments().into_iter().enumerate() {
                            if i == 0 {
                                counts.add(piece, weight);
                            } else {
                                counts.add(&format!("{continuation_prefix}{piece}"), weight);
                            }
                        }
                    }
                    Err(error) => skipped.push(SkippedWord {
                        word: word.to_string(),
                        error,
                    }),
                }
                (counts, skipped)
            },
        )
        .reduce(
            || (SubwordCounts::new(), Vec::new()),
            |(a, mut sa), (b, sb)| {
                sa.extend(sb);
                (a.merge(b), sa)
            },
        );
    skipped.sort_by(|a, b| a.word.cmp(&b.word));
    Ok((counts, skipped))
}

/// Subwords with `count >= min_count`, most frequent first, ties broken
/// lexicographically.
pub fn filter_subwords(counts: &SubwordCounts, min_count: u64) -> Vec<(String, u64)> {
    let mut kept: Vec<(String, u64)> = counts
        .iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(s, c)| (s.to_string(), c))
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    kept
}

/// Filters `counts` and merges the survivors after `base`.
///
/// Base tokens keep their ids. Without a base the default special tokens
/// come first. Subwords already in the base are not repeated.
pub fn assemble_vocab(
    counts: &SubwordCounts,
    min_count: u64,
    base: Option<&Vocabulary>,
) -> Result<Vocabulary, VocabBuildError> {
    if min_count == 0 {
        return Err(VocabBuildError::ZeroMinCount);
    }
    let config = base.map(Vocabulary::config).unwrap_or_default();
    let mut tokens: Vec<String> = match base {
        Some(b) => b.tokens().to_vec(),
        None => config.special_tokens.clone(),
    };
    let mut seen: HashSet<String> = tokens.iter().cloned().collect();
    for (subword, _) in filter_subwords(counts, min_count) {
        if seen.insert(subword.clone()) {
            tokens.push(subword);
        }
    }
    Ok(Vocabulary::from_tokens(tokens, &config)?)
}

/// Stage cardinalities of one vocabulary build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub unique_words: usize,
    pub skipped_words: usize,
    pub unique_subwords: usize,
    pub post_filter: usize,
    pub post_merge: usize,
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub vocab: Vocabulary,
    pub counts: SubwordCounts,
    pub skipped: Vec<SkippedWord>,
    pub report: StageReport,
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub tokenizer: TokenizerConfig,
    pub min_count: u64,
    pub weight_by_count: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            tokenizer: TokenizerConfig::default(),
            min_count: DEFAULT_MIN_COUNT,
            weight_by_count: false,
        }
    }
}

/// Phrases to vocabulary: extract, segment, count, filter, merge.
pub fn build_vocab<I, S, G>(
    phrases: I,
    segmenter: &G,
    base: Option<&Vocabulary>,
    cfg: &BuildConfig,
) -> Result<BuildOutput, VocabBuildError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
    G: Segmenter + ?Sized,
{
    let words = extract_unique_words(phrases, &cfg.tokenizer);
    let prefix = base
        .map(|b| b.continuation_prefix().to_string())
        .unwrap_or_else(|| DEFAULT_CONTINUATION_PREFIX.to_string());
    let (counts, skipped) = count_subwords(segmenter, &words, cfg.weight_by_count, &prefix)?;
    let post_filter = filter_subwords(&counts, cfg.min_count.max(1)).len();
    let vocab = assemble_vocab(&counts, cfg.min_count, base)?;
    let report = StageReport {
        unique_words: words.len(),
        skipped_words: skipped.len(),
        unique_subwords: counts.len(),
        post_filter,
        post_merge: vocab.len(),
    };
    Ok(BuildOutput {
        vocab,
        counts,
        skipped,
        report,
    })
}

/// Keeps annotations whose surface form occurs at least `min_count` times
/// in `lexicon`.
pub fn filter_biomedical_subset(
    anns: &[MorphemeAnnotation],
    lexicon: &WordCounts,
    min_count: u64,
) -> Vec<MorphemeAnnotation> {
    anns.iter()
        .filter(|a| lexicon.get(&a.surface).is_some_and(|&c| c >= min_count))
        .cloned()
        .collect()
}

/// Reads one phrase per line, skipping blank lines.
pub fn read_phrases<R: BufRead>(source: R) -> Result<Vec<String>, VocabBuildError> {
    let mut out = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line.map_err(|e| VocabBuildError::Read {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if !line.trim().is_empty() {
            out.push(line);
        }
    }
    Ok(out)
}
