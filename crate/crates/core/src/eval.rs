//! Segmentation F1 against gold morphemes, plus tokenizer diagnostics.
//!
//! Word-level matching follows the shared-task convention: predicted and
//! gold segments are compared as multisets of strings, regardless of where
//! in the word they occur.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{align_morphemes, AlignError, MorphemeAnnotation, SurfaceSegmentation};
use crate::tagger::{segment_word, SegmentError, Segmenter};
use crate::tokenizer::{is_punctuation, Tokenizer};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("surface mismatch: predicted {pred:?}, gold {gold:?}")]
    SurfaceMismatch { pred: String, gold: String },
    #[error("nothing to score")]
    Empty,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("n_per_bin must be at least 1")]
    ZeroSample,
    #[error("bin thresholds must start at 1 or more and strictly increase")]
    BadBins,
    #[error("line {line}: {message}")]
    Read { line: usize, message: String },
    #[error("{word:?}: {source}")]
    Align { word: String, source: AlignError },
    #[error("{word:?}: {source}")]
    Segment { word: String, source: SegmentError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordMatch {
    pub true_positive: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl WordMatch {
    pub fn f1(&self) -> f64 {
        SegScore::from_counts(self.true_positive, self.predicted, self.gold).f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    #[default]
    Micro,
    Macro,
}

impl std::str::FromStr for Averaging {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "micro" => Ok(Averaging::Micro),
            "macro" => Ok(Averaging::Macro),
            other => Err(format!("unknown averaging mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegScore {
    pub true_positive: usize,
    pub predicted_total: usize,
    pub gold_total: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl SegScore {
    pub fn from_counts(tp: usize, predicted: usize, gold: usize) -> Self {
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, gold);
        SegScore {
            true_positive: tp,
            predicted_total: predicted,
            gold_total: gold,
            precision,
            recall,
            f1: harmonic(precision, recall),
        }
    }
}

impl fmt::Display for SegScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<10} {:>8}",
            "precision",
            format!("{:.2}", 100.0 * self.precision)
        )?;
        writeln!(
            f,
            "{:<10} {:>8}",
            "recall",
            format!("{:.2}", 100.0 * self.recall)
        )?;
        writeln!(f, "{:<10} {:>8}", "f1", format!("{:.2}", 100.0 * self.f1))?;
        write!(
            f,
            "{:<10} {:>8}  (predicted {}, gold {})",
            "matched", self.true_positive, self.predicted_total, self.gold_total
        )
    }
}

/// Multiset overlap between predicted and gold segments of one word.
pub fn score_word(
    pred: &SurfaceSegmentation,
    gold: &SurfaceSegmentation,
) -> Result<WordMatch, EvalError> {
    if pred.surface() != gold.surface() {
        return Err(EvalError::SurfaceMismatch {
            pred: pred.surface().to_string(),
            gold: gold.surface().to_string(),
        });
    }
    let mut remaining: HashMap<&str, usize> = HashMap::new();
    for s in gold.segments() {
        *remaining.entry(s).or_insert(0) += 1;
    }
    let mut tp = 0;
    for s in pred.segments() {
        if let Some(n) = remaining.get_mut(s) {
            if *n > 0 {
                *n -= 1;
                tp += 1;
            }
        }
    }
    Ok(WordMatch {
        true_positive: tp,
        predicted: pred.len(),
        gold: gold.len(),
    })
}

/// Aggregates word scores. Micro sums counts first; macro averages the
/// per-word precision, recall and F1 and reports zero counts.
pub fn segmentation_f1(
    pairs: &[(SurfaceSegmentation, SurfaceSegmentation)],
    mode: Averaging,
) -> Result<SegScore, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::Empty);
    }
    let matches = pairs
        .iter()
        .map(|(p, g)| score_word(p, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(&matches, mode))
}

fn aggregate(matches: &[WordMatch], mode: Averaging) -> SegScore {
    match mode {
        Averaging::Micro => {
            let (tp, p, g) = matches.iter().fold((0, 0, 0), |(tp, p, g), m| {
                (tp + m.true_positive, p + m.predicted, g + m.gold)
            });
            SegScore::from_counts(tp, p, g)
        }
        Averaging::Macro => {
            let n = matches.len() as f64;
            let (mut p, mut r, mut f) = (0.0, 0.0, 0.0);
            for m in matches {
                let s = SegScore::from_counts(m.true_positive, m.predicted, m.gold);
                p += s.precision;
                r += s.recall;
                f += s.f1;
            }
            SegScore {
                true_positive: 0,
                predicted_total: 0,
                gold_total: 0,
                precision: p / n,
                recall: r / n,
                f1: f / n,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: Averaging,
    pub words: usize,
    pub alignment_warnings: usize,
    #[serde(flatten)]
    pub score: SegScore,
}

/// Scores `segmenter` on `anns`, using surface-aligned gold segments.
pub fn evaluate_segmenter<S: Segmenter + ?Sized>(
    segmenter: &S,
    anns: &[MorphemeAnnotation],
    mode: Averaging,
) -> Result<EvalReport, EvalError> {
    if anns.is_empty() {
        return Err(EvalError::Empty);
    }
    let scored = anns
        .par_iter()
        .map(|ann| {
            let (gold, w) = align_morphemes(ann).map_err(|source| EvalError::Align {
                word: ann.surface.clone(),
                source,
            })?;
            let pred =
                segment_word(segmenter, &ann.surface).map_err(|source| EvalError::Segment {
                    word: ann.surface.clone(),
                    source,
                })?;
            Ok((score_word(&pred, &gold)?, w.len()))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let warnings = scored.iter().map(|s| s.1).sum();
    let matches: Vec<WordMatch> = scored.into_iter().map(|s| s.0).collect();
    Ok(EvalReport {
        mode,
        words: anns.len(),
        alignment_warnings: warnings,
        score: aggregate(&matches, mode),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FertilityReport {
    pub words: u64,
    pub tokens: u64,
    /// Mean tokens per word.
    pub fertility: f64,
    pub unknown_words: u64,
    /// Share of words replaced by the unknown token.
    pub unk_rate: f64,
    /// Number of words split into k tokens, keyed by k.
    pub pieces_histogram: BTreeMap<usize, u64>,
    pub distinct_tokens_used: usize,
    /// Share of vocabulary entries used at least once.
    pub vocab_coverage: f64,
}

/// Tokenizes every line of `corpus` and reports fertility statistics.
pub fn fertility_report<R: BufRead>(
    tokenizer: &Tokenizer,
    corpus: R,
) -> Result<FertilityReport, EvalError> {
    let mut acc = FertilityAccumulator::default();
    for (idx, line) in corpus.lines().enumerate() {
        let line = line.map_err(|e| EvalError::Read {
            line: idx + 1,
            message: e.to_string(),
        })?;
        acc.add_line(tokenizer, &line);
    }
    Ok(acc.finish(tokenizer))
}

/// Incremental form of [`fertility_report`] for streaming callers.
#[derive(Debug, Clone, Default)]
pub struct FertilityAccumulator {
    words: u64,
    tokens: u64,
    unknown: u64,
    histogram: BTreeMap<usize, u64>,
    used: HashSet<String>,
}

impl FertilityAccumulator {
    pub fn add_line(&mut self, tokenizer: &Tokenizer, line: &str) {
        let normalized = crate::tokenizer::normalize(line, tokenizer.config());
        for word in crate::tokenizer::pretokenize(&normalized) {
            let pieces = tokenizer.tokenize_word(word).unwrap_or_default();
            self.words += 1;
            self.tokens += pieces.len() as u64;
            *self.histogram.entry(pieces.len()).or_insert(0) += 1;
            for p in pieces {
                if tokenizer.is_unknown(&p) {
                    self.unknown += 1;
                }
                if !self.used.contains(&p) {
                    self.used.insert(p);
                }
            }
        }
    }

    pub fn finish(self, tokenizer: &Tokenizer) -> FertilityReport {
        let distinct = self.used.len();
        FertilityReport {
            words: self.words,
            tokens: self.tokens,
            fertility: if self.words == 0 {
                0.0
            } else {
                self.tokens as f64 / self.words as f64
            },
            unknown_words: self.unknown,
            unk_rate: if self.words == 0 {
                0.0
            } else {
                self.unknown as f64 / self.words as f64
            },
            pieces_histogram: self.histogram,
            distinct_tokens_used: distinct,
            vocab_coverage: distinct as f64 / tokenizer.vocab().len() as f64,
        }
    }
}

/// A half-open word-frequency interval `[low, high)`; `high == None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyBin {
    pub low: u64,
    pub high: Option<u64>,
}

impl FrequencyBin {
    pub fn contains(&self, freq: u64) -> bool {
        freq >= self.low && self.high.is_none_or(|h| freq < h)
    }

    pub fn label(&self) -> String {
        match self.high {
            Some(h) => format!("{}-{}", self.low, h),
            None => format!("{}+", self.low),
        }
    }
}

pub const DEFAULT_BIN_THRESHOLDS: [u64; 5] = [1, 10, 100, 500, 5000];

/// Turns ascending thresholds into consecutive bins, the last unbounded.
pub fn bins_from_thresholds(thresholds: &[u64]) -> Result<Vec<FrequencyBin>, EvalError> {
    if thresholds.is_empty() || thresholds[0] == 0 || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::BadBins);
    }
    Ok(thresholds
        .iter()
        .enumerate()
        .map(|(i, &low)| FrequencyBin {
            low,
            high: thresholds.get(i + 1).copied(),
        })
        .collect())
}

/// One masked-word evaluation item. `start`/`end` are char offsets into
/// `sentence`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedInstance {
    pub sentence: String,
    pub word: String,
    pub start: usize,
    pub end: usize,
    pub frequency_bin: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    pub bin: String,
    pub distinct_words: usize,
    pub available_instances: usize,
    pub sampled: usize,
    /// Fewer instances existed than requested; all were taken.
    pub exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_tokens_per_word: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unk_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBinReport {
    pub seed: u64,
    pub n_per_bin: usize,
    pub bins: Vec<BinStats>,
}

#[derive(Debug, Clone)]
pub struct BinSample {
    pub instances: Vec<MaskedInstance>,
    pub report: FrequencyBinReport,
}

/// Word occurrences of a sentence as `(word, char_start, char_end)`.
///
/// Words are maximal runs of characters that are neither whitespace nor
/// punctuation; frequencies are keyed by their lowercase form.
pub fn word_occurrences(sentence: &str) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut n = 0;
    for (i, c) in sentence.chars().enumerate() {
        n = i + 1;
        if c.is_whitespace() || is_punctuation(c) {
            if !current.is_empty() {
                out.push((std::mem::take(&mut current), start, i));
            }
        } else {
            if current.is_empty() {
                start = i;
            }
            current.push(c);
        }
    }
    if !current.is_empty() {
        out.push((current, start, n));
    }
    out
}

/// Samples masked-word instances per frequency bin.
///
/// The corpus holds one sentence per line and is read fully into memory.
/// For each bin, `n_per_bin` occurrences are drawn without replacement
/// (all of them if fewer exist). Output is ordered by bin, then by corpus
/// position, and is a pure function of the corpus and `seed`.
pub fn sample_frequency_bins<R: BufRead>(
    corpus: R,
    bins: &[FrequencyBin],
    n_per_bin: usize,
    seed: u64,
    tokenizer: Option<&Tokenizer>,
) -> Result<BinSample, EvalError> {
    if n_per_bin == 0 {
        return Err(EvalError::ZeroSample);
    }
    let mut sentences = Vec::new();
    for (idx, line) in corpus.lines().enumerate() {
        let line = line.map_err(|e| EvalError::Read {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if !line.trim().is_empty() {
            sentences.push(line);
        }
    }

    let occurrences: Vec<Vec<(String, usize, usize)>> =
        sentences.iter().map(|s| word_occurrences(s)).collect();
    let mut freq: HashMap<String, u64> = HashMap::new();
    for occ in occurrences.iter().flatten() {
        *freq.entry(occ.0.to_lowercase()).or_insert(0) += 1;
    }
    if freq.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }

    // (sentence, occurrence) pairs per bin, in corpus order
    let mut per_bin: Vec<Vec<(usize, usize)>> = vec![Vec::new(); bins.len()];
    for (si, occ) in occurrences.iter().enumerate() {
        for (oi, (word, _, _)) in occ.iter().enumerate() {
            let f = freq[&word.to_lowercase()];
            if let Some(b) = bins.iter().position(|b| b.contains(f)) {
                per_bin[b].push((si, oi));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    let mut stats = Vec::with_capacity(bins.len());
    for (bin, pool) in bins.iter().zip(&per_bin) {
        let mut chosen: Vec<(usize, usize)> = if pool.len() <= n_per_bin {
            pool.clone()
        } else {
            sample(&mut rng, pool.len(), n_per_bin)
                .into_iter()
                .map(|i| pool[i])
                .collect()
        };
        chosen.sort_unstable();

        let distinct: HashSet<String> = pool
            .iter()
            .map(|&(si, oi)| occurrences[si][oi].0.to_lowercase())
            .collect();
        let (mut tokens, mut unknown) = (0usize, 0usize);
        for &(si, oi) in &chosen {
            let (word, start, end) = &occurrences[si][oi];
            if let Some(tok) = tokenizer {
                let pieces = tok.tokenize(word);
                tokens += pieces.len();
                unknown += pieces.iter().filter(|p| tok.is_unknown(p)).count();
            }
            instances.push(MaskedInstance {
                sentence: sentences[si].clone(),
                word: word.clone(),
                start: *start,
                end: *end,
                frequency_bin: bin.label(),
            });
        }
        let per_word = |x: usize| {
            if chosen.is_empty() {
                0.0
            } else {
                x as f64 / chosen.len() as f64
            }
        };
        stats.push(BinStats {
            bin: bin.label(),
            distinct_words: distinct.len(),
            available_instances: pool.len(),
            sampled: chosen.len(),
            exhausted: pool.len() < n_per_bin,
            mean_tokens_per_word: tokenizer.map(|_| per_word(tokens)),
            unk_rate: tokenizer.map(|_| per_word(unknown)),
        });
    }

    Ok(BinSample {
        instances,
        report: FrequencyBinReport {
            seed,
            n_per_bin,
            bins: stats,
        },
    })
}
