//! Character-level B/I segmentation with a structured averaged perceptron.
//!
//! Each character gets emission scores for B and I from sparse template
//! features; a 2x2 transition matrix couples neighbouring tags, and decoding
//! is first-order Viterbi with the first character pinned to B.

mod features;
mod segmenter;

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::align::{Tag, Tags};

pub use features::{extract_features, FeatureTemplate, POSITION_BUCKETS};
pub use segmenter::{
    load_external_segmentations, segment_word, ExternalSegmentations, SegmentError, Segmenter,
    TokenizerSegmenter,
};

const MODEL_MAGIC: &str = "morphtok-tagger";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("empty training data")]
    EmptyData,
    #[error("training pair {index} ({word:?}): {reason}")]
    MalformedPair {
        index: usize,
        word: String,
        reason: String,
    },
    #[error("epochs must be at least 1")]
    ZeroEpochs,
    #[error("invalid feature template {0:?}")]
    BadTemplate(FeatureTemplate),
    #[error("unsupported model version: {0}")]
    Version(String),
    #[error("model line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
    pub averaging: bool,
    pub template: FeatureTemplate,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            seed: 0,
            shuffle: true,
            averaging: true,
            template: FeatureTemplate::default(),
        }
    }
}

fn label(tag: Tag) -> usize {
    match tag {
        Tag::B => 0,
        Tag::I => 1,
    }
}

const LABELS: [Tag; 2] = [Tag::B, Tag::I];

/// Learned weights over {B, I}; index 0 is B, index 1 is I.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    template: FeatureTemplate,
    index: HashMap<String, usize>,
    weights: Vec<[f64; 2]>,
    /// `transitions[prev][cur]`
    transitions: [[f64; 2]; 2],
}

impl TaggerModel {
    /// A model with no feature weights; every word decodes to `B` then all `I`.
    pub fn empty(template: FeatureTemplate) -> Self {
        TaggerModel {
            template,
            index: HashMap::new(),
            weights: Vec::new(),
            transitions: [[0.0; 2]; 2],
        }
    }

    pub fn from_parts(
        template: FeatureTemplate,
        weights: impl IntoIterator<Item = (String, [f64; 2])>,
        transitions: [[f64; 2]; 2],
    ) -> Self {
        let mut model = TaggerModel::empty(template);
        for (feature, w) in weights {
            let id = model.intern(feature);
            model.weights[id] = w;
        }
        model.transitions = transitions;
        model
    }

    fn intern(&mut self, feature: String) -> usize {
        let next = self.weights.len();
        let id = *self.index.entry(feature).or_insert(next);
        if id == next {
            self.weights.push([0.0; 2]);
        }
        id
    }

    pub fn template(&self) -> &FeatureTemplate {
        &self.template
    }

    pub fn num_features(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, feature: &str) -> Option<[f64; 2]> {
        self.index.get(feature).map(|&id| self.weights[id])
    }

    pub fn transition(&self, prev: Tag, cur: Tag) -> f64 {
        self.transitions[label(prev)][label(cur)]
    }

    /// Per-character `[B, I]` scores.
    pub fn emission_scores(&self, word: &str) -> Vec<[f64; 2]> {
        let chars: Vec<char> = word.chars().collect();
        (0..chars.len())
            .map(|pos| {
                let mut score = [0.0; 2];
                for f in features::char_features(&chars, pos, &self.template) {
                    if let Some(&id) = self.index.get(&f) {
                        score[0] += self.weights[id][0];
                        score[1] += self.weights[id][1];
                    }
                }
                score
            })
            .collect()
    }

    /// Total score of a complete tagging.
    pub fn sequence_score(&self, word: &str, tags: &Tags) -> f64 {
        let emissions = self.emission_scores(word);
        let mut total = 0.0;
        for (i, &t) in tags.as_slice().iter().enumerate() {
            total += emissions[i][label(t)];
            if i > 0 {
                total += self.transition(tags.as_slice()[i - 1], t);
            }
        }
        total
    }

    /// Best tagging of `word`; ties prefer `I`.
    pub fn tag_word(&self, word: &str) -> Tags {
        Tags(
            viterbi(&self.emission_scores(word), &self.transitions)
                .into_iter()
                .map(|l| LABELS[l])
                .collect(),
        )
    }

    pub fn save<W: Write>(&self, mut sink: W) -> Result<(), TaggerError> {
        let t = &self.template;
        writeln!(sink, "{MODEL_MAGIC} {MODEL_VERSION}")?;
        writeln!(
            sink,
            "template radius={} min_order={} max_order={} classes={} buckets={}",
            t.radius, t.min_order, t.max_order, t.char_classes, t.position_buckets
        )?;
        let tr = &self.transitions;
        writeln!(
            sink,
            "transitions {:?} {:?} {:?} {:?}",
            tr[0][0], tr[0][1], tr[1][0], tr[1][1]
        )?;
        let mut entries: Vec<(&String, &usize)> = self.index.iter().collect();
        entries.sort();
        writeln!(sink, "features {}", entries.len())?;
        for (feature, &id) in entries {
            let [b, i] = self.weights[id];
            let key = serde_json::to_string(feature).expect("string serialization");
            writeln!(sink, "{b:?}\t{i:?}\t{key}")?;
        }
        sink.flush()?;
        Ok(())
    }

    pub fn load<R: BufRead>(source: R) -> Result<Self, TaggerError> {
        let mut lines = source.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String), TaggerError> {
            match lines.next() {
                Some((idx, line)) => Ok((idx + 1, line?)),
                None => Err(TaggerError::Format {
                    line: 0,
                    message: format!("missing {what}"),
                }),
            }
        };
        let bad = |line: usize, message: &str| TaggerError::Format {
            line,
            message: message.to_string(),
        };

        let (_, header) = next("header")?;
        if header != format!("{MODEL_MAGIC} {MODEL_VERSION}") {
            return Err(TaggerError::Version(header));
        }

        let (line, spec) = next("template")?;
        let mut template = FeatureTemplate::default();
        let body = spec
            .strip_prefix("template ")
            .ok_or_else(|| bad(line, "expected template"))?;
        for field in body.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| bad(line, "malformed template field"))?;
            let num = || {
                v.parse::<usize>()
                    .map_err(|_| bad(line, "malformed template value"))
            };
            let flag = || {
                v.parse::<bool>()
                    .map_err(|_| bad(line, "malformed template value"))
            };
            match k {
                "radius" => template.radius = num()?,
                "min_order" => template.min_order = num()?,
                "max_order" => template.max_order = num()?,
                "classes" => template.char_classes = flag()?,
                "buckets" => template.position_buckets = flag()?,
                _ => return Err(bad(line, "unknown template field")),
            }
        }
        if !template.is_valid() {
            return Err(TaggerError::BadTemplate(template));
        }

        let (line, tr) = next("transitions")?;
        let values: Vec<f64> = tr
            .strip_prefix("transitions ")
            .ok_or_else(|| bad(line, "expected transitions"))?
            .split_whitespace()
            .map(|v| parse_weight(v).ok_or_else(|| bad(line, "bad transition weight")))
            .collect::<Result<_, _>>()?;
        if values.len() != 4 {
            return Err(bad(line, "expected four transition weights"));
        }
        let transitions = [[values[0], values[1]], [values[2], values[3]]];

        let (line, count) = next("feature count")?;
        let count: usize = count
            .strip_prefix("features ")
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| bad(line, "expected feature count"))?;

        let mut model = TaggerModel::empty(template);
        model.transitions = transitions;
        for _ in 0..count {
            let (line, row) = next("feature row")?;
            let mut cols = row.splitn(3, '\t');
            let b = cols.next().and_then(parse_weight);
            let i = cols.next().and_then(parse_weight);
            let key = cols
                .next()
                .and_then(|k| serde_json::from_str::<String>(k).ok());
            match (b, i, key) {
                (Some(b), Some(i), Some(key)) => {
                    if model.index.contains_key(&key) {
                        return Err(bad(line, "duplicate feature"));
                    }
                    let id = model.intern(key);
                    model.weights[id] = [b, i];
                }
                _ => return Err(bad(line, "malformed feature row")),
            }
        }
        Ok(model)
    }
}

fn parse_weight(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// First-order Viterbi over {B, I} with position 0 fixed to B.
///
/// On exact ties the I label wins, both for back-pointers and at the end.
fn viterbi(emissions: &[[f64; 2]], transitions: &[[f64; 2]; 2]) -> Vec<usize> {
    let n = emissions.len();
    if n == 0 {
        return Vec::new();
    }
    let mut score = vec![[f64::NEG_INFINITY; 2]; n];
    let mut back = vec![[0usize; 2]; n];
    score[0][0] = emissions[0][0];
    for i in 1..n {
        for cur in 0..2 {
            let mut best_prev = 1;
            let mut best = score[i - 1][1] + transitions[1][cur];
            let via_b = score[i - 1][0] + transitions[0][cur];
            if via_b > best {
                best = via_b;
                best_prev = 0;
            }
            score[i][cur] = best + emissions[i][cur];
            back[i][cur] = best_prev;
        }
    }
    let mut last = if score[n - 1][0] > score[n - 1][1] {
        0
    } else {
        1
    };
    let mut path = vec![0; n];
    for i in (0..n).rev() {
        path[i] = last;
        last = back[i][last];
    }
    path
}

/// Structured averaged-perceptron training.
///
/// Deterministic for a given `cfg.seed`: the only randomness is the
/// per-epoch shuffle, drawn from a ChaCha stream.
pub fn train_tagger<S: AsRef<str>>(
    data: &[(S, Tags)],
    cfg: &TrainConfig,
) -> Result<TaggerModel, TaggerError> {
    if data.is_empty() {
        return Err(TaggerError::EmptyData);
    }
    if cfg.epochs == 0 {
        return Err(TaggerError::ZeroEpochs);
    }
    if !cfg.template.is_valid() {
        return Err(TaggerError::BadTemplate(cfg.template.clone()));
    }

    let mut model = TaggerModel::empty(cfg.template.clone());
    let mut examples = Vec::with_capacity(data.len());
    for (index, (word, tags)) in data.iter().enumerate() {
        let word = word.as_ref();
        let chars: Vec<char> = word.chars().collect();
        let malformed = |reason: &str| TaggerError::MalformedPair {
            index,
            word: word.to_string(),
            reason: reason.to_string(),
        };
        if chars.is_empty() {
            return Err(malformed("empty word"));
        }
        if chars.len() != tags.len() {
            return Err(malformed("tag count differs from character count"));
        }
        if tags.as_slice()[0] != Tag::B {
            return Err(malformed("first tag is not B"));
        }
        let feats: Vec<Vec<usize>> = (0..chars.len())
            .map(|pos| {
                features::char_features(&chars, pos, &cfg.template)
                    .into_iter()
                    .map(|f| model.intern(f))
                    .collect()
            })
            .collect();
        let gold: Vec<usize> = tags.as_slice().iter().map(|&t| label(t)).collect();
        examples.push((feats, gold));
    }

    let mut totals = vec![[0.0f64; 2]; model.weights.len()];
    let mut trans_totals = [[0.0f64; 2]; 2];
    let mut step = 1.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();

    for _ in 0..cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        for &ex in &order {
            let (feats, gold) = &examples[ex];
            let emissions: Vec<[f64; 2]> = feats
                .iter()
                .map(|fs| {
                    fs.iter().fold([0.0; 2], |acc, &id| {
                        [acc[0] + model.weights[id][0], acc[1] + model.weights[id][1]]
                    })
                })
                .collect();
            let guess = viterbi(&emissions, &model.transitions);
            if guess != *gold {
                for (i, fs) in feats.iter().enumerate() {
                    let (g, p) = (gold[i], guess[i]);
                    if g != p {
                        for &id in fs {
                            model.weights[id][g] += 1.0;
                            model.weights[id][p] -= 1.0;
                            totals[id][g] += step;
                            totals[id][p] -= step;
                        }
                    }
                    if i > 0 {
                        let (gp, pp) = (gold[i - 1], guess[i - 1]);
                        if (gp, g) != (pp, p) {
                            model.transitions[gp][g] += 1.0;
                            model.transitions[pp][p] -= 1.0;
                            trans_totals[gp][g] += step;
                            trans_totals[pp][p] -= step;
                        }
                    }
                }
            }
            step += 1.0;
        }
    }

    if cfg.averaging {
        for (w, t) in model.weights.iter_mut().zip(&totals) {
            w[0] -= t[0] / step;
            w[1] -= t[1] / step;
        }
        for (row, totals) in model.transitions.iter_mut().zip(&trans_totals) {
            for (w, t) in row.iter_mut().zip(totals) {
                *w -= t / step;
            }
        }
    }

    Ok(model.pruned())
}

impl TaggerModel {
    /// Drops features whose weights are both zero; predictions are unchanged.
    fn pruned(self) -> Self {
        let mut kept: Vec<(String, [f64; 2])> = self
            .index
            .into_iter()
            .map(|(f, id)| (f, self.weights[id]))
            .filter(|(_, w)| w[0] != 0.0 || w[1] != 0.0)
            .collect();
        kept.sort_by(|a, b| a.0.cmp(&b.0));
        TaggerModel::from_parts(self.template, kept, self.transitions)
    }
}
