use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

use super::TaggerModel;
use crate::align::{
    align_morphemes, tags_to_segments, AlignError, AlignWarning, MorphemeAnnotation,
    SurfaceSegmentation,
};
use crate::tokenizer::Tokenizer;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SegmentError {
    #[error("empty word")]
    EmptyWord,
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("line {line}: duplicate word {word:?}")]
    Duplicate { line: usize, word: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Align(#[from] AlignError),
}

/// Anything that can split a word into surface segments.
pub trait Segmenter: Sync {
    fn segment(&self, word: &str) -> Result<SurfaceSegmentation, SegmentError>;
}

pub fn segment_word<S: Segmenter + ?Sized>(
    segmenter: &S,
    word: &str,
) -> Result<SurfaceSegmentation, SegmentError> {
    if word.is_empty() {
        return Err(SegmentError::EmptyWord);
    }
    segmenter.segment(word)
}

impl Segmenter for TaggerModel {
    fn segment(&self, word: &str) -> Result<SurfaceSegmentation, SegmentError> {
        Ok(tags_to_segments(word, &self.tag_word(word))?)
    }
}

/// Precomputed segmentations, e.g. produced by an external neural tagger.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExternalSegmentations {
    map: HashMap<String, SurfaceSegmentation>,
}

impl ExternalSegmentations {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a segmentation; returns false if the word was already present.
    pub fn insert(&mut self, seg: SurfaceSegmentation) -> bool {
        if self.map.contains_key(seg.surface()) {
            return false;
        }
        self.map.insert(seg.surface().to_string(), seg);
        true
    }

    /// Gold replay: the surface-aligned gold segmentation of every
    /// annotation. The first annotation of a repeated word wins.
    pub fn from_gold(
        anns: &[MorphemeAnnotation],
    ) -> Result<(Self, Vec<AlignWarning>), SegmentError> {
        let mut out = ExternalSegmentations::new();
        let mut warnings = Vec::new();
        for ann in anns {
            let (seg, w) = align_morphemes(ann)?;
            warnings.extend(w);
            out.insert(seg);
        }
        Ok((out, warnings))
    }

    pub fn get(&self, word: &str) -> Option<&SurfaceSegmentation> {
        self.map.get(word)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl Segmenter for ExternalSegmentations {
    fn segment(&self, word: &str) -> Result<SurfaceSegmentation, SegmentError> {
        self.map
            .get(word)
            .cloned()
            .ok_or_else(|| SegmentError::UnknownWord(word.to_string()))
    }
}

/// Reads `word TAB seg1 seg2 ...` lines; the segments must spell the word.
pub fn load_external_segmentations<R: BufRead>(
    source: R,
) -> Result<ExternalSegmentations, SegmentError> {
    let mut out = ExternalSegmentations::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| SegmentError::Format {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (word, segs) = line.split_once('\t').ok_or_else(|| SegmentError::Format {
            line: lineno,
            message: "expected word TAB segments".into(),
        })?;
        let segments: Vec<&str> = segs.split_whitespace().collect();
        let seg = SurfaceSegmentation::from_segments(word, &segments).map_err(|_| {
            SegmentError::Format {
                line: lineno,
                message: format!("segments {segments:?} do not concatenate to {word:?}"),
            }
        })?;
        if !out.insert(seg) {
            return Err(SegmentError::Duplicate {
                line: lineno,
                word: word.to_string(),
            });
        }
    }
    Ok(out)
}

/// Views a WordPiece tokenizer as a segmenter.
///
/// Continuation prefixes are stripped; a word producing the unknown token
/// anywhere becomes a single whole-word segment. When normalization changes
/// the spelling but not the character count (case folding), pieces are
/// mapped back onto the original characters by length.
#[derive(Debug, Clone)]
pub struct TokenizerSegmenter {
    tokenizer: Tokenizer,
}

impl TokenizerSegmenter {
    pub fn new(tokenizer: Tokenizer) -> Self {
        TokenizerSegmenter { tokenizer }
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }
}

impl Segmenter for TokenizerSegmenter {
    fn segment(&self, word: &str) -> Result<SurfaceSegmentation, SegmentError> {
        let tokens = self.tokenizer.tokenize(word);
        if tokens.is_empty() || tokens.iter().any(|t| self.tokenizer.is_unknown(t)) {
            return Ok(SurfaceSegmentation::whole(word)?);
        }
        let prefix = self.tokenizer.vocab().continuation_prefix();
        let lengths: Vec<usize> = tokens
            .iter()
            .map(|t| t.strip_prefix(prefix).unwrap_or(t).chars().count())
            .collect();
        if lengths.iter().sum::<usize>() != word.chars().count() {
            return Ok(SurfaceSegmentation::whole(word)?);
        }
        let mut spans = Vec::with_capacity(lengths.len());
        let mut start = 0;
        for len in lengths {
            spans.push((start, start + len));
            start += len;
        }
        Ok(SurfaceSegmentation::new(word, spans)?)
    }
}
