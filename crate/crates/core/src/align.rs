//! Mapping gold morpheme annotations onto surface characters.
//!
//! Canonical morphemes need not spell the word out ("neuron" inside
//! "neurology"), so each annotation is aligned against the concatenation of
//! its morphemes with a unit-cost edit-distance DP. Every surface character
//! then inherits the morpheme of the character it is aligned with, and the
//! runs of equal morpheme indices become the surface spans.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use thiserror::Error;

pub const DEFAULT_SEPARATOR: &str = "@@";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlignError {
    #[error("empty surface word")]
    EmptySurface,
    #[error("annotation for {0:?} has no morphemes")]
    NoMorphemes(String),
    #[error("annotation for {0:?} has an empty morpheme")]
    EmptyMorpheme(String),
    #[error("no morpheme of {0:?} could be aligned")]
    Unalignable(String),
    #[error("malformed tags {tags:?} for {word:?}")]
    MalformedTags { word: String, tags: String },
    #[error("invalid spans for {0:?}")]
    InvalidSpans(String),
    #[error("segments {segments:?} do not spell {word:?}")]
    SegmentMismatch { word: String, segments: Vec<String> },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: {message}")]
    Io { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    B,
    I,
}

impl Tag {
    pub fn as_char(self) -> char {
        match self {
            Tag::B => 'B',
            Tag::I => 'I',
        }
    }
}

/// A per-character B/I labelling.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tags(pub Vec<Tag>);

impl Tags {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Tag] {
        &self.0
    }
}

impl fmt::Display for Tags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{}", t.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Tags {
    type Err = AlignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                'B' => Ok(Tag::B),
                'I' => Ok(Tag::I),
                _ => Err(AlignError::MalformedTags {
                    word: String::new(),
                    tags: s.to_string(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Tags)
    }
}

/// A word with its gold canonical morphemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphemeAnnotation {
    pub surface: String,
    pub morphemes: Vec<String>,
    pub word_class: Option<String>,
}

impl MorphemeAnnotation {
    pub fn new<S: Into<String>>(surface: S, morphemes: &[&str]) -> Self {
        MorphemeAnnotation {
            surface: surface.into(),
            morphemes: morphemes.iter().map(|m| m.to_string()).collect(),
            word_class: None,
        }
    }

    pub fn validate(&self) -> Result<(), AlignError> {
        if self.surface.is_empty() {
            return Err(AlignError::EmptySurface);
        }
        if self.morphemes.is_empty() {
            return Err(AlignError::NoMorphemes(self.surface.clone()));
        }
        if self.morphemes.iter().any(String::is_empty) {
            return Err(AlignError::EmptyMorpheme(self.surface.clone()));
        }
        Ok(())
    }

    /// Shared-task TSV line; morphemes after the first carry `separator`.
    pub fn to_line(&self, separator: &str) -> String {
        let mut line = format!(
            "{}\t{}",
            self.surface,
            self.morphemes.join(&format!(" {separator}"))
        );
        if let Some(class) = &self.word_class {
            line.push('\t');
            line.push_str(class);
        }
        line
    }
}

/// Contiguous spans, in chars, that exactly tile a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfaceSegmentation {
    surface: String,
    spans: Vec<(usize, usize)>,
}

impl SurfaceSegmentation {
    pub fn new<S: Into<String>>(
        surface: S,
        spans: Vec<(usize, usize)>,
    ) -> Result<Self, AlignError> {
        let surface = surface.into();
        let n = surface.chars().count();
        let mut cursor = 0;
        for &(start, end) in &spans {
            if start != cursor || end <= start {
                return Err(AlignError::InvalidSpans(surface));
            }
            cursor = end;
        }
        if n == 0 || cursor != n {
            return Err(AlignError::InvalidSpans(surface));
        }
        Ok(SurfaceSegmentation { surface, spans })
    }

    /// The whole word as one span.
    pub fn whole<S: Into<String>>(surface: S) -> Result<Self, AlignError> {
        let surface = surface.into();
        let n = surface.chars().count();
        SurfaceSegmentation::new(surface, vec![(0, n)])
    }

    /// Builds spans from segment strings that must concatenate to `surface`.
    pub fn from_segments<S: AsRef<str>>(surface: &str, segments: &[S]) -> Result<Self, AlignError> {
        let joined: String = segments.iter().map(|s| s.as_ref()).collect();
        if joined != surface || segments.iter().any(|s| s.as_ref().is_empty()) {
            return Err(AlignError::SegmentMismatch {
                word: surface.to_string(),
                segments: segments.iter().map(|s| s.as_ref().to_string()).collect(),
            });
        }
        let mut spans = Vec::with_capacity(segments.len());
        let mut start = 0;
        for seg in segments {
            let len = seg.as_ref().chars().count();
            spans.push((start, start + len));
            start += len;
        }
        SurfaceSegmentation::new(surface, spans)
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn spans(&self) -> &[(usize, usize)] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn segments(&self) -> Vec<&str> {
        let bounds: Vec<usize> = self
            .surface
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(self.surface.len()))
            .collect();
        self.spans
            .iter()
            .map(|&(s, e)| &self.surface[bounds[s]..bounds[e]])
            .collect()
    }

    /// `word TAB seg1 seg2 ...`
    pub fn to_line(&self) -> String {
        format!("{}\t{}", self.surface, self.segments().join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlignWarning {
    /// The morpheme at `index` received no surface characters.
    DroppedMorpheme { index: usize, morpheme: String },
}

impl fmt::Display for AlignWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlignWarning::DroppedMorpheme { index, morpheme } => {
                write!(
                    f,
                    "morpheme {index} ({morpheme:?}) has no surface characters"
                )
            }
        }
    }
}

/// Aligns an annotation's morphemes onto its surface form.
///
/// Traceback runs from the end of both strings preferring match, then
/// substitution, then deletion of a morpheme character, then insertion of a
/// surface character. Matches are therefore taken as far right as possible
/// and deleted material is charged to the leftmost morpheme that can absorb
/// it. Inserted surface characters join the span on their left, or the
/// following span at the start of the word.
pub fn align_morphemes(
    ann: &MorphemeAnnotation,
) -> Result<(SurfaceSegmentation, Vec<AlignWarning>), AlignError> {
    ann.validate()?;
    let surface: Vec<char> = ann.surface.chars().collect();
    let mut concat = Vec::new();
    let mut owner = Vec::new();
    for (idx, m) in ann.morphemes.iter().enumerate() {
        for c in m.chars() {
            concat.push(c);
            owner.push(idx);
        }
    }

    let (n, m) = (surface.len(), concat.len());
    let width = m + 1;
    let mut dist = vec![0u32; (n + 1) * width];
    for i in 0..=n {
        dist[i * width] = i as u32;
    }
    for (j, d) in dist[..width].iter_mut().enumerate() {
        *d = j as u32;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = dist[(i - 1) * width + j - 1] + u32::from(surface[i - 1] != concat[j - 1]);
            let del = dist[i * width + j - 1] + 1;
            let ins = dist[(i - 1) * width + j] + 1;
            dist[i * width + j] = diag.min(del).min(ins);
        }
    }

    let mut label: Vec<Option<usize>> = vec![None; n];
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dist[i * width + j];
        if i > 0 && j > 0 {
            let diag = dist[(i - 1) * width + j - 1];
            let same = surface[i - 1] == concat[j - 1];
            if (same && here == diag) || (!same && here == diag + 1) {
                label[i - 1] = Some(owner[j - 1]);
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if j > 0 && here == dist[i * width + j - 1] + 1 {
            j -= 1;
        } else {
            i -= 1;
        }
    }

    let first = match label.iter().flatten().next() {
        Some(&idx) => idx,
        None => return Err(AlignError::Unalignable(ann.surface.clone())),
    };
    let mut current = first;
    let resolved: Vec<usize> = label
        .iter()
        .map(|l| {
            if let Some(idx) = *l {
                current = idx;
            }
            current
        })
        .collect();

    let mut spans = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || resolved[k] != resolved[start] {
            spans.push((start, k));
            start = k;
        }
    }

    let warnings = (0..ann.morphemes.len())
        .filter(|idx| !resolved.contains(idx))
        .map(|index| AlignWarning::DroppedMorpheme {
            index,
            morpheme: ann.morphemes[index].clone(),
        })
        .collect();

    Ok((
        SurfaceSegmentation::new(ann.surface.clone(), spans)?,
        warnings,
    ))
}

pub fn segmentation_to_tags(seg: &SurfaceSegmentation) -> Tags {
    let n = seg.surface().chars().count();
    let mut tags = vec![Tag::I; n];
    for &(start, _) in seg.spans() {
        tags[start] = Tag::B;
    }
    Tags(tags)
}

pub fn tags_to_segments(word: &str, tags: &Tags) -> Result<SurfaceSegmentation, AlignError> {
    let n = word.chars().count();
    if n == 0 || tags.len() != n || tags.0[0] != Tag::B {
        return Err(AlignError::MalformedTags {
            word: word.to_string(),
            tags: tags.to_string(),
        });
    }
    let mut spans = Vec::new();
    let mut start = 0;
    for (k, &t) in tags.0.iter().enumerate().skip(1) {
        if t == Tag::B {
            spans.push((start, k));
            start = k;
        }
    }
    spans.push((start, n));
    SurfaceSegmentation::new(word, spans)
}

/// Reads shared-task TSV: `surface TAB m1 SEP m2 ... [TAB class]`.
pub fn load_sigmorphon<R: BufRead>(
    source: R,
    separator: &str,
) -> Result<Vec<MorphemeAnnotation>, AlignError> {
    let mut out = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| AlignError::Io {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let surface = cols.next().unwrap_or_default().trim();
        let seg = match cols.next() {
            Some(seg) => seg,
            None => {
                return Err(AlignError::Format {
                    line: lineno,
                    message: "missing segmentation column".into(),
                })
            }
        };
        let word_class = cols
            .next()
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(String::from);
        if surface.is_empty() {
            return Err(AlignError::Format {
                line: lineno,
                message: "empty surface word".into(),
            });
        }
        let morphemes: Vec<String> = seg.split(separator).map(|m| m.trim().to_string()).collect();
        if morphemes.iter().any(String::is_empty) {
            return Err(AlignError::Format {
                line: lineno,
                message: format!("empty morpheme in {seg:?}"),
            });
        }
        out.push(MorphemeAnnotation {
            surface: surface.to_string(),
            morphemes,
            word_class,
        });
    }
    Ok(out)
}
