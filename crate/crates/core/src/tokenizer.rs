//! BERT-style text cleanup, pre-tokenization and greedy longest-match
//! WordPiece decoding.

use thiserror::Error;
use unicode_general_category::get_general_category;
use unicode_normalization::UnicodeNormalization;

use crate::vocab::{Vocabulary, DEFAULT_UNKNOWN_TOKEN};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TokenizeError {
    #[error("empty word")]
    EmptyWord,
    #[error("max_word_chars must be at least 1")]
    ZeroWordCap,
    #[error("lossy sequence: contains unknown token {0:?}")]
    LossySequence(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    pub strip_accents: bool,
    /// Words longer than this (in chars) map straight to the unknown token.
    pub max_word_chars: usize,
    pub unknown_token: String,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            strip_accents: true,
            max_word_chars: 100,
            unknown_token: DEFAULT_UNKNOWN_TOKEN.to_string(),
        }
    }
}

impl TokenizerConfig {
    /// Case-preserving settings; accents are kept as well.
    pub fn cased() -> Self {
        TokenizerConfig {
            lowercase: false,
            strip_accents: false,
            ..TokenizerConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), TokenizeError> {
        if self.max_word_chars == 0 {
            return Err(TokenizeError::ZeroWordCap);
        }
        Ok(())
    }
}

fn is_bert_whitespace(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r') || get_general_category(c).abbreviation() == "Zs"
}

fn is_bert_control(c: char) -> bool {
    if matches!(c, '\t' | '\n' | '\r') {
        return false;
    }
    get_general_category(c).abbreviation().starts_with('C')
}

/// ASCII symbol ranges count as punctuation too, so `$`, `^`, `` ` `` split
/// words the same way BERT does.
pub fn is_punctuation(c: char) -> bool {
    let cp = c as u32;
    if (33..=47).contains(&cp)
        || (58..=64).contains(&cp)
        || (91..=96).contains(&cp)
        || (123..=126).contains(&cp)
    {
        return true;
    }
    get_general_category(c).abbreviation().starts_with('P')
}

fn is_cjk(c: char) -> bool {
    let cp = c as u32;
    (0x4E00..=0x9FFF).contains(&cp)
        || (0x3400..=0x4DBF).contains(&cp)
        || (0x20000..=0x2A6DF).contains(&cp)
        || (0x2A700..=0x2B73F).contains(&cp)
        || (0x2B740..=0x2B81F).contains(&cp)
        || (0x2B820..=0x2CEAF).contains(&cp)
        || (0xF900..=0xFAFF).contains(&cp)
        || (0x2F800..=0x2FA1F).contains(&cp)
}

/// Removes control characters, folds case and accents per `cfg`, and
/// collapses every whitespace run into a single space (trimmed at the ends).
pub fn normalize(text: &str, cfg: &TokenizerConfig) -> String {
    let cleaned: String = text
        .chars()
        .filter(|&c| c != '\0' && c != '\u{FFFD}' && !is_bert_control(c))
        .map(|c| if is_bert_whitespace(c) { ' ' } else { c })
        .collect();

    let cased = if cfg.lowercase {
        cleaned.to_lowercase()
    } else {
        cleaned
    };
    let folded: String = if cfg.strip_accents {
        cased
            .nfd()
            .filter(|&c| get_general_category(c).abbreviation() != "Mn")
            .collect()
    } else {
        cased
    };

    let mut out = String::with_capacity(folded.len());
    for word in folded.split(is_bert_whitespace).filter(|w| !w.is_empty()) {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Splits on whitespace and isolates every punctuation character (and CJK
/// ideograph) as its own word.
pub fn pretokenize(text: &str) -> Vec<&str> {
    let mut words = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                words.push(&text[s..i]);
            }
        } else if is_punctuation(c) || is_cjk(c) {
            if let Some(s) = start.take() {
                words.push(&text[s..i]);
            }
            words.push(&text[i..i + c.len_utf8()]);
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        words.push(&text[s..]);
    }
    words
}

/// Greedy left-to-right longest-match decoding of a single word.
///
/// Any position with no matching entry makes the whole word the unknown
/// token, as does a word longer than `cfg.max_word_chars`.
pub fn wordpiece_tokenize(
    word: &str,
    vocab: &Vocabulary,
    cfg: &TokenizerConfig,
) -> Result<Vec<String>, TokenizeError> {
    if word.is_empty() {
        return Err(TokenizeError::EmptyWord);
    }
    cfg.validate()?;
    Ok(greedy_pieces(word, vocab, cfg))
}

fn greedy_pieces(word: &str, vocab: &Vocabulary, cfg: &TokenizerConfig) -> Vec<String> {
    let bounds: Vec<usize> = word
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(word.len()))
        .collect();
    let n_chars = bounds.len() - 1;
    if n_chars > cfg.max_word_chars {
        return vec![cfg.unknown_token.clone()];
    }

    let prefix = vocab.continuation_prefix();
    let longest = vocab.max_piece_chars();
    let mut pieces = Vec::new();
    let mut candidate = String::new();
    let mut start = 0;
    while start < n_chars {
        let mut end = n_chars.min(start + longest);
        let mut matched = false;
        while end > start {
            let piece = &word[bounds[start]..bounds[end]];
            candidate.clear();
            if start > 0 {
                candidate.push_str(prefix);
                candidate.push_str(piece);
            } else if !piece.starts_with(prefix) {
                // a word-initial piece may not masquerade as a continuation entry
                candidate.push_str(piece);
            }
            if !candidate.is_empty() && vocab.contains(&candidate) {
                pieces.push(candidate.clone());
                matched = true;
                break;
            }
            end -= 1;
        }
        if !matched {
            return vec![cfg.unknown_token.clone()];
        }
        start = end;
    }
    pieces
}

/// `normalize`, `pretokenize`, then `wordpiece_tokenize` on every word.
pub fn tokenize_text(text: &str, vocab: &Vocabulary, cfg: &TokenizerConfig) -> Vec<String> {
    let normalized = normalize(text, cfg);
    pretokenize(&normalized)
        .into_iter()
        .flat_map(|w| greedy_pieces(w, vocab, cfg))
        .collect()
}

/// Joins tokens back into a word, dropping continuation prefixes.
pub fn detokenize<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
) -> Result<String, TokenizeError> {
    let prefix = vocab.continuation_prefix();
    let mut out = String::new();
    for t in tokens {
        let t = t.as_ref();
        if t == vocab.unknown_token() {
            return Err(TokenizeError::LossySequence(t.to_string()));
        }
        out.push_str(t.strip_prefix(prefix).unwrap_or(t));
    }
    Ok(out)
}

/// A vocabulary bound to decoding settings.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    vocab: Vocabulary,
    config: TokenizerConfig,
}

impl Tokenizer {
    pub fn new(vocab: Vocabulary, config: TokenizerConfig) -> Result<Self, TokenizeError> {
        config.validate()?;
        Ok(Tokenizer { vocab, config })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &TokenizerConfig {
        &self.config
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        tokenize_text(text, &self.vocab, &self.config)
    }

    pub fn tokenize_word(&self, word: &str) -> Result<Vec<String>, TokenizeError> {
        wordpiece_tokenize(word, &self.vocab, &self.config)
    }

    pub fn is_unknown(&self, token: &str) -> bool {
        token == self.config.unknown_token
    }
}
