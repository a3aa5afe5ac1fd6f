//! Token inventories in the BERT `vocab.txt` layout.
//!
//! One token per line, the line number (starting at zero) is the token id.
//! Tokens are kept byte-for-byte as they appear in the file; normalization
//! belongs to the tokenizer.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

pub const DEFAULT_CONTINUATION_PREFIX: &str = "##";
pub const DEFAULT_UNKNOWN_TOKEN: &str = "[UNK]";
pub const DEFAULT_SPECIAL_TOKENS: [&str; 5] = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"];

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("line {line}: duplicate token {token:?}")]
    Duplicate { token: String, line: usize },
    #[error("line {line}: empty token")]
    EmptyLine { line: usize },
    #[error("line {line}: token {token:?} contains whitespace")]
    Whitespace { token: String, line: usize },
    #[error("unknown token {0:?} is not in the vocabulary")]
    MissingUnknown(String),
    #[error("empty vocabulary")]
    Empty,
    #[error("continuation prefix must not be empty")]
    EmptyPrefix,
    #[error("line {line}: {source}")]
    Read { line: usize, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Conventions a vocabulary is interpreted under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabConfig {
    pub continuation_prefix: String,
    pub unknown_token: String,
    /// Reserved tokens; only those actually present in a vocabulary are
    /// recorded as its special tokens.
    pub special_tokens: Vec<String>,
}

impl Default for VocabConfig {
    fn default() -> Self {
        VocabConfig {
            continuation_prefix: DEFAULT_CONTINUATION_PREFIX.to_string(),
            unknown_token: DEFAULT_UNKNOWN_TOKEN.to_string(),
            special_tokens: DEFAULT_SPECIAL_TOKENS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

/// An immutable, ordered token inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    token_to_id: HashMap<String, u32>,
    continuation_prefix: String,
    special_tokens: Vec<String>,
    unknown_token: String,
    /// Longest token length in chars, continuation prefix excluded.
    max_piece_chars: usize,
}

impl Vocabulary {
    /// Builds a vocabulary from tokens in id order.
    pub fn from_tokens<I, S>(tokens: I, config: &VocabConfig) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if config.continuation_prefix.is_empty() {
            return Err(VocabError::EmptyPrefix);
        }
        let mut out = Vec::new();
        let mut token_to_id = HashMap::new();
        for (idx, token) in tokens.into_iter().enumerate() {
            let token: String = token.into();
            let line = idx + 1;
            if token.is_empty() {
                return Err(VocabError::EmptyLine { line });
            }
            if token_to_id.contains_key(&token) {
                return Err(VocabError::Duplicate { token, line });
            }
            let special = config.special_tokens.contains(&token) || token == config.unknown_token;
            if !special && token.chars().any(char::is_whitespace) {
                return Err(VocabError::Whitespace { token, line });
            }
            token_to_id.insert(token.clone(), idx as u32);
            out.push(token);
        }
        if out.is_empty() {
            return Err(VocabError::Empty);
        }
        if !token_to_id.contains_key(&config.unknown_token) {
            return Err(VocabError::MissingUnknown(config.unknown_token.clone()));
        }

        let mut special_tokens: Vec<String> = config
            .special_tokens
            .iter()
            .filter(|t| token_to_id.contains_key(*t))
            .cloned()
            .collect();
        if !special_tokens.contains(&config.unknown_token) {
            special_tokens.push(config.unknown_token.clone());
        }

        let prefix = &config.continuation_prefix;
        let max_piece_chars = out
            .iter()
            .map(|t| t.strip_prefix(prefix.as_str()).unwrap_or(t).chars().count())
            .max()
            .unwrap_or(0);

        Ok(Vocabulary {
            tokens: out,
            token_to_id,
            continuation_prefix: config.continuation_prefix.clone(),
            special_tokens,
            unknown_token: config.unknown_token.clone(),
            max_piece_chars,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Always false for a constructed vocabulary; kept for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.token_to_id.contains_key(token)
    }

    pub fn continuation_prefix(&self) -> &str {
        &self.continuation_prefix
    }

    pub fn unknown_token(&self) -> &str {
        &self.unknown_token
    }

    pub fn special_tokens(&self) -> &[String] {
        &self.special_tokens
    }

    pub fn is_special(&self, token: &str) -> bool {
        self.special_tokens.iter().any(|t| t == token)
    }

    pub fn is_continuation(&self, token: &str) -> bool {
        token.starts_with(&self.continuation_prefix)
    }

    pub(crate) fn max_piece_chars(&self) -> usize {
        self.max_piece_chars
    }

    /// The configuration this vocabulary was built under, with the special
    /// list narrowed to the tokens it actually holds.
    pub fn config(&self) -> VocabConfig {
        VocabConfig {
            continuation_prefix: self.continuation_prefix.clone(),
            unknown_token: self.unknown_token.clone(),
            special_tokens: self.special_tokens.clone(),
        }
    }
}

/// Reads a `vocab.txt` stream using the default conventions.
pub fn load_vocab<R: BufRead>(source: R) -> Result<Vocabulary, VocabError> {
    load_vocab_with(source, &VocabConfig::default())
}

pub fn load_vocab_with<R: BufRead>(
    source: R,
    config: &VocabConfig,
) -> Result<Vocabulary, VocabError> {
    let mut tokens = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let mut line = line.map_err(|source| VocabError::Read {
            line: idx + 1,
            source,
        })?;
        if line.ends_with('\r') {
            line.pop();
        }
        tokens.push(line);
    }
    Vocabulary::from_tokens(tokens, config)
}

/// Writes one token per line in id order, LF-terminated.
pub fn save_vocab<W: Write>(vocab: &Vocabulary, mut sink: W) -> Result<(), VocabError> {
    if vocab.is_empty() {
        return Err(VocabError::Empty);
    }
    for token in &vocab.tokens {
        sink.write_all(token.as_bytes())?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}
