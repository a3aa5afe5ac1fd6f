//! Morpheme-aware subword tokenization.
//!
//! WordPiece encoding over a fixed vocabulary, character-level morpheme
//! segmentation, and tools to build vocabularies from segmented lexicons.

pub mod align;
pub mod eval;
pub mod tagger;
pub mod tokenizer;
pub mod vocab;
pub mod vocabuild;

pub use align::{
    align_morphemes, load_sigmorphon, MorphemeAnnotation, SurfaceSegmentation, Tag, Tags,
};
pub use eval::{evaluate_segmenter, segmentation_f1, Averaging, EvalReport, SegScore};
pub use tagger::{
    segment_word, train_tagger, ExternalSegmentations, Segmenter, TaggerModel, TokenizerSegmenter,
    TrainConfig,
};
pub use tokenizer::{tokenize_text, wordpiece_tokenize, Tokenizer, TokenizerConfig};
pub use vocab::{load_vocab, save_vocab, VocabConfig, Vocabulary};
pub use vocabuild::{assemble_vocab, build_vocab, count_subwords, SubwordCounts};
