//! Unigram language model tokenizer with whitespace or compound-aware
//! pretokenization.
//!
//! Compound-aware pretokenization only affects training: encoding always
//! splits on whitespace, so a model trained either way is used the same way.

mod analysis;
mod model;
mod pretokenize;
mod sampling;
mod trainer;

pub use analysis::{
    classify, gold_boundaries, hardness_rate, is_hard, report_from_details, token_origins, HardnessDetail,
    HardnessReport, LangHardness,
};
pub use model::{EncodedWord, Encoding, Token, TokenBoundaries, TokenizerModel, DEFAULT_UNK, MODEL_VERSION};
pub use pretokenize::{pretokenize, split_word, Mode, DEFAULT_MARKER};
pub use sampling::{language_probabilities, sample_corpus, sample_indices};
pub use trainer::{count_pretokens, train_from_counts, train_unigram, TrainerConfig};
