//! Compound segmentation and normalization toolkit.

pub mod align;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod io;
pub mod mine;
pub mod splitter;
pub mod text;
pub mod unigram;

pub use error::{Error, Result};
pub use text::{char_len, slice, Boundaries, CompoundEntry, Segmentation, Word};
