//! Shared domain types and text conventions.
//!
//! Every offset and length in this crate counts Unicode scalar values
//! (`char`s), never bytes. Text entering the toolkit is NFC-normalized.

use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::error::{Error, Result};

/// Number of Unicode scalar values in `text`.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// Scalar values `start..end` of `text` (half-open).
pub fn slice(text: &str, start: usize, end: usize) -> Result<&str> {
    let len = char_len(text);
    if start > end || end > len {
        return Err(Error::SliceOutOfRange { start, end, len });
    }
    let byte_at = |idx: usize| text.char_indices().nth(idx).map_or(text.len(), |(b, _)| b);
    Ok(&text[byte_at(start)..byte_at(end)])
}

pub fn nfc(text: &str) -> String {
    if is_nfc(text) {
        text.to_owned()
    } else {
        text.nfc().collect()
    }
}

fn valid_lang(lang: &str) -> bool {
    (2..=3).contains(&lang.len()) && lang.bytes().all(|b| b.is_ascii_lowercase())
}

/// A single whitespace-free word together with its language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    text: String,
    lang: String,
}

impl Word {
    pub fn new(text: &str, lang: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::InvalidWord { text: text.into(), reason: "empty" });
        }
        if text.chars().any(char::is_whitespace) {
            return Err(Error::InvalidWord { text: text.into(), reason: "contains whitespace" });
        }
        if !valid_lang(lang) {
            return Err(Error::InvalidLang(lang.into()));
        }
        Ok(Word { text: nfc(text), lang: lang.to_owned() })
    }

    /// A word in the undetermined language `und`.
    pub fn und(text: &str) -> Result<Self> {
        Word::new(text, "und")
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn char_len(&self) -> usize {
        char_len(&self.text)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A word with its normalized constituents. Non-compounds carry themselves
/// as their only constituent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompoundEntry {
    word: Word,
    constituents: Vec<String>,
}

impl CompoundEntry {
    pub fn new(word: Word, constituents: Vec<String>) -> Result<Self> {
        if constituents.is_empty() {
            return Err(Error::NoConstituents(word.text.clone()));
        }
        if constituents.iter().any(String::is_empty) {
            return Err(Error::EmptyConstituent(word.text.clone()));
        }
        let constituents = constituents.iter().map(|c| nfc(c)).collect();
        Ok(CompoundEntry { word, constituents })
    }

    pub fn non_compound(word: Word) -> Self {
        let constituents = vec![word.text.clone()];
        CompoundEntry { word, constituents }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn constituents(&self) -> &[String] {
        &self.constituents
    }

    pub fn is_compound(&self) -> bool {
        self.constituents.len() >= 2
    }
}

/// Strictly increasing character offsets `r0 = 0 < r1 < ... < rk = n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Boundaries(Vec<usize>);

impl Boundaries {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let ok = indices.len() >= 2 && indices[0] == 0 && indices.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            let len = indices.last().copied().unwrap_or(0);
            return Err(Error::InvalidBoundaries { indices, len });
        }
        Ok(Boundaries(indices))
    }

    /// Boundaries that must also end at `len`.
    pub fn for_len(indices: Vec<usize>, len: usize) -> Result<Self> {
        if indices.last() != Some(&len) {
            return Err(Error::InvalidBoundaries { indices, len });
        }
        Boundaries::new(indices)
    }

    /// The trivial segmentation `{0, len}`.
    pub fn whole(len: usize) -> Result<Self> {
        Boundaries::new(vec![0, len])
    }

    /// Boundaries from a sequence of segment lengths.
    pub fn from_lengths(lengths: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices = vec![0];
        let mut acc = 0;
        for len in lengths {
            acc += len;
            indices.push(acc);
        }
        Boundaries::new(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Number of segments `k`.
    pub fn segments(&self) -> usize {
        self.0.len() - 1
    }

    pub fn end(&self) -> usize {
        *self.0.last().expect("at least two indices")
    }

    pub fn is_subset_of(&self, other: &[usize]) -> bool {
        self.0.iter().all(|i| other.binary_search(i).is_ok())
    }
}

impl TryFrom<Vec<usize>> for Boundaries {
    type Error = Error;

    fn try_from(value: Vec<usize>) -> Result<Self> {
        Boundaries::new(value)
    }
}

impl From<Boundaries> for Vec<usize> {
    fn from(value: Boundaries) -> Self {
        value.0
    }
}

/// A word cut at a set of boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    word: Word,
    boundaries: Boundaries,
    segments: Vec<String>,
}

impl Segmentation {
    pub fn new(word: Word, boundaries: Boundaries) -> Result<Self> {
        let chars: Vec<char> = word.text.chars().collect();
        if boundaries.end() != chars.len() {
            return Err(Error::InvalidBoundaries { indices: boundaries.0, len: chars.len() });
        }
        let segments = boundaries.0.windows(2).map(|w| chars[w[0]..w[1]].iter().collect()).collect();
        Ok(Segmentation { word, boundaries, segments })
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn boundaries(&self) -> &Boundaries {
        &self.boundaries
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }
}
