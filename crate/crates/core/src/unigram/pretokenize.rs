use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::splitter::Segmenter;
use crate::text::char_len;

pub const DEFAULT_MARKER: char = '\u{2581}';

/// How training text is cut into pretokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Whitespace,
    Compound,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Whitespace => "whitespace",
            Mode::Compound => "compound",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whitespace" => Ok(Mode::Whitespace),
            "compound" => Ok(Mode::Compound),
            other => Err(Error::InvalidConfig(format!("unknown pretokenization mode {other:?}"))),
        }
    }
}

/// Split one word at its segmenter boundaries; only the first piece gets
/// the marker.
pub fn split_word(word: &str, marker: char, segmenter: &dyn Segmenter) -> Result<Vec<String>> {
    let boundaries = segmenter.segment(word)?;
    let chars: Vec<char> = word.chars().collect();
    if boundaries.end() != chars.len() {
        return Err(Error::Segmenter {
            word: word.to_owned(),
            reason: format!("boundaries {:?} do not cover {} characters", boundaries.indices(), char_len(word)),
        });
    }
    Ok(boundaries
        .indices()
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let mut piece = String::new();
            if i == 0 {
                piece.push(marker);
            }
            piece.extend(&chars[w[0]..w[1]]);
            piece
        })
        .collect())
}

/// Whitespace pretokenization with the marker prefixed to each word, and in
/// compound mode a further split at constituent boundaries.
pub fn pretokenize(text: &str, mode: Mode, marker: char, segmenter: Option<&dyn Segmenter>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        match mode {
            Mode::Whitespace => out.push(format!("{marker}{word}")),
            Mode::Compound => {
                let segmenter = segmenter.ok_or(Error::MissingSegmenter)?;
                out.extend(split_word(word, marker, segmenter)?);
            }
        }
    }
    Ok(out)
}
