use std::collections::HashMap;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;

use super::pretokenize::{Mode, DEFAULT_MARKER};
use crate::error::{Error, Result};
use crate::text::{nfc, Boundaries};

pub const MODEL_VERSION: u32 = 1;
pub const DEFAULT_UNK: &str = "<unk>";

/// Penalty of an unknown character relative to the rarest piece.
const UNK_PENALTY: f64 = 10.0;

/// Token boundaries of one word, measured in the raw word.
pub type TokenBoundaries = Boundaries;

#[derive(Debug, Clone, Default)]
struct Trie {
    nodes: Vec<TrieNode>,
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    next: HashMap<char, u32>,
    piece: Option<u32>,
}

impl Trie {
    fn build<'a>(pieces: impl Iterator<Item = &'a str>) -> Self {
        let mut trie = Trie { nodes: vec![TrieNode::default()] };
        for (id, piece) in pieces.enumerate() {
            let mut at = 0usize;
            for c in piece.chars() {
                let fresh = trie.nodes.len() as u32;
                let next = *trie.nodes[at].next.entry(c).or_insert(fresh);
                if next == fresh {
                    trie.nodes.push(TrieNode::default());
                }
                at = next as usize;
            }
            trie.nodes[at].piece = Some(id as u32);
        }
        trie
    }

    /// Calls `f(end, piece_id)` for every piece that matches at `start`,
    /// shortest first.
    fn matches(&self, chars: &[char], start: usize, mut f: impl FnMut(usize, usize)) {
        let mut at = 0usize;
        for (offset, c) in chars[start..].iter().enumerate() {
            match self.nodes[at].next.get(c) {
                Some(&next) => at = next as usize,
                None => return,
            }
            if let Some(id) = self.nodes[at].piece {
                f(start + offset + 1, id as usize);
            }
        }
    }
}

/// One token of a Viterbi path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Token {
    Piece(usize),
    Unk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedWord {
    /// Range into [`Encoding::pieces`].
    pub pieces: Range<usize>,
    pub boundaries: TokenBoundaries,
    pub log_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Encoding {
    pub pieces: Vec<String>,
    pub words: Vec<EncodedWord>,
}

/// Unigram piece inventory with log-probabilities.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    pieces: Vec<(String, f64)>,
    unk_piece: String,
    marker: char,
    training_pretokenization: Mode,
    version: u32,
    index: HashMap<String, usize>,
    trie: Trie,
    unk_score: f64,
}

impl PartialEq for TokenizerModel {
    fn eq(&self, other: &Self) -> bool {
        self.pieces == other.pieces
            && self.unk_piece == other.unk_piece
            && self.marker == other.marker
            && self.training_pretokenization == other.training_pretokenization
            && self.version == other.version
    }
}

fn cmp_pieces(a: &(String, f64), b: &(String, f64)) -> std::cmp::Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

impl TokenizerModel {
    /// Build a model; pieces are stored sorted by log-probability
    /// descending, then text ascending.
    pub fn new(mut pieces: Vec<(String, f64)>, training_pretokenization: Mode, marker: char, unk_piece: &str) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidModel("no pieces".into()));
        }
        if let Some((p, _)) = pieces.iter().find(|(p, lp)| p.is_empty() || !lp.is_finite()) {
            return Err(Error::InvalidModel(format!("piece {p:?} is empty or has a non-finite log-probability")));
        }
        pieces.sort_by(cmp_pieces);
        let mut index = HashMap::with_capacity(pieces.len());
        for (i, (p, _)) in pieces.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidModel(format!("duplicate piece {p:?}")));
            }
        }
        if index.contains_key(unk_piece) {
            return Err(Error::InvalidModel(format!("unk piece {unk_piece:?} is also a regular piece")));
        }
        let trie = Trie::build(pieces.iter().map(|(p, _)| p.as_str()));
        let min = pieces.iter().map(|(_, lp)| *lp).fold(f64::INFINITY, f64::min);
        Ok(TokenizerModel {
            pieces,
            unk_piece: unk_piece.to_owned(),
            marker,
            training_pretokenization,
            version: MODEL_VERSION,
            index,
            trie,
            unk_score: min - UNK_PENALTY,
        })
    }

    /// A model with default marker and unk piece.
    pub fn from_pieces<S: Into<String>>(pieces: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let pieces = pieces.into_iter().map(|(p, lp)| (p.into(), lp)).collect();
        TokenizerModel::new(pieces, Mode::Whitespace, DEFAULT_MARKER, DEFAULT_UNK)
    }

    pub fn pieces(&self) -> &[(String, f64)] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn marker(&self) -> char {
        self.marker
    }

    pub fn unk_piece(&self) -> &str {
        &self.unk_piece
    }

    pub fn training_pretokenization(&self) -> Mode {
        self.training_pretokenization
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn id(&self, piece: &str) -> Option<usize> {
        self.index.get(piece).copied()
    }

    pub fn log_prob(&self, piece: &str) -> Option<f64> {
        self.id(piece).map(|i| self.pieces[i].1)
    }

    pub fn unk_score(&self) -> f64 {
        self.unk_score
    }

    pub fn prob_sum(&self) -> f64 {
        self.pieces.iter().map(|(_, lp)| lp.exp()).sum()
    }

    pub(crate) fn matches(&self, chars: &[char], start: usize, f: impl FnMut(usize, usize)) {
        self.trie.matches(chars, start, f)
    }

    /// Best-scoring path over `chars`, optionally forbidding one piece.
    /// Ties keep the path found first (shorter final pieces win).
    pub fn viterbi(&self, chars: &[char], exclude: Option<usize>) -> (Vec<Token>, f64) {
        let n = chars.len();
        let mut best = vec![f64::NEG_INFINITY; n + 1];
        let mut back: Vec<(usize, Token)> = vec![(0, Token::Unk); n + 1];
        best[0] = 0.0;
        for start in 0..n {
            let base = best[start];
            if base == f64::NEG_INFINITY {
                continue;
            }
            let mut has_single = false;
            self.trie.matches(chars, start, |end, id| {
                if end == start + 1 {
                    has_single = true;
                }
                if Some(id) == exclude {
                    return;
                }
                let score = base + self.pieces[id].1;
                if score > best[end] {
                    best[end] = score;
                    back[end] = (start, Token::Piece(id));
                }
            });
            if !has_single {
                let score = base + self.unk_score;
                if score > best[start + 1] {
                    best[start + 1] = score;
                    back[start + 1] = (start, Token::Unk);
                }
            }
        }
        let mut path = Vec::new();
        let mut at = n;
        while at > 0 {
            let (prev, tok) = back[at];
            path.push(tok);
            at = prev;
        }
        path.reverse();
        (path, best[n])
    }

    fn token_text(&self, tok: Token) -> &str {
        match tok {
            Token::Piece(id) => &self.pieces[id].0,
            Token::Unk => &self.unk_piece,
        }
    }

    /// Encode one whitespace-free word: returns its pieces, its token
    /// boundaries in the raw word, and the path log-probability.
    pub fn encode_word(&self, word: &str) -> (Vec<String>, TokenBoundaries, f64) {
        let chars: Vec<char> = std::iter::once(self.marker).chain(word.chars()).collect();
        let (path, score) = self.viterbi(&chars, None);
        let mut indices = vec![0usize];
        let mut consumed = 0usize;
        let mut pieces = Vec::with_capacity(path.len());
        for tok in path {
            consumed += match tok {
                Token::Piece(id) => self.pieces[id].0.chars().count(),
                Token::Unk => 1,
            };
            // the marker occupies no position in the raw word
            let raw = consumed - 1;
            if raw > *indices.last().expect("non-empty") {
                indices.push(raw);
            }
            pieces.push(self.token_text(tok).to_owned());
        }
        let boundaries = Boundaries::new(indices).expect("strictly increasing by construction");
        (pieces, boundaries, score)
    }

    /// Whitespace pretokenization followed by per-word Viterbi.
    pub fn encode(&self, text: &str) -> Encoding {
        let text = nfc(text);
        let mut enc = Encoding::default();
        for word in text.split_whitespace() {
            let (pieces, boundaries, log_prob) = self.encode_word(word);
            let start = enc.pieces.len();
            enc.pieces.extend(pieces);
            enc.words.push(EncodedWord { pieces: start..enc.pieces.len(), boundaries, log_prob });
        }
        enc
    }

    /// Concatenate pieces and turn markers back into single spaces.
    pub fn decode<S: AsRef<str>>(&self, pieces: &[S]) -> String {
        let joined: String = pieces.iter().map(AsRef::as_ref).collect();
        let spaced = joined.replace(self.marker, " ");
        spaced.strip_prefix(' ').unwrap_or(&spaced).to_owned()
    }

    /// Canonical JSON; log-probabilities carry 17 significant digits.
    pub fn to_json(&self) -> String {
        let q = |s: &str| serde_json::to_string(s).expect("string serialization");
        let mut out = format!(
            "{{\"version\":{},\"type\":\"unigram\",\"marker\":{},\"unk_piece\":{},\"training_pretokenization\":\"{}\",\"pieces\":[",
            self.version,
            q(&self.marker.to_string()),
            q(&self.unk_piece),
            self.training_pretokenization.as_str(),
        );
        for (i, (piece, lp)) in self.pieces.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("\n[{},{:.16e}]", q(piece), lp));
        }
        out.push_str("\n]}\n");
        out
    }

    pub fn from_json(json: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ModelFile {
            version: u32,
            #[serde(rename = "type")]
            kind: String,
            marker: String,
            unk_piece: String,
            training_pretokenization: Mode,
            pieces: Vec<(String, f64)>,
        }

        let file: ModelFile = serde_json::from_str(json).map_err(|e| Error::InvalidModel(e.to_string()))?;
        if file.version != MODEL_VERSION {
            return Err(Error::InvalidModel(format!("unsupported version {}", file.version)));
        }
        if file.kind != "unigram" {
            return Err(Error::InvalidModel(format!("unsupported model type {:?}", file.kind)));
        }
        let mut marker = file.marker.chars();
        let (Some(m), None) = (marker.next(), marker.next()) else {
            return Err(Error::InvalidModel("marker must be a single character".into()));
        };
        TokenizerModel::new(file.pieces, file.training_pretokenization, m, &file.unk_piece)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TokenizerModel::from_json(&json)
    }
}
