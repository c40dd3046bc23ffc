//! Unigram LM training: seed vocabulary from frequent substrings, EM over
//! pretoken lattices, and likelihood-based pruning until the target size.

use std::collections::{BTreeSet, HashMap};

use log::debug;
use rayon::prelude::*;

use super::model::{Token, TokenizerModel, DEFAULT_UNK};
use super::pretokenize::{pretokenize, split_word, Mode, DEFAULT_MARKER};
use crate::error::{Error, Result};
use crate::splitter::Segmenter;
use crate::text::nfc;

/// Expected counts below this are dropped in the M-step (multi-char pieces only).
const EXPECTED_COUNT_FLOOR: f64 = 0.5;
/// Floor for single characters so every one keeps a finite probability.
const CHAR_COUNT_FLOOR: f64 = 1e-3;
/// Work is split into this many fixed chunks so float reductions run in a
/// fixed order regardless of thread count.
const CHUNKS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig {
    pub vocab_size: usize,
    pub mode: Mode,
    pub max_piece_len: usize,
    pub min_seed_count: u64,
    pub seed_factor: usize,
    pub shrink_ratio: f64,
    pub em_iterations: usize,
    pub marker: char,
    pub unk_piece: String,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            vocab_size: 8000,
            mode: Mode::Whitespace,
            max_piece_len: 16,
            min_seed_count: 2,
            seed_factor: 20,
            shrink_ratio: 0.75,
            em_iterations: 2,
            marker: DEFAULT_MARKER,
            unk_piece: DEFAULT_UNK.to_owned(),
        }
    }
}

/// Pretoken counts, sorted by text.
pub fn count_pretokens<S: AsRef<str>>(
    lines: impl IntoIterator<Item = S>,
    mode: Mode,
    marker: char,
    segmenter: Option<&dyn Segmenter>,
) -> Result<Vec<(String, u64)>> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    match mode {
        Mode::Whitespace => {
            for line in lines {
                for p in pretokenize(&nfc(line.as_ref()), mode, marker, None)? {
                    *counts.entry(p).or_insert(0) += 1;
                }
            }
        }
        Mode::Compound => {
            let segmenter = segmenter.ok_or(Error::MissingSegmenter)?;
            let mut words: HashMap<String, u64> = HashMap::new();
            for line in lines {
                for w in nfc(line.as_ref()).split_whitespace() {
                    *words.entry(w.to_owned()).or_insert(0) += 1;
                }
            }
            for (w, n) in words {
                for p in split_word(&w, marker, segmenter)? {
                    *counts.entry(p).or_insert(0) += n;
                }
            }
        }
    }
    let mut out: Vec<(String, u64)> = counts.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

struct Corpus {
    pretokens: Vec<(Vec<char>, u64)>,
}

impl Corpus {
    fn chunks(&self) -> std::slice::Chunks<'_, (Vec<char>, u64)> {
        let size = self.pretokens.len().div_ceil(CHUNKS).max(1);
        self.pretokens.chunks(size)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Expected piece counts by forward-backward, and the corpus log-likelihood.
fn e_step(model: &TokenizerModel, corpus: &Corpus) -> (Vec<f64>, f64) {
    let partial: Vec<(Vec<f64>, f64)> = corpus
        .chunks()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|chunk| {
            let mut expected = vec![0.0; model.len()];
            let mut loglik = 0.0;
            let mut edges: Vec<(usize, usize, usize)> = Vec::new();
            for (chars, freq) in chunk {
                let n = chars.len();
                edges.clear();
                for start in 0..n {
                    model.matches(chars, start, |end, id| edges.push((start, end, id)));
                }
                let lp = |id: usize| model.pieces()[id].1;
                let mut alpha = vec![f64::NEG_INFINITY; n + 1];
                alpha[0] = 0.0;
                // edges are ordered by start
                for &(s, e, id) in &edges {
                    alpha[e] = log_add(alpha[e], alpha[s] + lp(id));
                }
                let mut beta = vec![f64::NEG_INFINITY; n + 1];
                beta[n] = 0.0;
                for &(s, e, id) in edges.iter().rev() {
                    beta[s] = log_add(beta[s], beta[e] + lp(id));
                }
                let z = alpha[n];
                if z == f64::NEG_INFINITY {
                    continue;
                }
                let f = *freq as f64;
                loglik += f * z;
                for &(s, e, id) in &edges {
                    let post = (alpha[s] + lp(id) + beta[e] - z).exp();
                    expected[id] += f * post;
                }
            }
            (expected, loglik)
        })
        .collect();

    let mut expected = vec![0.0; model.len()];
    let mut loglik = 0.0;
    for (part, ll) in partial {
        for (acc, x) in expected.iter_mut().zip(part) {
            *acc += x;
        }
        loglik += ll;
    }
    (expected, loglik)
}

fn is_single_char(piece: &str) -> bool {
    let mut it = piece.chars();
    it.next().is_some() && it.next().is_none()
}

/// Maximum-likelihood re-estimate from expected counts.
fn m_step(model: &TokenizerModel, expected: &[f64], config: &TrainerConfig) -> Result<TokenizerModel> {
    let mut kept: Vec<(String, f64)> = Vec::with_capacity(model.len());
    for ((piece, _), &count) in model.pieces().iter().zip(expected) {
        if is_single_char(piece) {
            kept.push((piece.clone(), count.max(CHAR_COUNT_FLOOR)));
        } else if count >= EXPECTED_COUNT_FLOOR {
            kept.push((piece.clone(), count));
        }
    }
    normalized(kept, config)
}

/// Build a model from positive weights, normalizing to log-probabilities.
fn normalized(weights: Vec<(String, f64)>, config: &TrainerConfig) -> Result<TokenizerModel> {
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    let log_total = total.ln();
    let pieces = weights.into_iter().map(|(p, w)| (p, w.ln() - log_total)).collect();
    TokenizerModel::new(pieces, config.mode, config.marker, &config.unk_piece)
}

/// Re-normalize existing log-probabilities after pieces were removed.
fn renormalized(pieces: Vec<(String, f64)>, config: &TrainerConfig) -> Result<TokenizerModel> {
    let log_total = pieces.iter().fold(f64::NEG_INFINITY, |acc, (_, lp)| log_add(acc, *lp));
    let pieces = pieces.into_iter().map(|(p, lp)| (p, lp - log_total)).collect();
    TokenizerModel::new(pieces, config.mode, config.marker, &config.unk_piece)
}

/// Drop the pieces whose removal costs the least likelihood.
fn prune(model: &TokenizerModel, corpus: &Corpus, config: &TrainerConfig) -> Result<TokenizerModel> {
    let n_pieces = model.len();

    // Viterbi usage counts and, per piece, the weight of pretokens using it
    let partial: Vec<(Vec<f64>, Vec<f64>, f64)> = corpus
        .chunks()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|chunk| {
            let mut freq = vec![0.0; n_pieces];
            let mut reach = vec![0.0; n_pieces];
            let mut vsum = 0.0;
            for (chars, f) in chunk {
                let f = *f as f64;
                vsum += f;
                let (path, _) = model.viterbi(chars, None);
                for tok in path {
                    if let Token::Piece(id) = tok {
                        freq[id] += f;
                        reach[id] += f;
                    }
                }
            }
            (freq, reach, vsum)
        })
        .collect();
    let mut freq = vec![0.0; n_pieces];
    let mut reach = vec![0.0; n_pieces];
    let mut vsum = 0.0;
    for (f, r, v) in partial {
        for i in 0..n_pieces {
            freq[i] += f[i];
            reach[i] += r[i];
        }
        vsum += v;
    }

    // best segmentation of each piece without the piece itself
    let alternatives: Vec<Vec<usize>> = (0..n_pieces)
        .into_par_iter()
        .map(|id| {
            let piece = &model.pieces()[id].0;
            if is_single_char(piece) {
                return Vec::new();
            }
            let chars: Vec<char> = piece.chars().collect();
            let (path, _) = model.viterbi(&chars, Some(id));
            path.into_iter()
                .filter_map(|t| match t {
                    Token::Piece(a) => Some(a),
                    Token::Unk => None,
                })
                .collect()
        })
        .collect();

    let sum: f64 = freq.iter().sum();
    let log_sum = sum.ln();
    let mut always: Vec<(String, f64)> = Vec::new();
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    for (id, (piece, lp)) in model.pieces().iter().enumerate() {
        if is_single_char(piece) {
            always.push((piece.clone(), *lp));
            continue;
        }
        if freq[id] == 0.0 {
            // unused by any Viterbi path
            continue;
        }
        let alt = &alternatives[id];
        let share = reach[id] / vsum;
        let logprob_piece = freq[id].ln() - log_sum;
        let log_sum_alt = (sum + freq[id] * (alt.len() as f64 - 1.0)).ln();
        let logprob_alt: f64 = alt.iter().map(|&a| (freq[a] + freq[id]).ln() - log_sum_alt).sum();
        candidates.push((id, share * (logprob_piece - logprob_alt)));
    }
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let target = config.vocab_size.max((n_pieces as f64 * config.shrink_ratio) as usize);
    let room = target.saturating_sub(always.len());
    let mut pieces = always;
    pieces.extend(candidates.into_iter().take(room).map(|(id, _)| model.pieces()[id].clone()));
    renormalized(pieces, config)
}

fn seed_model(corpus: &Corpus, alphabet: &BTreeSet<char>, config: &TrainerConfig) -> Result<TokenizerModel> {
    let mut chars: HashMap<char, u64> = HashMap::new();
    let mut substrings: HashMap<&[char], u64> = HashMap::new();
    for (text, f) in &corpus.pretokens {
        for (i, c) in text.iter().enumerate() {
            *chars.entry(*c).or_insert(0) += f;
            let longest = config.max_piece_len.min(text.len() - i);
            for len in 2..=longest {
                *substrings.entry(&text[i..i + len]).or_insert(0) += f;
            }
        }
    }
    let mut ranked: Vec<(String, u64)> = substrings
        .into_iter()
        .filter(|(_, n)| *n >= config.min_seed_count)
        .map(|(s, n)| (s.iter().collect::<String>(), n * s.len() as u64))
        .collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(config.seed_factor.saturating_mul(config.vocab_size));

    let mut weights: Vec<(String, f64)> = alphabet.iter().map(|c| (c.to_string(), chars[c] as f64)).collect();
    weights.extend(ranked.into_iter().map(|(s, score)| (s, score as f64)));
    debug!("seed vocabulary: {} pieces ({} characters)", weights.len(), alphabet.len());
    normalized(weights, config)
}

/// Train from pretoken counts (see [`count_pretokens`]).
pub fn train_from_counts(pretokens: &[(String, u64)], config: &TrainerConfig) -> Result<TokenizerModel> {
    if pretokens.is_empty() {
        return Err(Error::EmptyInput("training corpus"));
    }
    if !(0.0..1.0).contains(&config.shrink_ratio) || config.max_piece_len == 0 {
        return Err(Error::InvalidConfig("shrink_ratio must be in [0, 1) and max_piece_len positive".into()));
    }
    let corpus = Corpus { pretokens: pretokens.iter().map(|(p, n)| (p.chars().collect(), *n)).collect() };
    let alphabet: BTreeSet<char> = corpus.pretokens.iter().flat_map(|(p, _)| p.iter().copied()).collect();
    if config.vocab_size < alphabet.len() {
        return Err(Error::VocabTooSmall { vocab_size: config.vocab_size, alphabet: alphabet.len() });
    }

    let mut model = seed_model(&corpus, &alphabet, config)?;
    loop {
        for _ in 0..config.em_iterations.max(1) {
            let (expected, loglik) = e_step(&model, &corpus);
            model = m_step(&model, &expected, config)?;
            debug!("EM: {} pieces, log-likelihood {loglik:.3}", model.len());
        }
        if model.len() <= config.vocab_size {
            break;
        }
        model = prune(&model, &corpus, config)?;
    }
    Ok(model)
}

/// Pretokenize `lines` per `config.mode` and train.
pub fn train_unigram<S: AsRef<str>>(
    lines: impl IntoIterator<Item = S>,
    config: &TrainerConfig,
    segmenter: Option<&dyn Segmenter>,
) -> Result<TokenizerModel> {
    let counts = count_pretokens(lines, config.mode, config.marker, segmenter)?;
    train_from_counts(&counts, config)
}
