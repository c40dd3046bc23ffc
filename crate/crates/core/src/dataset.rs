//! Decompounding dataset construction from a compound lexicon.
//!
//! The lexicon lists only top-level splits (`highwayman → highway + man`).
//! Constituents that are themselves lexicon entries are expanded
//! recursively, every constituent becomes a negative example, and each
//! language is split into train and eval portions.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::{self, EntryRecord};
use crate::text::{nfc, CompoundEntry, Word};

pub const DEFAULT_MAX_DEPTH: usize = 16;

/// Top-level constituents per language and word.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawLexicon {
    langs: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

impl RawLexicon {
    /// Insert unless the word is already present; returns whether it was new.
    pub fn insert(&mut self, lang: &str, word: &str, constituents: Vec<String>) -> bool {
        let words = self.langs.entry(lang.to_owned()).or_default();
        if words.contains_key(word) {
            return false;
        }
        words.insert(word.to_owned(), constituents);
        true
    }

    pub fn lang(&self, lang: &str) -> Option<&BTreeMap<String, Vec<String>>> {
        self.langs.get(lang)
    }

    pub fn langs(&self) -> impl Iterator<Item = (&str, &BTreeMap<String, Vec<String>>)> {
        self.langs.iter().map(|(l, m)| (l.as_str(), m))
    }

    /// Parse `word<TAB>constituent,constituent<TAB>lang` rows. Repeated words
    /// keep their first row; conflicting repeats are logged.
    pub fn read_tsv(reader: impl BufRead, name: &str) -> Result<Self> {
        let mut lex = RawLexicon::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::data(name, i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [word, constituents, lang] = cols[..] else {
                return Err(Error::data(name, i + 1, "expected word<TAB>constituents<TAB>lang"));
            };
            let constituents: Vec<String> = constituents.split(',').map(|c| nfc(c.trim())).collect();
            if constituents.len() < 2 || constituents.iter().any(String::is_empty) {
                return Err(Error::data(name, i + 1, "a compound needs at least two non-empty constituents"));
            }
            let word = nfc(word.trim());
            let lang = lang.trim();
            if let Some(existing) = lex.lang(lang).and_then(|m| m.get(&word)) {
                if *existing != constituents {
                    warn!("{name}:{}: {word} ({lang}) already listed as {existing:?}, ignoring {constituents:?}", i + 1);
                }
                continue;
            }
            lex.insert(lang, &word, constituents);
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        RawLexicon::read_tsv(io::open(path)?, &path.display().to_string())
    }
}

/// Expand `word` until no constituent is itself a lexicon key. A constituent
/// equal to the word it came from is left alone.
pub fn recursive_split(lexicon: &BTreeMap<String, Vec<String>>, word: &str, max_depth: usize) -> Result<Vec<String>> {
    fn expand(
        lexicon: &BTreeMap<String, Vec<String>>,
        word: &str,
        depth: usize,
        max_depth: usize,
        out: &mut Vec<String>,
    ) -> Result<()> {
        if depth > max_depth {
            return Err(Error::CyclicEntry { word: word.to_owned(), depth: max_depth });
        }
        for c in &lexicon[word] {
            if c != word && lexicon.contains_key(c) {
                expand(lexicon, c, depth + 1, max_depth, out)?;
            } else {
                out.push(c.clone());
            }
        }
        Ok(())
    }

    if !lexicon.contains_key(word) {
        return Err(Error::UnknownWord(word.to_owned()));
    }
    let mut out = Vec::new();
    expand(lexicon, word, 0, max_depth, &mut out).map_err(|e| match e {
        Error::CyclicEntry { depth, .. } => Error::CyclicEntry { word: word.to_owned(), depth },
        other => other,
    })?;
    Ok(out)
}

/// Every language's words mapped to fully expanded constituents.
pub fn expand_lexicon(lexicon: &RawLexicon, max_depth: usize) -> Result<BTreeMap<String, BTreeMap<String, Vec<String>>>> {
    lexicon
        .langs()
        .map(|(lang, words)| {
            let expanded = words
                .keys()
                .map(|w| Ok((w.clone(), recursive_split(words, w, max_depth)?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            Ok((lang.to_owned(), expanded))
        })
        .collect()
}

/// All constituents as non-compound entries, excluding compound keys.
pub fn derive_negatives(expanded: &BTreeMap<String, Vec<String>>, lang: &str) -> Vec<CompoundEntry> {
    let forms: BTreeSet<&String> = expanded.values().flatten().filter(|c| !expanded.contains_key(*c)).collect();
    forms
        .into_iter()
        .filter_map(|form| match Word::new(form, lang) {
            Ok(w) => Some(CompoundEntry::non_compound(w)),
            Err(e) => {
                warn!("skipping negative {form:?}: {e}");
                None
            }
        })
        .collect()
}

/// Positives and negatives for every language of the lexicon.
pub fn build_entries(lexicon: &RawLexicon, max_depth: usize) -> Result<Vec<CompoundEntry>> {
    let expanded = expand_lexicon(lexicon, max_depth)?;
    let mut entries = Vec::new();
    for (lang, words) in &expanded {
        for (word, constituents) in words {
            match Word::new(word, lang).and_then(|w| CompoundEntry::new(w, constituents.clone())) {
                Ok(e) => entries.push(e),
                Err(e) => warn!("skipping compound {word:?}: {e}"),
            }
        }
        entries.extend(derive_negatives(words, lang));
    }
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitConfig {
    pub seed: u64,
    pub min_lang_size: usize,
    pub eval_cap: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { seed: 0, min_lang_size: 100, eval_cap: 1000 }
    }
}

/// Eval size for a language of `total` entries.
pub fn eval_size(total: usize, eval_cap: usize) -> usize {
    eval_cap.min(total / 2)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<CompoundEntry>,
    pub eval: Vec<CompoundEntry>,
}

fn lang_seed(seed: u64, lang: &str) -> u64 {
    // FNV-1a so a language's shuffle does not depend on which others exist
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in lang.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

pub fn make_splits(entries: &[CompoundEntry], config: &SplitConfig) -> DatasetSplit {
    let mut by_lang: BTreeMap<&str, Vec<&CompoundEntry>> = BTreeMap::new();
    for e in entries {
        by_lang.entry(e.word().lang()).or_default().push(e);
    }
    let mut split = DatasetSplit::default();
    for (lang, mut group) in by_lang {
        if group.len() < config.min_lang_size {
            warn!("dropping {lang}: {} entries < {}", group.len(), config.min_lang_size);
            continue;
        }
        group.sort_by(|a, b| a.word().text().cmp(b.word().text()).then_with(|| a.constituents().cmp(b.constituents())));
        group.shuffle(&mut ChaCha8Rng::seed_from_u64(lang_seed(config.seed, lang)));
        let n_eval = eval_size(group.len(), config.eval_cap);
        split.eval.extend(group[..n_eval].iter().map(|e| (*e).clone()));
        split.train.extend(group[n_eval..].iter().map(|e| (*e).clone()));
    }
    split
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LangStats {
    pub train_positive: usize,
    pub train_negative: usize,
    pub eval_positive: usize,
    pub eval_negative: usize,
}

impl LangStats {
    pub fn positive(&self) -> usize {
        self.train_positive + self.eval_positive
    }

    pub fn negative(&self) -> usize {
        self.train_negative + self.eval_negative
    }

    pub fn total(&self) -> usize {
        self.positive() + self.negative()
    }
}

pub fn dataset_stats(split: &DatasetSplit) -> BTreeMap<String, LangStats> {
    let mut stats: BTreeMap<String, LangStats> = BTreeMap::new();
    for (entries, is_eval) in [(&split.train, false), (&split.eval, true)] {
        for e in entries {
            let s = stats.entry(e.word().lang().to_owned()).or_default();
            match (is_eval, e.is_compound()) {
                (false, true) => s.train_positive += 1,
                (false, false) => s.train_negative += 1,
                (true, true) => s.eval_positive += 1,
                (true, false) => s.eval_negative += 1,
            }
        }
    }
    stats
}

/// Write `train.jsonl`, `eval.jsonl` and `stats.tsv` into `dir`.
pub fn write_split(split: &DatasetSplit, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, entries) in [("train.jsonl", &split.train), ("eval.jsonl", &split.eval)] {
        let records: Vec<EntryRecord> = entries.iter().map(EntryRecord::from).collect();
        io::write_jsonl(&dir.join(name), &records)?;
    }
    let path = dir.join("stats.tsv");
    let mut tsv = String::from("lang\ttrain_positive\ttrain_negative\teval_positive\teval_negative\n");
    for (lang, s) in dataset_stats(split) {
        tsv.push_str(&format!(
            "{lang}\t{}\t{}\t{}\t{}\n",
            s.train_positive, s.train_negative, s.eval_positive, s.eval_negative
        ));
    }
    std::fs::write(&path, tsv).map_err(|e| Error::io(&path, e))
}
