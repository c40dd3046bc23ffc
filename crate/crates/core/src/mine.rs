//! Self-supervised hyphenation pairs mined from raw text.
//!
//! Words containing a hyphen become `(unhyphenated → hyphenated)` pairs.
//! Forms whose hyphenated spelling is rare relative to the plain spelling
//! (typically line-break hyphenation such as `experi-ments`) are discarded
//! by a frequency ratio test. An equal number of frequent non-hyphenated
//! words is added as identity pairs.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;

use crate::error::{Error, Result};
use crate::io;
use crate::text::nfc;

/// Default ratio threshold, `e^-6`.
pub fn default_threshold() -> f64 {
    (-6.0f64).exp()
}

/// Surface form counts for one language.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    lang: String,
    counts: HashMap<String, u64>,
}

impl FrequencyTable {
    pub fn new(lang: &str) -> Self {
        FrequencyTable { lang: lang.to_owned(), counts: HashMap::new() }
    }

    pub fn from_counts<S: Into<String>>(lang: &str, counts: impl IntoIterator<Item = (S, u64)>) -> Self {
        let mut table = FrequencyTable::new(lang);
        for (form, n) in counts {
            table.add(form.into(), n);
        }
        table
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn add(&mut self, form: String, n: u64) {
        if n > 0 && !form.is_empty() {
            *self.counts.entry(form).or_insert(0) += n;
        }
    }

    pub fn get(&self, form: &str) -> u64 {
        self.counts.get(form).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn merge(&mut self, other: FrequencyTable) {
        for (form, n) in other.counts {
            self.add(form, n);
        }
    }

    /// Entries by count descending, then form ascending.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(f, &n)| (f.as_str(), n)).collect();
        v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn write_tsv(&self, mut w: impl Write) -> std::io::Result<()> {
        for (form, n) in self.sorted() {
            writeln!(w, "{form}\t{n}")?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_tsv(io::create(path)?).map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(reader: impl BufRead, lang: &str, name: &str) -> Result<Self> {
        let mut table = FrequencyTable::new(lang);
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::data(name, i + 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let (form, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::data(name, i + 1, "expected form<TAB>count"))?;
            let count: u64 = count.parse().map_err(|_| Error::data(name, i + 1, format!("bad count {count:?}")))?;
            if count == 0 || form.is_empty() || form.chars().any(char::is_whitespace) {
                return Err(Error::data(name, i + 1, "counts must be positive and forms whitespace-free"));
            }
            table.add(nfc(form), count);
        }
        Ok(table)
    }

    pub fn load(path: &Path, lang: &str) -> Result<Self> {
        FrequencyTable::read_tsv(io::open(path)?, lang, &path.display().to_string())
    }
}

/// A line that was skipped because it was not valid UTF-8.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidLine {
    pub line: usize,
    pub byte_offset: u64,
}

#[derive(Debug, Clone)]
pub struct CountOutcome {
    pub table: FrequencyTable,
    pub invalid: Vec<InvalidLine>,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}

/// Strip leading and trailing punctuation, keeping interior hyphens.
pub fn clean_token(token: &str) -> &str {
    token.trim_matches(|c: char| !is_word_char(c))
}

/// Count whitespace-delimited tokens of a corpus, one document per line.
pub fn count_words(mut reader: impl BufRead, lang: &str) -> Result<CountOutcome> {
    let mut table = FrequencyTable::new(lang);
    let mut invalid = Vec::new();
    let mut buf = Vec::new();
    let mut offset = 0u64;
    let mut line_no = 0;
    loop {
        buf.clear();
        let read = reader.read_until(b'\n', &mut buf).map_err(|e| Error::io("<corpus>", e))?;
        if read == 0 {
            break;
        }
        line_no += 1;
        match std::str::from_utf8(&buf) {
            Ok(line) => {
                for token in nfc(line).split_whitespace() {
                    let token = clean_token(token);
                    if !token.is_empty() {
                        table.add(token.to_owned(), 1);
                    }
                }
            }
            Err(e) => {
                let byte_offset = offset + e.valid_up_to() as u64;
                warn!("line {line_no}: invalid UTF-8 at byte {byte_offset}, skipped");
                invalid.push(InvalidLine { line: line_no, byte_offset });
            }
        }
        offset += read as u64;
    }
    Ok(CountOutcome { table, invalid })
}

/// Count several corpus files in parallel and merge the results.
pub fn count_files(paths: &[PathBuf], lang: &str) -> Result<CountOutcome> {
    let per_file: Vec<CountOutcome> = paths
        .par_iter()
        .map(|p| {
            count_words(io::open(p)?, lang).map_err(|e| match e {
                Error::Io { source, .. } => Error::io(p, source),
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let mut total = CountOutcome { table: FrequencyTable::new(lang), invalid: Vec::new() };
    for outcome in per_file {
        total.table.merge(outcome.table);
        total.invalid.extend(outcome.invalid);
    }
    Ok(total)
}

/// Keep a hyphenated form unless it is rarer than `threshold` times its
/// plain spelling.
pub fn ratio_filter(freq_hyphenated: u64, freq_plain: u64, threshold: f64) -> bool {
    freq_plain == 0 || (freq_hyphenated as f64 / freq_plain as f64) > threshold
}

#[derive(Debug, Clone, PartialEq)]
pub struct MineConfig {
    /// `None` disables the ratio filter.
    pub threshold: Option<f64>,
    pub hyphens: Vec<char>,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig { threshold: Some(default_threshold()), hyphens: vec!['-'] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinedPair {
    pub input: String,
    pub target: String,
    pub lang: String,
    #[serde(rename = "hyphenated")]
    pub is_hyphenated: bool,
}

pub fn strip_hyphens(text: &str, hyphens: &[char]) -> String {
    text.chars().filter(|c| !hyphens.contains(c)).collect()
}

fn plain_shape(form: &str) -> bool {
    form.chars().all(|c| c.is_alphabetic() || is_combining_mark(c))
}

fn hyphenated_shape(form: &str, hyphens: &[char]) -> bool {
    let chars: Vec<char> = form.chars().collect();
    let is_h = |c: &char| hyphens.contains(c);
    chars.iter().any(is_h)
        && !chars.first().is_some_and(is_h)
        && !chars.last().is_some_and(is_h)
        && !chars.windows(2).any(|w| is_h(&w[0]) && is_h(&w[1]))
        && chars.iter().all(|c| is_h(c) || c.is_alphabetic() || is_combining_mark(*c))
}

/// Emit hyphenation pairs followed by the same number of identity pairs.
pub fn mine_pairs(table: &FrequencyTable, config: &MineConfig) -> Result<Vec<MinedPair>> {
    if table.is_empty() {
        return Err(Error::EmptyInput("frequency table"));
    }
    let hyphens = &config.hyphens;
    let sorted = table.sorted();
    let mut pairs = Vec::new();
    let mut discarded = 0usize;
    for &(form, n) in &sorted {
        if !hyphenated_shape(form, hyphens) {
            continue;
        }
        let input = strip_hyphens(form, hyphens);
        let keep = config.threshold.is_none_or(|t| ratio_filter(n, table.get(&input), t));
        if keep {
            pairs.push(MinedPair { input, target: form.to_owned(), lang: table.lang.clone(), is_hyphenated: true });
        } else {
            discarded += 1;
        }
    }
    let positives = pairs.len();
    let taken: HashSet<&str> = pairs.iter().map(|p| p.input.as_str()).collect();
    let negatives: Vec<MinedPair> = sorted
        .iter()
        .filter(|(form, _)| plain_shape(form) && !taken.contains(form))
        .take(positives)
        .map(|&(form, _)| MinedPair {
            input: form.to_owned(),
            target: form.to_owned(),
            lang: table.lang.clone(),
            is_hyphenated: false,
        })
        .collect();
    if negatives.len() < positives {
        warn!("only {} negatives available for {} positives", negatives.len(), positives);
    }
    info!("{}: {positives} positives, {} negatives, {discarded} discarded by ratio filter", table.lang, negatives.len());
    pairs.extend(negatives);
    Ok(pairs)
}
