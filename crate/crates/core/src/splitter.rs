//! Frequency-based decompounding and the segmenter interface used by
//! compound-aware pretokenization.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::align::align_fast;
use crate::error::{Error, Result};
use crate::mine::FrequencyTable;
use crate::text::{char_len, Boundaries, CompoundEntry, Word};

/// Anything that can cut a word into constituent spans.
pub trait Segmenter: Send + Sync {
    fn segment(&self, word: &str) -> Result<Boundaries>;
}

impl<F> Segmenter for F
where
    F: Fn(&str) -> Result<Boundaries> + Send + Sync,
{
    fn segment(&self, word: &str) -> Result<Boundaries> {
        self(word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitterConfig {
    pub min_part_len: usize,
    pub linking_morphemes: Vec<String>,
    pub max_parts: usize,
}

impl Default for SplitterConfig {
    fn default() -> Self {
        SplitterConfig { min_part_len: 3, linking_morphemes: vec![String::new(), "s".into(), "es".into()], max_parts: 4 }
    }
}

impl SplitterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_part_len == 0 {
            return Err(Error::InvalidConfig("min_part_len must be at least 1".into()));
        }
        if !self.linking_morphemes.iter().any(String::is_empty) {
            return Err(Error::InvalidConfig("linking_morphemes must contain the empty morpheme".into()));
        }
        if self.max_parts == 0 {
            return Err(Error::InvalidConfig("max_parts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreqSplit {
    pub boundaries: Boundaries,
    pub constituents: Vec<String>,
    /// Mean log frequency of the parts (`-inf` for an unknown unsplit word).
    pub score: f64,
}

struct Part {
    end: usize,
    stem: String,
    freq: u64,
}

/// Frequency-based split maximizing the geometric mean of part
/// frequencies, with the unsplit word as a competing candidate.
pub fn freq_split(word: &str, table: &FrequencyTable, config: &SplitterConfig) -> FreqSplit {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let mut morphemes: Vec<Vec<char>> = config.linking_morphemes.iter().map(|m| m.chars().collect()).collect();
    morphemes.sort_by_key(Vec::len);
    morphemes.dedup();

    // admissible parts starting at each offset
    let min = config.min_part_len.max(1);
    let parts_from: Vec<Vec<Part>> = (0..n)
        .map(|start| {
            (start + min..=n)
                .filter_map(|end| {
                    let surface = &chars[start..end];
                    if end == n {
                        let stem: String = surface.iter().collect();
                        let freq = table.get(&stem);
                        return (freq > 0).then_some(Part { end, stem, freq });
                    }
                    let mut best: Option<Part> = None;
                    for m in &morphemes {
                        if surface.len() < m.len() + min || !surface.ends_with(m) {
                            continue;
                        }
                        let stem: String = surface[..surface.len() - m.len()].iter().collect();
                        let freq = table.get(&stem);
                        if freq > 0 && best.as_ref().is_none_or(|b| freq > b.freq) {
                            best = Some(Part { end, stem, freq });
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();

    let whole = table.get(word);
    let mut best = FreqSplit {
        boundaries: Boundaries::whole(n).expect("word is non-empty"),
        constituents: vec![word.to_owned()],
        score: if whole > 0 { (whole as f64).ln() } else { f64::NEG_INFINITY },
    };
    let mut stack: Vec<&Part> = Vec::new();
    search(0, n, config.max_parts, &parts_from, &mut stack, &mut best);
    best
}

fn search<'a>(
    at: usize,
    n: usize,
    max_parts: usize,
    parts_from: &'a [Vec<Part>],
    stack: &mut Vec<&'a Part>,
    best: &mut FreqSplit,
) {
    if at == n {
        if stack.len() >= 2 {
            offer(stack, best);
        }
        return;
    }
    if stack.len() == max_parts {
        return;
    }
    for part in &parts_from[at] {
        stack.push(part);
        search(part.end, n, max_parts, parts_from, stack, best);
        stack.pop();
    }
}

fn offer(stack: &[&Part], best: &mut FreqSplit) {
    let score = stack.iter().map(|p| (p.freq as f64).ln()).sum::<f64>() / stack.len() as f64;
    let bounds: Vec<usize> = std::iter::once(0).chain(stack.iter().map(|p| p.end)).collect();
    // equal products can differ in the last bits once logged and averaged
    let tie = score.is_finite()
        && best.score.is_finite()
        && (score - best.score).abs() <= 1e-12 * score.abs().max(1.0);
    let better = (!tie && score > best.score)
        || (tie
            && (stack.len() < best.constituents.len()
                || (stack.len() == best.constituents.len() && bounds.as_slice() < best.boundaries.indices())));
    if better {
        best.boundaries = Boundaries::new(bounds).expect("parts are non-empty");
        best.constituents = stack.iter().map(|p| p.stem.clone()).collect();
        best.score = score;
    }
}

/// [`freq_split`] as a [`Segmenter`].
#[derive(Debug, Clone)]
pub struct FreqSegmenter {
    table: FrequencyTable,
    config: SplitterConfig,
}

impl FreqSegmenter {
    pub fn new(table: FrequencyTable, config: SplitterConfig) -> Result<Self> {
        config.validate()?;
        Ok(FreqSegmenter { table, config })
    }

    pub fn split(&self, word: &str) -> FreqSplit {
        freq_split(word, &self.table, &self.config)
    }
}

impl Segmenter for FreqSegmenter {
    fn segment(&self, word: &str) -> Result<Boundaries> {
        Ok(self.split(word).boundaries)
    }
}

/// Boundaries for a word from predicted (or gold) normalized constituents.
pub fn segment_with_predictions<S: AsRef<str>>(word: &Word, constituents: &[S]) -> Result<Boundaries> {
    Ok(align_fast(word, constituents)?.boundaries().clone())
}

/// Segments known words by aligning their listed constituents; other
/// words are left whole.
#[derive(Debug, Clone, Default)]
pub struct LookupSegmenter {
    constituents: HashMap<String, Vec<String>>,
}

impl LookupSegmenter {
    /// The first entry for a word text wins.
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = &'a CompoundEntry>) -> Self {
        let mut constituents = HashMap::new();
        for e in entries {
            constituents.entry(e.word().text().to_owned()).or_insert_with(|| e.constituents().to_vec());
        }
        LookupSegmenter { constituents }
    }

    pub fn len(&self) -> usize {
        self.constituents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constituents.is_empty()
    }
}

impl Segmenter for LookupSegmenter {
    fn segment(&self, word: &str) -> Result<Boundaries> {
        match self.constituents.get(word) {
            Some(cs) => {
                let w = Word::und(word)?;
                segment_with_predictions(&w, cs).map_err(|e| Error::Segmenter { word: word.into(), reason: e.to_string() })
            }
            None => Boundaries::whole(char_len(word)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::align_bruteforce;
    use proptest::prelude::*;

    fn table(counts: &[(&str, u64)]) -> FrequencyTable {
        FrequencyTable::from_counts("en", counts.iter().map(|&(f, n)| (f, n)))
    }

    #[test]
    fn splits_sideexperiments() {
        let t = table(&[("side", 100), ("experiments", 50), ("sideexperiments", 1)]);
        let s = freq_split("sideexperiments", &t, &SplitterConfig::default());
        assert_eq!(s.boundaries.indices(), [0, 4, 15]);
        assert_eq!(s.constituents, ["side", "experiments"]);
        assert!((s.score.exp() - (100.0f64 * 50.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn leaves_simple_word() {
        let s = freq_split("maid", &table(&[("maid", 10)]), &SplitterConfig::default());
        assert_eq!(s.boundaries.indices(), [0, 4]);
        assert_eq!(s.constituents, ["maid"]);
    }

    #[test]
    fn removes_linking_morpheme() {
        let t = table(&[("arbeit", 80), ("markt", 60)]);
        let s = freq_split("arbeitsmarkt", &t, &SplitterConfig::default());
        assert_eq!(s.boundaries.indices(), [0, 7, 12]);
        assert_eq!(s.constituents, ["arbeit", "markt"]);
    }

    #[test]
    fn unknown_word_without_parts_stays_whole() {
        let s = freq_split("xyz", &table(&[("abc", 3)]), &SplitterConfig::default());
        assert_eq!(s.boundaries.indices(), [0, 3]);
        assert_eq!(s.score, f64::NEG_INFINITY);
    }

    #[test]
    fn respects_limits() {
        let t = table(&[("aaa", 10), ("bbb", 10), ("ccc", 10)]);
        let cfg = SplitterConfig { max_parts: 2, ..Default::default() };
        assert_eq!(freq_split("aaabbbccc", &t, &cfg).constituents, ["aaabbbccc"]);
        assert_eq!(freq_split("aaabbbccc", &t, &SplitterConfig::default()).constituents, ["aaa", "bbb", "ccc"]);
        let t = table(&[("ab", 10), ("cd", 10)]);
        assert_eq!(freq_split("abcd", &t, &SplitterConfig::default()).constituents, ["abcd"]);
    }

    #[test]
    fn ties_prefer_fewer_parts_then_smaller_boundaries() {
        // aaa|aaa and aaaa..: equal geometric means, fewer parts first
        let t = table(&[("aaa", 4), ("aaaaaa", 4)]);
        let cfg = SplitterConfig { min_part_len: 3, ..Default::default() };
        assert_eq!(freq_split("aaaaaaaaa", &t, &cfg).boundaries.indices(), [0, 3, 9]);
    }

    #[test]
    fn config_validation() {
        assert!(SplitterConfig::default().validate().is_ok());
        assert!(SplitterConfig { min_part_len: 0, ..Default::default() }.validate().is_err());
        assert!(SplitterConfig { linking_morphemes: vec!["s".into()], ..Default::default() }.validate().is_err());
        let parsed: SplitterConfig = serde_json::from_str(r#"{"min_part_len": 4}"#).unwrap();
        assert_eq!(parsed.max_parts, 4);
    }

    #[test]
    fn prediction_segmenter() {
        let w = Word::new("bridesmaid", "en").unwrap();
        assert_eq!(segment_with_predictions(&w, &["bride", "maid"]).unwrap().indices(), [0, 6, 10]);
        let w = Word::new("maid", "en").unwrap();
        assert_eq!(segment_with_predictions(&w, &["maid"]).unwrap().indices(), [0, 4]);

        let e = CompoundEntry::new(Word::new("swimsuit", "en").unwrap(), vec!["swim".into(), "suit".into()]).unwrap();
        let seg = LookupSegmenter::from_entries([&e]);
        assert_eq!(seg.segment("swimsuit").unwrap().indices(), [0, 4, 8]);
        assert_eq!(seg.segment("other").unwrap().indices(), [0, 5]);
    }

    proptest! {
        #[test]
        fn split_boundaries_are_valid(word in "[abc]{1,10}", counts in proptest::collection::vec(("[abc]{1,5}", 1u64..50), 0..12)) {
            let t = FrequencyTable::from_counts("en", counts);
            let cfg = SplitterConfig { min_part_len: 2, ..Default::default() };
            let s = freq_split(&word, &t, &cfg);
            let idx = s.boundaries.indices();
            prop_assert_eq!(*idx.last().unwrap(), word.chars().count());
            if idx.len() > 2 {
                prop_assert!(idx.windows(2).all(|w| w[1] - w[0] >= 2));
            }
            prop_assert_eq!(&freq_split(&word, &t, &cfg), &s);
        }

        #[test]
        fn more_counts_keep_split(
            head in "[ab]{2,5}",
            tail in "[ab]{2,5}",
            counts in proptest::collection::vec(("[ab]{2,8}", 1u64..50), 0..12),
            bump in 1u64..100,
        ) {
            let word = format!("{head}{tail}");
            let mut t = FrequencyTable::from_counts("en", counts);
            t.add(head, 5);
            t.add(tail, 5);
            let cfg = SplitterConfig { min_part_len: 2, ..Default::default() };
            let s = freq_split(&word, &t, &cfg);
            prop_assume!(s.constituents.len() >= 2);
            let mut bumped = t.clone();
            for c in &s.constituents {
                bumped.add(c.clone(), bump);
            }
            prop_assert!(freq_split(&word, &bumped, &cfg).constituents.len() >= 2);
        }

        #[test]
        fn predictions_match_bruteforce(word in "[abcd]{2,10}", cs in proptest::collection::vec("[abcd]{1,4}", 1..3)) {
            prop_assume!(word.chars().count() >= cs.len());
            let w = Word::new(&word, "en").unwrap();
            let b = segment_with_predictions(&w, &cs).unwrap();
            let brute = align_bruteforce(&w, &cs).unwrap();
            prop_assert_eq!(&b, brute.boundaries());
        }
    }
}
