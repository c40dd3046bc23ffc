//! Accuracy of decompounding predictions against gold entries.
//!
//! A gold positive counts as correct when the prediction matches under the
//! chosen mode; a gold negative is correct only when the prediction is the
//! word itself as a single constituent. Missing predictions count as wrong.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use log::warn;
use serde::Serialize;

use crate::align::align_fast;
use crate::error::{Error, Result};
use crate::io::EntryRecord;
use crate::text::{nfc, CompoundEntry};
use crate::unigram::{is_hard, TokenizerModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Segmentation,
    Normalization,
    GermanetHead,
}

impl std::str::FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "segmentation" => Ok(EvalMode::Segmentation),
            "normalization" => Ok(EvalMode::Normalization),
            "germanet-head" | "germanet_head" => Ok(EvalMode::GermanetHead),
            other => Err(Error::InvalidConfig(format!("unknown eval mode {other:?}"))),
        }
    }
}

/// Predicted constituents keyed by `(word, lang)`.
#[derive(Debug, Clone, Default)]
pub struct Predictions {
    map: HashMap<(String, String), Vec<String>>,
}

impl Predictions {
    pub fn from_records(records: &[EntryRecord]) -> Result<Self> {
        let mut map = HashMap::with_capacity(records.len());
        for r in records {
            let key = (nfc(&r.word), r.lang.clone());
            let constituents = r.constituents.iter().map(|c| nfc(c)).collect();
            if map.insert(key, constituents).is_some() {
                return Err(Error::DuplicatePrediction { word: r.word.clone(), lang: r.lang.clone() });
            }
        }
        Ok(Predictions { map })
    }

    pub fn get(&self, word: &str, lang: &str) -> Option<&[String]> {
        self.map.get(&(word.to_owned(), lang.to_owned())).map(Vec::as_slice)
    }
}

fn boundaries_of(entry: &CompoundEntry, constituents: &[String]) -> Option<Vec<usize>> {
    align_fast(entry.word(), constituents).ok().map(|r| r.boundaries().indices().to_vec())
}

/// Whether `pred` is a correct prediction for `gold` under `mode`.
pub fn is_correct(gold: &CompoundEntry, pred: &[String], mode: EvalMode) -> bool {
    if !gold.is_compound() {
        return pred.len() == 1 && pred[0] == gold.word().text();
    }
    let g = gold.constituents();
    match mode {
        EvalMode::Normalization => pred == g,
        EvalMode::Segmentation => match (boundaries_of(gold, g), boundaries_of(gold, pred)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        },
        EvalMode::GermanetHead => {
            !pred.is_empty() && (pred.first() == g.first() || pred.last() == g.last())
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Tally {
    pub total: usize,
    pub correct: usize,
}

impl Tally {
    fn add(&mut self, correct: bool) {
        self.total += 1;
        self.correct += usize::from(correct);
    }

    fn merged(self, other: Tally) -> Tally {
        Tally { total: self.total + other.total, correct: self.correct + other.correct }
    }

    /// Accuracy in percent; `None` when empty.
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| 100.0 * self.correct as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LangScore {
    pub positives: Tally,
    pub negatives: Tally,
    pub p: Option<f64>,
    pub n: Option<f64>,
    pub all: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub languages: BTreeMap<String, LangScore>,
    pub macro_p: Option<f64>,
    pub macro_n: Option<f64>,
    pub macro_all: Option<f64>,
    pub missing: usize,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn score(gold: &[CompoundEntry], predictions: &Predictions, mode: EvalMode) -> EvalReport {
    let mut languages: BTreeMap<String, LangScore> = BTreeMap::new();
    let mut missing = 0usize;
    for g in gold {
        let pred = predictions.get(g.word().text(), g.word().lang());
        if pred.is_none() {
            missing += 1;
        }
        let ok = pred.is_some_and(|p| is_correct(g, p, mode));
        let lang = languages.entry(g.word().lang().to_owned()).or_default();
        if g.is_compound() {
            lang.positives.add(ok);
        } else {
            lang.negatives.add(ok);
        }
    }
    if missing > 0 {
        warn!("{missing} gold entries have no prediction; counted as wrong");
    }
    for s in languages.values_mut() {
        s.p = s.positives.accuracy();
        s.n = s.negatives.accuracy();
        s.all = s.positives.merged(s.negatives).accuracy();
    }
    EvalReport {
        mode,
        macro_p: mean(languages.values().map(|s| s.p)),
        macro_n: mean(languages.values().map(|s| s.n)),
        macro_all: mean(languages.values().map(|s| s.all)),
        languages,
        missing,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_owned(), |x| format!("{x:.1}"))
}

impl EvalReport {
    /// Plain-text table: rows P / N / All, one column per language, macro
    /// average last.
    pub fn to_table(&self) -> String {
        let mut header = vec!["".to_owned()];
        header.extend(self.languages.keys().cloned());
        header.push("Avg.".into());
        let mut rows = vec![header];
        type Pick = fn(&LangScore) -> Option<f64>;
        let metrics: [(&str, Pick, Option<f64>); 3] =
            [("P", |s| s.p, self.macro_p), ("N", |s| s.n, self.macro_n), ("All", |s| s.all, self.macro_all)];
        for (name, pick, avg) in metrics {
            let mut row = vec![name.to_owned()];
            row.extend(self.languages.values().map(|s| cell(pick(s))));
            row.push(cell(avg));
            rows.push(row);
        }
        let widths: Vec<usize> =
            (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in rows {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, v)| if c == 0 { format!("{v:<w$}", w = widths[c]) } else { format!("{v:>w$}", w = widths[c]) })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Breakdown {
    pub easy: Tally,
    pub hard: Tally,
    pub negatives: Tally,
    pub all: Tally,
}

/// Positive accuracy split by whether the gold compound is hard for `model`.
pub fn hard_easy_breakdown(
    gold: &[CompoundEntry],
    predictions: &Predictions,
    model: &TokenizerModel,
    mode: EvalMode,
) -> Breakdown {
    let mut b = Breakdown::default();
    for g in gold {
        let ok = predictions.get(g.word().text(), g.word().lang()).is_some_and(|p| is_correct(g, p, mode));
        b.all.add(ok);
        if !g.is_compound() {
            b.negatives.add(ok);
            continue;
        }
        let hard = match align_fast(g.word(), g.constituents()) {
            Ok(r) => is_hard(g.word().text(), r.boundaries(), model),
            Err(e) => {
                warn!("cannot align gold {}: {e}", g.word());
                continue;
            }
        };
        if hard {
            b.hard.add(ok);
        } else {
            b.easy.add(ok);
        }
    }
    b
}
