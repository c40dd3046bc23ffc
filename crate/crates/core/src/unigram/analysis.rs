//! Hard-compound classification, hardness rates, and token origins.

use std::collections::BTreeMap;

use log::warn;
use serde::Serialize;

use super::model::TokenizerModel;
use crate::align::align_fast;
use crate::text::{Boundaries, CompoundEntry};

/// A compound is hard when some constituent boundary is not a token boundary.
pub fn is_hard(word: &str, gold: &Boundaries, model: &TokenizerModel) -> bool {
    let (_, tokens, _) = model.encode_word(word);
    !gold.is_subset_of(tokens.indices())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LangHardness {
    pub compounds: usize,
    pub hard: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct HardnessReport {
    pub languages: BTreeMap<String, LangHardness>,
    pub macro_average: Option<f64>,
}

/// Per-word classification used by [`hardness_rate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardnessDetail {
    pub word: String,
    pub lang: String,
    pub boundaries: Vec<usize>,
    pub hard: bool,
}

/// Gold boundaries of compound entries via alignment; non-compounds and
/// unalignable entries are skipped.
pub fn gold_boundaries<'a>(entries: impl IntoIterator<Item = &'a CompoundEntry>) -> Vec<(&'a CompoundEntry, Boundaries)> {
    entries
        .into_iter()
        .filter(|e| e.is_compound())
        .filter_map(|e| match align_fast(e.word(), e.constituents()) {
            Ok(r) => Some((e, r.boundaries().clone())),
            Err(err) => {
                warn!("skipping {}: {err}", e.word());
                None
            }
        })
        .collect()
}

pub fn classify(entries: &[CompoundEntry], model: &TokenizerModel) -> Vec<HardnessDetail> {
    gold_boundaries(entries)
        .into_iter()
        .map(|(e, gold)| HardnessDetail {
            word: e.word().text().to_owned(),
            lang: e.word().lang().to_owned(),
            hard: is_hard(e.word().text(), &gold, model),
            boundaries: gold.into(),
        })
        .collect()
}

pub fn report_from_details(details: &[HardnessDetail]) -> HardnessReport {
    let mut languages: BTreeMap<String, LangHardness> = BTreeMap::new();
    for d in details {
        let l = languages.entry(d.lang.clone()).or_default();
        l.compounds += 1;
        l.hard += usize::from(d.hard);
    }
    for l in languages.values_mut() {
        l.percent = 100.0 * l.hard as f64 / l.compounds as f64;
    }
    let macro_average =
        (!languages.is_empty()).then(|| languages.values().map(|l| l.percent).sum::<f64>() / languages.len() as f64);
    HardnessReport { languages, macro_average }
}

/// Percentage of hard compounds per language, and their macro average.
pub fn hardness_rate(entries: &[CompoundEntry], model: &TokenizerModel) -> HardnessReport {
    report_from_details(&classify(entries, model))
}

/// For every piece of `multi`, the languages whose monolingual model also
/// contains it, most probable first.
pub fn token_origins(multi: &TokenizerModel, monos: &[(String, TokenizerModel)]) -> Vec<(String, Vec<String>)> {
    multi
        .pieces()
        .iter()
        .map(|(piece, _)| {
            let mut found: Vec<(&str, f64)> =
                monos.iter().filter_map(|(lang, m)| m.log_prob(piece).map(|lp| (lang.as_str(), lp))).collect();
            found.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            (piece.clone(), found.into_iter().map(|(l, _)| l.to_owned()).collect())
        })
        .collect()
}
