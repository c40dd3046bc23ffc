use std::collections::BTreeMap;
use std::io::Cursor;

use compoundkit::align::align_fast;
use compoundkit::dataset::{self, RawLexicon, SplitConfig};
use compoundkit::eval::{self, EvalMode, Predictions};
use compoundkit::io::EntryRecord;
use compoundkit::mine::{self, MineConfig};
use compoundkit::splitter::{FreqSegmenter, LookupSegmenter, Segmenter, SplitterConfig};
use compoundkit::unigram::{self, Mode, TrainerConfig};

const LEXICON: &str = "\
haustür\thaus,tür\tde
hausmeister\thaus,meister\tde
arbeitsmarkt\tarbeit,markt\tde
marktplatz\tmarkt,platz\tde
marktplatzbrunnen\tmarktplatz,brunnen\tde
haustürschlüssel\thaustür,schlüssel\tde
";

fn lexicon() -> RawLexicon {
    RawLexicon::read_tsv(Cursor::new(LEXICON), "lexicon.tsv").unwrap()
}

#[test]
fn lexicon_expands_and_derives_negatives() {
    let entries = dataset::build_entries(&lexicon(), dataset::DEFAULT_MAX_DEPTH).unwrap();
    let by_word: BTreeMap<&str, &[String]> = entries.iter().map(|e| (e.word().text(), e.constituents())).collect();
    assert_eq!(by_word["marktplatzbrunnen"], ["markt", "platz", "brunnen"]);
    assert_eq!(by_word["haustürschlüssel"], ["haus", "tür", "schlüssel"]);
    for leaf in ["haus", "tür", "markt", "brunnen", "schlüssel"] {
        assert_eq!(by_word[leaf], [leaf], "{leaf}");
    }
    assert!(entries.iter().filter(|e| !e.is_compound()).all(|e| !LEXICON.contains(&format!("\n{}\t", e.word().text()))));

    // Every expanded positive aligns onto its word at zero cost except
    // where a linking morpheme sits between constituents.
    for e in entries.iter().filter(|e| e.is_compound()) {
        let r = align_fast(e.word(), e.constituents()).unwrap();
        let expected = usize::from(e.word().text() == "arbeitsmarkt");
        assert_eq!(r.total_cost(), expected, "{}", e.word().text());
    }
}

#[test]
fn small_languages_vanish_from_splits() {
    let entries = dataset::build_entries(&lexicon(), dataset::DEFAULT_MAX_DEPTH).unwrap();
    let split = dataset::make_splits(&entries, &SplitConfig::default());
    assert!(split.train.is_empty() && split.eval.is_empty());
    let split = dataset::make_splits(&entries, &SplitConfig { min_lang_size: 1, ..SplitConfig::default() });
    assert_eq!(split.eval.len(), entries.len() / 2);
    assert_eq!(split.train.len() + split.eval.len(), entries.len());
}

#[test]
fn written_splits_recount_to_stats() {
    let entries = dataset::build_entries(&lexicon(), dataset::DEFAULT_MAX_DEPTH).unwrap();
    let split = dataset::make_splits(&entries, &SplitConfig { min_lang_size: 1, seed: 3, ..SplitConfig::default() });
    let dir = tempfile::tempdir().unwrap();
    dataset::write_split(&split, dir.path()).unwrap();
    let train: Vec<EntryRecord> = compoundkit::io::read_jsonl(&dir.path().join("train.jsonl")).unwrap();
    let eval: Vec<EntryRecord> = compoundkit::io::read_jsonl(&dir.path().join("eval.jsonl")).unwrap();
    let positives = |rs: &[EntryRecord]| rs.iter().filter(|r| r.constituents.len() > 1).count();
    let stats = std::fs::read_to_string(dir.path().join("stats.tsv")).unwrap();
    let row: Vec<usize> = stats.lines().nth(1).unwrap().split('\t').skip(1).map(|c| c.parse().unwrap()).collect();
    assert_eq!(
        row,
        [positives(&train), train.len() - positives(&train), positives(&eval), eval.len() - positives(&eval)]
    );
}

#[test]
fn freq_splitter_predictions_score_against_gold() {
    let corpus = "das haus hat eine tür . der meister kam zum markt . \
                  arbeit am markt , arbeit im haus . die tür , das haus , der markt .";
    let table = mine::count_words(Cursor::new(corpus), "de").unwrap().table;
    let segmenter = FreqSegmenter::new(table.clone(), SplitterConfig::default()).unwrap();
    let gold = dataset::build_entries(&lexicon(), dataset::DEFAULT_MAX_DEPTH).unwrap();
    let records: Vec<EntryRecord> = gold
        .iter()
        .map(|e| EntryRecord {
            word: e.word().text().into(),
            lang: "de".into(),
            constituents: segmenter.split(e.word().text()).constituents,
        })
        .collect();
    let preds = Predictions::from_records(&records).unwrap();
    let report = eval::score(&gold, &preds, EvalMode::Normalization);
    let de = &report.languages["de"];
    // haustür, hausmeister and arbeitsmarkt split correctly; the rest
    // need constituents missing from the corpus
    assert_eq!(de.positives.correct, 3, "{records:?}");
    assert_eq!(de.negatives.correct, de.negatives.total);
    assert!(mine::mine_pairs(&table, &MineConfig::default()).is_ok());
}

#[test]
fn gold_segmenter_drives_compound_training() {
    let gold = dataset::build_entries(&lexicon(), dataset::DEFAULT_MAX_DEPTH).unwrap();
    let segmenter = LookupSegmenter::from_entries(&gold);
    assert_eq!(segmenter.segment("marktplatzbrunnen").unwrap().indices(), [0, 5, 10, 17]);
    let lines: Vec<String> = (0..30).map(|i| ["haustür marktplatzbrunnen", "arbeitsmarkt haus", "hausmeister"][i % 3].into()).collect();
    let config = TrainerConfig { vocab_size: 40, mode: Mode::Compound, ..TrainerConfig::default() };
    let model = unigram::train_unigram(&lines, &config, Some(&segmenter)).unwrap();
    assert_eq!(model.training_pretokenization(), Mode::Compound);
    let report = unigram::hardness_rate(&gold, &model);
    assert_eq!(report.macro_average, Some(0.0), "{:?}", model.pieces());
}
