use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use compoundkit::align::Aligner;
use compoundkit::dataset::{self, RawLexicon, SplitConfig};
use compoundkit::eval::{self, EvalMode, Predictions};
use compoundkit::io::{self, AlignedRecord, EntryRecord};
use compoundkit::mine::{self, FrequencyTable, MineConfig};
use compoundkit::splitter::{FreqSegmenter, LookupSegmenter, Segmenter, SplitterConfig};
use compoundkit::unigram::{self, Mode, TokenizerModel, TrainerConfig};
use compoundkit::{CompoundEntry, Error, Word};
use serde::{Deserialize, Serialize};

use crate::{
    AlignArgs, BuildDatasetArgs, Command, EncodeArgs, EvalArgs, HardnessArgs, MineArgs, SplitPredictArgs,
    TokenOriginsArgs, TrainTokenizerArgs,
};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Mine(a) => mine(a),
        Command::BuildDataset(a) => build_dataset(a),
        Command::Align(a) => align(a),
        Command::SplitPredict(a) => split_predict(a),
        Command::TrainTokenizer(a) => train_tokenizer(a),
        Command::Encode(a) => encode(a),
        Command::Hardness(a) => hardness(a),
        Command::TokenOrigins(a) => token_origins(a),
        Command::Eval(a) => evaluate(a),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn pretty(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn check_lang(lang: &str) -> Result<()> {
    Word::new("x", lang).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(())
}

fn mine(a: MineArgs) -> Result<()> {
    if a.no_ratio_filter && a.threshold.is_some() {
        return Err(Error::InvalidConfig("--threshold conflicts with --no-ratio-filter".into()).into());
    }
    check_lang(&a.lang)?;
    let outcome = mine::count_files(&a.corpus, &a.lang)?;
    for bad in &outcome.invalid {
        log::warn!("skipped invalid UTF-8 line {} at byte {}", bad.line, bad.byte_offset);
    }
    if let Some(path) = &a.freq_out {
        outcome.table.save(path)?;
    }
    let config = MineConfig {
        threshold: if a.no_ratio_filter { None } else { Some(a.threshold.unwrap_or_else(mine::default_threshold)) },
        ..MineConfig::default()
    };
    let pairs = mine::mine_pairs(&outcome.table, &config)?;
    log::info!("{} pairs from {} distinct forms", pairs.len(), outcome.table.len());
    io::write_jsonl(&a.out, &pairs)?;
    Ok(())
}

fn build_dataset(a: BuildDatasetArgs) -> Result<()> {
    let lexicon = RawLexicon::load(&a.lexicon)?;
    let entries = dataset::build_entries(&lexicon, a.max_depth)?;
    let config = SplitConfig { seed: a.seed, min_lang_size: a.min_lang_size, eval_cap: a.eval_cap };
    let split = dataset::make_splits(&entries, &config);
    log::info!("{} train / {} eval entries", split.train.len(), split.eval.len());
    dataset::write_split(&split, &a.out_dir)?;
    Ok(())
}

fn align(a: AlignArgs) -> Result<()> {
    let name = a.input.display().to_string();
    let records: Vec<EntryRecord> = io::read_jsonl(&a.input)?;
    let aligner = Aligner::new(a.max_candidates);
    let mut out = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let line = i + 1;
        let entry = r.to_entry().map_err(|e| Error::data(&name, line, e.to_string()))?;
        let result = if a.bruteforce {
            aligner.bruteforce(entry.word(), entry.constituents())
        } else {
            aligner.fast(entry.word(), entry.constituents())
        }
        .map_err(|e| Error::data(&name, line, e.to_string()))?;
        out.push(AlignedRecord::new(&entry, &result));
    }
    io::write_jsonl(&a.out, &out)?;
    Ok(())
}

/// Input rows for `split-predict`; any gold constituents are ignored.
#[derive(Deserialize)]
struct WordRecord {
    word: String,
    lang: String,
}

fn load_splitter_config(path: Option<&Path>) -> Result<SplitterConfig> {
    let config: SplitterConfig = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?
        }
        None => SplitterConfig::default(),
    };
    config.validate()?;
    log::info!("splitter config: {}", serde_json::to_string(&config)?);
    Ok(config)
}

fn split_predict(a: SplitPredictArgs) -> Result<()> {
    let config = load_splitter_config(a.config.as_deref())?;
    let table = FrequencyTable::load(&a.freq_table, "und")?;
    let segmenter = FreqSegmenter::new(table, config)?;
    let name = a.input.display().to_string();
    let rows: Vec<WordRecord> = io::read_jsonl(&a.input)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let word = Word::new(&r.word, &r.lang).map_err(|e| Error::data(&name, i + 1, e.to_string()))?;
        let split = segmenter.split(word.text());
        out.push(EntryRecord { word: word.text().to_owned(), lang: r.lang.clone(), constituents: split.constituents });
    }
    io::write_jsonl(&a.out, &out)?;
    Ok(())
}

fn parse_lang_path(spec: &str) -> Result<(String, PathBuf)> {
    match spec.split_once('=') {
        Some((lang, path)) => {
            check_lang(lang)?;
            Ok((lang.to_owned(), PathBuf::from(path)))
        }
        None => Ok(("und".to_owned(), PathBuf::from(spec))),
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let reader = io::open(path)?;
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::data(path.display(), i + 1, e.to_string()))?;
        lines.push(line);
    }
    Ok(lines)
}

fn build_segmenter(a: &TrainTokenizerArgs) -> Result<Option<Box<dyn Segmenter>>> {
    let Some(spec) = a.segmenter.as_deref() else {
        return Ok(None);
    };
    let seg: Box<dyn Segmenter> = match spec {
        "gold" => {
            let path = a.gold.as_deref().ok_or_else(|| Error::InvalidConfig("--segmenter gold needs --gold".into()))?;
            Box::new(LookupSegmenter::from_entries(&io::read_entries(path)?))
        }
        "freq" => {
            let path = a
                .freq_table
                .as_deref()
                .ok_or_else(|| Error::InvalidConfig("--segmenter freq needs --freq-table".into()))?;
            let config = load_splitter_config(a.splitter_config.as_deref())?;
            Box::new(FreqSegmenter::new(FrequencyTable::load(path, "und")?, config)?)
        }
        other => match other.strip_prefix("predictions:") {
            Some(path) => Box::new(LookupSegmenter::from_entries(&io::read_entries(Path::new(path))?)),
            None => return Err(Error::InvalidConfig(format!("unknown segmenter {other:?}")).into()),
        },
    };
    Ok(Some(seg))
}

fn train_tokenizer(a: TrainTokenizerArgs) -> Result<()> {
    let mode: Mode = a.mode.parse()?;
    let segmenter = build_segmenter(&a)?;
    if mode == Mode::Compound && segmenter.is_none() {
        return Err(Error::MissingSegmenter.into());
    }
    let mut corpora: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for spec in &a.corpus {
        let (lang, path) = parse_lang_path(spec)?;
        corpora.entry(lang).or_default().extend(read_lines(&path)?);
    }
    let corpora: Vec<Vec<String>> = corpora.into_values().collect();
    let lines: Vec<&str> = match a.samples {
        Some(n) => unigram::sample_corpus(&corpora, a.alpha, n, a.seed)?,
        None => corpora.iter().flatten().map(String::as_str).collect(),
    };
    let config = TrainerConfig { vocab_size: a.vocab_size, mode, ..TrainerConfig::default() };
    let model = unigram::train_unigram(&lines, &config, segmenter.as_deref())?;
    log::info!("trained {} pieces on {} lines", model.len(), lines.len());
    model.save(&a.out)?;
    Ok(())
}

fn encode(a: EncodeArgs) -> Result<()> {
    let model = TokenizerModel::load(&a.model)?;
    let input: Box<dyn BufRead> = match &a.input {
        Some(p) => Box::new(io::open(p)?),
        None => Box::new(std::io::stdin().lock()),
    };
    let mut out = String::new();
    for line in input.lines() {
        let line = line.context("reading input")?;
        out.push_str(&model.encode(&line).pieces.join(" "));
        out.push('\n');
    }
    match &a.out {
        Some(p) => write_file(p, &out)?,
        None => std::io::stdout().lock().write_all(out.as_bytes())?,
    }
    Ok(())
}

fn hardness(a: HardnessArgs) -> Result<()> {
    let model = TokenizerModel::load(&a.model)?;
    let gold = io::read_entries(&a.gold)?;
    let details = unigram::classify(&gold, &model);
    let report = unigram::report_from_details(&details);
    if let Some(p) = &a.details {
        io::write_jsonl(p, &details)?;
    }
    let json = pretty(&report)?;
    match &a.out {
        Some(p) => write_file(p, &json)?,
        None => std::io::stdout().lock().write_all(json.as_bytes())?,
    }
    Ok(())
}

fn token_origins(a: TokenOriginsArgs) -> Result<()> {
    let multi = TokenizerModel::load(&a.multi)?;
    let mut monos = Vec::with_capacity(a.mono.len());
    for spec in &a.mono {
        let Some((lang, path)) = spec.split_once('=') else {
            bail!(Error::InvalidConfig(format!("--mono expects lang=path, got {spec:?}")));
        };
        monos.push((lang.to_owned(), TokenizerModel::load(Path::new(path))?));
    }
    let mut out = String::new();
    for (piece, langs) in unigram::token_origins(&multi, &monos) {
        out.push_str(&format!("{piece}\t{}\n", langs.join(",")));
    }
    match &a.out {
        Some(p) => write_file(p, &out)?,
        None => std::io::stdout().lock().write_all(out.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct FullReport<'a> {
    #[serde(flatten)]
    report: &'a eval::EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown: Option<eval::Breakdown>,
}

fn evaluate(a: EvalArgs) -> Result<()> {
    let mode: EvalMode = a.mode.parse()?;
    let model = a.model.as_deref().map(TokenizerModel::load).transpose()?;
    let gold: Vec<CompoundEntry> = io::read_entries(&a.gold)?;
    let records: Vec<EntryRecord> = io::read_jsonl(&a.pred)?;
    let predictions = Predictions::from_records(&records)?;
    let report = eval::score(&gold, &predictions, mode);
    let breakdown = model.map(|m| eval::hard_easy_breakdown(&gold, &predictions, &m, mode));
    write_file(&a.report, &pretty(&FullReport { report: &report, breakdown })?)?;
    let table = report.to_table();
    if let Some(p) = &a.table {
        write_file(p, &table)?;
    }
    print!("{table}");
    Ok(())
}
