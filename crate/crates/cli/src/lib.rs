//! Command-line front end. Every subcommand wraps one library call.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use morphtok::align::{
    align_morphemes, load_sigmorphon, segmentation_to_tags, MorphemeAnnotation, DEFAULT_SEPARATOR,
};
use morphtok::eval::{
    bins_from_thresholds, evaluate_segmenter, sample_frequency_bins, Averaging,
    FertilityAccumulator, DEFAULT_BIN_THRESHOLDS,
};
use morphtok::tagger::{
    load_external_segmentations, segment_word, train_tagger, ExternalSegmentations,
    FeatureTemplate, Segmenter, TaggerModel, TokenizerSegmenter, TrainConfig,
};
use morphtok::tokenizer::{Tokenizer, TokenizerConfig};
use morphtok::vocab::{load_vocab, save_vocab, Vocabulary};
use morphtok::vocabuild::{
    build_vocab, extract_unique_words, filter_biomedical_subset, parse_rrf, read_phrases,
    BuildConfig, DEFAULT_BIOMED_MIN_COUNT, DEFAULT_MIN_COUNT, DEFAULT_RRF_COLUMN,
    DEFAULT_RRF_DELIMITER,
};

const CHUNK_LINES: usize = 8192;

#[derive(Debug, Parser)]
#[command(
    name = "morphtok",
    version,
    about = "Morpheme-aware subword tokenization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize text, one output line per input line
    Tokenize(TokenizeArgs),
    /// Segment words, one per line, into surface segments
    Segment(SegmentArgs),
    /// Train the character tagger on shared-task TSV
    TrainTagger(TrainArgs),
    /// Align shared-task morphemes to the surface
    Align(AlignArgs),
    /// Build a vocabulary from phrases or an RRF concept file
    BuildVocab(BuildVocabArgs),
    /// Keep gold words that occur in a biomedical lexicon
    FilterBiomed(FilterArgs),
    /// Score a segmenter against gold segmentations
    Evaluate(EvaluateArgs),
    /// Tokenizer fertility and unknown-token statistics
    Stats(StatsArgs),
    /// Sample masked-word instances per frequency bin
    SampleBins(SampleBinsArgs),
}

#[derive(Debug, Args)]
pub struct TokenizerFlags {
    /// Keep case
    #[arg(long)]
    pub cased: bool,
    /// Keep accents (implied by --cased)
    #[arg(long)]
    pub keep_accents: bool,
    /// Words longer than this many chars become the unknown token
    #[arg(long, default_value_t = 100)]
    pub max_word_chars: usize,
    #[arg(long, default_value = "[UNK]")]
    pub unk_token: String,
}

impl TokenizerFlags {
    pub fn config(&self) -> TokenizerConfig {
        TokenizerConfig {
            lowercase: !self.cased,
            strip_accents: !(self.cased || self.keep_accents),
            max_word_chars: self.max_word_chars,
            unknown_token: self.unk_token.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct IoFlags {
    /// Input file; stdin when omitted or "-"
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when omitted or "-"
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TokenizeArgs {
    #[arg(long)]
    pub vocab: PathBuf,
    #[command(flatten)]
    pub io: IoFlags,
    #[command(flatten)]
    pub tokenizer: TokenizerFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Trained character tagger (--model)
    Tagger,
    /// Precomputed `word TAB segments` file (--segmentations)
    External,
    /// WordPiece tokenizer (--segmenter-vocab)
    Tokenizer,
    /// Replay the gold segmentation (evaluate only)
    Gold,
}

#[derive(Debug, Args)]
pub struct BackendFlags {
    #[arg(long, value_enum, default_value_t = Backend::Tagger)]
    pub backend: Backend,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub segmentations: Option<PathBuf>,
    /// Vocabulary for the tokenizer backend
    #[arg(long = "segmenter-vocab")]
    pub segmenter_vocab: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[command(flatten)]
    pub backend: BackendFlags,
    #[command(flatten)]
    pub io: IoFlags,
    #[command(flatten)]
    pub tokenizer: TokenizerFlags,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Shared-task TSV
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_shuffle: bool,
    #[arg(long)]
    pub no_averaging: bool,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    #[arg(long, default_value_t = 4)]
    pub max_order: usize,
    #[arg(long, default_value = DEFAULT_SEPARATOR)]
    pub separator: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlignFormat {
    Tags,
    Segments,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[command(flatten)]
    pub io: IoFlags,
    #[arg(long, value_enum, default_value_t = AlignFormat::Tags)]
    pub format: AlignFormat,
    #[arg(long, default_value = DEFAULT_SEPARATOR)]
    pub separator: String,
}

#[derive(Debug, Args)]
pub struct BuildVocabArgs {
    /// One phrase per line
    #[arg(long, conflicts_with = "rrf", required_unless_present = "rrf")]
    pub phrases: Option<PathBuf>,
    /// Pipe-delimited concept file
    #[arg(long)]
    pub rrf: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_RRF_COLUMN)]
    pub column: usize,
    #[arg(long, default_value = DEFAULT_RRF_DELIMITER)]
    pub delimiter: String,
    #[command(flatten)]
    pub backend: BackendFlags,
    /// Vocabulary to extend
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    pub min_count: u64,
    /// Weight subwords by word frequency instead of counting each word once
    #[arg(long)]
    pub weight_by_count: bool,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Stage report (JSON lines); stderr when omitted
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub pretty: bool,
    #[command(flatten)]
    pub tokenizer: TokenizerFlags,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Shared-task TSV
    #[arg(long)]
    pub gold: PathBuf,
    /// Lexicon, one phrase per line
    #[arg(
        long,
        conflicts_with = "lexicon_rrf",
        required_unless_present = "lexicon_rrf"
    )]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub lexicon_rrf: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_RRF_COLUMN)]
    pub column: usize,
    #[arg(long, default_value = DEFAULT_RRF_DELIMITER)]
    pub delimiter: String,
    #[arg(long, default_value_t = DEFAULT_BIOMED_MIN_COUNT)]
    pub min_count: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = DEFAULT_SEPARATOR)]
    pub separator: String,
    #[command(flatten)]
    pub tokenizer: TokenizerFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Micro,
    Macro,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[command(flatten)]
    pub backend: BackendFlags,
    #[arg(long, value_enum, default_value_t = Mode::Micro)]
    pub mode: Mode,
    #[arg(long, default_value = DEFAULT_SEPARATOR)]
    pub separator: String,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub pretty: bool,
    #[command(flatten)]
    pub tokenizer: TokenizerFlags,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub vocab: PathBuf,
    #[command(flatten)]
    pub io: IoFlags,
    #[arg(long)]
    pub pretty: bool,
    #[command(flatten)]
    pub tokenizer: TokenizerFlags,
}

#[derive(Debug, Args)]
pub struct SampleBinsArgs {
    /// One sentence per line
    #[arg(long)]
    pub corpus: PathBuf,
    /// Lower bin edges, ascending
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BIN_THRESHOLDS)]
    pub bins: Vec<u64>,
    #[arg(long, default_value_t = 100)]
    pub n_per_bin: usize,
    #[arg(long)]
    pub seed: u64,
    /// Masked instances (JSON lines)
    #[arg(long, short)]
    pub output: PathBuf,
    /// Per-bin report; stderr when omitted
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub pretty: bool,
    /// Adds per-bin tokenizer statistics to the report
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[command(flatten)]
    pub tokenizer: TokenizerFlags,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Tokenize(a) => tokenize(a),
        Command::Segment(a) => segment(a),
        Command::TrainTagger(a) => train(a),
        Command::Align(a) => align(a),
        Command::BuildVocab(a) => build(a),
        Command::FilterBiomed(a) => filter(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Stats(a) => stats(a),
        Command::SampleBins(a) => sample_bins(a),
    }
}

fn is_std(path: &Option<PathBuf>) -> bool {
    path.as_deref().is_none_or(|p| p == Path::new("-"))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("{}: cannot open", path.display()))?;
    Ok(BufReader::new(f))
}

fn open_input(path: &Option<PathBuf>) -> Result<Box<dyn BufRead>> {
    if is_std(path) {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        Ok(Box::new(open(path.as_deref().unwrap())?))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("{}: cannot create", path.display()))?;
    Ok(BufWriter::new(f))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    if is_std(path) {
        Ok(Box::new(BufWriter::new(io::stdout())))
    } else {
        Ok(Box::new(create(path.as_deref().unwrap())?))
    }
}

fn input_name(path: &Option<PathBuf>) -> String {
    if is_std(path) {
        "<stdin>".to_string()
    } else {
        path.as_deref().unwrap().display().to_string()
    }
}

fn read_vocab(path: &Path) -> Result<Vocabulary> {
    load_vocab(open(path)?).with_context(|| format!("{}", path.display()))
}

fn read_tokenizer(path: &Path, flags: &TokenizerFlags) -> Result<Tokenizer> {
    Ok(Tokenizer::new(read_vocab(path)?, flags.config())?)
}

fn read_gold(path: &Path, separator: &str) -> Result<Vec<MorphemeAnnotation>> {
    load_sigmorphon(open(path)?, separator).with_context(|| format!("{}", path.display()))
}

fn read_model(path: &Path) -> Result<TaggerModel> {
    TaggerModel::load(open(path)?).with_context(|| format!("{}", path.display()))
}

fn load_segmenter(
    flags: &BackendFlags,
    tokenizer: &TokenizerFlags,
    gold: Option<&[MorphemeAnnotation]>,
) -> Result<Box<dyn Segmenter>> {
    let need = |p: &Option<PathBuf>, flag: &str| -> Result<PathBuf> {
        match p {
            Some(p) => Ok(p.clone()),
            None => bail!("--backend {:?} requires {flag}", flags.backend),
        }
    };
    Ok(match flags.backend {
        Backend::Tagger => Box::new(read_model(&need(&flags.model, "--model")?)?),
        Backend::External => {
            let path = need(&flags.segmentations, "--segmentations")?;
            Box::new(
                load_external_segmentations(open(&path)?)
                    .with_context(|| format!("{}", path.display()))?,
            )
        }
        Backend::Tokenizer => {
            let path = need(&flags.segmenter_vocab, "--segmenter-vocab")?;
            Box::new(TokenizerSegmenter::new(read_tokenizer(&path, tokenizer)?))
        }
        Backend::Gold => match gold {
            Some(anns) => Box::new(ExternalSegmentations::from_gold(anns)?.0),
            None => bail!("--backend gold is only available to evaluate"),
        },
    })
}

/// Reads up to `CHUNK_LINES` lines; `first_line` is advanced past them.
fn read_chunk(input: &mut dyn BufRead, name: &str, first_line: &mut usize) -> Result<Vec<String>> {
    let mut lines = Vec::with_capacity(CHUNK_LINES);
    let mut buf = String::new();
    while lines.len() < CHUNK_LINES {
        buf.clear();
        let n = input
            .read_line(&mut buf)
            .with_context(|| format!("{name}: line {}", *first_line + lines.len()))?;
        if n == 0 {
            break;
        }
        let line = buf.strip_suffix('\n').unwrap_or(&buf);
        lines.push(line.strip_suffix('\r').unwrap_or(line).to_string());
    }
    *first_line += lines.len();
    Ok(lines)
}

fn tokenize(a: TokenizeArgs) -> Result<()> {
    let tokenizer = read_tokenizer(&a.vocab, &a.tokenizer)?;
    let name = input_name(&a.io.input);
    let mut input = open_input(&a.io.input)?;
    let mut out = open_output(&a.io.output)?;
    let mut line_no = 1;
    loop {
        let lines = read_chunk(&mut input, &name, &mut line_no)?;
        if lines.is_empty() {
            break;
        }
        let rendered: Vec<String> = lines
            .par_iter()
            .map(|l| tokenizer.tokenize(l).join(" "))
            .collect();
        for r in rendered {
            writeln!(out, "{r}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn segment(a: SegmentArgs) -> Result<()> {
    let segmenter = load_segmenter(&a.backend, &a.tokenizer, None)?;
    let name = input_name(&a.io.input);
    let mut input = open_input(&a.io.input)?;
    let mut out = open_output(&a.io.output)?;
    let mut line_no = 1;
    loop {
        let first = line_no;
        let lines = read_chunk(&mut input, &name, &mut line_no)?;
        if lines.is_empty() {
            break;
        }
        let rendered: Vec<Result<String>> = lines
            .par_iter()
            .enumerate()
            .map(|(i, l)| {
                let word = l.trim();
                if word.is_empty() {
                    return Ok(String::new());
                }
                segment_word(segmenter.as_ref(), word)
                    .map(|s| s.to_line())
                    .with_context(|| format!("{name}: line {}", first + i))
            })
            .collect();
        for r in rendered {
            writeln!(out, "{}", r?)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let anns = read_gold(&a.train, &a.separator)?;
    let mut data = Vec::with_capacity(anns.len());
    let mut warnings = 0;
    for ann in &anns {
        let (seg, w) = align_morphemes(ann)
            .with_context(|| format!("{}: word {:?}", a.train.display(), ann.surface))?;
        warnings += w.len();
        data.push((ann.surface.clone(), segmentation_to_tags(&seg)));
    }
    let cfg = TrainConfig {
        epochs: a.epochs,
        seed: a.seed,
        shuffle: !a.no_shuffle,
        averaging: !a.no_averaging,
        template: FeatureTemplate {
            radius: a.radius,
            max_order: a.max_order,
            ..FeatureTemplate::default()
        },
    };
    let model = train_tagger(&data, &cfg)?;
    let mut out = create(&a.model)?;
    model.save(&mut out)?;
    out.flush()?;
    eprintln!(
        "trained on {} words ({} alignment warnings), {} features",
        data.len(),
        warnings,
        model.num_features()
    );
    Ok(())
}

fn align(a: AlignArgs) -> Result<()> {
    let name = input_name(&a.io.input);
    let anns =
        load_sigmorphon(open_input(&a.io.input)?, &a.separator).with_context(|| name.clone())?;
    let mut out = open_output(&a.io.output)?;
    for ann in &anns {
        let (seg, warnings) =
            align_morphemes(ann).with_context(|| format!("{name}: word {:?}", ann.surface))?;
        for w in warnings {
            eprintln!("warning: {}: {w}", ann.surface);
        }
        match a.format {
            AlignFormat::Tags => writeln!(out, "{}\t{}", ann.surface, segmentation_to_tags(&seg))?,
            AlignFormat::Segments => writeln!(out, "{}", seg.to_line())?,
        }
    }
    out.flush()?;
    Ok(())
}

fn read_phrase_source(
    phrases: &Option<PathBuf>,
    rrf: &Option<PathBuf>,
    column: usize,
    delimiter: &str,
) -> Result<Vec<String>> {
    if let Some(path) = phrases {
        return read_phrases(open(path)?).with_context(|| format!("{}", path.display()));
    }
    let path = rrf.as_ref().expect("clap requires one phrase source");
    let mut parser = parse_rrf(open(path)?, column, delimiter);
    let out = parser
        .by_ref()
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("{}", path.display()))?;
    if parser.skipped() > 0 {
        eprintln!(
            "{}: skipped {} short lines",
            path.display(),
            parser.skipped()
        );
    }
    Ok(out)
}

fn write_report(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let mut out = create(p)?;
            writeln!(out, "{text}")?;
            out.flush()?;
        }
        None => eprintln!("{text}"),
    }
    Ok(())
}

fn build(a: BuildVocabArgs) -> Result<()> {
    let phrases = read_phrase_source(&a.phrases, &a.rrf, a.column, &a.delimiter)?;
    let segmenter = load_segmenter(&a.backend, &a.tokenizer, None)?;
    let base = a.base.as_deref().map(read_vocab).transpose()?;
    let cfg = BuildConfig {
        tokenizer: a.tokenizer.config(),
        min_count: a.min_count,
        weight_by_count: a.weight_by_count,
    };
    let built = build_vocab(&phrases, segmenter.as_ref(), base.as_ref(), &cfg)?;
    for s in &built.skipped {
        eprintln!("skipped {:?}: {}", s.word, s.error);
    }
    let mut out = create(&a.output)?;
    save_vocab(&built.vocab, &mut out)?;
    out.flush()?;

    let r = built.report;
    let text = if a.pretty {
        format!(
            "{:<16} {:>10}\n{:<16} {:>10}\n{:<16} {:>10}\n{:<16} {:>10}\n{:<16} {:>10}",
            "unique words",
            r.unique_words,
            "skipped words",
            r.skipped_words,
            "unique subwords",
            r.unique_subwords,
            "after filter",
            r.post_filter,
            "after merge",
            r.post_merge
        )
    } else {
        serde_json::to_string(&r)?
    };
    write_report(&a.report, &text)
}

fn filter(a: FilterArgs) -> Result<()> {
    let anns = read_gold(&a.gold, &a.separator)?;
    let phrases = read_phrase_source(&a.lexicon, &a.lexicon_rrf, a.column, &a.delimiter)?;
    let lexicon = extract_unique_words(&phrases, &a.tokenizer.config());
    let kept = filter_biomedical_subset(&anns, &lexicon, a.min_count);
    let mut out = open_output(&a.output)?;
    for ann in &kept {
        writeln!(out, "{}", ann.to_line(&a.separator))?;
    }
    out.flush()?;
    eprintln!("kept {} of {} words", kept.len(), anns.len());
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let anns = read_gold(&a.gold, &a.separator)?;
    let segmenter = load_segmenter(&a.backend, &a.tokenizer, Some(&anns))?;
    let mode = match a.mode {
        Mode::Micro => Averaging::Micro,
        Mode::Macro => Averaging::Macro,
    };
    let report = evaluate_segmenter(segmenter.as_ref(), &anns, mode)
        .with_context(|| format!("{}", a.gold.display()))?;
    let mut out = open_output(&a.output)?;
    if a.pretty {
        writeln!(out, "{:<10} {:>8}", "words", report.words)?;
        writeln!(out, "{:<10} {:>8}", "warnings", report.alignment_warnings)?;
        writeln!(out, "{}", report.score)?;
    } else {
        writeln!(out, "{}", serde_json::to_string(&report)?)?;
    }
    out.flush()?;
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    let tokenizer = read_tokenizer(&a.vocab, &a.tokenizer)?;
    let name = input_name(&a.io.input);
    let mut input = open_input(&a.io.input)?;
    let mut acc = FertilityAccumulator::default();
    let mut line_no = 1;
    loop {
        let lines = read_chunk(&mut input, &name, &mut line_no)?;
        if lines.is_empty() {
            break;
        }
        for l in &lines {
            acc.add_line(&tokenizer, l);
        }
    }
    let report = acc.finish(&tokenizer);
    let mut out = open_output(&a.io.output)?;
    if a.pretty {
        writeln!(out, "{:<14} {:>12}", "words", report.words)?;
        writeln!(out, "{:<14} {:>12}", "tokens", report.tokens)?;
        writeln!(out, "{:<14} {:>12.4}", "fertility", report.fertility)?;
        writeln!(out, "{:<14} {:>12.4}", "unk rate", report.unk_rate)?;
        writeln!(
            out,
            "{:<14} {:>12.4}",
            "vocab coverage", report.vocab_coverage
        )?;
        for (k, n) in &report.pieces_histogram {
            writeln!(out, "{:<14} {:>12}", format!("{k} pieces"), n)?;
        }
    } else {
        writeln!(out, "{}", serde_json::to_string(&report)?)?;
    }
    out.flush()?;
    Ok(())
}

fn sample_bins(a: SampleBinsArgs) -> Result<()> {
    let bins = bins_from_thresholds(&a.bins)?;
    let tokenizer = a
        .vocab
        .as_deref()
        .map(|v| read_tokenizer(v, &a.tokenizer))
        .transpose()?;
    let sample = sample_frequency_bins(
        open(&a.corpus)?,
        &bins,
        a.n_per_bin,
        a.seed,
        tokenizer.as_ref(),
    )
    .with_context(|| format!("{}", a.corpus.display()))?;
    let mut out = create(&a.output)?;
    for inst in &sample.instances {
        writeln!(out, "{}", serde_json::to_string(inst)?)?;
    }
    out.flush()?;

    let text = if a.pretty {
        let mut s = format!(
            "{:<12} {:>10} {:>10} {:>8}",
            "bin", "words", "available", "sampled"
        );
        for b in &sample.report.bins {
            s.push_str(&format!(
                "\n{:<12} {:>10} {:>10} {:>8}",
                b.bin, b.distinct_words, b.available_instances, b.sampled
            ));
        }
        s
    } else {
        let lines: Vec<String> = sample
            .report
            .bins
            .iter()
            .map(serde_json::to_string)
            .collect::<Result<_, _>>()?;
        lines.join("\n")
    };
    write_report(&a.report, &text)
}
