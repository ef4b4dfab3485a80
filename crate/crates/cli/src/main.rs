use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use morphpiece::analysis::{self, Format, Report, TokenizerAdapter};
use morphpiece::artifacts::{self, exclusion_set, write_file, Artifacts};
use morphpiece::bpe::{self, BpeModel};
use morphpiece::morphtable::{ColumnMap, MorphTableBuilder};
use morphpiece::tokenizer::{CasePolicy, MorphPieceTokenizer, TokenizerConfig};
use morphpiece::vocab::{default_specials, MergedVocabulary};
use morphpiece::{fixtures, selftest};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_SELFTEST: u8 = 3;

/// Morphology-aware subword tokenizer.
#[derive(Parser, Debug)]
#[command(name = "morphpiece", version, arg_required_else_help = true)]
struct Cli {
    /// Artifact directory.
    #[arg(long, global = true, env = "MORPHPIECE_DIR", default_value = "artifacts")]
    dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ingest morphology files, trim rare morphemes, write the morph table.
    BuildMorphtable(BuildMorphtable),
    /// Train byte-level BPE with the morph table's words excluded.
    TrainBpe(TrainBpe),
    /// Merge the morph inventory and BPE vocabulary into one id space.
    BuildVocab,
    /// Tokenize text, one document per line.
    Encode(Encode),
    /// Turn ids or tokens back into text, one sequence per line.
    Decode(Decode),
    /// Corpus statistics: fertility, coverage, unsplit ranking.
    Stats(Stats),
    /// Run the bundled fixture checks.
    Selftest(Selftest),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SourceFormat {
    Canonical,
    MorphynetInflectional,
    MorphynetDerivational,
}

impl SourceFormat {
    fn column_map(self) -> ColumnMap {
        match self {
            SourceFormat::Canonical => ColumnMap::canonical(),
            SourceFormat::MorphynetInflectional => ColumnMap::morphynet_inflectional(),
            SourceFormat::MorphynetDerivational => ColumnMap::morphynet_derivational(),
        }
    }
}

#[derive(Args, Debug)]
struct BuildMorphtable {
    /// Morphology source file; repeat for several, each as `[FORMAT:]PATH`
    /// where FORMAT is canonical, morphynet-inflectional or morphynet-derivational.
    #[arg(long = "source", required = true)]
    sources: Vec<String>,
    /// Drop entries holding a morpheme seen fewer times than this.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    min_count: u64,
}

#[derive(Args, Debug)]
struct TrainBpe {
    /// Training corpus, one document per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Target BPE vocabulary size, 256 base symbols included.
    #[arg(long, default_value_t = 32_000)]
    vocab_size: usize,
}

#[derive(Args, Debug)]
struct TokenizerFlags {
    #[arg(long, value_enum, default_value_t = Case::Exact)]
    case: Case,
    /// Do not emit the no-space joiner (lossy for attached words).
    #[arg(long)]
    no_joiner: bool,
}

impl TokenizerFlags {
    fn config(&self) -> TokenizerConfig {
        let case_policy = match self.case {
            Case::Exact => CasePolicy::Exact,
            Case::FoldLower => CasePolicy::FoldLower,
        };
        TokenizerConfig { case_policy, use_joiner: !self.no_joiner }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Case {
    Exact,
    FoldLower,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Emit {
    Tokens,
    Ids,
    Trace,
}

#[derive(Args, Debug)]
struct Input {
    /// Literal input instead of a file.
    #[arg(long, conflicts_with = "input")]
    text: Option<String>,
    /// Input file; stdin when neither this nor --text is given.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl Input {
    fn read(&self) -> Result<String> {
        if let Some(t) = &self.text {
            return Ok(t.clone());
        }
        let mut s = String::new();
        match &self.input {
            Some(p) => File::open(p)
                .and_then(|mut f| f.read_to_string(&mut s))
                .with_context(|| format!("reading {}", p.display()))?,
            None => io::stdin().read_to_string(&mut s).context("reading stdin")?,
        };
        Ok(s)
    }
}

#[derive(Args, Debug)]
struct Encode {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = Emit::Tokens)]
    emit: Emit,
    #[command(flatten)]
    tokenizer: TokenizerFlags,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DecodeFrom {
    Ids,
    Tokens,
}

#[derive(Args, Debug)]
struct Decode {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = DecodeFrom::Ids)]
    from: DecodeFrom,
    /// Print the number of words rendered without a reverse-table match.
    #[arg(long)]
    report_unverified: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StatsReport {
    Fertility,
    Coverage,
    Unsplit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Tsv,
    Json,
}

#[derive(Args, Debug)]
struct Stats {
    /// Corpus, one document per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated adapters for fertility: whitespace, char, morphpiece,
    /// bpe (the artifact BPE), gpt2=MERGES_FILE, wordpiece=VOCAB_TXT,
    /// wordpiece-cased=VOCAB_TXT.
    #[arg(long, value_delimiter = ',', default_value = "whitespace,morphpiece,bpe")]
    tokenizers: Vec<String>,
    #[arg(long, value_enum, default_value_t = StatsReport::Fertility)]
    report: StatsReport,
    /// Rows in the unsplit ranking.
    #[arg(long, default_value_t = 20)]
    top: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Tsv)]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG chart of coverage by word length.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    tokenizer: TokenizerFlags,
}

#[derive(Args, Debug)]
struct Selftest {
    /// Check the artifacts in --dir instead of ones built from the bundled fixtures.
    #[arg(long)]
    use_dir: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let dir = cli.dir.as_path();
    match cli.command {
        Command::BuildMorphtable(a) => build_morphtable(dir, &a),
        Command::TrainBpe(a) => train_bpe(dir, &a),
        Command::BuildVocab => build_vocab(dir),
        Command::Encode(a) => encode(dir, &a),
        Command::Decode(a) => decode(dir, &a),
        Command::Stats(a) => stats(dir, &a),
        Command::Selftest(a) => run_selftest(dir, &a),
    }
}

fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("{}: no such file", path.display());
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn parse_source(spec: &str) -> Result<(SourceFormat, PathBuf)> {
    if let Some((fmt, path)) = spec.split_once(':') {
        if let Ok(f) = SourceFormat::from_str(fmt, true) {
            return Ok((f, PathBuf::from(path)));
        }
    }
    Ok((SourceFormat::Canonical, PathBuf::from(spec)))
}

fn build_morphtable(dir: &Path, a: &BuildMorphtable) -> Result<ExitCode> {
    let sources = a.sources.iter().map(|s| parse_source(s)).collect::<Result<Vec<_>>>()?;
    for (_, p) in &sources {
        require_file(p)?;
    }
    let mut builder = MorphTableBuilder::new();
    for (fmt, path) in &sources {
        let r = builder.add_file(path, &fmt.column_map()).with_context(|| format!("ingesting {}", path.display()))?;
        eprintln!(
            "{}: {} records, {} malformed, {} duplicates",
            path.display(),
            r.records,
            r.skipped_malformed,
            r.duplicates
        );
        for (line, reason) in &r.examples {
            eprintln!("  line {line}: {reason}");
        }
    }
    let full = builder.finish()?;
    let table = full.trim(a.min_count);
    eprintln!(
        "entries {} -> {} after trim({}), inventory {} -> {}",
        full.len(),
        table.len(),
        a.min_count,
        full.inventory().len(),
        table.inventory().len()
    );
    for c in table.build_reverse().collisions() {
        eprintln!("collision: {} kept over {} for {}", c.kept, c.dropped, c.sequence.join(" "));
    }
    ensure_dir(dir)?;
    write_file(&dir.join(artifacts::MORPHTABLE_FILE), |w| table.write_tsv(w))?;
    Ok(ExitCode::SUCCESS)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(f).lines().collect::<io::Result<_>>().with_context(|| format!("reading {}", path.display()))
}

fn train_bpe(dir: &Path, a: &TrainBpe) -> Result<ExitCode> {
    require_file(&a.corpus)?;
    let table_path = dir.join(artifacts::MORPHTABLE_FILE);
    require_file(&table_path)?;
    let table = artifacts::read_morphtable(&table_path)?;
    let docs = read_lines(&a.corpus)?;
    let (model, stats) = bpe::train(&docs, a.vocab_size, &exclusion_set(&table))?;
    eprintln!(
        "{} distinct words, {} excluded pretokens, {} merges, vocab {}",
        stats.distinct_words,
        stats.excluded_pretokens,
        stats.merges,
        model.vocab_size()
    );
    ensure_dir(dir)?;
    write_file(&dir.join(artifacts::BPE_MERGES_FILE), |w| model.write_merges(w))?;
    write_file(&dir.join(artifacts::BPE_VOCAB_FILE), |w| model.write_vocab(w))?;
    Ok(ExitCode::SUCCESS)
}

fn build_vocab(dir: &Path) -> Result<ExitCode> {
    let table_path = dir.join(artifacts::MORPHTABLE_FILE);
    let bpe_path = dir.join(artifacts::BPE_MERGES_FILE);
    require_file(&table_path)?;
    require_file(&bpe_path)?;
    let table = artifacts::read_morphtable(&table_path)?;
    let model = artifacts::read_bpe(&bpe_path)?;
    let (vocab, acct) = MergedVocabulary::merge(&table.token_set(), model.tokens(), &default_specials())?;
    eprintln!(
        "morph {} + bpe {} - overlap {} + specials {} = {}",
        acct.morph, acct.bpe, acct.overlap, acct.specials, acct.total
    );
    write_file(&dir.join(artifacts::VOCAB_FILE), |w| vocab.write_tsv(w))?;
    Ok(ExitCode::SUCCESS)
}

fn load(dir: &Path) -> Result<Artifacts> {
    for f in [artifacts::MORPHTABLE_FILE, artifacts::BPE_MERGES_FILE, artifacts::VOCAB_FILE] {
        require_file(&dir.join(f)).context("artifact directory is incomplete (see --dir / MORPHPIECE_DIR)")?;
    }
    Ok(Artifacts::load_dir(dir)?)
}

fn load_tokenizer(dir: &Path, flags: &TokenizerFlags) -> Result<(Artifacts, MorphPieceTokenizer)> {
    let art = load(dir)?;
    let tok = art.tokenizer(flags.config())?;
    Ok((art, tok))
}

fn encode(dir: &Path, a: &Encode) -> Result<ExitCode> {
    let text = a.input.read()?;
    let (_, tok) = load_tokenizer(dir, &a.tokenizer)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for line in text.lines() {
        match a.emit {
            Emit::Tokens => writeln!(out, "{}", tok.tokenize(line).join(" "))?,
            Emit::Ids => {
                let ids: Vec<String> = tok.encode(line).ids.iter().map(u32::to_string).collect();
                writeln!(out, "{}", ids.join(" "))?;
            }
            Emit::Trace => {
                for t in tok.trace(line) {
                    writeln!(out, "{:?}\t{}\t{}", t.pretoken.original(), t.handler, t.tokens.join(" "))?;
                }
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn decode(dir: &Path, a: &Decode) -> Result<ExitCode> {
    let text = a.input.read()?;
    let art = load(dir)?;
    let detok = art.detokenizer();
    let mut out = BufWriter::new(io::stdout().lock());
    let mut unverified = 0;
    for (i, line) in text.lines().enumerate() {
        let decoded = match a.from {
            DecodeFrom::Ids => {
                let ids = line
                    .split_whitespace()
                    .map(|s| s.parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .with_context(|| format!("line {}: ids must be decimal integers", i + 1))?;
                detok.decode_ids(&ids)
            }
            DecodeFrom::Tokens => {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                detok.detokenize_report(&tokens)
            }
        }
        .with_context(|| format!("line {}", i + 1))?;
        unverified += decoded.unverified;
        writeln!(out, "{}", decoded.text)?;
    }
    out.flush()?;
    if a.report_unverified {
        eprintln!("unverified words: {unverified}");
    }
    Ok(ExitCode::SUCCESS)
}

fn stats(dir: &Path, a: &Stats) -> Result<ExitCode> {
    require_file(&a.corpus)?;
    let format = match a.format {
        ReportFormat::Tsv => Format::Tsv,
        ReportFormat::Json => Format::Json,
    };
    let docs = read_lines(&a.corpus)?;
    let (art, tok) = load_tokenizer(dir, &a.tokenizer)?;
    let mut buf = Vec::new();
    let needs_coverage = !matches!(a.report, StatsReport::Fertility) || a.plot.is_some();
    let coverage = if needs_coverage { Some(analysis::coverage(&docs, &tok)?) } else { None };
    match a.report {
        StatsReport::Fertility => {
            let adapters = build_adapters(&a.tokenizers, &art, &tok)?;
            let refs: Vec<&dyn TokenizerAdapter> = adapters.iter().map(|b| b.as_ref()).collect();
            let report = analysis::fertility(&docs, &refs)?;
            analysis::write_report(&Report::Fertility(&report), format, &mut buf)?;
        }
        StatsReport::Coverage => {
            let c = coverage.as_ref().expect("computed above");
            analysis::write_report(&Report::Coverage(c), format, &mut buf)?;
        }
        StatsReport::Unsplit => {
            let rows = coverage.as_ref().expect("computed above").top(a.top);
            analysis::write_report(&Report::Unsplit(&rows), format, &mut buf)?;
        }
    }
    match &a.out {
        Some(p) => std::fs::write(p, &buf).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    if let (Some(p), Some(c)) = (&a.plot, &coverage) {
        std::fs::write(p, analysis::render_svg(c)).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn build_adapters<'a>(names: &[String], art: &Artifacts, tok: &'a MorphPieceTokenizer) -> Result<Vec<Box<dyn TokenizerAdapter + 'a>>> {
    let mut out: Vec<Box<dyn TokenizerAdapter + 'a>> = Vec::new();
    for spec in names {
        let (name, arg) = match spec.split_once('=') {
            Some((n, p)) => (n, Some(PathBuf::from(p))),
            None => (spec.as_str(), None),
        };
        let path = || arg.clone().with_context(|| format!("adapter {name} needs =PATH"));
        let adapter: Box<dyn TokenizerAdapter + 'a> = match name {
            "whitespace" => Box::new(analysis::Whitespace),
            "char" => Box::new(analysis::Chars),
            "morphpiece" => Box::new(analysis::MorphPiece(tok)),
            "bpe" => Box::new(analysis::Bpe::new("bpe", art.bpe.clone())),
            "gpt2" => {
                let p = path()?;
                let f = File::open(&p).with_context(|| format!("opening {}", p.display()))?;
                let model = BpeModel::read_gpt2_merges(BufReader::new(f)).with_context(|| format!("reading {}", p.display()))?;
                Box::new(analysis::Bpe::new("gpt2", model))
            }
            "wordpiece" | "wordpiece-cased" => {
                let p = path()?;
                let f = File::open(&p).with_context(|| format!("opening {}", p.display()))?;
                Box::new(analysis::WordPiece::from_reader(BufReader::new(f), name == "wordpiece")?)
            }
            other => bail!("unknown tokenizer adapter {other:?}"),
        };
        out.push(adapter);
    }
    Ok(out)
}

fn run_selftest(dir: &Path, a: &Selftest) -> Result<ExitCode> {
    let art = if a.use_dir { load(dir)? } else { fixtures::artifacts() };
    let checks = selftest::run(&art);
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("{}/{} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Ok(ExitCode::from(EXIT_SELFTEST));
    }
    Ok(ExitCode::SUCCESS)
}
