use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use layermorph::baseline::{Backoff, BaselineModel};
use layermorph::eval::{
    evaluate, learning_curve, read_predictions, write_curve_csv, BaselineHarness, CommandHarness, Harness,
};
use layermorph::georgian::{
    detransliterate, generate_paradigm, load_lexicon, sample_lexicon, transliterate, LexiconEntry, Morphology,
};
use layermorph::schema::{self, FeatureInventory};
use layermorph::split::{
    make_instances, read_instances, read_queries, split, write_instances, Partition, ReinflectionInstance, SplitPolicy,
    SplitSizes, SplitSpec,
};
use layermorph::unimorph::{group_by_lemma, read_unimorph, write_unimorph, InflectionTable, TagMode, UniMorphError};
use rayon::prelude::*;

/// Layered morphological tags, Georgian paradigm generation and
/// reinflection evaluation.
///
/// File arguments default to standard input or output when omitted or `-`.
#[derive(Parser)]
#[command(name = "layermorph", version)]
struct Cli {
    /// Feature inventory file replacing the built-in one.
    #[arg(long, global = true, value_name = "FILE")]
    inventory: Option<PathBuf>,

    /// Relocation rule for flat conversion, `SELECTOR:ROLE` (e.g. `FEM:POSS`).
    /// May be repeated.
    #[arg(long, global = true, value_name = "RULE")]
    relocate: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse tags and print their canonical form.
    Parse {
        /// Tags to parse; one per line from standard input if none.
        tags: Vec<String>,
    },
    /// Convert tags between the flat and layered schemes.
    ///
    /// Lines of a three-column UniMorph file have their tag column
    /// converted; single-column lines are treated as tags.
    Convert {
        #[command(flatten)]
        direction: Direction,
        #[command(flatten)]
        io: InOut,
    },
    /// Check a UniMorph file against the inventory.
    ///
    /// Prints one line per problem and exits 1 if there are any.
    Validate {
        input: Option<PathBuf>,
        /// Tags are legacy flat tags.
        #[arg(long)]
        flat: bool,
    },
    /// Generate Georgian verb paradigms as a UniMorph file.
    Generate {
        /// Lexicon file; the built-in sample lexicon if omitted.
        #[arg(long, value_name = "FILE")]
        lexicon: Option<PathBuf>,
        /// Morphology config (TOML); the built-in one if omitted.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Use the legacy grids and write flat tags.
        #[arg(long)]
        legacy: bool,
        /// Write flat tags.
        #[arg(long)]
        flat: bool,
        /// Generate lemmas in parallel.
        #[arg(long)]
        parallel: bool,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Sample reinflection instances from a UniMorph file.
    MakeInstances {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// Tags are legacy flat tags (converted to the layered scheme).
        #[arg(long)]
        flat: bool,
    },
    /// Split an instance file into train.tsv, dev.tsv and test.tsv.
    Split {
        input: Option<PathBuf>,
        #[arg(long, value_parser = parse_policy)]
        policy: SplitPolicy,
        /// TRAIN,DEV,TEST
        #[arg(long, value_parser = parse_sizes)]
        sizes: SplitSizes,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Score predictions against a split file.
    Evaluate {
        #[arg(long, value_name = "FILE")]
        predictions: PathBuf,
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        /// Print `n,accuracy,avg_ed` instead of the text report.
        #[arg(long)]
        csv: bool,
    },
    /// Train the rule baseline.
    BaselineTrain {
        #[arg(long, value_name = "FILE")]
        train: PathBuf,
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = BackoffArg::None)]
        backoff: BackoffArg,
    },
    /// Predict target forms with a trained baseline.
    BaselinePredict {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[command(flatten)]
        io: InOut,
    },
    /// Accuracy against train size on nested subsamples of a split.
    LearningCurve {
        /// Directory holding train.tsv and test.tsv.
        #[arg(long, value_name = "DIR")]
        split_dir: PathBuf,
        /// Ascending train sizes, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        train_sizes: Vec<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = HarnessArg::Baseline)]
        harness: HarnessArg,
        #[arg(long, value_enum, default_value_t = BackoffArg::None)]
        backoff: BackoffArg,
        /// Train command template for the command harness.
        #[arg(long, value_name = "TEMPLATE", required_if_eq("harness", "command"))]
        train_cmd: Option<String>,
        /// Predict command template for the command harness.
        #[arg(long, value_name = "TEMPLATE", required_if_eq("harness", "command"))]
        predict_cmd: Option<String>,
        /// Scratch directory for the command harness.
        #[arg(long, value_name = "DIR")]
        work_dir: Option<PathBuf>,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Convert between Georgian script and Latin transliteration.
    Transliterate {
        /// Latin to Georgian.
        #[arg(long)]
        reverse: bool,
        /// Text to convert; lines from standard input if none.
        text: Vec<String>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Direction {
    #[arg(long)]
    from_flat: bool,
    #[arg(long)]
    to_flat: bool,
}

#[derive(Args)]
struct InOut {
    input: Option<PathBuf>,
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum HarnessArg {
    Baseline,
    Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackoffArg {
    None,
    Paradigm,
}

impl From<BackoffArg> for Backoff {
    fn from(b: BackoffArg) -> Self {
        match b {
            BackoffArg::None => Backoff::None,
            BackoffArg::Paradigm => Backoff::Paradigm,
        }
    }
}

fn parse_policy(s: &str) -> Result<SplitPolicy, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_sizes(s: &str) -> Result<SplitSizes, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn is_stdio(path: &Option<PathBuf>) -> bool {
    path.as_deref().is_none_or(|p| p == Path::new("-"))
}

fn open_input(path: &Option<PathBuf>) -> Result<Box<dyn BufRead>> {
    if is_stdio(path) {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let path = path.as_ref().unwrap();
    Ok(Box::new(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?)))
}

fn open_file(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    if is_stdio(path) {
        return Ok(Box::new(BufWriter::new(io::stdout())));
    }
    let path = path.as_ref().unwrap();
    Ok(Box::new(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?)))
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn load_inventory(cli: &Cli) -> Result<FeatureInventory> {
    let mut inv = match &cli.inventory {
        Some(path) => FeatureInventory::from_reader(open_file(path)?)
            .with_context(|| format!("bad inventory {}", path.display()))?,
        None => FeatureInventory::default(),
    };
    for rule in &cli.relocate {
        let Some((selector, role)) = rule.split_once(':') else {
            bail!("relocation rule {rule:?} is not SELECTOR:ROLE");
        };
        inv = inv.with_relocation(selector, role)?;
    }
    Ok(inv)
}

fn tag_mode(flat: bool) -> TagMode {
    if flat {
        TagMode::Flat
    } else {
        TagMode::Layered
    }
}

/// Command-line arguments, or standard input lines when there are none.
fn items_or_lines(items: &[String]) -> Result<Vec<String>> {
    if !items.is_empty() {
        return Ok(items.to_vec());
    }
    Ok(io::stdin().lock().lines().collect::<io::Result<_>>()?)
}

fn cmd_parse(inv: &FeatureInventory, tags: &[String]) -> Result<()> {
    let mut out = open_output(&None)?;
    for (i, tag) in items_or_lines(tags)?.iter().enumerate() {
        if tag.trim().is_empty() {
            continue;
        }
        let fs = inv.parse_tag(tag).with_context(|| format!("item {}: {tag:?}", i + 1))?;
        writeln!(out, "{}", inv.render(&fs))?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_convert(inv: &FeatureInventory, direction: &Direction, io: &InOut) -> Result<()> {
    let convert = |tag: &str| -> Result<String> {
        if direction.from_flat {
            Ok(inv.render(&inv.from_flat(tag)?))
        } else {
            Ok(inv.to_flat(&inv.parse_tag(tag)?)?)
        }
    };
    let mut out = open_output(&io.output)?;
    for (i, line) in open_input(&io.input)?.lines().enumerate() {
        let line = line?;
        let at = || format!("line {}", i + 1);
        if line.trim().is_empty() {
            writeln!(out)?;
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[..] {
            [tag] => writeln!(out, "{}", convert(tag).with_context(at)?)?,
            [lemma, form, tag] => writeln!(out, "{lemma}\t{form}\t{}", convert(tag).with_context(at)?)?,
            _ => bail!("{}: expected 1 or 3 tab-separated columns, found {}", at(), fields.len()),
        }
    }
    out.flush()?;
    Ok(())
}

/// Returns the number of problems found.
fn cmd_validate(inv: &FeatureInventory, input: &Option<PathBuf>, flat: bool) -> Result<usize> {
    let mut out = open_output(&None)?;
    let mut problems = 0;
    let mut seen = std::collections::HashSet::new();
    for (i, line) in open_input(input)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut report = |msg: String| -> io::Result<()> {
            problems += 1;
            writeln!(out, "line {}: {msg}", i + 1)
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [lemma, form, tag] = fields[..] else {
            report(format!("expected 3 tab-separated columns, found {}", fields.len()))?;
            continue;
        };
        if lemma.is_empty() || form.is_empty() {
            report("empty lemma or form".into())?;
            continue;
        }
        let parsed = if flat {
            inv.from_flat(tag).map_err(|e| e.to_string())
        } else {
            schema::parse_tag(tag).map_err(|e| e.to_string())
        };
        let fs = match parsed {
            Ok(fs) => fs,
            Err(e) => {
                report(e)?;
                continue;
            }
        };
        for v in inv.validate(&fs) {
            report(v.to_string())?;
        }
        if !flat && !seen.insert((lemma.to_string(), inv.render(&fs))) {
            report(format!("duplicate cell {} for {lemma}", inv.render(&fs)))?;
        }
    }
    out.flush()?;
    Ok(problems)
}

struct GenerateArgs<'a> {
    lexicon: &'a Option<PathBuf>,
    config: &'a Option<PathBuf>,
    legacy: bool,
    flat: bool,
    parallel: bool,
    output: &'a Option<PathBuf>,
}

fn cmd_generate(inv: &FeatureInventory, args: GenerateArgs) -> Result<()> {
    let owned;
    let morph = match args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            owned = Morphology::from_toml_str(&text).with_context(|| format!("bad config {}", path.display()))?;
            &owned
        }
        None => Morphology::default_ref(),
    };
    let entries: Vec<LexiconEntry> = match args.lexicon {
        Some(path) => load_lexicon(open_file(path)?, inv).with_context(|| format!("bad lexicon {}", path.display()))?,
        None => sample_lexicon(),
    };
    let one = |e: &LexiconEntry| -> Result<InflectionTable> {
        let grid = if args.legacy { morph.legacy_grid(e.class)? } else { morph.grid(e.class)? };
        generate_paradigm(e, grid, morph).with_context(|| format!("lemma {}", e.lemma))
    };
    let tables: Vec<InflectionTable> = if args.parallel {
        entries.par_iter().map(one).collect::<Result<_>>()?
    } else {
        entries.iter().map(one).collect::<Result<_>>()?
    };
    let mode = tag_mode(args.flat || args.legacy);
    write_unimorph(open_output(args.output)?, &tables, mode, inv)?;
    Ok(())
}

fn cmd_make_instances(inv: &FeatureInventory, io: &InOut, seed: u64, count: usize, flat: bool) -> Result<()> {
    let mode = tag_mode(flat);
    let tables = group_by_lemma(read_unimorph(open_input(&io.input)?, mode, inv)?, mode)?;
    let instances = make_instances(&tables, seed, count)?;
    write_instances(open_output(&io.output)?, &instances, inv)?;
    Ok(())
}

fn cmd_split(
    inv: &FeatureInventory,
    input: &Option<PathBuf>,
    policy: SplitPolicy,
    sizes: SplitSizes,
    seed: u64,
    out_dir: &Path,
) -> Result<()> {
    let instances = read_instances(open_input(input)?, TagMode::Layered, inv)?;
    let spec = split(policy, &instances, sizes, seed)?;
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    for p in Partition::ALL {
        let path = out_dir.join(format!("{}.tsv", p.name()));
        write_instances(create_file(&path)?, spec.select(&instances, p), inv)?;
    }
    Ok(())
}

fn cmd_evaluate(inv: &FeatureInventory, predictions: &Path, gold: &Path, csv: bool) -> Result<()> {
    let predictions = read_predictions(open_file(predictions)?)?;
    let gold = read_instances(open_file(gold)?, TagMode::Layered, inv)?;
    let report = evaluate(&predictions, &gold)?;
    let mut out = open_output(&None)?;
    if csv {
        write!(out, "{}", report.to_csv())?;
    } else {
        write!(out, "{}", report.to_text())?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_baseline_train(inv: &FeatureInventory, train: &Path, model: &Path, backoff: Backoff) -> Result<()> {
    let train = read_instances(open_file(train)?, TagMode::Layered, inv)?;
    let mut out = create_file(model)?;
    BaselineModel::train_with(&train, backoff).save(&mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_baseline_predict(inv: &FeatureInventory, model: &Path, io: &InOut) -> Result<()> {
    let model = BaselineModel::load(open_file(model)?).context("bad model file")?;
    let queries = read_queries(open_input(&io.input)?, TagMode::Layered, inv)?;
    let mut out = open_output(&io.output)?;
    for form in model.predict_all(&queries) {
        writeln!(out, "{form}")?;
    }
    out.flush()?;
    Ok(())
}

/// Rebuilds a split from its train and test files.
fn read_split_dir(inv: &FeatureInventory, dir: &Path) -> Result<(Vec<ReinflectionInstance>, SplitSpec)> {
    let train = read_instances(open_file(&dir.join("train.tsv"))?, TagMode::Layered, inv)?;
    let test = read_instances(open_file(&dir.join("test.tsv"))?, TagMode::Layered, inv)?;
    let assignment = (0..train.len())
        .map(|i| (i, Partition::Train))
        .chain((train.len()..train.len() + test.len()).map(|i| (i, Partition::Test)))
        .collect();
    let spec = SplitSpec {
        policy: SplitPolicy::Form,
        sizes: SplitSizes::new(train.len(), 0, test.len()),
        seed: 0,
        assignment,
    };
    Ok((train.into_iter().chain(test).collect(), spec))
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    let io_of = |c: &(dyn std::error::Error + 'static)| -> Option<io::ErrorKind> {
        if let Some(e) = c.downcast_ref::<io::Error>() {
            return Some(e.kind());
        }
        match c.downcast_ref::<UniMorphError>() {
            Some(UniMorphError::Io(e)) => Some(e.kind()),
            _ => None,
        }
    };
    e.chain().any(|c| io_of(c) == Some(io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let inv = load_inventory(cli)?;
    match &cli.command {
        Command::Parse { tags } => cmd_parse(&inv, tags)?,
        Command::Convert { direction, io } => cmd_convert(&inv, direction, io)?,
        Command::Validate { input, flat } => {
            let problems = cmd_validate(&inv, input, *flat)?;
            if problems > 0 {
                eprintln!("{problems} problem(s) found");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Generate { lexicon, config, legacy, flat, parallel, output } => cmd_generate(
            &inv,
            GenerateArgs { lexicon, config, legacy: *legacy, flat: *flat, parallel: *parallel, output },
        )?,
        Command::MakeInstances { io, seed, count, flat } => cmd_make_instances(&inv, io, *seed, *count, *flat)?,
        Command::Split { input, policy, sizes, seed, out_dir } => {
            cmd_split(&inv, input, *policy, *sizes, *seed, out_dir)?
        }
        Command::Evaluate { predictions, gold, csv } => cmd_evaluate(&inv, predictions, gold, *csv)?,
        Command::BaselineTrain { train, model, backoff } => cmd_baseline_train(&inv, train, model, (*backoff).into())?,
        Command::BaselinePredict { model, io } => cmd_baseline_predict(&inv, model, io)?,
        Command::LearningCurve {
            split_dir,
            train_sizes,
            seed,
            harness,
            backoff,
            train_cmd,
            predict_cmd,
            work_dir,
            output,
        } => {
            let (instances, spec) = read_split_dir(&inv, split_dir)?;
            let mut harness: Box<dyn Harness> = match harness {
                HarnessArg::Baseline => Box::new(BaselineHarness { backoff: (*backoff).into() }),
                HarnessArg::Command => {
                    let work_dir = work_dir.clone().unwrap_or_else(|| split_dir.join("curve-work"));
                    Box::new(CommandHarness::new(
                        train_cmd.as_deref().unwrap_or_default(),
                        predict_cmd.as_deref().unwrap_or_default(),
                        work_dir,
                    )?)
                }
            };
            let points = learning_curve(train_sizes, harness.as_mut(), &instances, &spec, *seed)?;
            write_curve_csv(open_output(output)?, &points)?;
        }
        Command::Transliterate { reverse, text } => {
            let mut out = open_output(&None)?;
            for (i, line) in items_or_lines(text)?.iter().enumerate() {
                let converted = if *reverse { detransliterate(line) } else { transliterate(line) };
                writeln!(out, "{}", converted.with_context(|| format!("item {}", i + 1))?)?;
            }
            out.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
