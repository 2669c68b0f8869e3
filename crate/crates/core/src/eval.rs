//! Exact-match accuracy, average edit distance and learning curves.
//!
//! Forms are NFC-normalized before comparison. Edit distance counts
//! Unicode scalar values, so one Georgian letter costs one edit.

use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::baseline::{Backoff, BaselineModel};
use crate::schema::FeatureInventory;
use crate::split::{write_instances, write_queries, Partition, ReinflectionInstance, ReinflectionQuery, SplitSpec};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{predictions} predictions for {gold} gold instances")]
    LengthMismatch { predictions: usize, gold: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("train sizes must ascend and not exceed {available}: {sizes:?}")]
    BadTrainSizes { sizes: Vec<usize>, available: usize },
    #[error("bad harness template {0:?}")]
    BadTemplate(String),
    #[error("`{command}` exited with {status}: {stderr}")]
    Harness { command: String, status: String, stderr: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Levenshtein distance with unit costs over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if ca == cb { diag } else { 1 + diag.min(above).min(row[j]) };
            diag = above;
        }
    }
    row[b.len()]
}

fn nfc(s: &str) -> String {
    s.nfc().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub prediction: String,
    pub gold: String,
    pub correct: bool,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub avg_edit_distance: f64,
    pub n: usize,
    pub records: Vec<InstanceRecord>,
}

impl EvalReport {
    pub fn to_text(&self) -> String {
        format!(
            "instances: {}\naccuracy: {:.4}\navg edit distance: {:.4}\n",
            self.n, self.accuracy, self.avg_edit_distance
        )
    }

    pub fn to_csv(&self) -> String {
        format!("n,accuracy,avg_ed\n{},{:.6},{:.6}\n", self.n, self.accuracy, self.avg_edit_distance)
    }
}

/// Scores `predictions` against the aligned gold target forms.
pub fn evaluate<S: AsRef<str>>(predictions: &[S], gold: &[ReinflectionInstance]) -> Result<EvalReport, EvalError> {
    if predictions.len() != gold.len() {
        return Err(EvalError::LengthMismatch { predictions: predictions.len(), gold: gold.len() });
    }
    if gold.is_empty() {
        return Err(EvalError::Empty);
    }
    let records: Vec<InstanceRecord> = predictions
        .iter()
        .zip(gold)
        .map(|(p, g)| {
            let prediction = nfc(p.as_ref());
            let gold = nfc(&g.target_form);
            let distance = edit_distance(&prediction, &gold);
            InstanceRecord { correct: distance == 0, distance, prediction, gold }
        })
        .collect();
    let n = records.len();
    let correct = records.iter().filter(|r| r.correct).count();
    let total: usize = records.iter().map(|r| r.distance).sum();
    Ok(EvalReport { accuracy: correct as f64 / n as f64, avg_edit_distance: total as f64 / n as f64, n, records })
}

/// Reads a predictions file: one form per line, blank lines kept as
/// empty predictions.
pub fn read_predictions<R: BufRead>(reader: R) -> io::Result<Vec<String>> {
    reader.lines().collect()
}

/// Something that trains on instances and predicts target forms.
pub trait Harness {
    fn run(&mut self, train: &[ReinflectionInstance], test: &[ReinflectionQuery]) -> Result<Vec<String>, EvalError>;
}

/// The in-process rule baseline.
#[derive(Debug, Default)]
pub struct BaselineHarness {
    pub backoff: Backoff,
}

impl Harness for BaselineHarness {
    fn run(&mut self, train: &[ReinflectionInstance], test: &[ReinflectionQuery]) -> Result<Vec<String>, EvalError> {
        Ok(BaselineModel::train_with(train, self.backoff).predict_all(test))
    }
}

/// External train and predict commands.
///
/// Templates are split shell-style, then the placeholders `{train}`,
/// `{model}`, `{input}` and `{output}` are replaced inside each word.
/// `{train}` is a five-column split file, `{input}` the four-column model
/// input, and the predict command must write one form per line to
/// `{output}`. `{model}` is a path the train command may create.
#[derive(Debug, Clone)]
pub struct CommandHarness {
    train: Vec<String>,
    predict: Vec<String>,
    work_dir: PathBuf,
    runs: usize,
}

impl CommandHarness {
    pub fn new(train: &str, predict: &str, work_dir: impl Into<PathBuf>) -> Result<Self, EvalError> {
        let words =
            |t: &str| shlex::split(t).filter(|w| !w.is_empty()).ok_or_else(|| EvalError::BadTemplate(t.to_string()));
        Ok(CommandHarness { train: words(train)?, predict: words(predict)?, work_dir: work_dir.into(), runs: 0 })
    }

    fn exec(template: &[String], vars: &[(&str, &Path)]) -> Result<(), EvalError> {
        let words: Vec<String> = template
            .iter()
            .map(|w| {
                vars.iter()
                    .fold(w.clone(), |acc, (name, path)| acc.replace(&format!("{{{name}}}"), &path.to_string_lossy()))
            })
            .collect();
        let output = Command::new(&words[0]).args(&words[1..]).output()?;
        if !output.status.success() {
            return Err(EvalError::Harness {
                command: shlex::try_join(words.iter().map(String::as_str)).unwrap_or_else(|_| words.join(" ")),
                status: output.status.to_string(),
                stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }
        Ok(())
    }
}

impl Harness for CommandHarness {
    fn run(&mut self, train: &[ReinflectionInstance], test: &[ReinflectionQuery]) -> Result<Vec<String>, EvalError> {
        let dir = self.work_dir.join(format!("run-{}", self.runs));
        self.runs += 1;
        fs::create_dir_all(&dir)?;
        let inv = FeatureInventory::default_ref();
        let train_path = dir.join("train.tsv");
        let input_path = dir.join("input.tsv");
        let output_path = dir.join("predictions.txt");
        let model_path = dir.join("model");
        write_instances(BufWriter::new(fs::File::create(&train_path)?), train, inv)?;
        let mut input = BufWriter::new(fs::File::create(&input_path)?);
        for q in test {
            writeln!(
                input,
                "{}\t{}\t{}\t{}",
                q.lemma,
                inv.render(&q.source_tag),
                q.source_form,
                inv.render(&q.target_tag)
            )?;
        }
        input.flush()?;
        drop(input);

        let vars: [(&str, &Path); 4] =
            [("train", &train_path), ("model", &model_path), ("input", &input_path), ("output", &output_path)];
        Self::exec(&self.train, &vars)?;
        Self::exec(&self.predict, &vars)?;
        Ok(read_predictions(io::BufReader::new(fs::File::open(&output_path)?))?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub train_size: usize,
    pub accuracy: f64,
    pub avg_edit_distance: f64,
}

/// Trains on nested subsamples of the train partition (each size a
/// prefix of one seeded shuffle) and scores on the test partition.
pub fn learning_curve(
    train_sizes: &[usize],
    harness: &mut dyn Harness,
    instances: &[ReinflectionInstance],
    spec: &SplitSpec,
    seed: u64,
) -> Result<Vec<CurvePoint>, EvalError> {
    let mut train = spec.indices(Partition::Train);
    let ascending = train_sizes.windows(2).all(|w| w[0] < w[1]);
    if !ascending || train_sizes.last().is_some_and(|&n| n > train.len()) {
        return Err(EvalError::BadTrainSizes { sizes: train_sizes.to_vec(), available: train.len() });
    }
    if train_sizes.is_empty() {
        return Ok(Vec::new());
    }
    train.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let gold: Vec<ReinflectionInstance> = spec.select(instances, Partition::Test).into_iter().cloned().collect();
    let queries: Vec<ReinflectionQuery> = gold.iter().map(ReinflectionInstance::query).collect();

    let mut points = Vec::with_capacity(train_sizes.len());
    for &size in train_sizes {
        let subset: Vec<ReinflectionInstance> = train[..size].iter().map(|&i| instances[i].clone()).collect();
        let predictions = harness.run(&subset, &queries)?;
        let report = evaluate(&predictions, &gold)?;
        points.push(CurvePoint {
            train_size: size,
            accuracy: report.accuracy,
            avg_edit_distance: report.avg_edit_distance,
        });
    }
    Ok(points)
}

pub fn write_curve_csv<W: Write>(mut writer: W, points: &[CurvePoint]) -> io::Result<()> {
    writeln!(writer, "train_size,accuracy,avg_ed")?;
    for p in points {
        writeln!(writer, "{},{:.6},{:.6}", p.train_size, p.accuracy, p.avg_edit_distance)?;
    }
    writer.flush()
}

/// Writes model input for `partition` (helper for external models).
pub fn write_partition_queries<W: Write>(
    writer: W,
    instances: &[ReinflectionInstance],
    spec: &SplitSpec,
    partition: Partition,
) -> io::Result<()> {
    write_queries(writer, spec.select(instances, partition), FeatureInventory::default_ref())
}
