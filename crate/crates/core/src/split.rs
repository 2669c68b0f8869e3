//! Reinflection instances and train/dev/test splits.
//!
//! Randomness comes from ChaCha8 seeded with [`rand::SeedableRng::seed_from_u64`],
//! so a seed yields the same split on every platform.
//!
//! Split files hold one instance per line:
//!
//! ```text
//! lemma<TAB>source_tag<TAB>source_form<TAB>target_tag<TAB>target_form
//! ```
//!
//! Model input files drop the last column.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::schema::{FeatureInventory, FeatureStructure, FlatError, TagError};
use crate::unimorph::{InflectionTable, TagMode};

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("table {0} has fewer than 2 cells")]
    TableTooSmall(String),
    #[error("table {lemma} repeats tag {tag}")]
    RepeatedTag { lemma: String, tag: String },
    #[error("requested {requested} instances but only {available} ordered pairs exist")]
    NotEnoughPairs { requested: usize, available: usize },
    #[error("{policy} split needs {needed} instances in {{train, dev, test}} but only {available} can be placed")]
    Unsatisfiable { policy: SplitPolicy, needed: usize, available: usize },
    #[error("line {line}: expected {expected} tab-separated columns, found {found}")]
    ColumnCount { line: usize, expected: &'static str, found: usize },
    #[error("line {line}: {source}")]
    Tag { line: usize, source: TagError },
    #[error("line {line}: {source}")]
    Flat { line: usize, source: FlatError },
    #[error("bad sizes {0:?}: expected TRAIN,DEV,TEST")]
    BadSizes(String),
    #[error("unknown split policy {0:?}")]
    UnknownPolicy(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Source form and both tags; what a model sees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReinflectionQuery {
    pub lemma: String,
    pub source_tag: FeatureStructure,
    pub source_form: String,
    pub target_tag: FeatureStructure,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReinflectionInstance {
    pub lemma: String,
    pub source_tag: FeatureStructure,
    pub source_form: String,
    pub target_tag: FeatureStructure,
    pub target_form: String,
}

impl ReinflectionInstance {
    pub fn query(&self) -> ReinflectionQuery {
        ReinflectionQuery {
            lemma: self.lemma.clone(),
            source_tag: self.source_tag.clone(),
            source_form: self.source_form.clone(),
            target_tag: self.target_tag.clone(),
        }
    }
}

/// Samples `count` distinct ordered cell pairs uniformly over all tables.
/// Output follows table order, then source cell, then target cell.
pub fn make_instances(
    tables: &[InflectionTable],
    seed: u64,
    count: usize,
) -> Result<Vec<ReinflectionInstance>, SplitError> {
    let mut offsets = Vec::with_capacity(tables.len());
    let mut total = 0usize;
    for table in tables {
        let n = table.len();
        if n < 2 {
            return Err(SplitError::TableTooSmall(table.lemma().to_string()));
        }
        let mut seen = std::collections::HashSet::new();
        for cell in table.cells() {
            if !seen.insert(&cell.tag) {
                return Err(SplitError::RepeatedTag { lemma: table.lemma().into(), tag: cell.tag.to_string() });
            }
        }
        offsets.push(total);
        total += n * (n - 1);
    }
    if count > total {
        return Err(SplitError::NotEnoughPairs { requested: count, available: total });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, total, count).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|k| {
            let t = offsets.partition_point(|&o| o <= k) - 1;
            let table = &tables[t];
            let local = k - offsets[t];
            let n = table.len();
            let i = local / (n - 1);
            let mut j = local % (n - 1);
            if j >= i {
                j += 1;
            }
            let (src, tgt) = (&table.cells()[i], &table.cells()[j]);
            ReinflectionInstance {
                lemma: table.lemma().to_string(),
                source_tag: src.tag.clone(),
                source_form: src.form.clone(),
                target_tag: tgt.tag.clone(),
                target_form: tgt.form.clone(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitPolicy {
    /// No (target form, target tag) pair in two partitions.
    Form,
    /// No lemma in two partitions.
    Lemma,
}

impl fmt::Display for SplitPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitPolicy::Form => "form",
            SplitPolicy::Lemma => "lemma",
        })
    }
}

impl FromStr for SplitPolicy {
    type Err = SplitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "form" => Ok(SplitPolicy::Form),
            "lemma" => Ok(SplitPolicy::Lemma),
            _ => Err(SplitError::UnknownPolicy(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Partition {
    Train,
    Dev,
    Test,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::Train, Partition::Dev, Partition::Test];

    pub fn name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Dev => "dev",
            Partition::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSizes {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

impl SplitSizes {
    pub const fn new(train: usize, dev: usize, test: usize) -> Self {
        SplitSizes { train, dev, test }
    }

    pub fn get(&self, p: Partition) -> usize {
        match p {
            Partition::Train => self.train,
            Partition::Dev => self.dev,
            Partition::Test => self.test,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.dev + self.test
    }
}

impl FromStr for SplitSizes {
    type Err = SplitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| SplitError::BadSizes(s.to_string()))?;
        match parts[..] {
            [train, dev, test] => Ok(SplitSizes { train, dev, test }),
            _ => Err(SplitError::BadSizes(s.to_string())),
        }
    }
}

/// Assignment of instance indices to partitions. Instances left out of
/// every partition were trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub policy: SplitPolicy,
    pub sizes: SplitSizes,
    pub seed: u64,
    pub assignment: BTreeMap<usize, Partition>,
}

impl SplitSpec {
    /// Indices in one partition, ascending.
    pub fn indices(&self, partition: Partition) -> Vec<usize> {
        self.assignment.iter().filter(|(_, p)| **p == partition).map(|(i, _)| *i).collect()
    }

    pub fn select<'a>(
        &self,
        instances: &'a [ReinflectionInstance],
        partition: Partition,
    ) -> Vec<&'a ReinflectionInstance> {
        self.indices(partition).into_iter().map(|i| &instances[i]).collect()
    }
}

pub fn split_form(instances: &[ReinflectionInstance], sizes: SplitSizes, seed: u64) -> Result<SplitSpec, SplitError> {
    // structural equality of tags is equality of their canonical strings
    split_by(instances, sizes, seed, SplitPolicy::Form, |x| (x.target_form.as_str(), &x.target_tag))
}

pub fn split_lemma(instances: &[ReinflectionInstance], sizes: SplitSizes, seed: u64) -> Result<SplitSpec, SplitError> {
    split_by(instances, sizes, seed, SplitPolicy::Lemma, |x| x.lemma.as_str())
}

pub fn split(
    policy: SplitPolicy,
    instances: &[ReinflectionInstance],
    sizes: SplitSizes,
    seed: u64,
) -> Result<SplitSpec, SplitError> {
    match policy {
        SplitPolicy::Form => split_form(instances, sizes, seed),
        SplitPolicy::Lemma => split_lemma(instances, sizes, seed),
    }
}

/// Groups instances by `key`, shuffles the groups and fills test, dev and
/// train in that order with whole groups. The group that overflows a
/// partition is trimmed and its remainder discarded.
fn split_by<'a, K, F>(
    instances: &'a [ReinflectionInstance],
    sizes: SplitSizes,
    seed: u64,
    policy: SplitPolicy,
    key: F,
) -> Result<SplitSpec, SplitError>
where
    K: std::hash::Hash + Eq,
    F: Fn(&'a ReinflectionInstance) -> K,
{
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let g = *index.entry(key(inst)).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    groups.shuffle(&mut rng);
    for group in &mut groups {
        group.shuffle(&mut rng);
    }

    let order = [Partition::Test, Partition::Dev, Partition::Train];
    let mut current = 0;
    let mut filled = 0;
    let mut assignment = BTreeMap::new();
    for group in groups {
        while current < order.len() && filled == sizes.get(order[current]) {
            current += 1;
            filled = 0;
        }
        if current == order.len() {
            break;
        }
        let room = sizes.get(order[current]) - filled;
        for &i in group.iter().take(room) {
            assignment.insert(i, order[current]);
        }
        filled += group.len().min(room);
    }
    if assignment.len() < sizes.total() {
        return Err(SplitError::Unsatisfiable { policy, needed: sizes.total(), available: assignment.len() });
    }
    Ok(SplitSpec { policy, sizes, seed, assignment })
}

/// Writes the five-column split format.
pub fn write_instances<'a, W, I>(mut writer: W, instances: I, inv: &FeatureInventory) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ReinflectionInstance>,
{
    for x in instances {
        writeln!(
            writer,
            "{}\t{}\t{}\t{}\t{}",
            x.lemma,
            inv.render(&x.source_tag),
            x.source_form,
            inv.render(&x.target_tag),
            x.target_form
        )?;
    }
    writer.flush()
}

/// Writes model input: the split format without the target form.
pub fn write_queries<'a, W, I>(mut writer: W, instances: I, inv: &FeatureInventory) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ReinflectionInstance>,
{
    for x in instances {
        writeln!(
            writer,
            "{}\t{}\t{}\t{}",
            x.lemma,
            inv.render(&x.source_tag),
            x.source_form,
            inv.render(&x.target_tag)
        )?;
    }
    writer.flush()
}

fn parse_line_tag(
    text: &str,
    line: usize,
    mode: TagMode,
    inv: &FeatureInventory,
) -> Result<FeatureStructure, SplitError> {
    match mode {
        TagMode::Layered => inv.parse_tag(text).map_err(|source| SplitError::Tag { line, source }),
        TagMode::Flat => inv.from_flat(text).map_err(|source| SplitError::Flat { line, source }),
    }
}

fn read_rows<R: BufRead>(
    reader: R,
    accept: &[usize],
    expected: &'static str,
) -> Result<Vec<(usize, Vec<String>)>, SplitError> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if !accept.contains(&fields.len()) {
            return Err(SplitError::ColumnCount { line: i + 1, expected, found: fields.len() });
        }
        rows.push((i + 1, fields));
    }
    Ok(rows)
}

/// Reads a five-column split file. In flat mode tags are converted with
/// `from_flat`, so legacy files take the layered scheme.
pub fn read_instances<R: BufRead>(
    reader: R,
    mode: TagMode,
    inv: &FeatureInventory,
) -> Result<Vec<ReinflectionInstance>, SplitError> {
    read_rows(reader, &[5], "5")?
        .into_iter()
        .map(|(line, f)| {
            Ok(ReinflectionInstance {
                source_tag: parse_line_tag(&f[1], line, mode, inv)?,
                target_tag: parse_line_tag(&f[3], line, mode, inv)?,
                lemma: f[0].clone(),
                source_form: f[2].clone(),
                target_form: f[4].clone(),
            })
        })
        .collect()
}

/// Reads model input. A fifth column, if present, is ignored.
pub fn read_queries<R: BufRead>(
    reader: R,
    mode: TagMode,
    inv: &FeatureInventory,
) -> Result<Vec<ReinflectionQuery>, SplitError> {
    read_rows(reader, &[4, 5], "4 or 5")?
        .into_iter()
        .map(|(line, f)| {
            Ok(ReinflectionQuery {
                source_tag: parse_line_tag(&f[1], line, mode, inv)?,
                target_tag: parse_line_tag(&f[3], line, mode, inv)?,
                lemma: f[0].clone(),
                source_form: f[2].clone(),
            })
        })
        .collect()
}
