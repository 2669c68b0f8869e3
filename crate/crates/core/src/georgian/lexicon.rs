//! Lexicon files.
//!
//! One TAB-separated record per lemma:
//!
//! ```text
//! lemma  class  stem  preverb  version  thematic
//! ```
//!
//! `-` or an empty field stands for an empty morpheme. Indented lines
//! after a record add principal parts and exceptions:
//!
//! ```text
//!     part       aorist,optative   stem=კალ thematic=-
//!     exception  V;PRS;NOM(3;SG);ACC(3;SG)   კლავს
//! ```
//!
//! Part keys are screeve names or series names (`series-I` .. `series-IV`,
//! `perfective`). Lines starting with `#` are comments.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use crate::schema::FeatureInventory;

use super::{GeorgianError, Screeve, Series, VerbClass};

pub const SAMPLE_LEXICON: &str = include_str!("../../data/sample_lexicon.tsv");

/// Lemma-specific replacements for one screeve or series.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartOverride {
    pub stem: Option<String>,
    pub thematic: Option<String>,
    pub version: Option<String>,
    /// Selects an alternative group of templates and markers.
    pub conjugation: Option<String>,
}

impl PartOverride {
    /// Field-wise: values already set in `self` win.
    fn fill_from(&mut self, other: &PartOverride) {
        for (mine, theirs) in [
            (&mut self.stem, &other.stem),
            (&mut self.thematic, &other.thematic),
            (&mut self.version, &other.version),
            (&mut self.conjugation, &other.conjugation),
        ] {
            if mine.is_none() {
                mine.clone_from(theirs);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub lemma: String,
    pub class: VerbClass,
    pub stem: String,
    pub preverb: String,
    pub version: String,
    pub thematic: String,
    /// Keyed by screeve name or numbered series name.
    pub principal_parts: BTreeMap<String, PartOverride>,
    /// Canonical tag string to full surface form.
    pub exceptions: BTreeMap<String, String>,
}

impl LexiconEntry {
    pub fn new(lemma: &str, class: VerbClass, stem: &str) -> Self {
        LexiconEntry {
            lemma: lemma.to_string(),
            class,
            stem: stem.to_string(),
            preverb: String::new(),
            version: String::new(),
            thematic: String::new(),
            principal_parts: BTreeMap::new(),
            exceptions: BTreeMap::new(),
        }
    }

    /// Overrides in force for `screeve`, screeve-specific ones first.
    pub fn part_for(&self, screeve: Screeve) -> PartOverride {
        let mut part = PartOverride::default();
        for key in [screeve.name(), screeve.series().numbered()] {
            if let Some(p) = self.principal_parts.get(key) {
                part.fill_from(p);
            }
        }
        part
    }
}

fn part_key(raw: &str) -> Result<String, GeorgianError> {
    let raw = raw.trim();
    if let Ok(screeve) = raw.parse::<Screeve>() {
        return Ok(screeve.name().to_string());
    }
    Series::ALL
        .into_iter()
        .find(|s| s.numbered().eq_ignore_ascii_case(raw) || (*s == Series::Perfective && raw == "perfective"))
        .map(|s| s.numbered().to_string())
        .ok_or_else(|| GeorgianError::UnknownScreeve(raw.to_string()))
}

fn morpheme(field: &str) -> String {
    match field.trim() {
        "-" => String::new(),
        other => other.to_string(),
    }
}

/// Parses a lexicon. Exception tags are validated against `inv` and stored
/// in canonical form.
pub fn load_lexicon<R: BufRead>(reader: R, inv: &FeatureInventory) -> Result<Vec<LexiconEntry>, GeorgianError> {
    let mut entries: Vec<LexiconEntry> = Vec::new();
    let mut lemmas = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let malformed = |message: String| GeorgianError::Malformed { line: line_no, message };
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }

        if line.starts_with([' ', '\t']) {
            let Some(entry) = entries.last_mut() else {
                return Err(malformed("continuation line before any record".into()));
            };
            let fields: Vec<&str> = line.trim().split('\t').filter(|f| !f.is_empty()).collect();
            match fields.as_slice() {
                ["part", keys, props] => {
                    let mut part = PartOverride::default();
                    for prop in props.split_whitespace() {
                        let Some((k, v)) = prop.split_once('=') else {
                            return Err(malformed(format!("expected key=value, got {prop:?}")));
                        };
                        let slot = match k {
                            "stem" => &mut part.stem,
                            "thematic" => &mut part.thematic,
                            "version" => &mut part.version,
                            "conjugation" => &mut part.conjugation,
                            _ => return Err(malformed(format!("unknown part property {k:?}"))),
                        };
                        *slot = Some(morpheme(v));
                    }
                    if part.stem.as_deref() == Some("") {
                        return Err(malformed("empty stem override".into()));
                    }
                    for key in keys.split(',') {
                        let key = part_key(key)?;
                        entry.principal_parts.entry(key).or_default().fill_from(&part);
                    }
                }
                ["exception", tag, form] => {
                    let fs =
                        inv.parse_tag(tag).map_err(|source| GeorgianError::ExceptionTag { line: line_no, source })?;
                    let key = inv.render(&fs);
                    if entry.exceptions.insert(key.clone(), form.to_string()).is_some() {
                        return Err(malformed(format!("duplicate exception for {key}")));
                    }
                }
                _ => return Err(malformed("expected `part` or `exception` continuation".into())),
            }
            continue;
        }

        let fields: Vec<&str> = line.split('\t').collect();
        let [lemma, class, stem, preverb, version, thematic] = fields[..] else {
            return Err(malformed(format!("expected 6 tab-separated fields, found {}", fields.len())));
        };
        let lemma = lemma.trim();
        if lemma.is_empty() {
            return Err(malformed("empty lemma".into()));
        }
        let class: VerbClass = class.parse()?;
        let stem = morpheme(stem);
        if stem.is_empty() {
            return Err(malformed(format!("empty stem for {lemma}")));
        }
        if !lemmas.insert(lemma.to_string()) {
            return Err(GeorgianError::DuplicateLemma { line: line_no, lemma: lemma.to_string() });
        }
        entries.push(LexiconEntry {
            lemma: lemma.to_string(),
            class,
            stem,
            preverb: morpheme(preverb),
            version: morpheme(version),
            thematic: morpheme(thematic),
            principal_parts: BTreeMap::new(),
            exceptions: BTreeMap::new(),
        });
    }
    Ok(entries)
}

/// The embedded sample lexicon.
pub fn sample_lexicon() -> Vec<LexiconEntry> {
    load_lexicon(SAMPLE_LEXICON.as_bytes(), FeatureInventory::default_ref()).expect("embedded sample lexicon")
}
