//! UniMorph three-column files (`lemma<TAB>form<TAB>tag`) and inflection
//! tables.
//!
//! Files are UTF-8 with Unix newlines and no header. Blank lines separate
//! tables on write and are ignored on read. Fields are taken verbatim
//! between tabs, so multi-word lemmas and forms with spaces survive.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::schema::{FeatureInventory, FeatureStructure, FlatError, TagError};

/// How the third column is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TagMode {
    /// Inline layered tags, validated against the inventory.
    #[default]
    Layered,
    /// Legacy flat tags, converted with `from_flat`. Variant rows sharing
    /// one tag are preserved.
    Flat,
}

#[derive(Debug, Error)]
pub enum UniMorphError {
    #[error("line {line}: expected 3 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: empty {field}")]
    EmptyField { line: usize, field: &'static str },
    #[error("line {line}: {source}")]
    Tag { line: usize, source: TagError },
    #[error("line {line}: {source}")]
    Flat { line: usize, source: FlatError },
    #[error("duplicate cell {tag} in table {lemma}")]
    DuplicateCell { lemma: String, tag: String },
    #[error("table {0} has no cells")]
    EmptyTable(String),
    #[error("cannot write {tag} as a flat tag: {source}")]
    Unflattenable { tag: String, source: FlatError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniMorphEntry {
    pub lemma: String,
    pub form: String,
    pub tag: FeatureStructure,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub tag: FeatureStructure,
    pub form: String,
}

/// All forms of one lemma. Outside legacy data each tag labels exactly one
/// cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectionTable {
    lemma: String,
    cells: Vec<Cell>,
}

impl InflectionTable {
    /// A table with one form per tag.
    pub fn new(lemma: impl Into<String>, cells: Vec<Cell>) -> Result<Self, UniMorphError> {
        let lemma = lemma.into();
        let mut seen = std::collections::HashSet::new();
        for cell in &cells {
            if !seen.insert(&cell.tag) {
                return Err(UniMorphError::DuplicateCell { lemma, tag: cell.tag.to_string() });
            }
        }
        Self::with_variants(lemma, cells)
    }

    /// A legacy table that may hold several variant forms for one tag.
    pub fn with_variants(lemma: impl Into<String>, cells: Vec<Cell>) -> Result<Self, UniMorphError> {
        let lemma = lemma.into();
        if cells.is_empty() {
            return Err(UniMorphError::EmptyTable(lemma));
        }
        Ok(InflectionTable { lemma, cells })
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn form_for(&self, tag: &FeatureStructure) -> Option<&str> {
        self.cells.iter().find(|c| &c.tag == tag).map(|c| c.form.as_str())
    }

    /// Cells ordered by canonical tag string, then form.
    pub fn sorted_cells(&self, inv: &FeatureInventory) -> Vec<(String, &Cell)> {
        let mut cells: Vec<(String, &Cell)> = self.cells.iter().map(|c| (inv.render(&c.tag), c)).collect();
        cells.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.form.cmp(&b.1.form)));
        cells
    }
}

/// Reads entries in file order.
pub fn read_unimorph<R: BufRead>(
    reader: R,
    mode: TagMode,
    inv: &FeatureInventory,
) -> Result<Vec<UniMorphEntry>, UniMorphError> {
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [lemma, form, tag] = fields[..] else {
            return Err(UniMorphError::ColumnCount { line: line_no, found: fields.len() });
        };
        if lemma.is_empty() {
            return Err(UniMorphError::EmptyField { line: line_no, field: "lemma" });
        }
        if form.is_empty() {
            return Err(UniMorphError::EmptyField { line: line_no, field: "form" });
        }
        let tag = match mode {
            TagMode::Layered => inv.parse_tag(tag).map_err(|source| UniMorphError::Tag { line: line_no, source })?,
            TagMode::Flat => inv.from_flat(tag).map_err(|source| UniMorphError::Flat { line: line_no, source })?,
        };
        entries.push(UniMorphEntry { lemma: lemma.to_string(), form: form.to_string(), tag });
    }
    Ok(entries)
}

/// Groups entries into one table per lemma, in order of first appearance.
/// Duplicate `(lemma, tag)` cells are an error in layered mode and kept as
/// variants in flat mode.
pub fn group_by_lemma(entries: Vec<UniMorphEntry>, mode: TagMode) -> Result<Vec<InflectionTable>, UniMorphError> {
    let mut order: Vec<String> = Vec::new();
    let mut grouped: HashMap<String, Vec<Cell>> = HashMap::new();
    for entry in entries {
        let cells = grouped.entry(entry.lemma.clone()).or_insert_with(|| {
            order.push(entry.lemma.clone());
            Vec::new()
        });
        cells.push(Cell { tag: entry.tag, form: entry.form });
    }
    order
        .into_iter()
        .map(|lemma| {
            let cells = grouped.remove(&lemma).expect("grouped lemma");
            match mode {
                TagMode::Layered => InflectionTable::new(lemma, cells),
                TagMode::Flat => InflectionTable::with_variants(lemma, cells),
            }
        })
        .collect()
}

/// Writes tables sorted by lemma, cells sorted by canonical tag, one blank
/// line between tables. In flat mode tags are written through `to_flat`.
pub fn write_unimorph<W: Write>(
    mut writer: W,
    tables: &[InflectionTable],
    mode: TagMode,
    inv: &FeatureInventory,
) -> Result<(), UniMorphError> {
    let mut sorted: Vec<&InflectionTable> = tables.iter().collect();
    sorted.sort_by(|a, b| a.lemma.cmp(&b.lemma));
    for (i, table) in sorted.into_iter().enumerate() {
        if i > 0 {
            writeln!(writer)?;
        }
        for (rendered, cell) in table.sorted_cells(inv) {
            let tag = match mode {
                TagMode::Layered => rendered,
                TagMode::Flat => {
                    inv.to_flat(&cell.tag).map_err(|source| UniMorphError::Unflattenable { tag: rendered, source })?
                }
            };
            writeln!(writer, "{}\t{}\t{}", table.lemma, cell.form, tag)?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parse_tag;

    fn inv() -> &'static FeatureInventory {
        FeatureInventory::default_ref()
    }

    fn read(text: &str) -> Result<Vec<UniMorphEntry>, UniMorphError> {
        read_unimorph(text.as_bytes(), TagMode::Layered, inv())
    }

    fn entry(lemma: &str, form: &str, tag: &str) -> UniMorphEntry {
        UniMorphEntry { lemma: lemma.into(), form: form.into(), tag: parse_tag(tag).unwrap() }
    }

    #[test]
    fn minimal_line() {
        let entries = read("L\tF\tV\n").unwrap();
        assert_eq!(entries, vec![entry("L", "F", "V")]);
    }

    #[test]
    fn wrong_column_count_reports_line() {
        let err = read("L\tF\tV\nL\tF\n").unwrap_err();
        assert!(matches!(err, UniMorphError::ColumnCount { line: 2, found: 2 }));
    }

    #[test]
    fn bad_tag_reports_line() {
        let err = read("\nL\tF\tV;PRS;FUT\n").unwrap_err();
        assert!(matches!(err, UniMorphError::Tag { line: 2, .. }));
    }

    #[test]
    fn flat_mode_converts() {
        let text = "gašveba\tgagišvebt\tV;FUT;ARGNO1P;ARGAC2S\n";
        let entries = read_unimorph(text.as_bytes(), TagMode::Flat, inv()).unwrap();
        assert_eq!(entries[0].tag.to_string(), "V;FUT;NOM(1;PL);ACC(2;SG)");
    }

    #[test]
    fn fields_with_spaces_are_verbatim() {
        let entries = read("give up\tgave up\tV;PST\n").unwrap();
        assert_eq!(entries[0].lemma, "give up");
        assert_eq!(entries[0].form, "gave up");
    }

    #[test]
    fn grouping_counts() {
        let entries = vec![entry("A", "a1", "V;PRS"), entry("A", "a2", "V;PST"), entry("B", "b1", "V;PRS")];
        let tables = group_by_lemma(entries, TagMode::Layered).unwrap();
        assert_eq!(tables.len(), 2);
        assert_eq!((tables[0].lemma(), tables[0].len()), ("A", 2));
        assert_eq!((tables[1].lemma(), tables[1].len()), ("B", 1));
        assert!(group_by_lemma(Vec::new(), TagMode::Layered).unwrap().is_empty());
    }

    #[test]
    fn duplicate_cell_names_the_cell() {
        let entries = vec![entry("A", "a1", "V;PRS"), entry("A", "a2", "V;PRS")];
        match group_by_lemma(entries.clone(), TagMode::Layered) {
            Err(UniMorphError::DuplicateCell { lemma, tag }) => {
                assert_eq!((lemma.as_str(), tag.as_str()), ("A", "V;PRS"));
            }
            other => panic!("expected duplicate cell, got {other:?}"),
        }
        let legacy = group_by_lemma(entries, TagMode::Flat).unwrap();
        assert_eq!(legacy[0].len(), 2);
    }

    #[test]
    fn write_empty_list() {
        let mut out = Vec::new();
        write_unimorph(&mut out, &[], TagMode::Layered, inv()).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn one_entry_round_trip_is_byte_identical() {
        let text = "L\tF\tV;FUT;NOM(1;PL);ACC(2;SG)\n";
        let tables = group_by_lemma(read(text).unwrap(), TagMode::Layered).unwrap();
        let mut out = Vec::new();
        write_unimorph(&mut out, &tables, TagMode::Layered, inv()).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn write_sorts_and_separates_tables() {
        let entries = vec![entry("B", "b1", "V;PRS"), entry("A", "a2", "V;PST"), entry("A", "a1", "V;FUT")];
        let tables = group_by_lemma(entries, TagMode::Layered).unwrap();
        let mut out = Vec::new();
        write_unimorph(&mut out, &tables, TagMode::Layered, inv()).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "A\ta1\tV;FUT\nA\ta2\tV;PST\n\nB\tb1\tV;PRS\n");
    }

    #[test]
    fn flat_write() {
        let tables = group_by_lemma(vec![entry("L", "F", "V;FUT;NOM(1;PL);ACC(3;SG)")], TagMode::Layered).unwrap();
        let mut out = Vec::new();
        write_unimorph(&mut out, &tables, TagMode::Flat, inv()).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "L\tF\tV;FUT;ARGNO1P;ARGAC3S\n");
    }
}
