//! Georgian verb paradigm generation.
//!
//! A lexicon of principal parts is expanded into full inflection tables by
//! filling a fixed template of morpheme slots:
//!
//! ```text
//! preverb | agreement prefix | version vowel | stem | thematic | screeve suffix | agreement suffixes
//! ```
//!
//! Marker tables, slot templates and paradigm grids are data, read from a
//! TOML file ([`Morphology`]). A default configuration and a small sample
//! lexicon are embedded in the crate.

mod lexicon;
mod morphology;
mod paradigm;
mod screeve;
pub mod translit;

use thiserror::Error;

use crate::schema::TagError;

pub use lexicon::{load_lexicon, sample_lexicon, LexiconEntry, PartOverride, SAMPLE_LEXICON};
pub use morphology::{
    AgreementMarkerTable, Marker, MarkerKind, Morphology, ParadigmGrid, ScreeveTemplate, SuffixRules, DEFAULT_CONFIG,
};
pub use paradigm::{decode_slot, generate_form, generate_paradigm, paradigm_slots, Slot};
pub use screeve::{Number, PersonNumber, Screeve, Series, VerbClass};
pub use translit::{detransliterate, transliterate, TranslitError};

#[derive(Debug, Error)]
pub enum GeorgianError {
    #[error("unknown verb class {0:?}")]
    UnknownClass(String),
    #[error("unknown screeve or series {0:?}")]
    UnknownScreeve(String),
    #[error("bad person/number cell {0:?}")]
    BadCell(String),
    #[error("lexicon line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("lexicon line {line}: duplicate lemma {lemma}")]
    DuplicateLemma { line: usize, lemma: String },
    #[error("lexicon line {line}: exception tag: {source}")]
    ExceptionTag { line: usize, source: TagError },
    #[error("config: {0}")]
    Config(String),
    #[error("{tag} is not a paradigm slot of {lemma} ({class})")]
    OutsideGrid { lemma: String, class: VerbClass, tag: String },
    #[error("no {kind} marker for {cell} ({class}, {screeve})")]
    MissingMarker { kind: MarkerKind, cell: PersonNumber, class: VerbClass, screeve: Screeve },
    #[error("no slot template for {class} in the {screeve}")]
    MissingTemplate { class: VerbClass, screeve: Screeve },
    #[error("no paradigm grid for {0}")]
    MissingGrid(VerbClass),
    #[error("reading lexicon: {0}")]
    Io(#[from] std::io::Error),
}
