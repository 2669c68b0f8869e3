use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::schema::{Feature, FeatureStructure, Role};

use super::GeorgianError;

/// The five conjugation classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerbClass {
    Transitive,
    Intransitive,
    Medial,
    Indirect,
    Stative,
}

impl VerbClass {
    pub const ALL: [VerbClass; 5] =
        [VerbClass::Transitive, VerbClass::Intransitive, VerbClass::Medial, VerbClass::Indirect, VerbClass::Stative];

    pub fn name(self) -> &'static str {
        match self {
            VerbClass::Transitive => "transitive",
            VerbClass::Intransitive => "intransitive",
            VerbClass::Medial => "medial",
            VerbClass::Indirect => "indirect",
            VerbClass::Stative => "stative",
        }
    }

    /// Role of the grid's first argument. Transitive and medial verbs mark
    /// it ergative in the aorist series; indirect and stative verbs have a
    /// dative experiencer.
    pub fn subject_role(self, screeve: Screeve) -> Role {
        match self {
            VerbClass::Transitive | VerbClass::Medial if screeve.series() == Series::Aorist => Role::new("ERG"),
            VerbClass::Transitive | VerbClass::Medial | VerbClass::Intransitive => Role::new("NOM"),
            VerbClass::Indirect | VerbClass::Stative => Role::new("DAT"),
        }
    }

    /// Role of the grid's second argument.
    pub fn object_role(self) -> Role {
        match self {
            VerbClass::Transitive | VerbClass::Medial => Role::new("ACC"),
            VerbClass::Intransitive => Role::new("DAT"),
            VerbClass::Indirect | VerbClass::Stative => Role::new("NOM"),
        }
    }
}

impl fmt::Display for VerbClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerbClass {
    type Err = GeorgianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VerbClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| GeorgianError::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Series {
    /// Present and future sub-series.
    SeriesI,
    Aorist,
    Perfective,
    Imperative,
}

impl Series {
    pub const ALL: [Series; 4] = [Series::SeriesI, Series::Aorist, Series::Perfective, Series::Imperative];

    pub fn name(self) -> &'static str {
        match self {
            Series::SeriesI => "series-I",
            Series::Aorist => "aorist",
            Series::Perfective => "perfective",
            Series::Imperative => "imperative",
        }
    }

    /// Numbered alias used where a series name would collide with a
    /// screeve name.
    pub fn numbered(self) -> &'static str {
        match self {
            Series::SeriesI => "series-I",
            Series::Aorist => "series-II",
            Series::Perfective => "series-III",
            Series::Imperative => "series-IV",
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The twelve tense-aspect-mood rows of the verb paradigm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Screeve {
    Present,
    Imperfect,
    PresentSubjunctive,
    Future,
    Conditional,
    FutureSubjunctive,
    Aorist,
    Optative,
    Perfect,
    Pluperfect,
    PerfectSubjunctive,
    Imperative,
}

impl Screeve {
    pub const ALL: [Screeve; 12] = [
        Screeve::Present,
        Screeve::Imperfect,
        Screeve::PresentSubjunctive,
        Screeve::Future,
        Screeve::Conditional,
        Screeve::FutureSubjunctive,
        Screeve::Aorist,
        Screeve::Optative,
        Screeve::Perfect,
        Screeve::Pluperfect,
        Screeve::PerfectSubjunctive,
        Screeve::Imperative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Screeve::Present => "present",
            Screeve::Imperfect => "imperfect",
            Screeve::PresentSubjunctive => "present-subjunctive",
            Screeve::Future => "future",
            Screeve::Conditional => "conditional",
            Screeve::FutureSubjunctive => "future-subjunctive",
            Screeve::Aorist => "aorist",
            Screeve::Optative => "optative",
            Screeve::Perfect => "perfect",
            Screeve::Pluperfect => "pluperfect",
            Screeve::PerfectSubjunctive => "perfect-subjunctive",
            Screeve::Imperative => "imperative",
        }
    }

    pub fn series(self) -> Series {
        use Screeve::*;
        match self {
            Present | Imperfect | PresentSubjunctive | Future | Conditional | FutureSubjunctive => Series::SeriesI,
            Aorist | Optative => Series::Aorist,
            Perfect | Pluperfect | PerfectSubjunctive => Series::Perfective,
            Imperative => Series::Imperative,
        }
    }

    /// The word-level tense/aspect/mood atoms identifying this screeve.
    pub fn features(self) -> &'static [&'static str] {
        use Screeve::*;
        match self {
            Present => &["PRS"],
            Imperfect => &["PST", "IPFV"],
            PresentSubjunctive => &["PRS", "SBJV"],
            Future => &["FUT"],
            Conditional => &["COND"],
            FutureSubjunctive => &["FUT", "SBJV"],
            Aorist => &["PST", "PFV"],
            Optative => &["OPT"],
            Perfect => &["PRF"],
            Pluperfect => &["PST", "PRF"],
            PerfectSubjunctive => &["PRF", "SBJV"],
            Imperative => &["IMP"],
        }
    }

    /// Recognizes the screeve from a tag's word-level atoms (ignoring `V`).
    pub fn from_atoms(fs: &FeatureStructure) -> Option<Screeve> {
        let atoms: Vec<&Feature> = fs.atoms().filter(|a| a.as_str() != "V").collect();
        Screeve::ALL.into_iter().find(|s| {
            let features = s.features();
            features.len() == atoms.len() && atoms.iter().all(|a| features.contains(&a.as_str()))
        })
    }
}

impl fmt::Display for Screeve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Screeve {
    type Err = GeorgianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Screeve::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| GeorgianError::UnknownScreeve(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Number {
    Sg,
    Pl,
}

/// An agreement cell: person plus number, where number may be left
/// unspecified (`3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersonNumber {
    pub person: u8,
    pub number: Option<Number>,
}

impl PersonNumber {
    pub const fn new(person: u8, number: Option<Number>) -> Self {
        PersonNumber { person, number }
    }

    pub fn bundle(self) -> FeatureStructure {
        let mut fs = FeatureStructure::new().with_atom(Feature::new(&self.person.to_string()));
        match self.number {
            Some(Number::Sg) => fs.insert_atom("SG"),
            Some(Number::Pl) => fs.insert_atom("PL"),
            None => false,
        };
        fs
    }

    /// Reads back a bundle made only of person and number atoms.
    pub fn from_bundle(fs: &FeatureStructure) -> Option<PersonNumber> {
        if fs.bundles().len() > 0 {
            return None;
        }
        let mut person = None;
        let mut number = None;
        for atom in fs.atoms() {
            match atom.as_str() {
                "1" | "2" | "3" if person.is_none() => person = atom.as_str().parse().ok(),
                "SG" if number.is_none() => number = Some(Number::Sg),
                "PL" if number.is_none() => number = Some(Number::Pl),
                _ => return None,
            }
        }
        Some(PersonNumber { person: person?, number })
    }
}

impl fmt::Display for PersonNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.person)?;
        match self.number {
            Some(Number::Sg) => f.write_str("SG"),
            Some(Number::Pl) => f.write_str("PL"),
            None => Ok(()),
        }
    }
}

impl FromStr for PersonNumber {
    type Err = GeorgianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeorgianError::BadCell(s.to_string());
        let s = s.trim().to_uppercase();
        let person = match s.chars().next() {
            Some(c @ '1'..='3') => c as u8 - b'0',
            _ => return Err(bad()),
        };
        let number = match &s[1..] {
            "" => None,
            "SG" => Some(Number::Sg),
            "PL" => Some(Number::Pl),
            _ => return Err(bad()),
        };
        Ok(PersonNumber { person, number })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::FeatureInventory;

    #[test]
    fn twelve_screeves_in_four_series() {
        assert_eq!(Screeve::ALL.len(), 12);
        let count = |series| Screeve::ALL.iter().filter(|s| s.series() == series).count();
        assert_eq!(Series::ALL.map(count), [6, 2, 3, 1]);
    }

    #[test]
    fn screeve_features_are_distinct_and_valid() {
        let inv = FeatureInventory::default_ref();
        let mut seen = std::collections::HashSet::new();
        for s in Screeve::ALL {
            let fs = FeatureStructure::from_atoms(s.features().iter().copied()).with_atom("V");
            assert!(inv.validate(&fs).is_empty(), "{s}");
            assert!(seen.insert(fs.clone()));
            assert_eq!(Screeve::from_atoms(&fs), Some(s));
        }
    }

    #[test]
    fn class_names_parse() {
        for c in VerbClass::ALL {
            assert_eq!(c.name().parse::<VerbClass>().unwrap(), c);
        }
        assert!(matches!("foo".parse::<VerbClass>(), Err(GeorgianError::UnknownClass(_))));
    }

    #[test]
    fn split_ergativity() {
        assert_eq!(VerbClass::Transitive.subject_role(Screeve::Aorist).as_str(), "ERG");
        assert_eq!(VerbClass::Medial.subject_role(Screeve::Optative).as_str(), "ERG");
        assert_eq!(VerbClass::Transitive.subject_role(Screeve::Future).as_str(), "NOM");
        assert_eq!(VerbClass::Intransitive.subject_role(Screeve::Aorist).as_str(), "NOM");
        assert_eq!(VerbClass::Indirect.subject_role(Screeve::Present).as_str(), "DAT");
    }

    #[test]
    fn person_number_cells() {
        let cell: PersonNumber = "2sg".parse().unwrap();
        assert_eq!(cell, PersonNumber::new(2, Some(Number::Sg)));
        assert_eq!(cell.to_string(), "2SG");
        assert_eq!("3".parse::<PersonNumber>().unwrap().number, None);
        assert!("4SG".parse::<PersonNumber>().is_err());
        assert!("1DU".parse::<PersonNumber>().is_err());
        assert_eq!(PersonNumber::from_bundle(&cell.bundle()), Some(cell));
    }
}
