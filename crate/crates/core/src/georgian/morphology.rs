//! Marker tables, slot templates and paradigm grids.
//!
//! Marker and template tables are keyed `"<group>/<when>"`. A group is a
//! conjugation name (selected by a principal part), a verb class, or
//! `any`; `when` is a screeve name, a numbered series (`series-I` ..
//! `series-IV`) or `any`. Lookups try the most specific group first and,
//! within a group, screeve before series before `any`. Markers fall back
//! cell by cell; templates are taken whole from the first matching key.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::Deserialize;

use super::{GeorgianError, PersonNumber, Screeve, Series, VerbClass};

pub const DEFAULT_CONFIG: &str = include_str!("../../data/georgian.toml");

/// Subject (v-series) or object (m-series) agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MarkerKind {
    Subject,
    Object,
}

impl fmt::Display for MarkerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarkerKind::Subject => "subject",
            MarkerKind::Object => "object",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(from = "(String, String)")]
pub struct Marker {
    pub prefix: String,
    pub suffix: String,
}

impl From<(String, String)> for Marker {
    fn from((prefix, suffix): (String, String)) -> Self {
        Marker { prefix, suffix }
    }
}

type MarkerSets = BTreeMap<String, BTreeMap<PersonNumber, Marker>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementMarkerTable {
    subject: MarkerSets,
    object: MarkerSets,
    /// Highest priority first; decides which marker fills the single
    /// prefix slot.
    competition: Vec<(MarkerKind, u8)>,
}

impl AgreementMarkerTable {
    pub fn lookup(&self, kind: MarkerKind, keys: &[String], cell: PersonNumber) -> Option<&Marker> {
        let sets = match kind {
            MarkerKind::Subject => &self.subject,
            MarkerKind::Object => &self.object,
        };
        keys.iter().find_map(|k| sets.get(k).and_then(|set| set.get(&cell)))
    }

    pub fn competition(&self) -> &[(MarkerKind, u8)] {
        &self.competition
    }

    pub fn rank(&self, kind: MarkerKind, person: u8) -> Option<usize> {
        self.competition.iter().position(|&(k, p)| k == kind && p == person)
    }
}

/// Which slots a screeve fills.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreeveTemplate {
    #[serde(default)]
    pub preverb: bool,
    #[serde(default)]
    pub thematic: bool,
    #[serde(default)]
    pub suffix: String,
    /// Replaces the lexicon's version vowel.
    #[serde(default)]
    pub version: Option<String>,
    /// Subject takes object markers and vice versa.
    #[serde(default)]
    pub inverted: bool,
}

/// Contractions between subject and object suffixes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuffixRules {
    /// Object plural suffix, absorbed by a 3PL subject suffix.
    pub plural: String,
    /// Dropped from the end of a 3SG subject suffix before `plural`.
    pub drop_before_plural: String,
}

/// The (screeve, subject, object) cells a class inflects for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadigmGrid {
    pub screeves: Vec<Screeve>,
    pub subjects: Vec<PersonNumber>,
    /// Empty for verbs agreeing with one argument only.
    pub objects: Vec<PersonNumber>,
    pub exclusions: BTreeSet<(PersonNumber, PersonNumber)>,
    /// Allowed subject persons per screeve; screeves absent here are
    /// unrestricted.
    pub restrictions: BTreeMap<Screeve, BTreeSet<u8>>,
}

impl ParadigmGrid {
    pub fn singleton(screeve: Screeve, subject: PersonNumber, object: Option<PersonNumber>) -> Self {
        ParadigmGrid {
            screeves: vec![screeve],
            subjects: vec![subject],
            objects: object.into_iter().collect(),
            exclusions: BTreeSet::new(),
            restrictions: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), GeorgianError> {
        let bad = |m: String| Err(GeorgianError::Config(m));
        if self.screeves.is_empty() || self.subjects.is_empty() {
            return bad("grid needs at least one screeve and one subject".into());
        }
        for (s, o) in &self.exclusions {
            if !self.subjects.contains(s) || !self.objects.contains(o) {
                return bad(format!("exclusion {s}/{o} is outside the grid"));
            }
        }
        for (screeve, persons) in &self.restrictions {
            if persons.is_empty() {
                return bad(format!("empty subject restriction for {screeve}"));
            }
        }
        Ok(())
    }

    pub fn admits(&self, screeve: Screeve, subject: PersonNumber, object: Option<PersonNumber>) -> bool {
        if !self.screeves.contains(&screeve) || !self.subjects.contains(&subject) {
            return false;
        }
        if self.restrictions.get(&screeve).is_some_and(|p| !p.contains(&subject.person)) {
            return false;
        }
        match object {
            None => self.objects.is_empty(),
            Some(o) => self.objects.contains(&o) && !self.exclusions.contains(&(subject, o)),
        }
    }

    /// Admitted cells in grid order.
    pub fn cells(&self) -> Vec<(Screeve, PersonNumber, Option<PersonNumber>)> {
        let objects: Vec<Option<PersonNumber>> =
            if self.objects.is_empty() { vec![None] } else { self.objects.iter().copied().map(Some).collect() };
        let mut out = Vec::new();
        for &screeve in &self.screeves {
            for &s in &self.subjects {
                for &o in &objects {
                    if self.admits(screeve, s, o) {
                        out.push((screeve, s, o));
                    }
                }
            }
        }
        out
    }
}

/// Everything besides the lexicon that generation needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphology {
    pub markers: AgreementMarkerTable,
    pub templates: BTreeMap<String, ScreeveTemplate>,
    /// Version vowel replacements before a 3rd-person object-marked
    /// argument.
    pub version_shift: BTreeMap<String, String>,
    pub suffixes: SuffixRules,
    pub grids: BTreeMap<VerbClass, ParadigmGrid>,
    /// Grids reproducing the coverage of older flat-annotated data.
    pub legacy_grids: BTreeMap<VerbClass, ParadigmGrid>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    competition: Vec<String>,
    #[serde(default)]
    version_shift: BTreeMap<String, String>,
    #[serde(default)]
    suffixes: Option<SuffixRules>,
    #[serde(default)]
    subject: BTreeMap<String, BTreeMap<String, Marker>>,
    #[serde(default)]
    object: BTreeMap<String, BTreeMap<String, Marker>>,
    #[serde(default)]
    template: BTreeMap<String, ScreeveTemplate>,
    #[serde(default)]
    grid: BTreeMap<VerbClass, RawGrid>,
    #[serde(default)]
    legacy_grid: BTreeMap<VerbClass, RawGrid>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    screeves: Option<Vec<String>>,
    subjects: Vec<String>,
    #[serde(default)]
    objects: Vec<String>,
    #[serde(default)]
    exclude_same_person: Vec<u8>,
    #[serde(default)]
    exclude: Vec<(String, String)>,
    #[serde(default)]
    restrict: BTreeMap<String, Vec<u8>>,
}

impl RawGrid {
    fn build(self) -> Result<ParadigmGrid, GeorgianError> {
        let screeves = match self.screeves {
            None => Screeve::ALL.to_vec(),
            Some(names) => names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?,
        };
        let subjects: Vec<PersonNumber> = self.subjects.iter().map(|c| c.parse()).collect::<Result<_, _>>()?;
        let objects: Vec<PersonNumber> = self.objects.iter().map(|c| c.parse()).collect::<Result<_, _>>()?;
        let mut exclusions = BTreeSet::new();
        for &s in &subjects {
            for &o in &objects {
                if s.person == o.person && self.exclude_same_person.contains(&s.person) {
                    exclusions.insert((s, o));
                }
            }
        }
        for (s, o) in &self.exclude {
            exclusions.insert((s.parse()?, o.parse()?));
        }
        let mut restrictions = BTreeMap::new();
        for (screeve, persons) in self.restrict {
            restrictions.insert(screeve.parse()?, persons.into_iter().collect());
        }
        let grid = ParadigmGrid { screeves, subjects, objects, exclusions, restrictions };
        grid.validate()?;
        Ok(grid)
    }
}

fn check_key(key: &str) -> Result<(), GeorgianError> {
    let Some((group, when)) = key.split_once('/') else {
        return Err(GeorgianError::Config(format!("table key {key:?} is not <group>/<when>")));
    };
    let when_ok = when == "any" || when.parse::<Screeve>().is_ok() || Series::ALL.iter().any(|s| s.numbered() == when);
    if group.is_empty() || !when_ok {
        return Err(GeorgianError::Config(format!("bad table key {key:?}")));
    }
    Ok(())
}

fn marker_sets(raw: BTreeMap<String, BTreeMap<String, Marker>>) -> Result<MarkerSets, GeorgianError> {
    let mut out = BTreeMap::new();
    for (key, cells) in raw {
        check_key(&key)?;
        let mut set = BTreeMap::new();
        for (cell, marker) in cells {
            set.insert(cell.parse()?, marker);
        }
        out.insert(key, set);
    }
    Ok(out)
}

/// Lookup keys from most to least specific.
pub(crate) fn lookup_keys(groups: &[&str], screeve: Screeve) -> Vec<String> {
    let whens = [screeve.name(), screeve.series().numbered(), "any"];
    groups.iter().flat_map(|g| whens.iter().map(move |w| format!("{g}/{w}"))).collect()
}

impl Morphology {
    pub fn from_toml_str(text: &str) -> Result<Self, GeorgianError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| GeorgianError::Config(e.to_string()))?;

        let mut competition = Vec::new();
        for item in &raw.competition {
            let kind = match item.chars().next() {
                Some('s') => MarkerKind::Subject,
                Some('o') => MarkerKind::Object,
                _ => return Err(GeorgianError::Config(format!("bad competition entry {item:?}"))),
            };
            let person: u8 = item[1..]
                .parse()
                .ok()
                .filter(|p| (1..=3).contains(p))
                .ok_or_else(|| GeorgianError::Config(format!("bad competition entry {item:?}")))?;
            if competition.contains(&(kind, person)) {
                return Err(GeorgianError::Config(format!("duplicate competition entry {item:?}")));
            }
            competition.push((kind, person));
        }
        if competition.len() != 6 {
            return Err(GeorgianError::Config("competition order must rank s1-s3 and o1-o3".into()));
        }

        for key in raw.template.keys() {
            check_key(key)?;
        }
        let markers =
            AgreementMarkerTable { subject: marker_sets(raw.subject)?, object: marker_sets(raw.object)?, competition };
        let grids = raw.grid.into_iter().map(|(c, g)| Ok((c, g.build()?))).collect::<Result<_, GeorgianError>>()?;
        let legacy_grids =
            raw.legacy_grid.into_iter().map(|(c, g)| Ok((c, g.build()?))).collect::<Result<_, GeorgianError>>()?;

        let morph = Morphology {
            markers,
            templates: raw.template,
            version_shift: raw.version_shift,
            suffixes: raw.suffixes.unwrap_or_default(),
            grids,
            legacy_grids,
        };
        for (class, grid) in morph.grids.iter().chain(&morph.legacy_grids) {
            for &screeve in &grid.screeves {
                morph
                    .template(&[class.name(), "any"], screeve)
                    .ok_or(GeorgianError::MissingTemplate { class: *class, screeve })?;
            }
        }
        Ok(morph)
    }

    /// The embedded configuration.
    pub fn default_ref() -> &'static Morphology {
        static DEFAULT: OnceLock<Morphology> = OnceLock::new();
        DEFAULT.get_or_init(|| Morphology::from_toml_str(DEFAULT_CONFIG).expect("embedded morphology config"))
    }

    pub fn grid(&self, class: VerbClass) -> Result<&ParadigmGrid, GeorgianError> {
        self.grids.get(&class).ok_or(GeorgianError::MissingGrid(class))
    }

    pub fn legacy_grid(&self, class: VerbClass) -> Result<&ParadigmGrid, GeorgianError> {
        self.legacy_grids.get(&class).ok_or(GeorgianError::MissingGrid(class))
    }

    pub fn template(&self, groups: &[&str], screeve: Screeve) -> Option<&ScreeveTemplate> {
        lookup_keys(groups, screeve).iter().find_map(|k| self.templates.get(k))
    }
}

impl Default for Morphology {
    fn default() -> Self {
        Morphology::default_ref().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::georgian::Number;

    const TINY: &str = r#"
competition = ["o1", "o2", "s1", "s2", "s3", "o3"]
[subject."any/any"]
1SG = ["v", ""]
[template."any/present"]
thematic = true
[grid.transitive]
screeves = ["present"]
subjects = ["1SG", "1PL"]
objects = ["1SG", "3"]
exclude_same_person = [1]
"#;

    #[test]
    fn tiny_config() {
        let m = Morphology::from_toml_str(TINY).unwrap();
        let g = m.grid(VerbClass::Transitive).unwrap();
        assert_eq!(g.exclusions.len(), 2);
        assert_eq!(g.cells().len(), 2);
        let one = PersonNumber::new(1, Some(Number::Sg));
        let keys = lookup_keys(&["transitive", "any"], Screeve::Present);
        assert_eq!(m.markers.lookup(MarkerKind::Subject, &keys, one).unwrap().prefix, "v");
        assert!(m.markers.lookup(MarkerKind::Object, &keys, one).is_none());
        assert!(matches!(m.grid(VerbClass::Medial), Err(GeorgianError::MissingGrid(_))));
    }

    #[test]
    fn rejects_bad_configs() {
        let no_template = TINY.replace("any/present", "any/future");
        assert!(matches!(Morphology::from_toml_str(&no_template), Err(GeorgianError::MissingTemplate { .. })));
        let short = TINY.replace(r#", "o3""#, "");
        assert!(matches!(Morphology::from_toml_str(&short), Err(GeorgianError::Config(_))));
        let bad_key = TINY.replace("any/any", "any/sometime");
        assert!(matches!(Morphology::from_toml_str(&bad_key), Err(GeorgianError::Config(_))));
        let stray = format!("{TINY}\nexclude = [[\"2SG\", \"3\"]]\n");
        assert!(Morphology::from_toml_str(&stray).is_err());
    }

    #[test]
    fn lookup_order() {
        let keys = lookup_keys(&["i-aorist", "transitive", "any"], Screeve::Optative);
        assert_eq!(keys[0], "i-aorist/optative");
        assert_eq!(keys[1], "i-aorist/series-II");
        assert_eq!(keys.last().unwrap(), "any/any");
        assert_eq!(keys.len(), 9);
    }

    #[test]
    fn default_config_loads() {
        let m = Morphology::default_ref();
        for class in VerbClass::ALL {
            assert!(m.grid(class).is_ok(), "{class}");
            assert!(m.legacy_grid(class).is_ok(), "{class}");
        }
    }
}
