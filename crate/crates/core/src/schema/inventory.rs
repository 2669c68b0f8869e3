use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;
use std::sync::OnceLock;

use thiserror::Error;

use super::{parse_tag, Feature, FeatureStructure, Role, TagError};

const DEFAULT_INVENTORY: &str = include_str!("../../data/default_inventory.tsv");

/// Dimension that may share labels with role names (`NOM(DAT)` uses the
/// case atom `DAT`, `DAT(...)` the role).
const CASE_DIMENSION: &str = "case";
const POS_DIMENSION: &str = "pos";

#[derive(Debug, Error)]
pub enum InventoryError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("label {label} declared in both {first} and {second}")]
    OverlappingLabel { label: String, first: String, second: String },
    #[error("role {0} collides with an atomic label")]
    RoleCollision(String),
    #[error("{0} refers to undeclared role {1}")]
    UndeclaredRole(String, String),
    #[error("relocation rule names unknown atom or dimension {0}")]
    UnknownSelector(String),
    #[error("reading inventory: {0}")]
    Io(#[from] std::io::Error),
}

/// A single validation finding. Violations are reported, not raised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownLabel { path: Vec<Role>, label: Feature },
    DimensionConflict { path: Vec<Role>, dimension: String, values: Vec<Feature> },
    UnknownRole { path: Vec<Role>, role: Role },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = match self {
            Violation::UnknownLabel { path, .. }
            | Violation::DimensionConflict { path, .. }
            | Violation::UnknownRole { path, .. } => path,
        };
        for role in path {
            write!(f, "{role}: ")?;
        }
        match self {
            Violation::UnknownLabel { label, .. } => write!(f, "unknown label: {label}"),
            Violation::DimensionConflict { dimension, values, .. } => {
                let values: Vec<&str> = values.iter().map(Feature::as_str).collect();
                write!(f, "dimension conflict: {dimension} ({})", values.join(", "))
            }
            Violation::UnknownRole { role, .. } => write!(f, "unknown role: {role}"),
        }
    }
}

/// Selects the word-level atoms a relocation rule may move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomSelector {
    Atom(Feature),
    Dimension(String),
}

/// During flat-to-layered conversion, moves a word-level atom matching
/// `selector` into the `target` bundle when the atom sits directly next to
/// the composite token that produced that bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelocationRule {
    pub selector: AtomSelector,
    pub target: Role,
}

#[derive(Debug, Clone)]
struct Dimension {
    name: String,
    labels: Vec<Feature>,
}

/// The closed vocabulary a tag is checked against: atomic labels grouped
/// into dimensions, argument roles, legacy composite codes and the
/// per-language relocation rules used by flat conversion.
#[derive(Debug, Clone)]
pub struct FeatureInventory {
    dimensions: Vec<Dimension>,
    // label -> (dimension index, position within dimension)
    index: HashMap<Feature, (usize, usize)>,
    roles: Vec<Role>,
    pub(crate) flat_arg_codes: BTreeMap<String, Role>,
    pub(crate) subject_role: Role,
    pub(crate) possessor_role: Role,
    pub(crate) relocation_rules: Vec<RelocationRule>,
}

impl Default for FeatureInventory {
    fn default() -> Self {
        Self::default_ref().clone()
    }
}

impl FeatureInventory {
    /// The shipped inventory, parsed once.
    pub fn default_ref() -> &'static FeatureInventory {
        static DEFAULT: OnceLock<FeatureInventory> = OnceLock::new();
        DEFAULT.get_or_init(|| {
            FeatureInventory::from_reader(DEFAULT_INVENTORY.as_bytes()).expect("shipped inventory is valid")
        })
    }

    /// Reads the line-oriented inventory format: `dimension<TAB>label`,
    /// `role<TAB>label`, `flatcode<TAB>code<TAB>role`, plus the optional
    /// `subject`, `possessor` and `relocate` records. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, InventoryError> {
        let mut dimensions: Vec<Dimension> = Vec::new();
        let mut roles: Vec<Role> = Vec::new();
        let mut codes = BTreeMap::new();
        let mut subject = None;
        let mut possessor = None;
        let mut relocations = Vec::new();

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            let malformed = |message: &str| InventoryError::Malformed { line: lineno, message: message.to_string() };
            let key = fields[0].to_lowercase();
            match key.as_str() {
                "role" => {
                    let [_, label] = fields[..] else {
                        return Err(malformed("expected role<TAB>label"));
                    };
                    let role = Role::new(label);
                    if roles.contains(&role) {
                        return Err(malformed("duplicate role"));
                    }
                    roles.push(role);
                }
                "flatcode" => {
                    let [_, code, role] = fields[..] else {
                        return Err(malformed("expected flatcode<TAB>code<TAB>role"));
                    };
                    let code = code.to_uppercase();
                    if code.chars().count() != 2 || !code.chars().all(|c| c.is_ascii_alphabetic()) {
                        return Err(malformed("flat case codes are two letters"));
                    }
                    codes.insert(code, Role::new(role));
                }
                "subject" | "possessor" => {
                    let [_, role] = fields[..] else {
                        return Err(malformed("expected subject|possessor<TAB>role"));
                    };
                    let slot = if key == "subject" { &mut subject } else { &mut possessor };
                    *slot = Some(Role::new(role));
                }
                "relocate" => {
                    let [_, selector, role] = fields[..] else {
                        return Err(malformed("expected relocate<TAB>atom-or-dimension<TAB>role"));
                    };
                    relocations.push((selector.to_string(), Role::new(role)));
                }
                _ => {
                    let [_, label] = fields[..] else {
                        return Err(malformed("expected dimension<TAB>label"));
                    };
                    let label = Feature::new(label);
                    if label.as_str().is_empty() {
                        return Err(malformed("empty label"));
                    }
                    match dimensions.iter_mut().find(|d| d.name == key) {
                        Some(dim) => {
                            if !dim.labels.contains(&label) {
                                dim.labels.push(label);
                            }
                        }
                        None => dimensions.push(Dimension { name: key, labels: vec![label] }),
                    }
                }
            }
        }

        let mut inventory = FeatureInventory {
            dimensions,
            index: HashMap::new(),
            roles,
            flat_arg_codes: codes,
            subject_role: subject.unwrap_or_else(|| Role::new("NOM")),
            possessor_role: possessor.unwrap_or_else(|| Role::new("POSS")),
            relocation_rules: Vec::new(),
        };
        inventory.reindex()?;
        for (selector, role) in relocations {
            inventory = inventory.with_relocation(&selector, role.as_str())?;
        }
        Ok(inventory)
    }

    fn reindex(&mut self) -> Result<(), InventoryError> {
        // pos renders first regardless of declaration order
        if let Some(i) = self.dimensions.iter().position(|d| d.name == POS_DIMENSION) {
            let pos = self.dimensions.remove(i);
            self.dimensions.insert(0, pos);
        }
        self.index.clear();
        for (d, dim) in self.dimensions.iter().enumerate() {
            for (p, label) in dim.labels.iter().enumerate() {
                if let Some(&(other, _)) = self.index.get(label) {
                    return Err(InventoryError::OverlappingLabel {
                        label: label.to_string(),
                        first: self.dimensions[other].name.clone(),
                        second: dim.name.clone(),
                    });
                }
                self.index.insert(label.clone(), (d, p));
            }
        }
        for role in &self.roles {
            let collides = self.dimension_of(&Feature::new(role.as_str())).is_some_and(|dim| dim != CASE_DIMENSION);
            if collides {
                return Err(InventoryError::RoleCollision(role.to_string()));
            }
        }
        for (code, role) in &self.flat_arg_codes {
            if !self.roles.contains(role) {
                return Err(InventoryError::UndeclaredRole(format!("flatcode {code}"), role.to_string()));
            }
        }
        Ok(())
    }

    /// Adds a relocation rule. `selector` is either an atomic label or a
    /// dimension name.
    pub fn with_relocation(mut self, selector: &str, target: &str) -> Result<Self, InventoryError> {
        let target = Role::new(target);
        if !self.roles.contains(&target) {
            return Err(InventoryError::UndeclaredRole("relocation".into(), target.to_string()));
        }
        let lowered = selector.trim().to_lowercase();
        let selector = if self.dimensions.iter().any(|d| d.name == lowered) {
            AtomSelector::Dimension(lowered)
        } else {
            let atom = Feature::new(selector);
            if !self.index.contains_key(&atom) {
                return Err(InventoryError::UnknownSelector(selector.to_string()));
            }
            AtomSelector::Atom(atom)
        };
        self.relocation_rules.push(RelocationRule { selector, target });
        Ok(self)
    }

    pub fn dimension_of(&self, label: &Feature) -> Option<&str> {
        self.index.get(label).map(|&(d, _)| self.dimensions[d].name.as_str())
    }

    pub fn dimension_names(&self) -> impl Iterator<Item = &str> {
        self.dimensions.iter().map(|d| d.name.as_str())
    }

    pub fn labels(&self, dimension: &str) -> Option<&[Feature]> {
        self.dimensions.iter().find(|d| d.name == dimension).map(|d| d.labels.as_slice())
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn is_role(&self, role: &Role) -> bool {
        self.roles.contains(role)
    }

    pub fn relocation_rules(&self) -> &[RelocationRule] {
        &self.relocation_rules
    }

    pub fn flat_code_for(&self, role: &Role) -> Option<&str> {
        self.flat_arg_codes.iter().find(|(_, r)| *r == role).map(|(code, _)| code.as_str())
    }

    /// Lists every violation in `fs`; an empty list means the structure is
    /// valid for this inventory.
    pub fn validate(&self, fs: &FeatureStructure) -> Vec<Violation> {
        let mut out = Vec::new();
        self.validate_at(fs, &mut Vec::new(), &mut out);
        out
    }

    fn validate_at(&self, fs: &FeatureStructure, path: &mut Vec<Role>, out: &mut Vec<Violation>) {
        let mut by_dimension: BTreeMap<usize, Vec<Feature>> = BTreeMap::new();
        for atom in fs.atoms() {
            match self.index.get(atom) {
                Some(&(d, _)) => by_dimension.entry(d).or_default().push(atom.clone()),
                None => out.push(Violation::UnknownLabel { path: path.clone(), label: atom.clone() }),
            }
        }
        for (d, mut values) in by_dimension {
            if values.len() > 1 {
                values.sort_by_key(|v| self.index[v].1);
                out.push(Violation::DimensionConflict {
                    path: path.clone(),
                    dimension: self.dimensions[d].name.clone(),
                    values,
                });
            }
        }
        for (role, bundle) in fs.bundles() {
            if !self.is_role(role) {
                out.push(Violation::UnknownRole { path: path.clone(), role: role.clone() });
            }
            path.push(role.clone());
            self.validate_at(bundle, path, out);
            path.pop();
        }
    }

    /// Parses and validates; the first violation becomes the error.
    pub fn parse_tag(&self, text: &str) -> Result<FeatureStructure, TagError> {
        let fs = parse_tag(text)?;
        match self.validate(&fs).into_iter().next() {
            Some(violation) => Err(TagError::Invalid(violation)),
            None => Ok(fs),
        }
    }

    fn atom_key<'a>(&self, atom: &'a Feature) -> (usize, usize, &'a str) {
        match self.index.get(atom) {
            Some(&(d, p)) => (d, p, atom.as_str()),
            None => (usize::MAX, 0, atom.as_str()),
        }
    }

    fn role_key<'a>(&self, role: &'a Role) -> (usize, &'a str) {
        let rank = self.roles.iter().position(|r| r == role).unwrap_or(usize::MAX);
        (rank, role.as_str())
    }

    /// Atoms in render order: part of speech, then the remaining dimensions
    /// in declaration order, then unknown labels alphabetically.
    pub fn sorted_atoms<'a>(&self, fs: &'a FeatureStructure) -> Vec<&'a Feature> {
        let mut atoms: Vec<&Feature> = fs.atoms().collect();
        atoms.sort_by_key(|a| self.atom_key(a));
        atoms
    }

    /// Bundles in declared role order, unknown roles last.
    pub fn sorted_bundles<'a>(&self, fs: &'a FeatureStructure) -> Vec<(&'a Role, &'a FeatureStructure)> {
        let mut bundles: Vec<_> = fs.bundles().collect();
        bundles.sort_by_key(|(r, _)| self.role_key(r));
        bundles
    }

    /// The canonical inline rendering of `fs`.
    pub fn render(&self, fs: &FeatureStructure) -> String {
        let mut out = String::new();
        self.render_into(fs, &mut out);
        out
    }

    fn render_into(&self, fs: &FeatureStructure, out: &mut String) {
        let mut first = true;
        let mut sep = |out: &mut String| {
            if !first {
                out.push(';');
            }
            first = false;
        };
        for atom in self.sorted_atoms(fs) {
            sep(out);
            out.push_str(atom.as_str());
        }
        for (role, bundle) in self.sorted_bundles(fs) {
            sep(out);
            out.push_str(role.as_str());
            out.push('(');
            self.render_into(bundle, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv() -> &'static FeatureInventory {
        FeatureInventory::default_ref()
    }

    #[test]
    fn default_inventory_dimensions() {
        let inv = inv();
        assert_eq!(inv.dimension_names().next(), Some("pos"));
        assert_eq!(inv.dimension_of(&Feature::new("FUT")), Some("tense"));
        assert_eq!(inv.dimension_of(&Feature::new("pl")), Some("number"));
        assert_eq!(inv.dimension_of(&Feature::new("DAT")), Some("case"));
        assert_eq!(inv.roles().iter().map(Role::as_str).collect::<Vec<_>>(), ["NOM", "ERG", "ACC", "DAT", "POSS"]);
        assert_eq!(inv.flat_code_for(&Role::new("ACC")), Some("AC"));
    }

    #[test]
    fn render_orders_canonically() {
        let fs = FeatureStructure::from_atoms(["FUT", "V"])
            .with_bundle("ACC", FeatureStructure::from_atoms(["SG", "2"]))
            .with_bundle("NOM", FeatureStructure::from_atoms(["PL", "1"]));
        assert_eq!(inv().render(&fs), "V;FUT;NOM(1;PL);ACC(2;SG)");
        assert_eq!(inv().render(&FeatureStructure::from_atoms(["V"])), "V");
    }

    #[test]
    fn bundle_internal_order() {
        let fs = FeatureStructure::from_atoms(["SG", "N"])
            .with_bundle("POSS", FeatureStructure::from_atoms(["FEM", "SG", "3"]));
        assert_eq!(fs.to_string(), "N;SG;POSS(3;SG;FEM)");
    }

    #[test]
    fn unknown_labels_render_last() {
        let fs = FeatureStructure::from_atoms(["ZZZ", "V", "AAA"]);
        assert_eq!(fs.to_string(), "V;AAA;ZZZ");
    }

    #[test]
    fn validate_accepts_well_formed() {
        let fs = parse_tag("V;FUT;NOM(1;PL)").unwrap();
        assert!(inv().validate(&fs).is_empty());
    }

    #[test]
    fn validate_reports_dimension_conflict() {
        let fs = FeatureStructure::from_atoms(["PRS", "FUT"]);
        let violations = inv().validate(&fs);
        assert_eq!(violations.len(), 1);
        assert!(matches!(&violations[0],
            Violation::DimensionConflict { dimension, .. } if dimension == "tense"));
        assert_eq!(violations[0].to_string(), "dimension conflict: tense (PRS, FUT)");
    }

    #[test]
    fn validate_reports_unknown_role_and_label() {
        let fs = parse_tag("V;QQQ(1;SG);XYZ").unwrap();
        let violations = inv().validate(&fs);
        assert!(violations.contains(&Violation::UnknownRole { path: vec![], role: Role::new("QQQ") }));
        assert!(violations.contains(&Violation::UnknownLabel { path: vec![], label: Feature::new("XYZ") }));
    }

    #[test]
    fn nested_violation_carries_path() {
        let fs = parse_tag("V;NOM(1;2)").unwrap();
        let violations = inv().validate(&fs);
        assert_eq!(violations[0].to_string(), "NOM: dimension conflict: person (1, 2)");
    }

    #[test]
    fn parse_with_inventory_rejects() {
        assert!(matches!(inv().parse_tag("V;PRS;FUT"), Err(TagError::Invalid(Violation::DimensionConflict { .. }))));
        assert!(matches!(inv().parse_tag("V;BOGUS"), Err(TagError::Invalid(Violation::UnknownLabel { .. }))));
        assert!(inv().parse_tag("N;SG;NOM(DAT)").is_ok());
    }

    #[test]
    fn inventory_file_errors() {
        let overlap = "tense\tPRS\naspect\tPRS\n";
        assert!(matches!(
            FeatureInventory::from_reader(overlap.as_bytes()),
            Err(InventoryError::OverlappingLabel { .. })
        ));
        let bad_code = "role\tNOM\nflatcode\tAC\tACC\n";
        assert!(matches!(FeatureInventory::from_reader(bad_code.as_bytes()), Err(InventoryError::UndeclaredRole(..))));
        let collision = "number\tSG\nrole\tSG\n";
        assert!(matches!(FeatureInventory::from_reader(collision.as_bytes()), Err(InventoryError::RoleCollision(_))));
        let short = "tense\n";
        assert!(matches!(
            FeatureInventory::from_reader(short.as_bytes()),
            Err(InventoryError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn pos_dimension_moves_first() {
        let text = "tense\tFUT\npos\tV\n";
        let inv = FeatureInventory::from_reader(text.as_bytes()).unwrap();
        assert_eq!(inv.render(&FeatureStructure::from_atoms(["FUT", "V"])), "V;FUT");
    }

    #[test]
    fn relocation_selector_resolution() {
        let inv = FeatureInventory::default().with_relocation("FEM", "POSS").unwrap();
        assert_eq!(inv.relocation_rules()[0].selector, AtomSelector::Atom(Feature::new("FEM")));
        let inv = FeatureInventory::default().with_relocation("gender", "POSS").unwrap();
        assert_eq!(inv.relocation_rules()[0].selector, AtomSelector::Dimension("gender".into()));
        assert!(FeatureInventory::default().with_relocation("FEM", "QQQ").is_err());
    }
}
