use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// An atomic feature label such as `V`, `FUT`, `1` or `PL`.
///
/// Labels are stored uppercase; construction normalizes case.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Feature(String);

impl Feature {
    pub fn new(label: &str) -> Self {
        Feature(label.trim().to_uppercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Feature {
    fn from(label: &str) -> Self {
        Feature::new(label)
    }
}

impl AsRef<str> for Feature {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// The label of an argument-role bundle (`NOM`, `ACC`, `POSS`, ...).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Role(String);

impl Role {
    pub fn new(label: &str) -> Self {
        Role(label.trim().to_uppercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Role {
    fn from(label: &str) -> Self {
        Role::new(label)
    }
}

/// A layered bundle of morphological features.
///
/// Atoms form an unordered set and sub-bundles are keyed by [`Role`], so
/// equality is structural and insensitive to insertion order. Bundles may
/// themselves contain bundles, which is how case stacking (`NOM(DAT)`) is
/// represented.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureStructure {
    atoms: BTreeSet<Feature>,
    bundles: BTreeMap<Role, FeatureStructure>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms<I, S>(atoms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        FeatureStructure {
            atoms: atoms.into_iter().map(|a| Feature::new(a.as_ref())).collect(),
            bundles: BTreeMap::new(),
        }
    }

    /// Builder form of [`insert_bundle`](Self::insert_bundle); replaces an
    /// existing bundle with the same role.
    pub fn with_bundle(mut self, role: impl Into<Role>, bundle: FeatureStructure) -> Self {
        self.bundles.insert(role.into(), bundle);
        self
    }

    pub fn with_atom(mut self, atom: impl Into<Feature>) -> Self {
        self.atoms.insert(atom.into());
        self
    }

    pub fn insert_atom(&mut self, atom: impl Into<Feature>) -> bool {
        self.atoms.insert(atom.into())
    }

    pub fn remove_atom(&mut self, atom: &Feature) -> bool {
        self.atoms.remove(atom)
    }

    /// Inserts a bundle, handing back the bundle previously stored under
    /// `role` if there was one.
    pub fn insert_bundle(&mut self, role: impl Into<Role>, bundle: FeatureStructure) -> Option<FeatureStructure> {
        self.bundles.insert(role.into(), bundle)
    }

    pub fn remove_bundle(&mut self, role: &Role) -> Option<FeatureStructure> {
        self.bundles.remove(role)
    }

    pub fn atoms(&self) -> impl ExactSizeIterator<Item = &Feature> {
        self.atoms.iter()
    }

    pub fn atom_set(&self) -> &BTreeSet<Feature> {
        &self.atoms
    }

    pub fn bundles(&self) -> impl ExactSizeIterator<Item = (&Role, &FeatureStructure)> {
        self.bundles.iter()
    }

    pub fn bundle(&self, role: &Role) -> Option<&FeatureStructure> {
        self.bundles.get(role)
    }

    pub(crate) fn bundle_mut(&mut self, role: &Role) -> Option<&mut FeatureStructure> {
        self.bundles.get_mut(role)
    }

    pub fn has_atom(&self, label: &str) -> bool {
        self.atoms.contains(&Feature::new(label))
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.bundles.is_empty()
    }

    /// Nesting depth: 0 for a structure without bundles.
    pub fn depth(&self) -> usize {
        self.bundles.values().map(|b| b.depth() + 1).max().unwrap_or(0)
    }

    /// True iff every atom of `self` occurs in `other` and every bundle of
    /// `self` subsumes the same-role bundle of `other`.
    pub fn subsumes(&self, other: &FeatureStructure) -> bool {
        self.atoms.is_subset(&other.atoms)
            && self
                .bundles
                .iter()
                .all(|(role, general)| other.bundles.get(role).is_some_and(|specific| general.subsumes(specific)))
    }
}

/// Renders the canonical tag string under the default inventory.
impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::FeatureInventory::default_ref().render(self))
    }
}

impl Serialize for FeatureStructure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FeatureStructure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        super::parse_tag(&text).map_err(serde::de::Error::custom)
    }
}
