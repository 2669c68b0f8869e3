//! Layered morphological feature structures.
//!
//! A tag such as `V;FUT;NOM(1;PL);ACC(2;SG)` is a set of atomic features
//! plus role-labelled sub-bundles, each decomposed into the same primitive
//! features. [`FeatureInventory`] supplies the vocabulary used to validate,
//! order, convert and unify them.

mod flat;
mod inventory;
mod parse;
mod structure;
mod unify;

pub use flat::{from_flat, to_flat, FlatError};
pub use inventory::{AtomSelector, FeatureInventory, InventoryError, RelocationRule, Violation};
pub use parse::{parse_tag, TagError};
pub use structure::{Feature, FeatureStructure, Role};
pub use unify::{subsumes, unify, Clash};

/// Canonical rendering under the default inventory.
pub fn serialize(fs: &FeatureStructure) -> String {
    FeatureInventory::default_ref().render(fs)
}
