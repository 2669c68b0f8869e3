use std::collections::BTreeMap;

use thiserror::Error;

use super::{Feature, FeatureInventory, FeatureStructure, Role};

/// Two different values for one dimension at the same bundle path.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clash on {dimension} at {}: {left} vs {right}", render_path(.path))]
pub struct Clash {
    pub path: Vec<Role>,
    pub dimension: String,
    pub left: Feature,
    pub right: Feature,
}

fn render_path(path: &[Role]) -> String {
    if path.is_empty() {
        return "top level".into();
    }
    path.iter().map(Role::as_str).collect::<Vec<_>>().join("/")
}

impl FeatureInventory {
    /// The most general structure subsumed by both `a` and `b`.
    ///
    /// Atoms are united and same-role bundles unified recursively. Two
    /// distinct labels of one dimension at the same path are a [`Clash`].
    /// Labels unknown to the inventory never clash.
    pub fn unify(&self, a: &FeatureStructure, b: &FeatureStructure) -> Result<FeatureStructure, Clash> {
        self.unify_at(a, b, &mut Vec::new())
    }

    fn unify_at(
        &self,
        a: &FeatureStructure,
        b: &FeatureStructure,
        path: &mut Vec<Role>,
    ) -> Result<FeatureStructure, Clash> {
        let mut seen: BTreeMap<&str, &Feature> = BTreeMap::new();
        for atom in a.atoms() {
            if let Some(dim) = self.dimension_of(atom) {
                seen.insert(dim, atom);
            }
        }
        // dimension order, so the reported clash does not depend on argument order
        for atom in self.sorted_atoms(b) {
            let Some(dim) = self.dimension_of(atom) else { continue };
            if let Some(&left) = seen.get(dim) {
                if left != atom {
                    return Err(Clash {
                        path: path.clone(),
                        dimension: dim.to_string(),
                        left: left.clone(),
                        right: atom.clone(),
                    });
                }
            }
        }

        let mut out = a.clone();
        for atom in b.atoms() {
            out.insert_atom(atom.clone());
        }
        for (role, right) in b.bundles() {
            let merged = match a.bundle(role) {
                Some(left) => {
                    path.push(role.clone());
                    let merged = self.unify_at(left, right, path)?;
                    path.pop();
                    merged
                }
                None => right.clone(),
            };
            out.insert_bundle(role.clone(), merged);
        }
        Ok(out)
    }
}

/// [`FeatureInventory::unify`] under the default inventory.
pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> Result<FeatureStructure, Clash> {
    FeatureInventory::default_ref().unify(a, b)
}

/// True iff `general` carries no information absent from `specific`.
pub fn subsumes(general: &FeatureStructure, specific: &FeatureStructure) -> bool {
    general.subsumes(specific)
}
