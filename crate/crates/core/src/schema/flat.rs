//! Conversion between legacy flat tags (`V;FUT;ARGNO1P;ARGAC2S`) and
//! layered structures (`V;FUT;NOM(1;PL);ACC(2;SG)`).
//!
//! Composite grammar understood by the converter:
//!
//! ```text
//! ARG <case-code:2 letters> <person:digit> <number:S|P|D>
//! PSS <person:digit> <number:S|P|D> [gender:M|F|N]
//! ```

use thiserror::Error;

use super::{AtomSelector, Feature, FeatureInventory, FeatureStructure, Role};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlatError {
    #[error("empty token in flat tag {0:?}")]
    EmptyToken(String),
    #[error("malformed composite token {0}")]
    MalformedComposite(String),
    #[error("case code {code} in {token} has no declared role")]
    UnknownCaseCode { code: String, token: String },
    #[error("role {0} is marked twice")]
    DuplicateRole(String),
    #[error("no flat encoding for {role}: {reason}")]
    NoFlatEncoding { role: String, reason: String },
}

const PERSON: &str = "person";
const NUMBER: &str = "number";
const GENDER: &str = "gender";

fn number_atom(letter: char) -> Option<&'static str> {
    match letter {
        'S' => Some("SG"),
        'P' => Some("PL"),
        'D' => Some("DU"),
        _ => None,
    }
}

fn number_letter(atom: &str) -> Option<char> {
    match atom {
        "SG" => Some('S'),
        "PL" => Some('P'),
        "DU" => Some('D'),
        _ => None,
    }
}

fn gender_atom(letter: char) -> Option<&'static str> {
    match letter {
        'M' => Some("MASC"),
        'F' => Some("FEM"),
        'N' => Some("NEUT"),
        _ => None,
    }
}

fn gender_letter(atom: &str) -> Option<char> {
    match atom {
        "MASC" => Some('M'),
        "FEM" => Some('F'),
        "NEUT" => Some('N'),
        _ => None,
    }
}

/// Decodes `<person><number>[gender]`.
fn agreement_bundle(body: &str, allow_gender: bool) -> Option<FeatureStructure> {
    let mut chars = body.chars();
    let person = chars.next().filter(char::is_ascii_digit)?;
    let number = number_atom(chars.next()?)?;
    let mut bundle =
        FeatureStructure::new().with_atom(Feature::new(&person.to_string())).with_atom(Feature::new(number));
    if let Some(g) = chars.next() {
        if !allow_gender {
            return None;
        }
        bundle.insert_atom(gender_atom(g)?);
    }
    if chars.next().is_some() {
        return None;
    }
    Some(bundle)
}

enum Token {
    Atom(Feature),
    Composite(Role, FeatureStructure),
}

impl FeatureInventory {
    fn classify(&self, token: &str) -> Result<Token, FlatError> {
        if let Some(rest) = token.strip_prefix("ARG") {
            let malformed = || FlatError::MalformedComposite(token.to_string());
            let code: String = rest.chars().take(2).collect();
            if code.chars().count() != 2 || !code.chars().all(|c| c.is_ascii_alphabetic()) {
                return Err(malformed());
            }
            let role = self
                .flat_arg_codes
                .get(&code)
                .ok_or_else(|| FlatError::UnknownCaseCode { code: code.clone(), token: token.to_string() })?;
            let bundle = agreement_bundle(&rest[2..], false).ok_or_else(malformed)?;
            return Ok(Token::Composite(role.clone(), bundle));
        }
        if let Some(rest) = token.strip_prefix("PSS") {
            // PSSD and friends are ordinary atoms
            if rest.starts_with(|c: char| c.is_ascii_digit()) {
                let bundle =
                    agreement_bundle(rest, true).ok_or_else(|| FlatError::MalformedComposite(token.to_string()))?;
                return Ok(Token::Composite(self.possessor_role.clone(), bundle));
            }
        }
        Ok(Token::Atom(Feature::new(token)))
    }

    fn selects(&self, selector: &AtomSelector, atom: &Feature) -> bool {
        match selector {
            AtomSelector::Atom(a) => a == atom,
            AtomSelector::Dimension(d) => self.dimension_of(atom) == Some(d.as_str()),
        }
    }

    /// Converts a legacy flat tag into a layered structure.
    ///
    /// Composite tokens become role bundles, a bare person (with its number
    /// and gender) is wrapped into the subject bundle, and relocation rules
    /// may pull adjacent word-level atoms into a composite-derived bundle.
    /// Other atoms pass through unchanged.
    pub fn from_flat(&self, flat: &str) -> Result<FeatureStructure, FlatError> {
        let mut tokens = Vec::new();
        for raw in flat.split(';') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(FlatError::EmptyToken(flat.to_string()));
            }
            tokens.push(self.classify(&raw.to_uppercase())?);
        }

        let mut fs = FeatureStructure::new();
        // composite position for each role, for adjacency checks
        let mut origins: Vec<(Role, usize)> = Vec::new();
        for (i, token) in tokens.iter().enumerate() {
            if let Token::Composite(role, bundle) = token {
                if fs.insert_bundle(role.clone(), bundle.clone()).is_some() {
                    return Err(FlatError::DuplicateRole(role.to_string()));
                }
                origins.push((role.clone(), i));
            }
        }

        let mut word_atoms = Vec::new();
        for (i, token) in tokens.iter().enumerate() {
            let Token::Atom(atom) = token else { continue };
            let relocated = self.relocation_rules.iter().find_map(|rule| {
                if !self.selects(&rule.selector, atom) {
                    return None;
                }
                let adjacent = origins.iter().any(|(role, at)| *role == rule.target && at.abs_diff(i) == 1);
                adjacent.then_some(&rule.target)
            });
            let moved = relocated.is_some_and(|role| {
                let dim = self.dimension_of(atom);
                let bundle = fs.bundle_mut(role).expect("composite bundle exists");
                let free = bundle.atoms().all(|a| dim.is_none() || self.dimension_of(a) != dim);
                if free {
                    bundle.insert_atom(atom.clone());
                }
                free
            });
            if !moved {
                word_atoms.push(atom.clone());
            }
        }

        let has_person = word_atoms.iter().any(|a| self.dimension_of(a) == Some(PERSON));
        let mut subject = FeatureStructure::new();
        for atom in word_atoms {
            let agreement = matches!(self.dimension_of(&atom), Some(PERSON | NUMBER | GENDER));
            if has_person && agreement {
                subject.insert_atom(atom);
            } else {
                fs.insert_atom(atom);
            }
        }
        if !subject.is_empty() && fs.insert_bundle(self.subject_role.clone(), subject).is_some() {
            return Err(FlatError::DuplicateRole(self.subject_role.to_string()));
        }
        Ok(fs)
    }

    /// Converts a layered structure back into the legacy flat encoding.
    ///
    /// A subject bundle that is the only bundle, on a word without its own
    /// agreement atoms, is spelled out bare (`V;PRS;3;SG`); every other
    /// bundle becomes an `ARG`/`PSS` composite. Nested bundles, case atoms
    /// inside bundles and word-level person atoms have no flat encoding.
    /// Relocated atoms are not moved back, so conversion after a relocation
    /// rule fired is lossy.
    pub fn to_flat(&self, fs: &FeatureStructure) -> Result<String, FlatError> {
        let no_encoding = |role: &Role, reason: &str| FlatError::NoFlatEncoding {
            role: role.to_string(),
            reason: reason.to_string(),
        };
        if let Some(person) = fs.atoms().find(|a| self.dimension_of(a) == Some(PERSON)) {
            return Err(FlatError::NoFlatEncoding {
                role: "word".into(),
                reason: format!("person atom {person} outside a bundle"),
            });
        }

        let mut parts: Vec<(Option<&str>, Option<&str>, Option<&str>)> = Vec::new();
        for (role, bundle) in fs.bundles() {
            if bundle.bundles().len() > 0 {
                return Err(no_encoding(role, "nested bundle"));
            }
            let (mut person, mut number, mut gender) = (None, None, None);
            for atom in bundle.atoms() {
                let slot = match self.dimension_of(atom) {
                    Some(PERSON) => &mut person,
                    Some(NUMBER) => &mut number,
                    Some(GENDER) => &mut gender,
                    _ => return Err(no_encoding(role, &format!("atom {atom} is not person/number/gender"))),
                };
                if slot.replace(atom.as_str()).is_some() {
                    return Err(no_encoding(role, "two values in one dimension"));
                }
            }
            if person.is_none() || number.is_none() {
                return Err(no_encoding(role, "person and number are required"));
            }
            parts.push((person, number, gender));
        }

        let word_agreement = fs.atoms().any(|a| matches!(self.dimension_of(a), Some(NUMBER | GENDER)));
        let bare_subject = fs.bundles().len() == 1 && fs.bundle(&self.subject_role).is_some() && !word_agreement;

        let mut out: Vec<String> = Vec::new();
        if bare_subject {
            let subject = fs.bundle(&self.subject_role).expect("checked above");
            let mut merged = fs.clone();
            merged.remove_bundle(&self.subject_role);
            for atom in subject.atoms() {
                merged.insert_atom(atom.clone());
            }
            out.extend(self.sorted_atoms(&merged).into_iter().map(|a| a.to_string()));
            return Ok(out.join(";"));
        }

        out.extend(self.sorted_atoms(fs).into_iter().map(|a| a.to_string()));
        for (role, bundle) in self.sorted_bundles(fs) {
            let find = |dim: &str| bundle.atoms().find(|a| self.dimension_of(a) == Some(dim));
            let person = find(PERSON).expect("validated").as_str();
            let number = number_letter(find(NUMBER).expect("validated").as_str())
                .ok_or_else(|| no_encoding(role, "number has no letter code"))?;
            let gender = find(GENDER);
            if person.chars().count() != 1 {
                return Err(no_encoding(role, "person has no digit code"));
            }
            if *role == self.possessor_role {
                let mut token = format!("PSS{person}{number}");
                if let Some(g) = gender {
                    token.push(gender_letter(g.as_str()).expect("gender dimension"));
                }
                out.push(token);
            } else {
                if gender.is_some() {
                    return Err(no_encoding(role, "ARG composites carry no gender"));
                }
                let code = self.flat_code_for(role).ok_or_else(|| no_encoding(role, "role has no flat case code"))?;
                out.push(format!("ARG{code}{person}{number}"));
            }
        }
        Ok(out.join(";"))
    }
}

/// [`FeatureInventory::from_flat`] under the default inventory.
pub fn from_flat(flat: &str) -> Result<FeatureStructure, FlatError> {
    FeatureInventory::default_ref().from_flat(flat)
}

/// [`FeatureInventory::to_flat`] under the default inventory.
pub fn to_flat(fs: &FeatureStructure) -> Result<String, FlatError> {
    FeatureInventory::default_ref().to_flat(fs)
}
