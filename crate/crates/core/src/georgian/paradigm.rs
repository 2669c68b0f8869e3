use std::collections::BTreeSet;

use crate::schema::{FeatureInventory, FeatureStructure, Role};
use crate::unimorph::{Cell, InflectionTable};

use super::morphology::lookup_keys;
use super::{
    GeorgianError, LexiconEntry, MarkerKind, Morphology, Number, ParadigmGrid, PersonNumber, Screeve, VerbClass,
};

/// One paradigm cell before it is rendered as a tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub screeve: Screeve,
    pub subject: PersonNumber,
    pub object: Option<PersonNumber>,
}

impl Slot {
    pub fn tag(self, class: VerbClass) -> FeatureStructure {
        let mut fs = FeatureStructure::from_atoms(self.screeve.features().iter().copied()).with_atom("V");
        fs.insert_bundle(class.subject_role(self.screeve), self.subject.bundle());
        if let Some(object) = self.object {
            fs.insert_bundle(class.object_role(), object.bundle());
        }
        fs
    }
}

/// Reads a tag back into a slot following `class`'s role scheme.
pub fn decode_slot(class: VerbClass, tag: &FeatureStructure) -> Option<Slot> {
    let screeve = Screeve::from_atoms(tag)?;
    if !tag.has_atom("V") {
        return None;
    }
    let subject_role = class.subject_role(screeve);
    let object_role = class.object_role();
    let subject = PersonNumber::from_bundle(tag.bundle(&subject_role)?)?;
    let object = match tag.bundle(&object_role) {
        Some(b) => Some(PersonNumber::from_bundle(b)?),
        None => None,
    };
    if tag.bundles().len() != 1 + object.is_some() as usize {
        return None;
    }
    Some(Slot { screeve, subject, object })
}

/// Every tag of `class` admitted by `grid`, without duplicates, sorted by
/// canonical rendering.
pub fn paradigm_slots(class: VerbClass, grid: &ParadigmGrid) -> Vec<FeatureStructure> {
    let inv = FeatureInventory::default_ref();
    let mut tags: Vec<(String, FeatureStructure)> = grid
        .cells()
        .into_iter()
        .map(|(screeve, subject, object)| {
            let fs = Slot { screeve, subject, object }.tag(class);
            (inv.render(&fs), fs)
        })
        .collect();
    tags.sort_by(|a, b| a.0.cmp(&b.0));
    tags.dedup_by(|a, b| a.0 == b.0);
    tags.into_iter().map(|(_, fs)| fs).collect()
}

/// The surface form of `entry` for `tag`, which must be a slot of the
/// entry's class under `morph`'s grid. Exceptions replace the whole form.
pub fn generate_form(
    entry: &LexiconEntry,
    tag: &FeatureStructure,
    morph: &Morphology,
) -> Result<String, GeorgianError> {
    let grid = morph.grid(entry.class)?;
    let slot = decode_slot(entry.class, tag)
        .filter(|s| grid.admits(s.screeve, s.subject, s.object))
        .ok_or_else(|| outside(entry, tag))?;
    form_for_slot(entry, slot, tag, morph)
}

fn outside(entry: &LexiconEntry, tag: &FeatureStructure) -> GeorgianError {
    GeorgianError::OutsideGrid { lemma: entry.lemma.clone(), class: entry.class, tag: tag.to_string() }
}

fn form_for_slot(
    entry: &LexiconEntry,
    slot: Slot,
    tag: &FeatureStructure,
    morph: &Morphology,
) -> Result<String, GeorgianError> {
    if let Some(form) = entry.exceptions.get(&FeatureInventory::default_ref().render(tag)) {
        return Ok(form.clone());
    }
    realize(entry, slot, morph)
}

fn realize(entry: &LexiconEntry, slot: Slot, morph: &Morphology) -> Result<String, GeorgianError> {
    let class = entry.class;
    let screeve = slot.screeve;
    let part = entry.part_for(screeve);
    let mut groups: Vec<&str> = Vec::with_capacity(3);
    if let Some(conj) = part.conjugation.as_deref() {
        groups.push(conj);
    }
    groups.extend([class.name(), "any"]);
    let keys = lookup_keys(&groups, screeve);
    let template =
        keys.iter().find_map(|k| morph.templates.get(k)).ok_or(GeorgianError::MissingTemplate { class, screeve })?;

    // NOM and ERG arguments take subject markers, the rest object markers,
    // unless the screeve inverts them.
    let mut v_cell = None;
    let mut m_cell = None;
    let args = [(class.subject_role(screeve), Some(slot.subject)), (class.object_role(), slot.object)];
    for (role, cell) in args {
        let Some(cell) = cell else { continue };
        if is_nominative(&role) != template.inverted {
            v_cell.get_or_insert(cell);
        } else {
            m_cell.get_or_insert(cell);
        }
    }
    let explicit_v = v_cell.is_some();
    let v_cell = v_cell.unwrap_or(PersonNumber::new(3, Some(Number::Sg)));
    let missing = |kind, cell| GeorgianError::MissingMarker { kind, cell, class, screeve };
    let v =
        morph.markers.lookup(MarkerKind::Subject, &keys, v_cell).ok_or_else(|| missing(MarkerKind::Subject, v_cell))?;
    let m = match m_cell {
        Some(cell) => Some(
            morph.markers.lookup(MarkerKind::Object, &keys, cell).ok_or_else(|| missing(MarkerKind::Object, cell))?,
        ),
        None => None,
    };

    let mut candidates = vec![(MarkerKind::Subject, v_cell.person, v)];
    if let (Some(cell), Some(m)) = (m_cell, m) {
        candidates.push((MarkerKind::Object, cell.person, m));
    }
    let prefix = candidates
        .iter()
        .min_by_key(|(kind, person, _)| morph.markers.rank(*kind, *person).unwrap_or(usize::MAX))
        .map(|(_, _, marker)| marker.prefix.as_str())
        .unwrap_or_default();

    let mut version =
        part.version.clone().or_else(|| template.version.clone()).unwrap_or_else(|| entry.version.clone());
    if m_cell.is_some_and(|c| c.person == 3) {
        if let Some(shifted) = morph.version_shift.get(&version) {
            version = shifted.clone();
        }
    }
    let stem = part.stem.as_deref().unwrap_or(&entry.stem);
    let thematic = match &part.thematic {
        Some(t) => t.as_str(),
        None if template.thematic => entry.thematic.as_str(),
        None => "",
    };

    let rules = &morph.suffixes;
    let mut v_suffix = v.suffix.as_str();
    let mut m_suffix = m.map(|m| m.suffix.as_str()).unwrap_or_default();
    let third_plural = PersonNumber::new(3, Some(Number::Pl));
    let third_singular = PersonNumber::new(3, Some(Number::Sg));
    if !m_suffix.is_empty() {
        let absorbed = explicit_v && !template.inverted && v_cell == third_plural && m_suffix == rules.plural;
        if v_suffix.ends_with(m_suffix) || absorbed {
            m_suffix = "";
        } else if v_cell == third_singular
            && !rules.plural.is_empty()
            && !rules.drop_before_plural.is_empty()
            && m_suffix.starts_with(rules.plural.as_str())
        {
            v_suffix = v_suffix.strip_suffix(rules.drop_before_plural.as_str()).unwrap_or(v_suffix);
        }
    }

    let preverb = if template.preverb { entry.preverb.as_str() } else { "" };
    Ok([preverb, prefix, &version, stem, thematic, &template.suffix, v_suffix, m_suffix].concat())
}

fn is_nominative(role: &Role) -> bool {
    matches!(role.as_str(), "NOM" | "ERG")
}

/// The full table of `entry` over `grid`, one form per slot.
///
/// Exceptions must name slots of the class grid in `morph` (or of `grid`
/// when the class has none); those outside a smaller `grid` go unused.
pub fn generate_paradigm(
    entry: &LexiconEntry,
    grid: &ParadigmGrid,
    morph: &Morphology,
) -> Result<InflectionTable, GeorgianError> {
    grid.validate()?;
    let inv = FeatureInventory::default_ref();
    let slots = paradigm_slots(entry.class, grid);
    let full = morph.grid(entry.class).unwrap_or(grid);
    let rendered: BTreeSet<String> = paradigm_slots(entry.class, full).iter().map(|t| inv.render(t)).collect();
    if let Some(key) = entry.exceptions.keys().find(|k| !rendered.contains(*k)) {
        return Err(GeorgianError::OutsideGrid { lemma: entry.lemma.clone(), class: entry.class, tag: key.clone() });
    }
    let mut cells = Vec::with_capacity(slots.len());
    for tag in slots {
        let slot = decode_slot(entry.class, &tag).expect("slot tags decode");
        let form = form_for_slot(entry, slot, &tag, morph)?;
        cells.push(Cell { tag, form });
    }
    InflectionTable::new(entry.lemma.clone(), cells)
        .map_err(|e| GeorgianError::Config(format!("grid yields no cells for {}: {e}", entry.lemma)))
}
