use layermorph::schema::{parse_tag, serialize, subsumes, unify, Feature, FeatureInventory, FeatureStructure, Role};
use proptest::prelude::*;
use proptest::sample::select;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn inv() -> &'static FeatureInventory {
    FeatureInventory::default_ref()
}

fn dimension_labels(skip: &[&str]) -> Vec<Vec<Feature>> {
    inv().dimension_names().filter(|d| !skip.contains(d)).map(|d| inv().labels(d).unwrap().to_vec()).collect()
}

/// At most one label per dimension, each dimension present with `density`.
fn atoms(density: f64, skip: &[&str]) -> impl Strategy<Value = Vec<Feature>> {
    dimension_labels(skip)
        .into_iter()
        .map(|labels| prop::option::weighted(density, select(labels)))
        .collect::<Vec<_>>()
        .prop_map(|v| v.into_iter().flatten().collect())
}

fn structure(depth: u32, density: f64) -> BoxedStrategy<FeatureStructure> {
    let leaf = atoms(density, &[]).prop_map(FeatureStructure::from_atoms);
    if depth == 0 {
        return leaf.boxed();
    }
    let roles: Vec<Role> = inv().roles().to_vec();
    let inner = structure(depth - 1, density).prop_filter("bundles are non-empty", |b| !b.is_empty());
    (leaf, prop::collection::btree_map(select(roles), inner, 0..3))
        .prop_map(|(mut fs, bundles)| {
            for (role, b) in bundles {
                fs.insert_bundle(role, b);
            }
            fs
        })
        .boxed()
}

fn nonempty(depth: u32, density: f64) -> impl Strategy<Value = FeatureStructure> {
    structure(depth, density).prop_filter("top level is non-empty", |fs| !fs.is_empty())
}

/// Renders with items in a random order at every level.
fn shuffled(fs: &FeatureStructure, rng: &mut ChaCha8Rng) -> String {
    let mut items: Vec<String> = fs.atoms().map(|a| a.to_string()).collect();
    for (role, b) in fs.bundles() {
        items.push(format!("{role}({})", shuffled(b, rng)));
    }
    items.shuffle(rng);
    items.join(";")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parse_inverts_serialize(fs in nonempty(2, 0.3)) {
        let text = serialize(&fs);
        prop_assert_eq!(parse_tag(&text).unwrap(), fs.clone());
        prop_assert_eq!(serialize(&inv().parse_tag(&text).unwrap()), text);
    }

    #[test]
    fn item_order_is_irrelevant(fs in nonempty(2, 0.3), seed in any::<u64>()) {
        let text = shuffled(&fs, &mut ChaCha8Rng::seed_from_u64(seed));
        let parsed = parse_tag(&text).unwrap();
        prop_assert_eq!(serialize(&parsed), serialize(&fs));
        prop_assert_eq!(parsed, fs);
    }

    #[test]
    fn lowercase_input_is_accepted(fs in nonempty(1, 0.3)) {
        prop_assert_eq!(parse_tag(&serialize(&fs).to_lowercase()).unwrap(), fs);
    }

    #[test]
    fn unify_is_idempotent(a in structure(2, 0.2)) {
        prop_assert_eq!(unify(&a, &a).unwrap(), a);
    }

    #[test]
    fn unify_is_commutative(a in structure(2, 0.1), b in structure(2, 0.1)) {
        match (unify(&a, &b), unify(&b, &a)) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(x), Err(y)) => {
                prop_assert_eq!(x.dimension, y.dimension);
                prop_assert_eq!(x.path, y.path);
            }
            (x, y) => prop_assert!(false, "one-sided failure: {:?} / {:?}", x, y),
        }
    }

    #[test]
    fn unify_is_associative(a in structure(2, 0.1), b in structure(2, 0.1), c in structure(2, 0.1)) {
        let left = unify(&a, &b).and_then(|ab| unify(&ab, &c));
        let right = unify(&b, &c).and_then(|bc| unify(&a, &bc));
        match (left, right) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "one-sided failure: {:?} / {:?}", x, y),
        }
    }

    #[test]
    fn unifier_is_subsumed_by_both(a in structure(2, 0.1), b in structure(2, 0.1)) {
        if let Ok(u) = unify(&a, &b) {
            prop_assert!(subsumes(&a, &u));
            prop_assert!(subsumes(&b, &u));
        }
        prop_assert!(subsumes(&a, &a));
        prop_assert!(subsumes(&FeatureStructure::new(), &a));
    }

    #[test]
    fn valid_structures_have_no_violations(fs in nonempty(2, 0.3)) {
        prop_assert!(inv().validate(&fs).is_empty());
    }
}

/// Structures the legacy flat encoding can express: no word-level person,
/// flat bundles of person and number, gender only on the possessor.
fn flat_encodable() -> impl Strategy<Value = FeatureStructure> {
    let person = select(inv().labels("person").unwrap().to_vec());
    let number = select(inv().labels("number").unwrap().to_vec());
    let gender = prop::option::of(select(inv().labels("gender").unwrap().to_vec()));
    let bundle = (person, number, gender);
    let roles = vec![Role::new("NOM"), Role::new("ERG"), Role::new("ACC"), Role::new("DAT"), Role::new("POSS")];
    (atoms(0.3, &["person"]), prop::collection::btree_map(select(roles), bundle, 0..4))
        .prop_map(|(word, bundles)| {
            let mut fs = FeatureStructure::from_atoms(word);
            for (role, (p, n, g)) in bundles {
                let mut b = FeatureStructure::from_atoms([p, n]);
                if role.as_str() == "POSS" {
                    if let Some(g) = g {
                        b.insert_atom(g);
                    }
                }
                fs.insert_bundle(role, b);
            }
            fs
        })
        .prop_filter("non-empty", |fs| !fs.is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn flat_round_trip_on_encodable_structures(fs in flat_encodable()) {
        let flat = inv().to_flat(&fs).unwrap();
        prop_assert_eq!(inv().from_flat(&flat).unwrap(), fs.clone(), "via {}", flat);
        let again = inv().to_flat(&inv().from_flat(&flat).unwrap()).unwrap();
        prop_assert_eq!(again, flat);
    }
}
