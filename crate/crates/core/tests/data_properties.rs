use std::collections::{BTreeMap, HashSet};

use layermorph::baseline::BaselineModel;
use layermorph::eval::{edit_distance, evaluate, learning_curve, BaselineHarness, CommandHarness, Harness};
use layermorph::georgian::{generate_paradigm, sample_lexicon, Morphology};
use layermorph::schema::{parse_tag, FeatureInventory};
use layermorph::split::{make_instances, split_form, split_lemma, Partition, ReinflectionInstance, SplitSizes};
use layermorph::unimorph::{group_by_lemma, read_unimorph, write_unimorph, Cell, InflectionTable, TagMode};
use proptest::prelude::*;
use proptest::sample::select;

fn inv() -> &'static FeatureInventory {
    FeatureInventory::default_ref()
}

fn sample_tables() -> Vec<InflectionTable> {
    let morph = Morphology::default_ref();
    sample_lexicon().iter().map(|e| generate_paradigm(e, morph.grid(e.class).unwrap(), morph).unwrap()).collect()
}

const TAGS: [&str; 8] = [
    "V;PRS",
    "V;PST",
    "V;FUT;NOM(1;PL);ACC(2;SG)",
    "V;FUT;NOM(2;SG);ACC(1;SG)",
    "N;SG;POSS(3;SG;FEM)",
    "N;PL;NOM(DAT)",
    "V;PST;PFV;ERG(3;PL)",
    "ADJ",
];

fn cells_strategy() -> impl Strategy<Value = Vec<(usize, String)>> {
    prop::collection::btree_map(0..TAGS.len(), "[a-zა-ჰ]{1,8}( [a-z]{1,3})?", 1..=TAGS.len())
        .prop_map(|m| m.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn unimorph_write_read_round_trip(raw in prop::collection::btree_map("[a-zა-ჰ]{1,6}", cells_strategy(), 100..=100)) {
        let tables: Vec<InflectionTable> = raw
            .iter()
            .map(|(lemma, cells)| {
                let cells = cells.iter().map(|(t, f)| Cell { tag: parse_tag(TAGS[*t]).unwrap(), form: f.clone() }).collect();
                InflectionTable::new(lemma.clone(), cells).unwrap()
            })
            .collect();
        let mut out = Vec::new();
        write_unimorph(&mut out, &tables, TagMode::Layered, inv()).unwrap();
        let entries = read_unimorph(out.as_slice(), TagMode::Layered, inv()).unwrap();
        prop_assert_eq!(entries.len(), tables.iter().map(InflectionTable::len).sum::<usize>());
        let back = group_by_lemma(entries, TagMode::Layered).unwrap();
        let canon = |ts: &[InflectionTable]| -> BTreeMap<String, Vec<(String, String)>> {
            ts.iter()
                .map(|t| (t.lemma().to_string(), t.sorted_cells(inv()).into_iter().map(|(s, c)| (s, c.form.clone())).collect()))
                .collect()
        };
        prop_assert_eq!(canon(&back), canon(&tables));

        let mut again = Vec::new();
        write_unimorph(&mut again, &back, TagMode::Layered, inv()).unwrap();
        prop_assert_eq!(again, out);
    }
}

#[test]
fn make_instances_is_uniform_over_tables() {
    let tables: Vec<InflectionTable> = ["A", "B", "C"]
        .iter()
        .map(|lemma| {
            let cells = (0..100)
                .map(|i| Cell {
                    tag: parse_tag(&format!("{};V", ["PRS", "PST", "FUT"][i % 3]))
                        .unwrap()
                        .with_atom(format!("X{i}").as_str()),
                    form: format!("{lemma}{i}"),
                })
                .collect();
            InflectionTable::new(*lemma, cells).unwrap()
        })
        .collect();
    let n = 10_000;
    let xs = make_instances(&tables, 17, n).unwrap();
    assert_eq!(xs.len(), n);
    let distinct: HashSet<_> = xs.iter().map(|x| (&x.lemma, &x.source_form, &x.target_form)).collect();
    assert_eq!(distinct.len(), n);

    let expected = n as f64 / 3.0;
    let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    let mut chi2 = 0.0;
    for lemma in ["A", "B", "C"] {
        let count = xs.iter().filter(|x| x.lemma == lemma).count() as f64;
        assert!((count - expected).abs() <= 3.0 * sigma, "{lemma}: {count}");
        chi2 += (count - expected).powi(2) / expected;
    }
    // chi-squared, 2 degrees of freedom, p = 0.001
    assert!(chi2 < 13.82, "chi2 = {chi2}");
}

#[test]
fn form_and_lemma_splits_on_generated_data() {
    let tables = sample_tables();
    let xs = make_instances(&tables, 3, 4000).unwrap();
    let sizes = SplitSizes::new(3000, 400, 400);
    for seed in 0..5 {
        let form = split_form(&xs, sizes, seed).unwrap();
        let keys = |p| -> HashSet<(String, String)> {
            form.select(&xs, p).iter().map(|x| (x.target_form.clone(), inv().render(&x.target_tag))).collect()
        };
        let (tr, dv, te) = (keys(Partition::Train), keys(Partition::Dev), keys(Partition::Test));
        assert!(tr.is_disjoint(&te) && tr.is_disjoint(&dv) && dv.is_disjoint(&te));
        for p in Partition::ALL {
            assert_eq!(form.indices(p).len(), sizes.get(p));
        }

        // only 24 lemmas: a lemma split of this size needs smaller partitions
        let small = SplitSizes::new(1500, 150, 150);
        let lemma = split_lemma(&xs, small, seed).unwrap();
        let lemmas = |p| -> HashSet<String> { lemma.select(&xs, p).iter().map(|x| x.lemma.clone()).collect() };
        let (tr, dv, te) = (lemmas(Partition::Train), lemmas(Partition::Dev), lemmas(Partition::Test));
        assert!(tr.is_disjoint(&te) && tr.is_disjoint(&dv) && dv.is_disjoint(&te));
        assert_eq!(lemma.assignment.len(), small.total());
        assert_eq!(split_form(&xs, sizes, seed).unwrap(), form);
    }
}

fn word() -> impl Strategy<Value = String> {
    prop::collection::vec(select(vec!['a', 'b', 'c', 'ა', 'ბ', 'შ']), 0..10).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn edit_distance_bounds(a in word(), b in word()) {
        let (la, lb) = (a.chars().count(), b.chars().count());
        let d = edit_distance(&a, &b);
        prop_assert!(d >= la.abs_diff(lb));
        prop_assert!(d <= la.max(lb));
        let mut joined = a.clone();
        joined.push('x');
        prop_assert_eq!(edit_distance(&joined, &a), 1);
    }
}

fn gold_for(forms: &[String]) -> Vec<ReinflectionInstance> {
    forms
        .iter()
        .map(|f| ReinflectionInstance {
            lemma: "L".into(),
            source_tag: parse_tag("V;PRS").unwrap(),
            source_form: "s".into(),
            target_tag: parse_tag("V;PST").unwrap(),
            target_form: f.clone(),
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluate_matches_independent_mean(pairs in prop::collection::vec((word(), word()), 1..30), seed in any::<u64>()) {
        let preds: Vec<String> = pairs.iter().map(|p| p.0.clone()).collect();
        let golds: Vec<String> = pairs.iter().map(|p| p.1.clone()).collect();
        let report = evaluate(&preds, &gold_for(&golds)).unwrap();
        let mean = pairs.iter().map(|(p, g)| edit_distance(p, g) as f64).sum::<f64>() / pairs.len() as f64;
        prop_assert!((report.avg_edit_distance - mean).abs() < 1e-12);
        let exact = pairs.iter().filter(|(p, g)| p == g).count() as f64 / pairs.len() as f64;
        prop_assert!((report.accuracy - exact).abs() < 1e-12);

        // shuffling pairs together leaves the report unchanged
        use rand::{seq::SliceRandom, SeedableRng};
        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let sp: Vec<String> = shuffled.iter().map(|p| p.0.clone()).collect();
        let sg: Vec<String> = shuffled.iter().map(|p| p.1.clone()).collect();
        let again = evaluate(&sp, &gold_for(&sg)).unwrap();
        prop_assert_eq!(again.accuracy, report.accuracy);
        prop_assert!((again.avg_edit_distance - report.avg_edit_distance).abs() < 1e-12);
    }
}

#[test]
fn learning_curve_full_train_matches_direct_run() {
    let tables = sample_tables();
    let xs = make_instances(&tables, 11, 2000).unwrap();
    let spec = split_form(&xs, SplitSizes::new(1600, 200, 200), 5).unwrap();
    let train: Vec<ReinflectionInstance> = spec.select(&xs, Partition::Train).into_iter().cloned().collect();
    let test: Vec<ReinflectionInstance> = spec.select(&xs, Partition::Test).into_iter().cloned().collect();
    let direct =
        evaluate(&BaselineModel::train(&train).predict_all(&test.iter().map(|x| x.query()).collect::<Vec<_>>()), &test)
            .unwrap();

    let points = learning_curve(&[400, 800, 1600], &mut BaselineHarness::default(), &xs, &spec, 0).unwrap();
    assert_eq!(points.len(), 3);
    assert_eq!(points[2].train_size, 1600);
    assert_eq!(points[2].accuracy, direct.accuracy);
    assert_eq!(points[2].avg_edit_distance, direct.avg_edit_distance);

    assert!(learning_curve(&[], &mut BaselineHarness::default(), &xs, &spec, 0).unwrap().is_empty());
    assert!(learning_curve(&[800, 400], &mut BaselineHarness::default(), &xs, &spec, 0).is_err());
    assert!(learning_curve(&[1601], &mut BaselineHarness::default(), &xs, &spec, 0).is_err());
}

/// Keeps every training set it is given.
struct Recorder(Vec<Vec<ReinflectionInstance>>);

impl Harness for Recorder {
    fn run(
        &mut self,
        train: &[ReinflectionInstance],
        test: &[layermorph::split::ReinflectionQuery],
    ) -> Result<Vec<String>, layermorph::eval::EvalError> {
        self.0.push(train.to_vec());
        Ok(test.iter().map(|q| q.source_form.clone()).collect())
    }
}

#[test]
fn learning_curve_subsamples_are_nested() {
    let xs = make_instances(&sample_tables(), 1, 1000).unwrap();
    let spec = split_form(&xs, SplitSizes::new(600, 100, 100), 2).unwrap();
    let mut rec = Recorder(Vec::new());
    learning_curve(&[100, 300, 600], &mut rec, &xs, &spec, 9).unwrap();
    let runs = rec.0;
    assert_eq!(runs.iter().map(Vec::len).collect::<Vec<_>>(), vec![100, 300, 600]);
    assert_eq!(runs[0][..], runs[1][..100]);
    assert_eq!(runs[1][..], runs[2][..300]);
}

#[test]
fn command_harness_runs_a_copy_model() {
    let dir = tempfile::tempdir().unwrap();
    let xs = make_instances(&sample_tables(), 4, 300).unwrap();
    let spec = split_form(&xs, SplitSizes::new(200, 50, 50), 4).unwrap();
    let mut harness = CommandHarness::new(
        "sh -c 'cp \"$0\" \"$1\"' {train} {model}",
        "sh -c 'cut -f3 \"$0\" > \"$1\"' {input} {output}",
        dir.path(),
    )
    .unwrap();
    let points = learning_curve(&[200], &mut harness, &xs, &spec, 0).unwrap();
    let test: Vec<ReinflectionInstance> = spec.select(&xs, Partition::Test).into_iter().cloned().collect();
    let copy: Vec<String> = test.iter().map(|x| x.source_form.clone()).collect();
    assert_eq!(points[0].accuracy, evaluate(&copy, &test).unwrap().accuracy);
    assert!(dir.path().join("run-0/model").exists());

    let mut failing = CommandHarness::new("false", "true", dir.path()).unwrap();
    let err = learning_curve(&[200], &mut failing, &xs, &spec, 0).unwrap_err();
    assert!(err.to_string().contains("false"), "{err}");
}
