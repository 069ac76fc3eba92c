mod common;

use common::{confidence_goldens, dataset, kb};
use factlogic::apriori::AprioriOptions;
use factlogic::eval::{canonical, Clustering};
use factlogic::evaluate::{compile_all, evaluate, logical_verdicts, EvalConfig, Method};
use factlogic::explain::Explanation;
use factlogic::reason::{analyse, PairClass, Prepared, DEFAULT_ATOM_CAP};
use num_rational::Ratio;

fn confidences_match(set: &str) {
    let kb = kb();
    let d = dataset(set);
    let compiled = compile_all(&d, &kb, AprioriOptions::default()).unwrap();
    let v = logical_verdicts(&compiled, &kb, DEFAULT_ATOM_CAP).unwrap();
    let gold = confidence_goldens(set);
    assert_eq!(gold.len(), d.len() * d.len());
    for (i, j, class, conf) in gold {
        assert_eq!((v[i][j].class_ab, v[i][j].confidence_ab), (class, conf), "{set} {i}->{j}");
    }
}

#[test]
fn rq2a_confidences() {
    confidences_match("rq2a");
}

#[test]
fn rq2b_confidences() {
    confidences_match("rq2b");
}

#[test]
fn rq2c_confidences() {
    confidences_match("rq2c");
}

#[test]
fn dataset_annotations_agree_with_oracle_classes() {
    for set in ["rq2a", "rq2b", "rq2c"] {
        let d = dataset(set);
        for (i, j, class, _) in confidence_goldens(set) {
            assert_eq!(d.expected_pairs[&(i, j)], class, "{set} {i}->{j}");
        }
    }
}

#[test]
fn class_splits() {
    for (set, want) in [("rq2a", [15, 16, 33]), ("rq2b", [10, 8, 18]), ("rq2c", [32, 27, 110])] {
        let d = dataset(set);
        let count = |c| d.expected_pairs.values().filter(|&&x| x == c).count();
        let got = [count(PairClass::Implication), count(PairClass::Inconsistency), count(PairClass::Indifference)];
        assert_eq!(got, want, "{set}");
    }
}

#[test]
fn logical_scores_are_perfect() {
    let kb = kb();
    for set in ["rq2a", "rq2b", "rq2c"] {
        let r = evaluate(&dataset(set), &kb, &EvalConfig::default()).unwrap();
        let c = r.classification.unwrap();
        assert_eq!((c.accuracy, c.macro_avg.f1, c.weighted_avg.f1), (1.0, 1.0, 1.0), "{set}");
    }
}

#[test]
fn logical_clusters_recover_expected_partitions() {
    let kb = kb();
    for set in ["rq2b", "rq2c"] {
        for how in [Clustering::Ahc, Clustering::Kmedoids] {
            let d = dataset(set);
            let cfg = EvalConfig { clustering: how, ..EvalConfig::default() };
            let r = evaluate(&d, &kb, &cfg).unwrap();
            assert_eq!(canonical(r.clusters.clone()), canonical(d.expected_clusters.clone()), "{set} {how:?}");
            let s = r.clustering_scores.unwrap();
            assert_eq!((s.alignment, s.purity, s.ari), (1.0, 1.0, 1.0), "{set} {how:?}");
        }
    }
}

#[test]
fn rq2c_silhouette() {
    let r = evaluate(&dataset("rq2c"), &kb(), &EvalConfig::default()).unwrap();
    let s = r.clustering_scores.unwrap().silhouette.unwrap();
    assert!((s - 0.46).abs() < 0.005, "{s}");
}

#[test]
fn explanation_captions() {
    let kb = kb();
    let d = dataset("rq2c");
    let compiled = compile_all(&d, &kb, AprioriOptions::default()).unwrap();
    let p = |i: usize| Prepared::new(compiled[i].formula.clone(), &kb).unwrap();
    let e = Explanation::new(
        &d.sentences[11].text,
        &d.sentences[2].text,
        analyse(&p(11), &p(2), &kb, DEFAULT_ATOM_CAP).unwrap(),
    )
    .unwrap();
    assert_eq!(e.confidences(), (Ratio::from_integer(1), Ratio::new(1, 2)));
    assert_eq!(e.classes(), (PairClass::Implication, PairClass::Indifference));
    let same = analyse(&p(11), &p(11), &kb, DEFAULT_ATOM_CAP).unwrap();
    assert_eq!(same.ab.confidence, Ratio::from_integer(1));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let kb = kb();
    let d = dataset("rq2c");
    for method in [Method::Logical, Method::Lg] {
        let cfg = EvalConfig { method, clustering: Clustering::Kmedoids, seed: 7, ..EvalConfig::default() };
        let a = serde_json::to_string(&evaluate(&d, &kb, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&evaluate(&d, &kb, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn baselines_score_below_logical() {
    let kb = kb();
    let d = dataset("rq2c");
    for method in [Method::Cosine, Method::Sg, Method::Lg] {
        let r = evaluate(&d, &kb, &EvalConfig { method, ..EvalConfig::default() }).unwrap();
        assert!(r.thresholds.is_some());
        assert!(r.classification.unwrap().accuracy < 1.0, "{method:?}");
    }
}
