mod common;

use common::{brute, case, formula, joined, joined_with, truth, worlds, Case};
use factlogic::apriori::{meu_resolution, MeuDb};
use factlogic::eval::{ahc_complete, ari, symmetrize, SimilarityMatrix};
use factlogic::fol::syntax::parse;
use factlogic::fol::{render, Formula, Proposition, Quantity, Term, TermKind};
use factlogic::kb::{ExpansionMode, KbRelation, KnowledgeBase};
use factlogic::reason::{classify_pair, pair_table, CmpOutcome, WorldTable, DEFAULT_ATOM_CAP};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn join_matches_enumeration(c in case()) {
        prop_assert_eq!(joined(&c), brute(&c));
    }

    #[test]
    fn counterexample_world_caps_confidence(c in case()) {
        let witness = worlds(&c).iter().any(|(a, b)| truth(&c.a, "a", a) && !truth(&c.b, "b", b));
        if witness {
            prop_assert!(joined(&c) < Ratio::from_integer(1));
        }
    }
}

fn joint(c: &Case, ws: &[(Vec<bool>, Vec<bool>)]) -> usize {
    ws.iter().filter(|(a, b)| truth(&c.a, "a", a) && truth(&c.b, "b", b)).count()
}

fn neq(i: usize, j: usize) -> WorldTable {
    pair_table(CmpOutcome::NEq, &format!("a{i}"), &format!("b{j}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn extra_neq_table_removes_joint_truth(c in case(), k in 0usize..9) {
        let (i, j) = ((k / 3) % c.n, k % c.m);
        let before = worlds(&c);
        let after: Vec<_> = before.iter().filter(|(a, b)| a[i] != b[j]).cloned().collect();
        prop_assert!(after.iter().all(|(a, b)| !(a[i] && b[j])));
        prop_assert!(joint(&c, &after) <= joint(&c, &before));
        let den = after.iter().filter(|(a, _)| truth(&c.a, "a", a)).count() as u64;
        let want = if den == 0 { Ratio::from_integer(0) } else { Ratio::new(joint(&c, &after) as u64, den) };
        prop_assert_eq!(joined_with(&c, &[neq(i, j)]), want);
    }

    #[test]
    fn equal_columns_iff_mutual_confidence_one(
        a in formula("p", 3),
        b in formula("p", 3),
    ) {
        let kb = KnowledgeBase::default();
        let v = classify_pair(&a, &b, &kb, DEFAULT_ATOM_CAP).unwrap();
        let one = Ratio::from_integer(1);
        let assignments: Vec<Vec<bool>> = (0u32..8).map(|x| (0..3).map(|k| x >> k & 1 == 1).collect()).collect();
        let equal = assignments.iter().all(|v| truth(&a, "p", v) == truth(&b, "p", v));
        let satisfiable = assignments.iter().any(|v| truth(&a, "p", v));
        prop_assert_eq!(v.confidence_ab == one && v.confidence_ba == one, equal && satisfiable);
    }
}

#[test]
fn extra_neq_table_can_raise_the_ratio() {
    // A = a0 ∨ ¬a1, B = b0: the joint-truth count is monotone, the ratio is not.
    let a = Formula::Or(vec![Formula::Atom(common::atom("a", 0)), Formula::not(Formula::Atom(common::atom("a", 1)))]);
    let b = Formula::Atom(common::atom("b", 0));
    let c = Case { n: 2, m: 1, a, b, outcomes: vec![CmpOutcome::Omega, CmpOutcome::Omega] };
    assert_eq!(joined(&c), Ratio::new(1, 2));
    assert_eq!(joined_with(&c, &[neq(1, 0)]), Ratio::new(2, 3));
}

fn matrix(n: usize) -> impl Strategy<Value = SimilarityMatrix> {
    prop::collection::vec(prop::collection::vec(0.0f64..=1.0, n), n)
        .prop_map(move |values| SimilarityMatrix { n, values })
}

proptest! {
    #[test]
    fn symmetrized_matrices_are_symmetric(m in (2usize..8).prop_flat_map(matrix)) {
        prop_assert!(symmetrize(&m).is_symmetric());
    }

    #[test]
    fn ahc_with_k_equal_n_gives_singletons(m in (1usize..8).prop_flat_map(matrix)) {
        let (clusters, merges) = ahc_complete(&symmetrize(&m), m.n);
        prop_assert!(merges.is_empty());
        let want: Vec<Vec<usize>> = (0..m.n).map(|i| vec![i]).collect();
        prop_assert_eq!(clusters, want);
    }
}

#[test]
fn permuted_labels_have_ari_near_zero() {
    let gold = common::dataset("rq2c").expected_clusters;
    let mut labels = vec![0; 13];
    for (c, members) in gold.iter().enumerate() {
        for &i in members {
            labels[i] = c;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let runs = 2000;
    let mean: f64 = (0..runs)
        .map(|_| {
            let mut p = labels.clone();
            p.shuffle(&mut rng);
            ari(&labels, &p)
        })
        .sum::<f64>()
        / runs as f64;
    assert!(mean.abs() < 0.02, "{mean}");
    assert_eq!(ari(&labels, &labels), 1.0);
}

// Knowledge base.

const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

fn relations_json(kind: &str, pairs: &[(usize, usize)]) -> String {
    let rs: Vec<String> = pairs
        .iter()
        .map(|&(x, y)| format!(r#"{{"kind":"{kind}","left":"{}","right":"{}"}}"#, NAMES[x], NAMES[y]))
        .collect();
    format!(r#"{{"relations":[{}]}}"#, rs.join(","))
}

fn pairs() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..5, 0usize..5), 0..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn equivalence_is_an_equivalence_relation(ps in pairs()) {
        let kb = KnowledgeBase::from_json(&relations_json("EQUIV", &ps)).unwrap();
        let eq = |x: &str, y: &str| kb.relation(x, y) == KbRelation::Equiv;
        for x in NAMES {
            prop_assert!(eq(x, x));
            for y in NAMES {
                prop_assert_eq!(eq(x, y), eq(y, x));
                for z in NAMES {
                    prop_assert!(!(eq(x, y) && eq(y, z)) || eq(x, z));
                }
            }
        }
    }

    #[test]
    fn expansion_is_monotone_in_the_kb(ps in pairs(), extra in (0usize..5, 0usize..5), seed in 0usize..5) {
        let small = KnowledgeBase::from_json(&relations_json("IMPLIES", &ps)).unwrap();
        let mut more = ps.clone();
        more.push(extra);
        let large = KnowledgeBase::from_json(&relations_json("IMPLIES", &more)).unwrap();
        let p = Proposition::unary("be", Term::func(NAMES[seed]));
        let before = small.expand(&p, ExpansionMode::Entailing).unwrap();
        let after = large.expand(&p, ExpansionMode::Entailing).unwrap();
        prop_assert!(before.iter().all(|q| after.contains(q)));
    }
}

// Entity resolution.

fn meu_entry(start: usize, len: usize, text: &str, conf: f64) -> String {
    format!(
        r#"{{"start":{start},"end":{},"text":"{text}","monad":"{text}","type":"NOUN","source":"ConceptNet","confidence":{conf}}}"#,
        start + len
    )
}

proptest! {
    #[test]
    fn meu_resolution_never_drops_when_adding(
        entries in prop::collection::vec((0usize..10, 1usize..10, "[a-c]{3,6}", 0.0f64..=1.0), 0..5),
        extra in (0usize..10, 1usize..10, "[a-c]{3,6}", 0.0f64..=1.0),
        span in (0usize..10, 1usize..10, "[a-c]{3,6}"),
    ) {
        let render = |es: &[(usize, usize, String, f64)]| {
            let xs: Vec<String> = es.iter().map(|(s, l, t, c)| meu_entry(*s, *l, t, *c)).collect();
            MeuDb::from_json(&format!("[{}]", xs.join(","))).unwrap()
        };
        let mut more = entries.clone();
        more.push(extra);
        let (min, max) = (span.0, span.0 + span.1);
        let before = meu_resolution(min, max, "NOUN", &span.2, &render(&entries)).0;
        let after = meu_resolution(min, max, "NOUN", &span.2, &render(&more)).0;
        prop_assert!(after >= before);
    }
}

// Formula syntax.

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,6}"
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = (word(), prop::option::of(word()), any::<bool>(), any::<bool>(), any::<bool>(), 1u8..5).prop_map(
        |(name, spec, var, all, neg, k)| {
            let mut t = if var { Term::var(format!("?{k}")) } else { Term::func(name) };
            if t.kind == TermKind::Func {
                t.specification = spec;
                if all {
                    t.quantity = Quantity::All;
                }
            }
            t.negated = neg;
            t
        },
    );
    leaf.prop_recursive(2, 6, 2, |inner| {
        (inner.clone(), prop::option::of(inner.clone()), prop::collection::vec(("[A-Z]{2,4}", inner), 0..2)).prop_map(
            |(mut t, cop, props)| {
                t.cop = cop.map(Box::new);
                for (k, v) in props {
                    t.properties.entry(k).or_default().push(v);
                }
                t
            },
        )
    })
}

fn proposition() -> impl Strategy<Value = Proposition> {
    (word(), prop::collection::vec(term(), 1..=2), any::<bool>(), prop::collection::vec(("[A-Z]{2,4}", term()), 0..2))
        .prop_map(|(name, args, neg, props)| {
            let mut p = Proposition { name, args, negated: neg, properties: Default::default() };
            for (k, v) in props {
                p.properties.entry(k).or_default().push(v);
            }
            p
        })
}

fn any_formula() -> impl Strategy<Value = Formula> {
    proposition().prop_map(Formula::Atom).prop_recursive(3, 10, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (1u8..5, inner).prop_map(|(k, f)| Formula::Exists(format!("?{k}"), Box::new(f))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn render_then_parse_is_identity(f in any_formula()) {
        let text = render(&f);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, f);
    }
}

#[test]
fn renaming_a_binder_keeps_truth_tables() {
    let kb = KnowledgeBase::default();
    let body = Formula::And(vec![
        Formula::Atom(Proposition::binary("p", Term::var("?1"), Term::func("x"))),
        Formula::Atom(Proposition::unary("q", Term::var("?1"))),
    ]);
    let f = Formula::Exists("?1".into(), Box::new(body));
    let mut g = f.clone();
    g.rename_var("?1", "?9");
    assert_ne!(f, g);
    let v = classify_pair(&f, &g, &kb, DEFAULT_ATOM_CAP).unwrap();
    assert_eq!((v.confidence_ab, v.confidence_ba), (Ratio::from_integer(1), Ratio::from_integer(1)));
}
