#![allow(dead_code)]

use std::path::PathBuf;

use factlogic::apriori::{load_dep_graph, AprioriOptions, MeuDb};
use factlogic::dataset::Dataset;
use factlogic::fol::{Formula, Proposition, Term};
use factlogic::kb::KnowledgeBase;
use factlogic::pipeline::{compile, Compiled};
use factlogic::reason::{join_all, pair_table, tabular_semantics, CmpOutcome, PairClass, WorldTable};
use num_rational::Ratio;
use proptest::prelude::*;

pub fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

pub fn kb() -> KnowledgeBase {
    KnowledgeBase::load(data("kb.json")).expect("kb loads")
}

pub fn fixture(name: &str, kb: &KnowledgeBase) -> Compiled {
    let g = load_dep_graph(data(&format!("graphs/{name}.json"))).expect("graph");
    let db = MeuDb::load(data(&format!("meu/{name}.json"))).expect("meu");
    compile(&g, &db, kb, AprioriOptions::default()).expect("compiles")
}

pub fn dataset(name: &str) -> Dataset {
    Dataset::load(data(&format!("datasets/{name}.yaml"))).expect("dataset")
}

pub struct StageGolden {
    pub fixture: String,
    pub stage: String,
    pub ids: bool,
    pub expected: String,
}

pub fn stage_goldens() -> Vec<StageGolden> {
    let text = std::fs::read_to_string(data("goldens/stages.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.splitn(4, '\t').collect();
            StageGolden { fixture: f[0].into(), stage: f[1].into(), ids: f[2] == "1", expected: f[3].into() }
        })
        .collect()
}

/// The rendered string for one golden row.
pub fn actual(g: &StageGolden, c: &Compiled) -> String {
    if g.stage == "fol" {
        factlogic::fol::render(&c.formula)
    } else {
        c.trace.stage(&g.stage).expect("stage exists").render(g.ids)
    }
}

pub fn confidence_goldens(set: &str) -> Vec<(usize, usize, PairClass, Ratio<u64>)> {
    let text = std::fs::read_to_string(data(&format!("goldens/{set}_confidences.tsv"))).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let conf = match f[3].split_once('/') {
                Some((n, d)) => Ratio::new(n.parse().unwrap(), d.parse().unwrap()),
                None => Ratio::from_integer(f[3].parse().unwrap()),
            };
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), conf)
        })
        .collect()
}

// Random formulas over labelled atoms.

pub fn atom(prefix: &str, i: usize) -> Proposition {
    Proposition::unary(format!("{prefix}{i}"), Term::func("x"))
}

pub fn formula(prefix: &'static str, n: usize) -> impl Strategy<Value = Formula> {
    let leaf = (0..n).prop_map(move |i| Formula::Atom(atom(prefix, i)));
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner, 2..=3).prop_map(Formula::Or),
        ]
    })
}

pub fn outcome() -> impl Strategy<Value = CmpOutcome> {
    prop_oneof![
        Just(CmpOutcome::Eq),
        Just(CmpOutcome::NEq),
        Just(CmpOutcome::ImplNspec),
        Just(CmpOutcome::ImplNone),
        Just(CmpOutcome::ImplDown),
        Just(CmpOutcome::ImplGen),
        Just(CmpOutcome::Omega),
    ]
}

/// Two formulas over at most six atoms with one outcome per atom pair.
#[derive(Clone, Debug)]
pub struct Case {
    pub n: usize,
    pub m: usize,
    pub a: Formula,
    pub b: Formula,
    /// Row-major `n × m`.
    pub outcomes: Vec<CmpOutcome>,
}

pub fn case() -> impl Strategy<Value = Case> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| {
        (formula("a", n), formula("b", m), prop::collection::vec(outcome(), n * m))
            .prop_map(move |(a, b, outcomes)| Case { n, m, a, b, outcomes })
    })
}

fn labels(prefix: &str, k: usize) -> Vec<(Proposition, String)> {
    (0..k).map(|i| (atom(prefix, i), format!("{prefix}{i}"))).collect()
}

fn admits(o: CmpOutcome, x: bool, y: bool) -> bool {
    match o {
        CmpOutcome::Eq => x == y,
        CmpOutcome::NEq => x != y,
        CmpOutcome::Omega => true,
        _ => !x || y,
    }
}

/// Confidence through sentence tables, pair tables and natural joins.
pub fn joined(c: &Case) -> Ratio<u64> {
    joined_with(c, &[])
}

/// As [`joined`], with additional pair tables joined in.
pub fn joined_with(c: &Case, extra: &[WorldTable]) -> Ratio<u64> {
    let ta = tabular_semantics(&c.a, &labels("a", c.n), "A", 20).unwrap();
    let tb = tabular_semantics(&c.b, &labels("b", c.m), "B", 20).unwrap();
    let pairs: Vec<_> = (0..c.n)
        .flat_map(|i| (0..c.m).map(move |j| (i, j)))
        .map(|(i, j)| pair_table(c.outcomes[i * c.m + j], &format!("a{i}"), &format!("b{j}")))
        .chain(extra.iter().cloned())
        .collect();
    join_all(&ta, &tb, &pairs).confidence("A", "B").unwrap()
}

/// Admissible assignments of all atoms, as `(a-values, b-values)`.
pub fn worlds(c: &Case) -> Vec<(Vec<bool>, Vec<bool>)> {
    let total = c.n + c.m;
    (0u32..1 << total)
        .map(|bits| {
            let v: Vec<bool> = (0..total).map(|k| bits >> k & 1 == 1).collect();
            (v[..c.n].to_vec(), v[c.n..].to_vec())
        })
        .filter(|(a, b)| (0..c.n).all(|i| (0..c.m).all(|j| admits(c.outcomes[i * c.m + j], a[i], b[j]))))
        .collect()
}

pub fn truth(f: &Formula, prefix: &str, vals: &[bool]) -> bool {
    f.eval(&|p: &Proposition| {
        p.name.strip_prefix(prefix).and_then(|i| i.parse::<usize>().ok()).is_some_and(|i| vals[i])
    })
}

/// Confidence by direct enumeration of all `2^(n+m)` assignments.
pub fn brute(c: &Case) -> Ratio<u64> {
    let (mut den, mut num) = (0u64, 0u64);
    for (a, b) in worlds(c) {
        if truth(&c.a, "a", &a) {
            den += 1;
            if truth(&c.b, "b", &b) {
                num += 1;
            }
        }
    }
    if den == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(num, den)
    }
}
