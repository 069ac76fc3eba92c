//! Browser bindings: a truth-table explorer, fixture parsing and pair explanations.
//!
//! The `*_json`/`*_html` functions hold the logic and are tested natively;
//! the `#[wasm_bindgen]` wrappers only convert errors.

use factlogic::apriori::{AprioriOptions, DepGraph, MeuDb};
use factlogic::explain::Explanation;
use factlogic::fol::{render, syntax::parse};
use factlogic::kb::KnowledgeBase;
use factlogic::kernel::KernelTrace;
use factlogic::pipeline::{compile, Compiled};
use factlogic::reason::{analyse, Prepared, DEFAULT_ATOM_CAP};
use serde_json::json;
use wasm_bindgen::prelude::*;

const KB: &str = include_str!("../../../data/kb.json");

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        &[$((
            $name,
            include_str!(concat!("../../../data/graphs/", $name, ".json")),
            include_str!(concat!("../../../data/meu/", $name, ".json")),
        )),*]
    };
}

static FIXTURES: &[(&str, &str, &str)] = fixtures![
    "rq2c_00",
    "rq2c_01",
    "rq2c_02",
    "rq2c_03",
    "rq2c_04",
    "rq2c_05",
    "rq2c_06",
    "rq2c_07",
    "rq2c_08",
    "rq2c_09",
    "rq2c_10",
    "rq2c_11",
    "rq2c_12",
    "reindeer",
    "characters",
    "music",
    "angry",
    "attempt",
    "become",
    "brighton",
    "street",
];

fn kb() -> Result<KnowledgeBase, String> {
    KnowledgeBase::from_json(KB).map_err(|e| e.to_string())
}

fn compiled(name: &str, kb: &KnowledgeBase) -> Result<Compiled, String> {
    let (_, g, m) = FIXTURES.iter().find(|f| f.0 == name).ok_or_else(|| format!("no fixture named {name}"))?;
    let g = DepGraph::from_json(g).map_err(|e| e.to_string())?;
    let db = MeuDb::from_json(m).map_err(|e| e.to_string())?;
    compile(&g, &db, kb, AprioriOptions::default()).map_err(|e| e.to_string())
}

fn explanation(a: Prepared, b: Prepared, ta: &str, tb: &str, kb: &KnowledgeBase) -> Result<Explanation, String> {
    let analysis = analyse(&a, &b, kb, DEFAULT_ATOM_CAP).map_err(|e| e.to_string())?;
    Explanation::new(ta, tb, analysis).map_err(|e| e.to_string())
}

/// Fixture names with their sentences.
pub fn fixtures_json() -> String {
    let list: Vec<_> = FIXTURES
        .iter()
        .map(|(n, g, _)| {
            let text = DepGraph::from_json(g).map(|g| g.text).unwrap_or_default();
            json!({"name": n, "text": text})
        })
        .collect();
    serde_json::to_string(&list).expect("plain json")
}

/// Both confidences and world tables for two formulas in the textual syntax.
pub fn truth_table_json(a: &str, b: &str) -> Result<String, String> {
    let kb = kb()?;
    let fa = parse(a).map_err(|e| format!("first formula: {e}"))?;
    let fb = parse(b).map_err(|e| format!("second formula: {e}"))?;
    let prep = |f| Prepared::new(f, &kb).map_err(|e| e.to_string());
    let e = explanation(prep(fa)?, prep(fb)?, a, b, &kb)?;
    serde_json::to_string(&e).map_err(|e| e.to_string())
}

/// Kernel stages and the formula for one embedded fixture.
pub fn parse_fixture_json(name: &str) -> Result<String, String> {
    let kb = kb()?;
    let c = compiled(name, &kb)?;
    let stages: serde_json::Map<String, serde_json::Value> = KernelTrace::STAGES
        .iter()
        .map(|s| (s.to_string(), json!(c.trace.stage(s).expect("known stage").render(false))))
        .collect();
    Ok(json!({"text": c.text, "stages": stages, "formula": render(&c.formula)}).to_string())
}

/// A standalone HTML explanation of one ordered fixture pair.
pub fn compare_fixtures_html(a: &str, b: &str) -> Result<String, String> {
    let kb = kb()?;
    let (ca, cb) = (compiled(a, &kb)?, compiled(b, &kb)?);
    let prep = |c: &Compiled| Prepared::new(c.formula.clone(), &kb).map_err(|e| e.to_string());
    Ok(explanation(prep(&ca)?, prep(&cb)?, &ca.text, &cb.text, &kb)?.to_html())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fixtures() -> String {
    fixtures_json()
}

#[wasm_bindgen]
pub fn truth_table(a: &str, b: &str) -> Result<String, JsValue> {
    js(truth_table_json(a, b))
}

#[wasm_bindgen]
pub fn parse_fixture(name: &str) -> Result<String, JsValue> {
    js(parse_fixture_json(name))
}

#[wasm_bindgen]
pub fn compare_fixtures(a: &str, b: &str) -> Result<String, JsValue> {
    js(compare_fixtures_html(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn every_fixture_compiles() {
        let kb = kb().unwrap();
        for (n, _, _) in FIXTURES {
            compiled(n, &kb).unwrap();
        }
        let list: Vec<Value> = serde_json::from_str(&fixtures_json()).unwrap();
        assert_eq!(list.len(), FIXTURES.len());
    }

    #[test]
    fn example_one_in_the_explorer() {
        let out = truth_table_json(
            "(play(◇Alice, ◇football) ∧ play(◇Bob, ◇football))",
            "(play(◇Alice, ◇football) ∨ play(◇Bob, ◇football))",
        )
        .unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ab"]["confidence"], json!({"num": 1, "den": 1}));
        assert_eq!(v["ba"]["confidence"], json!({"num": 1, "den": 3}));
    }

    #[test]
    fn explorer_reports_syntax_errors() {
        assert!(truth_table_json("play(", "p(◇x)").unwrap_err().starts_with("first formula"));
    }

    #[test]
    fn parse_fixture_gives_formula() {
        let v: Value = serde_json::from_str(&parse_fixture_json("brighton").unwrap()).unwrap();
        assert_eq!(v["formula"], "(have(◇Newcastle, ◇traffic) ∧ have(◇Brighton, ◇traffic))");
        assert_eq!(v["stages"].as_object().unwrap().len(), 5);
        assert!(parse_fixture_json("nope").is_err());
    }

    #[test]
    fn compare_fixture_pair() {
        let html = compare_fixtures_html("rq2c_11", "rq2c_02").unwrap();
        assert!(html.contains("1/2"));
    }
}
