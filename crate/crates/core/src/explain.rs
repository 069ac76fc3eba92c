//! Pair explanations: formulas, atom comparisons and the joined world table, as JSON or HTML.

use num_rational::Ratio;
use serde::Serialize;

use crate::reason::{Direction, PairAnalysis, PairClass};

#[derive(Clone, Debug, Serialize)]
pub struct Explanation {
    pub sentences: (String, String),
    #[serde(flatten)]
    pub analysis: PairAnalysis,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExplanationError {
    #[error("world table lacks column {0}")]
    MissingColumn(String),
    #[error("stated confidence {stated} differs from the table's {counted}")]
    Inconsistent { stated: String, counted: String },
}

fn recount(d: &Direction) -> Result<Ratio<u64>, ExplanationError> {
    let col = |c: &str| d.table.column(c).ok_or_else(|| ExplanationError::MissingColumn(c.to_string()));
    let (s, t) = (col(&d.premise)?, col(&d.consequent)?);
    let rows: Vec<&Vec<bool>> = d.table.rows.iter().filter(|r| r[s]).collect();
    if rows.is_empty() {
        return Ok(Ratio::from_integer(0));
    }
    Ok(Ratio::new(rows.iter().filter(|r| r[t]).count() as u64, rows.len() as u64))
}

impl Explanation {
    pub fn new(a: &str, b: &str, analysis: PairAnalysis) -> Result<Self, ExplanationError> {
        let e = Explanation { sentences: (a.to_string(), b.to_string()), analysis };
        e.check()?;
        Ok(e)
    }

    pub fn confidences(&self) -> (Ratio<u64>, Ratio<u64>) {
        (self.analysis.ab.confidence, self.analysis.ba.confidence)
    }

    pub fn classes(&self) -> (PairClass, PairClass) {
        (self.analysis.ab.class, self.analysis.ba.class)
    }

    /// Every atom has a column and every confidence matches its table.
    pub fn check(&self) -> Result<(), ExplanationError> {
        for d in [&self.analysis.ab, &self.analysis.ba] {
            for (label, _) in self.analysis.atoms_a.iter().chain(&self.analysis.atoms_b) {
                if d.table.column(label).is_none() {
                    return Err(ExplanationError::MissingColumn(label.clone()));
                }
            }
            let counted = recount(d)?;
            if counted != d.confidence {
                return Err(ExplanationError::Inconsistent {
                    stated: d.confidence.to_string(),
                    counted: counted.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn to_html(&self) -> String {
        let a = &self.analysis;
        let mut h = String::from(HEAD);
        h += "<h2>Sentences</h2>\n<table>\n<tr><th></th><th>text</th><th>formula</th></tr>\n";
        h += &format!(
            "<tr><td>A</td><td>{}</td><td><code>{}</code></td></tr>\n",
            esc(&self.sentences.0),
            esc(&a.formulas.0)
        );
        h += &format!(
            "<tr><td>B</td><td>{}</td><td><code>{}</code></td></tr>\n</table>\n",
            esc(&self.sentences.1),
            esc(&a.formulas.1)
        );
        h += "<h2>Atoms</h2>\n<table>\n";
        for (l, p) in a.atoms_a.iter().chain(&a.atoms_b) {
            h += &format!("<tr><td>{}</td><td><code>{}</code></td></tr>\n", esc(l), esc(p));
        }
        h += "</table>\n";
        for d in [&a.ab, &a.ba] {
            h += &format!("<h2>{} &rarr; {}: {} ({})</h2>\n", d.premise, d.consequent, d.confidence, d.class.name());
            h += "<h3>Atom comparisons</h3>\n<table>\n<tr><th>premise</th><th>consequent</th><th>outcome</th><th>rule</th></tr>\n";
            for m in &d.motivations {
                h += &format!(
                    "<tr><td>{}</td><td>{}</td><td>{:?}</td><td>{}</td></tr>\n",
                    esc(&m.left),
                    esc(&m.right),
                    m.outcome,
                    esc(m.rule)
                );
            }
            h += "</table>\n<h3>Possible worlds</h3>\n<table>\n<tr>";
            let key = |c: &String| c == &d.premise || c == &d.consequent;
            for c in &d.table.columns {
                h += &format!("<th{}>{}</th>", if key(c) { " class=\"key\"" } else { "" }, esc(c));
            }
            h += "</tr>\n";
            for r in &d.table.rows {
                h += "<tr>";
                for (c, v) in d.table.columns.iter().zip(r) {
                    h += &format!(
                        "<td{}>{}</td>",
                        if key(c) { " class=\"key\"" } else { "" },
                        if *v { "T" } else { "F" }
                    );
                }
                h += "</tr>\n";
            }
            h += "</table>\n";
        }
        h += "</body>\n</html>\n";
        h
    }
}

const HEAD: &str = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Pair explanation</title>\n<style>\nbody{font-family:sans-serif;margin:2em}\ntable{border-collapse:collapse;margin-bottom:1em}\ntd,th{border:1px solid #999;padding:2px 8px}\n.key{background:#fff3a0}\n</style>\n</head>\n<body>\n";

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{Formula, Proposition, Term};
    use crate::kb::KnowledgeBase;
    use crate::reason::{analyse, Prepared, DEFAULT_ATOM_CAP};

    fn example() -> Explanation {
        let kb = KnowledgeBase::default();
        let p = |s: &str| Formula::Atom(Proposition::binary("play", Term::func(s), Term::func("football")));
        let a = Prepared::new(Formula::And(vec![p("Alice"), p("Bob")]), &kb).unwrap();
        let b = Prepared::new(Formula::Or(vec![p("Alice"), p("Bob")]), &kb).unwrap();
        Explanation::new("both", "either", analyse(&a, &b, &kb, DEFAULT_ATOM_CAP).unwrap()).unwrap()
    }

    #[test]
    fn confidences_match_tables() {
        let e = example();
        assert_eq!(e.confidences(), (Ratio::from_integer(1), Ratio::new(1, 3)));
    }

    #[test]
    fn tampered_confidence_is_caught() {
        let mut e = example();
        e.analysis.ba.confidence = Ratio::new(1, 2);
        assert!(matches!(e.check(), Err(ExplanationError::Inconsistent { .. })));
    }

    #[test]
    fn html_lists_tables() {
        let h = example().to_html();
        assert!(h.contains("Possible worlds"));
        assert!(h.contains("1/3"));
        assert_eq!(esc("<a & b>"), "&lt;a &amp; b&gt;");
    }
}
