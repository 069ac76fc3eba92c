use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::compare::{cmp_prop, Expanded, Verdict};
use super::outcome::CmpOutcome;
use super::table::{join_all, pair_table, tabular_semantics, AtomBudgetExceeded, WorldTable};
use crate::fol::{render, Formula, Proposition};
use crate::kb::{ExpansionBudgetExceeded, KnowledgeBase};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReasonError {
    #[error(transparent)]
    Atoms(#[from] AtomBudgetExceeded),
    #[error(transparent)]
    Expansion(#[from] ExpansionBudgetExceeded),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PairClass {
    Implication,
    Inconsistency,
    Indifference,
}

impl PairClass {
    pub fn from_confidence(c: Ratio<u64>) -> Self {
        if c == Ratio::from_integer(1) {
            PairClass::Implication
        } else if c == Ratio::from_integer(0) {
            PairClass::Inconsistency
        } else {
            PairClass::Indifference
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PairClass::Implication => "IMPLICATION",
            PairClass::Inconsistency => "INCONSISTENCY",
            PairClass::Indifference => "INDIFFERENCE",
        }
    }
}

impl std::str::FromStr for PairClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "IMPLICATION" => Ok(PairClass::Implication),
            "INCONSISTENCY" => Ok(PairClass::Inconsistency),
            "INDIFFERENCE" => Ok(PairClass::Indifference),
            other => Err(format!("unknown class {other}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    #[serde(with = "super::ratio")]
    pub confidence_ab: Ratio<u64>,
    #[serde(with = "super::ratio")]
    pub confidence_ba: Ratio<u64>,
    pub class_ab: PairClass,
    pub class_ba: PairClass,
}

/// A sentence formula with its atoms expanded once.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub formula: Formula,
    pub atoms: Vec<Expanded>,
}

impl Prepared {
    pub fn new(formula: Formula, kb: &KnowledgeBase) -> Result<Self, ExpansionBudgetExceeded> {
        let atoms = formula.atoms().into_iter().map(|p| Expanded::new(p, kb)).collect::<Result<_, _>>()?;
        Ok(Prepared { formula, atoms })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomMotivation {
    pub left: String,
    pub right: String,
    pub outcome: CmpOutcome,
    pub rule: &'static str,
}

/// One direction of the analysis: premise sentence `s`, consequent `t`.
#[derive(Clone, Debug, Serialize)]
pub struct Direction {
    pub premise: String,
    pub consequent: String,
    pub motivations: Vec<AtomMotivation>,
    pub table: WorldTable,
    #[serde(with = "super::ratio")]
    pub confidence: Ratio<u64>,
    pub class: PairClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairAnalysis {
    pub formulas: (String, String),
    pub atoms_a: Vec<(String, String)>,
    pub atoms_b: Vec<(String, String)>,
    pub ab: Direction,
    pub ba: Direction,
}

impl PairAnalysis {
    pub fn verdict(&self) -> PairVerdict {
        PairVerdict {
            confidence_ab: self.ab.confidence,
            confidence_ba: self.ba.confidence,
            class_ab: self.ab.class,
            class_ba: self.ba.class,
        }
    }
}

fn labelled(p: &Prepared, prefix: &str) -> Vec<(Proposition, String)> {
    p.atoms.iter().enumerate().map(|(i, e)| (e.prop.clone(), format!("{prefix}{}", i + 1))).collect()
}

#[allow(clippy::too_many_arguments)]
fn direction(
    sa: &str,
    la: &[(Proposition, String)],
    ta: &WorldTable,
    pa: &Prepared,
    sb: &str,
    lb: &[(Proposition, String)],
    tb: &WorldTable,
    pb: &Prepared,
    kb: &KnowledgeBase,
) -> Direction {
    let mut motivations = Vec::new();
    let mut pairs = Vec::new();
    for (x, (_, lx)) in pa.atoms.iter().zip(la) {
        for (y, (_, ly)) in pb.atoms.iter().zip(lb) {
            // The consequent atom is compared against the premise atom: ↠ reads "premise implies consequent".
            let Verdict { outcome, rule } = cmp_prop(y, x, kb);
            motivations.push(AtomMotivation { left: lx.clone(), right: ly.clone(), outcome, rule });
            pairs.push(pair_table(outcome, lx, ly));
        }
    }
    let table = join_all(ta, tb, &pairs);
    let confidence = table.confidence(sa, sb).expect("sentence columns present");
    Direction {
        premise: sa.to_string(),
        consequent: sb.to_string(),
        motivations,
        table,
        confidence,
        class: PairClass::from_confidence(confidence),
    }
}

/// Both confidence directions with their supporting tables.
pub fn analyse(a: &Prepared, b: &Prepared, kb: &KnowledgeBase, cap: usize) -> Result<PairAnalysis, ReasonError> {
    let count = a.atoms.len() + b.atoms.len();
    if count > cap {
        return Err(AtomBudgetExceeded { count, cap }.into());
    }
    let la = labelled(a, "a");
    let lb = labelled(b, "b");
    let ta = tabular_semantics(&a.formula, &la, "A", cap)?;
    let tb = tabular_semantics(&b.formula, &lb, "B", cap)?;
    let ab = direction("A", &la, &ta, a, "B", &lb, &tb, b, kb);
    let ba = direction("B", &lb, &tb, b, "A", &la, &ta, a, kb);
    Ok(PairAnalysis {
        formulas: (render(&a.formula), render(&b.formula)),
        atoms_a: la.iter().map(|(p, l)| (l.clone(), p.to_string())).collect(),
        atoms_b: lb.iter().map(|(p, l)| (l.clone(), p.to_string())).collect(),
        ab,
        ba,
    })
}

pub fn classify_pair(fa: &Formula, fb: &Formula, kb: &KnowledgeBase, cap: usize) -> Result<PairVerdict, ReasonError> {
    let a = Prepared::new(fa.clone(), kb)?;
    let b = Prepared::new(fb.clone(), kb)?;
    Ok(analyse(&a, &b, kb, cap)?.verdict())
}
