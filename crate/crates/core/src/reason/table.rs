//! World tables: relations over Boolean columns with natural join.

use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::outcome::CmpOutcome;
use crate::fol::{Formula, Proposition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<bool>>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("{count} atoms exceed the cap of {cap}")]
pub struct AtomBudgetExceeded {
    pub count: usize,
    pub cap: usize,
}

pub const DEFAULT_ATOM_CAP: usize = 20;

impl WorldTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Equi-join on shared column names; rows stay distinct.
    pub fn natural_join(&self, other: &WorldTable) -> WorldTable {
        let shared: Vec<(usize, usize)> =
            self.columns.iter().enumerate().filter_map(|(i, c)| other.column(c).map(|j| (i, j))).collect();
        let extra: Vec<usize> = (0..other.columns.len()).filter(|j| !shared.iter().any(|&(_, s)| s == *j)).collect();
        let mut columns = self.columns.clone();
        columns.extend(extra.iter().map(|&j| other.columns[j].clone()));
        let mut index: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
        for (r, row) in other.rows.iter().enumerate() {
            index.entry(shared.iter().map(|&(_, j)| row[j]).collect()).or_default().push(r);
        }
        let mut rows = Vec::new();
        for row in &self.rows {
            let key: Vec<bool> = shared.iter().map(|&(i, _)| row[i]).collect();
            if let Some(matches) = index.get(&key) {
                for &r in matches {
                    let mut out = row.clone();
                    out.extend(extra.iter().map(|&j| other.rows[r][j]));
                    rows.push(out);
                }
            }
        }
        WorldTable { columns, rows }
    }

    /// `|s ∧ t| / |s|`, zero on an empty denominator.
    pub fn confidence(&self, s: &str, t: &str) -> Option<Ratio<u64>> {
        let (i, j) = (self.column(s)?, self.column(t)?);
        let den = self.rows.iter().filter(|r| r[i]).count() as u64;
        let num = self.rows.iter().filter(|r| r[i] && r[j]).count() as u64;
        Some(if den == 0 { Ratio::from_integer(0) } else { Ratio::new(num, den) })
    }
}

/// One row per assignment of the atoms; the last column is the formula's value.
pub fn tabular_semantics(
    f: &Formula,
    labels: &[(Proposition, String)],
    sentence: &str,
    cap: usize,
) -> Result<WorldTable, AtomBudgetExceeded> {
    let atoms = f.atoms();
    if atoms.len() > cap {
        return Err(AtomBudgetExceeded { count: atoms.len(), cap });
    }
    let label =
        |p: &Proposition| labels.iter().find(|(q, _)| q == p).map(|(_, l)| l.clone()).unwrap_or_else(|| p.to_string());
    let mut columns: Vec<String> = atoms.iter().map(label).collect();
    columns.push(sentence.to_string());
    let n = atoms.len();
    let mut rows = Vec::with_capacity(1 << n);
    for bits in 0u64..(1u64 << n) {
        // First atom is the most significant bit, so rows enumerate in truth-table order.
        let row: Vec<bool> = (0..n).map(|k| bits >> (n - 1 - k) & 1 == 1).collect();
        let truth = |p: &Proposition| atoms.iter().position(|a| a == p).is_some_and(|k| row[k]);
        let val = f.eval(&truth);
        let mut r = row.clone();
        r.push(val);
        rows.push(r);
    }
    Ok(WorldTable { columns, rows })
}

/// Admissible worlds for an atom pair under a comparison outcome.
pub fn pair_table(o: CmpOutcome, a: &str, b: &str) -> WorldTable {
    let rows: &[(bool, bool)] = match o {
        CmpOutcome::Eq => &[(false, false), (true, true)],
        CmpOutcome::NEq => &[(false, true), (true, false)],
        CmpOutcome::Omega => &[(false, false), (false, true), (true, false), (true, true)],
        _ => &[(false, false), (false, true), (true, true)],
    };
    WorldTable { columns: vec![a.to_string(), b.to_string()], rows: rows.iter().map(|&(x, y)| vec![x, y]).collect() }
}

/// Joins both sentence tables with every pair table.
pub fn join_all(ta: &WorldTable, tb: &WorldTable, pairs: &[WorldTable]) -> WorldTable {
    let mut t = ta.clone();
    // Filtering by pair tables touching A's columns first keeps intermediates small.
    let (inner, rest): (Vec<&WorldTable>, Vec<&WorldTable>) =
        pairs.iter().partition(|p| p.columns.iter().all(|c| ta.column(c).is_some()));
    for p in inner {
        t = t.natural_join(p);
    }
    t = t.natural_join(tb);
    for p in rest {
        t = t.natural_join(p);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{Formula, Term};

    fn atom(n: &str) -> Formula {
        Formula::Atom(Proposition::unary(n, Term::func("x")))
    }

    fn labels() -> Vec<(Proposition, String)> {
        ["p1", "p2"].iter().map(|n| (Proposition::unary(*n, Term::func("x")), n.to_string())).collect()
    }

    #[test]
    fn example_one_truth_table() {
        let a = Formula::And(vec![atom("p1"), atom("p2")]);
        let b = Formula::Or(vec![atom("p1"), atom("p2")]);
        let ta = tabular_semantics(&a, &labels(), "A", DEFAULT_ATOM_CAP).unwrap();
        let tb = tabular_semantics(&b, &labels(), "B", DEFAULT_ATOM_CAP).unwrap();
        let t = ta.natural_join(&tb);
        assert_eq!(t.columns, vec!["p1", "p2", "A", "B"]);
        let want = vec![
            vec![false, false, false, false],
            vec![false, true, false, true],
            vec![true, false, false, true],
            vec![true, true, true, true],
        ];
        assert_eq!(t.rows, want);
        assert_eq!(t.confidence("A", "B").unwrap(), Ratio::from_integer(1));
        assert_eq!(t.confidence("B", "A").unwrap(), Ratio::new(1, 3));
    }

    #[test]
    fn single_atom_two_rows() {
        let t = tabular_semantics(&atom("p"), &[], "A", DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn contradiction_has_no_model() {
        let f = Formula::And(vec![atom("p"), Formula::not(atom("p"))]);
        let t = tabular_semantics(&f, &[], "A", DEFAULT_ATOM_CAP).unwrap();
        assert!(t.rows.iter().all(|r| !r[1]));
        assert_eq!(t.confidence("A", "A").unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn atom_cap_enforced() {
        let f = Formula::And((0..3).map(|i| atom(&format!("p{i}"))).collect());
        assert_eq!(tabular_semantics(&f, &[], "A", 2).unwrap_err(), AtomBudgetExceeded { count: 3, cap: 2 });
    }

    #[test]
    fn pair_table_sizes() {
        assert_eq!(pair_table(CmpOutcome::Eq, "a", "b").len(), 2);
        assert_eq!(pair_table(CmpOutcome::NEq, "a", "b").len(), 2);
        let imp = pair_table(CmpOutcome::ImplGen, "a", "b");
        assert_eq!(imp.len(), 3);
        assert!(!imp.rows.contains(&vec![true, false]));
        assert_eq!(pair_table(CmpOutcome::Omega, "a", "b").len(), 4);
    }

    #[test]
    fn neq_join_removes_joint_truth() {
        let ta = tabular_semantics(&atom("p"), &[], "A", 20).unwrap();
        let mut tb = tabular_semantics(&atom("q"), &[], "B", 20).unwrap();
        tb.columns[0] = "q".into();
        let pa = ta.columns[0].clone();
        let t = join_all(&ta, &tb, &[pair_table(CmpOutcome::NEq, &pa, "q")]);
        let (i, j) = (t.column(&pa).unwrap(), t.column("q").unwrap());
        assert!(t.rows.iter().all(|r| !(r[i] && r[j])));
    }

    #[test]
    fn all_omega_is_cross_product() {
        let ta = tabular_semantics(&atom("p"), &[], "A", 20).unwrap();
        let tb = tabular_semantics(&atom("q"), &[], "B", 20).unwrap();
        let t = join_all(&ta, &tb, &[pair_table(CmpOutcome::Omega, &ta.columns[0], &tb.columns[0])]);
        assert_eq!(t.len(), 4);
    }
}
