//! Thresholding, classification scores and clustering scores.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::{Clusters, SimilarityMatrix};
use crate::reason::PairClass;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("{pred} predictions against {gold} gold labels")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("index {0} is not a clustered item")]
    BadIndex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub theta: f64,
    pub vartheta: f64,
}

/// `θ` is the least intra-cluster similarity (1 without intra-cluster pairs),
/// `ϑ` the greatest similarity over conflicting pairs (0 without any), capped at `θ`.
pub fn derive_thresholds(m: &SimilarityMatrix, clusters: &Clusters, conflicts: &[(usize, usize)]) -> Thresholds {
    let theta = clusters
        .iter()
        .flat_map(|c| c.iter().flat_map(move |&i| c.iter().filter(move |&&j| j != i).map(move |&j| (i, j))))
        .map(|(i, j)| m.get(i, j))
        .fold(f64::INFINITY, f64::min);
    let theta = if theta.is_finite() { theta } else { 1.0 };
    let vartheta = conflicts.iter().map(|&(i, j)| m.get(i, j)).fold(f64::NEG_INFINITY, f64::max);
    let vartheta = if vartheta.is_finite() { vartheta.min(theta) } else { 0.0 };
    Thresholds { theta, vartheta }
}

/// Strictly above `θ` implies, strictly below `ϑ` conflicts.
pub fn three_way_from_score(s: f64, th: Thresholds) -> PairClass {
    if s > th.theta {
        PairClass::Implication
    } else if s < th.vartheta {
        PairClass::Inconsistency
    } else {
        PairClass::Indifference
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Averaged {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub per_class: BTreeMap<PairClass, ClassScores>,
    pub macro_avg: Averaged,
    pub weighted_avg: Averaged,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Classes absent from both sides are left out; undefined ratios count as 0.
pub fn classification_metrics(pred: &[PairClass], gold: &[PairClass]) -> Result<ClassificationReport, MetricError> {
    if pred.len() != gold.len() {
        return Err(MetricError::LengthMismatch { pred: pred.len(), gold: gold.len() });
    }
    let correct = pred.iter().zip(gold).filter(|(p, g)| p == g).count();
    let mut labels: Vec<PairClass> = pred.iter().chain(gold).copied().collect();
    labels.sort();
    labels.dedup();
    let mut per_class = BTreeMap::new();
    for &c in &labels {
        let tp = pred.iter().zip(gold).filter(|(p, g)| **p == c && **g == c).count();
        let predicted = pred.iter().filter(|p| **p == c).count();
        let support = gold.iter().filter(|g| **g == c).count();
        let (precision, recall) = (ratio(tp, predicted), ratio(tp, support));
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        per_class.insert(c, ClassScores { precision, recall, f1, support });
    }
    let n = per_class.len().max(1) as f64;
    let total = gold.len().max(1) as f64;
    let avg = |f: &dyn Fn(&ClassScores) -> f64, weighted: bool| {
        per_class.values().map(|s| if weighted { f(s) * s.support as f64 / total } else { f(s) / n }).sum::<f64>()
    };
    let averaged =
        |w| Averaged { precision: avg(&|s| s.precision, w), recall: avg(&|s| s.recall, w), f1: avg(&|s| s.f1, w) };
    Ok(ClassificationReport {
        accuracy: ratio(correct, gold.len()),
        macro_avg: averaged(false),
        weighted_avg: averaged(true),
        per_class,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusteringReport {
    pub alignment: f64,
    pub silhouette: Option<f64>,
    pub purity: f64,
    pub ari: f64,
}

fn labels_of(c: &Clusters, n: usize) -> Result<Vec<usize>, MetricError> {
    let mut l = vec![usize::MAX; n];
    for (k, members) in c.iter().enumerate() {
        for &i in members {
            *l.get_mut(i).ok_or(MetricError::BadIndex(i))? = k;
        }
    }
    Ok(l)
}

/// Set-based matching: each mined cluster to its best expected cluster under the
/// indicator distance, damped by the expected clusters nobody matched.
pub fn alignment(mined: &Clusters, gold: &Clusters) -> f64 {
    if mined.is_empty() || gold.is_empty() {
        return 0.0;
    }
    let mut used = vec![false; gold.len()];
    let mut miss = 0.0;
    for m in mined {
        match gold.iter().position(|g| g == m) {
            Some(j) => used[j] = true,
            None => miss += 1.0,
        }
    }
    let unmatched = used.iter().filter(|u| !**u).count() as f64;
    (1.0 - miss / mined.len() as f64) * super::similarity::as_similarity(unmatched)
}

pub fn purity(mined: &Clusters, gold: &Clusters) -> f64 {
    let n: usize = mined.iter().map(Vec::len).sum();
    if n == 0 {
        return 0.0;
    }
    let hit: usize =
        mined.iter().map(|m| gold.iter().map(|g| m.iter().filter(|x| g.contains(x)).count()).max().unwrap_or(0)).sum();
    hit as f64 / n as f64
}

fn choose2(x: usize) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index over the contingency table; 1 when both partitions are trivial alike.
pub fn ari(a: &[usize], b: &[usize]) -> f64 {
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ra: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rb: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *ra.entry(x).or_default() += 1;
        *rb.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&v| choose2(v)).sum();
    let sa: f64 = ra.values().map(|&v| choose2(v)).sum();
    let sb: f64 = rb.values().map(|&v| choose2(v)).sum();
    let total = choose2(a.len());
    if total == 0.0 {
        return 1.0;
    }
    let expected = sa * sb / total;
    let max = (sa + sb) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// Mean silhouette over a distance matrix; `None` unless `2 ≤ labels ≤ n − 1`.
pub fn silhouette(d: &SimilarityMatrix, labels: &[usize]) -> Option<f64> {
    let mut ks: Vec<usize> = labels.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.len() < 2 || ks.len() > d.n.saturating_sub(1) {
        return None;
    }
    let mean = |i: usize, k: usize| {
        let xs: Vec<f64> = (0..d.n).filter(|&j| j != i && labels[j] == k).map(|j| d.get(i, j)).collect();
        (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
    };
    let s: f64 = (0..d.n)
        .map(|i| {
            let Some(a) = mean(i, labels[i]) else { return 0.0 };
            let b = ks.iter().filter(|&&k| k != labels[i]).filter_map(|&k| mean(i, k)).fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m == 0.0 {
                0.0
            } else {
                (b - a) / m
            }
        })
        .sum();
    Some(s / d.n as f64)
}

pub fn clustering_metrics(
    mined: &Clusters,
    gold: &Clusters,
    distances: &SimilarityMatrix,
) -> Result<ClusteringReport, MetricError> {
    let n = distances.n;
    let lm = labels_of(mined, n)?;
    let lg = labels_of(gold, n)?;
    Ok(ClusteringReport {
        alignment: alignment(mined, gold),
        silhouette: silhouette(distances, &lm),
        purity: purity(mined, gold),
        ari: ari(&lm, &lg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use PairClass::*;

    #[test]
    fn perfect_predictions() {
        let g = vec![Implication, Inconsistency, Indifference, Indifference];
        let r = classification_metrics(&g, &g).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_avg.f1, 1.0);
        assert_eq!(r.weighted_avg.f1, 1.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(classification_metrics(&[Implication], &[]).is_err());
    }

    #[test]
    fn macro_vs_weighted() {
        let gold = vec![Implication, Indifference, Indifference, Indifference];
        let pred = vec![Indifference; 4];
        let r = classification_metrics(&pred, &gold).unwrap();
        assert_eq!(r.accuracy, 0.75);
        let f = 2.0 * 0.75 / 1.75;
        assert!((r.macro_avg.f1 - f / 2.0).abs() < 1e-12);
        assert!((r.weighted_avg.f1 - f * 0.75).abs() < 1e-12);
    }

    #[test]
    fn thresholds() {
        let m = SimilarityMatrix::from_fn(3, |i, j| {
            if i == j {
                1.0
            } else if i + j == 1 {
                0.8
            } else {
                0.3
            }
        });
        let t = derive_thresholds(&m, &vec![vec![0, 1], vec![2]], &[(0, 2)]);
        assert_eq!(t, Thresholds { theta: 0.8, vartheta: 0.3 });
        assert_eq!(
            derive_thresholds(&m, &vec![vec![0], vec![1], vec![2]], &[]),
            Thresholds { theta: 1.0, vartheta: 0.0 }
        );
        let capped = derive_thresholds(&m, &vec![vec![0, 2], vec![1]], &[(0, 1)]);
        assert_eq!(capped.vartheta, capped.theta);
    }

    #[test]
    fn three_way_boundaries() {
        let th = Thresholds { theta: 0.7, vartheta: 0.2 };
        assert_eq!(three_way_from_score(1.0, th), Implication);
        assert_eq!(three_way_from_score(0.7, th), Indifference);
        assert_eq!(three_way_from_score(0.0, th), Inconsistency);
    }

    #[test]
    fn identical_partitions() {
        let c = vec![vec![0, 1], vec![2, 3], vec![4]];
        let d = SimilarityMatrix::from_fn(5, |i, j| if i / 2 == j / 2 { 0.0 } else { 1.0 });
        let r = clustering_metrics(&c, &c, &d).unwrap();
        assert_eq!((r.alignment, r.purity, r.ari), (1.0, 1.0, 1.0));
        assert!(r.silhouette.is_some());
    }

    #[test]
    fn all_singletons_have_no_silhouette() {
        let c: Clusters = (0..4).map(|i| vec![i]).collect();
        let d = SimilarityMatrix::from_fn(4, |i, j| if i == j { 0.0 } else { 1.0 });
        let r = clustering_metrics(&c, &c, &d).unwrap();
        assert_eq!(r.silhouette, None);
        assert_eq!(r.alignment, 1.0);
    }

    #[test]
    fn ari_of_split_partition() {
        // sklearn: adjusted_rand_score([0,0,1,1],[0,0,1,2]) = 0.5714285714285715
        assert!((ari(&[0, 0, 1, 1], &[0, 0, 1, 2]) - 0.5714285714285715).abs() < 1e-12);
    }
}
