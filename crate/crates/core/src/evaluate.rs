//! Dataset runs: every ordered pair under one similarity method, then clustering and scores.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::apriori::{AprioriOptions, MeuDb};
use crate::dataset::{pair_id, Dataset, DatasetError};
use crate::eval::{
    classification_metrics, cluster, clustering_metrics, derive_thresholds, graph_alignment, logical_edges,
    simple_edges, symmetrize, three_way_from_score, token_cosine, ClassificationReport, Clustering, ClusteringReport,
    Clusters, GEdge, GraphMode, SimilarityMatrix, Thresholds,
};
use crate::fol::render;
use crate::kb::KnowledgeBase;
use crate::pipeline::{compile, Compiled, PipelineError};
use crate::reason::{analyse, PairClass, PairVerdict, Prepared, DEFAULT_ATOM_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Logical,
    Sg,
    Lg,
    Cosine,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "logical" => Ok(Method::Logical),
            "sg" => Ok(Method::Sg),
            "lg" => Ok(Method::Lg),
            "cosine" => Ok(Method::Cosine),
            _ => Err(format!("unknown method {s}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvalConfig {
    pub method: Method,
    pub clustering: Clustering,
    /// Defaults to the number of expected clusters.
    pub k: Option<usize>,
    pub seed: u64,
    pub apriori: AprioriOptions,
    pub atom_cap: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            method: Method::Logical,
            clustering: Clustering::Ahc,
            k: None,
            seed: 0,
            apriori: AprioriOptions::default(),
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairResult {
    pub pair: String,
    pub a: usize,
    pub b: usize,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_ratio")]
    pub confidence: Option<Ratio<u64>>,
    pub score: f64,
    pub class: PairClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<PairClass>,
}

mod opt_ratio {
    use num_rational::Ratio;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => crate::reason::ratio::serialize(r, s),
            None => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub method: Method,
    pub clustering: Clustering,
    pub k: usize,
    pub seed: u64,
    pub formulas: Vec<String>,
    pub similarity: SimilarityMatrix,
    pub clusters: Clusters,
    pub expected_clusters: Clusters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    pub pairs: Vec<PairResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clustering_scores: Option<ClusteringReport>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("sentence {index}: {source}")]
    Sentence { index: usize, source: PipelineError },
    #[error(transparent)]
    Metric(#[from] crate::eval::MetricError),
}

impl EvalError {
    pub fn exit_code(&self) -> i32 {
        match self {
            EvalError::Sentence { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}

/// Compiles every sentence of `d`; `--no-apriori` runs drop the entity table.
pub fn compile_all(d: &Dataset, kb: &KnowledgeBase, opts: AprioriOptions) -> Result<Vec<Compiled>, EvalError> {
    (0..d.len())
        .into_par_iter()
        .map(|i| {
            let (g, db) = d.fixture(i)?;
            let db = if opts.use_meu { db } else { MeuDb::default() };
            compile(&g, &db, kb, opts).map_err(|source| EvalError::Sentence { index: i, source })
        })
        .collect()
}

/// Both confidences for every unordered pair, including each sentence with itself.
pub fn logical_verdicts(
    compiled: &[Compiled],
    kb: &KnowledgeBase,
    cap: usize,
) -> Result<Vec<Vec<PairVerdict>>, EvalError> {
    let prepared: Vec<Prepared> = compiled
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Prepared::new(c.formula.clone(), kb)
                .map_err(|e| EvalError::Sentence { index: i, source: PipelineError::Reason(e.into()) })
        })
        .collect::<Result<_, _>>()?;
    let n = prepared.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let done: Vec<((usize, usize), PairVerdict)> = cells
        .into_par_iter()
        .map(|(i, j)| {
            analyse(&prepared[i], &prepared[j], kb, cap)
                .map(|a| ((i, j), a.verdict()))
                .map_err(|e| EvalError::Sentence { index: i, source: PipelineError::Reason(e) })
        })
        .collect::<Result<_, _>>()?;
    let zero = Ratio::from_integer(0);
    let blank = PairVerdict {
        confidence_ab: zero,
        confidence_ba: zero,
        class_ab: PairClass::Inconsistency,
        class_ba: PairClass::Inconsistency,
    };
    let mut out = vec![vec![blank; n]; n];
    for ((i, j), v) in done {
        out[i][j] = v;
        out[j][i] = PairVerdict {
            confidence_ab: v.confidence_ba,
            confidence_ba: v.confidence_ab,
            class_ab: v.class_ba,
            class_ba: v.class_ab,
        };
    }
    Ok(out)
}

fn edges(c: &Compiled, mode: GraphMode) -> Vec<GEdge> {
    match mode {
        GraphMode::Simple => simple_edges(&c.trace.raw),
        GraphMode::Logical => logical_edges(&c.trace.final_),
    }
}

/// Row = first sentence; baselines are left unsymmetrised here.
pub fn baseline_matrix(d: &Dataset, compiled: &[Compiled], method: Method) -> SimilarityMatrix {
    let n = d.len();
    let cells: Vec<f64> = match method {
        Method::Cosine => (0..n * n)
            .into_par_iter()
            .map(|x| token_cosine(&d.sentences[x / n].text, &d.sentences[x % n].text))
            .collect(),
        Method::Sg | Method::Lg => {
            let mode = if method == Method::Sg { GraphMode::Simple } else { GraphMode::Logical };
            let es: Vec<Vec<GEdge>> = compiled.iter().map(|c| edges(c, mode)).collect();
            (0..n * n).into_par_iter().map(|x| graph_alignment(&es[x / n], &es[x % n], mode)).collect()
        }
        Method::Logical => unreachable!("logical scores come from confidences"),
    };
    SimilarityMatrix::from_fn(n, |i, j| cells[i * n + j])
}

pub fn evaluate(d: &Dataset, kb: &KnowledgeBase, cfg: &EvalConfig) -> Result<EvalReport, EvalError> {
    let compiled = compile_all(d, kb, cfg.apriori)?;
    let n = d.len();
    let k = cfg.k.unwrap_or(if d.expected_clusters.is_empty() { n } else { d.expected_clusters.len() });
    let (similarity, verdicts) = if cfg.method == Method::Logical {
        let v = logical_verdicts(&compiled, kb, cfg.atom_cap)?;
        let m = SimilarityMatrix::from_fn(n, |i, j| {
            let c = v[i][j].confidence_ab;
            *c.numer() as f64 / *c.denom() as f64
        });
        (m, Some(v))
    } else {
        (baseline_matrix(d, &compiled, cfg.method), None)
    };
    let distances = symmetrize(&similarity.distances());
    let clusters = cluster(&distances, cfg.clustering, k, cfg.seed);
    let symmetric = distances.distances();
    let thresholds = verdicts.is_none().then(|| derive_thresholds(&symmetric, &clusters, &d.conflicts()));
    let mut pairs = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (confidence, score, class) = match (&verdicts, thresholds) {
                (Some(v), _) => (Some(v[i][j].confidence_ab), similarity.get(i, j), v[i][j].class_ab),
                (None, Some(th)) => (None, symmetric.get(i, j), three_way_from_score(symmetric.get(i, j), th)),
                (None, None) => unreachable!(),
            };
            pairs.push(PairResult {
                pair: pair_id(i, j),
                a: i,
                b: j,
                confidence,
                score,
                class,
                expected: d.expected_pairs.get(&(i, j)).copied(),
            });
        }
    }
    let scored: Vec<&PairResult> = pairs.iter().filter(|p| p.expected.is_some()).collect();
    let classification = if scored.is_empty() {
        None
    } else {
        let pred: Vec<PairClass> = scored.iter().map(|p| p.class).collect();
        let gold: Vec<PairClass> = scored.iter().map(|p| p.expected.expect("filtered")).collect();
        Some(classification_metrics(&pred, &gold)?)
    };
    let clustering_scores = if d.expected_clusters.is_empty() {
        None
    } else {
        Some(clustering_metrics(&clusters, &d.expected_clusters, &distances)?)
    };
    Ok(EvalReport {
        dataset: d.name.clone(),
        method: cfg.method,
        clustering: cfg.clustering,
        k,
        seed: cfg.seed,
        formulas: compiled.iter().map(|c| render(&c.formula)).collect(),
        similarity,
        clusters,
        expected_clusters: d.expected_clusters.clone(),
        thresholds,
        pairs,
        classification,
        clustering_scores,
    })
}

/// Aligned-column text summary.
pub fn summary_table(r: &EvalReport) -> String {
    let mut s = format!("dataset {}  method {:?}  clustering {:?}  k {}\n", r.dataset, r.method, r.clustering, r.k);
    if let Some(c) = &r.classification {
        s += &format!("{:<14}{:>10}{:>10}{:>10}\n", "", "precision", "recall", "f1");
        for (class, x) in &c.per_class {
            s += &format!(
                "{:<14}{:>10.2}{:>10.2}{:>10.2}  ({})\n",
                class.name(),
                x.precision,
                x.recall,
                x.f1,
                x.support
            );
        }
        s += &format!(
            "{:<14}{:>10.2}{:>10.2}{:>10.2}\n",
            "macro", c.macro_avg.precision, c.macro_avg.recall, c.macro_avg.f1
        );
        s += &format!(
            "{:<14}{:>10.2}{:>10.2}{:>10.2}\n",
            "weighted", c.weighted_avg.precision, c.weighted_avg.recall, c.weighted_avg.f1
        );
        s += &format!("{:<14}{:>10.2}\n", "accuracy", c.accuracy);
    }
    if let Some(c) = &r.clustering_scores {
        let sil = c.silhouette.map_or("-".to_string(), |x| format!("{x:.2}"));
        s += &format!("alignment {:.2}  silhouette {}  purity {:.2}  ARI {:.2}\n", c.alignment, sil, c.purity, c.ari);
    }
    if let Some(t) = r.thresholds {
        s += &format!("theta {:.4}  vartheta {:.4}\n", t.theta, t.vartheta);
    }
    s
}
