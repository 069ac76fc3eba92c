//! Per-stage wall-clock medians over repeated compilations.

use serde::Serialize;

use crate::apriori::{AprioriOptions, DepGraph, MeuDb};
use crate::kb::KnowledgeBase;
use crate::pipeline::{compile, PipelineError, Timings};

pub const STAGES: [&str; 4] = ["apriori", "rewrite", "kernel", "fol"];

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub sentence: usize,
    pub tokens: usize,
    pub stage: &'static str,
    pub median_us: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn stage_us(t: &Timings, stage: &str) -> f64 {
    match stage {
        "apriori" => t.apriori_us,
        "rewrite" => t.rewrite_us,
        "kernel" => t.kernel_us,
        _ => t.fol_us,
    }
}

/// One row per sentence and stage, in pipeline order.
pub fn bench(
    inputs: &[(DepGraph, MeuDb)],
    kb: &KnowledgeBase,
    opts: AprioriOptions,
    repetitions: usize,
) -> Result<Vec<BenchRow>, PipelineError> {
    let mut rows = Vec::new();
    for (i, (g, db)) in inputs.iter().enumerate() {
        let mut runs = Vec::with_capacity(repetitions.max(1));
        for _ in 0..repetitions.max(1) {
            runs.push(compile(g, db, kb, opts)?.timings);
        }
        for stage in STAGES {
            rows.push(BenchRow {
                sentence: i,
                tokens: g.nodes.len(),
                stage,
                median_us: median(runs.iter().map(|t| stage_us(t, stage)).collect()),
            });
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Median total time per token-count bucket, buckets in ascending length.
pub fn bucket_medians(rows: &[BenchRow], bounds: &[usize]) -> Vec<(usize, f64)> {
    let mut totals: std::collections::BTreeMap<usize, (usize, f64)> = Default::default();
    for r in rows {
        let e = totals.entry(r.sentence).or_insert((r.tokens, 0.0));
        e.1 += r.median_us;
    }
    let bucket = |t: usize| bounds.iter().position(|&b| t <= b).unwrap_or(bounds.len());
    let mut by: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for (tokens, total) in totals.values() {
        by.entry(bucket(*tokens)).or_default().push(*total);
    }
    by.into_iter().map(|(b, xs)| (b, median(xs))).collect()
}
