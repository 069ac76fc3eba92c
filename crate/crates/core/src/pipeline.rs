//! Dependency graph to closed formula, stage by stage.

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::apriori::{coalesce_groups, AprioriOptions, DepGraph, EmptyGroupError, GraphError, MeuDb};
use crate::fol::{render, to_fol, FolError, Formula};
use crate::kb::{KbError, KnowledgeBase};
use crate::kernel::{construct_final_kernel, KernelError, KernelTrace};
use crate::reason::ReasonError;
use crate::rewrite::build_intermediate;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    EmptyGroup(#[from] EmptyGroupError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Fol(#[from] FolError),
    #[error(transparent)]
    Reason(#[from] ReasonError),
    #[error("{0}")]
    Input(String),
}

impl PipelineError {
    /// Process exit code: 2 for exhausted budgets, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Reason(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub apriori_us: f64,
    pub rewrite_us: f64,
    pub kernel_us: f64,
    pub fol_us: f64,
}

impl Timings {
    pub fn total(&self) -> Duration {
        Duration::from_secs_f64((self.apriori_us + self.rewrite_us + self.kernel_us + self.fol_us) / 1e6)
    }
}

/// Stage clock; browsers have no monotonic `Instant`, so timings read zero there.
#[cfg(not(target_arch = "wasm32"))]
struct Clock(std::time::Instant);

#[cfg(not(target_arch = "wasm32"))]
impl Clock {
    fn start() -> Self {
        Clock(std::time::Instant::now())
    }

    fn micros(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e6
    }
}

#[cfg(target_arch = "wasm32")]
struct Clock;

#[cfg(target_arch = "wasm32")]
impl Clock {
    fn start() -> Self {
        Clock
    }

    fn micros(&self) -> f64 {
        0.0
    }
}

/// A compiled sentence.
#[derive(Clone, Debug, Serialize)]
pub struct Compiled {
    pub text: String,
    pub trace: KernelTrace,
    #[serde(serialize_with = "formula_string")]
    pub formula: Formula,
    pub timings: Timings,
}

fn formula_string<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render(f))
}

pub fn compile(g: &DepGraph, db: &MeuDb, kb: &KnowledgeBase, opts: AprioriOptions) -> Result<Compiled, PipelineError> {
    let mut timings = Timings::default();
    let t = Clock::start();
    let a = coalesce_groups(g, kb, db, opts)?;
    timings.apriori_us = t.micros();
    let t = Clock::start();
    let ig = build_intermediate(&a, kb);
    timings.rewrite_us = t.micros();
    let t = Clock::start();
    let trace = construct_final_kernel(&ig, kb)?;
    timings.kernel_us = t.micros();
    let t = Clock::start();
    let formula = to_fol(&trace.final_, kb)?;
    timings.fol_us = t.micros();
    Ok(Compiled { text: g.text.clone(), trace, formula, timings })
}
