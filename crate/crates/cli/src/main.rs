use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use factlogic::apriori::{load_dep_graph, AprioriOptions, DepGraph, MeuDb};
use factlogic::bench::{bench, to_csv};
use factlogic::dataset::{pair_id, Dataset};
use factlogic::eval::Clustering;
use factlogic::evaluate::{evaluate, summary_table, EvalConfig, Method};
use factlogic::explain::Explanation;
use factlogic::fol::render;
use factlogic::kb::KnowledgeBase;
use factlogic::kernel::KernelTrace;
use factlogic::pipeline::{compile, Compiled, PipelineError};
use factlogic::reason::{analyse, Prepared, DEFAULT_ATOM_CAP};

#[derive(Parser)]
#[command(name = "factlogic", version, about = "Sentence-to-logic compiler and pairwise entailment scorer")]
struct Cli {
    /// Knowledge base JSON.
    #[arg(long, global = true, default_value = "data/kb.json")]
    kb: PathBuf,
    /// Skip entity typing and multi-word resolution.
    #[arg(long, global = true)]
    no_apriori: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile one sentence to a formula.
    Parse {
        #[command(flatten)]
        src: Source,
        /// Sentence: a graph path, or an index with --dataset.
        sentence: String,
        /// Print every kernel stage.
        #[arg(long)]
        trace: bool,
    },
    /// Explain one ordered pair: atoms, comparisons, world table, confidences.
    Compare {
        #[command(flatten)]
        src: Source,
        a: String,
        b: String,
        /// Also write an HTML report into this directory.
        #[arg(long)]
        html: Option<PathBuf>,
    },
    /// Confidences and classes for one pair, or every ordered pair of a dataset.
    Classify {
        #[command(flatten)]
        src: Source,
        a: Option<String>,
        b: Option<String>,
    },
    /// Similarity, clustering and classification scores over a dataset.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "logical")]
        method: Method,
        /// Pipeline stage to score; overrides --method.
        #[arg(long)]
        stage: Option<Stage>,
        #[arg(long, default_value = "ahc")]
        clustering: Clustering,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print an aligned text table instead of JSON.
        #[arg(long)]
        table: bool,
        /// Also write one HTML explanation per expected pair into this directory.
        #[arg(long)]
        html: Option<PathBuf>,
    },
    /// Per-stage timing medians as CSV.
    Bench {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
}

#[derive(Args)]
struct Source {
    /// Dataset YAML; sentences are then given by index.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Entity table for graph-path sentences, one per sentence in order.
    #[arg(long)]
    meu: Vec<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Stage {
    Sg,
    Lg,
    Logical,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(m: impl std::fmt::Display) -> Self {
        Failure { code: 1, message: m.to_string() }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

type Res<T> = Result<T, Failure>;

struct Ctx {
    kb: KnowledgeBase,
    opts: AprioriOptions,
    dataset: Option<Dataset>,
    meu: Vec<PathBuf>,
}

impl Ctx {
    fn sentence(&self, spec: &str, slot: usize) -> Res<(String, Compiled)> {
        let (g, db): (DepGraph, MeuDb) = match &self.dataset {
            Some(d) => {
                let i: usize =
                    spec.parse().map_err(|_| Failure::invalid(format!("{spec:?} is not a sentence index")))?;
                if i >= d.len() {
                    return Err(Failure::invalid(format!("sentence {i} out of range (dataset has {})", d.len())));
                }
                d.fixture(i).map_err(Failure::invalid)?
            }
            None => {
                let g = load_dep_graph(spec).map_err(|e| Failure::invalid(format!("{spec}: {e}")))?;
                let db = match self.meu.get(slot) {
                    Some(p) => MeuDb::load(p).map_err(|e| Failure::invalid(format!("{}: {e}", p.display())))?,
                    None => MeuDb::default(),
                };
                (g, db)
            }
        };
        let db = if self.opts.use_meu { db } else { MeuDb::default() };
        let c = compile(&g, &db, &self.kb, self.opts)?;
        Ok((g.text.clone(), c))
    }

    fn explain(&self, a: &str, b: &str) -> Res<Explanation> {
        let (ta, ca) = self.sentence(a, 0)?;
        let (tb, cb) = self.sentence(b, 1)?;
        let prep = |c: Compiled| Prepared::new(c.formula, &self.kb).map_err(|e| PipelineError::Reason(e.into()));
        let analysis = analyse(&prep(ca)?, &prep(cb)?, &self.kb, DEFAULT_ATOM_CAP).map_err(PipelineError::Reason)?;
        Explanation::new(&ta, &tb, analysis).map_err(Failure::invalid)
    }
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn emit_raw(s: &str) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().lock().write_all(s.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

macro_rules! emit {
    ($($arg:tt)*) => {
        emit_raw(&format!("{}\n", format_args!($($arg)*)))
    };
}

fn print_trace(t: &KernelTrace) {
    for s in KernelTrace::STAGES {
        emit!("{s:<10}{}", t.stage(s).expect("known stage").render(false));
    }
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serialisable report")
}

fn write_html(dir: &Path, name: &str, body: &str) -> Res<()> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::invalid(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    std::fs::write(&p, body).map_err(|e| Failure::invalid(format!("{}: {e}", p.display())))
}

fn verdict_json(pair: String, e: &Explanation) -> serde_json::Value {
    let (ab, ba) = e.confidences();
    let frac = |r: factlogic::reason::Confidence| serde_json::json!({"num": r.numer(), "den": r.denom()});
    serde_json::json!({
        "pair": pair,
        "confidence": frac(ab),
        "reverse_confidence": frac(ba),
        "class": e.classes().0,
    })
}

fn load_dataset(p: &Path) -> Res<Dataset> {
    Dataset::load(p).map_err(Failure::invalid)
}

fn run(cli: Cli) -> Res<()> {
    let kb = KnowledgeBase::load(&cli.kb).map_err(Failure::invalid)?;
    let opts = AprioriOptions { use_meu: !cli.no_apriori };
    let ctx = |src: Source| -> Res<Ctx> {
        let dataset = src.dataset.as_deref().map(load_dataset).transpose()?;
        Ok(Ctx { kb: kb.clone(), opts, dataset, meu: src.meu })
    };
    match cli.cmd {
        Cmd::Parse { src, sentence, trace } => {
            let (_, c) = ctx(src)?.sentence(&sentence, 0)?;
            if trace {
                print_trace(&c.trace);
            }
            emit!("{}", render(&c.formula));
        }
        Cmd::Compare { src, a, b, html } => {
            let e = ctx(src)?.explain(&a, &b)?;
            emit!("{}", json(&e));
            if let Some(dir) = html {
                write_html(&dir, &format!("compare_{}_{}.html", slug(&a), slug(&b)), &e.to_html())?;
            }
        }
        Cmd::Classify { src, a, b } => {
            let c = ctx(src)?;
            match (a, b, &c.dataset) {
                (Some(a), Some(b), _) => emit!("{}", json(&verdict_json(format!("{a}->{b}"), &c.explain(&a, &b)?))),
                (None, None, Some(d)) => {
                    let mut out = Vec::new();
                    for i in 0..d.len() {
                        for j in 0..d.len() {
                            out.push(verdict_json(pair_id(i, j), &c.explain(&i.to_string(), &j.to_string())?));
                        }
                    }
                    emit!("{}", json(&out));
                }
                _ => return Err(Failure::invalid("classify needs two sentences, or --dataset alone")),
            }
        }
        Cmd::Evaluate { dataset, method, stage, clustering, k, seed, table, html } => {
            let d = load_dataset(&dataset)?;
            let method = match stage {
                Some(Stage::Sg) => Method::Sg,
                Some(Stage::Lg) => Method::Lg,
                Some(Stage::Logical) => Method::Logical,
                None => method,
            };
            let cfg = EvalConfig { method, clustering, k, seed, apriori: opts, atom_cap: DEFAULT_ATOM_CAP };
            let r =
                evaluate(&d, &kb, &cfg).map_err(|e| Failure { code: e.exit_code() as u8, message: e.to_string() })?;
            if table {
                emit_raw(&summary_table(&r));
            } else {
                emit!("{}", json(&r));
            }
            if let Some(dir) = html {
                let c = Ctx { kb: kb.clone(), opts, dataset: Some(d.clone()), meu: Vec::new() };
                for &(i, j) in d.expected_pairs.keys() {
                    let e = c.explain(&i.to_string(), &j.to_string())?;
                    write_html(&dir, &format!("compare_{i}_{j}.html"), &e.to_html())?;
                }
            }
        }
        Cmd::Bench { dataset, repetitions } => {
            let d = load_dataset(&dataset)?;
            let inputs = (0..d.len()).map(|i| d.fixture(i)).collect::<Result<Vec<_>, _>>().map_err(Failure::invalid)?;
            let inputs: Vec<_> =
                inputs.into_iter().map(|(g, db)| (g, if opts.use_meu { db } else { MeuDb::default() })).collect();
            emit_raw(&to_csv(&bench(&inputs, &kb, opts, repetitions)?));
        }
    }
    Ok(())
}

fn slug(s: &str) -> String {
    Path::new(s).file_stem().map_or_else(|| s.to_string(), |x| x.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
