//! `ophc`: order-preserving hierarchical clustering from the command line.
//!
//! Exit codes: 0 success, 2 bad usage or input, 3 instance too large for the
//! requested solver.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ophc::io::{
    load_json, save_json, MetricVariants, Provenance, ReportFile, SpaceFile, TreeFile, TreeMeta, TruthFile,
    REPORT_SCHEMA_VERSION,
};
use ophc::metrics::best_flat_by_ari;
use ophc::pareto::{alpha_grid, refine_alpha, sweep_alpha, Truth, DEFAULT_GRID_SIZE};
use ophc::solvers::{CutChoice, SolverKind, DEFAULT_EXACT_LIMIT};
use ophc::synth::{
    copy_paste_partition, planted_bipartite, random_similarity, stream_rng, BaseSpace, CopyPasteSpec,
    PlantedBipartiteSpec, PlantedTruth,
};
use ophc::{Alpha, Error, OrderedSimilaritySpace, SolverConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "ophc", version, about = "Order-preserving hierarchical clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tree for a space and write it as JSON.
    Cluster(ClusterArgs),
    /// Generate a planted instance and its ground truth.
    Synth(SynthArgs),
    /// Score a tree against ground truth.
    Eval(EvalArgs),
    /// Solve across a range of alpha values and write a CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Exhaustive subset DP or recursive sparsest cuts.
    #[arg(long, value_enum, default_value_t = SolverArg::Exact)]
    solver: SolverArg,
    /// Cut routine used by the approximate solver.
    #[arg(long, value_enum, default_value_t = CutArg::Auto)]
    cut: CutArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest n the exact solver accepts.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    exact_limit: usize,
    /// Largest subproblem the exact cut enumerates.
    #[arg(long, default_value_t = ophc::cuts::DEFAULT_CUT_LIMIT)]
    cut_limit: usize,
    /// Random restarts of the local search cut.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Improvement passes per restart of the local search cut.
    #[arg(long, default_value_t = 50)]
    max_passes: usize,
}

impl SolverFlags {
    fn config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            solver: match self.solver {
                SolverArg::Exact => SolverKind::Exact,
                SolverArg::Approx => SolverKind::Approx,
            },
            cut: match self.cut {
                CutArg::Exact => CutChoice::Exact,
                CutArg::Local => CutChoice::Local,
                CutArg::Auto => CutChoice::Auto,
            },
            exact_limit: self.exact_limit,
            cut_limit: self.cut_limit,
            restarts: self.restarts,
            max_passes: self.max_passes,
            seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    Approx,
}

#[derive(Clone, Copy, ValueEnum)]
enum CutArg {
    Exact,
    Local,
    Auto,
}

#[derive(Args)]
struct ClusterArgs {
    space: PathBuf,
    /// Weight of similarity against order, in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: PathBuf,
    /// Ground truth; when given, the best flat level is scored.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(subcommand)]
    kind: SynthKind,
}

#[derive(Args, Clone)]
struct BppFlags {
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Probability of a planted-direction comparison.
    #[arg(long, default_value_t = 0.9)]
    p: f64,
    /// Probability of any other comparison.
    #[arg(long, default_value_t = 0.1)]
    q: f64,
    /// Constant similarity between all pairs.
    #[arg(long, default_value_t = 0.0)]
    similarity: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseKind {
    /// Random partial order with random similarities.
    Random,
    /// Total order with random similarities.
    Chain,
}

#[derive(Args, Clone)]
struct CopyPasteFlags {
    /// Number of copies added to the base.
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    base_n: usize,
    #[arg(long, value_enum, default_value_t = BaseKind::Random)]
    base: BaseKind,
    /// Edge probability of a random base order.
    #[arg(long, default_value_t = 0.3)]
    edge_probability: f64,
    /// Mean of the normal noise subtracted across copies.
    #[arg(long, default_value_t = 0.075)]
    mu: f64,
    /// Variance of that noise.
    #[arg(long, default_value_t = 0.15)]
    sigma2: f64,
}

#[derive(Subcommand, Clone)]
enum SynthKind {
    /// Planted bipartite order.
    Bpp {
        #[command(flatten)]
        flags: BppFlags,
        #[command(flatten)]
        out: SynthOut,
    },
    /// Noisy copies of a base space.
    Copypaste {
        #[command(flatten)]
        flags: CopyPasteFlags,
        #[command(flatten)]
        out: SynthOut,
    },
}

#[derive(Args, Clone)]
struct SynthOut {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Space file to write.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth file to write.
    #[arg(long)]
    truth_out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Report file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Bpp,
    Copypaste,
}

#[derive(Args)]
struct SweepArgs {
    /// Space to sweep; omit when generating instances.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    space: Option<PathBuf>,
    #[arg(long, requires = "space")]
    truth: Option<PathBuf>,
    /// Draw a fresh instance for every replicate.
    #[arg(long, value_enum)]
    generate: Option<Generator>,
    #[command(flatten)]
    bpp: BppFlags,
    #[command(flatten)]
    copypaste: CopyPasteFlags,
    /// Explicit comma-separated alpha values.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["grid_size", "refine"])]
    alphas: Option<Vec<f64>>,
    /// Number of evenly spaced alpha values from 0 to 1.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid_size: usize,
    /// Locate optimum changes by bisection down to this width.
    #[arg(long, conflicts_with = "grid_size")]
    refine: Option<f64>,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cluster(a) => cluster(a),
        Command::Synth(a) => synth(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Capacity { .. } => 3,
                _ => 2,
            })
        }
    }
}

type Result<T> = ophc::Result<T>;

fn invalid(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn load_space(path: &Path) -> Result<OrderedSimilaritySpace> {
    load_json::<SpaceFile>(path)?.to_space()
}

fn load_truth(path: &Path, n: usize) -> Result<PlantedTruth> {
    let truth = load_json::<TruthFile>(path)?.to_truth()?;
    if truth.clustering.n() != n {
        return Err(invalid(format!("truth covers {} elements, space {n}", truth.clustering.n())));
    }
    Ok(truth)
}

fn hash_inputs(files: &[&Path], flags: &[String]) -> Result<String> {
    let mut hasher = Sha256::new();
    for f in files {
        let bytes = fs::read(f)?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    for flag in flags {
        hasher.update((flag.len() as u64).to_le_bytes());
        hasher.update(flag.as_bytes());
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn cluster(args: ClusterArgs) -> Result<()> {
    let alpha = Alpha::new(args.alpha)?;
    let space = load_space(&args.space)?;
    let truth = args.truth.as_deref().map(|p| load_truth(p, space.n())).transpose()?;
    let config = args.solver.config(args.solver.seed);
    let solved = config.solve(&space, alpha)?;
    let meta = TreeMeta {
        objective: "val_alpha".into(),
        alpha: Some(alpha.get()),
        value: solved.value,
        solver: match solved.solver {
            SolverKind::Exact => "exact".into(),
            SolverKind::Approx => "approx".into(),
        },
        cut: solved.cut.map(str::to_string),
        seed: (solved.solver == SolverKind::Approx).then_some(config.seed),
    };
    save_json(&args.out, &TreeFile::new(&solved.tree, meta))?;
    println!("value\t{}", solved.value);
    let order: Vec<String> = solved.tree.leaf_order().iter().map(|&x| space.label(x)).collect();
    println!("leaf_order\t{}", order.join(" "));
    if let Some(t) = truth {
        let best = best_flat_by_ari(&solved.tree, &t.clustering, &t.order)?;
        println!("ari\t{}", best.report.ari);
        println!("delta_good\t{}", best.report.delta_good);
        println!("loops\t{}", best.report.loops);
    }
    Ok(())
}

fn copy_paste_base(flags: &CopyPasteFlags, seed: u64) -> Result<Option<BaseSpace>> {
    match flags.base {
        BaseKind::Random => Ok(None),
        BaseKind::Chain => {
            if flags.base_n == 0 {
                return Err(invalid("the base space needs at least one element"));
            }
            let sim = random_similarity(flags.base_n, false, &mut stream_rng(seed, 0));
            BaseSpace::chain(sim).map(Some)
        }
    }
}

fn generate(kind: Generator, bpp: &BppFlags, cp: &CopyPasteFlags, seed: u64) -> Result<(OrderedSimilaritySpace, PlantedTruth)> {
    match kind {
        Generator::Bpp => planted_bipartite(&PlantedBipartiteSpec {
            n: bpp.n,
            p: bpp.p,
            q: bpp.q,
            seed,
            similarity: bpp.similarity,
        }),
        Generator::Copypaste => {
            let spec = CopyPasteSpec {
                base_n: cp.base_n,
                copies: cp.m,
                mu: cp.mu,
                sigma2: cp.sigma2,
                seed,
                edge_probability: cp.edge_probability,
            };
            spec.validate()?;
            copy_paste_partition(&spec, copy_paste_base(cp, seed)?.as_ref())
        }
    }
}

fn synth(args: SynthArgs) -> Result<()> {
    let (space, truth, out) = match args.kind {
        SynthKind::Bpp { flags, out } => {
            let (s, t) = generate(Generator::Bpp, &flags, &default_copypaste(), out.seed)?;
            (s, t, out)
        }
        SynthKind::Copypaste { flags, out } => {
            let bpp = BppFlags {
                n: 2,
                p: 1.0,
                q: 0.0,
                similarity: 0.0,
            };
            let (s, t) = generate(Generator::Copypaste, &bpp, &flags, out.seed)?;
            (s, t, out)
        }
    };
    save_json(&out.out, &SpaceFile::from_space(&space))?;
    save_json(&out.truth_out, &TruthFile::from_truth(&truth))?;
    Ok(())
}

fn default_copypaste() -> CopyPasteFlags {
    CopyPasteFlags {
        m: 4,
        base_n: 5,
        base: BaseKind::Random,
        edge_probability: 0.3,
        mu: 0.075,
        sigma2: 0.15,
    }
}

fn eval(args: EvalArgs) -> Result<()> {
    let tree_file: TreeFile = load_json(&args.tree)?;
    let tree = tree_file.to_tree()?;
    let space = load_space(&args.space)?;
    if space.n() != tree.n() {
        return Err(invalid(format!("tree covers {} elements, space {}", tree.n(), space.n())));
    }
    let truth = load_truth(&args.truth, space.n())?;
    let best = best_flat_by_ari(&tree, &truth.clustering, &truth.order)?;
    let report = ReportFile {
        schema_version: REPORT_SCHEMA_VERSION,
        report: best.report,
        chosen_blocks: best.clustering.canonical(),
        metric_variants: MetricVariants::default(),
        provenance: Provenance {
            config_hash: hash_inputs(&[&args.tree, &args.space, &args.truth], &["eval".into()])?,
            seed: tree_file.meta.seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
        },
    };
    match &args.out {
        Some(path) => save_json(path, &report),
        None => {
            println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SweepRow {
    alpha: f64,
    /// Replicate index, or `mean` for the average over replicates.
    replicate: String,
    val_sd: f64,
    val_g: f64,
    val_alpha: f64,
    ari: Option<f64>,
    order_agreement: Option<f64>,
    loops: Option<f64>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    sum / count as f64
}

fn sweep(args: SweepArgs) -> Result<()> {
    if args.replicates == 0 {
        return Err(invalid("need at least one replicate"));
    }
    let instance = |r: usize| -> Result<(OrderedSimilaritySpace, Option<PlantedTruth>)> {
        let seed = args.solver.seed.wrapping_add(r as u64);
        match (&args.space, args.generate) {
            (Some(path), _) => {
                let space = load_space(path)?;
                let truth = args.truth.as_deref().map(|p| load_truth(p, space.n())).transpose()?;
                Ok((space, truth))
            }
            (None, Some(g)) => generate(g, &args.bpp, &args.copypaste, seed).map(|(s, t)| (s, Some(t))),
            (None, None) => Err(invalid("either --space or --generate is required")),
        }
    };

    let mut rows = Vec::new();
    for r in 0..args.replicates {
        let (space, truth) = instance(r)?;
        let config = args.solver.config(args.solver.seed.wrapping_add(r as u64));
        let grid = match (&args.alphas, args.refine) {
            (Some(values), _) => values.iter().map(|&a| Alpha::new(a)).collect::<Result<Vec<_>>>()?,
            (None, Some(tol)) => {
                let mut points = vec![0.0, 1.0];
                for b in refine_alpha(&space, 0.0, 1.0, tol, &config)? {
                    eprintln!("replicate {r}: optimum changes within [{}, {}]", b.lo, b.hi);
                    points.extend([b.lo, b.hi]);
                }
                points.sort_by(f64::total_cmp);
                points.dedup();
                points.into_iter().map(Alpha::new).collect::<Result<Vec<_>>>()?
            }
            (None, None) => alpha_grid(args.grid_size)?,
        };
        let truth_ref = truth.as_ref().map(|t| Truth {
            clustering: &t.clustering,
            order: &t.order,
        });
        for point in sweep_alpha(&space, &grid, &config, truth_ref)? {
            let p = point.map_err(|f| f.error)?;
            rows.push(SweepRow {
                alpha: p.alpha.get(),
                replicate: r.to_string(),
                val_sd: p.val_sd,
                val_g: p.val_g,
                val_alpha: p.val_alpha,
                ari: p.quality.as_ref().map(|q| q.ari),
                order_agreement: p.quality.as_ref().map(|q| q.order_agreement),
                loops: p.quality.as_ref().map(|q| q.loops),
            });
        }
    }
    rows.sort_by(|a, b| {
        a.alpha
            .total_cmp(&b.alpha)
            .then(a.replicate.parse::<usize>().ok().cmp(&b.replicate.parse::<usize>().ok()))
    });

    let mut by_alpha: BTreeMap<u64, Vec<&SweepRow>> = BTreeMap::new();
    for row in &rows {
        by_alpha.entry(row.alpha.to_bits()).or_default().push(row);
    }
    let mut means: Vec<SweepRow> = by_alpha
        .values()
        .map(|group| {
            let opt = |f: fn(&SweepRow) -> Option<f64>| {
                group.iter().map(|r| f(r)).collect::<Option<Vec<_>>>().map(|v| mean(v.into_iter()))
            };
            SweepRow {
                alpha: group[0].alpha,
                replicate: "mean".into(),
                val_sd: mean(group.iter().map(|r| r.val_sd)),
                val_g: mean(group.iter().map(|r| r.val_g)),
                val_alpha: mean(group.iter().map(|r| r.val_alpha)),
                ari: opt(|r| r.ari),
                order_agreement: opt(|r| r.order_agreement),
                loops: opt(|r| r.loops),
            }
        })
        .collect();
    means.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));

    let mut writer = csv::Writer::from_path(&args.out).map_err(|e| invalid(format!("cannot write csv: {e}")))?;
    for row in rows.iter().chain(&means) {
        writer.serialize(row).map_err(|e| invalid(format!("cannot write csv: {e}")))?;
    }
    writer.flush()?;
    if let Some(best) = means
        .iter()
        .filter_map(|m| m.ari.map(|a| (m.alpha, a)))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.total_cmp(&a.0)))
    {
        println!("best_alpha\t{}\tmean_ari\t{}", best.0, best.1);
    }
    Ok(())
}
