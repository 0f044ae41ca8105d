use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treerecon::bench::{bench_run, render_svg, write_csv, BenchConfig, BenchError, Regime};
use treerecon::format::{parse_tree, write_tree, write_weighted_tree, TreeFile};
use treerecon::generators::{named_shape, parallel_chain, random_tree, random_weights, Shape};
use treerecon::oracle::{
    AdditiveOracle, Counting, ExactOracle, NoisyOracle, PathOracle, WeightedOracle,
};
use treerecon::reconstruct::{
    reconstruct_noisy, reconstruct_tree, reconstruct_weighted, ReconstructError,
    ReconstructionStats,
};
use treerecon::tree::{weighted_tree_equals, WeightedDirectedRootedTree};
use treerecon::{tree_equals, DirectedRootedTree, Edge, NodeId};

#[derive(Parser)]
#[command(
    name = "treerecon",
    version,
    about = "Reconstruct hidden rooted trees from path queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a hidden tree to a file.
    Generate(GenerateArgs),
    /// Reconstruct the tree in a file through a simulated oracle.
    Reconstruct(ReconstructArgs),
    /// Run seeded query-count experiments.
    Bench(BenchArgs),
    /// Compare two tree files; exit 1 if they differ.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Random,
    Chain,
    Star,
    Caterpillar,
    Balanced,
    ParallelChain,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Exact,
    Noisy,
    Weighted,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Exact => Regime::Exact,
            RegimeArg::Noisy => Regime::Noisy,
            RegimeArg::Weighted => Regime::Weighted,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "random")]
    shape: ShapeArg,
    #[arg(long)]
    nodes: usize,
    /// Degree bound; required for random and parallel-chain shapes.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Attach random edge weights in (0, 1].
    #[arg(long)]
    weighted: bool,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    regime: RegimeArg,
    /// Degree bound handed to the algorithm; defaults to the tree's maximum degree.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file for the reconstructed tree; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print query counts and round statistics to stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "exact")]
    regime: RegimeArg,
    #[arg(long, value_delimiter = ',', required = true)]
    nodes: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    degrees: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; stdout if omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// SVG scatter plot of queries against n.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    expected: PathBuf,
    #[arg(long)]
    actual: PathBuf,
}

enum Failure {
    Mismatch(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Mismatch(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl ToString) -> Failure {
    Failure::Usage(msg.to_string())
}

fn read_tree(path: &Path) -> Result<TreeFile, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_tree(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CmdResult {
    let result = match out {
        Some(path) => fs::write(path, bytes),
        None => io::stdout().write_all(bytes),
    };
    result.map_err(|e| Failure::Io(e.to_string()))
}

fn generate(args: GenerateArgs) -> CmdResult {
    let n = args.nodes;
    let need_degree = || {
        args.degree
            .ok_or_else(|| usage("--degree is required for this shape"))
    };
    let tree = match args.shape {
        ShapeArg::Random => random_tree(n, need_degree()?, args.seed).map_err(usage)?,
        ShapeArg::ParallelChain => {
            let d = need_degree()?;
            if d == 0 || n == 0 || !(n - 1).is_multiple_of(d) {
                return Err(usage(format!(
                    "parallel-chain needs nodes = k * degree + 1, got nodes {n}, degree {d}"
                )));
            }
            parallel_chain(d, (n - 1) / d).map_err(usage)?
        }
        ShapeArg::Chain => named_shape(Shape::Chain, n, Some(args.seed)).map_err(usage)?,
        ShapeArg::Star => named_shape(Shape::Star, n, Some(args.seed)).map_err(usage)?,
        ShapeArg::Caterpillar => {
            named_shape(Shape::Caterpillar, n, Some(args.seed)).map_err(usage)?
        }
        ShapeArg::Balanced => named_shape(Shape::Balanced, n, Some(args.seed)).map_err(usage)?,
    };
    let text = if args.weighted {
        write_weighted_tree(&random_weights(&tree, args.seed ^ 0x5eed_ca11))
    } else {
        write_tree(&tree)
    };
    emit(args.out.as_deref(), text.as_bytes())
}

struct Outcome {
    edges: Vec<Edge>,
    weights: Option<Vec<(Edge, f64)>>,
    stats: ReconstructionStats,
    raw: u64,
    logical: u64,
    votes: usize,
}

fn reconstruct(args: ReconstructArgs) -> CmdResult {
    let file = read_tree(&args.tree)?;
    let hidden = file.tree();
    let n = hidden.len();
    let d = args.degree.unwrap_or_else(|| hidden.degree_bound());
    if d < hidden.max_degree() {
        return Err(usage(format!(
            "--degree {d} is below the tree's maximum degree {}",
            hidden.max_degree()
        )));
    }
    let nodes: Vec<NodeId> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let failed = |e: ReconstructError| Failure::Mismatch(e.to_string());
    let outcome = match args.regime {
        RegimeArg::Exact => {
            let mut oracle = Counting::new(ExactOracle::new(hidden));
            let r = reconstruct_tree(&mut oracle, &nodes, d, &mut rng).map_err(failed)?;
            Outcome {
                edges: r.edges,
                weights: None,
                stats: r.stats,
                raw: oracle.raw_queries(),
                logical: oracle.logical_queries(),
                votes: 1,
            }
        }
        RegimeArg::Noisy => {
            let eps = args.eps.ok_or_else(|| usage("noisy regime needs --eps"))?;
            let delta = args
                .delta
                .ok_or_else(|| usage("noisy regime needs --delta"))?;
            let noise_seed = rng.gen();
            let mut oracle = NoisyOracle::new(hidden, eps, noise_seed).map_err(usage)?;
            let r = reconstruct_noisy(&mut oracle, &nodes, d, eps, delta, &mut rng).map_err(
                |e| match e {
                    ReconstructError::Param(p) => usage(p),
                    other => failed(other),
                },
            )?;
            Outcome {
                edges: r.edges,
                weights: None,
                stats: r.stats,
                raw: oracle.raw_queries(),
                logical: r.logical_queries,
                votes: r.votes,
            }
        }
        RegimeArg::Weighted => {
            let TreeFile::Weighted(weighted) = &file else {
                return Err(usage("weighted regime needs a tree file with weights"));
            };
            let mut oracle = WeightedOracle::new(weighted);
            let r = reconstruct_weighted(&mut oracle, &nodes, d, &mut rng).map_err(failed)?;
            let raw = AdditiveOracle::raw_queries(&oracle);
            Outcome {
                edges: r.edges.iter().map(|&(e, _)| e).collect(),
                weights: Some(r.edges),
                stats: r.stats,
                raw,
                logical: raw,
                votes: 1,
            }
        }
    };
    if args.stats {
        eprintln!("raw_queries={}", outcome.raw);
        eprintln!("logical_queries={}", outcome.logical);
        eprintln!("votes={}", outcome.votes);
        eprintln!("rounds={}", outcome.stats.rounds_total);
        eprintln!("splitting_calls={}", outcome.stats.splitting_calls);
        eprintln!("recursion_depth={}", outcome.stats.recursion_depth_max);
    }
    let found = DirectedRootedTree::from_edges(n, &outcome.edges, d)
        .map_err(|e| Failure::Mismatch(format!("recovered edges do not form a tree: {e}")))?;
    let text = match outcome.weights {
        Some(pairs) => {
            let mut weights = vec![None; n];
            for (e, w) in pairs {
                weights[e.child] = Some(w);
            }
            let w = WeightedDirectedRootedTree::new(found, weights)
                .map_err(|e| Failure::Mismatch(e.to_string()))?;
            write_weighted_tree(&w)
        }
        None => write_tree(&found),
    };
    emit(args.out.as_deref(), text.as_bytes())
}

fn bench(args: BenchArgs) -> CmdResult {
    let config = BenchConfig {
        regime: args.regime.into(),
        nodes: args.nodes,
        degrees: args.degrees,
        reps: args.reps,
        eps: args.eps,
        delta: args.delta,
        base_seed: args.seed,
    };
    let records = bench_run(&config).map_err(|e| match e {
        BenchError::Io(e) => Failure::Io(e.to_string()),
        BenchError::Generator(_) | BenchError::Param(_) | BenchError::Config(_) => usage(e),
        other => Failure::Mismatch(other.to_string()),
    })?;
    let mut buf = Vec::new();
    write_csv(&records, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
    emit(args.csv.as_deref(), &buf)?;
    if let Some(plot) = &args.plot {
        fs::write(plot, render_svg(&records)).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let failures = records.iter().filter(|r| !r.success).count();
    if failures > 0 && config.regime != Regime::Noisy {
        return Err(Failure::Mismatch(format!(
            "{failures} runs did not recover the tree"
        )));
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> CmdResult {
    let expected = read_tree(&args.expected)?;
    let actual = read_tree(&args.actual)?;
    let same = match (&expected, &actual) {
        (TreeFile::Weighted(a), TreeFile::Weighted(b)) => weighted_tree_equals(a, b),
        _ => tree_equals(expected.tree(), actual.tree()),
    };
    if same {
        Ok(())
    } else {
        Err(Failure::Mismatch("trees differ".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Bench(a) => bench(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("treerecon: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
