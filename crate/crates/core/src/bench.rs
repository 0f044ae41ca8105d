//! Seeded query-count experiments.
//!
//! Every `(n, d, rep)` cell derives its own seed from the base seed, so a
//! single record can be re-run in isolation and a whole sweep is
//! reproducible apart from the `wall_ms` column.

use std::fmt::{self, Write as _};
use std::io;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::generators::{random_tree, random_weights, GeneratorError};
use crate::oracle::{
    AdditiveOracle, Counting, ExactOracle, NoisyOracle, ParamError, PathOracle, WeightedOracle,
};
use crate::reconstruct::{
    reconstruct_noisy, reconstruct_tree, reconstruct_weighted, ReconstructError,
    ReconstructionStats,
};
use crate::tree::{tree_equals, DirectedRootedTree, Edge, NodeId};

pub const CSV_HEADER: [&str; 11] = [
    "regime",
    "n",
    "d",
    "eps",
    "delta",
    "seed",
    "raw_queries",
    "logical_queries",
    "rounds",
    "success",
    "wall_ms",
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Exact,
    Noisy,
    Weighted,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Exact => "exact",
            Regime::Noisy => "noisy",
            Regime::Weighted => "weighted",
        })
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Regime::Exact),
            "noisy" => Ok(Regime::Noisy),
            "weighted" => Ok(Regime::Weighted),
            other => Err(format!("unknown regime {other:?} (exact, noisy, weighted)")),
        }
    }
}

/// One repetition of one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub regime: Regime,
    pub n: usize,
    pub d: usize,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub seed: u64,
    pub raw_queries: u64,
    pub logical_queries: u64,
    pub rounds: u64,
    pub success: bool,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub regime: Regime,
    pub nodes: Vec<usize>,
    pub degrees: Vec<usize>,
    pub reps: usize,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub base_seed: u64,
}

/// A record plus the reconstruction statistics behind it.
#[derive(Debug, Clone)]
pub struct Trial {
    pub record: BenchRecord,
    pub stats: ReconstructionStats,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the `(n, d, rep)` cell: `base ^ hash(n, d, rep)`.
pub fn derive_seed(base: u64, n: usize, d: usize, rep: usize) -> u64 {
    let h = splitmix64(splitmix64(splitmix64(n as u64) ^ d as u64) ^ rep as u64);
    base ^ h
}

/// Independent sub-streams of one trial seed.
fn substream(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

fn all_nodes(n: usize) -> Vec<NodeId> {
    (0..n).collect()
}

fn same_tree(hidden: &DirectedRootedTree, edges: &[Edge], d: usize) -> bool {
    DirectedRootedTree::from_edges(hidden.len(), edges, d)
        .map(|found| tree_equals(hidden, &found))
        .unwrap_or(false)
}

/// Generates the hidden tree for `seed`, reconstructs it in `regime` and checks
/// the result against the hidden tree.
pub fn run_trial(
    regime: Regime,
    n: usize,
    d: usize,
    eps: Option<f64>,
    delta: Option<f64>,
    seed: u64,
) -> Result<Trial, BenchError> {
    let hidden = random_tree(n, d, seed)?;
    let nodes = all_nodes(n);
    let mut rng = ChaCha8Rng::seed_from_u64(substream(seed, 1));
    let start = Instant::now();
    let (raw, logical, stats, success) = match regime {
        Regime::Exact => {
            let mut oracle = Counting::new(ExactOracle::new(&hidden));
            let r = reconstruct_tree(&mut oracle, &nodes, d, &mut rng)?;
            let ok = same_tree(&hidden, &r.edges, d);
            (oracle.raw_queries(), oracle.logical_queries(), r.stats, ok)
        }
        Regime::Noisy => {
            let (eps, delta) = noisy_params(eps, delta)?;
            let mut oracle = NoisyOracle::new(&hidden, eps, substream(seed, 2))?;
            let r = reconstruct_noisy(&mut oracle, &nodes, d, eps, delta, &mut rng)?;
            let ok = same_tree(&hidden, &r.edges, d);
            (oracle.raw_queries(), r.logical_queries, r.stats, ok)
        }
        Regime::Weighted => {
            let weighted = random_weights(&hidden, substream(seed, 3));
            let mut oracle = WeightedOracle::new(&weighted);
            let r = reconstruct_weighted(&mut oracle, &nodes, d, &mut rng)?;
            let edges: Vec<Edge> = r.edges.iter().map(|&(e, _)| e).collect();
            let ok = same_tree(&hidden, &edges, d)
                && r.edges
                    .iter()
                    .all(|&(e, w)| weighted.weight(e).map(f64::to_bits) == Some(w.to_bits()));
            let raw = oracle.raw_queries();
            (raw, raw, r.stats, ok)
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let (eps, delta) = match regime {
        Regime::Noisy => (eps, delta),
        _ => (None, None),
    };
    Ok(Trial {
        record: BenchRecord {
            regime,
            n,
            d,
            eps,
            delta,
            seed,
            raw_queries: raw,
            logical_queries: logical,
            rounds: stats.rounds_total,
            success,
            wall_ms,
        },
        stats,
    })
}

fn noisy_params(eps: Option<f64>, delta: Option<f64>) -> Result<(f64, f64), BenchError> {
    let eps = eps.ok_or_else(|| BenchError::Config("noisy regime needs eps".into()))?;
    let delta = delta.ok_or_else(|| BenchError::Config("noisy regime needs delta".into()))?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(ParamError::Noise(eps).into());
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ParamError::Delta(delta).into());
    }
    Ok((eps, delta))
}

impl BenchConfig {
    fn validate(&self) -> Result<(), BenchError> {
        if self.regime == Regime::Noisy {
            noisy_params(self.eps, self.delta)?;
        }
        for &n in &self.nodes {
            for &d in &self.degrees {
                if n == 0 {
                    return Err(GeneratorError::Empty.into());
                }
                if d == 0 || (d == 1 && n > 2) {
                    return Err(GeneratorError::InfeasibleBound { n, d }.into());
                }
            }
        }
        Ok(())
    }

    /// Cells in output order: by `n`, then `d`, then repetition.
    pub fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut cells = Vec::new();
        for &n in &self.nodes {
            for &d in &self.degrees {
                for rep in 0..self.reps {
                    cells.push((n, d, rep));
                }
            }
        }
        cells
    }
}

/// Runs every cell of `config` (in parallel) and returns trials in cell order.
pub fn bench_trials(config: &BenchConfig) -> Result<Vec<Trial>, BenchError> {
    config.validate()?;
    config
        .cells()
        .into_par_iter()
        .map(|(n, d, rep)| {
            let seed = derive_seed(config.base_seed, n, d, rep);
            run_trial(config.regime, n, d, config.eps, config.delta, seed)
        })
        .collect()
}

pub fn bench_run(config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    Ok(bench_trials(config)?
        .into_iter()
        .map(|t| t.record)
        .collect())
}

/// Writes the header (always) followed by one row per record.
pub fn write_csv<W: io::Write>(records: &[BenchRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(records: &[BenchRecord]) -> Result<String, BenchError> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// `d n (log2 n)^2`.
pub fn reference_queries(n: usize, d: usize) -> f64 {
    let log = (n as f64).log2();
    d as f64 * n as f64 * log * log
}

const PALETTE: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Scatter of raw queries against `n`, one colour per degree, with the
/// `d n (log2 n)^2` reference curve for each degree drawn dashed.
pub fn render_svg(records: &[BenchRecord]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 160.0;
    const TOP: f64 = 30.0;
    const BOTTOM: f64 = 50.0;

    let mut degrees: Vec<usize> = records.iter().map(|r| r.d).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let n_max = records.iter().map(|r| r.n).max().unwrap_or(1).max(2) as f64;
    let y_max = records
        .iter()
        .map(|r| (r.raw_queries as f64).max(reference_queries(r.n, r.d)))
        .fold(1.0, f64::max);
    let x_of = |n: f64| LEFT + n / n_max * (W - LEFT - RIGHT);
    let y_of = |q: f64| H - BOTTOM - q / y_max * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (x_of(0.0), y_of(0.0), x_of(n_max), y_of(y_max));
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.1},{y1:.1} L{x0:.1},{y0:.1} L{x1:.1},{y0:.1}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let n = n_max * k as f64 / 4.0;
        let q = y_max * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
            x_of(n),
            y0 + 18.0,
            n
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3e}</text>"#,
            x0 - 6.0,
            y_of(q) + 4.0,
            q
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">nodes n</text>"#,
        (x0 + x1) / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">raw queries</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (k, &d) in degrees.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut curve = String::new();
        for step in 0..=100 {
            let n = 1.0 + (n_max - 1.0) * step as f64 / 100.0;
            let q = d as f64 * n * n.log2() * n.log2();
            let _ = write!(
                curve,
                "{}{:.1},{:.1} ",
                if step == 0 { "M" } else { "L" },
                x_of(n),
                y_of(q)
            );
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-dasharray="6 4"/>"#,
            curve.trim_end()
        );
        for r in records.iter().filter(|r| r.d == d) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{colour}" fill-opacity="0.7"/>"#,
                x_of(r.n as f64),
                y_of(r.raw_queries as f64)
            );
        }
        let ly = TOP + 20.0 * k as f64;
        let lx = W - RIGHT + 20.0;
        let _ = writeln!(
            s,
            r#"<circle cx="{lx:.1}" cy="{ly:.1}" r="4" fill="{colour}"/><text x="{:.1}" y="{:.1}">d = {d}</text>"#,
            lx + 10.0,
            ly + 4.0
        );
    }
    let ly = TOP + 20.0 * degrees.len() as f64;
    let lx = W - RIGHT + 14.0;
    let _ = writeln!(
        s,
        r#"<path d="M{lx:.1},{ly:.1} L{:.1},{ly:.1}" stroke="gray" stroke-dasharray="6 4"/><text x="{:.1}" y="{:.1}">d n log2(n)^2</text>"#,
        lx + 12.0,
        lx + 16.0,
        ly + 4.0
    );
    s.push_str("</svg>\n");
    s
}
