//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use treerecon::baseline::{check_separator, enumerate_trees};
use treerecon::bench::{bench_run, csv_string, derive_seed, run_trial, BenchConfig, Regime, Trial};
use treerecon::generators::random_tree;
use treerecon::oracle::{majority_m, ExactOracle};
use treerecon::reconstruct::{
    assign_bag_index, find_bag, find_lca, reconstruct_multidir_path, reconstruct_tree,
    reconstruct_tree_observed, split_tree, Observer, SplitPath,
};
use treerecon::{tree_equals, DirectedRootedTree, Edge, MultidirPath, NodeId};

const BASE_SEED: u64 = 20_240_601;
const SAMPLES: usize = 1_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn all(n: usize) -> Vec<NodeId> {
    (0..n).collect()
}

fn trials(
    regime: Regime,
    ns: &[usize],
    ds: &[usize],
    eps: Option<f64>,
    delta: Option<f64>,
) -> Vec<Trial> {
    let cells: Vec<(usize, usize, usize)> = ns
        .iter()
        .flat_map(|&n| {
            ds.iter()
                .flat_map(move |&d| (0..10).map(move |rep| (n, d, rep)))
        })
        .collect();
    cells
        .into_par_iter()
        .map(|(n, d, rep)| {
            run_trial(regime, n, d, eps, delta, derive_seed(BASE_SEED, n, d, rep))
                .expect("trial runs")
        })
        .collect()
}

fn exhaustive() -> Outcome {
    let mut failures = 0usize;
    let mut counts = Vec::new();
    for n in 1..=7usize {
        let trees: Vec<DirectedRootedTree> = enumerate_trees(n, None).unwrap().collect();
        counts.push(trees.len());
        failures += trees
            .par_iter()
            .enumerate()
            .filter(|(k, t)| {
                let mut o = ExactOracle::new(t);
                let mut rng = ChaCha8Rng::seed_from_u64(*k as u64);
                let r = reconstruct_tree(&mut o, &all(n), t.degree_bound(), &mut rng).unwrap();
                let found = DirectedRootedTree::from_edges(n, &r.edges, t.degree_bound());
                !found.map(|f| tree_equals(t, &f)).unwrap_or(false)
            })
            .count();
    }
    let counts_ok = (1..=7usize).all(|n| counts[n - 1] == n.pow(n as u32 - 1));
    outcome(
        failures == 0 && counts_ok,
        format!("tree counts {counts:?}, {failures} mismatches"),
    )
}

fn random_recovery() -> Outcome {
    let t = trials(
        Regime::Exact,
        &[100, 500, 1000, 2000],
        &[3, 5, 10],
        None,
        None,
    );
    let ok = t.iter().filter(|t| t.record.success).count();
    outcome(
        ok == t.len() && t.len() == 120,
        format!("{ok}/{} recovered", t.len()),
    )
}

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - (n - 1).leading_zeros()
}

fn query_scaling() -> Outcome {
    let d = 5;
    let ns = [100, 500, 1000, 2000];
    let t = trials(Regime::Exact, &ns, &[d], None, None);
    let mean = |n: usize| {
        let xs: Vec<f64> = t
            .iter()
            .filter(|t| t.record.n == n)
            .map(|t| t.record.raw_queries as f64)
            .collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let ratio = mean(2000) / mean(1000);
    let mut within = true;
    let mut parts = Vec::new();
    for n in ns {
        let log = f64::from(ceil_log2(n));
        let cap = 4.0 * d as f64 * n as f64 * log * log;
        within &= mean(n) <= cap;
        parts.push(format!("n={n} mean {:.0} cap {cap:.0}", mean(n)));
    }
    outcome(
        ratio <= 2.7 && within,
        format!("ratio {ratio:.3} (<= 2.7); {}", parts.join(", ")),
    )
}

fn round_count() -> Outcome {
    let t = trials(Regime::Exact, &[1000], &[3, 5, 10], None, None);
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [3usize, 5, 10] {
        let rows: Vec<f64> = t
            .iter()
            .filter(|t| t.record.d == d)
            .map(|t| t.stats.mean_rounds_per_call())
            .collect();
        let mean = rows.iter().sum::<f64>() / rows.len() as f64;
        let cap = (d * d) as f64 / (d - 1) as f64;
        pass &= mean <= cap;
        parts.push(format!("d={d} {mean:.3} <= {cap:.3}"));
    }
    outcome(pass, parts.join(", "))
}

fn noisy() -> Outcome {
    let (eps, delta) = (0.1, 0.1);
    let m = majority_m(eps, delta, 200, 5).unwrap() as u64;
    let t = trials(Regime::Noisy, &[200], &[5], Some(eps), Some(delta));
    let ok = t.iter().filter(|t| t.record.success).count();
    let accounting = t
        .iter()
        .all(|t| t.record.raw_queries == m * t.record.logical_queries);
    outcome(
        ok >= 9 && accounting,
        format!("{ok}/10 recovered, m = {m}, raw = m * logical in all runs: {accounting}"),
    )
}

fn weighted() -> Outcome {
    let t = trials(Regime::Weighted, &[500], &[5], None, None);
    let ok = t.iter().filter(|t| t.record.success).count();
    outcome(
        ok == 10,
        format!("{ok}/10 recovered with bit-identical weights"),
    )
}

fn sample_tree(rng: &mut ChaCha8Rng) -> DirectedRootedTree {
    let n = rng.gen_range(2..=80);
    let d = rng.gen_range(2..=6);
    random_tree(n, d, rng.gen()).unwrap()
}

fn distinct_pair(rng: &mut ChaCha8Rng, n: usize) -> (NodeId, NodeId) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

fn brute_lca(t: &DirectedRootedTree, i: NodeId, j: NodeId) -> NodeId {
    let reaches = |a: NodeId, b: NodeId| a == b || t.is_ancestor(a, b).unwrap();
    (0..t.len())
        .filter(|&a| reaches(a, i) && reaches(a, j))
        .max_by_key(|&a| t.depth(a))
        .unwrap()
}

struct SeparatorAudit<'t> {
    tree: &'t DirectedRootedTree,
    d: usize,
    checked: usize,
    failures: usize,
}

impl Observer for SeparatorAudit<'_> {
    fn on_separator(&mut self, nodes: &[NodeId], _path: &MultidirPath, sep: Edge) {
        self.checked += 1;
        let local = |v: NodeId| nodes.iter().position(|&x| x == v);
        let ok = match (
            self.tree.induced(nodes),
            local(sep.parent),
            local(sep.child),
        ) {
            (Some(sub), Some(p), Some(c)) => {
                let sub = DirectedRootedTree::new(sub.parents().to_vec(), self.d).unwrap();
                check_separator(&sub, Edge::new(p, c)).unwrap_or(false)
            }
            _ => false,
        };
        if !ok {
            self.failures += 1;
        }
    }
}

fn subprocedures() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED);
    let mut fails = [0usize; 5];

    for _ in 0..SAMPLES {
        let t = sample_tree(&mut rng);
        let (i, j) = distinct_pair(&mut rng, t.len());
        let mut o = ExactOracle::new(&t);
        let got = reconstruct_multidir_path(&mut o, &all(t.len()), i, j).unwrap();
        if got != t.true_multidir_path(i, j).unwrap() {
            fails[0] += 1;
        }
    }

    let mut done = 0;
    while done < SAMPLES {
        let t = sample_tree(&mut rng);
        let (i, j) = distinct_pair(&mut rng, t.len());
        if t.is_ancestor(i, j).unwrap() || t.is_ancestor(j, i).unwrap() {
            continue;
        }
        done += 1;
        let mut o = ExactOracle::new(&t);
        if find_lca(&mut o, &all(t.len()), i, j).unwrap() != brute_lca(&t, i, j) {
            fails[1] += 1;
        }
    }

    for _ in 0..SAMPLES {
        let t = sample_tree(&mut rng);
        let (i, j) = distinct_pair(&mut rng, t.len());
        let path = t.true_multidir_path(i, j).unwrap();
        let truth = t.true_bags(&path);
        let split = SplitPath::new(&path);
        let left: Vec<NodeId> = path.sequence[..path.lca_index]
            .iter()
            .rev()
            .copied()
            .collect();
        let right: Vec<NodeId> = path.sequence[path.lca_index - 1..].to_vec();
        let mut o = ExactOracle::new(&t);
        let bad = (0..t.len())
            .filter(|v| !path.sequence.contains(v))
            .any(|v| {
                let l = find_bag(&mut o, &left, v).unwrap();
                let r = find_bag(&mut o, &right, v).unwrap();
                assign_bag_index(l, r, path.lca_index) != truth[v]
                    || split.locate(&mut o, v).unwrap() != truth[v]
            });
        if bad {
            fails[2] += 1;
        }
    }

    for _ in 0..SAMPLES {
        let t = sample_tree(&mut rng);
        let edges = t.edges();
        let sep = edges[rng.gen_range(0..edges.len())];
        let mut o = ExactOracle::new(&t);
        let (upper, lower) = split_tree(&mut o, &all(t.len()), sep).unwrap();
        let mut seen = vec![0u8; t.len()];
        for &v in upper.iter().chain(&lower) {
            seen[v] += 1;
        }
        let partition = seen.iter().all(|&c| c == 1);
        let lower_ok = lower.len() == t.subtree_size(sep.child)
            && lower
                .iter()
                .all(|&v| v == sep.child || t.is_ancestor(sep.child, v).unwrap());
        let connected = t.induced(&upper).is_some() && t.induced(&lower).is_some();
        if !(partition && lower_ok && connected && upper.contains(&sep.parent)) {
            fails[3] += 1;
        }
    }

    let mut separators = 0;
    for k in 0..SAMPLES {
        let t = sample_tree(&mut rng);
        let d = t.degree_bound();
        let mut audit = SeparatorAudit {
            tree: &t,
            d,
            checked: 0,
            failures: 0,
        };
        let mut o = ExactOracle::new(&t);
        let mut run_rng = ChaCha8Rng::seed_from_u64(k as u64);
        reconstruct_tree_observed(&mut o, &all(t.len()), d, &mut run_rng, &mut audit).unwrap();
        separators += audit.checked;
        fails[4] += audit.failures;
    }

    outcome(
        fails.iter().all(|&f| f == 0),
        format!(
            "failures: multidir {}, lca {}, bags {}, split {}, separators {} of {separators}",
            fails[0], fails[1], fails[2], fails[3], fails[4]
        ),
    )
}

fn strip_wall_ms(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|line| {
            line.rsplit_once(',')
                .map_or(line, |(head, _)| head)
                .to_string()
        })
        .collect()
}

fn determinism() -> Outcome {
    let mut pass = true;
    let mut rows = 0;
    for (regime, eps, delta) in [
        (Regime::Exact, None, None),
        (Regime::Noisy, Some(0.1), Some(0.1)),
        (Regime::Weighted, None, None),
    ] {
        let config = BenchConfig {
            regime,
            nodes: vec![20, 60],
            degrees: vec![3, 5],
            reps: 3,
            eps,
            delta,
            base_seed: BASE_SEED,
        };
        let a = csv_string(&bench_run(&config).unwrap()).unwrap();
        let b = csv_string(&bench_run(&config).unwrap()).unwrap();
        rows += a.lines().count() - 1;
        pass &= strip_wall_ms(&a) == strip_wall_ms(&b);
    }
    outcome(pass, format!("{rows} rows identical apart from wall_ms"))
}

fn main() -> ExitCode {
    type Check = (&'static str, fn() -> Outcome);
    let checks: [Check; 8] = [
        ("exhaustive correctness, n <= 7", exhaustive),
        ("random-tree recovery, 120 runs", random_recovery),
        ("query scaling at d = 5", query_scaling),
        ("rounds per splitting call at n = 1000", round_count),
        ("noisy regime, n = 200, d = 5", noisy),
        ("weighted regime, n = 500, d = 5", weighted),
        ("sub-procedures vs ground truth", subprocedures),
        ("bench determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {verdict}: {name}: {} ({:.1}s)",
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
