//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//! Reference values are computed here from first principles (adjacency
//! matrices, explicit shortest-path enumeration, hand-derived constants),
//! never by calling the code under test twice.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use netwalk_core::analysis::{
    community_nmi, matched_metric_correlation, nmi, pearson, recovery_series, spearman, summarize, NmiMode, Original,
    SeriesSpec,
};
use netwalk_core::community::detect_communities;
use netwalk_core::dynamics::{transition_distribution, Dynamics, DynamicsKind, Walker, WalkerState};
use netwalk_core::generators::{GeneratorSpec, Model};
use netwalk_core::io::read_edge_list;
use netwalk_core::metrics::{betweenness_raw, Metric};
use netwalk_core::reconstruct::{knowledge_fraction, reconstruct, ReconstructedGraph};
use netwalk_core::{seed, Graph, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Brute-force reference metrics on dense matrices.

const INF: usize = usize::MAX / 4;

struct Dense {
    n: usize,
    adj: Vec<Vec<bool>>,
    dist: Vec<Vec<usize>>,
}

impl Dense {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        let mut dist = vec![vec![INF; n]; n];
        for i in 0..n {
            dist[i][i] = 0;
            for j in 0..n {
                if adj[i][j] {
                    dist[i][j] = 1;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = dist[i][k] + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                    }
                }
            }
        }
        Dense { n, adj, dist }
    }

    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().filter(|&&a| a).count() as f64
    }

    fn clustering(&self, i: usize) -> f64 {
        let nb: Vec<usize> = (0..self.n).filter(|&j| self.adj[i][j]).collect();
        let k = nb.len();
        if k < 2 {
            return 0.0;
        }
        let mut closed = 0;
        for a in 0..k {
            for b in a + 1..k {
                if self.adj[nb[a]][nb[b]] {
                    closed += 1;
                }
            }
        }
        2.0 * closed as f64 / (k * (k - 1)) as f64
    }

    fn closeness(&self, i: usize) -> f64 {
        let total: usize = self.dist[i].iter().sum();
        (self.n - 1) as f64 / total as f64
    }

    fn eccentricity(&self, i: usize) -> f64 {
        *self.dist[i].iter().max().unwrap() as f64
    }

    /// Every shortest s–t path, listed explicitly.
    fn shortest_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        fn extend(d: &Dense, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let cur = *path.last().unwrap();
            if cur == t {
                out.push(path.clone());
                return;
            }
            for next in 0..d.n {
                if d.adj[cur][next] && d.dist[next][t] + 1 == d.dist[cur][t] {
                    path.push(next);
                    extend(d, t, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        extend(self, t, &mut vec![s], &mut out);
        out
    }

    /// Unordered-pair betweenness by path enumeration, plus the sum over
    /// pairs of the mean interior length of their shortest paths.
    fn betweenness(&self) -> (Vec<f64>, f64) {
        let mut b = vec![0.0; self.n];
        let mut interior_total = 0.0;
        for s in 0..self.n {
            for t in s + 1..self.n {
                let paths = self.shortest_paths(s, t);
                let share = 1.0 / paths.len() as f64;
                for p in &paths {
                    for &v in &p[1..p.len() - 1] {
                        b[v] += share;
                    }
                }
                interior_total += (self.dist[s][t] - 1) as f64;
            }
        }
        (b, interior_total)
    }

    /// Largest k whose k-core (repeatedly delete nodes of degree < k)
    /// still contains the node.
    fn coreness(&self) -> Vec<f64> {
        let mut core = vec![0.0; self.n];
        for k in 1..self.n {
            let mut alive = vec![true; self.n];
            loop {
                let doomed: Vec<usize> = (0..self.n)
                    .filter(|&i| alive[i] && (0..self.n).filter(|&j| alive[j] && self.adj[i][j]).count() < k)
                    .collect();
                if doomed.is_empty() {
                    break;
                }
                for i in doomed {
                    alive[i] = false;
                }
            }
            if !alive.iter().any(|&a| a) {
                break;
            }
            for i in 0..self.n {
                if alive[i] {
                    core[i] = k as f64;
                }
            }
        }
        core
    }
}

/// Seeded G(n, p) conditioned on connectivity.
fn random_connected(rng: &mut ChaCha8Rng) -> (usize, Vec<(usize, usize)>) {
    loop {
        let n = rng.random_range(4..=50);
        let p = rng.random_range(1.2..4.0) * (n as f64).ln() / n as f64;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let d = Dense::new(n, &edges);
        if d.dist[0].iter().all(|&x| x < INF) {
            return (n, edges);
        }
    }
}

fn metric_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let (n, edges) = random_connected(&mut rng);
        let g = Graph::from_edges(n, edges.iter().copied()).unwrap().0;
        let d = Dense::new(n, &edges);
        let (b_pairs, interior_total) = d.betweenness();
        let scale = if n > 2 { 2.0 / ((n - 1) * (n - 2)) as f64 } else { 0.0 };
        let expected: Vec<(Metric, Vec<f64>)> = vec![
            (Metric::Degree, (0..n).map(|i| d.degree(i)).collect()),
            (Metric::Clustering, (0..n).map(|i| d.clustering(i)).collect()),
            (Metric::Closeness, (0..n).map(|i| d.closeness(i)).collect()),
            (Metric::Betweenness, b_pairs.iter().map(|b| b * scale).collect()),
            (Metric::Eccentricity, (0..n).map(|i| d.eccentricity(i)).collect()),
            (Metric::Coreness, d.coreness()),
        ];
        for (metric, want) in expected {
            let got = metric.compute(&g).values;
            for i in 0..n {
                let err = (got[i] - want[i]).abs();
                worst = worst.max(err);
                ensure(err <= 1e-9, || {
                    format!("case {case} (n={n}) {metric} at node {i}: got {}, oracle {}", got[i], want[i])
                })?;
            }
        }
        let raw_sum: f64 = betweenness_raw(&g).iter().sum();
        ensure((raw_sum - interior_total).abs() <= 1e-9 * interior_total.max(1.0), || {
            format!("case {case}: Brandes total {raw_sum} vs interior-length total {interior_total}")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?} (budget 30 s)"))?;
    Ok(format!("50 graphs, max error {worst:.1e}, {:.1} s", elapsed.as_secs_f64()))
}

// ---------------------------------------------------------------------------

fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges.iter().copied()).unwrap().0
}

fn transition_exactness() -> Outcome {
    // Node 0 sees node 1 (degree 1) and node 2 (degree 3).
    let g = graph(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]);
    let base = WalkerState::start(&g, 0).unwrap();
    let check = |label: &str, state: &WalkerState, kind: DynamicsKind, want: [f64; 2]| -> Result<(), String> {
        let p = transition_distribution(&g, state, Dynamics::new(kind)).unwrap();
        let err = p.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(err <= 1e-12, || format!("{label}: got {p:?}, want {want:?}"))
    };
    check("RWD", &base, DynamicsKind::Rwd, [0.25, 0.75])?;
    check("RWID", &base, DynamicsKind::Rwid, [0.75, 0.25])?;

    let mut visited = base.clone();
    visited.node_visits[1] = 0;
    visited.node_visits[2] = 1;
    check("TSAW-node", &visited, DynamicsKind::TsawNode, [2.0 / 3.0, 1.0 / 3.0])?;

    let mut walked = base.clone();
    let e02 = g
        .incident_edges(0)
        .iter()
        .zip(g.neighbors(0))
        .find(|(_, &v)| v == 2)
        .map(|(&e, _)| e)
        .unwrap();
    walked.edge_visits[e02] = 2;
    check("TSAW-edge", &walked, DynamicsKind::TsawEdge, [0.8, 0.2])?;
    Ok("RWD, RWID, TSAW-node, TSAW-edge within 1e-12".into())
}

fn collapse_on_ring() -> Outcome {
    let n = 200;
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| [(i, (i + 1) % n), (i, (i + 2) % n)]).collect();
    let g = graph(n, &edges);
    ensure(g.degrees().iter().all(|&k| k == 4), || "ring is not 4-regular".into())?;
    let mut walker = Walker::new(&g, DynamicsKind::TsawEdge.into(), ChaCha8Rng::seed_from_u64(9)).unwrap();
    let mut states = 0;
    for _ in 0..2000 {
        let s = walker.state();
        let rw = transition_distribution(&g, s, DynamicsKind::Rw.into()).unwrap();
        for kind in [DynamicsKind::Rwd, DynamicsKind::Rwid] {
            let p = transition_distribution(&g, s, kind.into()).unwrap();
            ensure(p == rw, || format!("{kind} differs from RW at step {}: {p:?}", s.steps_taken))?;
        }
        for kind in [DynamicsKind::TsawNode, DynamicsKind::TsawEdge] {
            let p = transition_distribution(&g, s, Dynamics::with_lambda(kind, 0.0)).unwrap();
            ensure(p == rw, || format!("{kind} with lambda 0 differs from RW at step {}", s.steps_taken))?;
        }
        states += 1;
        walker.step().unwrap();
    }
    Ok(format!("{states} visited states, bitwise equal"))
}

fn subgraph_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut prefixes = 0;
    for trial in 0..1000 {
        let n = rng.random_range(3..=80);
        let p = rng.random_range(0.02..0.5);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let (g, _) = graph(n, &edges).largest_connected_component();
        if g.edge_count() == 0 {
            continue;
        }
        let kind = DynamicsKind::ALL[rng.random_range(0..DynamicsKind::ALL.len())];
        let lambda = rng.random_range(0.0..2.5);
        let w = rng.random_range(1..=600);
        let mut walker = Walker::new(&g, Dynamics::with_lambda(kind, lambda), ChaCha8Rng::seed_from_u64(trial)).unwrap();
        let mut seq = vec![walker.state().current];
        while seq.len() < w {
            seq.push(walker.step().unwrap());
        }
        let (mut last_k, mut last_m) = (0.0, 0);
        let cuts: Vec<usize> = (1..=w).filter(|&l| l <= 8 || l % 25 == 0 || l == w).collect();
        for &l in &cuts {
            let r = reconstruct(&seq[..l]);
            for &(a, b) in r.graph.edges() {
                let (u, v) = (r.to_original[a], r.to_original[b]);
                ensure(g.has_edge(u, v), || format!("trial {trial}: {kind} prefix {l} invented edge {u}-{v}"))?;
            }
            let k = knowledge_fraction(&r, &g);
            ensure(k >= last_k && r.graph.edge_count() >= last_m, || {
                format!("trial {trial}: {kind} prefix {l} shrank ({last_k} -> {k})")
            })?;
            (last_k, last_m) = (k, r.graph.edge_count());
            prefixes += 1;
        }
    }
    Ok(format!("1000 triples, {prefixes} prefixes, 0 violations"))
}

// ---------------------------------------------------------------------------

fn mean_degree_cp(g: &Graph, reference: Option<Partition>, kinds: &[DynamicsKind], w: usize, tag: u64) -> Vec<f64> {
    let original = Original::new(g, &[Metric::Degree], reference);
    kinds
        .iter()
        .enumerate()
        .map(|(d, &kind)| {
            let spec = SeriesSpec {
                dynamics: kind.into(),
                w_grid: vec![w],
                realizations: 20,
                seed: seed::derive_path(31, &[tag, d as u64]),
                nmi_mode: NmiMode::Restrict,
            };
            let points = recovery_series(&original, &spec).unwrap();
            summarize(&points)[0].pearson.mean.unwrap_or(f64::NAN)
        })
        .collect()
}

fn walk_bias_trends() -> Outcome {
    let start = Instant::now();
    let lfr = GeneratorSpec::new(
        Model::Lfr {
            communities: 5,
            t1: 3.0,
            t2: 0.0,
            mu: 0.05,
        },
        1000,
        4.0,
        101,
    )
    .generate()
    .unwrap()
    .graph
    .largest_connected_component()
    .0;
    let ab = mean_degree_cp(&lfr, None, &[DynamicsKind::Rwd, DynamicsKind::Rwid], 5000, 0);
    let (rwd, rwid) = (ab[0], ab[1]);
    let tsaw = mean_degree_cp(&lfr, None, &[DynamicsKind::TsawEdge], 50000, 1)[0];

    let ba = GeneratorSpec::new(Model::Ba { attachments: None }, 1000, 4.0, 102)
        .generate()
        .unwrap()
        .graph;
    let by_kind = mean_degree_cp(&ba, None, &DynamicsKind::ALL, 2000, 2);
    let lowest = DynamicsKind::ALL
        .iter()
        .zip(&by_kind)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| *k)
        .unwrap();

    let detail = format!(
        "LFR RWD {rwd:.3} vs RWID {rwid:.3} (gap {:.3}); TSAW-edge@50000 {tsaw:.4}; BA lowest {lowest} ({})",
        rwd - rwid,
        by_kind.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join("/"),
    );
    ensure(rwd - rwid >= 0.2, || format!("(a) gap below 0.2: {detail}"))?;
    ensure(tsaw >= 0.98, || format!("(b) TSAW-edge below 0.98: {detail}"))?;
    ensure(lowest == DynamicsKind::Rwid, || format!("(c) RWID not lowest: {detail}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?} (budget 10 min)"))?;
    Ok(format!("{detail}; {:.1} s", elapsed.as_secs_f64()))
}

fn full_recovery_identity() -> Outcome {
    let karate = read_edge_list(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/karate.txt")).unwrap().graph;
    let lfr = GeneratorSpec::new(
        Model::Lfr {
            communities: 5,
            t1: 3.0,
            t2: 0.0,
            mu: 0.2,
        },
        500,
        4.0,
        3,
    )
    .generate()
    .unwrap()
    .graph
    .largest_connected_component()
    .0;
    for (name, g) in [("karate", &karate), ("lfr", &lfr)] {
        let r = ReconstructedGraph::identity(g);
        for metric in Metric::ALL {
            let c = matched_metric_correlation(g, &r, metric);
            ensure(c.pearson == Some(1.0) && c.spearman == Some(1.0), || {
                format!("{name} {metric}: C_p {:?}, C_s {:?}", c.pearson, c.spearman)
            })?;
        }
        let reference = detect_communities(g, 5);
        let recon = detect_communities(&r.graph, 5);
        for mode in [NmiMode::Restrict, NmiMode::UnseenSingletons] {
            let v = community_nmi(&reference, &r, &recon, mode).unwrap();
            ensure(v == 1.0, || format!("{name} NMI ({mode:?}) = {v}"))?;
        }
    }
    Ok("karate and LFR: C_p = C_s = 1 for six metrics, NMI = 1".into())
}

fn unit_oracles() -> Outcome {
    let close = |a: Option<f64>, b: f64| a.is_some_and(|a| (a - b).abs() <= 1e-12);
    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [1.0, 3.0, 2.0, 4.0];
    ensure(close(pearson(&x, &y), 0.8), || format!("pearson {:?}", pearson(&x, &y)))?;
    ensure(close(spearman(&x, &y), 0.8), || format!("spearman {:?}", spearman(&x, &y)))?;
    // Ranks (1.5, 1.5, 3) against (1, 2, 3): 1.5 / sqrt(1.5 * 2).
    let tied = spearman(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
    ensure(close(tied, 1.5 / 3.0f64.sqrt()), || format!("tied spearman {tied:?}"))?;

    let p = Partition::from_labels(&[0, 0, 1, 1]);
    let q = Partition::from_labels(&[0, 1, 0, 1]);
    let cases = [
        ("identical", nmi(&p, &p).unwrap(), 1.0),
        ("crossed halves", nmi(&p, &q).unwrap(), 0.0),
        ("singletons vs block", nmi(&Partition::singletons(4), &Partition::single_block(4)).unwrap(), 0.0),
    ];
    for (name, got, want) in cases {
        ensure((got - want).abs() <= 1e-12, || format!("NMI {name}: {got}"))?;
    }
    Ok("pearson/spearman 0.8, tied spearman, NMI 1/0/0".into())
}

fn determinism_across_jobs() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{
            "topologies": [
                {"generator": {"model": "lfr", "n": 300, "k_avg": 4, "mu": 0.1}},
                {"generator": {"model": "ba", "n": 300, "k_avg": 4}},
                {"generator": {"model": "wax", "n": 300, "k_avg": 4}}
            ],
            "w_grid": [100, 500, 2000],
            "realizations": 3,
            "master_seed": 12345
        }"#,
    )
    .map_err(|e| e.to_string())?;
    let run = |jobs: &str, out: &str| -> Result<Vec<u8>, String> {
        let out_dir = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_netwalk"))
            .args(["experiment", "--config"])
            .arg(&cfg)
            .args(["--jobs", jobs, "--output"])
            .arg(&out_dir)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("experiment --jobs {jobs} exited with {status}"))?;
        fs::read(out_dir.join("records.csv")).map_err(|e| e.to_string())
    };
    let one = run("1", "a")?;
    let many = run("4", "b")?;
    let again = run("7", "c")?;
    ensure(one == many && one == again, || "records.csv differs between --jobs 1, 4, 7".into())?;
    let rows = one.iter().filter(|&&b| b == b'\n').count() - 1;
    ensure(rows == 3 * 5 * 3 * 3 * 6, || format!("unexpected row count {rows}"))?;
    Ok(format!("{rows} rows, identical for --jobs 1, 4, 7"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("metric oracle suite", metric_oracle),
        ("transition exactness", transition_exactness),
        ("collapse properties", collapse_on_ring),
        ("subgraph and monotonicity fuzz", subgraph_fuzz),
        ("walk-bias trends at desk scale", walk_bias_trends),
        ("full-recovery identity", full_recovery_identity),
        ("correlation and NMI unit oracles", unit_oracles),
        ("determinism across worker counts", determinism_across_jobs),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
