//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Pass criterion numbers as arguments to run a subset.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{
    all_paths_minimax, brute_force_mst_weight, flood_fill_labels, lattice_bfs, partition_of, random_graph, rng,
};
use mstlab::experiments::{find, run_arm_decay, run_clt, run_stein_bound, run_variance_scaling};
use mstlab::{ExperimentConfig, Row};
use mstperc::dynamics::{edge_removal_delta, insert_vertex_add_delete};
use mstperc::geometry::{dist, sample_poisson, Configuration, Cube, Point};
use mstperc::mst::{euclidean_mst, kruskal_mst, Edge, LatticeBox, Strategy, WeightLaw, WeightedGraph};
use mstperc::percolation::{continuum_clusters, has_wall, lattice_clusters, LatticeCube, LatticeRegion, Region};
use mstperc::stein::{stein_bound, LatticeMstModel};
use mstperc::Error;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed.as_secs_f64() < limit_s as f64
}

fn config(json: &str) -> ExperimentConfig {
    let c = ExperimentConfig::from_json(json).expect("acceptance config parses");
    c.validate(false).expect("acceptance config is within desk limits");
    c
}

fn row<'a>(rows: &'a [Row], n: Option<usize>, param: Option<f64>, stat: &str) -> &'a Row {
    find(rows, n, param, stat).unwrap_or_else(|| panic!("missing {stat} row at n={n:?}"))
}

fn kruskal_vs_enumeration() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1001);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = r.random_range(1..=9);
        let extra = r.random_range(0..=10);
        let g = random_graph(&mut r, n, extra, case % 3 == 0);
        let fast = kruskal_mst(&g).total_weight();
        let slow = brute_force_mst_weight(&g);
        worst = worst.max((fast - slow).abs() / slow.abs().max(f64::MIN_POSITIVE));
    }
    let t = start.elapsed();
    outcome(worst <= 1e-12 && within(t, 10), format!("200 graphs, max rel err {worst:.1e}, {:.2} s", t.as_secs_f64()))
}

fn knn_vs_complete() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1002);
    let (mut done, mut mismatches, mut largest) = (0, 0, 0);
    while done < 100 {
        let d = if done % 2 == 0 { 2 } else { 3 };
        let dom = Cube::centered(d, r.random_range(1.0..3.0)).unwrap();
        let target = r.random_range(50.0..380.0);
        let c = sample_poisson::<f64>(&dom, target / dom.volume(), r.random()).unwrap();
        if c.len() > 400 {
            continue;
        }
        done += 1;
        largest = largest.max(c.len());
        let a = euclidean_mst(&c, Strategy::default_for(d)).unwrap();
        let b = euclidean_mst(&c, Strategy::Complete).unwrap();
        mismatches += (a.edge_keys() != b.edge_keys()) as usize;
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && within(t, 60),
        format!("100 configurations (up to {largest} points), {mismatches} mismatches, {:.2} s", t.as_secs_f64()),
    )
}

fn minimax_exhaustive() -> Outcome {
    let mut r = rng(1003);
    let (mut pairs, mut violations) = (0, 0);
    for case in 0..50 {
        let n = r.random_range(2..=10);
        let extra = r.random_range(0..=12);
        let g = random_graph(&mut r, n, extra, case % 2 == 0);
        let t = kruskal_mst(&g);
        for u in 0..n {
            for v in u + 1..n {
                pairs += 1;
                violations += (t.minimax_value(u, v).unwrap() != all_paths_minimax(&g, u, v)) as usize;
            }
        }
    }
    outcome(violations == 0, format!("50 graphs, {pairs} pairs, {violations} violations"))
}

/// Copy of `g` with weights rounded to multiples of 1/64, so every sum of
/// weights is exact in binary floating point.
fn dyadic(g: &WeightedGraph<f64>) -> WeightedGraph<f64> {
    let edges = g.edges().iter().map(|e| Edge::new(e.u, e.v, ((e.w * 64.0).round() + 1.0) / 64.0));
    WeightedGraph::from_edges(g.vertex_count(), edges).unwrap()
}

fn add_and_delete() -> Outcome {
    let mut r = rng(1004);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(1..=60);
        let pts: Vec<Point<f64>> = (0..n)
            .map(|_| Point::from_f64(&[r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)]))
            .collect();
        let c = Configuration::new(Cube::centered(2, 5.0).unwrap(), &pts).unwrap();
        let base = euclidean_mst(&c, Strategy::Complete).unwrap();
        let v = Point::from_f64(&[r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)]);
        let all: Vec<usize> = (0..n).collect();
        let (tree, _) = insert_vertex_add_delete(&base, &c, &v, &all).unwrap();
        let mut with_v = c.clone();
        with_v.push(&v.coords).unwrap();
        let want = euclidean_mst(&with_v, Strategy::Complete).unwrap().total_weight();
        worst = worst.max((tree.total_weight() - want).abs() / want);
    }
    let (mut checked, mut bridges, mut violations) = (0, 0, 0);
    for case in 0..100 {
        let n = r.random_range(2..=12);
        let extra = r.random_range(0..=12);
        let g = dyadic(&random_graph(&mut r, n, extra, case % 2 == 0));
        let m = kruskal_mst(&g).total_weight();
        for i in 0..g.edges().len() {
            let rest = g.without_edge(i);
            match edge_removal_delta(&g, i) {
                Ok((_, y)) => {
                    checked += 1;
                    let w = g.edge(i).w;
                    violations += (m != kruskal_mst(&rest).total_weight() + w - w.max(y)) as usize;
                }
                Err(Error::Bridge(..)) => {
                    bridges += 1;
                    violations += rest.is_connected() as usize;
                }
                Err(_) => violations += 1,
            }
        }
    }
    outcome(
        worst <= 1e-12 && violations == 0,
        format!(
            "200 insertions, max rel err {worst:.1e}; {checked} non-bridge edges ({bridges} bridges), {violations} violations"
        ),
    )
}

fn continuum_raster_disagreements() -> usize {
    let mut r = rng(1005);
    let (mut cases, mut bad) = (0, 0);
    while cases < 100 {
        let pts: Vec<Point<f64>> = (0..30)
            .map(|_| Point::from_f64(&[r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)]))
            .collect();
        let c = Configuration::new(Cube::centered(2, 3.0).unwrap(), &pts).unwrap();
        let radius = r.random_range(0.3..0.8);
        let step = radius / 50.0;
        // pixels cannot resolve near-tangent disks; redraw those instances
        let ambiguous =
            (0..30).any(|i| (i + 1..30).any(|j| (dist(c.point(i), c.point(j)) - 2.0 * radius).abs() < 3.0 * step));
        if ambiguous {
            continue;
        }
        cases += 1;
        let ids: Vec<usize> = (0..30).collect();
        let labels = continuum_clusters(&c, &Region::all(), radius).unwrap();
        bad += (labels.partition() != partition_of(&ids, &flood_fill_labels(&c, &ids, radius, step))) as usize;
    }
    bad
}

fn lattice_bfs_disagreements() -> usize {
    let mut r = rng(1006);
    let mut bad = 0;
    for case in 0..1000u64 {
        let b = LatticeBox::<f64>::build(3, 2, WeightLaw::Uniform01, 50_000 + case).unwrap();
        let p: f64 = r.random_range(0.0..1.0);
        let labels;
        let want;
        match case % 3 {
            0 => {
                labels = lattice_clusters(&b, p, &LatticeRegion::full()).unwrap();
                let (items, l) = lattice_bfs(&b, p, |_| true, |_, _| true);
                want = partition_of(&items, &l);
            }
            1 => {
                let e = r.random_range(0..b.edge_count());
                let key = b.graph().edge(e).key();
                labels = lattice_clusters(&b, p, &LatticeRegion::full().minus_edge(e)).unwrap();
                let (items, l) = lattice_bfs(&b, p, |_| true, |x, y| {
                    let (u, v) = (b.vertex_at(x).unwrap(), b.vertex_at(y).unwrap());
                    (u.min(v), u.max(v)) != key
                });
                want = partition_of(&items, &l);
            }
            _ => {
                let q = LatticeCube::new(vec![r.random_range(-2..=2), r.random_range(-2..=2)], r.random_range(1..=2)).unwrap();
                labels = lattice_clusters(&b, p, &LatticeRegion::full().in_box(q.clone())).unwrap();
                let (items, l) = lattice_bfs(&b, p, |x| q.contains(x), |_, _| true);
                want = partition_of(&items, &l);
            }
        }
        bad += (labels.partition() != want) as usize;
    }
    bad
}

fn labeling_oracles() -> Outcome {
    let continuum = continuum_raster_disagreements();
    let lattice = lattice_bfs_disagreements();
    outcome(
        continuum == 0 && lattice == 0,
        format!("continuum vs flood fill: {continuum}/100 disagree; lattice vs BFS: {lattice}/1000 disagree"),
    )
}

fn wall_properties() -> Outcome {
    let start = Instant::now();
    let k = Cube::centered(2, 10.0).unwrap();
    let x = Point::origin(2);
    let a = 1.0;
    let bs = [4.0, 6.0, 8.0];
    let reps = 2000;
    let inner = Cube::new(x.clone(), a).unwrap();
    let mut failures = vec![vec![0.0; reps]; bs.len()];
    let (mut walls, mut violations) = (0, 0);
    for rep in 0..reps {
        let c = sample_poisson::<f64>(&k, 1.0, 70_000 + rep as u64).unwrap();
        let mut tree = None;
        for (i, &b) in bs.iter().enumerate() {
            let status = has_wall(&c, &x, a, b, &k, 0.1).unwrap();
            failures[i][rep] = if status.is_wall() { 0.0 } else { 1.0 };
            if b == 6.0 && status.is_wall() {
                walls += 1;
                let t = tree.get_or_insert_with(|| euclidean_mst(&c, Strategy::default_for(2)).unwrap());
                let outer = Cube::new(x.clone(), b).unwrap();
                for e in t.edges() {
                    for (p, q) in [(e.u, e.v), (e.v, e.u)] {
                        violations += (inner.contains(c.point(p)) && !outer.contains(c.point(q))) as usize;
                    }
                }
            }
        }
    }
    let freq: Vec<f64> = failures.iter().map(|f| f.iter().sum::<f64>() / reps as f64).collect();
    // the three sizes share configurations, so compare paired differences
    let mut decreasing = true;
    let mut gaps = Vec::new();
    for i in 0..bs.len() - 1 {
        let d: Vec<f64> = failures[i].iter().zip(&failures[i + 1]).map(|(u, v)| u - v).collect();
        let m = d.iter().sum::<f64>() / reps as f64;
        let var = d.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        decreasing &= m > 2.0 * se;
        gaps.push(format!("{m:.4} (se {se:.4})"));
    }
    outcome(
        violations == 0 && walls > 0 && decreasing,
        format!(
            "{walls}/{reps} walls at b=6 with {violations} violations; failure freq b=4,6,8: {:.4}, {:.4}, {:.4}; drops {}; {:.1} s",
            freq[0],
            freq[1],
            freq[2],
            gaps.join(", "),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn stein_identity() -> Outcome {
    let start = Instant::now();
    let model = LatticeMstModel::new(1, 2, WeightLaw::Uniform01).unwrap();
    let e = stein_bound(&model, 500, 1, 1007).unwrap();
    let se = e.se_t_mean.hypot(e.se_sigma2_hat);
    let t = start.elapsed();
    outcome(
        e.exact_t && (e.t_mean - e.sigma2_hat).abs() <= 3.0 * se && within(t, 300),
        format!(
            "mean T {:.5}, sample variance {:.5}, combined se {:.5}, exact T over 12 edges, {:.2} s",
            e.t_mean,
            e.sigma2_hat,
            se,
            t.as_secs_f64()
        ),
    )
}

fn metric_relation_holds(rows: &[Row], n: usize) -> bool {
    let d = row(rows, Some(n), None, "kolmogorov").value;
    let w = row(rows, Some(n), None, "wasserstein").value;
    let reps = row(rows, Some(n), None, "kolmogorov").replicates;
    d <= 2.0 * w.sqrt() + mstperc::stein::dkw_slack(reps)
}

fn bound_validity() -> Outcome {
    let c = config(r#"{"kind":"stein_bound","model":"lattice","sizes":[3,5],"replicates":1000,"inner_reps":20,"seed":1008}"#);
    let rows = run_stein_bound(&c).unwrap();
    let clt = run_clt(
        &config(r#"{"kind":"clt_lattice","sizes":[3,5],"replicates":4000,"seed":1108}"#),
        None,
    )
    .unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [3, 5] {
        let bound = row(&rows, Some(n), None, "bound_value").value;
        let w = row(&rows, Some(n), None, "wasserstein");
        let ok = bound >= w.value - 3.0 * w.stderr;
        let rel = metric_relation_holds(&rows, n) && metric_relation_holds(&clt, n);
        pass &= ok && rel;
        parts.push(format!("n={n}: bound {bound:.4} vs W {:.4} (se {:.4}), D <= 2 sqrt W + slack: {rel}", w.value, w.stderr));
    }
    outcome(pass, parts.join("; "))
}

fn clt_trend() -> Outcome {
    let start = Instant::now();
    let rows = run_clt(&config(r#"{"kind":"clt_lattice","sizes":[4,16],"replicates":4000,"seed":1009}"#), None).unwrap();
    let d4 = row(&rows, Some(4), None, "kolmogorov");
    let d16 = row(&rows, Some(16), None, "kolmogorov");
    let se = d4.stderr.hypot(d16.stderr);
    let t = start.elapsed();
    let relation = metric_relation_holds(&rows, 4) && metric_relation_holds(&rows, 16);
    outcome(
        d4.value - d16.value > 2.0 * se && within(t, 900) && relation,
        format!(
            "D(n=4) {:.5}, D(n=16) {:.5}, difference {:.5} vs 2 combined se {:.5}; {:.1} s",
            d4.value,
            d16.value,
            d4.value - d16.value,
            2.0 * se,
            t.as_secs_f64()
        ),
    )
}

fn variance_scaling() -> Outcome {
    let c = config(r#"{"kind":"variance_scaling","model":"lattice","sizes":[4,8,16],"replicates":4000,"seed":1010}"#);
    let rows = run_variance_scaling(&c, None).unwrap();
    let v: Vec<f64> = [4, 8, 16].iter().map(|&n| row(&rows, Some(n), None, "normalized_variance").value).collect();
    let ratio = v.iter().cloned().fold(f64::MIN, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min);
    outcome(ratio < 2.0, format!("Var/|V| at n=4,8,16: {:.5}, {:.5}, {:.5}; max/min {ratio:.3}", v[0], v[1], v[2]))
}

fn decay(rows: &[Row], param: f64) -> (bool, String) {
    let p: Vec<&Row> = [8, 16, 32].iter().map(|&n| row(rows, Some(n), Some(param), "phat")).collect();
    let strictly = p.windows(2).all(|w| w[0].value - w[1].value > 2.0 * w[0].stderr.hypot(w[1].stderr));
    let beta = row(rows, None, Some(param), "beta_hat");
    (
        strictly && beta.value > 0.0,
        format!(
            "p at n=8,16,32: {:.4}, {:.4}, {:.4}; beta {:.3} (se {:.3})",
            p[0].value, p[1].value, p[2].value, beta.value, beta.stderr
        ),
    )
}

fn two_arm_decay() -> Outcome {
    let lattice = run_arm_decay(&config(
        r#"{"kind":"arm_decay","sizes":[8,16,32],"replicates":10000,"seed":1011,"params":[0.5],
            "arm":{"model":"lattice","dim":2,"site":"edge"}}"#,
    ))
    .unwrap();
    let continuum = run_arm_decay(&config(
        r#"{"kind":"arm_decay","sizes":[8,16,32],"replicates":10000,"seed":1111,"params":[0.55],
            "arm":{"model":"continuum","dim":2,"intensity":1.0,"inner_half_width":1.0,"k":2,"variant":"reach"}}"#,
    ))
    .unwrap();
    let (a, da) = decay(&lattice, 0.5);
    let (b, db) = decay(&continuum, 0.55);
    outcome(a && b, format!("lattice p=0.5: {da}; continuum r=0.55: {db}"))
}

const DETERMINISM_CONFIGS: [(&str, &str); 8] = [
    ("clt", r#"{"kind":"clt_poisson","sizes":[3,5],"replicates":300,"seed":7,"bootstrap_reps":50}"#),
    ("clt", r#"{"kind":"clt_lattice","sizes":[2,4],"replicates":300,"seed":7,"bootstrap_reps":50}"#),
    (
        "arm-decay",
        r#"{"kind":"arm_decay","sizes":[4,8],"replicates":300,"seed":7,"params":[0.4,0.5],
            "arm":{"model":"lattice","dim":2,"site":"cube"}}"#,
    ),
    (
        "arm-decay",
        r#"{"kind":"arm_decay","sizes":[4,6],"replicates":200,"seed":7,"params":[0.6],
            "arm":{"model":"continuum","dim":2,"intensity":1.0,"inner_half_width":1.0,"k":1,"variant":"touch"}}"#,
    ),
    ("var-scaling", r#"{"kind":"variance_scaling","model":"poisson","sizes":[3,4],"replicates":200,"seed":7}"#),
    ("var-scaling", r#"{"kind":"variance_scaling","model":"lattice","sizes":[3,4],"replicates":200,"seed":7}"#),
    (
        "stein-bound",
        r#"{"kind":"stein_bound","model":"lattice","sizes":[1,2],"replicates":100,"inner_reps":4,"seed":7,"bootstrap_reps":20}"#,
    ),
    (
        "stein-bound",
        r#"{"kind":"stein_bound","model":"poisson","sizes":[2,3],"replicates":60,"inner_reps":4,"seed":7,"bootstrap_reps":20}"#,
    ),
];

fn run_cli(dir: &Path, sub: &str, cfg: &Path, threads: usize) -> Option<Vec<u8>> {
    let out = dir.join(format!("t{threads}"));
    let status = Command::new(env!("CARGO_BIN_EXE_mstlab"))
        .arg(sub)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(&out)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .ok()?;
    if !status.status.success() {
        return None;
    }
    let csv = std::fs::read_dir(&out).ok()?.flatten().find(|e| e.path().extension().is_some_and(|x| x == "csv"))?;
    std::fs::read(csv.path()).ok()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for (i, (sub, json)) in DETERMINISM_CONFIGS.iter().enumerate() {
        let case = dir.path().join(format!("case{i}"));
        std::fs::create_dir_all(&case).unwrap();
        let cfg = case.join("config.json");
        std::fs::write(&cfg, json).unwrap();
        let runs: Vec<Option<Vec<u8>>> = [1, 4, 1].iter().map(|&t| {
            let run_dir = case.join(format!("run{}", t));
            std::fs::create_dir_all(&run_dir).unwrap();
            let bytes = run_cli(&run_dir, sub, &cfg, t);
            std::fs::remove_dir_all(&run_dir).unwrap();
            bytes
        }).collect();
        let same = runs[0].is_some() && runs.iter().all(|r| r == &runs[0]);
        if !same {
            differing.push(i);
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} configs across every experiment kind, threads 1/4/1: differing {:?}",
            DETERMINISM_CONFIGS.len(),
            differing
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 12] = [
    (1, "kruskal equals exhaustive enumeration", kruskal_vs_enumeration),
    (2, "knn-pruned MST equals complete-graph MST", knn_vs_complete),
    (3, "tree paths are minimax", minimax_exhaustive),
    (4, "add-and-delete and edge removal", add_and_delete),
    (5, "cluster labels match oracles", labeling_oracles),
    (6, "wall soundness and tail trend", wall_properties),
    (7, "mean of T equals the variance", stein_identity),
    (8, "stein bound validity", bound_validity),
    (9, "kolmogorov distance falls with n", clt_trend),
    (10, "variance grows like the box volume", variance_scaling),
    (11, "two-arm probabilities decay", two_arm_decay),
    (12, "byte-identical reruns", determinism),
];

fn main() {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, check) in CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("[{id:02}] {verdict} {name}: {} [{:.1} s]", result.detail, start.elapsed().as_secs_f64());
        failed += (!result.pass) as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
