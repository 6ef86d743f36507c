//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.
//!
//!     cargo test -p pagerank-lab --test acceptance

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use pagerank_lab::engine::pagerank_observed;
use pagerank_lab::harness::{
    default_damping_grid, default_tolerance_grid, detect_sensitivity, sweep_graph, tolerance_grid,
    SweepPlan, SweepRecord,
};
use pagerank_lab::mtx::load_graph;
use pagerank_lab::stats::{mean_then_ratio, ratio_then_mean, MeanKind, MeasurementMatrix};
use pagerank_lab::{estimate_iterations, pagerank, CsrGraph, NormKind, PageRankConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{circulant, dense_pagerank, fixture, random_digraph, scale_free};

const FIXTURES: [&str; 4] = [
    "two_cycle.mtx",
    "star.mtx",
    "square_sym.mtx",
    "web_small.mtx",
];
const SCALE_FREE_N: usize = 10_000;
const SCALE_FREE_SEED: u64 = 42;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn fixture_graphs() -> Vec<(String, CsrGraph)> {
    FIXTURES
        .iter()
        .map(|f| {
            (
                f.trim_end_matches(".mtx").to_string(),
                load_graph(&fixture(f)).unwrap(),
            )
        })
        .collect()
}

fn sweep(label: &str, g: &CsrGraph, alphas: Vec<f64>, tolerances: Vec<f64>) -> Vec<SweepRecord> {
    let plan = SweepPlan {
        graphs: vec![],
        alphas,
        tolerances,
        norms: NormKind::ALL.to_vec(),
        repeats: 1,
        max_iterations: 500,
    };
    sweep_graph(label, g, &plan, &|_| {}).unwrap()
}

fn c1_estimator() -> Outcome {
    let cases = [
        (0.85, 1e-6, 85),
        (0.95, 1e-6, 269),
        (0.75, 1e-6, 48),
        (0.85, 1e-9, 128),
        (0.85, 1e-3, 43),
    ];
    let start = Instant::now();
    let got: Vec<usize> = cases
        .iter()
        .map(|&(a, t, _)| estimate_iterations(a, t).unwrap())
        .collect();
    let elapsed = start.elapsed();
    for (&(a, t, want), &g) in cases.iter().zip(&got) {
        ensure(g == want, || {
            format!("({a}, {t:e}) -> {g}, expected {want}")
        })?;
    }
    ensure(elapsed.as_secs_f64() < 1e-3, || format!("took {elapsed:?}"))?;
    Ok(format!("{got:?} in {elapsed:?}"))
}

fn c2_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let graphs = 200;
    let mut with_dangling = 0;
    for i in 0..graphs {
        let n = rng.gen_range(1..=50);
        let p = rng.gen_range(0.1..=0.5);
        let force = i % 2 == 0;
        let g = random_digraph(&mut rng, n, p, force);
        if !g.dangling().is_empty() {
            with_dangling += 1;
        }
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let alpha = [0.5, 0.75, 0.85, 0.95, 1.0][i % 5];
        let tolerance = [1e-3, 1e-6, 1e-10][i % 3];
        let norm = NormKind::ALL[i % 3];
        let cfg = PageRankConfig::new(alpha, tolerance, norm);
        let fast = pagerank(&g, &cfg).unwrap();
        let dense = dense_pagerank(n, &edges, alpha, tolerance, norm, cfg.max_iterations);
        ensure(fast.iterations == dense.iterations, || {
            format!(
                "graph {i}: iterations {} vs oracle {}",
                fast.iterations, dense.iterations
            )
        })?;
        ensure(fast.converged == dense.converged, || {
            format!("graph {i}: converged flag differs")
        })?;
        let linf = fast
            .ranks
            .iter()
            .zip(&dense.ranks)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(linf);
        ensure(linf <= 1e-8, || format!("graph {i}: L-inf {linf:e}"))?;
    }
    let elapsed = start.elapsed();
    ensure(with_dangling * 2 >= graphs, || {
        format!("only {with_dangling} graphs had dangling vertices")
    })?;
    ensure(elapsed.as_secs_f64() < 30.0, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{graphs} graphs ({with_dangling} with dangling), worst L-inf {worst:e}, {elapsed:?}"
    ))
}

fn c3_conservation() -> Outcome {
    let mut graphs = fixture_graphs();
    graphs.push((
        "scale_free".into(),
        scale_free(SCALE_FREE_N, SCALE_FREE_SEED),
    ));
    graphs.push(("circulant".into(), circulant(1000, 3)));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..20 {
        graphs.push((
            format!("random{i}"),
            random_digraph(&mut rng, 40, 0.2, i % 2 == 0),
        ));
    }
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    for (label, g) in &graphs {
        for alpha in [0.5, 0.85, 1.0] {
            let cfg = PageRankConfig::new(alpha, 1e-12, NormKind::L1).with_max_iterations(200);
            let mut bad = None;
            pagerank_observed(g, &cfg, |s| {
                let dev = (s.ranks.iter().sum::<f64>() - 1.0).abs();
                worst = worst.max(dev);
                checked += 1;
                if dev > 1e-9 && bad.is_none() {
                    bad = Some((s.iteration, dev));
                }
            })
            .unwrap();
            if let Some((it, dev)) = bad {
                return Err(format!(
                    "{label} alpha {alpha}: iteration {it} off by {dev:e}"
                ));
            }
        }
    }
    Ok(format!(
        "{checked} iterations on {} graphs, worst |sum-1| {worst:e}",
        graphs.len()
    ))
}

fn norm_ordering(records: &[SweepRecord]) -> Result<usize, String> {
    let mut cells = 0;
    for r in records.iter().filter(|r| r.norm == NormKind::L1) {
        let find = |norm| {
            records
                .iter()
                .find(|o| {
                    o.graph == r.graph
                        && o.alpha == r.alpha
                        && o.tolerance == r.tolerance
                        && o.norm == norm
                })
                .unwrap()
                .iterations
        };
        let (l1, l2, linf) = (r.iterations, find(NormKind::L2), find(NormKind::LInf));
        ensure(linf <= l2 && l2 <= l1, || {
            format!(
                "{} alpha {} tol {:e}: linf {linf}, l2 {l2}, l1 {l1}",
                r.graph, r.alpha, r.tolerance
            )
        })?;
        cells += 1;
    }
    Ok(cells)
}

fn c4_norm_ordering() -> Outcome {
    let mut records = Vec::new();
    for (label, g) in fixture_graphs() {
        records.extend(sweep(&label, &g, default_damping_grid(), vec![1e-6]));
        records.extend(sweep(&label, &g, vec![0.85], default_tolerance_grid()));
    }
    let g = scale_free(SCALE_FREE_N, SCALE_FREE_SEED);
    records.extend(sweep(
        "scale_free",
        &g,
        vec![0.85],
        default_tolerance_grid(),
    ));
    records.extend(sweep("scale_free", &g, vec![0.75, 0.95], vec![1e-6]));
    let cells = norm_ordering(&records)?;
    Ok(format!("{cells} (graph, alpha, tolerance) cells"))
}

fn c5_gm_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_identity: f64 = 0.0;
    let mut worst_invariance: f64 = 0.0;
    for trial in 0..1000 {
        let a = rng.gen_range(1..=10);
        let c = rng.gen_range(1..=20);
        let values: Vec<Vec<f64>> = (0..a)
            .map(|_| {
                (0..c)
                    .map(|_| 10f64.powf(rng.gen_range(-3.0..=6.0)))
                    .collect()
            })
            .collect();
        let m = MeasurementMatrix::new(
            (0..a).map(|i| format!("a{i}")).collect(),
            (0..c).map(|j| format!("c{j}")).collect(),
            values,
        )
        .unwrap();
        for base in m.approaches() {
            let r = ratio_then_mean(&m, base, MeanKind::Geometric).unwrap();
            let s = mean_then_ratio(&m, base, MeanKind::Geometric).unwrap();
            for (x, y) in r.ratios.iter().zip(&s.ratios) {
                worst_identity = worst_identity.max((x - y).abs() / x.abs().max(y.abs()));
                ensure(rel_close(*x, *y, 1e-12), || {
                    format!("trial {trial}: {x} vs {y}")
                })?;
            }
        }
        for kind in [
            MeanKind::Arithmetic,
            MeanKind::Geometric,
            MeanKind::Harmonic,
        ] {
            let tables: Vec<_> = m
                .approaches()
                .iter()
                .map(|b| mean_then_ratio(&m, b, kind).unwrap())
                .collect();
            for p in &tables {
                for q in &tables {
                    for i in 0..a {
                        for j in 0..a {
                            let x = p.ratios[i] / p.ratios[j];
                            let y = q.ratios[i] / q.ratios[j];
                            worst_invariance =
                                worst_invariance.max((x - y).abs() / x.abs().max(y.abs()));
                            ensure(rel_close(x, y, 1e-12), || {
                                format!("trial {trial} {kind:?}: pair ratio {x} vs {y}")
                            })?;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "1000 matrices; worst GM identity rel {worst_identity:e}, worst baseline invariance rel {worst_invariance:e}"
    ))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pagerank-lab"))
}

fn ratio_row(stdout: &str, method: &str) -> Vec<f64> {
    let line = stdout
        .lines()
        .find(|l| l.split_whitespace().next() == Some(method))
        .unwrap_or_else(|| panic!("no {method} row in\n{stdout}"));
    let fields: Vec<&str> = line.split_whitespace().collect();
    fields[fields.len() - 3..]
        .iter()
        .map(|f| f.parse().unwrap())
        .collect()
}

fn c6_table_cells() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("gm_means.csv");
    std::fs::write(
        &input,
        "graph,alpha,tolerance,norm,iterations\n\
         gm-of-17-graphs,0.85,1e-6,l1,56.91\n\
         gm-of-17-graphs,0.85,1e-6,l2,27.50\n\
         gm-of-17-graphs,0.85,1e-6,linf,10.21\n",
    )
    .unwrap();
    let mut shown = Vec::new();
    for (baseline, want) in [
        ("l1", ["1.00", "0.48", "0.18"]),
        ("linf", ["5.57", "2.69", "1.00"]),
    ] {
        let out = bin()
            .args(["ratios", "--input"])
            .arg(&input)
            .args([
                "--metric",
                "iterations",
                "--method",
                "gm-ratio",
                "--baseline",
                baseline,
            ])
            .output()
            .unwrap();
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        let stdout = String::from_utf8(out.stdout).unwrap();
        let got: Vec<String> = ratio_row(&stdout, "gm-ratio")
            .iter()
            .map(|r| format!("{r:.2}"))
            .collect();
        ensure(got == want, || {
            format!("baseline {baseline}: {got:?}, expected {want:?}")
        })?;
        shown.push(format!("{baseline}: {}", got.join("/")));
    }
    Ok(shown.join("; "))
}

fn c7_single_iteration() -> Outcome {
    let g = circulant(100_000, 3);
    ensure(g.dangling().is_empty(), || {
        "circulant has dangling vertices".into()
    })?;
    let grid = default_tolerance_grid();
    for &t in &grid {
        for norm in NormKind::ALL {
            let r = pagerank(&g, &PageRankConfig::new(0.85, t, norm)).unwrap();
            ensure(r.iterations == 1 && r.converged, || {
                format!(
                    "{norm} tol {t:e}: {} iterations, error {:e}",
                    r.iterations, r.error
                )
            })?;
        }
    }
    Ok(format!(
        "N=100000, {} tolerances x 3 norms all in 1 iteration",
        grid.len()
    ))
}

fn c8_sensitivity() -> Outcome {
    let g = scale_free(SCALE_FREE_N, SCALE_FREE_SEED);
    let grid = tolerance_grid(16);
    let records = sweep("scale_free", &g, vec![0.85], grid.clone());
    let report = detect_sensitivity(&records).map_err(|e| e.to_string())?;

    // flagged cells are exactly the non-converged ones
    for e in &report.entries {
        ensure(e.closure_violations.is_empty(), || {
            format!(
                "{}: converged again below a failing tolerance: {:?}",
                e.norm, e.closure_violations
            )
        })?;
        for r in records.iter().filter(|r| r.norm == e.norm) {
            let flagged = e.first_failing_tolerance.is_some_and(|f| r.tolerance <= f);
            ensure(flagged == !r.converged, || {
                format!(
                    "{} tol {:e}: flagged {flagged}, converged {}",
                    e.norm, r.tolerance, r.converged
                )
            })?;
        }
    }

    let first = |norm| {
        report
            .entry("scale_free", norm)
            .unwrap()
            .first_failing_tolerance
    };
    let (l1, l2, linf) = (
        first(NormKind::L1),
        first(NormKind::L2),
        first(NormKind::LInf),
    );
    let floor = {
        let mut last = Vec::new();
        pagerank_observed(&g, &PageRankConfig::new(0.85, 1e-300, NormKind::L1), |s| {
            last.push(s.error)
        })
        .unwrap();
        last[last.len() - 50..]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };
    let summary =
        format!("first failing: l1 {l1:?}, l2 {l2:?}, linf {linf:?}; L1 error floor {floor:e}");
    let Some(l1) = l1 else {
        return Err(format!(
            "L1 never failed to converge down to 1e-16 ({summary})"
        ));
    };
    for other in [l2, linf].into_iter().flatten() {
        ensure(l1 >= other, || {
            format!("L1 fails later than another norm ({summary})")
        })?;
    }
    Ok(summary)
}

fn c9_damping_trend() -> Outcome {
    let g = scale_free(SCALE_FREE_N, SCALE_FREE_SEED);
    let it = |alpha| {
        pagerank(&g, &PageRankConfig::new(alpha, 1e-6, NormKind::L1))
            .unwrap()
            .iterations as f64
    };
    let (low, mid, high) = (it(0.75), it(0.85), it(0.95));
    let up = high / mid;
    let down = low / mid;
    ensure((2.0..=4.0).contains(&up), || {
        format!("0.95/0.85 = {high}/{mid} = {up:.3}")
    })?;
    ensure((0.4..=0.8).contains(&down), || {
        format!("0.75/0.85 = {low}/{mid} = {down:.3}")
    })?;
    Ok(format!(
        "iterations {low}/{mid}/{high}; ratios {up:.3} and {down:.3}"
    ))
}

fn strip_time(csv: &str) -> String {
    let col = csv
        .lines()
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == "time_ms")
        .unwrap();
    csv.lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| *i != col)
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let graphs: Vec<String> = FIXTURES
        .iter()
        .map(|f| fixture(f).display().to_string())
        .collect();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let csv = dir.path().join(format!("run{run}.csv"));
        let out = bin()
            .args([
                "sweep-tolerance",
                "--repeat",
                "1",
                "--graphs",
                &graphs.join(","),
                "--csv",
            ])
            .arg(&csv)
            .output()
            .unwrap();
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        outputs.push(std::fs::read_to_string(&csv).unwrap());
    }
    let rows = outputs[0].lines().count() - 1;
    ensure(rows == FIXTURES.len() * 63, || format!("{rows} rows"))?;
    ensure(strip_time(&outputs[0]) == strip_time(&outputs[1]), || {
        "CSVs differ outside time_ms".into()
    })?;
    Ok(format!("{rows} rows identical apart from time_ms"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 estimator exactness", c1_estimator),
        ("2 oracle equivalence", c2_oracle),
        ("3 rank conservation", c3_conservation),
        ("4 norm-speed ordering", c4_norm_ordering),
        ("5 GM identity and baseline invariance", c5_gm_identity),
        ("6 GM-RATIO table cells", c6_table_cells),
        ("7 single-iteration convergence", c7_single_iteration),
        ("8 sensitivity detection", c8_sensitivity),
        ("9 damping trend", c9_damping_trend),
        ("10 end-to-end determinism", c10_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
