//! Acceptance checks. Each criterion prints one PASS/FAIL line with its
//! timing; the process exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use ndarray::Array1;
use rand::Rng;

use common::*;
use embedtopo::corpus::PointCloud;
use embedtopo::correlation::{self, AlphaSearch, HausdorffMode, Ridge};
use embedtopo::diagram::{bottleneck_distance, Bottleneck, DimDiagram};
use embedtopo::matrices::{self, DistanceMatrix};
use embedtopo::textdist::levenshtein_words;
use embedtopo::topology::{rips_diagram, rips_h0, rips_h1};
use embedtopo::vecdist::{cosine_bounds, cosine_similarity};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn levenshtein_oracle() -> Outcome {
    let words = ["a", "b", "c"];
    let lists = all_lists(3, 6);
    let graph = EditGraph::new(&lists, 3, 6);
    let tokens: Vec<Vec<&str>> = lists
        .iter()
        .map(|l| l.iter().map(|&s| words[s as usize]).collect())
        .collect();
    let mut checked = 0usize;
    for (i, x) in tokens.iter().enumerate() {
        let bfs = graph.distances_from(i);
        for (j, y) in tokens.iter().enumerate() {
            let got = levenshtein_words(x, y);
            if got != bfs[j] {
                return Err(format!("{x:?} vs {y:?}: library {got}, search {}", bfs[j]));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} ordered pairs agree exactly"))
}

fn h0_is_mst() -> Outcome {
    let mut rng = rng(11);
    let mut worst = 0.0_f64;
    for trial in 0..200 {
        let n = rng.random_range(1..=50);
        let dim = rng.random_range(1..=8);
        let points = uniform_matrix(&mut rng, n, dim, -1.0, 1.0);
        let diagram = rips_h0(&PointCloud::new(trial, points.clone()));
        let infinite = diagram.points.iter().filter(|p| p.is_infinite()).count();
        if infinite != 1 {
            return Err(format!("cloud {trial}: {infinite} essential classes"));
        }
        let deaths = sorted(
            diagram
                .points
                .iter()
                .filter(|p| !p.is_infinite())
                .map(|p| p.death)
                .collect(),
        );
        let mst = sorted(mst_weights(&distance_table(&points)));
        if deaths.len() != mst.len() {
            return Err(format!(
                "cloud {trial}: {} finite points, MST has {} edges",
                deaths.len(),
                mst.len()
            ));
        }
        for (a, b) in deaths.iter().zip(&mst) {
            worst = worst.max((a - b).abs());
        }
    }
    if worst <= 1e-12 {
        Ok(format!("200 clouds, max |death - MST weight| = {worst:e}"))
    } else {
        Err(format!("max deviation {worst:e} exceeds 1e-12"))
    }
}

fn h1_oracle() -> Outcome {
    let mut rng = rng(12);
    let mut total = 0;
    for trial in 0..100 {
        let n = if trial < 5 { trial + 1 } else { rng.random_range(6..=12) };
        let dim = rng.random_range(2..=3);
        // every fourth cloud sits on a coarse lattice to force tied distances
        let points = if trial % 4 == 0 {
            uniform_matrix(&mut rng, n, dim, 0.0, 4.0).mapv(f64::floor)
        } else {
            uniform_matrix(&mut rng, n, dim, -1.0, 1.0)
        };
        let got = sorted_pairs(
            rips_h1(&PointCloud::new(trial, points.clone()))
                .points
                .iter()
                .map(|p| (p.birth, p.death))
                .collect(),
        );
        let want = sorted_pairs(brute_h1(&distance_table(&points)));
        if got != want {
            return Err(format!(
                "cloud {trial} (n={n}, dim={dim}): library {got:?}, reduction {want:?}"
            ));
        }
        total += want.len();
    }
    Ok(format!("100 clouds, {total} H1 points identical"))
}

fn random_diagram(rng: &mut impl Rng, coarse: bool) -> Vec<(f64, f64)> {
    let len = rng.random_range(0..=5);
    (0..len)
        .map(|_| {
            if coarse {
                let b = rng.random_range(0..4) as f64 * 0.25;
                (b, b + rng.random_range(1..5) as f64 * 0.25)
            } else {
                let b: f64 = rng.random_range(0.0..1.0);
                (b, b + rng.random_range(0.0..1.0))
            }
        })
        .collect()
}

fn bottleneck_oracle() -> Outcome {
    let mut rng = rng(13);
    let mut worst = 0.0_f64;
    for trial in 0..500 {
        let coarse = trial % 5 == 0;
        let p = random_diagram(&mut rng, coarse);
        let q = random_diagram(&mut rng, coarse);
        let got = match bottleneck_distance(&DimDiagram::new(1, p.clone()), &DimDiagram::new(1, q.clone())) {
            Ok(Bottleneck::Finite(v)) => v,
            other => return Err(format!("pair {trial}: unexpected {other:?}")),
        };
        let want = brute_bottleneck(&p, &q);
        let err = (got - want).abs();
        if err > 1e-9 {
            return Err(format!(
                "pair {trial}: library {got}, exhaustive {want} for {p:?} / {q:?}"
            ));
        }
        worst = worst.max(err);
    }
    Ok(format!("500 pairs, max error {worst:e}"))
}

fn stability() -> Outcome {
    let mut rng = rng(14);
    let mut violations = Vec::new();
    let mut max_ratio = 0.0_f64;
    for trial in 0..100 {
        let delta = if trial % 2 == 0 { 1e-3 } else { 1e-2 };
        let n = rng.random_range(3..=30);
        let dim = rng.random_range(2..=5);
        let points = uniform_matrix(&mut rng, n, dim, -1.0, 1.0);
        let mut moved = points.clone();
        for mut row in moved.rows_mut() {
            let dir = gaussian_matrix(&mut rng, 1, dim).row(0).to_owned();
            let norm = dir.dot(&dir).sqrt();
            let len = rng.random_range(0.0..=delta);
            row.zip_mut_with(&dir, |x, d| *x += d / norm * len);
        }
        let before = rips_diagram(&PointCloud::new(0, points), 1).map_err(|e| e.to_string())?;
        let after = rips_diagram(&PointCloud::new(0, moved), 1).map_err(|e| e.to_string())?;
        for dim in 0..=1 {
            let a = DimDiagram::from_diagram(&before, dim).map_err(|e| e.to_string())?;
            let b = DimDiagram::from_diagram(&after, dim).map_err(|e| e.to_string())?;
            let d = bottleneck_distance(&a, &b).map_err(|e| e.to_string())?;
            match d {
                Bottleneck::Finite(v) if v <= 2.0 * delta => max_ratio = max_ratio.max(v / delta),
                other => violations.push(format!("trial {trial} H{dim}: {other} > 2*{delta}")),
            }
        }
    }
    if violations.is_empty() {
        Ok(format!(
            "100 trials x H0/H1, zero violations, max distance/delta = {max_ratio:.3}"
        ))
    } else {
        Err(format!("{} violations, first: {}", violations.len(), violations[0]))
    }
}

fn mds_exactness() -> Outcome {
    let mut rng = rng(15);
    let (mut worst, mut worst_strain) = (0.0_f64, 0.0_f64);
    for trial in 0..100 {
        let m = rng.random_range(1..=5);
        let n = rng.random_range(m + 1..=50);
        let points = gaussian_matrix(&mut rng, n, m);
        let table = distance_table(&points);
        let d =
            DistanceMatrix::from_pairs(format!("config-{trial}"), n, |i, j| table[i][j]).map_err(|e| e.to_string())?;
        let e = correlation::classical_mds(&d, m).map_err(|e| format!("config {trial}: {e}"))?;
        let rebuilt = distance_table(&e.coords);
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((rebuilt[i][j] - table[i][j]).abs());
            }
        }
        worst_strain = worst_strain.max(e.strain);
    }
    if worst <= 1e-8 && worst_strain <= 1e-10 {
        Ok(format!(
            "100 configurations, max distance error {worst:e}, max strain {worst_strain:e}"
        ))
    } else {
        Err(format!(
            "max distance error {worst:e} (limit 1e-8), max strain {worst_strain:e} (limit 1e-10)"
        ))
    }
}

fn cca_structure() -> Outcome {
    let mut rng = rng(16);
    let x = gaussian_matrix(&mut rng, 100, 100);
    let y = gaussian_matrix(&mut rng, 100, 100);
    // centring leaves rank 99, so at most 99 components exist
    let r = correlation::cca(x.view(), y.view(), 99, Ridge::Fixed(0.0)).map_err(|e| e.to_string())?;
    let first = r.correlations[0];
    let same = correlation::cca(x.view(), x.view(), 99, Ridge::Fixed(0.0)).map_err(|e| e.to_string())?;
    let worst = same.correlations.iter().map(|c| (c - 1.0).abs()).fold(0.0, f64::max);
    if first >= 1.0 - 1e-6 && worst <= 1e-10 {
        Ok(format!(
            "random X,Y: first correlation {first}; Y == X: max |corr - 1| = {worst:e} over 99"
        ))
    } else {
        Err(format!(
            "random X,Y first correlation {first} (need >= 1 - 1e-6); Y == X max |corr - 1| = {worst:e} (limit 1e-10)"
        ))
    }
}

fn scaled_hausdorff_recovery() -> Outcome {
    let mut rng = rng(17);
    let x = gaussian_matrix(&mut rng, 15, 3);
    let mut notes = Vec::new();
    for c in [0.01, 1.0, 37.0] {
        let y = &x * c;
        let r = correlation::scaled_hausdorff(x.view(), y.view(), &AlphaSearch::default(), HausdorffMode::Symmetric)
            .map_err(|e| e.to_string())?;
        let rel = (r.alpha_star - c).abs() / c;
        if rel > 1e-6 || r.distance > 1e-9 {
            return Err(format!(
                "c = {c}: alpha* = {} (rel error {rel:e}), distance {:e}",
                r.alpha_star, r.distance
            ));
        }
        notes.push(format!("c={c}: rel {rel:.1e}, d {:.1e}", r.distance));
    }
    for trial in 0..300 {
        let dim = rng.random_range(1..=4);
        let (na, nb) = (rng.random_range(1..=20), rng.random_range(1..=20));
        let a = uniform_matrix(&mut rng, na, dim, -1.0, 1.0);
        let b = uniform_matrix(&mut rng, nb, dim, -1.0, 1.0);
        let got = correlation::hausdorff(a.view(), b.view()).map_err(|e| e.to_string())?;
        let want = brute_hausdorff(&a, &b);
        if got != want {
            return Err(format!("set pair {trial}: library {got}, double loop {want}"));
        }
    }
    Ok(format!("{}; 300 Hausdorff pairs exact", notes.join(", ")))
}

fn unit(rng: &mut impl Rng) -> Array1<f64> {
    loop {
        let v: Array1<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.dot(&v).sqrt();
        if n > 1e-3 {
            return v / n;
        }
    }
}

fn cosine_bounds_hold() -> Outcome {
    let mut rng = rng(18);
    let mut slack = f64::INFINITY;
    for trial in 0..10_000 {
        let (a, b, c) = (unit(&mut rng), unit(&mut rng), unit(&mut rng));
        let ab = cosine_similarity(a.view(), b.view()).map_err(|e| e.to_string())?;
        let ac = cosine_similarity(a.view(), c.view()).map_err(|e| e.to_string())?;
        let cb = cosine_similarity(c.view(), b.view()).map_err(|e| e.to_string())?;
        let (lo, hi) = cosine_bounds(ac, cb).map_err(|e| e.to_string())?;
        if ab < lo - 1e-12 || ab > hi + 1e-12 {
            return Err(format!("triple {trial}: cos(A,B) = {ab} outside [{lo}, {hi}]"));
        }
        slack = slack.min((ab - lo).min(hi - ab));
    }
    Ok(format!("10000 triples, zero violations (tightest margin {slack:e})"))
}

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn demo_end_to_end() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for name in ["first", "second"] {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_embedtopo"))
            .args(["demo", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!(
                "demo exited with {}: {}",
                status.status,
                String::from_utf8_lossy(&status.stderr)
            ));
        }
        runs.push(files_under(&out));
    }
    if runs[0] != runs[1] {
        let differing: Vec<_> = runs[0]
            .iter()
            .filter(|(k, v)| runs[1].get(*k) != Some(v))
            .map(|(k, _)| k.display().to_string())
            .collect();
        return Err(format!("runs differ in {differing:?}"));
    }

    let files = &runs[0];
    let count = |prefix: &str, ext: &str| {
        files
            .keys()
            .filter(|p| p.starts_with(Path::new("output").join(prefix)) && p.extension().is_some_and(|e| e == ext))
            .count()
    };
    let inventory = [
        ("matrices", "csv", 4),
        ("heatmaps", "svg", 4),
        ("mds", "csv", 4),
        ("mds", "svg", 4),
        ("curves", "csv", 6),
    ];
    for (dir, ext, want) in inventory {
        let got = count(dir, ext);
        if got != want {
            return Err(format!("expected {want} {dir}/*.{ext}, found {got}"));
        }
    }
    let report: serde_json::Value =
        serde_json::from_slice(&files[Path::new("output/report.json")]).map_err(|e| e.to_string())?;
    let pairs = report["pairs"].as_array().map_or(0, Vec::len);
    if pairs != 6 {
        return Err(format!("report.json lists {pairs} pair analyses, expected 6"));
    }
    for (path, bytes) in files.iter().filter(|(p, _)| p.starts_with("output/matrices")) {
        let m = matrices::parse_csv(&String::from_utf8_lossy(bytes), path).map_err(|e| e.to_string())?;
        if !matrices::validate(&m, false).is_empty() || m.n() != 20 {
            return Err(format!("{} is not a valid 20x20 distance matrix", path.display()));
        }
    }
    Ok(format!(
        "{} files, inventory complete, two runs byte-identical",
        files.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Levenshtein oracle", levenshtein_oracle, Duration::from_secs(10)),
        ("H0 equals MST", h0_is_mst, Duration::from_secs(30)),
        ("H1 oracle", h1_oracle, Duration::from_secs(60)),
        ("Bottleneck oracle", bottleneck_oracle, Duration::from_secs(30)),
        ("Stability corollary", stability, Duration::MAX),
        ("MDS exactness", mds_exactness, Duration::from_secs(20)),
        ("CCA structural reproduction", cca_structure, Duration::MAX),
        ("Scaled Hausdorff recovery", scaled_hausdorff_recovery, Duration::MAX),
        ("Cosine bounds", cosine_bounds_hold, Duration::MAX),
        ("End-to-end determinism", demo_end_to_end, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {name} [{elapsed:.2?}]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} [{elapsed:.2?}]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
