//! Acceptance criteria 1-8, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout. Set
//! `ACCEPTANCE_SKIP_SLOW=1` to skip the slow torus run.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use barcode_entropy::entropy::entropy_of;
use barcode_entropy::persistence::reported_dims;
use barcode_entropy::pipeline::{cmd_analyze, Analysis, InputSource, RunConfig, SampleSpec};
use barcode_entropy::{
    betti_numbers_at, build_rips, classify, compute_barcode, distance_matrix, max_entropy_substitution,
    persistent_entropy, sample_circle, LengthList, PointCloud, RipsOptions, Threshold,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed of the 30-point circle used by criteria 4 and 5.
const CIRCLE_SEED: u64 = 70;
/// Seed of the 400-point torus used by criteria 4 and 6.
const TORUS_SEED: u64 = 0;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let spent = started.elapsed();
    ensure(spent < limit, || format!("took {spent:.2?}, limit {limit:?}"))
}

fn random_lists(seed: u64, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=10);
            // Lengths in (0, 10].
            (0..n).map(|_| 10.0 * (1.0 - rng.gen::<f64>())).collect()
        })
        .collect()
}

fn circle_run() -> Result<Analysis, String> {
    let spec = SampleSpec::parse_circle("30,2").map_err(|e| e.to_string())?;
    let cfg = RunConfig { seed: CIRCLE_SEED, ..RunConfig::new(InputSource::Sample(spec)) };
    cmd_analyze(&cfg).map(|(a, _)| a).map_err(|e| e.to_string())
}

fn torus_run() -> Result<Analysis, String> {
    let spec = SampleSpec::parse_torus("400,2,1").map_err(|e| e.to_string())?;
    let cfg = RunConfig { seed: TORUS_SEED, ..RunConfig::new(InputSource::Sample(spec)) };
    cmd_analyze(&cfg).map(|(a, _)| a).map_err(|e| e.to_string())
}

fn positive_lengths(a: &Analysis) -> Vec<f64> {
    let mut v: Vec<f64> = a.barcode.intervals.iter().map(|i| i.length()).filter(|&l| l > 0.0).collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=1000usize {
        let list = LengthList::new(vec![0.37; n]).map_err(|e| e.to_string())?;
        let err = (persistent_entropy(&list) - (n as f64).ln()).abs();
        worst = worst.max(err);
    }
    ensure(worst <= 1e-12, || format!("uniform list off ln n by {worst:e}"))?;
    let single = persistent_entropy(&LengthList::new([4.2]).map_err(|e| e.to_string())?);
    ensure(single == 0.0, || format!("singleton entropy {single:e}"))?;
    within(Duration::from_secs(1), started)?;
    Ok(format!("max |H - ln n| = {worst:.1e} for n = 2..1000; singleton 0"))
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e01);
    let mut worst_margin = f64::INFINITY;
    let mut worst_grad: f64 = 0.0;
    for lengths in random_lists(2, 500) {
        let list = LengthList::new(lengths).map_err(|e| e.to_string())?;
        let n = list.len();
        for i in 1..=n {
            let r = max_entropy_substitution(&list, i).map_err(|e| e.to_string())?;
            let best = persistent_entropy(&r);
            let c = r.lengths()[0];
            let tail = &list.lengths()[i..];
            for k in 0..200 {
                let mut comp: Vec<f64> = (0..i)
                    .map(|_| {
                        if k % 2 == 0 {
                            c * (0.5 * (rng.gen::<f64>() - 0.5)).exp()
                        } else {
                            10.0 * (1.0 - rng.gen::<f64>())
                        }
                    })
                    .collect();
                comp.extend_from_slice(tail);
                let margin = best - entropy_of(&comp);
                worst_margin = worst_margin.min(margin);
                ensure(margin >= -1e-12, || format!("competitor beats R({i}) by {:e} on {:?}", -margin, list.lengths()))?;
            }
            let mut x: Vec<f64> = vec![c; i];
            x.extend_from_slice(tail);
            let h = 1e-6 * c;
            for j in 0..i {
                let mut up = x.clone();
                let mut down = x.clone();
                up[j] += h;
                down[j] -= h;
                let grad = (entropy_of(&up) - entropy_of(&down)) / (2.0 * h);
                worst_grad = worst_grad.max(grad.abs());
                ensure(grad.abs() < 1e-5, || format!("gradient {grad:e} at R({i}) slot {j} on {:?}", list.lengths()))?;
            }
        }
    }
    within(Duration::from_secs(30), started)?;
    Ok(format!("500 lists; min margin {worst_margin:.1e}, max |grad| {worst_grad:.1e}"))
}

fn criterion_3() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for lengths in random_lists(2, 500) {
        let list = LengthList::new(lengths).map_err(|e| e.to_string())?;
        let report = classify(&list);
        let mut prev = report.entropy;
        for row in &report.rows {
            worst = worst.max(prev - row.entropy);
            ensure(row.entropy >= prev - 1e-9, || {
                format!("Q({}) = {} < Q({}) = {prev} on {:?}", row.index, row.entropy, row.index - 1, list.lengths())
            })?;
            prev = row.entropy;
        }
        let ln_n = (list.len() as f64).ln();
        ensure((prev - ln_n).abs() <= 1e-9, || format!("Q(n) = {prev}, ln n = {ln_n}"))?;
    }
    within(Duration::from_secs(30), started)?;
    Ok(format!("500 lists; largest decrease {worst:.1e}"))
}

/// `prefix` followed by the run's lengths from rank `prefix.len() + 1` on.
fn padded(prefix: &[f64], run: &Analysis) -> Result<Vec<f64>, String> {
    let lengths = positive_lengths(run);
    let tail = &lengths[prefix.len().min(lengths.len())..];
    let floor = prefix[prefix.len() - 1];
    ensure(tail.iter().all(|&l| l <= floor), || format!("tail exceeds {floor}: {:?}", &tail[..3]))?;
    Ok(prefix.iter().chain(tail).copied().collect())
}

fn criterion_4(torus: &Result<Analysis, String>) -> Outcome {
    let circle = circle_run()?;
    let torus = torus.as_ref().map_err(Clone::clone)?;
    let mut notes = Vec::new();
    for (name, prefix, run, want) in [
        ("circle", [2.0, 1.2, 0.7, 0.45, 0.45], &circle, [true, true, false, false, false]),
        ("torus", [1.9, 1.531, 1.531, 1.234, 0.396], torus, [true, true, true, true, false]),
    ] {
        let lengths = padded(&prefix, run)?;
        let n = lengths.len();
        let report = classify(&LengthList::new(lengths).map_err(|e| e.to_string())?);
        let got: Vec<bool> = report.rows[..5].iter().map(|r| r.feature).collect();
        ensure(got == want, || format!("{name} flags {got:?}, expected {want:?}"))?;
        notes.push(format!("{name} n={n} ok"));
    }
    Ok(notes.join(", "))
}

fn largest_gap_chord(cloud: &PointCloud, radius: f64) -> f64 {
    let mut angles: Vec<f64> = cloud.points().map(|p| p[1].atan2(p[0])).collect();
    angles.sort_by(f64::total_cmp);
    let mut gap = angles[0] + TAU - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    2.0 * radius * (gap / 2.0).sin()
}

fn criterion_5() -> Outcome {
    let started = Instant::now();
    let run = circle_run()?;
    within(Duration::from_secs(5), started)?;
    let report = &run.reports[0];
    let features: Vec<_> = report.features().collect();
    ensure(features.len() == 2, || format!("{} features flagged", features.len()))?;
    let dims: Vec<usize> = features.iter().filter_map(|r| r.interval.as_ref().map(|i| i.dim)).collect();
    ensure(dims == [0, 1], || format!("feature dims {dims:?}"))?;
    let component = features[0].length;
    ensure((component - 2.0).abs() <= 0.1, || format!("dim-0 feature length {component}"))?;
    let chord = largest_gap_chord(&sample_circle(30, 2.0, CIRCLE_SEED).map_err(|e| e.to_string())?, 2.0);
    let birth = features[1].interval.as_ref().unwrap().birth;
    ensure((birth - chord / 2.0).abs() <= 1e-9, || format!("loop born at {birth}, largest gap chord / 2 = {}", chord / 2.0))?;
    Ok(format!(
        "seed {CIRCLE_SEED}: dim 0 length {component:.6}, loop born {birth:.6} = gap chord/2, {:.2?}",
        started.elapsed()
    ))
}

fn criterion_6(torus: &Result<Analysis, String>, elapsed: Duration) -> Outcome {
    let run = torus.as_ref().map_err(Clone::clone)?;
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:.2?}"))?;
    let report = &run.reports[0];
    let mut dims: Vec<usize> =
        report.features().filter_map(|r| r.interval.as_ref().map(|i| i.dim)).collect();
    dims.sort_unstable();
    ensure(dims == [0, 1, 1, 2], || format!("feature dims {dims:?}"))?;
    Ok(format!(
        "400 points seed {TORUS_SEED}, max_dim 3, threshold 0.9: dims {dims:?}, {} simplices, {elapsed:.2?}",
        run.simplex_count
    ))
}

fn criterion_7() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e07);
    let mut checks = 0usize;
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let dim = rng.gen_range(1..=3);
        let coords: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cloud = PointCloud::from_flat(coords, dim).map_err(|e| e.to_string())?;
        let options = RipsOptions { max_dim: n - 1, threshold: Threshold::Full, budget: 1 << 20 };
        let fc = build_rips(&distance_matrix(&cloud), &options).map_err(|e| e.to_string())?;
        let barcode = compute_barcode(&fc);
        let mut values: Vec<f64> = fc.simplices().iter().map(|s| s.value).collect();
        values.dedup();
        for &t in &values {
            let betti = betti_numbers_at(&fc, t);
            for k in reported_dims(n - 1) {
                let ranks = barcode.rank_at(k, t);
                ensure(ranks == betti[k], || {
                    format!("{n} points, t = {t}, dim {k}: {ranks} intervals vs rank {}", betti[k])
                })?;
                checks += 1;
            }
        }
    }
    within(Duration::from_secs(60), started)?;
    Ok(format!("100 clouds, {checks} (t, dim) checks"))
}

fn criterion_8() -> Outcome {
    let cloud = PointCloud::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).map_err(|e| e.to_string())?;
    let options = RipsOptions { max_dim: 2, threshold: Threshold::Full, budget: 100 };
    let fc = build_rips(&distance_matrix(&cloud), &options).map_err(|e| e.to_string())?;
    let capped = barcode_entropy::apply_essential_cap(&compute_barcode(&fc), fc.diameter(), Threshold::Full);
    let mut got: Vec<(usize, f64, f64)> = capped.intervals.iter().map(|i| (i.dim, i.birth, i.death)).collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ensure(got == [(0, 0.0, 2.5), (0, 0.0, 2.5)], || format!("intervals {got:?}"))?;
    ensure(capped.cap == Some(2.5), || format!("cap {:?}", capped.cap))?;
    Ok("merge at 2.5, essential class capped at d/2 = 2.5".into())
}

fn main() -> ExitCode {
    let skip_slow = std::env::var_os("ACCEPTANCE_SKIP_SLOW").is_some_and(|v| v != "0");
    let (torus, torus_time) = if skip_slow {
        (Err("skipped".to_string()), Duration::ZERO)
    } else {
        let started = Instant::now();
        (torus_run(), started.elapsed())
    };

    let results: Vec<(u32, &str, Option<Outcome>)> = vec![
        (1, "entropy bounds and extremes", Some(criterion_1())),
        (2, "maximum-entropy substitution is optimal", Some(criterion_2())),
        (3, "monotone entropy chain", Some(criterion_3())),
        (4, "reference length prefixes replay", (!skip_slow).then(|| criterion_4(&torus))),
        (5, "circle end-to-end", Some(criterion_5())),
        (6, "torus end-to-end [slow]", (!skip_slow).then(|| criterion_6(&torus, torus_time))),
        (7, "barcode agrees with Betti numbers", Some(criterion_7())),
        (8, "radius-scale convention", Some(criterion_8())),
    ];

    let mut failed = 0;
    for (id, name, outcome) in results {
        match outcome {
            Some(Ok(detail)) => println!("criterion {id} PASS  {name}: {detail}"),
            Some(Err(reason)) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {reason}");
            }
            None => println!("criterion {id} SKIP  {name}: ACCEPTANCE_SKIP_SLOW is set"),
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
