//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use cervipre::imagecore::{
    connected_components, io, srgb8_to_lab, srgb_to_lab, BinaryMask, BoundingBox, Connectivity, GrayPlane, ImageRgb8,
};
use cervipre::inpaint::{harmonic_fill, radial_fundamental_solution, HarmonicSolverConfig, LaplaceSystem};
use cervipre::pipeline::batch::process_batch;
use cervipre::pipeline::synth::{generate_synthetic, SyntheticSample, SyntheticSpec};
use cervipre::pipeline::{process_image, PipelineConfig};
use cervipre::roi::{detection_metrics, kmeans, DetectionClass, FeatureVector, DEFAULT_SLACK};
use cervipre::specular::detect_specular;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_CASES: usize = 20;
const ORACLE_GRID: u32 = 32;
const ORACLE_TOLERANCE_FACTOR: f64 = 10.0;
const ORACLE_BUDGET: Duration = Duration::from_secs(5);

const AFFINE_GRID: u32 = 64;
const AFFINE_MAX_MASKED: f64 = 0.30;
const AFFINE_MAX_ERROR: f64 = 1e-3;
const AFFINE_BUDGET: Duration = Duration::from_secs(1);

const MAX_PRINCIPLE_CASES: usize = 1000;
/// Slack for floating-point rounding in the comparison only.
const MAX_PRINCIPLE_EPS: f64 = 1e-12;

const DECAY_SPACINGS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
const DECAY_RATIO: (f64, f64) = (3.5, 4.5);
const DECAY_POINTS: [(f64, f64); 3] = [(1.0, 0.5), (-0.8, 1.2), (2.0, -1.5)];

const KMEANS_INSTANCES: usize = 100;
const KMEANS_MAX_POINTS: usize = 200;
/// Relative slack on the objective for summation rounding.
const OBJECTIVE_REL_EPS: f64 = 1e-12;

const COLOR_TRIPLES: usize = 256;
const COLOR_TOLERANCE: f64 = 1e-6;

const SUITE_SEEDS: std::ops::RangeInclusive<u64> = 1..=50;
const SUITE_MIN_CORRECT: f64 = 0.90;
const SUITE_BUDGET: Duration = Duration::from_secs(60);

const DETERMINISM_SEEDS: [u64; 3] = [3, 17, 42];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn harmonic_oracle() -> Verdict {
    let cfg = HarmonicSolverConfig::default();
    let bound = ORACLE_TOLERANCE_FACTOR * cfg.tolerance;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let n = ORACLE_GRID;
    let mut worst = 0.0f64;
    let mut elapsed = Duration::ZERO;
    for _ in 0..ORACLE_CASES {
        let cover = rng.random_range(0.05..0.45);
        let mask = common::random_mask(&mut rng, n, n, cover);
        let (p, q) = (rng.random_range(0.5..4.0), rng.random_range(0.5..4.0));
        let noise: Vec<f64> = (0..n * n).map(|_| rng.random_range(-0.05..0.05)).collect();
        let plane = GrayPlane::from_fn(n, n, |x, y| {
            let (u, v) = (x as f64 / n as f64, y as f64 / n as f64);
            0.5 + 0.35 * (p * u * 3.0).sin() * (q * v * 3.0).cos() + noise[(y * n + x) as usize]
        })
        .unwrap();
        let start = Instant::now();
        let got = harmonic_fill(&plane, &mask, &cfg).unwrap();
        elapsed += start.elapsed();
        let want = common::dense_harmonic(&mask, plane.values());
        worst = worst.max(max_abs_diff(got.plane.values(), &want));
    }
    verdict(
        worst <= bound && elapsed < ORACLE_BUDGET,
        format!("max error {worst:.2e} (bound {bound:.0e}), solver time {elapsed:.2?} over {ORACLE_CASES} masks"),
    )
}

fn affine_reproduction() -> Verdict {
    let n = AFFINE_GRID;
    let f = |x: u32, y: u32| (2.0 * x as f64 + 3.0 * y as f64) / 100.0;
    let field: Vec<f64> = (0..n).flat_map(|y| (0..n).map(move |x| f(x, y))).collect();
    let bbox = BoundingBox::new(15, 15, 49, 49);
    let mask = BinaryMask::from_fn(n, n, |x, y| bbox.contains(x, y)).unwrap();
    let share = mask.count() as f64 / (n * n) as f64;

    let start = Instant::now();
    let system = LaplaceSystem::new(&mask).unwrap();
    let mut values = field.clone();
    let stats = system.solve(&mut values, &HarmonicSolverConfig::default());
    let elapsed = start.elapsed();
    let err = max_abs_diff(&values, &field);
    verdict(
        share <= AFFINE_MAX_MASKED && err <= AFFINE_MAX_ERROR && elapsed < AFFINE_BUDGET,
        format!(
            "{:.1}% masked, max error {err:.2e} after {} sweeps in {elapsed:.2?}",
            share * 100.0,
            stats.iterations
        ),
    )
}

type Pixels = Vec<(u32, u32)>;

/// Each 4-connected masked region with the unmasked 4-neighbours around it.
fn region_rings(mask: &BinaryMask) -> Vec<(Pixels, Pixels)> {
    let (w, h) = mask.dimensions();
    connected_components(mask, Connectivity::Four)
        .into_iter()
        .map(|c| {
            let mut ring = BinaryMask::empty(w, h).unwrap();
            for &(x, y) in &c.pixels {
                let cand = [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)];
                for (nx, ny) in cand {
                    if nx < w && ny < h && !mask.get(nx, ny) {
                        ring.set(nx, ny, true);
                    }
                }
            }
            (c.pixels, ring.iter_set().collect())
        })
        .collect()
}

fn maximum_principle() -> Verdict {
    let cfg = HarmonicSolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3A7);
    let mut violations = 0usize;
    let mut checked = 0usize;
    for _ in 0..MAX_PRINCIPLE_CASES {
        let w = rng.random_range(3..40);
        let h = rng.random_range(3..40);
        let cover = rng.random_range(0.02..0.6);
        let mask = common::random_mask(&mut rng, w, h, cover);
        let smooth = rng.random_bool(0.5);
        let plane = GrayPlane::from_fn(w, h, |x, y| {
            if smooth {
                0.5 + 0.4 * ((x as f64) * 0.3).sin() * ((y as f64) * 0.2).cos()
            } else {
                rng.random::<f64>()
            }
        })
        .unwrap();
        let out = harmonic_fill(&plane, &mask, &cfg).unwrap();
        for (members, ring) in region_rings(&mask) {
            let ring_vals: Vec<f64> = ring.iter().map(|&(x, y)| plane.get(x, y)).collect();
            let lo = ring_vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ring_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (x, y) in members {
                let v = out.plane.get(x, y);
                checked += 1;
                if v < lo - MAX_PRINCIPLE_EPS || v > hi + MAX_PRINCIPLE_EPS {
                    violations += 1;
                }
            }
        }
    }
    verdict(
        violations == 0,
        format!("{violations} violations over {checked} filled pixels in {MAX_PRINCIPLE_CASES} cases"),
    )
}

fn fundamental_solution_decay() -> Verdict {
    let f = |x: f64, y: f64| radial_fundamental_solution((x * x + y * y).sqrt(), 2, 1.0, 0.0).unwrap();
    let mut ratios = Vec::new();
    for &(x, y) in &DECAY_POINTS {
        let lap: Vec<f64> = DECAY_SPACINGS
            .iter()
            .map(|&h| common::discrete_laplacian(f, x, y, h).abs())
            .collect();
        ratios.extend(lap.windows(2).map(|p| p[0] / p[1]));
    }
    let ok = ratios.iter().all(|r| (DECAY_RATIO.0..=DECAY_RATIO.1).contains(r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    verdict(ok, format!("ratios per halving [{}]", shown.join(", ")))
}

fn random_points(rng: &mut impl Rng) -> Vec<[f64; 2]> {
    let n = rng.random_range(4..=KMEANS_MAX_POINTS);
    let blobs = rng.random_range(1..=5);
    let centres: Vec<[f64; 2]> = (0..blobs)
        .map(|_| [rng.random_range(-40.0..60.0), rng.random_range(-40.0..60.0)])
        .collect();
    (0..n)
        .map(|i| {
            let c = centres[i % blobs];
            // Some exact duplicates to exercise ties and empty clusters.
            if rng.random_bool(0.1) {
                c
            } else {
                [c[0] + rng.random_range(-8.0..8.0), c[1] + rng.random_range(-8.0..8.0)]
            }
        })
        .collect()
}

fn kmeans_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1A55);
    let mut mismatches = 0;
    let mut increases = 0;
    for i in 0..KMEANS_INSTANCES {
        let points = random_points(&mut rng);
        let k = i % 4 + 1;
        let seed = rng.random::<u64>();
        let features: Vec<FeatureVector> = points
            .iter()
            .enumerate()
            .map(|(j, p)| FeatureVector {
                a: p[0],
                b: p[1],
                x: j as u32,
                y: 0,
            })
            .collect();
        let got = kmeans(&features, k, seed).unwrap();
        let want = common::lloyd(&points, k, seed);
        let same_means = got
            .means
            .iter()
            .zip(&want.means)
            .all(|(a, b)| a[0].to_bits() == b[0].to_bits() && a[1].to_bits() == b[1].to_bits());
        if got.assignments != want.assignments || !same_means {
            mismatches += 1;
        }
        for pair in got.objective_history.windows(2) {
            if pair[1] > pair[0] * (1.0 + OBJECTIVE_REL_EPS) {
                increases += 1;
            }
        }
    }
    verdict(
        mismatches == 0 && increases == 0,
        format!("{mismatches} mismatches, {increases} objective increases over {KMEANS_INSTANCES} instances"),
    )
}

fn color_conversion() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0102);
    let mut worst = 0.0f64;
    for _ in 0..COLOR_TRIPLES {
        let unit: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
        let bytes: [u8; 3] = std::array::from_fn(|_| rng.random::<u8>());
        for (lab, want) in [
            (srgb_to_lab(unit), common::lab_reference(unit)),
            (
                srgb8_to_lab(bytes),
                common::lab_reference(bytes.map(|c| c as f64 / 255.0)),
            ),
        ] {
            worst = worst
                .max((lab.l - want[0]).abs())
                .max((lab.a - want[1]).abs())
                .max((lab.b - want[2]).abs());
        }
    }
    verdict(
        worst <= COLOR_TOLERANCE,
        format!("max deviation {worst:.2e} over {COLOR_TRIPLES} real and {COLOR_TRIPLES} 8-bit triples"),
    )
}

struct SuiteRun {
    samples: Vec<SyntheticSample>,
    inpainted: Vec<ImageRgb8>,
    glare_masks: Vec<BinaryMask>,
    classes: Vec<Option<DetectionClass>>,
    elapsed: Duration,
}

fn run_suite() -> SuiteRun {
    let spec = SyntheticSpec::default();
    let cfg = PipelineConfig::default();
    let start = Instant::now();
    let mut run = SuiteRun {
        samples: Vec::new(),
        inpainted: Vec::new(),
        glare_masks: Vec::new(),
        classes: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for seed in SUITE_SEEDS {
        let sample = generate_synthetic(seed, &spec).unwrap();
        match process_image(&sample.image, &cfg) {
            Ok(out) => {
                let m = detection_metrics(&out.roi.roi_mask, &sample.roi_truth).unwrap();
                run.classes.push(Some(m.classify(DEFAULT_SLACK)));
                run.inpainted.push(out.inpainted);
                run.glare_masks.push(out.glare_mask);
            }
            Err(e) => {
                eprintln!("seed {seed}: {e}");
                run.classes.push(None);
                run.inpainted.push(sample.image.clone());
                run.glare_masks
                    .push(BinaryMask::empty(spec.width, spec.height).unwrap());
            }
        }
        run.samples.push(sample);
    }
    run.elapsed = start.elapsed();
    run
}

fn synthetic_suite(run: &SuiteRun) -> Verdict {
    let n = run.classes.len();
    let count = |c: DetectionClass| run.classes.iter().filter(|&&x| x == Some(c)).count();
    let correct = count(DetectionClass::Correct);
    let failed = run.classes.iter().filter(|c| c.is_none()).count();
    let rate = correct as f64 / n as f64;
    verdict(
        rate >= SUITE_MIN_CORRECT && run.elapsed < SUITE_BUDGET,
        format!(
            "{correct}/{n} correct ({:.0}%), {} more, {} less, {failed} failed, {:.1?}",
            rate * 100.0,
            count(DetectionClass::More),
            count(DetectionClass::Less),
            run.elapsed
        ),
    )
}

fn glare_closure(run: &SuiteRun) -> Verdict {
    let threshold = PipelineConfig::default().specular.white_threshold;
    let mut in_scope = 0;
    let mut skipped = 0;
    let mut reappeared = 0usize;
    for ((sample, inpainted), glare) in run.samples.iter().zip(&run.inpainted).zip(&run.glare_masks) {
        let again = detect_specular(inpainted, &PipelineConfig::default().specular);
        for (members, ring) in region_rings(glare) {
            let ring_dark = ring
                .iter()
                .all(|&(x, y)| sample.image.get(x, y).iter().all(|&c| (c as f64 / 255.0) < threshold));
            if !ring_dark {
                skipped += 1;
                continue;
            }
            in_scope += 1;
            reappeared += members.iter().filter(|&&(x, y)| again.get(x, y)).count();
        }
    }
    verdict(
        in_scope > 0 && reappeared == 0,
        format!(
            "{reappeared} glare pixels inside {in_scope} filled regions ({skipped} regions with bright rings skipped)"
        ),
    )
}

fn determinism() -> Verdict {
    let spec = SyntheticSpec::default();
    let root = tempfile::tempdir().unwrap();
    let inputs_dir = root.path().join("in");
    std::fs::create_dir_all(&inputs_dir).unwrap();
    let inputs: Vec<_> = DETERMINISM_SEEDS
        .iter()
        .map(|&s| {
            let p = inputs_dir.join(format!("s{s}.png"));
            io::save_png(&generate_synthetic(s, &spec).unwrap().image, &p).unwrap();
            p
        })
        .collect();
    let cfg = PipelineConfig::default();
    let a = root.path().join("a");
    let b = root.path().join("b");
    process_batch(&inputs, &a, &cfg, Some(1)).unwrap();
    process_batch(&inputs, &b, &cfg, Some(4)).unwrap();

    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let differing: Vec<String> = names
        .iter()
        .filter(|n| std::fs::read(a.join(n)).ok() != std::fs::read(b.join(n)).ok())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    let expected = DETERMINISM_SEEDS.len() * 5;
    verdict(
        names.len() == expected && differing.is_empty(),
        format!(
            "{} artifacts compared across 1- and 4-thread runs, {} differ {:?}",
            names.len(),
            differing.len(),
            differing
        ),
    )
}

fn main() {
    let mut results: Vec<(&str, Verdict)> = vec![
        ("harmonic fill matches dense direct solve", harmonic_oracle()),
        ("affine field reproduced", affine_reproduction()),
        ("maximum principle", maximum_principle()),
        (
            "fundamental solution Laplacian decays at second order",
            fundamental_solution_decay(),
        ),
        ("k-means matches independent Lloyd oracle", kmeans_oracle()),
        ("sRGB to CIELAB matches reference formulas", color_conversion()),
    ];
    let suite = run_suite();
    results.push(("synthetic suite detection rate", synthetic_suite(&suite)));
    results.push(("glare does not reappear after inpainting", glare_closure(&suite)));
    results.push(("full pipeline is byte-for-byte deterministic", determinism()));

    let mut failed = 0;
    for (name, v) in &results {
        println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
