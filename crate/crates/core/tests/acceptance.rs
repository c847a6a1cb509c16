//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use epsmap::ablation::{carve_edges, carve_threshold, kuwahara, warp_labels};
use epsmap::augment::{resolution_pyramid, AugmentSpec, PYRAMID_LEVELS};
use epsmap::batch::{run, Command, EdgeOptions, JobConfig, JobReport, REPORT_FILE};
use epsmap::eps::{compose_eps, detect_edges_fallback};
use epsmap::imagecore::{color_to_labels, labels_to_color, load_png, save_png};
use epsmap::metrics::{confusion, iou_from_confusion};
use epsmap::synth::{label_boundaries, render_photo, street_scene};
use epsmap::{Channels, LabelMap, Palette, RasterImage};

use common::{iou_set_oracle, kuwahara_oracle, mean_defined, synthetic_dataset, tree_bytes};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_raster(rng: &mut ChaCha8Rng, max_side: u32, channels: Channels) -> RasterImage {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    let data = (0..(w * h) as usize * channels.count()).map(|_| rng.random()).collect();
    RasterImage::new(w, h, channels, data).unwrap()
}

fn random_labels(rng: &mut ChaCha8Rng, w: u32, h: u32, k: usize) -> LabelMap {
    let labels = (0..w * h).map(|_| rng.random_range(0..k as u8)).collect();
    LabelMap::new(w, h, k, labels).unwrap()
}

fn iou_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..1000 {
        let (w, h) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let k = rng.random_range(1..=5);
        let a = random_labels(&mut rng, w, h, k);
        let b = random_labels(&mut rng, w, h, k);
        let report = iou_from_confusion(&confusion(&a, &b, None).unwrap()).unwrap();
        let got: Vec<Option<f64>> = report.per_class.iter().map(|c| c.iou).collect();
        let oracle = iou_set_oracle(&a, &b, None);
        check(got == oracle, format!("pair {i}: {got:?} vs {oracle:?}"))?;
        check(Some(report.mean_iou) == mean_defined(&oracle), format!("pair {i}: mean"))?;
        let own = iou_from_confusion(&confusion(&a, &a, None).unwrap()).unwrap();
        check(own.mean_iou == 1.0, format!("pair {i}: self mean {}", own.mean_iou))?;
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, format!("took {secs:.2}s"))?;
    Ok(format!("1000 pairs in {secs:.3}s"))
}

fn worked_iou() -> Outcome {
    let reference = LabelMap::new(4, 1, 2, vec![0, 0, 1, 1]).unwrap();
    let candidate = LabelMap::new(4, 1, 2, vec![0, 1, 1, 1]).unwrap();
    let r = iou_from_confusion(&confusion(&reference, &candidate, None).unwrap()).unwrap();
    let per: Vec<f64> = r.per_class.iter().map(|c| c.iou.unwrap()).collect();
    check((per[0] - 0.5).abs() < 1e-12 && (per[1] - 2.0 / 3.0).abs() < 1e-12, format!("{per:?}"))?;
    check((r.mean_iou - 7.0 / 12.0).abs() < 1e-12, format!("mean {}", r.mean_iou))?;
    Ok(format!("per-class {per:?}, mean {:.12}", r.mean_iou))
}

fn kuwahara_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let img = random_raster(&mut rng, 16, Channels::Rgb);
        for r in 1..=3 {
            check(kuwahara(&img, r).unwrap() == kuwahara_oracle(&img, r), format!("image {i}, r={r}"))?;
        }
        let c: [u8; 3] = rng.random();
        let flat = RasterImage::filled(img.width(), img.height(), Channels::Rgb, &c).unwrap();
        for r in 1..=3 {
            check(kuwahara(&flat, r).unwrap() == flat, format!("constant image {i}, r={r}"))?;
        }
    }
    Ok("200 images x 3 radii exact; constants fixed".into())
}

fn support(img: &RasterImage) -> usize {
    img.data().iter().filter(|&&v| v > 0).count()
}

fn edge_carving() -> Outcome {
    let impulse = RasterImage::gray_from_fn(7, 7, |x, y| if (x, y) == (3, 3) { 255 } else { 0 }).unwrap();
    let one = carve_edges(&impulse, 1).unwrap();
    for y in 0..7u32 {
        for x in 0..7u32 {
            let want = if x.abs_diff(3) <= 1 && y.abs_diff(3) <= 1 { 28 } else { 0 };
            check(one.pixel(x, y)[0] == want, format!("level 1 at ({x},{y}) = {}", one.pixel(x, y)[0]))?;
        }
    }
    check(support(&carve_edges(&impulse, 2).unwrap()) == 0, "level 2 not all zero")?;

    // detector output and boundary line art of synthetic scenes, random
    // noise and random strokes
    let palette = Palette::cityscapes();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut maps = Vec::new();
    for seed in 0..8 {
        let labels = street_scene(160, 90, seed);
        let photo = render_photo(&labels, &palette, "kitti", seed);
        maps.push(detect_edges_fallback(&photo, 0.1, 0.3).unwrap());
        maps.push(label_boundaries(&labels));
        maps.push(random_raster(&mut rng, 48, Channels::Gray));
        let mut strokes = vec![0u8; 64 * 48];
        for _ in 0..rng.random_range(1..8) {
            let (x0, y0) = (rng.random_range(0..64i32), rng.random_range(0..48i32));
            let (dx, dy) = (rng.random_range(-1..=1), rng.random_range(-1..=1));
            let v: u8 = rng.random_range(1..=255);
            for s in 0..rng.random_range(1..40) {
                let (x, y) = (x0 + dx * s, y0 + dy * s);
                if (0..64).contains(&x) && (0..48).contains(&y) {
                    let i = (y * 64 + x) as usize;
                    strokes[i] = strokes[i].max(v);
                }
            }
        }
        maps.push(RasterImage::new(64, 48, Channels::Gray, strokes).unwrap());
    }
    for (i, map) in maps.iter().enumerate() {
        let mut last = usize::MAX;
        for level in 0..=8 {
            let s = support(&carve_threshold(&carve_edges(map, level).unwrap()));
            check(s <= last, format!("map {i}: support {last} -> {s} at level {level}"))?;
            last = s;
        }
    }
    Ok(format!("impulse plateau ok; support non-increasing on {} maps x 9 levels", maps.len()))
}

fn warp_trend() -> Outcome {
    const LEVELS: [u32; 5] = [0, 2, 4, 8, 16];
    let start = Instant::now();
    let maps: Vec<LabelMap> = (0..10).map(|i| street_scene(1024, 576, 500 + i)).collect();
    let sums: Vec<[f64; 5]> = maps
        .par_iter()
        .flat_map(|m| (0..20u64).into_par_iter().map(move |seed| (m, seed)))
        .map(|(m, seed)| {
            let mut out = [0.0; 5];
            for (slot, &level) in out.iter_mut().zip(&LEVELS) {
                let warped = warp_labels(m, level, seed);
                *slot = iou_from_confusion(&confusion(m, &warped, None).unwrap()).unwrap().mean_iou;
            }
            out
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let means: Vec<f64> = (0..5)
        .map(|l| sums.iter().map(|s| s[l]).sum::<f64>() / sums.len() as f64)
        .collect();
    check(sums.iter().all(|s| s[0] == 1.0), "level 0 is not exactly 1.0")?;
    check(means.windows(2).all(|w| w[1] <= w[0]), format!("not non-increasing: {means:?}"))?;
    check(secs < 60.0, format!("took {secs:.1}s"))?;
    let shown: Vec<String> = means.iter().map(|m| format!("{m:.4}")).collect();
    Ok(format!("mean IoU by level {LEVELS:?}: [{}] in {secs:.1}s", shown.join(", ")))
}

fn eps_composition() -> Outcome {
    let palette = Palette::cityscapes();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let labels = street_scene(96, 54, 6);
    let zero = RasterImage::filled(96, 54, Channels::Gray, &[0]).unwrap();
    check(
        compose_eps(&zero, &labels, &palette).unwrap().raster == labels_to_color(&labels, &palette).unwrap(),
        "zero edges differ from the colorized segmentation",
    )?;

    let building = LabelMap::new(1, 1, 19, vec![2]).unwrap();
    let edge = RasterImage::new(1, 1, Channels::Gray, vec![200]).unwrap();
    let sat = compose_eps(&edge, &building, &palette).unwrap();
    check(sat.raster.data() == [255, 255, 255], format!("saturation gave {:?}", sat.raster.data()))?;

    for i in 0..100 {
        let (w, h) = (rng.random_range(1..=32), rng.random_range(1..=32));
        let labels = random_labels(&mut rng, w, h, 19);
        let lo: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
        let hi: Vec<u8> = lo.iter().map(|&v| v.saturating_add(rng.random())).collect();
        let a = compose_eps(&RasterImage::new(w, h, Channels::Gray, lo).unwrap(), &labels, &palette).unwrap();
        let b = compose_eps(&RasterImage::new(w, h, Channels::Gray, hi).unwrap(), &labels, &palette).unwrap();
        check(
            a.raster.data().iter().zip(b.raster.data()).all(|(x, y)| x <= y),
            format!("pair {i} not monotone"),
        )?;
    }
    Ok("identity, saturation and 100 monotone pairs".into())
}

fn pyramid() -> Outcome {
    let want = [(128, 72), (256, 144), (512, 288), (1024, 576)];
    check(PYRAMID_LEVELS == want, "level table")?;
    for (w, h) in [(1920, 1080), (1242, 375), (800, 600), (64, 36)] {
        let img = RasterImage::filled(w, h, Channels::Rgb, &[10, 20, 30]).unwrap();
        let dims: Vec<(u32, u32)> = resolution_pyramid(&img).iter().map(RasterImage::dimensions).collect();
        check(dims == want, format!("{w}x{h} gave {dims:?}"))?;
    }
    Ok(format!("{want:?}"))
}

fn normalized_report(dir: &Path) -> JobReport {
    let mut report = JobReport::load(dir.join(REPORT_FILE)).unwrap();
    for e in &mut report.entries {
        e.elapsed_ms = 0.0;
    }
    report.config["jobs"] = serde_json::Value::Null;
    report.config["out_dir"] = serde_json::Value::Null;
    report
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synthetic_dataset(dir.path(), 16, 96, 54);
    check(manifest.entries.len() == 64, "manifest size")?;
    let commands = [
        Command::Compose {
            fallback_edges: true,
            edge_gain: 1.0,
            edges: EdgeOptions::default(),
        },
        Command::Edges {
            edges: EdgeOptions::default(),
        },
        Command::Smooth { radii: vec![1, 3] },
        Command::Carve { levels: vec![1, 2] },
        Command::Warp { levels: vec![2, 8] },
        Command::Augment {
            spec: AugmentSpec::default(),
            count: 2,
        },
        Command::Pyramid,
        Command::Eval { ignore: None },
    ];
    let mut files = 0;
    for command in commands {
        let name = command.name();
        let mut trees = Vec::new();
        for (run_no, jobs) in [1, 1, 8, 8].into_iter().enumerate() {
            let out = dir.path().join(format!("{name}_{run_no}"));
            let report = run(&manifest, &JobConfig::new(command.clone(), &out).with_jobs(jobs)).unwrap();
            check(report.exit_code() == 0, format!("{name} with {jobs} workers had failures"))?;
            let mut tree = tree_bytes(&out);
            tree.remove(REPORT_FILE);
            trees.push((tree, normalized_report(&out)));
            fs::remove_dir_all(&out).unwrap();
        }
        files += trees[0].0.len();
        check(trees.iter().all(|t| *t == trees[0]), format!("{name} outputs differ across runs"))?;
    }
    Ok(format!("8 commands x 4 runs (1,1,8,8 workers): {files} files identical"))
}

fn round_trips() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.png");
    let palette = Palette::cityscapes();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        for channels in [Channels::Gray, Channels::Rgb] {
            let img = random_raster(&mut rng, 40, channels);
            save_png(&img, &path).unwrap();
            check(load_png(&path).unwrap() == img, format!("png {i} {channels:?}"))?;
        }
        let (w, h) = (rng.random_range(1..=40), rng.random_range(1..=40));
        let labels = random_labels(&mut rng, w, h, 19);
        let color = labels_to_color(&labels, &palette).unwrap();
        check(color_to_labels(&color, &palette, 0).unwrap() == labels, format!("labels {i}"))?;
    }
    Ok("200 PNGs bit-exact; 100 label maps through the palette".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("iou oracle equivalence", iou_oracle),
        ("worked iou example", worked_iou),
        ("kuwahara oracle equivalence", kuwahara_equivalence),
        ("edge carving", edge_carving),
        ("warp degradation trend", warp_trend),
        ("eps composition", eps_composition),
        ("pyramid resolutions", pyramid),
        ("batch determinism", determinism),
        ("round trips", round_trips),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[{}] PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[{}] FAIL {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
