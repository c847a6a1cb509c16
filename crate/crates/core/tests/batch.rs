mod common;

use std::fs;

use epsmap::ablation::carve_threshold;
use epsmap::augment::AugmentSpec;
use epsmap::batch::{run, Command, DatasetManifest, EdgeOptions, EntryStatus, JobConfig, JobReport, ManifestEntry};
use epsmap::imagecore::{labels_to_color, load_labels_png, load_png, save_labels_png, save_png};
use epsmap::{Error, LabelEncoding, LabelMap, Palette, RasterImage};

use common::{synthetic_dataset, tree_bytes};

fn compose() -> Command {
    Command::Compose {
        fallback_edges: false,
        edge_gain: 1.0,
        edges: EdgeOptions::default(),
    }
}

fn strip_timing(mut report: JobReport) -> JobReport {
    for e in &mut report.entries {
        e.elapsed_ms = 0.0;
    }
    report.config["jobs"] = serde_json::Value::Null;
    report.config["out_dir"] = serde_json::Value::Null;
    report
}

#[test]
fn compose_writes_one_eps_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 1, 64, 36);
    manifest.entries.truncate(2);
    let out = dir.path().join("out");
    let report = run(&manifest, &JobConfig::new(compose(), &out)).unwrap();
    assert_eq!(report.exit_code(), 0);
    assert_eq!(report.entries.len(), 2);
    for e in &report.entries {
        assert_eq!(e.status, EntryStatus::Ok);
        let eps = load_png(out.join(format!("{}_eps.png", e.id))).unwrap();
        assert_eq!(eps.dimensions(), (64, 36));
    }
    assert!(out.join("report.json").exists());
}

#[test]
fn failing_entry_is_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 1, 64, 36);
    manifest.entries.truncate(3);
    let out_a = dir.path().join("a");
    run(&manifest, &JobConfig::new(compose(), &out_a)).unwrap();

    // replace the second entry's edges with a map of the wrong size
    let wrong = RasterImage::filled(10, 10, epsmap::Channels::Gray, &[9]).unwrap();
    save_png(&wrong, dir.path().join("wrong.png")).unwrap();
    manifest.entries[1].edges = Some("wrong.png".into());
    let out_b = dir.path().join("b");
    let report = run(&manifest, &JobConfig::new(compose(), &out_b)).unwrap();
    assert_eq!(report.exit_code(), 1);
    let bad = report.entries.iter().find(|e| e.id == manifest.entries[1].id).unwrap();
    assert_eq!(bad.status, EntryStatus::Error);
    assert!(bad.message.as_ref().unwrap().contains("dimension mismatch"));

    for e in [&manifest.entries[0], &manifest.entries[2]] {
        let name = format!("{}_eps.png", e.id);
        assert_eq!(fs::read(out_a.join(&name)).unwrap(), fs::read(out_b.join(&name)).unwrap());
    }
    assert!(!out_b.join(format!("{}_eps.png", manifest.entries[1].id)).exists());
}

#[test]
fn fallback_edges_compose_from_images() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 1, 48, 27);
    for e in &mut manifest.entries {
        e.edges = None;
    }
    let cmd = Command::Compose {
        fallback_edges: true,
        edge_gain: 1.0,
        edges: EdgeOptions { low: 0.1, high: 0.3 },
    };
    let out = dir.path().join("out");
    let report = run(&manifest, &JobConfig::new(cmd, &out)).unwrap();
    assert_eq!(report.exit_code(), 0);
    // inputs used the same detector settings, so the result matches the
    // compose from stored edges
    let stored = run(
        &synthetic_dataset(&dir.path().join("again"), 1, 48, 27),
        &JobConfig::new(compose(), dir.path().join("out2")),
    )
    .unwrap();
    assert_eq!(stored.exit_code(), 0);
    for e in &manifest.entries {
        let name = format!("{}_eps.png", e.id);
        assert_eq!(fs::read(out.join(&name)).unwrap(), fs::read(dir.path().join("out2").join(&name)).unwrap());
    }
}

#[test]
fn compose_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synthetic_dataset(dir.path(), 2, 64, 36);
    let a = run(&manifest, &JobConfig::new(compose(), dir.path().join("a"))).unwrap();
    let b = run(&manifest, &JobConfig::new(compose(), dir.path().join("b"))).unwrap();
    let mut ta = tree_bytes(&dir.path().join("a"));
    let mut tb = tree_bytes(&dir.path().join("b"));
    ta.remove("report.json");
    tb.remove("report.json");
    assert_eq!(ta, tb);
    assert_eq!(strip_timing(a), strip_timing(b));
}

#[test]
fn warp_sweep_counts_and_identity_level() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synthetic_dataset(dir.path(), 4, 64, 36);
    assert_eq!(manifest.entries.len(), 16);
    let out = dir.path().join("out");
    let cmd = Command::Warp { levels: vec![0, 4, 8] };
    let report = run(&manifest, &JobConfig::new(cmd, &out)).unwrap();
    assert_eq!(report.exit_code(), 0);
    let pngs = fs::read_dir(&out)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "png"))
        .count();
    assert_eq!(pngs, 48);
    let palette = Palette::cityscapes();
    for e in &manifest.entries {
        let input = load_labels_png(manifest.resolve(e.segmentation.as_ref().unwrap()), LabelEncoding::Color, &palette, 0)
            .unwrap();
        let level0 = load_labels_png(out.join(format!("{}_warp_0.png", e.id)), LabelEncoding::Color, &palette, 0).unwrap();
        assert_eq!(level0, input);
    }
}

#[test]
fn removing_an_entry_leaves_other_outputs_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synthetic_dataset(dir.path(), 2, 64, 36);
    let cmd = Command::Warp { levels: vec![3, 6] };
    run(&manifest, &JobConfig::new(cmd.clone(), dir.path().join("full"))).unwrap();
    let mut fewer = manifest.clone();
    let removed = fewer.entries.remove(2);
    fewer.entries.reverse();
    run(&fewer, &JobConfig::new(cmd, dir.path().join("fewer"))).unwrap();
    let mut full = tree_bytes(&dir.path().join("full"));
    let mut part = tree_bytes(&dir.path().join("fewer"));
    full.remove("report.json");
    part.remove("report.json");
    full.retain(|k, _| !k.starts_with(&removed.id));
    assert_eq!(full, part);
}

#[test]
fn seed_flag_overrides_manifest_seed() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synthetic_dataset(dir.path(), 1, 64, 36);
    let cmd = Command::Warp { levels: vec![6] };
    let a = run(&manifest, &JobConfig::new(cmd.clone(), dir.path().join("a"))).unwrap();
    assert_eq!(a.base_seed, manifest.base_seed);
    let b = run(&manifest, &JobConfig::new(cmd, dir.path().join("b")).with_seed(Some(1))).unwrap();
    assert_eq!(b.base_seed, 1);
    let ta = tree_bytes(&dir.path().join("a"));
    let tb = tree_bytes(&dir.path().join("b"));
    let name = format!("{}_warp_6.png", manifest.entries[0].id);
    assert_ne!(ta[&name], tb[&name]);
}

#[test]
fn carve_sweep_support_is_nonincreasing() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synthetic_dataset(dir.path(), 16, 96, 54);
    assert_eq!(manifest.entries.len(), 64);
    let out = dir.path().join("out");
    let levels = vec![0, 1, 2, 3, 4];
    let report = run(&manifest, &JobConfig::new(Command::Carve { levels: levels.clone() }, &out)).unwrap();
    assert_eq!(report.exit_code(), 0);
    for e in &manifest.entries {
        let counts: Vec<usize> = levels
            .iter()
            .map(|l| {
                let img = load_png(out.join(format!("{}_carve_{l}.png", e.id))).unwrap();
                carve_threshold(&img).data().iter().filter(|&&v| v > 0).count()
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{}: {counts:?}", e.id);
    }
}

#[test]
fn eval_identical_pairs_score_one_per_tag() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 2, 64, 36);
    for e in &mut manifest.entries {
        e.candidate = e.segmentation.clone();
    }
    let out = dir.path().join("out");
    let report = run(&manifest, &JobConfig::new(Command::Eval { ignore: None }, &out)).unwrap();
    let agg = report.aggregate.unwrap();
    assert_eq!(agg["overall"]["overall"]["mean_iou"], 1.0);
    for tag in epsmap::synth::SOURCES {
        assert_eq!(agg["by_tag"][tag]["overall"]["mean_iou"], 1.0, "{tag}");
    }
    let csv = fs::read_to_string(out.join("iou_per_class.csv")).unwrap();
    assert!(csv.starts_with("group,class,name,count,min,q1,median,q3,max,mean,overall_iou"));
    assert!(csv.contains("kitti,,mean_iou,2,,,,,,,1.000"));
}

#[test]
fn eval_worked_example_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let palette = Palette::cityscapes();
    let reference = LabelMap::new(2, 2, 19, vec![0, 0, 1, 1]).unwrap();
    let candidate = LabelMap::new(2, 2, 19, vec![0, 1, 1, 1]).unwrap();
    save_labels_png(&reference, LabelEncoding::Index, &palette, dir.path().join("r.png")).unwrap();
    save_labels_png(&candidate, LabelEncoding::Index, &palette, dir.path().join("c.png")).unwrap();
    let mut e = ManifestEntry::new("pair");
    e.segmentation = Some("r.png".into());
    e.candidate = Some("c.png".into());
    e.seg_encoding = LabelEncoding::Index;
    let manifest = DatasetManifest::new(vec![e], 0).with_root(dir.path());
    let report = run(&manifest, &JobConfig::new(Command::Eval { ignore: None }, dir.path().join("out"))).unwrap();
    let mean = report.aggregate.unwrap()["overall"]["overall"]["mean_iou"].as_f64().unwrap();
    assert!((mean - 7.0 / 12.0).abs() < 1e-12);
}

#[test]
fn eval_without_pairs_has_no_evaluable_pixels() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = DatasetManifest::new(vec![], 0);
    let err = run(&manifest, &JobConfig::new(Command::Eval { ignore: None }, dir.path().join("out"))).unwrap_err();
    assert!(matches!(err, Error::NoEvaluablePixels));
    assert_eq!(err.to_string(), "no evaluable pixels");
}

#[test]
fn augment_variants_and_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 1, 80, 45);
    manifest.entries.truncate(2);
    manifest.entries[1].segmentation = None;
    let out = dir.path().join("out");
    let cmd = Command::Augment {
        spec: AugmentSpec::default(),
        count: 3,
    };
    let report = run(&manifest, &JobConfig::new(cmd, &out)).unwrap();
    assert_eq!(report.exit_code(), 0);
    let paired = &manifest.entries[0].id;
    assert_eq!(report.entries.iter().find(|e| &e.id == paired).unwrap().outputs.len(), 6);
    let variants: Vec<Vec<u8>> = (0..3)
        .map(|k| fs::read(out.join(format!("{paired}_augment_{k}.png"))).unwrap())
        .collect();
    assert!(variants[0] != variants[1] && variants[1] != variants[2]);
    let palette = Palette::cityscapes();
    for k in 0..3 {
        let img = load_png(out.join(format!("{paired}_augment_{k}.png"))).unwrap();
        let seg = load_labels_png(out.join(format!("{paired}_augment_{k}_seg.png")), LabelEncoding::Color, &palette, 0)
            .unwrap();
        assert_eq!(img.dimensions(), seg.dimensions());
    }
    let single = &manifest.entries[1].id;
    assert_eq!(report.entries.iter().find(|e| &e.id == single).unwrap().outputs.len(), 3);
}

#[test]
fn identity_augment_copies_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 1, 40, 30);
    manifest.entries.truncate(1);
    let out = dir.path().join("out");
    let cmd = Command::Augment {
        spec: AugmentSpec::identity(),
        count: 2,
    };
    run(&manifest, &JobConfig::new(cmd, &out)).unwrap();
    let e = &manifest.entries[0];
    let input = load_png(manifest.resolve(e.image.as_ref().unwrap())).unwrap();
    let palette = Palette::cityscapes();
    let seg = load_labels_png(manifest.resolve(e.segmentation.as_ref().unwrap()), LabelEncoding::Color, &palette, 0).unwrap();
    for k in 0..2 {
        assert_eq!(load_png(out.join(format!("{}_augment_{k}.png", e.id))).unwrap(), input);
        let s = load_png(out.join(format!("{}_augment_{k}_seg.png", e.id))).unwrap();
        assert_eq!(s, labels_to_color(&seg, &palette).unwrap());
    }
}

#[test]
fn pyramid_writes_four_suffixed_levels() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 1, 200, 100);
    manifest.entries.truncate(1);
    let out = dir.path().join("out");
    run(&manifest, &JobConfig::new(Command::Pyramid, &out)).unwrap();
    let id = &manifest.entries[0].id;
    for (w, h) in [(128, 72), (256, 144), (512, 288), (1024, 576)] {
        let img = load_png(out.join(format!("{id}_{w}x{h}.png"))).unwrap();
        assert_eq!(img.dimensions(), (w, h));
    }
}

#[test]
fn invalid_manifest_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 1, 32, 18);
    manifest.entries[2].edges = None;
    let out = dir.path().join("never");
    let err = run(&manifest, &JobConfig::new(Command::Carve { levels: vec![1] }, &out)).unwrap_err();
    assert!(matches!(err, Error::Manifest(_)));
    assert!(!out.exists());

    let err = run(&manifest, &JobConfig::new(Command::Carve { levels: vec![] }, &out)).unwrap_err();
    assert!(matches!(err, Error::InvalidParameter(_)));
    assert!(!out.exists());
}

#[test]
fn report_lists_each_entry_once_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synthetic_dataset(dir.path(), 2, 32, 18);
    manifest.entries.reverse();
    let out = dir.path().join("out");
    let cmd = Command::Smooth { radii: vec![0, 2] };
    run(&manifest, &JobConfig::new(cmd, &out).with_jobs(3)).unwrap();
    let report = JobReport::load(out.join("report.json")).unwrap();
    let ids: Vec<&str> = report.entries.iter().map(|e| e.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert_eq!(ids.len(), manifest.entries.len());
    assert_eq!(report.command, "smooth");
    assert_eq!(report.config["radii"], serde_json::json!([0, 2]));
    assert_eq!(report.config["jobs"], 3);
    assert_eq!(report.tool_version, env!("CARGO_PKG_VERSION"));
}
