#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use epsmap::ablation::warp_labels;
use epsmap::batch::{DatasetManifest, ManifestEntry};
use epsmap::eps::detect_edges_fallback;
use epsmap::imagecore::{save_labels_png, save_png};
use epsmap::synth::{render_photo, street_scene, SOURCES};
use epsmap::{LabelEncoding, LabelMap, Palette, RasterImage};

/// Writes `per_source` synthetic entries for each of the four sources into
/// `dir` (image, color segmentation, fallback edges, and a lightly warped
/// candidate segmentation) plus `manifest.json`, and returns the manifest.
pub fn synthetic_dataset(dir: &Path, per_source: usize, width: u32, height: u32) -> DatasetManifest {
    let palette = Palette::cityscapes();
    let inputs = dir.join("inputs");
    fs::create_dir_all(&inputs).unwrap();
    let mut entries = Vec::new();
    for (s, source) in SOURCES.iter().enumerate() {
        for i in 0..per_source {
            let id = format!("{source}_{i:03}");
            let seed = (s * 1000 + i) as u64;
            let labels = street_scene(width, height, seed);
            let photo = render_photo(&labels, &palette, source, seed);
            let edges = detect_edges_fallback(&photo, 0.1, 0.3).unwrap();
            let candidate = warp_labels(&labels, 2, seed);
            let rel = |suffix: &str| PathBuf::from("inputs").join(format!("{id}_{suffix}.png"));
            save_png(&photo, dir.join(rel("image"))).unwrap();
            save_png(&edges, dir.join(rel("edges"))).unwrap();
            save_labels_png(&labels, LabelEncoding::Color, &palette, dir.join(rel("seg"))).unwrap();
            save_labels_png(&candidate, LabelEncoding::Color, &palette, dir.join(rel("cand"))).unwrap();
            let mut e = ManifestEntry::new(id.clone());
            e.image = Some(rel("image"));
            e.edges = Some(rel("edges"));
            e.segmentation = Some(rel("seg"));
            e.candidate = Some(rel("cand"));
            e.tags = vec![source.to_string()];
            entries.push(e);
        }
    }
    let manifest = DatasetManifest::new(entries, 2024);
    let path = dir.join("manifest.json");
    manifest.save(&path).unwrap();
    DatasetManifest::load(&path).unwrap()
}

/// Every file under `dir` (recursively) keyed by relative path.
pub fn tree_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

/// Per-class IoU from explicit pixel-index sets: |A ∩ B| / |A ∪ B|.
pub fn iou_set_oracle(reference: &LabelMap, candidate: &LabelMap, ignore: Option<u8>) -> Vec<Option<f64>> {
    let k = reference.classes();
    (0..k)
        .map(|c| {
            let select = |m: &LabelMap| -> HashSet<usize> {
                m.labels()
                    .iter()
                    .enumerate()
                    .filter(|&(i, &l)| l as usize == c && Some(reference.labels()[i]) != ignore)
                    .map(|(i, _)| i)
                    .collect()
            };
            let a = select(reference);
            let b = select(candidate);
            let union = a.union(&b).count();
            (union > 0).then(|| a.intersection(&b).count() as f64 / union as f64)
        })
        .collect()
}

pub fn mean_defined(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Four-quadrant Kuwahara evaluated pixel by pixel with no precomputation.
pub fn kuwahara_oracle(image: &RasterImage, r: u32) -> RasterImage {
    let (w, h) = (image.width() as i64, image.height() as i64);
    let c = image.channels().count();
    let r = i64::from(r);
    let sample = |x: i64, y: i64| image.pixel(x.clamp(0, w - 1) as u32, y.clamp(0, h - 1) as u32).to_vec();
    let luma = |p: &[u8]| -> i128 {
        if p.len() == 1 {
            1000 * i128::from(p[0])
        } else {
            299 * i128::from(p[0]) + 587 * i128::from(p[1]) + 114 * i128::from(p[2])
        }
    };
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            // NW, NE, SW, SE
            let quads = [(x - r, y - r), (x, y - r), (x - r, y), (x, y)];
            let mut best: Option<(i128, Vec<Vec<u8>>)> = None;
            for (qx, qy) in quads {
                let pixels: Vec<Vec<u8>> = (qy..=qy + r)
                    .flat_map(|yy| (qx..=qx + r).map(move |xx| (xx, yy)))
                    .map(|(xx, yy)| sample(xx, yy))
                    .collect();
                let n = pixels.len() as i128;
                let s: i128 = pixels.iter().map(|p| luma(p)).sum();
                // Σ (n·L − S)² is n³ times the variance; same ordering
                let spread: i128 = pixels.iter().map(|p| (n * luma(p) - s).pow(2)).sum();
                if best.as_ref().is_none_or(|(b, _)| spread < *b) {
                    best = Some((spread, pixels));
                }
            }
            let (_, pixels) = best.unwrap();
            for k in 0..c {
                let mean = pixels.iter().map(|p| f64::from(p[k])).sum::<f64>() / pixels.len() as f64;
                out.push((mean + 0.5).floor() as u8);
            }
        }
    }
    RasterImage::new(image.width(), image.height(), image.channels(), out).unwrap()
}
