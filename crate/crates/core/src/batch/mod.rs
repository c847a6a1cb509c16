//! Manifest-driven batch jobs.
//!
//! A job validates the whole manifest first, then processes entries on a
//! worker pool, one entry per task. Every random draw is seeded from
//! `(base_seed, entry id, level, variant)`, so output bytes do not depend on
//! worker count, scheduling, or which other entries are in the manifest.
//! A failing entry is recorded in the report and never affects the others.
//!
//! Outputs land flat in the output directory as `{id}_{op}_{level}.png`,
//! alongside `report.json` (and `iou_per_class.csv` for `eval`).

mod manifest;
mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use manifest::{DatasetManifest, Field, ManifestEntry};
pub use report::{EntryReport, EntryStatus, JobReport};

use crate::ablation::{carve_edges, kuwahara, warp_labels, PerturbationKind};
use crate::augment::{resolution_pyramid, AugmentSpec, PYRAMID_LEVELS};
use crate::eps::{compose_eps_with_gain, detect_edges_fallback};
use crate::error::{Error, Result};
use crate::imagecore::{load_labels_png, load_png, save_labels_png, save_png, Channels, LabelMap, Palette, RasterImage};
use crate::metrics::{confusion, dataset_distribution, iou_from_confusion, write_distribution_csv, ConfusionMatrix, CSV_HEADER};
use crate::seed::derive_seed;

pub const REPORT_FILE: &str = "report.json";
pub const EVAL_CSV_FILE: &str = "iou_per_class.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeOptions {
    pub low: f64,
    pub high: f64,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        Self { low: 0.1, high: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// EPS maps from edges + segmentation.
    Compose {
        /// Derive edges from the image with the Sobel fallback detector.
        fallback_edges: bool,
        edge_gain: f64,
        edges: EdgeOptions,
    },
    /// Fallback edge maps from images.
    Edges { edges: EdgeOptions },
    Smooth { radii: Vec<u32> },
    Carve { levels: Vec<u32> },
    Warp { levels: Vec<u32> },
    Augment { spec: AugmentSpec, count: u32 },
    Pyramid,
    Eval { ignore: Option<u8> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Compose { .. } => "compose",
            Command::Edges { .. } => "edges",
            Command::Smooth { .. } => "smooth",
            Command::Carve { .. } => "carve",
            Command::Warp { .. } => "warp",
            Command::Augment { .. } => "augment",
            Command::Pyramid => "pyramid",
            Command::Eval { .. } => "eval",
        }
    }

    /// Manifest fields every entry must provide.
    pub fn required_fields(&self) -> Vec<Field> {
        match self {
            Command::Compose { fallback_edges: true, .. } => vec![Field::Image, Field::Segmentation],
            Command::Compose { .. } => vec![Field::Edges, Field::Segmentation],
            Command::Edges { .. } | Command::Smooth { .. } | Command::Augment { .. } | Command::Pyramid => {
                vec![Field::Image]
            }
            Command::Carve { .. } => vec![Field::Edges],
            Command::Warp { .. } => vec![Field::Segmentation],
            Command::Eval { .. } => vec![Field::Segmentation, Field::Candidate],
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Command::Compose { edge_gain, edges, .. } => {
                if !(edge_gain.is_finite() && *edge_gain >= 0.0) {
                    return bad(format!("edge gain must be >= 0, got {edge_gain}"));
                }
                validate_thresholds(edges)
            }
            Command::Edges { edges } => validate_thresholds(edges),
            Command::Smooth { radii: levels } | Command::Carve { levels } | Command::Warp { levels } => {
                if levels.is_empty() {
                    return bad(format!("{} needs at least one level", self.name()));
                }
                let mut sorted = levels.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != levels.len() {
                    return bad(format!("{} levels must be distinct, got {levels:?}", self.name()));
                }
                Ok(())
            }
            Command::Augment { spec, count } => {
                if *count == 0 {
                    return bad("augment count must be at least 1".into());
                }
                spec.validate()
            }
            Command::Pyramid | Command::Eval { .. } => Ok(()),
        }
    }
}

fn validate_thresholds(e: &EdgeOptions) -> Result<()> {
    if !(0.0..=1.0).contains(&e.low) || !(0.0..=1.0).contains(&e.high) || e.low > e.high {
        return Err(Error::InvalidParameter(format!(
            "edge thresholds must satisfy 0 <= low <= high <= 1, got low={} high={}",
            e.low, e.high
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    #[serde(flatten)]
    pub command: Command,
    pub out_dir: PathBuf,
    /// Overrides the manifest's `base_seed` when set.
    pub seed: Option<u64>,
    /// Worker threads; 0 means available parallelism.
    pub jobs: usize,
    /// L∞ tolerance when decoding color-coded segmentations.
    pub tolerance: u8,
}

impl JobConfig {
    pub fn new(command: Command, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            command,
            out_dir: out_dir.into(),
            seed: None,
            jobs: 0,
            tolerance: 0,
        }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }
}

struct Context<'a> {
    manifest: &'a DatasetManifest,
    palette: Palette,
    config: &'a JobConfig,
    base_seed: u64,
}

struct EntryOutcome {
    outputs: Vec<String>,
    metrics: Option<serde_json::Value>,
    matrix: Option<ConfusionMatrix>,
}

impl EntryOutcome {
    fn files(outputs: Vec<String>) -> Self {
        Self {
            outputs,
            metrics: None,
            matrix: None,
        }
    }
}

impl Context<'_> {
    fn path(&self, p: &Option<PathBuf>) -> PathBuf {
        self.manifest.resolve(p.as_deref().expect("validated before processing"))
    }

    fn load_labels(&self, entry: &ManifestEntry, p: &Option<PathBuf>) -> Result<LabelMap> {
        load_labels_png(self.path(p), entry.seg_encoding, &self.palette, self.config.tolerance)
    }

    fn load_edges(&self, p: &Option<PathBuf>) -> Result<RasterImage> {
        let path = self.path(p);
        let edges = load_png(&path)?;
        if edges.channels() != Channels::Gray {
            return Err(Error::InvalidRaster(format!(
                "{}: edge maps must be single-channel grayscale",
                path.display()
            )));
        }
        Ok(edges)
    }

    fn load_image(&self, p: &Option<PathBuf>) -> Result<RasterImage> {
        let path = self.path(p);
        let image = load_png(&path)?;
        if image.channels() != Channels::Rgb {
            return Err(Error::InvalidRaster(format!("{}: expected an RGB image", path.display())));
        }
        Ok(image)
    }

    fn save(&self, name: String, image: &RasterImage, outputs: &mut Vec<String>) -> Result<()> {
        save_png(image, self.config.out_dir.join(&name))?;
        outputs.push(name);
        Ok(())
    }

    fn save_labels(&self, entry: &ManifestEntry, name: String, labels: &LabelMap, outputs: &mut Vec<String>) -> Result<()> {
        save_labels_png(labels, entry.seg_encoding, &self.palette, self.config.out_dir.join(&name))?;
        outputs.push(name);
        Ok(())
    }

    fn process(&self, entry: &ManifestEntry) -> Result<EntryOutcome> {
        let id = &entry.id;
        let mut outputs = Vec::new();
        match &self.config.command {
            Command::Compose {
                fallback_edges,
                edge_gain,
                edges: thresholds,
            } => {
                let segmentation = self.load_labels(entry, &entry.segmentation)?;
                let (edges, edge_source) = if *fallback_edges {
                    let image = self.load_image(&entry.image)?;
                    let edges = detect_edges_fallback(&image, thresholds.low, thresholds.high)?;
                    (edges, "sobel-fallback".to_string())
                } else {
                    let src = self.path(&entry.edges).display().to_string();
                    (self.load_edges(&entry.edges)?, src)
                };
                let eps = compose_eps_with_gain(&edges, &segmentation, &self.palette, *edge_gain)?
                    .with_provenance(edge_source, self.path(&entry.segmentation).display().to_string());
                self.save(format!("{id}_eps.png"), &eps.raster, &mut outputs)?;
                Ok(EntryOutcome {
                    outputs,
                    metrics: Some(serde_json::to_value(&eps.provenance).expect("serializable")),
                    matrix: None,
                })
            }
            Command::Edges { edges: thresholds } => {
                let image = self.load_image(&entry.image)?;
                let edges = detect_edges_fallback(&image, thresholds.low, thresholds.high)?;
                self.save(format!("{id}_edges.png"), &edges, &mut outputs)?;
                Ok(EntryOutcome::files(outputs))
            }
            Command::Smooth { radii } => {
                let image = self.load_image(&entry.image)?;
                for &r in radii {
                    let out = if r == 0 { image.clone() } else { kuwahara(&image, r)? };
                    self.save(format!("{id}_{}_{r}.png", PerturbationKind::Smooth.name()), &out, &mut outputs)?;
                }
                Ok(EntryOutcome::files(outputs))
            }
            Command::Carve { levels } => {
                let edges = self.load_edges(&entry.edges)?;
                let mut nonzero = Vec::new();
                for &level in levels {
                    let out = carve_edges(&edges, level)?;
                    nonzero.push(out.data().iter().filter(|&&v| v > 0).count());
                    self.save(format!("{id}_{}_{level}.png", PerturbationKind::Carve.name()), &out, &mut outputs)?;
                }
                Ok(EntryOutcome {
                    outputs,
                    metrics: Some(json!({ "levels": levels, "nonzero_pixels": nonzero })),
                    matrix: None,
                })
            }
            Command::Warp { levels } => {
                let labels = self.load_labels(entry, &entry.segmentation)?;
                let mut mean_iou = Vec::new();
                for &level in levels {
                    let seed = derive_seed(self.base_seed, id, u64::from(level), 0);
                    let out = warp_labels(&labels, level, seed);
                    mean_iou.push(iou_from_confusion(&confusion(&labels, &out, None)?)?.mean_iou);
                    self.save_labels(entry, format!("{id}_{}_{level}.png", PerturbationKind::Warp.name()), &out, &mut outputs)?;
                }
                Ok(EntryOutcome {
                    outputs,
                    metrics: Some(json!({ "levels": levels, "mean_iou_vs_input": mean_iou })),
                    matrix: None,
                })
            }
            Command::Augment { spec, count } => {
                let image = self.load_image(&entry.image)?;
                let labels = match &entry.segmentation {
                    Some(_) => Some(self.load_labels(entry, &entry.segmentation)?),
                    None => None,
                };
                if let Some(l) = &labels {
                    if l.dimensions() != image.dimensions() {
                        return Err(Error::DimensionMismatch {
                            left_width: image.width(),
                            left_height: image.height(),
                            right_width: l.width(),
                            right_height: l.height(),
                        });
                    }
                }
                for k in 0..*count {
                    let variant = spec.with_seed(derive_seed(self.base_seed, id, 0, u64::from(k)));
                    let params = variant.sample()?;
                    let out = crate::augment::augment(&image, &variant)?;
                    self.save(format!("{id}_augment_{k}.png"), &out, &mut outputs)?;
                    if let Some(l) = &labels {
                        let out = params.apply_labels(l);
                        self.save_labels(entry, format!("{id}_augment_{k}_seg.png"), &out, &mut outputs)?;
                    }
                }
                Ok(EntryOutcome::files(outputs))
            }
            Command::Pyramid => {
                let image = self.load_image(&entry.image)?;
                for (level, &(w, h)) in resolution_pyramid(&image).iter().zip(PYRAMID_LEVELS.iter()) {
                    self.save(format!("{id}_{w}x{h}.png"), level, &mut outputs)?;
                }
                Ok(EntryOutcome::files(outputs))
            }
            Command::Eval { ignore } => {
                let reference = self.load_labels(entry, &entry.segmentation)?;
                let candidate = self.load_labels(entry, &entry.candidate)?;
                let m = confusion(&reference, &candidate, *ignore)?;
                let metrics = match iou_from_confusion(&m) {
                    Ok(r) => json!({ "mean_iou": r.mean_iou, "pixel_accuracy": r.pixel_accuracy }),
                    Err(Error::NoEvaluablePixels) => json!({ "mean_iou": null }),
                    Err(e) => return Err(e),
                };
                Ok(EntryOutcome {
                    outputs,
                    metrics: Some(metrics),
                    matrix: Some(m),
                })
            }
        }
    }
}

fn worker_count(jobs: usize) -> usize {
    if jobs > 0 {
        jobs
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

/// Runs one batch job end to end and writes `report.json`.
///
/// Returns `Err` only for problems that stop the whole job before entries
/// are processed (invalid configuration or manifest, unreadable palette,
/// unusable output directory) or, for `eval`, when no entry produced
/// evaluable pixels. Per-entry failures are recorded in the report.
pub fn run(manifest: &DatasetManifest, config: &JobConfig) -> Result<JobReport> {
    config.command.validate()?;
    manifest.validate(&config.command.required_fields())?;
    let palette = manifest.load_palette()?;
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;

    let ctx = Context {
        manifest,
        palette,
        config,
        base_seed: config.seed.unwrap_or(manifest.base_seed),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(config.jobs))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;

    let results: Vec<(EntryReport, Option<ConfusionMatrix>)> = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .map(|entry| {
                let start = Instant::now();
                let outcome = ctx.process(entry);
                let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
                match outcome {
                    Ok(o) => (
                        EntryReport {
                            id: entry.id.clone(),
                            status: EntryStatus::Ok,
                            message: None,
                            outputs: o.outputs,
                            metrics: o.metrics,
                            elapsed_ms,
                        },
                        o.matrix,
                    ),
                    Err(e) => (
                        EntryReport {
                            id: entry.id.clone(),
                            status: EntryStatus::Error,
                            message: Some(e.to_string()),
                            outputs: Vec::new(),
                            metrics: None,
                            elapsed_ms,
                        },
                        None,
                    ),
                }
            })
            .collect()
    });

    let aggregate = match &config.command {
        Command::Eval { .. } => Some(eval_aggregate(manifest, &ctx.palette, &results, &config.out_dir)?),
        _ => None,
    };

    let mut entries: Vec<EntryReport> = results.into_iter().map(|(r, _)| r).collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let report = JobReport {
        command: config.command.name().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        base_seed: ctx.base_seed,
        config: serde_json::to_value(config).expect("config is serializable"),
        entries,
        aggregate,
    };
    report.write(config.out_dir.join(REPORT_FILE))?;
    Ok(report)
}

/// Per-tag and overall IoU distributions; also writes the per-class CSV.
fn eval_aggregate(
    manifest: &DatasetManifest,
    palette: &Palette,
    results: &[(EntryReport, Option<ConfusionMatrix>)],
    out_dir: &Path,
) -> Result<serde_json::Value> {
    let mut groups: BTreeMap<String, Vec<ConfusionMatrix>> = BTreeMap::new();
    let mut all = Vec::new();
    for (entry, (_, matrix)) in manifest.entries.iter().zip(results) {
        if let Some(m) = matrix {
            all.push(m.clone());
            for tag in &entry.tags {
                groups.entry(tag.clone()).or_default().push(m.clone());
            }
        }
    }
    if all.is_empty() {
        return Err(Error::NoEvaluablePixels);
    }
    let overall = dataset_distribution(&all)?;
    let names: Vec<String> = palette.entries().iter().map(|e| e.name.clone()).collect();

    let csv_path = out_dir.join(EVAL_CSV_FILE);
    let file = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(CSV_HEADER)?;
    write_distribution_csv(&mut writer, "all", &overall, &names)?;

    let mut by_tag = serde_json::Map::new();
    for (tag, matrices) in &groups {
        // a tag whose pixels were all ignored has nothing to report
        match dataset_distribution(matrices) {
            Ok(dist) => {
                write_distribution_csv(&mut writer, tag, &dist, &names)?;
                by_tag.insert(tag.clone(), serde_json::to_value(&dist).expect("serializable"));
            }
            Err(Error::NoEvaluablePixels) => {
                by_tag.insert(tag.clone(), serde_json::Value::Null);
            }
            Err(e) => return Err(e),
        }
    }
    writer.flush().map_err(|e| Error::io(&csv_path, e))?;
    Ok(json!({
        "overall": overall,
        "by_tag": by_tag,
        "csv": EVAL_CSV_FILE,
    }))
}
