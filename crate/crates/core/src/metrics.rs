//! Segmentation agreement metrics.
//!
//! Two label maps of the same scene (conventionally: the segmentation of an
//! input image and of the corresponding generated image) are tallied into a
//! [`ConfusionMatrix`]; IoU statistics derive from it. Matrices add, so
//! per-image tallies can be computed in parallel and merged.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::LabelMap;

/// `counts[i * K + j]` = pixels with reference class `i` and candidate class `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<u64>,
    ignored: u64,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        Self {
            classes,
            counts: vec![0; classes * classes],
            ignored: 0,
        }
    }

    pub fn from_counts(classes: usize, counts: Vec<u64>, ignored: u64) -> Result<Self> {
        if counts.len() != classes * classes {
            return Err(Error::InvalidParameter(format!(
                "{classes} classes need {} counts, got {}",
                classes * classes,
                counts.len()
            )));
        }
        Ok(Self {
            classes,
            counts,
            ignored,
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, reference: usize, candidate: usize) -> u64 {
        self.counts[reference * self.classes + candidate]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn ignored(&self) -> u64 {
        self.ignored
    }

    /// Pixels tallied into the matrix (ignored pixels excluded).
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes).map(|c| self.get(c, c)).sum()
    }

    fn row_sum(&self, c: usize) -> u64 {
        self.counts[c * self.classes..(c + 1) * self.classes].iter().sum()
    }

    fn col_sum(&self, c: usize) -> u64 {
        (0..self.classes).map(|r| self.get(r, c)).sum()
    }

    /// Element-wise accumulation.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.classes != self.classes {
            return Err(Error::ClassCountMismatch(self.classes, other.classes));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.ignored += other.ignored;
        Ok(())
    }

    /// The same tally with reference and candidate roles exchanged.
    pub fn transposed(&self) -> Self {
        let k = self.classes;
        let counts = (0..k * k).map(|idx| self.get(idx % k, idx / k)).collect();
        Self {
            classes: k,
            counts,
            ignored: self.ignored,
        }
    }

    /// IoU of one class, `None` when the class is absent from both maps.
    pub fn class_iou(&self, c: usize) -> Option<f64> {
        let tp = self.get(c, c);
        let union = self.row_sum(c) + self.col_sum(c) - tp;
        (union > 0).then(|| tp as f64 / union as f64)
    }
}

/// Tallies reference/candidate label pairs pixel by pixel. Pixels whose
/// reference label equals `ignore` are counted separately.
pub fn confusion(reference: &LabelMap, candidate: &LabelMap, ignore: Option<u8>) -> Result<ConfusionMatrix> {
    if reference.dimensions() != candidate.dimensions() {
        return Err(Error::DimensionMismatch {
            left_width: reference.width(),
            left_height: reference.height(),
            right_width: candidate.width(),
            right_height: candidate.height(),
        });
    }
    if reference.classes() != candidate.classes() {
        return Err(Error::ClassCountMismatch(reference.classes(), candidate.classes()));
    }
    let k = reference.classes();
    let mut m = ConfusionMatrix::new(k);
    for (&r, &c) in reference.labels().iter().zip(candidate.labels()) {
        if Some(r) == ignore {
            m.ignored += 1;
        } else {
            m.counts[r as usize * k + c as usize] += 1;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassIou {
    pub class: usize,
    pub iou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IouReport {
    pub per_class: Vec<ClassIou>,
    pub mean_iou: f64,
    pub pixel_accuracy: f64,
    pub images_evaluated: usize,
}

/// Per-class IoU, mean IoU over classes present in either map, and pixel accuracy.
pub fn iou_from_confusion(m: &ConfusionMatrix) -> Result<IouReport> {
    iou_report(m, 1)
}

fn iou_report(m: &ConfusionMatrix, images: usize) -> Result<IouReport> {
    let per_class: Vec<ClassIou> = (0..m.classes())
        .map(|class| ClassIou {
            class,
            iou: m.class_iou(class),
        })
        .collect();
    let defined: Vec<f64> = per_class.iter().filter_map(|c| c.iou).collect();
    if defined.is_empty() {
        return Err(Error::NoEvaluablePixels);
    }
    Ok(IouReport {
        mean_iou: defined.iter().sum::<f64>() / defined.len() as f64,
        pixel_accuracy: m.trace() as f64 / m.total() as f64,
        per_class,
        images_evaluated: images,
    })
}

/// Box-plot statistics of one class's per-image IoU values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub class: usize,
    pub count: usize,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDistribution {
    pub per_class: Vec<ClassDistribution>,
    /// IoU of the summed confusion matrix.
    pub overall: IouReport,
}

/// Quantile with linear interpolation between order statistics (`p` in `[0, 1]`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Per-class distribution of per-image IoU plus the micro-averaged overall report.
pub fn dataset_distribution(matrices: &[ConfusionMatrix]) -> Result<DatasetDistribution> {
    let first = matrices.first().ok_or(Error::EmptyInput("no confusion matrices"))?;
    let k = first.classes();
    let mut summed = ConfusionMatrix::new(k);
    for m in matrices {
        summed.merge(m)?;
    }
    let per_class = (0..k)
        .map(|class| {
            let mut values: Vec<f64> = matrices.iter().filter_map(|m| m.class_iou(class)).collect();
            values.sort_by(f64::total_cmp);
            let stat = |p: f64| (!values.is_empty()).then(|| quantile(&values, p));
            ClassDistribution {
                class,
                count: values.len(),
                min: values.first().copied(),
                q1: stat(0.25),
                median: stat(0.5),
                q3: stat(0.75),
                max: values.last().copied(),
                mean: (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64),
            }
        })
        .collect();
    Ok(DatasetDistribution {
        per_class,
        overall: iou_report(&summed, matrices.len())?,
    })
}

fn fmt3(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.3}")).unwrap_or_default()
}

/// Writes one CSV row per class with box-plot statistics, followed by a
/// summary row. `group` labels every row (e.g. a dataset tag) and class names
/// come from `names` when available.
pub fn write_distribution_csv<W: Write>(
    writer: &mut csv::Writer<W>,
    group: &str,
    dist: &DatasetDistribution,
    names: &[String],
) -> Result<()> {
    for c in &dist.per_class {
        let name = names.get(c.class).cloned().unwrap_or_else(|| c.class.to_string());
        let overall = dist.overall.per_class.get(c.class).and_then(|p| p.iou);
        writer.write_record([
            group.to_string(),
            c.class.to_string(),
            name,
            c.count.to_string(),
            fmt3(c.min),
            fmt3(c.q1),
            fmt3(c.median),
            fmt3(c.q3),
            fmt3(c.max),
            fmt3(c.mean),
            fmt3(overall),
        ])?;
    }
    writer.write_record([
        group.to_string(),
        String::new(),
        "mean_iou".to_string(),
        dist.overall.images_evaluated.to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        format!("{:.3}", dist.overall.mean_iou),
    ])?;
    Ok(())
}

pub const CSV_HEADER: [&str; 11] = [
    "group", "class", "name", "count", "min", "q1", "median", "q3", "max", "mean", "overall_iou",
];
