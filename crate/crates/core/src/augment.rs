//! Training-data augmentation and the progressive-resolution pyramid.
//!
//! [`augment`] chains a random rotation, a random crop and a random uniform
//! scale. All randomness is drawn up front into [`AugmentParams`], so an
//! image and its label map can be pushed through the identical geometry:
//! bilinear for the image, nearest-neighbor for the labels.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{LabelMap, RasterImage};
use crate::resample::{bilinear_at, nearest_label_at, resize, resize_area, resize_bilinear, resize_nearest_labels};
use crate::seed::rng;

/// The four training resolutions, smallest first; each doubles the previous.
pub const PYRAMID_LEVELS: [(u32, u32); 4] = [(128, 72), (256, 144), (512, 288), (1024, 576)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentSpec {
    /// Rotation angle is uniform in `[-max_angle, max_angle]` degrees.
    pub max_angle: f64,
    /// Minimum retained fraction of each dimension in the crop.
    pub min_keep: f64,
    /// Uniform scale factor range `[low, high]`.
    pub scale_range: [f64; 2],
    pub seed: u64,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        Self {
            max_angle: 7.0,
            min_keep: 0.5,
            scale_range: [0.8, 1.2],
            seed: 0,
        }
    }
}

impl AugmentSpec {
    /// Parameters that leave every image unchanged.
    pub fn identity() -> Self {
        Self {
            max_angle: 0.0,
            min_keep: 1.0,
            scale_range: [1.0, 1.0],
            seed: 0,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.scale_range;
        if !(self.max_angle.is_finite() && self.max_angle >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "max_angle must be >= 0, got {}",
                self.max_angle
            )));
        }
        if !(self.min_keep > 0.0 && self.min_keep <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "min_keep must be in (0, 1], got {}",
                self.min_keep
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::InvalidParameter(format!(
                "scale_range must satisfy 0 < low <= high, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Draws one set of transform parameters from this spec's seed.
    pub fn sample(&self) -> Result<AugmentParams> {
        self.validate()?;
        let mut r = rng(self.seed);
        let mut u = || r.random::<f64>();
        let angle = self.max_angle * (2.0 * u() - 1.0);
        let center = (u(), u());
        let keep = (
            self.min_keep + (1.0 - self.min_keep) * u(),
            self.min_keep + (1.0 - self.min_keep) * u(),
        );
        let offset = (u(), u());
        let [lo, hi] = self.scale_range;
        let scale = lo + (hi - lo) * u();
        Ok(AugmentParams {
            angle_degrees: angle,
            center,
            keep,
            offset,
            scale,
        })
    }
}

/// One concrete augmentation. Positional quantities are fractions so the
/// same parameters apply to any image size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    pub angle_degrees: f64,
    /// Rotation center as fractions of `(width - 1, height - 1)`.
    pub center: (f64, f64),
    /// Retained fraction per dimension.
    pub keep: (f64, f64),
    /// Crop offset as a fraction of the available slack.
    pub offset: (f64, f64),
    pub scale: f64,
}

/// Pixel-space crop rectangle and output size for an input of a given size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CropPlan {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
    pub out_width: u32,
    pub out_height: u32,
}

impl AugmentParams {
    pub fn plan(&self, width: u32, height: u32) -> CropPlan {
        let span = |len: u32, keep: f64, offset: f64| {
            let size = ((f64::from(len) * keep).round() as u32).clamp(1, len);
            let slack = len - size;
            let start = ((offset * f64::from(slack + 1)).floor() as u32).min(slack);
            (start, size)
        };
        let (x, cw) = span(width, self.keep.0, self.offset.0);
        let (y, ch) = span(height, self.keep.1, self.offset.1);
        let out = |len: u32| ((f64::from(len) * self.scale).round() as u32).max(1);
        CropPlan {
            x,
            y,
            width: cw,
            height: ch,
            out_width: out(cw),
            out_height: out(ch),
        }
    }

    /// Inverse rotation: destination pixel to source coordinate.
    fn rotation(&self, width: u32, height: u32) -> Option<impl Fn(f64, f64) -> (f64, f64)> {
        if self.angle_degrees == 0.0 {
            return None;
        }
        let cx = self.center.0 * f64::from(width - 1);
        let cy = self.center.1 * f64::from(height - 1);
        let (sin, cos) = self.angle_degrees.to_radians().sin_cos();
        Some(move |x: f64, y: f64| {
            let (dx, dy) = (x - cx, y - cy);
            (cx + cos * dx + sin * dy, cy - sin * dx + cos * dy)
        })
    }

    pub fn apply_image(&self, image: &RasterImage) -> Result<RasterImage> {
        let (w, h) = image.dimensions();
        let c = image.channels().count();
        let rotated = match self.rotation(w, h) {
            None => image.clone(),
            Some(inverse) => {
                let mut data = vec![0u8; image.data().len()];
                let mut px = [0u8; 3];
                for y in 0..h {
                    for x in 0..w {
                        let (sx, sy) = inverse(f64::from(x), f64::from(y));
                        bilinear_at(image, sx, sy, &mut px);
                        let i = (y as usize * w as usize + x as usize) * c;
                        data[i..i + c].copy_from_slice(&px[..c]);
                    }
                }
                RasterImage::new(w, h, image.channels(), data)?
            }
        };
        let plan = self.plan(w, h);
        let cropped = crop_raster(&rotated, &plan)?;
        Ok(resize_bilinear(&cropped, plan.out_width, plan.out_height))
    }

    pub fn apply_labels(&self, labels: &LabelMap) -> LabelMap {
        let (w, h) = labels.dimensions();
        let rotated = match self.rotation(w, h) {
            None => labels.clone(),
            Some(inverse) => {
                let mut out = Vec::with_capacity(labels.labels().len());
                for y in 0..h {
                    for x in 0..w {
                        let (sx, sy) = inverse(f64::from(x), f64::from(y));
                        out.push(nearest_label_at(labels, sx, sy));
                    }
                }
                labels.with_labels(w, h, out)
            }
        };
        let plan = self.plan(w, h);
        let mut cropped = Vec::with_capacity(plan.width as usize * plan.height as usize);
        for y in plan.y..plan.y + plan.height {
            for x in plan.x..plan.x + plan.width {
                cropped.push(rotated.get(x, y));
            }
        }
        let cropped = rotated.with_labels(plan.width, plan.height, cropped);
        resize_nearest_labels(&cropped, plan.out_width, plan.out_height)
    }
}

fn crop_raster(image: &RasterImage, plan: &CropPlan) -> Result<RasterImage> {
    if (plan.x, plan.y) == (0, 0) && (plan.width, plan.height) == image.dimensions() {
        return Ok(image.clone());
    }
    let c = image.channels().count();
    let w = image.width() as usize;
    let mut data = Vec::with_capacity(plan.width as usize * plan.height as usize * c);
    for y in plan.y as usize..(plan.y + plan.height) as usize {
        let start = (y * w + plan.x as usize) * c;
        data.extend_from_slice(&image.data()[start..start + plan.width as usize * c]);
    }
    RasterImage::new(plan.width, plan.height, image.channels(), data)
}

/// Rotate, crop and scale `image` with parameters drawn from `spec`.
pub fn augment(image: &RasterImage, spec: &AugmentSpec) -> Result<RasterImage> {
    if image.width() < 2 || image.height() < 2 {
        return Err(Error::InvalidParameter(format!(
            "augmentation needs at least a 2x2 image, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    spec.sample()?.apply_image(image)
}

/// Augments an image and its label map with identical geometry.
pub fn augment_pair(image: &RasterImage, labels: &LabelMap, spec: &AugmentSpec) -> Result<(RasterImage, LabelMap)> {
    if image.dimensions() != labels.dimensions() {
        return Err(Error::DimensionMismatch {
            left_width: image.width(),
            left_height: image.height(),
            right_width: labels.width(),
            right_height: labels.height(),
        });
    }
    let params = spec.sample()?;
    Ok((augment(image, spec)?, params.apply_labels(labels)))
}

/// The image at each of [`PYRAMID_LEVELS`], smallest first.
///
/// The source is first brought to 1024×576 (area averaging when shrinking,
/// bilinear otherwise); the smaller levels are area averages of that base.
pub fn resolution_pyramid(image: &RasterImage) -> Vec<RasterImage> {
    let (bw, bh) = PYRAMID_LEVELS[3];
    let base = resize(image, bw, bh);
    PYRAMID_LEVELS
        .iter()
        .map(|&(w, h)| resize_area(&base, w, h))
        .collect()
}
