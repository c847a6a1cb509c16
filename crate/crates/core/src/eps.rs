//! EPS map construction.
//!
//! The color-coded segmentation is brightened by the grayscale edge map,
//! channel by channel, with saturation at 255. Edge maps follow the
//! "bright edge on black" convention.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{labels_to_color, round_u8, Channels, LabelMap, Palette, RasterImage};

/// Where the two ingredients of an EPS map came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub edge_source: String,
    pub segmentation_source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsMap {
    pub raster: RasterImage,
    pub provenance: Provenance,
}

impl EpsMap {
    pub fn with_provenance(
        mut self,
        edge_source: impl Into<String>,
        segmentation_source: impl Into<String>,
    ) -> Self {
        self.provenance = Provenance {
            edge_source: edge_source.into(),
            segmentation_source: segmentation_source.into(),
        };
        self
    }
}

pub fn compose_eps(edges: &RasterImage, segmentation: &LabelMap, palette: &Palette) -> Result<EpsMap> {
    compose_eps_with_gain(edges, segmentation, palette, 1.0)
}

/// Like [`compose_eps`], with edge intensities scaled by `gain` (rounded
/// half-up, saturated) before addition.
pub fn compose_eps_with_gain(
    edges: &RasterImage,
    segmentation: &LabelMap,
    palette: &Palette,
    gain: f64,
) -> Result<EpsMap> {
    edges.expect_channels(Channels::Gray)?;
    if !(gain.is_finite() && gain >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "edge gain must be finite and non-negative, got {gain}"
        )));
    }
    if edges.dimensions() != segmentation.dimensions() {
        return Err(Error::DimensionMismatch {
            left_width: edges.width(),
            left_height: edges.height(),
            right_width: segmentation.width(),
            right_height: segmentation.height(),
        });
    }
    let base = labels_to_color(segmentation, palette)?;
    let mut data = base.into_data();
    for (px, &e) in data.chunks_exact_mut(3).zip(edges.data()) {
        let e = if gain == 1.0 { e } else { round_u8(f64::from(e) * gain) };
        for c in px {
            *c = c.saturating_add(e);
        }
    }
    Ok(EpsMap {
        raster: RasterImage::new(edges.width(), edges.height(), Channels::Rgb, data)?,
        provenance: Provenance::default(),
    })
}

/// Largest Sobel gradient magnitude per unit of intensity range. Attained by
/// the neighborhood with the right column, bottom-center and top-right samples
/// at full scale: (gx, gy) = (4, 2), |g| = sqrt(20).
pub const SOBEL_MAX_GAIN: f64 = 4.472_135_954_999_579;

/// Sobel magnitude of the luma channel, normalized so the theoretical maximum
/// maps to 255. Borders are clamp-to-edge.
pub fn sobel_magnitude(image: &RasterImage) -> RasterImage {
    let (w, h) = (image.width() as usize, image.height() as usize);
    let luma = image.luma();
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, w as isize - 1) as usize;
        let y = y.clamp(0, h as isize - 1) as usize;
        luma[y * w + x]
    };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            out.push(round_u8(gx.hypot(gy) / SOBEL_MAX_GAIN));
        }
    }
    RasterImage::new(image.width(), image.height(), Channels::Gray, out)
        .expect("same dimensions as input")
}

/// Gradient-magnitude edge map with double-threshold hysteresis.
///
/// Thresholds are fractions of full scale. Magnitudes at or above `high` are
/// kept, magnitudes in `[low, high)` survive only when 8-connected (possibly
/// through other weak pixels) to a kept pixel, and the rest are zeroed.
/// Survivors keep their graded magnitude.
pub fn detect_edges_fallback(image: &RasterImage, low: f64, high: f64) -> Result<RasterImage> {
    image.expect_channels(Channels::Rgb)?;
    if !(0.0..=1.0).contains(&low) || !(0.0..=1.0).contains(&high) || low > high {
        return Err(Error::InvalidParameter(format!(
            "edge thresholds must satisfy 0 <= low <= high <= 1, got low={low} high={high}"
        )));
    }
    let magnitude = sobel_magnitude(image);
    let (w, h) = (image.width() as usize, image.height() as usize);
    let (low, high) = (low * 255.0, high * 255.0);
    let mag = magnitude.data();

    let mut keep = vec![false; w * h];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, &m) in mag.iter().enumerate() {
        if f64::from(m) >= high {
            keep[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !keep[j] && f64::from(mag[j]) >= low {
                    keep[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    let data = mag
        .iter()
        .zip(&keep)
        .map(|(&m, &k)| if k { m } else { 0 })
        .collect();
    RasterImage::new(image.width(), image.height(), Channels::Gray, data)
}
