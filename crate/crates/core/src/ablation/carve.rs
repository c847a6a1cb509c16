use crate::error::Result;
use crate::imagecore::{Channels, RasterImage};

/// Smallest 8-bit intensity at or above 64% of full scale (0.64 · 255 = 163.2).
pub const CARVE_THRESHOLD: u8 = 164;

/// Zeroes every sample below [`CARVE_THRESHOLD`]; survivors keep their value.
pub fn carve_threshold(edges: &RasterImage) -> RasterImage {
    let data = edges
        .data()
        .iter()
        .map(|&v| if v >= CARVE_THRESHOLD { v } else { 0 })
        .collect();
    RasterImage::new(edges.width(), edges.height(), edges.channels(), data).expect("same shape")
}

/// 3×3 normalized box blur, clamp-to-edge, rounded half-up.
pub fn box_blur_3x3(image: &RasterImage) -> RasterImage {
    let (w, h) = (image.width() as usize, image.height() as usize);
    let c = image.channels().count();
    let src = image.data();
    // horizontal sums of three, then vertical sums of three
    let mut rows = vec![0u32; w * h * c];
    for y in 0..h {
        for x in 0..w {
            let xs = [x.saturating_sub(1), x, (x + 1).min(w - 1)];
            for k in 0..c {
                rows[(y * w + x) * c + k] = xs.iter().map(|&sx| u32::from(src[(y * w + sx) * c + k])).sum();
            }
        }
    }
    let mut out = vec![0u8; w * h * c];
    for y in 0..h {
        let ys = [y.saturating_sub(1), y, (y + 1).min(h - 1)];
        for x in 0..w {
            for k in 0..c {
                let sum: u32 = ys.iter().map(|&sy| rows[(sy * w + x) * c + k]).sum();
                out[(y * w + x) * c + k] = ((2 * sum + 9) / 18) as u8;
            }
        }
    }
    RasterImage::new(image.width(), image.height(), image.channels(), out).expect("same shape")
}

/// One carving iteration: threshold, then blur.
pub fn carve_step(edges: &RasterImage) -> RasterImage {
    box_blur_3x3(&carve_threshold(edges))
}

/// Applies `level` carving iterations to a grayscale edge map. Level 0 returns
/// the input unchanged.
pub fn carve_edges(edges: &RasterImage, level: u32) -> Result<RasterImage> {
    edges.expect_channels(Channels::Gray)?;
    let mut current = edges.clone();
    for _ in 0..level {
        current = carve_step(&current);
    }
    Ok(current)
}
