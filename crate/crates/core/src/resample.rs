//! Shared resampling kernels. Coordinates use the pixel-center convention and
//! all lookups clamp to the nearest edge pixel.

use crate::imagecore::{round_u8, LabelMap, RasterImage};

/// Bilinear sample at continuous source position `(sx, sy)` (pixel centers at
/// integer coordinates), written into `out`.
#[inline]
pub(crate) fn bilinear_at(image: &RasterImage, sx: f64, sy: f64, out: &mut [u8]) {
    let (w, h) = (image.width() as usize, image.height() as usize);
    let c = image.channels().count();
    let data = image.data();
    let sx = sx.clamp(0.0, (w - 1) as f64);
    let sy = sy.clamp(0.0, (h - 1) as f64);
    let x0 = sx.floor() as usize;
    let y0 = sy.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = sx - x0 as f64;
    let fy = sy - y0 as f64;
    for (k, o) in out.iter_mut().enumerate().take(c) {
        let p = |x: usize, y: usize| f64::from(data[(y * w + x) * c + k]);
        let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
        let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
        *o = round_u8(top * (1.0 - fy) + bottom * fy);
    }
}

/// Nearest-neighbor label lookup with half-up rounding and edge clamping.
#[inline]
pub(crate) fn nearest_label_at(labels: &LabelMap, sx: f64, sy: f64) -> u8 {
    let (w, h) = labels.dimensions();
    let x = (sx + 0.5).floor().clamp(0.0, f64::from(w - 1)) as u32;
    let y = (sy + 0.5).floor().clamp(0.0, f64::from(h - 1)) as u32;
    labels.get(x, y)
}

/// Source coordinate of destination pixel `d` when mapping `src` pixels onto `dst`.
#[inline]
fn scale_coord(d: u32, src: u32, dst: u32) -> f64 {
    (f64::from(d) + 0.5) * f64::from(src) / f64::from(dst) - 0.5
}

pub(crate) fn resize_bilinear(image: &RasterImage, width: u32, height: u32) -> RasterImage {
    if image.dimensions() == (width, height) {
        return image.clone();
    }
    let c = image.channels().count();
    let mut data = vec![0u8; width as usize * height as usize * c];
    let mut px = [0u8; 3];
    for y in 0..height {
        let sy = scale_coord(y, image.height(), height);
        for x in 0..width {
            let sx = scale_coord(x, image.width(), width);
            bilinear_at(image, sx, sy, &mut px);
            let i = (y as usize * width as usize + x as usize) * c;
            data[i..i + c].copy_from_slice(&px[..c]);
        }
    }
    RasterImage::new(width, height, image.channels(), data).expect("valid dimensions")
}

pub(crate) fn resize_nearest_labels(labels: &LabelMap, width: u32, height: u32) -> LabelMap {
    if labels.dimensions() == (width, height) {
        return labels.clone();
    }
    let mut out = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        let sy = scale_coord(y, labels.height(), height);
        for x in 0..width {
            out.push(nearest_label_at(labels, scale_coord(x, labels.width(), width), sy));
        }
    }
    labels.with_labels(width, height, out)
}

/// Per-destination-index list of `(source index, overlap weight)` for area
/// averaging along one axis. Weights of each destination sum to 1.
fn area_weights(src: u32, dst: u32) -> Vec<Vec<(usize, f64)>> {
    let scale = f64::from(src) / f64::from(dst);
    (0..dst)
        .map(|d| {
            let start = f64::from(d) * scale;
            let end = start + scale;
            let mut taps = Vec::new();
            let mut s = start.floor() as usize;
            while (s as f64) < end && s < src as usize {
                let overlap = (end.min(s as f64 + 1.0) - start.max(s as f64)).max(0.0);
                if overlap > 0.0 {
                    taps.push((s, overlap / scale));
                }
                s += 1;
            }
            taps
        })
        .collect()
}

/// Area-weighted (box) downsampling. Each destination pixel is the
/// overlap-weighted mean of the source pixels it covers.
pub(crate) fn resize_area(image: &RasterImage, width: u32, height: u32) -> RasterImage {
    if image.dimensions() == (width, height) {
        return image.clone();
    }
    let c = image.channels().count();
    let sw = image.width() as usize;
    let xs = area_weights(image.width(), width);
    let ys = area_weights(image.height(), height);
    let src = image.data();

    // horizontal pass into f64 rows, then vertical
    let mut rows = vec![0f64; image.height() as usize * width as usize * c];
    for y in 0..image.height() as usize {
        for (x, taps) in xs.iter().enumerate() {
            for k in 0..c {
                let v: f64 = taps
                    .iter()
                    .map(|&(s, wgt)| f64::from(src[(y * sw + s) * c + k]) * wgt)
                    .sum();
                rows[(y * width as usize + x) * c + k] = v;
            }
        }
    }
    let mut data = vec![0u8; width as usize * height as usize * c];
    for (y, taps) in ys.iter().enumerate() {
        for x in 0..width as usize {
            for k in 0..c {
                let v: f64 = taps
                    .iter()
                    .map(|&(s, wgt)| rows[(s * width as usize + x) * c + k] * wgt)
                    .sum();
                data[(y * width as usize + x) * c + k] = round_u8(v);
            }
        }
    }
    RasterImage::new(width, height, image.channels(), data).expect("valid dimensions")
}

/// Area averaging when shrinking along both axes, bilinear otherwise.
pub(crate) fn resize(image: &RasterImage, width: u32, height: u32) -> RasterImage {
    if width <= image.width() && height <= image.height() {
        resize_area(image, width, height)
    } else {
        resize_bilinear(image, width, height)
    }
}
