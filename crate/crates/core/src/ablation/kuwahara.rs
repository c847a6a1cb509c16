use crate::error::{Error, Result};
use crate::imagecore::{Channels, RasterImage};

/// Rec. 601 luma scaled by 1000 so variance comparisons stay in exact integers.
#[inline]
fn luma_milli(px: &[u8]) -> u64 {
    match px.len() {
        1 => 1000 * u64::from(px[0]),
        _ => 299 * u64::from(px[0]) + 587 * u64::from(px[1]) + 114 * u64::from(px[2]),
    }
}

/// Summed-area table over a clamp-to-edge padded copy of the image.
struct Integral<T> {
    stride: usize,
    sums: Vec<T>,
}

impl<T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T>> Integral<T> {
    fn build(width: usize, height: usize, value: impl Fn(usize, usize) -> T) -> Self {
        let stride = width + 1;
        let mut sums = vec![T::default(); stride * (height + 1)];
        for y in 0..height {
            let mut row = T::default();
            for x in 0..width {
                row = row + value(x, y);
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Self { stride, sums }
    }

    /// Sum over the inclusive box `[x0, x1] × [y0, y1]`.
    #[inline]
    fn sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> T {
        let s = self.stride;
        self.sums[(y1 + 1) * s + x1 + 1] + self.sums[y0 * s + x0]
            - self.sums[y0 * s + x1 + 1]
            - self.sums[(y1 + 1) * s + x0]
    }
}

/// Classic four-quadrant Kuwahara filter.
///
/// Each output pixel takes the per-channel mean of whichever of the four
/// `(r+1)×(r+1)` quadrants (NW, NE, SW, SE) around it has the lowest luma
/// variance. Ties go to the earlier quadrant in that order. Borders are
/// clamp-to-edge and means round half-up.
pub fn kuwahara(image: &RasterImage, radius: u32) -> Result<RasterImage> {
    if radius < 1 {
        return Err(Error::InvalidParameter(
            "Kuwahara radius must be at least 1 (level 0 is the identity)".into(),
        ));
    }
    let (w, h) = (image.width() as usize, image.height() as usize);
    let c = image.channels().count();
    let r = radius as usize;
    let (pw, ph) = (w + 2 * r, h + 2 * r);
    let data = image.data();
    let src = |px: usize, py: usize| {
        let x = px.saturating_sub(r).min(w - 1);
        let y = py.saturating_sub(r).min(h - 1);
        &data[(y * w + x) * c..(y * w + x) * c + c]
    };

    let luma = Integral::<u64>::build(pw, ph, |x, y| luma_milli(src(x, y)));
    let luma_sq = Integral::<u128>::build(pw, ph, |x, y| {
        let l = u128::from(luma_milli(src(x, y)));
        l * l
    });
    let channel: Vec<Integral<u64>> = (0..c)
        .map(|k| Integral::<u64>::build(pw, ph, |x, y| u64::from(src(x, y)[k])))
        .collect();

    let n = ((r + 1) * (r + 1)) as u64;
    let mut out = Vec::with_capacity(w * h * c);
    for y in 0..h {
        for x in 0..w {
            // quadrant origins in padded coordinates: NW, NE, SW, SE
            let origins = [(x, y), (x + r, y), (x, y + r), (x + r, y + r)];
            let mut best = origins[0];
            let mut best_spread = u128::MAX;
            for &(qx, qy) in &origins {
                let s = u128::from(luma.sum(qx, qy, qx + r, qy + r));
                let s2 = luma_sq.sum(qx, qy, qx + r, qy + r);
                // n² · variance
                let spread = u128::from(n) * s2 - s * s;
                if spread < best_spread {
                    best_spread = spread;
                    best = (qx, qy);
                }
            }
            for table in &channel {
                let s = table.sum(best.0, best.1, best.0 + r, best.1 + r);
                out.push(((2 * s + n) / (2 * n)) as u8);
            }
        }
    }
    let channels = if c == 1 { Channels::Gray } else { Channels::Rgb };
    RasterImage::new(image.width(), image.height(), channels, out)
}
