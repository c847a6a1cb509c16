use std::f64::consts::TAU;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::imagecore::LabelMap;
use crate::resample::nearest_label_at;
use crate::seed::{rng, Rng};

/// Control-grid columns and rows of the fine warp stage.
pub const FINE_GRID: (usize, usize) = (7, 5);
/// Control-grid columns and rows of the coarse warp stage.
pub const COARSE_GRID: (usize, usize) = (3, 3);

/// Displacement field defined on a regular control grid spanning the image,
/// border nodes included, with bilinear interpolation inside each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpField {
    cols: usize,
    rows: usize,
    /// Row-major `(dx, dy)` per control node.
    offsets: Vec<(f64, f64)>,
}

impl WarpField {
    pub fn zero(cols: usize, rows: usize) -> Self {
        assert!(cols >= 2 && rows >= 2, "control grid needs at least 2x2 nodes");
        Self {
            cols,
            rows,
            offsets: vec![(0.0, 0.0); cols * rows],
        }
    }

    /// 7×5 grid whose interior nodes move by independent `N(0, level²)`
    /// offsets per axis, drawn row-major, x before y.
    pub fn fine(level: u32, rng: &mut Rng) -> Self {
        let (cols, rows) = FINE_GRID;
        let mut field = Self::zero(cols, rows);
        if level == 0 {
            return field;
        }
        let normal = Normal::new(0.0, f64::from(level)).expect("positive standard deviation");
        for j in 1..rows - 1 {
            for i in 1..cols - 1 {
                let dx = normal.sample(rng);
                let dy = normal.sample(rng);
                field.offsets[j * cols + i] = (dx, dy);
            }
        }
        field
    }

    /// 3×3 grid whose center node moves `2 · level` pixels in a uniformly
    /// random direction.
    pub fn coarse(level: u32, rng: &mut Rng) -> Self {
        let (cols, rows) = COARSE_GRID;
        let mut field = Self::zero(cols, rows);
        let theta = rng.random::<f64>() * TAU;
        let dist = 2.0 * f64::from(level);
        field.offsets[cols + 1] = (dist * theta.cos(), dist * theta.sin());
        field
    }

    pub fn node(&self, col: usize, row: usize) -> (f64, f64) {
        self.offsets[row * self.cols + col]
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    /// Cell index and fractional position of coordinate `p` on an axis of
    /// `len` pixels split into `cells` equal cells.
    fn locate(p: u32, len: u32, cells: usize) -> (usize, f64) {
        if len <= 1 {
            return (0, 0.0);
        }
        let g = f64::from(p) * cells as f64 / f64::from(len - 1);
        let cell = (g.floor() as usize).min(cells - 1);
        (cell, g - cell as f64)
    }

    /// Interpolated displacement at pixel `(x, y)` of a `width × height` image.
    pub fn displacement(&self, x: u32, y: u32, width: u32, height: u32) -> (f64, f64) {
        let (i, tx) = Self::locate(x, width, self.cols - 1);
        let (j, ty) = Self::locate(y, height, self.rows - 1);
        self.interpolate(i, tx, j, ty)
    }

    #[inline]
    fn interpolate(&self, i: usize, tx: f64, j: usize, ty: f64) -> (f64, f64) {
        let a = self.node(i, j);
        let b = self.node(i + 1, j);
        let c = self.node(i, j + 1);
        let d = self.node(i + 1, j + 1);
        let lerp = |p: f64, q: f64, t: f64| p + (q - p) * t;
        (
            lerp(lerp(a.0, b.0, tx), lerp(c.0, d.0, tx), ty),
            lerp(lerp(a.1, b.1, tx), lerp(c.1, d.1, tx), ty),
        )
    }

    /// Backward-maps the label map through the field: output `(x, y)` takes
    /// the nearest source label at `(x, y) + displacement`, clamped to bounds.
    pub fn apply(&self, labels: &LabelMap) -> LabelMap {
        let (w, h) = labels.dimensions();
        if self.offsets.iter().all(|&(dx, dy)| dx == 0.0 && dy == 0.0) {
            return labels.clone();
        }
        let columns: Vec<(usize, f64)> = (0..w).map(|x| Self::locate(x, w, self.cols - 1)).collect();
        let mut out = Vec::with_capacity(w as usize * h as usize);
        for y in 0..h {
            let (j, ty) = Self::locate(y, h, self.rows - 1);
            for (x, &(i, tx)) in columns.iter().enumerate() {
                let (dx, dy) = self.interpolate(i, tx, j, ty);
                out.push(nearest_label_at(labels, x as f64 + dx, f64::from(y) + dy));
            }
        }
        labels.with_labels(w, h, out)
    }
}

/// Two-scale mesh warp of a segmentation map.
///
/// A fine 7×5 Gaussian jitter of the interior control nodes is followed by a
/// coarse 3×3 warp that pushes the center node `2 · level` pixels. Sampling is
/// nearest-neighbor so every output label already occurs in the input. The
/// result depends only on `(labels, level, seed)`.
pub fn warp_labels(labels: &LabelMap, level: u32, seed: u64) -> LabelMap {
    if level == 0 {
        return labels.clone();
    }
    let mut rng = rng(seed);
    let fine = WarpField::fine(level, &mut rng);
    let coarse = WarpField::coarse(level, &mut rng);
    coarse.apply(&fine.apply(labels))
}
