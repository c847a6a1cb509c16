//! Deterministic synthetic street scenes.
//!
//! Used by the bundled examples and the test suites in place of real
//! datasets: a layered label map with sky, buildings, vegetation, a
//! perspective road with sidewalks, cars, poles and signs (Cityscapes class
//! ids), and a textured "photo" rendered from it.

use rand::Rng as _;

use crate::imagecore::{LabelMap, Palette, RasterImage};
use crate::seed::{rng, Rng};

pub const ROAD: u8 = 0;
pub const SIDEWALK: u8 = 1;
pub const BUILDING: u8 = 2;
pub const POLE: u8 = 5;
pub const TRAFFIC_SIGN: u8 = 7;
pub const VEGETATION: u8 = 8;
pub const TERRAIN: u8 = 9;
pub const SKY: u8 = 10;
pub const PERSON: u8 = 11;
pub const CAR: u8 = 13;

/// Names of the four synthetic sources; each renders with its own look.
pub const SOURCES: [&str; 4] = ["carla", "cityscapes", "fcav", "kitti"];

const CLASSES: usize = 19;

#[allow(clippy::too_many_arguments)]
fn fill_rect(labels: &mut [u8], w: i64, h: i64, x0: i64, y0: i64, x1: i64, y1: i64, class: u8) {
    for y in y0.max(0)..y1.min(h) {
        for x in x0.max(0)..x1.min(w) {
            labels[(y * w + x) as usize] = class;
        }
    }
}

/// A street-scene label map over the 19 Cityscapes classes.
pub fn street_scene(width: u32, height: u32, seed: u64) -> LabelMap {
    let mut r = rng(seed);
    let (w, h) = (i64::from(width), i64::from(height));
    let (wf, hf) = (f64::from(width), f64::from(height));
    let horizon = (hf * r.random_range(0.35..0.5)) as i64;
    let vanish_x = wf * r.random_range(0.35..0.65);
    let mut labels = vec![SKY; width as usize * height as usize];

    // ground: terrain, then road and sidewalks converging on the vanishing point
    let road_half = wf * r.random_range(0.3..0.45);
    let walk = wf * r.random_range(0.08..0.15);
    for y in horizon..h {
        let t = (y - horizon) as f64 / (h - horizon).max(1) as f64;
        let half = road_half * t;
        let side = walk * t;
        for x in 0..w {
            let d = x as f64 - vanish_x;
            labels[(y * w + x) as usize] = if d.abs() <= half {
                ROAD
            } else if d.abs() <= half + side {
                SIDEWALK
            } else {
                TERRAIN
            };
        }
    }

    // buildings and trees along the horizon
    let mut x = 0i64;
    while x < w {
        let bw = (wf * r.random_range(0.06..0.18)) as i64 + 1;
        let top = horizon - (hf * r.random_range(0.05..0.3)) as i64;
        let class = if r.random_bool(0.7) { BUILDING } else { VEGETATION };
        let near_road = ((x + bw / 2) as f64 - vanish_x).abs() < wf * 0.08;
        if !near_road {
            let bottom = horizon + (hf * r.random_range(0.0..0.06)) as i64;
            fill_rect(&mut labels, w, h, x, top, x + bw, bottom, class);
        }
        x += bw;
    }

    // cars on the road
    for _ in 0..r.random_range(1..4) {
        let t = r.random_range(0.25..0.9);
        let y = horizon + ((h - horizon) as f64 * t) as i64;
        let cw = (wf * 0.18 * t) as i64 + 2;
        let ch = (cw as f64 * 0.55) as i64 + 1;
        let cx = vanish_x + road_half * t * r.random_range(-0.7..0.7);
        fill_rect(&mut labels, w, h, cx as i64 - cw / 2, y - ch, cx as i64 + cw / 2, y, CAR);
    }

    // poles with signs, and a pedestrian, on the sidewalks
    for side in [-1.0, 1.0] {
        let t = r.random_range(0.4..0.95);
        let y = horizon + ((h - horizon) as f64 * t) as i64;
        let px = (vanish_x + side * (road_half + walk * 0.5) * t) as i64;
        let pole_h = (hf * 0.45 * t) as i64 + 2;
        let pw = (wf * 0.006 * t) as i64 + 1;
        fill_rect(&mut labels, w, h, px, y - pole_h, px + pw, y, POLE);
        let s = (wf * 0.03 * t) as i64 + 1;
        fill_rect(&mut labels, w, h, px - s / 2, y - pole_h, px + s / 2 + pw, y - pole_h + s, TRAFFIC_SIGN);
        if r.random_bool(0.6) {
            let ph = (hf * 0.18 * t) as i64 + 2;
            let qx = px + (side * wf * 0.03 * t) as i64;
            fill_rect(&mut labels, w, h, qx, y - ph, qx + ph / 3 + 1, y, PERSON);
        }
    }

    LabelMap::new(width, height, CLASSES, labels).expect("labels are valid Cityscapes ids")
}

/// Per-source rendering style: color tint, texture amplitude, brightness ramp.
fn style(source: &str) -> ([f64; 3], f64, f64) {
    match source {
        "carla" => ([1.0, 0.95, 0.9], 6.0, 0.10),
        "cityscapes" => ([0.9, 1.0, 0.95], 14.0, 0.20),
        "fcav" => ([1.1, 1.0, 0.8], 10.0, 0.05),
        "kitti" => ([0.95, 0.95, 1.05], 18.0, 0.25),
        _ => ([1.0, 1.0, 1.0], 10.0, 0.15),
    }
}

fn noise(r: &mut Rng, amp: f64) -> f64 {
    (r.random::<f64>() - 0.5) * 2.0 * amp
}

/// Renders a textured RGB "photo" from a label map.
pub fn render_photo(labels: &LabelMap, palette: &Palette, source: &str, seed: u64) -> RasterImage {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (tint, amp, ramp) = style(source);
    let h = f64::from(labels.height());
    RasterImage::rgb_from_fn(labels.width(), labels.height(), |x, y| {
        let base = palette.color(labels.get(x, y)).unwrap_or([0, 0, 0]);
        let light = 1.0 - ramp * f64::from(y) / h;
        let stripe = if (x / 4 + y / 4) % 2 == 0 { amp * 0.5 } else { -amp * 0.5 };
        let n = noise(&mut r, amp);
        let mut out = [0u8; 3];
        for k in 0..3 {
            let v = f64::from(base[k]) * tint[k] * light + stripe + n;
            out[k] = v.round().clamp(0.0, 255.0) as u8;
        }
        out
    })
    .expect("label map dimensions are valid")
}

/// Crisp line-art edge map: 255 on every pixel with a 4-neighbor of a
/// different class, so boundaries come out two pixels wide.
pub fn label_boundaries(labels: &LabelMap) -> RasterImage {
    let (w, h) = labels.dimensions();
    RasterImage::gray_from_fn(w, h, |x, y| {
        let c = labels.get(x, y);
        let differs = (x > 0 && labels.get(x - 1, y) != c)
            || (x + 1 < w && labels.get(x + 1, y) != c)
            || (y > 0 && labels.get(x, y - 1) != c)
            || (y + 1 < h && labels.get(x, y + 1) != c);
        if differs {
            255
        } else {
            0
        }
    })
    .expect("label map dimensions are valid")
}
