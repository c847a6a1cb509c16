//! Raster and label-map carriers, palettes, and 8-bit PNG input/output.

mod labels;
mod palette;
mod pngio;
mod raster;

pub use labels::{color_to_labels, labels_to_color, LabelMap};
pub use palette::{Palette, PaletteEntry};
pub use pngio::{load_labels_png, load_png, save_labels_png, save_png, LabelEncoding};
pub use raster::{Channels, RasterImage};

/// Rounds a non-negative sample half-up and saturates to the 8-bit range.
#[inline]
pub(crate) fn round_u8(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}
