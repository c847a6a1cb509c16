//! Edge-plus-segmentation (EPS) maps for image-to-image translation datasets.
//!
//! An EPS map is a color-coded semantic segmentation with a grayscale edge
//! map added on top. This crate builds them, degrades their ingredients in
//! controlled ways for robustness studies, prepares augmented and
//! multi-resolution training data, and scores segmentations by IoU. Neural
//! networks (edge detectors, segmenters, generators) stay outside: they are
//! producers and consumers of the PNG files described by a dataset manifest.
//!
//! Modules:
//!
//! - [`imagecore`]: rasters, label maps, palettes, PNG I/O
//! - [`eps`]: EPS composition and a Sobel fallback edge detector
//! - [`ablation`]: Kuwahara smoothing, edge carving, segmentation warping
//! - [`augment`]: rotate/crop/scale augmentation and the resolution pyramid
//! - [`metrics`]: confusion matrices, IoU reports, per-class distributions
//! - [`batch`]: manifest-driven, reproducible batch jobs
//! - [`synth`]: deterministic synthetic street scenes for demos and tests

pub mod ablation;
pub mod augment;
pub mod batch;
pub mod eps;
mod error;
pub mod imagecore;
pub mod metrics;
pub(crate) mod resample;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
pub use imagecore::{Channels, LabelEncoding, LabelMap, Palette, PaletteEntry, RasterImage};
