//! Controlled degradations of the three pipeline inputs.
//!
//! - [`kuwahara`] smooths input photographs,
//! - [`carve_edges`] erodes edge maps,
//! - [`warp_labels`] distorts segmentation maps.
//!
//! A [`PerturbationSpec`] names one of them with a level; level 0 is always
//! the identity.

mod carve;
mod kuwahara;
mod warp;

use serde::{Deserialize, Serialize};

pub use carve::{box_blur_3x3, carve_edges, carve_step, carve_threshold, CARVE_THRESHOLD};
pub use kuwahara::kuwahara;
pub use warp::{warp_labels, WarpField};

use crate::error::Result;
use crate::imagecore::{LabelMap, RasterImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    Smooth,
    Carve,
    Warp,
}

impl PerturbationKind {
    pub fn name(self) -> &'static str {
        match self {
            PerturbationKind::Smooth => "smooth",
            PerturbationKind::Carve => "carve",
            PerturbationKind::Warp => "warp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    /// Kuwahara radius, carve iterations, or warp level in pixels.
    pub level: u32,
    /// Only consulted by [`PerturbationKind::Warp`].
    #[serde(default)]
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn smooth(radius: u32) -> Self {
        Self {
            kind: PerturbationKind::Smooth,
            level: radius,
            seed: 0,
        }
    }

    pub fn carve(level: u32) -> Self {
        Self {
            kind: PerturbationKind::Carve,
            level,
            seed: 0,
        }
    }

    pub fn warp(level: u32, seed: u64) -> Self {
        Self {
            kind: PerturbationKind::Warp,
            level,
            seed,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.level == 0
    }

    /// Applies a smoothing or carving spec to a raster.
    pub fn apply_raster(&self, image: &RasterImage) -> Result<RasterImage> {
        match self.kind {
            _ if self.is_identity() => Ok(image.clone()),
            PerturbationKind::Smooth => kuwahara(image, self.level),
            PerturbationKind::Carve => carve_edges(image, self.level),
            PerturbationKind::Warp => Err(crate::Error::InvalidParameter(
                "warp perturbations apply to label maps, not rasters".into(),
            )),
        }
    }

    pub fn apply_labels(&self, labels: &LabelMap) -> Result<LabelMap> {
        match self.kind {
            PerturbationKind::Warp => Ok(warp_labels(labels, self.level, self.seed)),
            other => Err(crate::Error::InvalidParameter(format!(
                "{} perturbations apply to rasters, not label maps",
                other.name()
            ))),
        }
    }
}
