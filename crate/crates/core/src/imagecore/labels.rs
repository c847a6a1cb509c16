use std::collections::HashMap;

use super::{Channels, Palette, RasterImage};
use crate::error::{Error, Result};

/// Row-major per-pixel class indices in `0..classes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: u32,
    height: u32,
    classes: usize,
    labels: Vec<u8>,
}

impl LabelMap {
    pub fn new(width: u32, height: u32, classes: usize, labels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "label map dimensions must be positive, got {width}x{height}"
            )));
        }
        if classes == 0 || classes > 256 {
            return Err(Error::InvalidParameter(format!(
                "class count must be in 1..=256, got {classes}"
            )));
        }
        if labels.len() != width as usize * height as usize {
            return Err(Error::InvalidRaster(format!(
                "{width}x{height} label map needs {} labels, got {}",
                width as usize * height as usize,
                labels.len()
            )));
        }
        if let Some(i) = labels.iter().position(|&l| l as usize >= classes) {
            return Err(Error::LabelOutOfRange {
                x: (i % width as usize) as u32,
                y: (i / width as usize) as u32,
                label: u32::from(labels[i]),
                classes,
            });
        }
        Ok(Self {
            width,
            height,
            classes,
            labels,
        })
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        classes: usize,
        mut f: impl FnMut(u32, u32) -> u8,
    ) -> Result<Self> {
        let mut labels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                labels.push(f(x, y));
            }
        }
        Self::new(width, height, classes, labels)
    }

    /// Interprets a grayscale raster's sample values as class indices.
    pub fn from_index_raster(raster: &RasterImage, classes: usize) -> Result<Self> {
        raster.expect_channels(Channels::Gray)?;
        Self::new(raster.width(), raster.height(), classes, raster.data().to_vec())
    }

    /// Grayscale raster whose sample values are the class indices.
    pub fn to_index_raster(&self) -> RasterImage {
        RasterImage::new(self.width, self.height, Channels::Gray, self.labels.clone())
            .expect("label map dimensions are valid")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    /// Sorted set of class indices that occur in the map.
    pub fn present_classes(&self) -> Vec<u8> {
        let mut seen = [false; 256];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        (0..=255u8).filter(|&c| seen[c as usize]).collect()
    }

    pub(crate) fn with_labels(&self, width: u32, height: u32, labels: Vec<u8>) -> Self {
        debug_assert_eq!(labels.len(), width as usize * height as usize);
        Self {
            width,
            height,
            classes: self.classes,
            labels,
        }
    }
}

/// Decodes a color-coded segmentation into class indices.
///
/// Each pixel maps to the palette class nearest in L∞ distance when that
/// distance is within `tolerance`; otherwise the first offending pixel is
/// reported.
pub fn color_to_labels(image: &RasterImage, palette: &Palette, tolerance: u8) -> Result<LabelMap> {
    image.expect_channels(Channels::Rgb)?;
    let width = image.width() as usize;
    let mut cache: HashMap<[u8; 3], u8> = palette
        .entries()
        .iter()
        .map(|e| (e.color, e.id as u8))
        .collect();
    let mut labels = Vec::with_capacity(width * image.height() as usize);
    for (i, px) in image.data().chunks_exact(3).enumerate() {
        let color = [px[0], px[1], px[2]];
        let label = match cache.get(&color) {
            Some(&l) => l,
            None => {
                let (class, distance) = palette.nearest(color);
                if distance > tolerance {
                    return Err(Error::NoPaletteMatch {
                        x: (i % width) as u32,
                        y: (i / width) as u32,
                        color,
                        distance,
                        tolerance,
                    });
                }
                cache.insert(color, class);
                class
            }
        };
        labels.push(label);
    }
    LabelMap::new(image.width(), image.height(), palette.len(), labels)
}

/// Renders class indices as their palette display colors.
pub fn labels_to_color(labels: &LabelMap, palette: &Palette) -> Result<RasterImage> {
    let width = labels.width() as usize;
    let mut data = Vec::with_capacity(labels.labels().len() * 3);
    for (i, &l) in labels.labels().iter().enumerate() {
        let color = palette.color(l).ok_or(Error::LabelOutOfRange {
            x: (i % width) as u32,
            y: (i / width) as u32,
            label: u32::from(l),
            classes: palette.len(),
        })?;
        data.extend_from_slice(&color);
    }
    RasterImage::new(labels.width(), labels.height(), Channels::Rgb, data)
}
