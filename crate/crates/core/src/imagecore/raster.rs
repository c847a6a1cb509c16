use crate::error::{Error, Result};

/// Samples per pixel. Only grayscale and RGB are carried; alpha is dropped on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channels {
    Gray = 1,
    Rgb = 3,
}

impl Channels {
    pub fn count(self) -> usize {
        self as usize
    }
}

/// Row-major 8-bit raster with one or three interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    channels: Channels,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, channels: Channels, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize * channels.count();
        if data.len() != expected {
            return Err(Error::InvalidRaster(format!(
                "{width}x{height}x{} needs {expected} samples, got {}",
                channels.count(),
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// A raster with every pixel set to `pixel` (length must match `channels`).
    pub fn filled(width: u32, height: u32, channels: Channels, pixel: &[u8]) -> Result<Self> {
        if pixel.len() != channels.count() {
            return Err(Error::ChannelMismatch {
                expected: channels.count(),
                found: pixel.len(),
            });
        }
        let n = width as usize * height as usize;
        let data = pixel.iter().copied().cycle().take(n * pixel.len()).collect();
        Self::new(width, height, channels, data)
    }

    pub fn gray_from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, Channels::Gray, data)
    }

    pub fn rgb_from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> [u8; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, Channels::Rgb, data)
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

    pub fn channels(&self) -> Channels {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Samples of the pixel at `(x, y)`.
    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let c = self.channels.count();
        let i = (y as usize * self.width as usize + x as usize) * c;
        &self.data[i..i + c]
    }

    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        let p = self.pixel(x, y);
        [p[0], p[1], p[2]]
    }

    pub(crate) fn expect_channels(&self, channels: Channels) -> Result<()> {
        if self.channels != channels {
            return Err(Error::ChannelMismatch {
                expected: channels.count(),
                found: self.channels.count(),
            });
        }
        Ok(())
    }

    /// Rec. 601 luma per pixel, unrounded. Grayscale rasters pass through.
    pub fn luma(&self) -> Vec<f64> {
        match self.channels {
            Channels::Gray => self.data.iter().map(|&v| f64::from(v)).collect(),
            Channels::Rgb => self
                .data
                .chunks_exact(3)
                .map(|p| 0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]))
                .collect(),
        }
    }

    /// Per-channel `(min, max)` over the whole raster.
    pub fn channel_range(&self) -> Vec<(u8, u8)> {
        let c = self.channels.count();
        let mut out = vec![(u8::MAX, u8::MIN); c];
        for px in self.data.chunks_exact(c) {
            for (range, &v) in out.iter_mut().zip(px) {
                range.0 = range.0.min(v);
                range.1 = range.1.max(v);
            }
        }
        out
    }
}
