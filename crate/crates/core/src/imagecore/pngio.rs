use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use png::{BitDepth, ColorType, Decoder, Encoder, Transformations};
use serde::{Deserialize, Serialize};

use super::{color_to_labels, labels_to_color, Channels, LabelMap, Palette, RasterImage};
use crate::error::{Error, Result};

/// How a segmentation map is stored on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelEncoding {
    /// RGB PNG whose colors are palette display colors.
    #[default]
    Color,
    /// Grayscale PNG whose sample values are class indices.
    Index,
}

/// Loads an 8-bit grayscale or RGB PNG. An alpha channel, if present, is dropped.
pub fn load_png(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let decode_err = |e: png::DecodingError| Error::PngDecode {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = Decoder::new(file);
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(decode_err)?;
    let (color_type, bit_depth) = reader.output_color_type();
    if bit_depth != BitDepth::Eight {
        return Err(Error::UnsupportedBitDepth {
            path: path.to_path_buf(),
            depth: bit_depth as u8,
        });
    }
    let (in_channels, out_channels) = match color_type {
        ColorType::Grayscale => (1, Channels::Gray),
        ColorType::GrayscaleAlpha => (2, Channels::Gray),
        ColorType::Rgb => (3, Channels::Rgb),
        ColorType::Rgba => (4, Channels::Rgb),
        ColorType::Indexed => {
            return Err(Error::UnsupportedColorType {
                path: path.to_path_buf(),
                color_type: "palette-indexed".into(),
            })
        }
    };
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(decode_err)?;
    let (width, height) = (info.width, info.height);
    let keep = out_channels.count();
    let mut data = Vec::with_capacity(width as usize * height as usize * keep);
    for row in buf.chunks(info.line_size).take(height as usize) {
        for px in row[..width as usize * in_channels].chunks_exact(in_channels) {
            data.extend_from_slice(&px[..keep]);
        }
    }
    RasterImage::new(width, height, out_channels, data)
}

/// Writes the raster as an 8-bit grayscale or truecolor PNG.
pub fn save_png(image: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let encode_err = |e: png::EncodingError| Error::PngEncode {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = Encoder::new(BufWriter::new(file), image.width(), image.height());
    encoder.set_color(match image.channels() {
        Channels::Gray => ColorType::Grayscale,
        Channels::Rgb => ColorType::Rgb,
    });
    encoder.set_depth(BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(encode_err)?;
    writer.write_image_data(image.data()).map_err(encode_err)?;
    writer.finish().map_err(encode_err)
}

/// Loads a segmentation map in either on-disk encoding.
pub fn load_labels_png(
    path: impl AsRef<Path>,
    encoding: LabelEncoding,
    palette: &Palette,
    tolerance: u8,
) -> Result<LabelMap> {
    let path = path.as_ref();
    let raster = load_png(path)?;
    let with_path = |e: Error| match e {
        Error::ChannelMismatch { expected, found } => Error::InvalidRaster(format!(
            "{}: {encoding:?}-encoded segmentation needs {expected} channel(s), file has {found}",
            path.display()
        )),
        other => other,
    };
    match encoding {
        LabelEncoding::Color => color_to_labels(&raster, palette, tolerance).map_err(with_path),
        LabelEncoding::Index => LabelMap::from_index_raster(&raster, palette.len()).map_err(with_path),
    }
}

pub fn save_labels_png(
    labels: &LabelMap,
    encoding: LabelEncoding,
    palette: &Palette,
    path: impl AsRef<Path>,
) -> Result<()> {
    let raster = match encoding {
        LabelEncoding::Color => labels_to_color(labels, palette)?,
        LabelEncoding::Index => labels.to_index_raster(),
    };
    save_png(&raster, path)
}
