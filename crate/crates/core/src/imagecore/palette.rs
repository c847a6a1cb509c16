use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CITYSCAPES_JSON: &str = include_str!("../../palettes/cityscapes.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub id: u32,
    pub name: String,
    pub color: [u8; 3],
}

/// Ordered class table mapping class index to display color.
///
/// Ids run `0..K` without gaps and colors are pairwise distinct, so color and
/// index encodings of a label map convert losslessly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Palette {
    entries: Vec<PaletteEntry>,
}

impl Palette {
    pub fn new(mut entries: Vec<PaletteEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidPalette("no entries".into()));
        }
        if entries.len() > 256 {
            return Err(Error::InvalidPalette(format!(
                "{} classes exceeds the 8-bit label limit of 256",
                entries.len()
            )));
        }
        entries.sort_by_key(|e| e.id);
        for (expected, entry) in entries.iter().enumerate() {
            if entry.id as usize != expected {
                return Err(Error::InvalidPalette(format!(
                    "class ids must be 0..{} without gaps; found id {} at position {expected}",
                    entries.len(),
                    entry.id
                )));
            }
        }
        let mut seen = HashSet::new();
        for entry in &entries {
            if !seen.insert(entry.color) {
                return Err(Error::InvalidPalette(format!(
                    "color {:?} of class {} ({}) is used twice",
                    entry.color, entry.id, entry.name
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_json_str(json: &str) -> Result<Self, String> {
        let entries: Vec<PaletteEntry> = serde_json::from_str(json).map_err(|e| e.to_string())?;
        Self::new(entries).map_err(|e| e.to_string())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let entries: Vec<PaletteEntry> =
            serde_json::from_str(&text).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })?;
        Self::new(entries).map_err(|e| Error::InvalidPalette(format!("{}: {e}", path.display())))
    }

    /// The bundled 19-class Cityscapes-convention palette.
    pub fn cityscapes() -> Self {
        Self::from_json_str(CITYSCAPES_JSON).expect("bundled palette is valid")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }

    pub fn color(&self, class: u8) -> Option<[u8; 3]> {
        self.entries.get(class as usize).map(|e| e.color)
    }

    /// Nearest class by L∞ distance; ties resolve to the lowest class id.
    pub fn nearest(&self, color: [u8; 3]) -> (u8, u8) {
        let mut best = (0u8, u8::MAX);
        for (i, entry) in self.entries.iter().enumerate() {
            let d = entry
                .color
                .iter()
                .zip(color)
                .map(|(&a, b)| a.abs_diff(b))
                .max()
                .unwrap_or(0);
            if d < best.1 || i == 0 {
                best = (i as u8, d);
            }
            if d == 0 {
                break;
            }
        }
        best
    }
}
