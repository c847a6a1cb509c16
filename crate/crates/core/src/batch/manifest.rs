use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{LabelEncoding, Palette};

/// One dataset item. Paths are relative to the manifest's directory unless absolute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segmentation: Option<PathBuf>,
    /// Encoding of `segmentation` and `candidate`.
    #[serde(default)]
    pub seg_encoding: LabelEncoding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
    /// Segmentation compared against `segmentation` by `eval`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<PathBuf>,
    #[serde(default)]
    pub tags: Vec<String>,
}

impl ManifestEntry {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            image: None,
            segmentation: None,
            seg_encoding: LabelEncoding::Color,
            edges: None,
            candidate: None,
            tags: Vec::new(),
        }
    }

    fn field(&self, field: Field) -> Option<&PathBuf> {
        match field {
            Field::Image => self.image.as_ref(),
            Field::Segmentation => self.segmentation.as_ref(),
            Field::Edges => self.edges.as_ref(),
            Field::Candidate => self.candidate.as_ref(),
        }
    }
}

/// Input slots a command may require of every entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Image,
    Segmentation,
    Edges,
    Candidate,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::Image => "image",
            Field::Segmentation => "segmentation",
            Field::Edges => "edges",
            Field::Candidate => "candidate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    /// Palette JSON; the bundled Cityscapes palette when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<PathBuf>,
    #[serde(default)]
    pub base_seed: u64,
    pub entries: Vec<ManifestEntry>,
    #[serde(skip)]
    root: PathBuf,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>, base_seed: u64) -> Self {
        Self {
            palette: None,
            base_seed,
            entries,
            root: PathBuf::new(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: DatasetManifest = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        manifest.root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(manifest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    /// Directory that relative paths resolve against.
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn with_root(mut self, root: impl Into<PathBuf>) -> Self {
        self.root = root.into();
        self
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.root.join(path)
        }
    }

    pub fn load_palette(&self) -> Result<Palette> {
        match &self.palette {
            Some(p) => Palette::load(self.resolve(p)),
            None => Ok(Palette::cityscapes()),
        }
    }

    /// Structural checks run before any output is written: non-empty unique
    /// file-name-safe ids and the presence of every `required` field.
    pub fn validate(&self, required: &[Field]) -> Result<()> {
        let mut seen = HashSet::new();
        let mut problems = Vec::new();
        for (i, entry) in self.entries.iter().enumerate() {
            if entry.id.is_empty() {
                problems.push(format!("entry {i}: empty id"));
            } else if entry.id.contains(['/', '\\']) || entry.id == "." || entry.id == ".." {
                problems.push(format!("entry {i}: id {:?} is not a valid file name stem", entry.id));
            }
            if !seen.insert(entry.id.as_str()) {
                problems.push(format!("entry {i}: duplicate id {:?}", entry.id));
            }
            for &field in required {
                if entry.field(field).is_none() {
                    problems.push(format!("entry {:?}: missing required field `{}`", entry.id, field.name()));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Manifest(problems.join("; ")))
        }
    }
}
