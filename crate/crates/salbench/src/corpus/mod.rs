//! Dataset loading and validation: images, fixation ground truth, region
//! ground truth and region-size categories.
//!
//! A dataset is described by a JSON manifest:
//!
//! ```json
//! {
//!   "root": ".",
//!   "entries": [
//!     {"id": "img1", "image": "img1.png", "fixations": "img1_fix.csv",
//!      "mask": "img1_mask.png", "category": "Large"}
//!   ]
//! }
//! ```
//!
//! Paths are relative to `root`; a relative `root` is resolved against the
//! manifest file's directory. Every referenced file is opened and
//! dimension-checked at load time, so a successfully loaded manifest is fully
//! validated.

mod synth;

pub use synth::{synth_dataset, SynthOptions};

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, RgbImage};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Grid;

pub const MIN_IMAGE_SIDE: u32 = 16;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing file for entry `{id}`: {path}")]
    MissingFile { id: String, path: PathBuf },
    #[error("mask dimensions {mask_w}x{mask_h} do not match image {img_w}x{img_h} for entry `{id}`")]
    DimensionMismatch {
        id: String,
        img_w: u32,
        img_h: u32,
        mask_w: u32,
        mask_h: u32,
    },
    #[error("duplicate entry id `{0}`")]
    DuplicateId(String),
    #[error("malformed entry `{id}`: {reason}")]
    MalformedEntry { id: String, reason: String },
    #[error("fixation point ({x},{y}) outside image bounds {width}x{height}")]
    OutOfBounds { x: i64, y: i64, width: u32, height: u32 },
    #[error("fixation set is empty: {0}")]
    EmptyFixationSet(PathBuf),
    #[error("region mask has no positive pixel: {0}")]
    EmptyMask(PathBuf),
    #[error("image side smaller than {MIN_IMAGE_SIDE} px for entry `{id}` ({width}x{height})")]
    ImageTooSmall { id: String, width: u32, height: u32 },
    #[error("category proportions must sum to 1 (got {0})")]
    InvalidProportions(f64),
    #[error("manifest parse error at {path}: {reason}")]
    MalformedManifest { path: PathBuf, reason: String },
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("image decode error at {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

/// Region-size category of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CategoryLabel {
    Large,
    Medium,
    Small,
    Uncategorized,
}

impl CategoryLabel {
    /// Ordinal code used for trend fitting: size increases with the code.
    pub fn ordinal(self) -> Option<f64> {
        match self {
            CategoryLabel::Small => Some(1.0),
            CategoryLabel::Medium => Some(2.0),
            CategoryLabel::Large => Some(3.0),
            CategoryLabel::Uncategorized => None,
        }
    }

    pub fn parse(s: &str) -> Option<CategoryLabel> {
        match s.to_ascii_lowercase().as_str() {
            "large" => Some(CategoryLabel::Large),
            "medium" => Some(CategoryLabel::Medium),
            "small" => Some(CategoryLabel::Small),
            "uncategorized" => Some(CategoryLabel::Uncategorized),
            _ => None,
        }
    }
}

impl fmt::Display for CategoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CategoryLabel::Large => "Large",
            CategoryLabel::Medium => "Medium",
            CategoryLabel::Small => "Small",
            CategoryLabel::Uncategorized => "Uncategorized",
        };
        f.write_str(s)
    }
}

/// One benchmark image with its pixel data and category.
#[derive(Debug, Clone)]
pub struct ImageRecord {
    pub id: String,
    pub rgb: RgbImage,
    pub category: CategoryLabel,
}

impl ImageRecord {
    pub fn width(&self) -> u32 {
        self.rgb.width()
    }

    pub fn height(&self) -> u32 {
        self.rgb.height()
    }

    pub fn dims(&self) -> (u32, u32) {
        self.rgb.dimensions()
    }
}

/// Discrete gaze points. Duplicates are permitted (multiple observers can
/// fixate the same pixel); `len()` counts every fixation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixationSet {
    points: Vec<(u32, u32)>,
}

impl FixationSet {
    pub fn new(points: Vec<(u32, u32)>, dims: (u32, u32)) -> Result<Self, CorpusError> {
        if points.is_empty() {
            return Err(CorpusError::EmptyFixationSet(PathBuf::new()));
        }
        for &(x, y) in &points {
            if x >= dims.0 || y >= dims.1 {
                return Err(CorpusError::OutOfBounds {
                    x: x as i64,
                    y: y as i64,
                    width: dims.0,
                    height: dims.1,
                });
            }
        }
        Ok(FixationSet { points })
    }

    /// Total number of fixations, duplicates included.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(u32, u32)] {
        &self.points
    }

    /// Distinct fixated pixels, sorted; used where a pixel counts once.
    pub fn distinct_points(&self) -> Vec<(u32, u32)> {
        let mut v = self.points.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Binary labelled-region mask paired with an image.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    width: u32,
    height: u32,
    positive: Vec<bool>,
    positive_count: usize,
}

impl RegionMask {
    pub fn from_bools(width: u32, height: u32, positive: Vec<bool>) -> Result<Self, CorpusError> {
        assert_eq!(positive.len(), (width * height) as usize);
        let positive_count = positive.iter().filter(|p| **p).count();
        if positive_count == 0 {
            return Err(CorpusError::EmptyMask(PathBuf::new()));
        }
        Ok(RegionMask {
            width,
            height,
            positive,
            positive_count,
        })
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    #[inline]
    pub fn is_positive(&self, x: u32, y: u32) -> bool {
        self.positive[(y * self.width + x) as usize]
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    /// Fraction of image pixels inside the region.
    pub fn area_fraction(&self) -> f64 {
        self.positive_count as f64 / (self.width as u64 * self.height as u64) as f64
    }

    pub fn positive_points(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.positive_count);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.is_positive(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn to_grid(&self) -> Grid {
        let data = self
            .positive
            .iter()
            .map(|p| if *p { 1.0 } else { 0.0 })
            .collect();
        Grid::from_vec(self.width as usize, self.height as usize, data)
    }
}

/// Ground truth against which a saliency map is scored.
#[derive(Debug, Clone)]
pub enum GroundTruth {
    Fixations(FixationSet),
    Regions(RegionMask),
}

/// Which ground truth a score was computed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GtKind {
    #[serde(rename = "fixations")]
    Fixations,
    #[serde(rename = "regions")]
    Regions,
}

impl fmt::Display for GtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GtKind::Fixations => f.write_str("fixations"),
            GtKind::Regions => f.write_str("regions"),
        }
    }
}

/// Area-fraction brackets that define the size categories. The defaults are a
/// toolkit convention and can be overridden in the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryBrackets {
    /// Masks covering at least this fraction are Large.
    pub large_min: f64,
    /// Masks covering at most this fraction are Small.
    pub small_max: f64,
}

impl Default for CategoryBrackets {
    fn default() -> Self {
        CategoryBrackets {
            large_min: 0.15,
            small_max: 0.03,
        }
    }
}

impl CategoryBrackets {
    pub fn classify(&self, area_fraction: f64) -> CategoryLabel {
        if area_fraction >= self.large_min {
            CategoryLabel::Large
        } else if area_fraction <= self.small_max {
            CategoryLabel::Small
        } else {
            CategoryLabel::Medium
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ManifestEntryJson {
    id: String,
    image: String,
    fixations: String,
    mask: String,
    category: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ManifestJson {
    root: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    brackets: Option<CategoryBrackets>,
    entries: Vec<ManifestEntryJson>,
}

/// One validated manifest entry; file paths are stored resolved.
#[derive(Debug, Clone)]
pub struct ManifestEntry {
    pub id: String,
    pub image_path: PathBuf,
    pub fixation_path: PathBuf,
    pub mask_path: PathBuf,
    pub category: CategoryLabel,
    pub dims: (u32, u32),
}

/// A fully validated dataset description. Immutable after construction;
/// entries can be loaded independently and in parallel.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    root: PathBuf,
    brackets: CategoryBrackets,
    entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn brackets(&self) -> CategoryBrackets {
        self.brackets
    }

    pub fn load_image(&self, entry: &ManifestEntry) -> Result<ImageRecord, CorpusError> {
        load_image_record(entry)
    }

    pub fn load_fixations(&self, entry: &ManifestEntry) -> Result<FixationSet, CorpusError> {
        load_fixations(&entry.fixation_path, entry.dims)
    }

    pub fn load_mask(&self, entry: &ManifestEntry) -> Result<RegionMask, CorpusError> {
        load_mask(&entry.mask_path, entry.dims)
    }
}

fn read_dynamic_image(path: &Path) -> Result<DynamicImage, CorpusError> {
    image::open(path).map_err(|source| CorpusError::Image {
        path: path.to_path_buf(),
        source,
    })
}

fn load_image_record(entry: &ManifestEntry) -> Result<ImageRecord, CorpusError> {
    let rgb = read_dynamic_image(&entry.image_path)?.to_rgb8();
    Ok(ImageRecord {
        id: entry.id.clone(),
        rgb,
        category: entry.category,
    })
}

/// Load and fully validate a manifest: ids unique, every file present,
/// parseable and dimension-consistent.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed: ManifestJson =
        serde_json::from_str(&text).map_err(|e| CorpusError::MalformedManifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;

    let manifest_dir = path.parent().unwrap_or_else(|| Path::new("."));
    let root = manifest_dir.join(&parsed.root);
    let brackets = parsed.brackets.unwrap_or_default();

    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(parsed.entries.len());
    for raw in &parsed.entries {
        if raw.id.is_empty() {
            return Err(CorpusError::MalformedEntry {
                id: raw.id.clone(),
                reason: "empty id".into(),
            });
        }
        if !seen.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId(raw.id.clone()));
        }
        let category =
            CategoryLabel::parse(&raw.category).ok_or_else(|| CorpusError::MalformedEntry {
                id: raw.id.clone(),
                reason: format!("unknown category `{}`", raw.category),
            })?;

        let image_path = root.join(&raw.image);
        let fixation_path = root.join(&raw.fixations);
        let mask_path = root.join(&raw.mask);
        for p in [&image_path, &fixation_path, &mask_path] {
            if !p.exists() {
                return Err(CorpusError::MissingFile {
                    id: raw.id.clone(),
                    path: p.clone(),
                });
            }
        }

        let img = read_dynamic_image(&image_path)?;
        let (img_w, img_h) = (img.width(), img.height());
        if img_w < MIN_IMAGE_SIDE || img_h < MIN_IMAGE_SIDE {
            return Err(CorpusError::ImageTooSmall {
                id: raw.id.clone(),
                width: img_w,
                height: img_h,
            });
        }

        let mask_img = read_dynamic_image(&mask_path)?;
        if mask_img.width() != img_w || mask_img.height() != img_h {
            return Err(CorpusError::DimensionMismatch {
                id: raw.id.clone(),
                img_w,
                img_h,
                mask_w: mask_img.width(),
                mask_h: mask_img.height(),
            });
        }
        mask_from_dynamic(mask_img, &mask_path)?;
        load_fixations(&fixation_path, (img_w, img_h))?;

        entries.push(ManifestEntry {
            id: raw.id.clone(),
            image_path,
            fixation_path,
            mask_path,
            category,
            dims: (img_w, img_h),
        });
    }

    Ok(DatasetManifest {
        root,
        brackets,
        entries,
    })
}

/// Write a manifest back to JSON with paths relative to `root`.
pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> Result<(), CorpusError> {
    let rel = |p: &Path| -> String {
        p.strip_prefix(&manifest.root)
            .unwrap_or(p)
            .to_string_lossy()
            .into_owned()
    };
    let json = ManifestJson {
        root: manifest.root.to_string_lossy().into_owned(),
        brackets: Some(manifest.brackets),
        entries: manifest
            .entries
            .iter()
            .map(|e| ManifestEntryJson {
                id: e.id.clone(),
                image: rel(&e.image_path),
                fixations: rel(&e.fixation_path),
                mask: rel(&e.mask_path),
                category: e.category.to_string(),
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&json).expect("manifest serialization");
    fs::write(path, text).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load fixations from either a CSV point list (`x,y` per line) or a binary
/// fixation map (PNG, nonzero pixel = one fixation).
pub fn load_fixations(path: &Path, image_dims: (u32, u32)) -> Result<FixationSet, CorpusError> {
    let is_png = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("png"))
        .unwrap_or(false);
    if is_png {
        let img = read_dynamic_image(path)?.to_luma16();
        if (img.width(), img.height()) != image_dims {
            return Err(CorpusError::DimensionMismatch {
                id: path.to_string_lossy().into_owned(),
                img_w: image_dims.0,
                img_h: image_dims.1,
                mask_w: img.width(),
                mask_h: img.height(),
            });
        }
        let mut points = Vec::new();
        for (x, y, p) in img.enumerate_pixels() {
            if p.0[0] != 0 {
                points.push((x, y));
            }
        }
        if points.is_empty() {
            return Err(CorpusError::EmptyFixationSet(path.to_path_buf()));
        }
        FixationSet::new(points, image_dims)
    } else {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Option<i64> { s?.trim().parse().ok() };
            let (x, y) = match (parse(it.next()), parse(it.next())) {
                (Some(x), Some(y)) if it.next().is_none() => (x, y),
                _ => {
                    return Err(CorpusError::MalformedEntry {
                        id: path.to_string_lossy().into_owned(),
                        reason: format!("bad fixation line {}: `{line}`", lineno + 1),
                    })
                }
            };
            if x < 0 || y < 0 || x >= image_dims.0 as i64 || y >= image_dims.1 as i64 {
                return Err(CorpusError::OutOfBounds {
                    x,
                    y,
                    width: image_dims.0,
                    height: image_dims.1,
                });
            }
            points.push((x as u32, y as u32));
        }
        if points.is_empty() {
            return Err(CorpusError::EmptyFixationSet(path.to_path_buf()));
        }
        FixationSet::new(points, image_dims)
    }
}

fn mask_from_dynamic(img: DynamicImage, path: &Path) -> Result<RegionMask, CorpusError> {
    let gray = img.to_luma16();
    let positive: Vec<bool> = gray.pixels().map(|p| p.0[0] != 0).collect();
    RegionMask::from_bools(gray.width(), gray.height(), positive)
        .map_err(|_| CorpusError::EmptyMask(path.to_path_buf()))
}

/// Load a binary region mask (PNG, nonzero = positive) and check it against
/// the paired image dimensions.
pub fn load_mask(path: &Path, image_dims: (u32, u32)) -> Result<RegionMask, CorpusError> {
    let img = read_dynamic_image(path)?;
    if (img.width(), img.height()) != image_dims {
        return Err(CorpusError::DimensionMismatch {
            id: path.to_string_lossy().into_owned(),
            img_w: image_dims.0,
            img_h: image_dims.1,
            mask_w: img.width(),
            mask_h: img.height(),
        });
    }
    mask_from_dynamic(img, path)
}
