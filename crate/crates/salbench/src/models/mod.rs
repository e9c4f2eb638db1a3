//! Saliency map producers: the three built-in spectral models plus ingestion
//! of precomputed maps for any external model.
//!
//! Model evaluation is pure; (model, image) pairs can run in parallel and the
//! registry is read-only after startup.

mod color;
mod external;
mod frequency_tuned;
mod spectral;

pub use external::load_external_map;
pub use frequency_tuned::frequency_tuned;
pub use spectral::{phase_fourier, spectral_residual};

use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::ImageRecord;
use crate::grid::Grid;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("image `{0}` is constant; no spectral structure")]
    DegenerateImage(String),
    #[error("unreadable map at {path}: {reason}")]
    UnreadableMap { path: PathBuf, reason: String },
    #[error("non-finite value in map at {path}")]
    NonFiniteValue { path: PathBuf },
    #[error("no map file for image `{image_id}` of model `{model}` under {dir}")]
    MissingMapFile {
        model: String,
        image_id: String,
        dir: PathBuf,
    },
    #[error("model id must be nonempty")]
    EmptyModelId,
    #[error("duplicate model id `{0}` in registry")]
    DuplicateModelId(String),
    #[error("unknown model `{0}` (built-ins: SR, PFT, FT; external: ext:NAME=dir)")]
    UnknownModel(String),
}

/// Short key identifying a model, e.g. "SR", "PFT", "FT" or an external name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelId(String);

impl ModelId {
    pub fn new(id: impl Into<String>) -> Result<Self, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::EmptyModelId);
        }
        Ok(ModelId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Dense grid of finite, non-negative conspicuity scores with the id of the
/// model that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    pub model: String,
    pub grid: Grid,
}

impl SaliencyMap {
    pub fn new(model: String, grid: Grid) -> Self {
        SaliencyMap { model, grid }
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.grid.width() as u32, self.grid.height() as u32)
    }
}

/// What to do when a spectral model meets a constant image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantPolicy {
    /// Emit an all-zero map and let the metrics layer report degeneracy.
    ZeroMap,
    Error,
}

#[derive(Debug, Clone)]
pub struct ModelOptions {
    /// SR/PFT work on the image downscaled to this size on its larger side.
    pub working_size: usize,
    /// Side of the box filter applied to the log-amplitude spectrum.
    pub sr_box: usize,
    /// Post-transform Gaussian sigma as a fraction of the working size.
    pub smooth_frac: f64,
    /// Gaussian sigma (pixels) used by the frequency-tuned model.
    pub ft_blur_radius: f64,
    pub on_constant: ConstantPolicy,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            working_size: 64,
            sr_box: 3,
            smooth_frac: 0.025,
            ft_blur_radius: 3.0,
            on_constant: ConstantPolicy::ZeroMap,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    SpectralResidual,
    PhaseFourier,
    FrequencyTuned,
    /// Precomputed maps read from `<dir>/<image_id>.png` or `.csv`.
    External { dir: PathBuf },
}

#[derive(Debug, Clone)]
pub struct Model {
    pub id: ModelId,
    pub kind: ModelKind,
}

impl Model {
    /// Parse a CLI roster entry: `SR`, `PFT`, `FT` or `ext:NAME=dir`.
    pub fn parse(spec: &str) -> Result<Model, ModelError> {
        match spec {
            "SR" => Ok(Model {
                id: ModelId::new("SR")?,
                kind: ModelKind::SpectralResidual,
            }),
            "PFT" => Ok(Model {
                id: ModelId::new("PFT")?,
                kind: ModelKind::PhaseFourier,
            }),
            "FT" => Ok(Model {
                id: ModelId::new("FT")?,
                kind: ModelKind::FrequencyTuned,
            }),
            other => {
                if let Some(rest) = other.strip_prefix("ext:") {
                    let (name, dir) = rest
                        .split_once('=')
                        .ok_or_else(|| ModelError::UnknownModel(other.to_string()))?;
                    Ok(Model {
                        id: ModelId::new(name)?,
                        kind: ModelKind::External {
                            dir: PathBuf::from(dir),
                        },
                    })
                } else {
                    Err(ModelError::UnknownModel(other.to_string()))
                }
            }
        }
    }

    pub fn compute(
        &self,
        image: &ImageRecord,
        options: &ModelOptions,
    ) -> Result<SaliencyMap, ModelError> {
        match &self.kind {
            ModelKind::SpectralResidual => spectral_residual(image, options.working_size, options),
            ModelKind::PhaseFourier => phase_fourier(image, options.working_size, options),
            ModelKind::FrequencyTuned => Ok(frequency_tuned(image, options.ft_blur_radius)),
            ModelKind::External { dir } => {
                let mut map = external::load_for_image(dir, &image.id, image.dims())?;
                map.model = self.id.as_str().to_string();
                Ok(map)
            }
        }
    }
}

/// Read-only roster of models under evaluation.
#[derive(Debug, Clone)]
pub struct ModelRegistry {
    models: Vec<Model>,
}

impl ModelRegistry {
    pub fn new(models: Vec<Model>) -> Result<Self, ModelError> {
        let mut seen = std::collections::HashSet::new();
        for m in &models {
            if !seen.insert(m.id.clone()) {
                return Err(ModelError::DuplicateModelId(m.id.as_str().to_string()));
            }
        }
        Ok(ModelRegistry { models })
    }

    pub fn from_specs(specs: &[String]) -> Result<Self, ModelError> {
        let models = specs
            .iter()
            .map(|s| Model::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        ModelRegistry::new(models)
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn ids(&self) -> Vec<String> {
        self.models
            .iter()
            .map(|m| m.id.as_str().to_string())
            .collect()
    }
}
