//! Common post-processing applied to every saliency map before scoring so
//! that all models are compared under identical conditions: resize, Gaussian
//! blur, border cut and zero-mean/unit-std standardization.
//!
//! The pipeline order is fixed: resize → blur → border_cut → standardize.
//! The active configuration is echoed into every report for auditability.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Grid;
use crate::models::SaliencyMap;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("map is constant; standard deviation is zero")]
    DegenerateMap,
    #[error("border width {width} too large for {dims_w}x{dims_h} map")]
    WidthTooLarge {
        width: usize,
        dims_w: usize,
        dims_h: usize,
    },
    #[error("map contains non-finite values")]
    NonFinite,
}

/// Mean and population standard deviation of a map before standardization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapStats {
    pub mean: f64,
    pub std: f64,
}

/// Border-cut width: either a fixed pixel count or a fraction of the smaller
/// image dimension (the default is 4%).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum BorderCut {
    Pixels(usize),
    FractionOfMinDim(f64),
}

impl BorderCut {
    pub fn pixels_for(&self, width: usize, height: usize) -> usize {
        match *self {
            BorderCut::Pixels(n) => n,
            BorderCut::FractionOfMinDim(f) => (f * width.min(height) as f64).round() as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    /// Gaussian sigma as a fraction of image width.
    pub blur_sigma: f64,
    pub border_cut: BorderCut,
    /// Maps are resized to the paired image dimensions before anything else.
    pub resize_to_image: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            blur_sigma: 0.03,
            border_cut: BorderCut::FractionOfMinDim(0.04),
            resize_to_image: true,
        }
    }
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as i64;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for k in -radius..=radius {
        kernel.push((-((k * k) as f64) / (2.0 * sigma * sigma)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= sum;
    }
    kernel
}

#[inline]
fn reflect(i: i64, n: i64) -> usize {
    // half-sample symmetric: -1 -> 0, -2 -> 1, n -> n-1
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Separable Gaussian convolution with reflective boundary handling. The
/// kernel is normalized, so total mass is preserved; `sigma = 0` is the
/// identity.
pub fn blur_grid(grid: &Grid, sigma: f64) -> Grid {
    assert!(sigma >= 0.0, "sigma must be non-negative");
    if sigma == 0.0 {
        return grid.clone();
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as i64;
    let (w, h) = (grid.width(), grid.height());

    // horizontal pass
    let mut tmp = Grid::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, wgt) in kernel.iter().enumerate() {
                let sx = reflect(x as i64 + k as i64 - radius, w as i64);
                acc += wgt * grid.get(sx, y);
            }
            tmp.set(x, y, acc);
        }
    }
    // vertical pass
    let mut out = Grid::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, wgt) in kernel.iter().enumerate() {
                let sy = reflect(y as i64 + k as i64 - radius, h as i64);
                acc += wgt * tmp.get(x, sy);
            }
            out.set(x, y, acc);
        }
    }
    out
}

pub fn blur(map: &SaliencyMap, sigma: f64) -> SaliencyMap {
    SaliencyMap::new(map.model.clone(), blur_grid(&map.grid, sigma))
}

/// Set a frame of `width` pixels to the map minimum. Dimensions are kept so
/// fixation coordinates stay valid; the frame simply can no longer win.
pub fn border_cut(map: &SaliencyMap, width: usize) -> Result<SaliencyMap, PreprocessError> {
    let (w, h) = (map.grid.width(), map.grid.height());
    if width == 0 {
        return Ok(map.clone());
    }
    if 2 * width >= w.min(h) {
        return Err(PreprocessError::WidthTooLarge {
            width,
            dims_w: w,
            dims_h: h,
        });
    }
    let floor = map.grid.min();
    let mut grid = map.grid.clone();
    for y in 0..h {
        for x in 0..w {
            if x < width || y < width || x >= w - width || y >= h - width {
                grid.set(x, y, floor);
            }
        }
    }
    Ok(SaliencyMap::new(map.model.clone(), grid))
}

/// Shift and scale to zero mean and unit population standard deviation,
/// returning the original stats. Constant maps are degenerate.
pub fn standardize(map: &SaliencyMap) -> Result<(SaliencyMap, MapStats), PreprocessError> {
    let (grid, stats) = standardize_grid(&map.grid)?;
    Ok((SaliencyMap::new(map.model.clone(), grid), stats))
}

pub fn standardize_grid(grid: &Grid) -> Result<(Grid, MapStats), PreprocessError> {
    if !grid.all_finite() {
        return Err(PreprocessError::NonFinite);
    }
    if grid.max() == grid.min() {
        return Err(PreprocessError::DegenerateMap);
    }
    let mean = grid.mean();
    let std = grid.std_pop();
    if std == 0.0 {
        return Err(PreprocessError::DegenerateMap);
    }
    let mut out = grid.clone();
    for v in out.values_mut() {
        *v = (*v - mean) / std;
    }
    Ok((out, MapStats { mean, std }))
}

/// Run the shape stages (resize → blur → border_cut). Standardization is the
/// final stage and is applied inside the NSS metric, which is affine
/// invariant; rank-based AUROC never needs it.
pub fn shape_stages(
    map: &SaliencyMap,
    config: &PreprocessConfig,
    image_dims: (u32, u32),
) -> Result<SaliencyMap, PreprocessError> {
    let (tw, th) = (image_dims.0 as usize, image_dims.1 as usize);
    let resized = if config.resize_to_image
        && (map.grid.width() != tw || map.grid.height() != th)
    {
        SaliencyMap::new(map.model.clone(), map.grid.resize_bilinear(tw, th))
    } else {
        map.clone()
    };
    let sigma = config.blur_sigma * resized.grid.width() as f64;
    let blurred = blur(&resized, sigma);
    let cut = config
        .border_cut
        .pixels_for(blurred.grid.width(), blurred.grid.height());
    border_cut(&blurred, cut)
}

/// Full pipeline including standardization: resize → blur → border_cut →
/// standardize.
pub fn apply(
    map: &SaliencyMap,
    config: &PreprocessConfig,
    image_dims: (u32, u32),
) -> Result<(SaliencyMap, MapStats), PreprocessError> {
    let shaped = shape_stages(map, config, image_dims)?;
    standardize(&shaped)
}
