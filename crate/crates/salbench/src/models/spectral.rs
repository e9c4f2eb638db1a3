//! Spectral saliency models: spectral residual (SR) and phase-only Fourier
//! transform (PFT).
//!
//! Both operate on a grayscale image downscaled so its larger side equals the
//! working size, compute a modified spectrum, invert it, square the
//! magnitude, smooth, and upscale back to the image resolution.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::color::luma_grid;
use super::{ConstantPolicy, ModelError, ModelOptions, SaliencyMap};
use crate::corpus::ImageRecord;
use crate::grid::Grid;
use crate::preprocess::blur_grid;

fn transpose(width: usize, height: usize, data: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); data.len()];
    for y in 0..height {
        for x in 0..width {
            out[x * height + y] = data[y * width + x];
        }
    }
    out
}

fn fft_2d(width: usize, height: usize, data: &mut Vec<Complex<f64>>, inverse: bool) {
    let mut planner = FftPlanner::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(width)
    } else {
        planner.plan_fft_forward(width)
    };
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let mut t = transpose(width, height, data);
    let col_fft = if inverse {
        planner.plan_fft_inverse(height)
    } else {
        planner.plan_fft_forward(height)
    };
    for col in t.chunks_exact_mut(height) {
        col_fft.process(col);
    }
    *data = transpose(height, width, &t);
    if inverse {
        let scale = 1.0 / (width * height) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// 3x3-style box filter with replicate boundary, used on the log-amplitude
/// spectrum.
fn box_filter(grid: &Grid, side: usize) -> Grid {
    assert!(side % 2 == 1, "box side must be odd");
    let r = (side / 2) as i64;
    let (w, h) = (grid.width() as i64, grid.height() as i64);
    let mut out = Grid::new(grid.width(), grid.height());
    let norm = 1.0 / (side * side) as f64;
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let sx = (x + dx).clamp(0, w - 1) as usize;
                    let sy = (y + dy).clamp(0, h - 1) as usize;
                    acc += grid.get(sx, sy);
                }
            }
            out.set(x as usize, y as usize, acc * norm);
        }
    }
    out
}

fn working_scale(image: &ImageRecord, working_size: usize) -> (usize, usize) {
    let (w, h) = (image.width() as f64, image.height() as f64);
    let scale = (working_size as f64 / w.max(h)).min(1.0);
    let ww = (w * scale).round().max(1.0) as usize;
    let wh = (h * scale).round().max(1.0) as usize;
    (ww, wh)
}

enum Spectrum {
    Residual { box_side: usize },
    PhaseOnly,
}

fn spectral_model(
    image: &ImageRecord,
    working_size: usize,
    options: &ModelOptions,
    spectrum: Spectrum,
    model_name: &str,
) -> Result<SaliencyMap, ModelError> {
    assert!(working_size >= 16, "working_size must be >= 16");
    let gray = luma_grid(&image.rgb);
    if gray.max() == gray.min() {
        return match options.on_constant {
            ConstantPolicy::ZeroMap => Ok(SaliencyMap::new(
                model_name.to_string(),
                Grid::new(image.width() as usize, image.height() as usize),
            )),
            ConstantPolicy::Error => Err(ModelError::DegenerateImage(image.id.clone())),
        };
    }

    let (ww, wh) = working_scale(image, working_size);
    let small = gray.resize_bilinear(ww, wh);

    let mut buf: Vec<Complex<f64>> = small.values().iter().map(|v| Complex::new(*v, 0.0)).collect();
    fft_2d(ww, wh, &mut buf, false);

    match spectrum {
        Spectrum::Residual { box_side } => {
            let log_amp = Grid::from_vec(
                ww,
                wh,
                buf.iter().map(|c| c.norm().max(1e-30).ln()).collect(),
            );
            let smoothed = box_filter(&log_amp, box_side);
            for (i, c) in buf.iter_mut().enumerate() {
                let residual = log_amp.values()[i] - smoothed.values()[i];
                let phase = c.arg();
                *c = Complex::from_polar(residual.exp(), phase);
            }
        }
        Spectrum::PhaseOnly => {
            for c in buf.iter_mut() {
                let n = c.norm();
                *c = if n > 0.0 {
                    *c / n
                } else {
                    Complex::new(0.0, 0.0)
                };
            }
        }
    }

    fft_2d(ww, wh, &mut buf, true);
    let raw = Grid::from_vec(ww, wh, buf.iter().map(|c| c.norm_sqr()).collect());

    let sigma = options.smooth_frac * working_size as f64;
    let smoothed = blur_grid(&raw, sigma);
    let full = smoothed.resize_bilinear(image.width() as usize, image.height() as usize);
    debug_assert!(full.all_finite());
    Ok(SaliencyMap::new(model_name.to_string(), full))
}

/// Spectral residual saliency: suppress the smooth part of the log-amplitude
/// spectrum and invert what remains.
pub fn spectral_residual(
    image: &ImageRecord,
    working_size: usize,
    options: &ModelOptions,
) -> Result<SaliencyMap, ModelError> {
    spectral_model(
        image,
        working_size,
        options,
        Spectrum::Residual {
            box_side: options.sr_box,
        },
        "SR",
    )
}

/// Phase-only Fourier transform saliency: keep the phase, flatten the
/// amplitude to one, and invert.
pub fn phase_fourier(
    image: &ImageRecord,
    working_size: usize,
    options: &ModelOptions,
) -> Result<SaliencyMap, ModelError> {
    spectral_model(image, working_size, options, Spectrum::PhaseOnly, "PFT")
}
