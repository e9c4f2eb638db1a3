//! Model behavior on planted-blob fixtures: the built-in models must find
//! the planted region, and all three are translation-covariant at working
//! scale.

use image::{Rgb, RgbImage};
use salbench::corpus::{
    synth_dataset, CategoryLabel, FixationSet, GroundTruth, ImageRecord, SynthOptions,
};
use salbench::metrics::{auroc, AurocOptions};
use salbench::models::{frequency_tuned, phase_fourier, spectral_residual, ModelOptions};

fn blob_image(w: u32, h: u32, cx: i32, cy: i32, radius: i32) -> ImageRecord {
    let rgb = RgbImage::from_fn(w, h, |x, y| {
        let dx = x as i32 - cx;
        let dy = y as i32 - cy;
        if dx * dx + dy * dy <= radius * radius {
            Rgb([230, 40, 40])
        } else {
            Rgb([110, 110, 110])
        }
    });
    ImageRecord {
        id: "blob".into(),
        rgb,
        category: CategoryLabel::Uncategorized,
    }
}

// Compact (Small/Medium) blobs: for Large homogeneous regions the spectral
// models legitimately peak on the contrast edge, which can straddle the
// rasterized mask boundary.
#[test]
fn spectral_residual_argmax_falls_inside_planted_mask() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_dataset(
        dir.path(),
        21,
        6,
        [0.0, 0.5, 0.5],
        &SynthOptions::default(),
    )
    .unwrap();
    for entry in manifest.entries() {
        let image = manifest.load_image(entry).unwrap();
        let mask = manifest.load_mask(entry).unwrap();
        let map = spectral_residual(&image, 64, &ModelOptions::default()).unwrap();
        let (x, y) = map.grid.argmax();
        assert!(
            mask.is_positive(x as u32, y as u32),
            "SR argmax ({x},{y}) outside mask for `{}` ({})",
            entry.id,
            entry.category
        );
    }
}

#[test]
fn phase_fourier_beats_chance_on_planted_fixations() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_dataset(
        dir.path(),
        22,
        4,
        [0.25, 0.5, 0.25],
        &SynthOptions::default(),
    )
    .unwrap();
    for entry in manifest.entries() {
        let image = manifest.load_image(entry).unwrap();
        let fixations = manifest.load_fixations(entry).unwrap();
        let map = phase_fourier(&image, 64, &ModelOptions::default()).unwrap();
        let score = auroc(
            &map,
            &GroundTruth::Fixations(fixations),
            &AurocOptions {
                seed: 5,
                ..AurocOptions::default()
            },
        )
        .unwrap();
        assert!(
            score.value > 0.5,
            "PFT AUROC {} vs planted fixations for `{}`",
            score.value,
            entry.id
        );
    }
}

#[test]
fn frequency_tuned_is_brighter_inside_the_planted_region() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth_dataset(
        dir.path(),
        23,
        4,
        [0.25, 0.5, 0.25],
        &SynthOptions::default(),
    )
    .unwrap();
    for entry in manifest.entries() {
        let image = manifest.load_image(entry).unwrap();
        let mask = manifest.load_mask(entry).unwrap();
        let map = frequency_tuned(&image, 3.0);
        let mut inside = (0.0, 0usize);
        let mut outside = (0.0, 0usize);
        for y in 0..map.grid.height() {
            for x in 0..map.grid.width() {
                let v = map.grid.get(x, y);
                if mask.is_positive(x as u32, y as u32) {
                    inside = (inside.0 + v, inside.1 + 1);
                } else {
                    outside = (outside.0 + v, outside.1 + 1);
                }
            }
        }
        let mean_in = inside.0 / inside.1 as f64;
        let mean_out = outside.0 / outside.1 as f64;
        assert!(
            mean_in > mean_out,
            "FT mask means {mean_in} <= {mean_out} for `{}`",
            entry.id
        );
    }
}

/// Shifting the blob shifts the argmax by the same amount, within the
/// post-transform blur radius plus the blob extent.
#[test]
fn built_in_models_are_translation_covariant() {
    let base = blob_image(64, 64, 22, 20, 3);
    let shifted = blob_image(64, 64, 34, 29, 3);
    let (dx, dy) = (12i64, 9i64);
    // smoothing sigma = 0.025 * 64 = 1.6 px -> kernel radius 5; blob radius 3
    let tolerance = 8i64;

    let opts = ModelOptions::default();
    let runs: [(&str, Box<dyn Fn(&ImageRecord) -> salbench::models::SaliencyMap>); 3] = [
        (
            "SR",
            Box::new(|img| spectral_residual(img, 64, &opts).unwrap()),
        ),
        (
            "PFT",
            Box::new(|img| phase_fourier(img, 64, &opts).unwrap()),
        ),
        ("FT", Box::new(|img| frequency_tuned(img, 3.0))),
    ];
    for (name, model) in &runs {
        let (x0, y0) = model(&base).grid.argmax();
        let (x1, y1) = model(&shifted).grid.argmax();
        let got_dx = x1 as i64 - x0 as i64;
        let got_dy = y1 as i64 - y0 as i64;
        assert!(
            (got_dx - dx).abs() <= tolerance && (got_dy - dy).abs() <= tolerance,
            "{name}: argmax moved by ({got_dx},{got_dy}), expected ({dx},{dy}) +/- {tolerance}"
        );
    }
}
