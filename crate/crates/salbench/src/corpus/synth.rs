//! Deterministic synthetic dataset generator.
//!
//! Each generated image contains one high-contrast elliptical region planted
//! on a noisy background. The region mask is exactly the planted ellipse, the
//! area fraction falls inside the requested category bracket, and at least
//! 80% of the fixations land inside the region. Re-running with the same seed
//! writes byte-identical files.

use std::fs;
use std::path::Path;

use image::{GrayImage, Luma, Rgb, RgbImage};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{load_manifest, CategoryBrackets, CategoryLabel, CorpusError, DatasetManifest};

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub width: u32,
    pub height: u32,
    /// Fixations per image.
    pub fixations: usize,
    /// Fraction of fixations forced inside the planted region (≥ 0.8).
    pub inside_fraction: f64,
    pub brackets: CategoryBrackets,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            width: 160,
            height: 120,
            fixations: 24,
            inside_fraction: 0.85,
            brackets: CategoryBrackets::default(),
        }
    }
}

/// Split `n_images` across {Large, Medium, Small} by largest remainder so the
/// counts are deterministic and sum to `n_images`.
fn category_counts(n_images: usize, mix: [f64; 3]) -> [usize; 3] {
    let exact: Vec<f64> = mix.iter().map(|p| p * n_images as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut remainder: usize = n_images - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in &order {
        if remainder == 0 {
            break;
        }
        counts[i] += 1;
        remainder -= 1;
    }
    [counts[0], counts[1], counts[2]]
}

struct Ellipse {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
}

impl Ellipse {
    fn contains(&self, x: u32, y: u32) -> bool {
        let dx = (x as f64 - self.cx) / self.rx;
        let dy = (y as f64 - self.cy) / self.ry;
        dx * dx + dy * dy <= 1.0
    }
}

/// Target area fractions sit well inside each bracket so pixel rasterization
/// cannot push a mask across a bracket edge.
fn area_target(rng: &mut ChaCha8Rng, category: CategoryLabel, brackets: &CategoryBrackets) -> f64 {
    match category {
        CategoryLabel::Large => rng.random_range(brackets.large_min * 1.2..brackets.large_min * 1.8),
        CategoryLabel::Medium => {
            let lo = brackets.small_max * 1.6;
            let hi = brackets.large_min * 0.75;
            rng.random_range(lo..hi)
        }
        CategoryLabel::Small => rng.random_range(brackets.small_max * 0.3..brackets.small_max * 0.8),
        CategoryLabel::Uncategorized => 0.05,
    }
}

fn plant_ellipse(rng: &mut ChaCha8Rng, w: u32, h: u32, area_frac: f64) -> Ellipse {
    let area = area_frac * (w as f64) * (h as f64);
    let aspect = rng.random_range(0.75..1.35);
    // area = pi * rx * ry with ry = rx / aspect
    let rx = (area * aspect / std::f64::consts::PI).sqrt();
    let ry = rx / aspect;
    // keep the blob away from the borders so border cuts never clip it
    let margin_x = rx + 0.12 * w as f64;
    let margin_y = ry + 0.12 * h as f64;
    let cx = rng.random_range(margin_x..(w as f64 - margin_x));
    let cy = rng.random_range(margin_y..(h as f64 - margin_y));
    Ellipse { cx, cy, rx, ry }
}

/// Generate a dataset under `out_dir` and return its validated manifest.
///
/// `category_mix` gives the proportions of {Large, Medium, Small} images and
/// must sum to 1 within 1e-9.
pub fn synth_dataset(
    out_dir: &Path,
    seed: u64,
    n_images: usize,
    category_mix: [f64; 3],
    options: &SynthOptions,
) -> Result<DatasetManifest, CorpusError> {
    let sum: f64 = category_mix.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || category_mix.iter().any(|p| *p < 0.0) {
        return Err(CorpusError::InvalidProportions(sum));
    }
    assert!(n_images >= 1, "n_images must be >= 1");
    assert!(
        options.inside_fraction >= 0.8,
        "inside_fraction must keep the 80% guarantee"
    );

    fs::create_dir_all(out_dir).map_err(|source| CorpusError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let counts = category_counts(n_images, category_mix);
    let mut categories = Vec::with_capacity(n_images);
    for (count, cat) in counts.iter().zip([
        CategoryLabel::Large,
        CategoryLabel::Medium,
        CategoryLabel::Small,
    ]) {
        categories.extend(std::iter::repeat_n(cat, *count));
    }

    let (w, h) = (options.width, options.height);
    let mut entries_json = Vec::with_capacity(n_images);

    for (idx, category) in categories.iter().enumerate() {
        // one independent stream per image so files never depend on ordering
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed ^ (idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let id = format!("synth{idx:04}");

        let frac = area_target(&mut rng, *category, &options.brackets);
        let ellipse = plant_ellipse(&mut rng, w, h, frac);

        // background: dim gray noise; blob: warm bright color whose luma is
        // well above the background so both color and luminance models see it
        let blob_color = [
            rng.random_range(200..=255u16) as u8,
            rng.random_range(160..=220u16) as u8,
            rng.random_range(0..=80u16) as u8,
        ];
        let mut img = RgbImage::new(w, h);
        let mut mask = GrayImage::new(w, h);
        let mut inside_pixels = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let noise = rng.random_range(-18i16..=18i16);
                let px = if ellipse.contains(x, y) {
                    inside_pixels.push((x, y));
                    mask.put_pixel(x, y, Luma([255]));
                    [
                        (blob_color[0] as i16 + noise).clamp(0, 255) as u8,
                        (blob_color[1] as i16 + noise).clamp(0, 255) as u8,
                        (blob_color[2] as i16 + noise).clamp(0, 255) as u8,
                    ]
                } else {
                    let g = (110i16 + noise).clamp(0, 255) as u8;
                    [g, g, g]
                };
                img.put_pixel(x, y, Rgb(px));
            }
        }
        debug_assert!(!inside_pixels.is_empty());

        let n_inside = ((options.fixations as f64) * options.inside_fraction).ceil() as usize;
        let mut fixations = Vec::with_capacity(options.fixations);
        for _ in 0..n_inside.min(options.fixations) {
            let k = rng.random_range(0..inside_pixels.len());
            fixations.push(inside_pixels[k]);
        }
        while fixations.len() < options.fixations {
            fixations.push((rng.random_range(0..w), rng.random_range(0..h)));
        }

        let image_name = format!("{id}.png");
        let fix_name = format!("{id}_fix.csv");
        let mask_name = format!("{id}_mask.png");
        img.save(out_dir.join(&image_name))
            .map_err(|source| CorpusError::Image {
                path: out_dir.join(&image_name),
                source,
            })?;
        mask.save(out_dir.join(&mask_name))
            .map_err(|source| CorpusError::Image {
                path: out_dir.join(&mask_name),
                source,
            })?;
        let mut csv = String::new();
        for (x, y) in &fixations {
            csv.push_str(&format!("{x},{y}\n"));
        }
        fs::write(out_dir.join(&fix_name), csv).map_err(|source| CorpusError::Io {
            path: out_dir.join(&fix_name),
            source,
        })?;

        entries_json.push(format!(
            r#"    {{"id":"{id}","image":"{image_name}","fixations":"{fix_name}","mask":"{mask_name}","category":"{category}"}}"#
        ));
    }

    let manifest_text = format!(
        "{{\n  \"root\": \".\",\n  \"brackets\": {{\"large_min\": {}, \"small_max\": {}}},\n  \"entries\": [\n{}\n  ]\n}}\n",
        options.brackets.large_min,
        options.brackets.small_max,
        entries_json.join(",\n")
    );
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, manifest_text).map_err(|source| CorpusError::Io {
        path: manifest_path.clone(),
        source,
    })?;

    load_manifest(&manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn hash_dir(dir: &Path) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for entry in fs::read_dir(dir).unwrap() {
            let entry = entry.unwrap();
            let bytes = fs::read(entry.path()).unwrap();
            let mut hash: u64 = 0xcbf29ce484222325;
            for b in bytes {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
            out.insert(entry.file_name().to_string_lossy().into_owned(), hash);
        }
        out
    }

    #[test]
    fn mix_splits_evenly_and_reruns_are_byte_identical() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let opts = SynthOptions::default();
        let third = 1.0 / 3.0;
        let m1 = synth_dataset(dir1.path(), 1, 6, [third, third, third], &opts).unwrap();
        let m2 = synth_dataset(dir2.path(), 1, 6, [third, third, third], &opts).unwrap();
        let count = |m: &DatasetManifest, c: CategoryLabel| {
            m.entries().iter().filter(|e| e.category == c).count()
        };
        assert_eq!(count(&m1, CategoryLabel::Large), 2);
        assert_eq!(count(&m1, CategoryLabel::Medium), 2);
        assert_eq!(count(&m1, CategoryLabel::Small), 2);
        assert_eq!(hash_dir(dir1.path()), hash_dir(dir2.path()));
        assert_eq!(m1.len(), m2.len());
    }

    #[test]
    fn different_seeds_differ() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let opts = SynthOptions::default();
        synth_dataset(dir1.path(), 1, 2, [0.5, 0.5, 0.0], &opts).unwrap();
        synth_dataset(dir2.path(), 2, 2, [0.5, 0.5, 0.0], &opts).unwrap();
        assert_ne!(hash_dir(dir1.path()), hash_dir(dir2.path()));
    }

    #[test]
    fn mask_fractions_fall_in_their_brackets() {
        let dir = tempfile::tempdir().unwrap();
        let opts = SynthOptions::default();
        let third = 1.0 / 3.0;
        let manifest = synth_dataset(dir.path(), 7, 9, [third, third, third], &opts).unwrap();
        for entry in manifest.entries() {
            let mask = manifest.load_mask(entry).unwrap();
            let frac = mask.area_fraction();
            let classified = opts.brackets.classify(frac);
            assert_eq!(
                classified, entry.category,
                "mask fraction {frac} of `{}` escaped its bracket",
                entry.id
            );
        }
    }

    #[test]
    fn fixations_load_and_mostly_fall_inside_region() {
        let dir = tempfile::tempdir().unwrap();
        let opts = SynthOptions::default();
        let manifest = synth_dataset(dir.path(), 3, 4, [0.25, 0.5, 0.25], &opts).unwrap();
        for entry in manifest.entries() {
            let fx = manifest.load_fixations(entry).unwrap();
            let mask = manifest.load_mask(entry).unwrap();
            let inside = fx
                .points()
                .iter()
                .filter(|(x, y)| mask.is_positive(*x, *y))
                .count();
            assert!(
                inside as f64 >= 0.8 * fx.len() as f64,
                "only {inside}/{} fixations inside region for `{}`",
                fx.len(),
                entry.id
            );
        }
    }

    #[test]
    fn bad_proportions_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let res = synth_dataset(dir.path(), 1, 3, [0.5, 0.5, 0.5], &SynthOptions::default());
        assert!(matches!(res, Err(CorpusError::InvalidProportions(_))));
    }
}
