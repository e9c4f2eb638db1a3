//! Ingestion of precomputed saliency maps, so models without a local
//! implementation can join the comparison.
//!
//! Supported formats: grayscale PNG (8/16-bit, scaled by the type maximum)
//! and CSV float grids. Maps are bilinearly resized to the paired image
//! dimensions when needed.

use std::path::{Path, PathBuf};

use image::DynamicImage;

use super::{ModelError, SaliencyMap};
use crate::grid::Grid;

fn grid_from_png(path: &Path) -> Result<Grid, ModelError> {
    let img = image::open(path).map_err(|e| ModelError::UnreadableMap {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    // 8-bit sources widen to 16-bit by *257, so 255 still maps to 1.0
    let gray = match img {
        DynamicImage::ImageLuma16(g) => g,
        other => other.to_luma16(),
    };
    let (w, h) = gray.dimensions();
    let data: Vec<f64> = gray.pixels().map(|p| p.0[0] as f64 / 65535.0).collect();
    Ok(Grid::from_vec(w as usize, h as usize, data))
}

fn grid_from_csv(path: &Path) -> Result<Grid, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::UnreadableMap {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|e| ModelError::UnreadableMap {
                        path: path.to_path_buf(),
                        reason: format!("bad cell `{cell}`: {e}"),
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(ModelError::UnreadableMap {
                    path: path.to_path_buf(),
                    reason: "ragged rows".into(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(ModelError::UnreadableMap {
            path: path.to_path_buf(),
            reason: "empty grid".into(),
        });
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteValue {
            path: path.to_path_buf(),
        });
    }
    let mut grid = Grid::from_rows(&rows);
    let (min, max) = (grid.min(), grid.max());
    // values already inside [0,1] are kept verbatim; anything else is
    // min-max scaled (metrics are rank/affine invariant anyway)
    if min < 0.0 || max > 1.0 {
        let span = max - min;
        for v in grid.values_mut() {
            *v = if span > 0.0 { (*v - min) / span } else { 0.0 };
        }
    }
    Ok(grid)
}

/// Load one precomputed map and resize it to `target_dims`.
pub fn load_external_map(path: &Path, target_dims: (u32, u32)) -> Result<SaliencyMap, ModelError> {
    let ext = path
        .extension()
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    let grid = if ext == "png" {
        grid_from_png(path)?
    } else {
        grid_from_csv(path)?
    };
    if !grid.all_finite() {
        return Err(ModelError::NonFiniteValue {
            path: path.to_path_buf(),
        });
    }
    let resized = grid.resize_bilinear(target_dims.0 as usize, target_dims.1 as usize);
    Ok(SaliencyMap::new("external".to_string(), resized))
}

/// Find `<dir>/<image_id>.png` or `<dir>/<image_id>.csv` and load it.
pub fn load_for_image(
    dir: &Path,
    image_id: &str,
    target_dims: (u32, u32),
) -> Result<SaliencyMap, ModelError> {
    for ext in ["png", "csv"] {
        let candidate: PathBuf = dir.join(format!("{image_id}.{ext}"));
        if candidate.exists() {
            return load_external_map(&candidate, target_dims);
        }
    }
    Err(ModelError::MissingMapFile {
        model: String::new(),
        image_id: image_id.to_string(),
        dir: dir.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{GrayImage, Luma};

    #[test]
    fn eight_bit_png_scales_to_unit_max() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.png");
        let img = GrayImage::from_fn(16, 16, |x, _| Luma([if x == 3 { 255 } else { 10 }]));
        img.save(&p).unwrap();
        let map = load_external_map(&p, (16, 16)).unwrap();
        assert!((map.grid.max() - 1.0).abs() < 1e-12);
        assert!(map.grid.min() > 0.0);
    }

    #[test]
    fn csv_nan_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, "0.1,0.2\n0.3,nan\n").unwrap();
        assert!(matches!(
            load_external_map(&p, (2, 2)),
            Err(ModelError::NonFiniteValue { .. })
        ));
    }

    #[test]
    fn small_map_is_resized_to_target() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let mut text = String::new();
        for y in 0..64 {
            let row: Vec<String> = (0..64).map(|x| format!("{}", (x + y) as f64 / 126.0)).collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
        std::fs::write(&p, text).unwrap();
        let map = load_external_map(&p, (128, 128)).unwrap();
        assert_eq!(map.dims(), (128, 128));
    }

    #[test]
    fn missing_map_file_names_image() {
        let dir = tempfile::tempdir().unwrap();
        match load_for_image(dir.path(), "img9", (8, 8)) {
            Err(ModelError::MissingMapFile { image_id, .. }) => assert_eq!(image_id, "img9"),
            other => panic!("expected MissingMapFile, got {other:?}"),
        }
    }
}
