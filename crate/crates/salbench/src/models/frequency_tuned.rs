//! Frequency-tuned saliency: per-pixel Euclidean distance in Lab space
//! between the image's mean Lab vector and a Gaussian-blurred Lab image.

use super::color::lab_grids;
use super::SaliencyMap;
use crate::corpus::ImageRecord;
use crate::grid::Grid;
use crate::preprocess::blur_grid;

pub fn frequency_tuned(image: &ImageRecord, blur_radius: f64) -> SaliencyMap {
    let [l, a, b] = lab_grids(&image.rgb);
    let means = [l.mean(), a.mean(), b.mean()];
    let blurred = [
        blur_grid(&l, blur_radius),
        blur_grid(&a, blur_radius),
        blur_grid(&b, blur_radius),
    ];
    let (w, h) = (l.width(), l.height());
    let mut out = Grid::new(w, h);
    for i in 0..w * h {
        let mut d2 = 0.0;
        for c in 0..3 {
            let d = means[c] - blurred[c].values()[i];
            d2 += d * d;
        }
        out.values_mut()[i] = d2.sqrt();
    }
    SaliencyMap::new("FT".to_string(), out)
}
