//! sRGB to grayscale and CIELAB conversion (D65 white point).

use image::RgbImage;

use crate::grid::Grid;

/// Rec. 601 luma of gamma-encoded sRGB, scaled to [0,1].
pub fn luma_grid(rgb: &RgbImage) -> Grid {
    let (w, h) = rgb.dimensions();
    let mut grid = Grid::new(w as usize, h as usize);
    for (x, y, p) in rgb.enumerate_pixels() {
        let [r, g, b] = p.0;
        let v = (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64) / 255.0;
        grid.set(x as usize, y as usize, v);
    }
    grid
}

#[inline]
fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// Convert one sRGB pixel (8-bit channels) to CIELAB under D65.
pub fn srgb_to_lab(r: u8, g: u8, b: u8) -> [f64; 3] {
    let rl = srgb_to_linear(r as f64 / 255.0);
    let gl = srgb_to_linear(g as f64 / 255.0);
    let bl = srgb_to_linear(b as f64 / 255.0);

    // sRGB D65 reference primaries
    let x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    let y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    let z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;

    let (xn, yn, zn) = (0.95047, 1.0, 1.08883);
    let fx = lab_f(x / xn);
    let fy = lab_f(y / yn);
    let fz = lab_f(z / zn);

    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Split an image into its three Lab channel grids.
pub fn lab_grids(rgb: &RgbImage) -> [Grid; 3] {
    let (w, h) = rgb.dimensions();
    let mut l = Grid::new(w as usize, h as usize);
    let mut a = Grid::new(w as usize, h as usize);
    let mut b = Grid::new(w as usize, h as usize);
    for (x, y, p) in rgb.enumerate_pixels() {
        let lab = srgb_to_lab(p.0[0], p.0[1], p.0[2]);
        l.set(x as usize, y as usize, lab[0]);
        a.set(x as usize, y as usize, lab[1]);
        b.set(x as usize, y as usize, lab[2]);
    }
    [l, a, b]
}
