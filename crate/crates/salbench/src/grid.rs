//! Dense row-major 2-D grid of `f64` values.
//!
//! Coordinates are 0-indexed with `x` = column and `y` = row throughout the
//! crate. Saliency maps, masks and intermediate buffers all share this type.

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Grid {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "data length mismatch");
        Grid {
            width,
            height,
            data,
        }
    }

    /// Build from nested rows; handy in tests and doc examples.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let height = rows.len();
        let width = rows[0].len();
        let mut data = Vec::with_capacity(width * height);
        for row in rows {
            assert_eq!(row.len(), width, "ragged rows");
            data.extend_from_slice(row);
        }
        Grid {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Population mean over all cells.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Population standard deviation (the grid is its own population).
    pub fn std_pop(&self) -> f64 {
        let mu = self.mean();
        let ss: f64 = self.data.iter().map(|v| (v - mu) * (v - mu)).sum();
        (ss / self.data.len() as f64).sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Location of the maximum value (first occurrence in row-major order).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.data.iter().enumerate() {
            if *v > self.data[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Bilinear resample to `(width, height)`. Sample positions are aligned so
    /// that the corners of the source and target grids coincide.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> Grid {
        assert!(width > 0 && height > 0);
        if width == self.width && height == self.height {
            return self.clone();
        }
        let mut out = Grid::new(width, height);
        let sx = if width > 1 {
            (self.width - 1) as f64 / (width - 1) as f64
        } else {
            0.0
        };
        let sy = if height > 1 {
            (self.height - 1) as f64 / (height - 1) as f64
        } else {
            0.0
        };
        for y in 0..height {
            let fy = y as f64 * sy;
            let y0 = fy.floor() as usize;
            let y1 = (y0 + 1).min(self.height - 1);
            let dy = fy - y0 as f64;
            for x in 0..width {
                let fx = x as f64 * sx;
                let x0 = fx.floor() as usize;
                let x1 = (x0 + 1).min(self.width - 1);
                let dx = fx - x0 as f64;
                let top = self.get(x0, y0) * (1.0 - dx) + self.get(x1, y0) * dx;
                let bot = self.get(x0, y1) * (1.0 - dx) + self.get(x1, y1) * dx;
                out.set(x, y, top * (1.0 - dy) + bot * dy);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_is_row_major() {
        let g = Grid::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(g.get(0, 0), 1.0);
        assert_eq!(g.get(1, 0), 2.0);
        assert_eq!(g.get(0, 1), 3.0);
        assert_eq!(g.get(1, 1), 4.0);
    }

    #[test]
    fn stats_match_hand_values() {
        let g = Grid::from_rows(&[vec![1.0, 3.0], vec![3.0, 1.0]]);
        assert_eq!(g.mean(), 2.0);
        assert_eq!(g.std_pop(), 1.0);
        assert_eq!(g.min(), 1.0);
        assert_eq!(g.max(), 3.0);
    }

    #[test]
    fn resize_identity_and_corners() {
        let g = Grid::from_rows(&[vec![0.0, 1.0], vec![2.0, 3.0]]);
        assert_eq!(g.resize_bilinear(2, 2), g);
        let up = g.resize_bilinear(5, 5);
        assert_eq!(up.get(0, 0), 0.0);
        assert_eq!(up.get(4, 0), 1.0);
        assert_eq!(up.get(0, 4), 2.0);
        assert_eq!(up.get(4, 4), 3.0);
        // centre is the average of the four corners
        assert!((up.get(2, 2) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn argmax_finds_peak() {
        let mut g = Grid::new(7, 5);
        g.set(3, 2, 9.0);
        assert_eq!(g.argmax(), (3, 2));
    }
}
