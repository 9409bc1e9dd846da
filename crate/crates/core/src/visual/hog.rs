//! 31-dimensional HOG cell descriptors: 18 contrast-sensitive orientations,
//! 9 contrast-insensitive orientations and 4 gradient-energy features per
//! 8×8-pixel cell.

use image::RgbImage;

pub const CELL_SIZE: usize = 8;
pub const HOG_CELL_DIM: usize = 31;

const SIGNED_BINS: usize = 18;
const UNSIGNED_BINS: usize = 9;
const TRUNCATION: f32 = 0.2;
const TEXTURE_SCALE: f32 = 0.2357;
const NORM_EPS: f32 = 1e-4;

/// Single-channel raster with luminance on a 0–255 scale.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayPlane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl GrayPlane {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), width * height);
        Self { width, height, data }
    }

    /// ITU-R BT.601 luma.
    pub fn from_rgb(image: &RgbImage) -> Self {
        let data = image
            .pixels()
            .map(|p| 0.299 * p[0] as f32 + 0.587 * p[1] as f32 + 0.114 * p[2] as f32)
            .collect();
        Self::new(image.width() as usize, image.height() as usize, data)
    }

    pub fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in y..y + height {
            let start = row * self.width + x;
            data.extend_from_slice(&self.data[start..start + width]);
        }
        Self::new(width, height, data)
    }

    #[inline]
    fn at(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }
}

/// Row-major grid of per-cell descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl CellGrid {
    pub fn cell(&self, row: usize, col: usize) -> &[f32] {
        let start = (row * self.cols + col) * HOG_CELL_DIM;
        &self.data[start..start + HOG_CELL_DIM]
    }
}

/// Computes the HOG cell grid of a grayscale tile. Pixels past the last
/// full cell are not binned.
pub fn cell_hog_grid(tile: &GrayPlane) -> CellGrid {
    let rows = tile.height / CELL_SIZE;
    let cols = tile.width / CELL_SIZE;
    if rows == 0 || cols == 0 {
        return CellGrid { rows, cols, data: Vec::new() };
    }
    let hist = orientation_histograms(tile, rows, cols);

    let energy: Vec<f32> = hist
        .chunks_exact(SIGNED_BINS)
        .map(|h| (0..UNSIGNED_BINS).map(|o| (h[o] + h[o + UNSIGNED_BINS]).powi(2)).sum())
        .collect();
    let energy_at = |r: isize, c: isize| -> f32 {
        let r = r.clamp(0, rows as isize - 1) as usize;
        let c = c.clamp(0, cols as isize - 1) as usize;
        energy[r * cols + c]
    };
    // inverse norm of the 2×2 block whose top-left cell is (r, c)
    let block_norm = |r: isize, c: isize| -> f32 {
        let e = energy_at(r, c) + energy_at(r, c + 1) + energy_at(r + 1, c) + energy_at(r + 1, c + 1);
        1.0 / (e + NORM_EPS).sqrt()
    };

    let mut data = vec![0.0f32; rows * cols * HOG_CELL_DIM];
    for r in 0..rows {
        for c in 0..cols {
            let (ri, ci) = (r as isize, c as isize);
            let norms = [
                block_norm(ri - 1, ci - 1),
                block_norm(ri - 1, ci),
                block_norm(ri, ci - 1),
                block_norm(ri, ci),
            ];
            let h = &hist[(r * cols + c) * SIGNED_BINS..][..SIGNED_BINS];
            let out = &mut data[(r * cols + c) * HOG_CELL_DIM..][..HOG_CELL_DIM];
            let mut texture = [0.0f32; 4];
            for o in 0..SIGNED_BINS {
                let mut sum = 0.0;
                for (k, n) in norms.iter().enumerate() {
                    let v = (h[o] * n).min(TRUNCATION);
                    sum += v;
                    texture[k] += v;
                }
                out[o] = 0.5 * sum;
            }
            for o in 0..UNSIGNED_BINS {
                let folded = h[o] + h[o + UNSIGNED_BINS];
                out[SIGNED_BINS + o] = 0.5 * norms.iter().map(|n| (folded * n).min(TRUNCATION)).sum::<f32>();
            }
            for k in 0..4 {
                out[SIGNED_BINS + UNSIGNED_BINS + k] = TEXTURE_SCALE * texture[k];
            }
        }
    }
    CellGrid { rows, cols, data }
}

/// Gradient-magnitude-weighted orientation histograms, interpolated linearly
/// between neighbouring orientation bins and bilinearly between the four
/// nearest cell centres.
fn orientation_histograms(tile: &GrayPlane, rows: usize, cols: usize) -> Vec<f32> {
    let mut hist = vec![0.0f32; rows * cols * SIGNED_BINS];
    let (w, h) = (tile.width, tile.height);
    let bin_width = std::f32::consts::TAU / SIGNED_BINS as f32;
    let cell = CELL_SIZE as f32;

    for y in 0..rows * CELL_SIZE {
        let (ym, yp) = (y.saturating_sub(1), (y + 1).min(h - 1));
        let cy = (y as f32 + 0.5) / cell - 0.5;
        let iy = cy.floor();
        let fy = cy - iy;
        let iy = iy as isize;
        for x in 0..cols * CELL_SIZE {
            let (xm, xp) = (x.saturating_sub(1), (x + 1).min(w - 1));
            let dx = tile.at(xp, y) - tile.at(xm, y);
            let dy = tile.at(x, yp) - tile.at(x, ym);
            let mag = (dx * dx + dy * dy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let mut angle = dy.atan2(dx);
            if angle < 0.0 {
                angle += std::f32::consts::TAU;
            }
            let pos = angle / bin_width;
            let b0f = pos.floor();
            let frac = pos - b0f;
            let b0 = (b0f as usize) % SIGNED_BINS;
            let b1 = (b0 + 1) % SIGNED_BINS;

            let cx = (x as f32 + 0.5) / cell - 0.5;
            let ix = cx.floor();
            let fx = cx - ix;
            let ix = ix as isize;

            for (dr, wy) in [(0isize, 1.0 - fy), (1, fy)] {
                let r = iy + dr;
                if r < 0 || r >= rows as isize || wy == 0.0 {
                    continue;
                }
                for (dc, wx) in [(0isize, 1.0 - fx), (1, fx)] {
                    let c = ix + dc;
                    if c < 0 || c >= cols as isize || wx == 0.0 {
                        continue;
                    }
                    let base = (r as usize * cols + c as usize) * SIGNED_BINS;
                    let wgt = mag * wy * wx;
                    hist[base + b0] += wgt * (1.0 - frac);
                    hist[base + b1] += wgt * frac;
                }
            }
        }
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(w: usize, h: usize, f: impl Fn(usize, usize) -> f32) -> GrayPlane {
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                data.push(f(x, y));
            }
        }
        GrayPlane::new(w, h, data)
    }

    #[test]
    fn constant_tile_is_zero() {
        let g = cell_hog_grid(&plane(64, 64, |_, _| 137.0));
        assert_eq!((g.rows, g.cols), (8, 8));
        assert!(g.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn trailing_pixels_dropped() {
        let g = cell_hog_grid(&plane(70, 45, |x, y| (x * y) as f32));
        assert_eq!((g.rows, g.cols), (5, 8));
        assert_eq!(g.data.len(), 5 * 8 * HOG_CELL_DIM);
    }

    #[test]
    fn vertical_step_edge_concentrates_on_horizontal_gradient_bins() {
        // dark left half, bright right half: gradient points along +x
        let tile = plane(64, 64, |x, _| if x < 32 { 20.0 } else { 220.0 });
        // oracle: centred differences are nonzero only at the two columns
        // flanking the step, where dy = 0 and dx > 0, i.e. angle 0
        let g = cell_hog_grid(&tile);
        let mut signed = [0.0f32; SIGNED_BINS];
        for r in 0..g.rows {
            for c in 0..g.cols {
                for (o, s) in signed.iter_mut().enumerate() {
                    *s += g.cell(r, c)[o];
                }
            }
        }
        let total: f32 = signed.iter().sum();
        assert!(total > 0.0);
        assert!(signed[0] / total > 0.99, "{signed:?}");
        // unsigned bin 0 carries the same energy
        let unsigned0: f32 = (0..g.rows)
            .flat_map(|r| (0..g.cols).map(move |c| (r, c)))
            .map(|(r, c)| g.cell(r, c)[SIGNED_BINS])
            .sum();
        assert!(unsigned0 > 0.0);
    }

    #[test]
    fn opposite_edges_share_unsigned_bins() {
        let rising = cell_hog_grid(&plane(32, 32, |x, _| if x < 16 { 0.0 } else { 255.0 }));
        let falling = cell_hog_grid(&plane(32, 32, |x, _| if x < 16 { 255.0 } else { 0.0 }));
        let cell_r = rising.cell(1, 1);
        let cell_f = falling.cell(1, 1);
        assert!(cell_r[0] > 0.0 && cell_f[9] > 0.0);
        for (a, b) in cell_r[SIGNED_BINS..].iter().zip(&cell_f[SIGNED_BINS..]) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }

    #[test]
    fn values_bounded() {
        let g = cell_hog_grid(&plane(48, 40, |x, y| ((x * 37 + y * 91) % 251) as f32));
        // each signed/unsigned entry sums four truncated terms
        assert!(g.data.iter().all(|&v| (0.0..=0.4 + 1e-6).contains(&v)));
    }
}
