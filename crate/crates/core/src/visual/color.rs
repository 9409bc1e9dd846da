use image::RgbImage;

const H_BINS: usize = 8;
const S_BINS: usize = 12;
const V_BINS: usize = 3;
pub const COLOR_BINS: usize = H_BINS * S_BINS * V_BINS;

/// RGB to HSV with `H` in `[0, 360)` and `S`, `V` in `[0, 1]`.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let (r, g, b) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max == 0.0 { 0.0 } else { delta / max };
    let mut h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    if h >= 360.0 {
        h -= 360.0;
    }
    (h, s, v)
}

/// Flat bin index `h_bin * 36 + s_bin * 3 + v_bin`.
#[inline]
pub fn color_bin(r: u8, g: u8, b: u8) -> usize {
    let (h, s, v) = rgb_to_hsv(r, g, b);
    let hb = ((h / 45.0).floor() as usize).min(H_BINS - 1);
    let sb = ((s * S_BINS as f64).floor() as usize).min(S_BINS - 1);
    let vb = ((v * V_BINS as f64).floor() as usize).min(V_BINS - 1);
    hb * S_BINS * V_BINS + sb * V_BINS + vb
}

/// 8×12×3 HSV histogram normalized to sum 1 (all zero for an empty tile).
pub fn color_histogram(tile: &RgbImage) -> Vec<f64> {
    let mut counts = vec![0usize; COLOR_BINS];
    for p in tile.pixels() {
        counts[color_bin(p[0], p[1], p[2])] += 1;
    }
    normalize_counts(&counts)
}

pub(crate) fn normalize_counts(counts: &[usize]) -> Vec<f64> {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}
