use super::hog::{CellGrid, HOG_CELL_DIM};

pub const WORD_DIM: usize = 4 * HOG_CELL_DIM;

/// Four neighbouring cell descriptors concatenated in row-major order.
pub type Word = [f32; WORD_DIM];

/// One word per overlapping 2×2 cell block (stride 1), row-major:
/// `(rows - 1) * (cols - 1)` words, none for grids smaller than 2×2.
pub fn stack_visual_words(grid: &CellGrid) -> Vec<Word> {
    if grid.rows < 2 || grid.cols < 2 {
        return Vec::new();
    }
    let mut words = Vec::with_capacity((grid.rows - 1) * (grid.cols - 1));
    for r in 0..grid.rows - 1 {
        for c in 0..grid.cols - 1 {
            let mut word = [0.0f32; WORD_DIM];
            let cells = [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)];
            for (slot, (cr, cc)) in word.chunks_exact_mut(HOG_CELL_DIM).zip(cells) {
                slot.copy_from_slice(grid.cell(cr, cc));
            }
            words.push(word);
        }
    }
    words
}

/// Squared Euclidean distance, accumulated in eight interleaved lanes.
#[inline]
pub fn squared_distance(a: &Word, b: &Word) -> f32 {
    let mut acc = [0.0f32; 8];
    for (ca, cb) in a.chunks_exact(8).zip(b.chunks_exact(8)) {
        for k in 0..8 {
            let d = ca[k] - cb[k];
            acc[k] += d * d;
        }
    }
    let tail = WORD_DIM - WORD_DIM % 8;
    let mut sum: f32 = acc.iter().sum();
    for k in tail..WORD_DIM {
        let d = a[k] - b[k];
        sum += d * d;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: usize, cols: usize) -> CellGrid {
        let data = (0..rows * cols * HOG_CELL_DIM).map(|v| v as f32).collect();
        CellGrid { rows, cols, data }
    }

    #[test]
    fn word_counts() {
        assert_eq!(stack_visual_words(&grid(8, 8)).len(), 49);
        assert_eq!(stack_visual_words(&grid(2, 2)).len(), 1);
        assert!(stack_visual_words(&grid(1, 5)).is_empty());
    }

    #[test]
    fn block_layout_is_row_major() {
        let g = grid(2, 3);
        let words = stack_visual_words(&g);
        assert_eq!(words.len(), 2);
        let w = &words[1];
        assert_eq!(&w[..HOG_CELL_DIM], g.cell(0, 1));
        assert_eq!(&w[HOG_CELL_DIM..2 * HOG_CELL_DIM], g.cell(0, 2));
        assert_eq!(&w[2 * HOG_CELL_DIM..3 * HOG_CELL_DIM], g.cell(1, 1));
        assert_eq!(&w[3 * HOG_CELL_DIM..], g.cell(1, 2));
    }

    #[test]
    fn zero_grid_gives_zero_words() {
        let g = CellGrid { rows: 3, cols: 3, data: vec![0.0; 9 * HOG_CELL_DIM] };
        assert!(stack_visual_words(&g).iter().all(|w| w.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn distance_matches_naive_sum() {
        let mut a = [0.0f32; WORD_DIM];
        let mut b = [0.0f32; WORD_DIM];
        for i in 0..WORD_DIM {
            a[i] = (i as f32 * 0.37).sin();
            b[i] = (i as f32 * 0.11).cos();
        }
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| ((x - y) as f64).powi(2)).sum();
        assert!((squared_distance(&a, &b) as f64 - naive).abs() < 1e-4);
        assert_eq!(squared_distance(&a, &a), 0.0);
    }
}
