//! Visual channel: a tiled bag-of-visual-words HOG histogram stacked with an
//! HSV color histogram, compared between page and homepage by coordinatewise
//! minimum.

mod bovw;
mod color;
mod descriptor;
mod hog;
mod kmeans;
mod tiling;
mod vocabulary;
mod words;

pub use bovw::{bovw_histogram, bovw_histogram_counted, dedup_words, nearest_centroid};
pub use color::{color_bin, color_histogram, rgb_to_hsv, COLOR_BINS};
pub use descriptor::{
    describe_snapshot, describe_snapshot_at, load_snapshot, visual_delta, SnapshotFeatures, VisualDescriptor,
    CANONICAL_HEIGHT, CANONICAL_WIDTH,
};
pub use hog::{cell_hog_grid, CellGrid, GrayPlane, CELL_SIZE, HOG_CELL_DIM};
pub use kmeans::{kmeans, KMeansFit, KMeansOptions};
pub use tiling::{tile_image, tile_rects, TileRect, MIN_IMAGE_SIDE, TILE_COUNT};
pub use vocabulary::{build_vocabulary, build_vocabulary_with, sample_words, Vocabulary, DEFAULT_VOCABULARY_SIZE};
pub use words::{squared_distance, stack_visual_words, Word, WORD_DIM};
