use std::io::BufReader;
use std::path::Path;

use image::{imageops::FilterType, ImageFormat, RgbImage};

use super::bovw::{bovw_histogram_counted, dedup_words};
use super::color::{color_bin, normalize_counts, COLOR_BINS};
use super::hog::{cell_hog_grid, GrayPlane};
use super::tiling::{tile_rects, TILE_COUNT};
use super::vocabulary::Vocabulary;
use super::words::{stack_visual_words, Word};
use crate::{Error, Result};

pub const CANONICAL_WIDTH: u32 = 1024;
pub const CANONICAL_HEIGHT: u32 = 768;

/// Stacked per-tile histograms: `TILE_COUNT` visual-word histograms of
/// `vocab_size` bins, then `TILE_COUNT` color histograms of 288 bins.
/// With the default 300-word vocabulary the dimension is 12,348.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualDescriptor {
    vocab_size: usize,
    values: Vec<f64>,
}

impl VisualDescriptor {
    pub fn dimension_for(vocab_size: usize) -> usize {
        TILE_COUNT * (vocab_size + COLOR_BINS)
    }

    pub fn new(vocab_size: usize, values: Vec<f64>) -> Result<Self> {
        let expected = Self::dimension_for(vocab_size);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { vocab_size, values })
    }

    pub fn zeros(vocab_size: usize) -> Self {
        Self {
            vocab_size,
            values: vec![0.0; Self::dimension_for(vocab_size)],
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn hog_block(&self, tile: usize) -> &[f64] {
        &self.values[tile * self.vocab_size..][..self.vocab_size]
    }

    pub fn color_block(&self, tile: usize) -> &[f64] {
        &self.values[TILE_COUNT * self.vocab_size + tile * COLOR_BINS..][..COLOR_BINS]
    }

    /// All 42 histogram blocks, HOG blocks first.
    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        (0..TILE_COUNT)
            .map(|t| self.hog_block(t))
            .chain((0..TILE_COUNT).map(|t| self.color_block(t)))
    }
}

/// Vocabulary-independent intermediate: visual words (with multiplicities)
/// and color histograms of every tile of one snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotFeatures {
    pub tile_words: Vec<Vec<(Word, u32)>>,
    pub tile_colors: Vec<Vec<f64>>,
}

impl SnapshotFeatures {
    /// Resizes to `canonical` (bilinear) and extracts per-tile words and
    /// color histograms.
    pub fn extract(image: &RgbImage, canonical: (u32, u32)) -> Result<Self> {
        // validates the minimum size on the original image
        tile_rects(image.width(), image.height())?;
        let resized;
        let image = if image.dimensions() == canonical {
            image
        } else {
            resized = image::imageops::resize(image, canonical.0, canonical.1, FilterType::Triangle);
            &resized
        };
        let rects = tile_rects(image.width(), image.height())?;

        let gray = GrayPlane::from_rgb(image);
        let bins: Vec<u16> = image.pixels().map(|p| color_bin(p[0], p[1], p[2]) as u16).collect();
        let width = image.width() as usize;

        let mut tile_words = Vec::with_capacity(TILE_COUNT);
        let mut tile_colors = Vec::with_capacity(TILE_COUNT);
        for r in rects {
            let (x, y, w, h) = (r.x as usize, r.y as usize, r.width as usize, r.height as usize);
            tile_words.push(dedup_words(&stack_visual_words(&cell_hog_grid(&gray.crop(x, y, w, h)))));
            let mut counts = vec![0usize; COLOR_BINS];
            for row in y..y + h {
                for &b in &bins[row * width + x..row * width + x + w] {
                    counts[b as usize] += 1;
                }
            }
            tile_colors.push(normalize_counts(&counts));
        }
        Ok(Self { tile_words, tile_colors })
    }

    /// Distinct words per tile with their multiplicities.
    pub fn words(&self) -> impl Iterator<Item = &(Word, u32)> {
        self.tile_words.iter().flatten()
    }

    pub fn describe(&self, vocab: &Vocabulary) -> VisualDescriptor {
        let k = vocab.k();
        let mut values = Vec::with_capacity(VisualDescriptor::dimension_for(k));
        for words in &self.tile_words {
            values.extend(bovw_histogram_counted(words, vocab));
        }
        for colors in &self.tile_colors {
            values.extend_from_slice(colors);
        }
        VisualDescriptor { vocab_size: k, values }
    }
}

pub fn describe_snapshot(image: &RgbImage, vocab: &Vocabulary) -> Result<VisualDescriptor> {
    describe_snapshot_at(image, vocab, (CANONICAL_WIDTH, CANONICAL_HEIGHT))
}

pub fn describe_snapshot_at(image: &RgbImage, vocab: &Vocabulary, canonical: (u32, u32)) -> Result<VisualDescriptor> {
    Ok(SnapshotFeatures::extract(image, canonical)?.describe(vocab))
}

/// Coordinatewise minimum of two descriptors.
pub fn visual_delta(p: &VisualDescriptor, p0: &VisualDescriptor) -> Result<VisualDescriptor> {
    if p.dim() != p0.dim() || p.vocab_size != p0.vocab_size {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            actual: p0.dim(),
        });
    }
    let values = p.values.iter().zip(&p0.values).map(|(a, b)| a.min(*b)).collect();
    Ok(VisualDescriptor {
        vocab_size: p.vocab_size,
        values,
    })
}

/// Loads a PNG snapshot as 8-bit RGB.
pub fn load_snapshot(path: &Path) -> Result<RgbImage> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let img = image::load(BufReader::new(file), ImageFormat::Png).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok(img.to_rgb8())
}
