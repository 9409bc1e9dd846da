use image::RgbImage;

use crate::{Error, Result};

/// Whole image, 2×2 quarters and 4×4 sixteenths.
pub const TILE_COUNT: usize = 21;

/// Smallest accepted image side; sixteenths of anything smaller fall below
/// one 2×2-cell HOG block.
pub const MIN_IMAGE_SIDE: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileRect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

/// Tile rectangles in stacking order: whole, quarters (row-major),
/// sixteenths (row-major). Boundaries sit at `floor(i * W / n)`.
pub fn tile_rects(width: u32, height: u32) -> Result<Vec<TileRect>> {
    if width < MIN_IMAGE_SIDE || height < MIN_IMAGE_SIDE {
        return Err(Error::invalid(format!(
            "image {width}x{height} is smaller than {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}"
        )));
    }
    let (w, h) = (width as u64, height as u64);
    let mut rects = Vec::with_capacity(TILE_COUNT);
    for n in [1u64, 2, 4] {
        for row in 0..n {
            let y0 = row * h / n;
            let y1 = (row + 1) * h / n;
            for col in 0..n {
                let x0 = col * w / n;
                let x1 = (col + 1) * w / n;
                rects.push(TileRect {
                    x: x0 as u32,
                    y: y0 as u32,
                    width: (x1 - x0) as u32,
                    height: (y1 - y0) as u32,
                });
            }
        }
    }
    Ok(rects)
}

pub fn tile_image(image: &RgbImage) -> Result<Vec<RgbImage>> {
    Ok(tile_rects(image.width(), image.height())?
        .into_iter()
        .map(|r| image::imageops::crop_imm(image, r.x, r.y, r.width, r.height).to_image())
        .collect())
}
