//! Visual descriptor of two synthetic snapshots and their delta.

use image::{Rgb, RgbImage};
use pagedelta::visual::{
    build_vocabulary, describe_snapshot, visual_delta, SnapshotFeatures, CANONICAL_HEIGHT, CANONICAL_WIDTH,
};

fn page(accent: [u8; 3], boxes: u32) -> RgbImage {
    let mut img = RgbImage::from_pixel(1024, 768, Rgb([240, 240, 235]));
    for x in 0..1024 {
        for y in 0..60 {
            img.put_pixel(x, y, Rgb(accent));
        }
    }
    for b in 0..boxes {
        let (x0, y0) = (40 + 320 * (b % 3), 120 + 200 * (b / 3));
        for x in x0..x0 + 260 {
            for y in y0..y0 + 150 {
                img.put_pixel(x, y, Rgb([30 + 20 * b as u8, 60, 90]));
            }
        }
    }
    img
}

fn main() -> pagedelta::Result<()> {
    let home = page([20, 60, 140], 6);
    let similar = page([20, 60, 140], 5);
    let other = page([200, 30, 30], 1);

    let canonical = (CANONICAL_WIDTH, CANONICAL_HEIGHT);
    let mut words = Vec::new();
    for img in [&home, &similar, &other] {
        let f = SnapshotFeatures::extract(img, canonical)?;
        words.extend(f.words().flat_map(|(w, n)| std::iter::repeat_n(*w, *n as usize)));
    }
    let vocab = build_vocabulary(&words, 32, 1)?;
    let d_home = describe_snapshot(&home, &vocab)?;
    println!("descriptor dimension: {}", d_home.dim());
    for (name, img) in [("similar", &similar), ("other", &other)] {
        let delta = visual_delta(&describe_snapshot(img, &vocab)?, &d_home)?;
        println!("{name:<8} total overlap {:.3}", delta.values().iter().sum::<f64>());
    }
    Ok(())
}
