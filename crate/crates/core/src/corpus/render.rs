//! Raster stand-ins for page snapshots: flat boxes and glyph-like text runs.

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) const WIDTH: u32 = 1024;
pub(crate) const HEIGHT: u32 = 768;

fn fill(img: &mut RgbImage, x: i64, y: i64, w: i64, h: i64, c: Rgb<u8>) {
    let (iw, ih) = (img.width() as i64, img.height() as i64);
    for yy in y.max(0)..(y + h).min(ih) {
        for xx in x.max(0)..(x + w).min(iw) {
            img.put_pixel(xx as u32, yy as u32, c);
        }
    }
}

fn outline(img: &mut RgbImage, x: i64, y: i64, w: i64, h: i64, c: Rgb<u8>) {
    fill(img, x, y, w, 1, c);
    fill(img, x, y + h - 1, w, 1, c);
    fill(img, x, y, 1, h, c);
    fill(img, x + w - 1, y, 1, h, c);
}

/// A run of pseudo-glyphs starting at `(x, y)` with line height `size`,
/// stopping before `x + width`.
fn text(img: &mut RgbImage, rng: &mut ChaCha8Rng, x: i64, y: i64, width: i64, size: i64, c: Rgb<u8>) {
    let mut cx = x;
    let end = x + width;
    while cx < end {
        let letters = rng.random_range(2..9);
        for _ in 0..letters {
            let gw = rng.random_range(size / 4..=size / 2).max(2);
            if cx + gw > end {
                return;
            }
            let tall = rng.random_bool(0.3);
            let gh = if tall { size } else { size * 3 / 5 };
            let stroke = (size / 6).max(1);
            let top = y + size - gh;
            match rng.random_range(0..4) {
                0 => fill(img, cx, top, gw, gh, c),
                1 => outline(img, cx, top, gw, gh, c),
                2 => {
                    fill(img, cx, top, stroke, gh, c);
                    fill(img, cx, top + gh / 2, gw, stroke, c);
                }
                _ => {
                    fill(img, cx, top, gw, stroke, c);
                    fill(img, cx + gw / 2, top, stroke, gh, c);
                }
            }
            cx += gw + (size / 6).max(1);
        }
        cx += size / 2;
    }
}

fn color(rng: &mut ChaCha8Rng, lo: u8, hi: u8) -> Rgb<u8> {
    Rgb([rng.random_range(lo..=hi), rng.random_range(lo..=hi), rng.random_range(lo..=hi)])
}

fn jitter(c: Rgb<u8>, rng: &mut ChaCha8Rng, amount: i16) -> Rgb<u8> {
    Rgb(c.0.map(|v| (v as i16 + rng.random_range(-amount..=amount)).clamp(0, 255) as u8))
}

/// Layout shared by a site's homepage and its legitimate pages.
#[derive(Debug, Clone)]
pub(crate) struct SiteTemplate {
    background: Rgb<u8>,
    header: Rgb<u8>,
    header_height: i64,
    accent: Rgb<u8>,
    ink: Rgb<u8>,
    nav_text: Rgb<u8>,
    nav_items: usize,
    columns: usize,
    sidebar: bool,
    banner: [Rgb<u8>; 2],
    footer: Rgb<u8>,
    chrome_seed: u64,
}

impl SiteTemplate {
    pub(crate) fn random(rng: &mut ChaCha8Rng) -> Self {
        Self {
            background: color(rng, 225, 255),
            header: color(rng, 20, 160),
            header_height: rng.random_range(70..120),
            accent: color(rng, 40, 200),
            ink: color(rng, 0, 70),
            nav_text: color(rng, 215, 255),
            nav_items: rng.random_range(4..8),
            columns: rng.random_range(1..4),
            sidebar: rng.random_bool(0.5),
            banner: [color(rng, 60, 220), color(rng, 60, 220)],
            footer: color(rng, 30, 90),
            chrome_seed: rng.random(),
        }
    }

    /// Renders one page of the site; `rng` drives the page-specific content.
    pub(crate) fn render(&self, rng: &mut ChaCha8Rng) -> RgbImage {
        let (w, h) = (WIDTH as i64, HEIGHT as i64);
        let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, self.background);
        // header with logo and navigation
        fill(&mut img, 0, 0, w, self.header_height, self.header);
        fill(&mut img, 24, 14, 150, self.header_height - 28, self.accent);
        // site chrome is identical on every page
        let mut chrome = ChaCha8Rng::seed_from_u64(self.chrome_seed);
        text(&mut img, &mut chrome, 34, self.header_height / 2 - 10, 130, 20, self.nav_text);
        let nav_w = (w - 260) / self.nav_items as i64;
        for i in 0..self.nav_items as i64 {
            text(&mut img, &mut chrome, 220 + i * nav_w, self.header_height / 2 - 7, nav_w - 24, 14, self.nav_text);
        }
        let mut y = self.header_height + 20;
        // banner, varying a little between pages
        let banner_h = 170 + rng.random_range(-15..=15);
        let b0 = jitter(self.banner[0], rng, 12);
        fill(&mut img, 24, y, w - 48, banner_h, b0);
        fill(&mut img, w / 2, y, w / 2 - 24, banner_h, jitter(self.banner[1], rng, 12));
        text(&mut img, rng, 60, y + banner_h / 2 - 14, w / 3, 28, self.nav_text);
        y += banner_h + 24;
        // body columns of text
        let content_w = if self.sidebar { w - 48 - 240 } else { w - 48 };
        let col_w = content_w / self.columns as i64;
        let footer_top = h - 70;
        for col in 0..self.columns as i64 {
            let x = 24 + col * col_w;
            let mut ly = y;
            text(&mut img, rng, x, ly, col_w - 40, 22, self.accent);
            ly += 38;
            while ly + 16 < footer_top - 10 {
                if rng.random_bool(0.12) {
                    let ph = rng.random_range(50..110).min(footer_top - 10 - ly);
                    fill(&mut img, x, ly, col_w - 40, ph, jitter(self.accent, rng, 40));
                    ly += ph + 12;
                    continue;
                }
                let lw = (col_w - 40) * rng.random_range(60..=100) / 100;
                text(&mut img, rng, x, ly, lw, 12, self.ink);
                ly += 20;
            }
        }
        if self.sidebar {
            let x = w - 24 - 220;
            let mut by = y;
            while by + 120 < footer_top - 10 {
                fill(&mut img, x, by, 220, 110, jitter(self.background, rng, 25));
                outline(&mut img, x, by, 220, 110, self.accent);
                text(&mut img, rng, x + 10, by + 12, 200, 14, self.accent);
                text(&mut img, rng, x + 10, by + 40, 200, 11, self.ink);
                text(&mut img, rng, x + 10, by + 60, 180, 11, self.ink);
                by += 130;
            }
        }
        fill(&mut img, 0, footer_top, w, 70, self.footer);
        text(&mut img, &mut chrome, 24, footer_top + 28, 400, 12, self.nav_text);
        img
    }
}

/// A credential-harvesting page: a centered login box on a plain backdrop.
pub(crate) fn render_login_page(rng: &mut ChaCha8Rng) -> RgbImage {
    let (w, h) = (WIDTH as i64, HEIGHT as i64);
    let backdrop = color(rng, 200, 250);
    let brand = color(rng, 0, 150);
    let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, backdrop);
    if rng.random_bool(0.5) {
        fill(&mut img, 0, 0, w, 50, brand);
        text(&mut img, rng, 30, 15, 160, 20, Rgb([255, 255, 255]));
    }
    let bw = rng.random_range(340..460);
    let bh = rng.random_range(360..440);
    let bx = (w - bw) / 2 + rng.random_range(-60..=60);
    let by = (h - bh) / 2 + rng.random_range(-30..=30);
    fill(&mut img, bx, by, bw, bh, Rgb([255, 255, 255]));
    outline(&mut img, bx, by, bw, bh, color(rng, 150, 200));
    fill(&mut img, bx + bw / 2 - 60, by + 24, 120, 44, brand);
    text(&mut img, rng, bx + 40, by + 92, bw - 80, 20, Rgb([40, 40, 40]));
    let mut fy = by + 140;
    for _ in 0..2 {
        text(&mut img, rng, bx + 40, fy, bw / 3, 12, Rgb([90, 90, 90]));
        outline(&mut img, bx + 40, fy + 20, bw - 80, 36, Rgb([170, 170, 170]));
        fy += 80;
    }
    fill(&mut img, bx + 40, fy + 10, bw - 80, 42, brand);
    text(&mut img, rng, bx + bw / 2 - 40, fy + 24, 80, 14, Rgb([255, 255, 255]));
    text(&mut img, rng, bx + 40, by + bh - 30, bw - 80, 10, Rgb([120, 120, 120]));
    img
}
