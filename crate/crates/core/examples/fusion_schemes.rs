//! Max, trained and adversarial fusion of two channel scores.

use pagedelta::fusion::{train_fusion, FusionScheme, FusionTraining, ScorePair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> pagedelta::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut raw = Vec::new();
    let mut groups = Vec::new();
    for g in 0..30 {
        for k in 0..4 {
            let phish = k == 0;
            let base = if phish { 1.0 } else { -1.0 };
            raw.push(ScorePair::labeled(
                base + rng.random_range(-0.6..0.6),
                base + rng.random_range(-0.6..0.6),
                base,
            ));
            groups.push(g);
        }
    }
    let training = FusionTraining {
        c_grid: vec![0.1, 1.0, 10.0],
        gamma_grid: vec![0.1, 1.0, 10.0],
        ..FusionTraining::default()
    };
    for scheme in FusionScheme::ALL {
        let m = train_fusion(&raw, &groups, scheme, &training, 5)?;
        // a page whose HTML score was pushed down by an attacker
        let g = m.fuse(-1.2, 0.9);
        println!("{:<12} g(attacked)={g:+.3} {}", scheme.name(), if g >= 0.0 { "phish" } else { "legit" });
    }
    Ok(())
}
