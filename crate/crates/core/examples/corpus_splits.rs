//! Synthetic corpus generation and family-level train/test splits.

use pagedelta::corpus::{generate_synthetic_corpus, load_corpus, make_splits};

fn main() -> pagedelta::Result<()> {
    let dir = std::env::temp_dir().join("pagedelta-corpus-splits");
    let manifest = generate_synthetic_corpus(10, 4, 7, &dir)?;
    let families = load_corpus(&manifest)?;
    println!("{} families, {} pages", families.len(), families.iter().map(|f| f.pages.len()).sum::<usize>());
    let plan = make_splits(&families, 0.6, 3, 1)?;
    for (i, s) in plan.repetitions.iter().enumerate() {
        println!("rep {i}: train {:?}", s.train);
        println!("       test  {:?}", s.test);
    }
    Ok(())
}
