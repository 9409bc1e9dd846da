//! Phishing page detection by comparing a candidate page against the
//! homepage of the site hosting it.
//!
//! A page and its homepage are compared along two channels:
//!
//! - [`html`]: eleven set-similarity features over links, styles, images,
//!   copyright claims, title words and language.
//! - [`visual`]: a tiled bag-of-visual-words (HOG) plus HSV color histogram
//!   descriptor, compared by coordinatewise minimum.
//!
//! Each channel is scored by a linear SVM ([`learn`]); the two scores are
//! combined by one of the [`fusion`] schemes. [`evasion`] simulates a
//! worst-case attacker against the HTML channel and [`evaluate`] runs the
//! family-wise repeated-split experiment protocol end to end.
//!
//! Runnable walkthroughs of each capability live in this crate's
//! `examples/` directory (`cargo run --release --example <name>`).

pub mod bundle;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod evasion;
pub mod fusion;
pub mod html;
pub mod learn;
pub mod pipeline;
pub mod visual;

pub use error::{Error, Result};
