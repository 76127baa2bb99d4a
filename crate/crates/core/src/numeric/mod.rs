//! Floating-point building blocks: double-double arithmetic, an
//! extended-exponent float, compensated sums and the ratio-series engine
//! shared by every series evaluation in the crate.

pub mod dd;
pub mod ext;
pub mod series;
pub mod sum;

pub use dd::{Dd, DD_EPS};
pub use ext::Ext;
pub use series::{RatioStep, SeriesSum};
pub use sum::{ExtAccumulator, NeumaierSum};
