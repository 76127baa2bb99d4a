//! Big q-Bessel functions: series evaluation, real zeros, orthogonality on
//! the q-lattice, Fourier big q-Bessel expansions and Kramer-type sampling of
//! finite big q-Hankel transforms.
//!
//! Every operation takes a [`QContext`] carrying the base `q`, the order
//! `alpha` and the series tolerance.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bqbessel;
pub mod error;
pub mod json;
pub mod numeric;
pub mod orthogonality;
pub mod qcalc;
pub mod sampling;
pub mod verify;
pub mod zerofinder;

pub use bqbessel::{BigQBesselPoint, IdentityKind};
pub use error::{Error, Result};
pub use numeric::{Dd, Ext, SeriesSum};
pub use orthogonality::{FourierReport, GramReport, QLatticeSignal};
pub use qcalc::{QContext, SeriesValue};
pub use sampling::{ClosedSumCheck, KernelForm, ReconstructionReport};
pub use verify::{Suite, VerifyEntry, VerifyReport};
pub use zerofinder::{ZeroFinderConfig, ZeroTable};
