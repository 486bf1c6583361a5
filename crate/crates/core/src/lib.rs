//! Spin systems, their complete order structure, dilations and free spectrahedra.

pub mod checks;
pub mod cli;
pub mod dilation;
pub mod error;
pub mod matcore;
pub mod order_iso;
pub mod spectrahedra;
pub mod spin_construct;
pub mod spin_pairs;
pub mod spin_verify;

pub use error::{Result, SpinError};
pub use matcore::{CMatrix, C64};
pub use spin_construct::SpinTuple;
