//! Data-driven reachability for pedestrians, tightened by behavior modes.
//!
//! - [`zonoset`]: zonotope and matrix-zonotope algebra.
//! - [`reach`]: model sets consistent with noisy data and set propagation.
//! - [`modal`]: chunking, labeling, chunk selection and the per-mode driver.

pub mod modal;
pub mod reach;
pub mod zonoset;
