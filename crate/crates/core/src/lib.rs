#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod band_eig;
pub mod de_gennes;
pub mod direct2d;
pub mod error;
pub mod geometry;
pub mod model_ops;
pub mod numerics;
pub mod weyl_law;

pub use error::{Error, Result};
