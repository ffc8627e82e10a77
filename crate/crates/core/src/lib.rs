#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod analysis;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mpb;
pub mod scenario;
