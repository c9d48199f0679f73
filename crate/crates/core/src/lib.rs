//! Global action of SL(2,R) x SO(n+1,1)_0 on the induced function space
//! attached to the porous medium equation `u_t = Δ(u^m)`.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decomp;
pub mod error;
pub mod exact_poly;
pub mod matgroup;
pub mod pde;
pub mod repn;
pub mod report;
pub mod sample;
pub mod vecfields;

pub use error::{Error, Result};
