//! Exact polynomial arithmetic and symbolic restriction of the loss to
//! fixed-point spaces.

pub mod poly;
pub mod restricted;

pub use poly::{MPoly, Mono};
pub use restricted::{
    halved, jacobian, symbolic_restricted_gradient, symbolic_restricted_loss, BlockInnerTable,
};
