//! Exact arithmetic for ramification filtrations of local function fields and
//! the parameter calculus built on top of them.
//!
//! Everything here works over `F = F_q((t))` at desk scale. Valuations are
//! normalized so that `val(t) = 1`, all depths are exact rationals, and no
//! floating point is used anywhere.
//!
//! Layout:
//! - [`rat`], [`plfun`]: rationals, `Q/Z` exponents and piecewise-linear maps.
//! - [`ramification`]: combinatorial ramification data and Herbrand functions.
//! - [`fq`], [`series`], [`localfield`]: finite fields, truncated Laurent
//!   series and explicit towers `L/E/F` with their Galois actions.
//! - [`cft`]: finite-level unit quotients of `F^x` and their filtrations.
//! - [`rootdata`], [`dlparams`]: type-A root data, graded Moy-Prasad models,
//!   depth-r parameters and the depth-zero parameter space.

#![no_std]

extern crate alloc;

pub mod cft;
pub mod dlparams;
pub mod fq;
pub mod localfield;
pub mod plfun;
pub mod ramification;
pub mod rat;
pub mod rootdata;
pub mod series;
pub mod snf;

pub use rat::{Depth, Rat};
