//! Core of a dual-deformation dynamic Gaussian splatting pipeline.
//!
//! Everything in this crate is pure computation over heap-allocated buffers:
//! a reverse-mode autodiff tensor engine, 3D Gaussian parameterization and
//! projection, a differentiable tile-based rasterizer, positional/temporal
//! encodings, the two deformation networks (instantaneous and global) with
//! their cross-attention coupling, and all training losses. File formats,
//! dataset synthesis, and the training loop live in the companion `flag4d`
//! crate.
//!
//! The crate is `no_std`-compatible (requires `alloc`). The default `std`
//! feature exists only so dev builds and downstream crates get std error
//! interop; no IO happens here. The optional `rayon` feature parallelizes
//! the matmul kernel; results are bit-identical with and without it.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod encode;
pub mod error;
pub mod gauss;
pub mod gmn;
pub mod idn;
pub mod objectives;
pub mod optim;
pub mod raster;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::Tensor;
