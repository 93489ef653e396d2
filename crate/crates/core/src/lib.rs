//! Core engine for computing the induced geometry of lightlike hypersurfaces
//! inside a semi-Riemannian manifold equipped with a dual pair of affine
//! connections, together with a residual-based verification harness.
//!
//! The crate is organised around a small evaluation stack:
//!
//! * [`expr`] — a closed-form expression DSL used for metric components,
//!   connection data, embeddings and frame fields;
//! * [`jet`] — truncated univariate Taylor jets (raw directional
//!   derivatives) that every pipeline quantity is computed in, so that
//!   derivatives of assembled objects come out of the same code path that
//!   produces their values;
//! * [`linalg`] — small dense solves over jets (LU, nullspaces, an
//!   eigensolver for ranks and signatures);
//! * [`ambient`], [`hypersurface`], [`induced`], [`curvature`] — the
//!   geometric objects themselves;
//! * [`harness`] — the identity-check catalog, sampling, and the
//!   hypersurface classifier;
//! * [`fixtures`] — the bundled example geometries.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion
//! `nullstat` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
// Index-form loops are the house style for the dense tensor code here.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod ambient;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod harness;
pub mod hypersurface;
pub mod induced;
pub mod jet;
pub mod linalg;
pub mod math;
pub mod sampling;

pub use error::{Error, Result};
pub use expr::Expr;
pub use jet::Jet;
