//! Exact perturbation analysis of induced graph densities around the
//! constant graphon `W_p`.
//!
//! Everything in this crate is exact: rationals are arbitrary precision,
//! square roots live in an explicit real quadratic tower, and finite-field
//! kernels are evaluated through quadratic Gauss sums rather than by
//! sampling a cosine. The crate is `no_std` and only needs `alloc`.
//!
//! Layout:
//!
//! * [`exactnum`]: rationals, polynomials in `p`, values in `Q(√a, √b)`,
//!   Sturm-based real root isolation.
//! * [`graphs`]: small labeled graphs, canonical forms, subgraph classes of
//!   `K_m` and the `n_j(H, F)` counts.
//! * [`kernel`]: step kernels on `[0,1]²`, homomorphism and induced
//!   densities, tensor products.
//! * [`expansion`]: the polynomial expansion of `ρ_F(W_p + Δ)` in the
//!   homomorphism densities `t(H, Δ)`.
//! * [`ffkernel`]: quadratic-form kernels over `F_p` and `F_2`.
//! * [`certifier`]: linear and full certificates that `W_p` is not a local
//!   maximizer of the induced density.

#![no_std]

extern crate alloc;

pub mod certifier;
pub mod exactnum;
pub mod expansion;
pub mod ffkernel;
pub mod graphs;
pub mod kernel;

pub use exactnum::{PolyP, QuadValue, Rational, RootInterval};
pub use graphs::{CanonGraph, Graph};
pub use kernel::{LazyTensorKernel, StepKernel};
