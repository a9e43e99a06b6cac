//! Numerical toolkit for electromagnetic information theory.
//!
//! Continuous channel and noise operators are discretized with a
//! symmetric-weighted Nyström rule, so that L² inner products become plain
//! vector dot products. On top of that the crate provides:
//!
//! - [`geometry`]: midpoint quadratures over intervals, apertures and boxes;
//! - [`kernels`]: free-space Green's functions, the bandlimiting sinc kernel
//!   and noise correlation kernels;
//! - [`operators`]: Nyström assembly, Hermitian eigendecomposition, SVD,
//!   mode projection and Fredholm log-determinants;
//! - [`dof`]: functional and channel degrees of freedom (PSWF spectra, LoS
//!   apertures, von Mises–Fisher scattering);
//! - [`mutual_info`]: MIMO and continuous mutual information, water-filling,
//!   and the sampling-convergence and noise-divergence experiments;
//! - [`planewave`]: Fourier plane-wave random channel fields;
//! - [`nearfield`]: far/near-field steering vectors and distance-domain
//!   orthogonality;
//! - [`cli`]: experiment configuration and CSV emission behind the `eit`
//!   binary.
//!
//! Information quantities are in bits. Phases follow the `exp(+jωt)`
//! convention, so outgoing waves carry `exp(-jkR)`.

pub mod cli;
pub mod dof;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod mutual_info;
pub mod nearfield;
pub mod operators;
pub mod planewave;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used for operators and mode sets.
pub type CMatrix = faer::Mat<C64>;

/// Cartesian point in meters.
pub type Point = [f64; 3];
