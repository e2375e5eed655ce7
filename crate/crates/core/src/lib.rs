//! Geodesic X-ray transforms of k-differentials on the unit disc.
//!
//! The crate simulates `I_k f = I[f e^{ikθ}]` and `I_{k,⊥} f = I[X_⊥(f e^{ikθ})]`
//! for isothermal metrics `g = e^{2λ}(dx² + dy²)` on the unit disc, and inverts
//! them with a shifted fiberwise Hilbert transform followed by a Neumann series.
//! A Jacobi-field module assembles the error-operator kernels independently so
//! the transport-based operators can be cross-checked.
//!
//! Data-parallel loops (rays, grid points, fibers) go through [`Exec`]; with
//! the `parallel` feature disabled every loop runs sequentially.

pub mod error;
pub mod exec;
pub mod experiment;
pub mod geodesics;
pub mod grid;
pub mod hilbert;
pub mod io;
pub mod jacobi;
pub mod metrics;
pub mod reconstruction;
pub mod transforms;

pub use error::{Error, Result};
pub use exec::Exec;
pub use geodesics::{make_influx_grid, trace_backward_to_influx, trace_forward, GeodesicPath, InfluxGrid};
pub use grid::{cartesian_grid, make_phantom, Bump, PhantomSpec, ScalarGrid};
pub use metrics::{MetricModel, Point};
pub use num_complex::Complex64;
pub use reconstruction::{neumann_invert, relative_l2_error, ErrorHistory, Mode, ReconstructionConfig};
pub use transforms::{forward_ik, forward_ikperp, ray_integral_general, Sinogram};
