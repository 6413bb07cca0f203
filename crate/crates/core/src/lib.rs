//! Second-order optimization on orthogonal Stiefel manifolds.
//!
//! St(n,p) is treated as a constraint manifold embedded in the Euclidean
//! space of n x p matrices. The library provides:
//!
//! - manifold primitives: points, tangent vectors, tangent projection, and
//!   the qf (thin-QR) retraction ([`stiefel`]);
//! - an explicit local basis of the tangent space built from a pivot row
//!   set ([`frame`]);
//! - cost models with values, ambient gradients, and ambient Hessian
//!   bilinear forms: Procrustes, Penrose regression, Brockett, and a
//!   user-supplied hook ([`costs`]);
//! - first- and second-order optimality machinery: the Lagrange multiplier
//!   matrix, the embedded gradient, criticality tests, frame Hessians, and
//!   critical-point classification ([`optimality`]);
//! - a Newton iteration over the frame coordinates with a safeguarded
//!   gradient fallback, plus exhaustive critical-point enumeration for
//!   diagonal Brockett instances ([`newton`]);
//! - independent finite-difference and frame auditors used by the test
//!   suite and the `check` command ([`oracle`]);
//! - a JSON-driven command-line front end ([`cli`]).

pub mod cli;
pub mod costs;
pub mod error;
pub mod frame;
pub mod newton;
pub mod optimality;
pub mod oracle;
pub mod stiefel;

pub use error::{Error, Result};
