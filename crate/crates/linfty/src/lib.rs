//! Exact-arithmetic kernel for homotopy Lie algebroids and higher connections.
//!
//! Everything here computes over the rationals with no floating point and no
//! tolerances: signs, brackets, differentials and cohomology ranks are exact,
//! so every identity check is a hard equality.
//!
//! The crate is organized in layers:
//!
//! - [`scalar`], [`combinatorics`], [`linalg`]: exact rationals, Koszul signs,
//!   shuffles, Bernoulli numbers, and dense rational row reduction.
//! - [`chart`]: polynomial coordinate charts with vector fields, differential
//!   forms, and the Cartan operations (all computed directly, so the classical
//!   identities are testable statements rather than definitions).
//! - [`algebroid`], [`morphism`]: the homotopy Lie algebroid interface, its
//!   Chevalley-Eilenberg machinery, morphisms-up-to-homotopy of every finite
//!   order, their curvature, and order-extension solvers.
//! - [`nerve`], [`deligne`]: finite open-cover nerves (polynomial chart and
//!   finite-sample models), logarithmic transition data, higher connection
//!   data and its simplicial organization.
//! - [`atiyah`]: strict higher Atiyah-type algebroids from cover data, and the
//!   strictification morphism from connection data.
//! - [`resolution`]: the simplicial fibrant resolution of a dg algebroid by
//!   cover-indexed kernel copies, with its matching-map fibrancy checks.
//! - [`gh`], [`courant`], [`transfer`]: the derivation dg Lie algebra of a
//!   chart, twisted by a closed top form; published higher Courant bracket
//!   tables; and the homotopy-fibre transfer engine that rederives them.
//! - [`sym`], [`weak`]: the symmetry dg Lie algebras of higher cover data and
//!   the exact solver for weak splittings.
//! - [`problem`], [`report`], [`suites`]: JSON problem descriptions, stable
//!   machine-readable reports, and the named verification suites the CLI and
//!   the examples drive.

pub mod algebroid;
pub mod atiyah;
pub mod resolution;
pub mod chart;
pub mod combinatorics;
pub mod courant;
pub mod deligne;
pub mod gh;
pub mod linalg;
pub mod morphism;
pub mod nerve;
pub mod scalar;
pub mod transfer;

pub use scalar::Q;
