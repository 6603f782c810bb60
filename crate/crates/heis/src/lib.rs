//! Workbench for the geometry of discrete and continuous Heisenberg groups and
//! its interaction with L1 embeddings and sparsest-cut relaxations.
//!
//! The crate is organised around six capability areas:
//!
//! * [`group`] — exact arithmetic in the rank-2 discrete Heisenberg group
//!   (and its 3-dimensional subgroup), word balls, word distances, and the
//!   continuous model with its scaling maps and quasi-norm.
//! * [`perimeter`] — horizontal and vertical discrete perimeters of finite
//!   lattice sets, with certified tail brackets for the infinite vertical sums.
//! * [`poincare`] — evaluators for vertical-versus-horizontal Poincare-type
//!   sums of finitely supported embeddings, the compression integral
//!   criterion, and compression audits of concrete embeddings.
//! * [`embed`] — finite metric spaces: negative-type tests, square-root
//!   embeddings, exact L1 distortion via cut-cone linear programming, and
//!   duality-based gap certificates.
//! * [`sdp`] — sparsest-cut instances: exact optimum by enumeration, the
//!   metric LP relaxation, and the negative-type SDP relaxation.
//! * [`continuous`] — Monte Carlo estimators on the continuous group:
//!   intrinsic Lipschitz graphs, normalized vertical perimeter curves, and
//!   vertical energy of slices.
//!
//! The `cli` module wires these into the `heis` binary; every run writes its
//! artifacts together with a manifest and is byte-reproducible given a seed.

pub mod cli;
pub mod continuous;
pub mod embed;
pub mod group;
pub mod interval;
pub mod perimeter;
pub mod poincare;
pub mod sdp;
pub mod simplex;
pub(crate) mod util;
