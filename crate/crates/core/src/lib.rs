//! Connectivity control of point clouds through 0-dimensional persistent homology.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] – point clouds, p-norms and pairwise distances.
//! * [`filtration`] – the Vietoris-Rips 1-skeleton in filtration order.
//! * [`persistence`] – merge events via union-find and via boundary-matrix
//!   reduction (sequential and data-parallel).
//! * [`loss`] – the connectivity loss, its indicator reformulation and its
//!   exact gradient with respect to the points.
//! * [`analysis`] – α-β connectivity statistics, density and separation
//!   predicates, metric-entropy bounds and brute-force checks.
//! * [`neural`] – a small MLP / branched autoencoder stack with Adam.
//! * [`oneclass`] – count-based one-class scoring and AUC evaluation.
//!
//! Data-parallel inner loops run on rayon when the `parallel` feature is
//! enabled (the default) and fall back to plain iterators otherwise. Both
//! paths produce bit-identical results.

pub mod analysis;
pub mod error;
pub mod filtration;
pub mod geometry;
pub mod gradcheck;
pub mod io;
pub mod loss;
pub mod neural;
pub mod oneclass;
pub mod par;
pub mod persistence;
pub mod rng;

pub use error::{Error, Result};
pub use filtration::{build_vr, Edge, FilteredComplex};
pub use geometry::{Norm, PointCloud};
pub use loss::{connectivity_grad, connectivity_loss, loss_via_indicator, LossResult};
pub use persistence::{Barcode, Engine, MergeEvent, ReductionMatrix};
