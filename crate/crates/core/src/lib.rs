//! Core algorithms for adaptive hierarchical object-attribute-relation (O-A-R)
//! semantic links.
//!
//! The crate is `no_std` (it needs `alloc`) and free of IO. File formats, the
//! experiment harness and the command-line tool live in the `oar-link` crate.
//!
//! Pipeline, transmitter to receiver:
//!
//! 1. [`worldgen`] synthesizes a scene graph and per-modality observations,
//!    then fuses them into one evidence map.
//! 2. [`codec`] routes fused evidence into object, attribute and relation
//!    latent streams and compresses each to `N x D_c` channel symbols.
//! 3. [`scheduler`] picks which streams fit the symbol budget.
//! 4. [`channel`] normalizes transmit power and adds Gaussian noise; it also
//!    carries the transport-block outage model used for digital baselines.
//! 5. [`codec::decode_cascade`] recovers the graph: objects first, then
//!    attributes and relations conditioned on the detected objects.
//! 6. [`metrics`] scores the result against ground truth.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod codec;
pub mod graph;
pub mod link;
pub mod metrics;
pub mod rng;
pub mod scheduler;
pub mod worldgen;

pub use codec::{Codebook, CodebookParams, Stream, SymbolBlock};
pub use graph::{GedCosts, GedResult, ObjectNode, OarGraph, RelationEdge, Vocabulary};
pub use scheduler::{StreamProfile, TransmissionMask};

/// Default number of semantic slots per stream.
pub const SLOTS: usize = 30;
/// Default latent dimension of a slot.
pub const LATENT_DIM: usize = 256;
/// Default channel symbols per slot.
pub const CHANNEL_DIM: usize = 32;
