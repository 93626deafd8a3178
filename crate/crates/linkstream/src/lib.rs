//! Link streams as first-class objects: a weight function on a
//! discretized time x relation grid, together with the set-of-intervals
//! view used by stream-graph metrics.
//!
//! The crate provides four layers:
//!
//! * [`stream`] / [`events`] — the data model and the bridges between the
//!   function and set representations;
//! * [`graph`] / [`paths`] — stream-graph metrics (size, density, degrees,
//!   clustering, k-core) and temporal paths;
//! * [`signal`] / [`transform`] / [`filter`] — signal operations, the
//!   joint frequency-structure decomposition and filtering;
//! * [`io`] — the CSV/JSON file formats.

pub mod error;
mod intervals;

pub mod events;
pub mod grid;
pub mod space;
pub mod stream;

pub mod graph;
pub mod paths;
pub mod signal;

pub mod filter;
pub mod transform;

pub mod io;

pub use error::{Error, Result};
pub use events::{induced_graph, is_graph_equivalent, substream, Cluster, EdgeEventSet};
pub use grid::TimeGrid;
pub use space::RelationSpace;
pub use stream::{from_event_set, to_event_set, LinkStream};
