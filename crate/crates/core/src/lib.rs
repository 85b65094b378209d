//! Equitable graph coloring by tabu search.
//!
//! A `k`-coloring is *equitable* when any two color classes differ in size by
//! at most one. The crate searches the space of equitable `k`-partitions,
//! minimising the number of monochromatic edges with a tabu search that mixes
//! equity-preserving single-vertex moves and color swaps, and wraps that search
//! in a descending-`k` driver.
//!
//! Module map:
//! - [`graph`]: immutable simple graphs, DIMACS I/O, Kneser generator.
//! - [`partition`]: equitable partitions with incremental conflict bookkeeping.
//! - [`construct`]: initial-solution builders.
//! - [`tabu`]: the search loop itself.
//! - [`driver`]: descending-`k` protocol and a brute-force oracle.
//! - [`bench`]: run records, CSV output and parameter sweeps.

pub mod bench;
pub mod construct;
pub mod driver;
mod error;
pub mod graph;
pub mod partition;
pub mod rng;
pub mod tabu;

pub use error::{Error, Result};
pub use graph::Graph;
pub use partition::Partition;
pub use rng::SeededRng;
