//! Crossing analysis of embedded road networks.
//!
//! A network is loaded into an [`EmbeddedGraph`](graph::EmbeddedGraph) whose
//! vertices sit at exact integer positions and whose edges are polylines.
//! [`sweep`] finds every crossing exactly, [`analysis`] studies the crossing
//! graph, [`planarize`] inserts crossing vertices, [`separators`] builds a
//! recursive separator hierarchy and [`routing`] answers shortest-path
//! queries on top of it.

pub mod arith;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod sweep;
pub mod analysis;
pub mod planarize;
pub mod separators;
pub mod routing;
pub mod generate;
