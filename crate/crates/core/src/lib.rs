//! Approximation algorithm for the matching augmentation problem: a minimum
//! cost 2-edge-connected spanning subgraph where cost-0 edges form a matching.

pub mod d2;
pub mod graph;
pub mod obstructions;
pub mod oracle;
pub mod gen;
pub mod preprocess;
pub mod bridge_cover;
pub mod gluing;
pub mod violation;
pub mod io;
pub mod pipeline;
