pub mod component;
pub mod diagram;
pub mod error;
pub mod invariant;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod regularity;
pub mod report;
pub mod section;
pub mod suites;
pub mod weyl;

pub use diagram::{Composition, Coord, NeighborPair, Tableau};
pub use error::{Result, WlabError};
