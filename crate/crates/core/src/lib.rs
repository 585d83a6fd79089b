pub mod error;
pub mod harness;
pub mod lcst;
pub mod matching;
pub mod ov;
pub mod subiso;
pub mod tree;

pub use error::{Error, Result};
pub use tree::{ahu_canonize, parse_tree, serialize_tree, NodeId, Tree, TreeMetrics};
