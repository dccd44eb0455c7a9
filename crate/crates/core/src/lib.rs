pub mod cover;
pub mod generators;
pub mod graph;
pub mod queries;
pub mod ramsey;
pub mod ratio;
pub mod rng;
pub mod separator;
pub mod treekit;
pub mod util;
pub mod verify;
