//! Ultragraphs, the graph associated with an ultragraph, and Rickart/Baer
//! verdicts for ultragraph Leavitt path algebras, with an exact
//! matrix-representation oracle for the finite acyclic case.

pub mod assocgraph;
pub mod classifier;
pub mod corpus;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod paths;
pub mod setalg;
pub mod ultragraph;

pub use error::{Error, SyntaxError};
pub use setalg::{Universe, UpSet, Vertex};
pub use ultragraph::{Edge, Ultragraph};
