//! Hypergraph analytics for threaded social platforms.
//!
//! Models discussions as hyperedges over users, classifies users into
//! archetypes from thresholded features, characterizes hyperedges through
//! a family of descriptor functions, tests archetype transitions against
//! a label-shuffling null model, and ranks discussions by betweenness over
//! the line-graph projection. The `pipeline` module ties the stages
//! together behind CSV inputs and outputs; the guide under `book/` walks
//! through each subsystem.
//!
//! ```
//! use hyperrole::hypergraph::toy_hypergraph;
//!
//! let (h, interner) = toy_hypergraph();
//! let d = interner.get("D").unwrap();
//! assert_eq!(h.degree(d).unwrap(), 5);
//! assert_eq!(h.hyperdegree(d).unwrap(), 3);
//! ```

pub mod archetypes;
pub mod centrality;
pub mod error;
pub mod features;
pub mod hypergraph;
pub mod io;
pub mod lexicon;
pub mod omega;
pub mod pipeline;
pub mod synth;
pub mod transitions;

pub use error::{Error, Result};

// The guide's code blocks run as doctests so the book stays in sync with
// the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hypergraphs.md")]
    mod hypergraphs {}
    #[doc = include_str!("../../../book/src/archetypes.md")]
    mod archetypes {}
    #[doc = include_str!("../../../book/src/characterization.md")]
    mod characterization {}
    #[doc = include_str!("../../../book/src/lexicons.md")]
    mod lexicons {}
    #[doc = include_str!("../../../book/src/transitions.md")]
    mod transitions {}
    #[doc = include_str!("../../../book/src/centrality.md")]
    mod centrality {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
