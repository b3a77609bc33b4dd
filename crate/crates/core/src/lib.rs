//! Combinatorial presentations of Morse-Smale flows on closed oriented
//! 3-manifolds, and a decision procedure for their topological equivalence.
//!
//! A flow is given as a [`FlowPresentation`]: a distinguishing graph whose
//! edges carry boundary words of surface regions, the round-handle tori those
//! regions bound, curve pairings, chosen cycles and tau data.
//! [`find_equivalence`] searches for an isomorphism preserving all of it.

pub mod catalog;
pub mod equivalence;
pub mod format;
pub mod framed;
pub mod local;
pub mod model;
pub mod relabel;
pub mod tau;
pub mod words;

pub use equivalence::{check_isomorphism, explain_equivalence, find_equivalence, Isomorphism, Mismatch, Stage, Verdict};

pub use format::{parse_flow, serialize, FormatError};
pub use framed::{classify, framings_equivalent, oracle_equivalent, FrameValue, Framing, GraphType, MsGraph, Role};
pub use local::{first_return, TorusPoint};
pub use model::{validate_presentation, FlowPresentation, ValidationReport};
pub use relabel::{relabel, Relabeling};
pub use tau::TauInvariant;
pub use words::{canonical_form, invert, rotate_equal, CyclicWord, Letter, Power};
