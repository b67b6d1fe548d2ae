//! Double-pushout rewriting over adhesive categories, with sequential
//! independence, switching and switch-equivalence analysis.
//!
//! The engine is generic over [`category::Category`]; two instance families
//! are provided: finite presheaves over an explicit schema
//! ([`presheaf::PresheafCat`]) and finite posets ([`poset::PosetCat`]).

pub mod category;
pub mod equivalence;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod independence;
pub mod poset;
pub mod presheaf;
pub mod rewriting;

pub use category::{Category, Cocone, Cospan, Diagram, Span, Square};
pub use error::{Error, ErrorClass, Result};
