//! Database instances as objects, sets of view-maps as morphisms, and the
//! power-view closure as a computable saturation operator, with the
//! categorical calculus built on top of them exposed as executable checks.

pub mod category;
pub mod cli;
pub mod closure;
pub mod equations;
pub mod error;
pub mod gen;
pub mod kleisli;
pub mod query;
pub mod relcore;
pub mod rewrite;

pub use category::{Morphism, ViewMap};
pub use closure::{Bound, ClosedSet};
pub use error::{Error, Result};
pub use query::{Cond, JCond, QueryTerm};
pub use relcore::{DomainConst, Instance, Relation, Tuple, View};
