//! Exact NNC polyhedra and finite unions of them.

pub mod linear;
pub mod polyhedron;
pub mod rational;
pub mod region;
mod simplex;
pub mod text;

pub use linear::{CmpOp, LinearExpr, LinearInequality, Relation, Variable};
pub use polyhedron::Polyhedron;
pub use rational::{format_rational, format_timestamp, parse_rational, Rational};
pub use region::Region;
pub use text::{format_polyhedron, format_region, VariableNames};
