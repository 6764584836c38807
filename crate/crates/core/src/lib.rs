//! Exact symbolic computation in the free Malcev algebra of rank three.
//!
//! The crate provides the free anticommutative term algebra, the
//! polarization calculus, a T-ideal membership checker for consequences
//! of the Malcev identity, and the faithful subdirect model (free Lie
//! projection plus generic evaluation in the simple seven-dimensional
//! Malcev algebra) used for exact zero tests, graded dimensions and
//! basis verification.

pub mod alphabet;
pub mod basis;
pub mod assoc;
pub mod element;
pub mod enumerate;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod m7;
pub mod linearize;
pub mod monomial;
pub mod subdirect;
pub mod variety;

pub use alphabet::{Alphabet, Grading, MultiDegree, Variable};
pub use element::{apply_operator, Element, Operator, OperatorWord};
pub use error::AlgebraError;
pub use monomial::{Mono, NamedTree, RawTree};
