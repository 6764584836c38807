//! Alphabets of generators and multidegrees.
//!
//! Every monomial and element is built over a declared finite alphabet.
//! The total order on variables is the declaration order; the rank-3
//! modules fix the alphabet to `{x, y, z}` while identity checking uses
//! abstract alphabets such as `v1..vn` or `{a, b, c, t}`.

use std::fmt;
use std::sync::Arc;

use crate::error::AlgebraError;

/// A variable, identified by its position in the declaring alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(pub(crate) u16);

impl Variable {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Positional constructor; the caller owns alphabet consistency.
    pub fn from_index(i: usize) -> Variable {
        Variable(i as u16)
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Inner {
    names: Vec<String>,
}

/// A declared, ordered, finite set of generator names.
///
/// Alphabets compare by name sequence, so two independently constructed
/// `{x, y, z}` alphabets are interchangeable.
#[derive(Debug, Clone)]
pub struct Alphabet(Arc<Inner>);

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        assert!(!names.is_empty(), "alphabet must not be empty");
        assert!(names.len() < u16::MAX as usize, "alphabet too large");
        for (i, n) in names.iter().enumerate() {
            assert!(
                !names[..i].contains(n),
                "duplicate variable name `{n}` in alphabet"
            );
        }
        Alphabet(Arc::new(Inner { names }))
    }

    /// The rank-3 alphabet `{x, y, z}` used by the Malcev-specific modules.
    pub fn xyz() -> Self {
        Alphabet::new(["x", "y", "z"])
    }

    /// Abstract alphabet `v1..vn`.
    pub fn abstract_vars(n: usize) -> Self {
        Alphabet::new((1..=n).map(|i| format!("v{i}")))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, v: Variable) -> &str {
        &self.0.names[v.index()]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.names.iter().map(String::as_str)
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> {
        (0..self.len() as u16).map(Variable)
    }

    pub fn lookup(&self, name: &str) -> Result<Variable, AlgebraError> {
        self.0
            .names
            .iter()
            .position(|n| n == name)
            .map(|i| Variable(i as u16))
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.names.iter().any(|n| n == name)
    }

    /// The generators x, y, z, required by the `G` operator and the
    /// rank-3 models.
    pub fn xyz_vars(&self) -> Result<[Variable; 3], AlgebraError> {
        Ok([self.lookup("x")?, self.lookup("y")?, self.lookup("z")?])
    }
}

/// Per-variable leaf counts of a homogeneous component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiDegree(pub Vec<u32>);

impl MultiDegree {
    pub fn zero(len: usize) -> Self {
        MultiDegree(vec![0; len])
    }

    pub fn of_var(len: usize, v: Variable) -> Self {
        let mut d = MultiDegree::zero(len);
        d.0[v.index()] = 1;
        d
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: Variable) -> u32 {
        self.0[v.index()]
    }

    pub fn plus(&self, other: &MultiDegree) -> MultiDegree {
        assert_eq!(self.len(), other.len(), "multidegree length mismatch");
        MultiDegree(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference, `None` if any coordinate would go negative.
    pub fn checked_sub(&self, other: &MultiDegree) -> Option<MultiDegree> {
        assert_eq!(self.len(), other.len(), "multidegree length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiDegree)
    }

    pub fn dominates(&self, other: &MultiDegree) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The multidegree report of an element: zero elements have no degree,
/// inhomogeneous elements report `Mixed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Grading {
    Zero,
    Homogeneous(MultiDegree),
    Mixed,
}

impl Grading {
    pub fn homogeneous(&self) -> Option<&MultiDegree> {
        match self {
            Grading::Homogeneous(d) => Some(d),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declaration_order_is_variable_order() {
        let a = Alphabet::xyz();
        let x = a.lookup("x").unwrap();
        let y = a.lookup("y").unwrap();
        let z = a.lookup("z").unwrap();
        assert!(x < y && y < z);
        assert_eq!(a.name(x), "x");
    }

    #[test]
    fn unknown_variable_errors() {
        let a = Alphabet::xyz();
        assert!(matches!(
            a.lookup("w"),
            Err(AlgebraError::UnknownVariable(_))
        ));
    }

    #[test]
    fn equality_is_by_names() {
        assert_eq!(Alphabet::xyz(), Alphabet::new(["x", "y", "z"]));
        assert_ne!(Alphabet::xyz(), Alphabet::new(["x", "y"]));
    }

    #[test]
    fn multidegree_total() {
        let d = MultiDegree(vec![2, 1, 1]);
        assert_eq!(d.total(), 4);
        assert_eq!(d.plus(&MultiDegree(vec![1, 0, 0])).total(), 5);
        assert_eq!(
            d.checked_sub(&MultiDegree(vec![1, 1, 1])),
            Some(MultiDegree(vec![1, 0, 0]))
        );
        assert_eq!(d.checked_sub(&MultiDegree(vec![3, 0, 0])), None);
    }
}
