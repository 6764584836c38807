//! Expression trees over the term algebra and their evaluation into the
//! models. Operator-heavy identities are evaluated compositionally —
//! apply R, L and G inside each model — which keeps zero tests exact
//! and cheap even where the expanded free element would be enormous.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use crate::alphabet::Alphabet;
use crate::assoc::{commutator_embed, AssocPoly, AssocWord};
use crate::element::Element;
use crate::error::AlgebraError;
use crate::m7::{eval_generic, m7_mul, M7Element};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Zero,
    Var(String),
    Scale(BigRational, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Jacobian(Box<Expr>, Box<Expr>, Box<Expr>),
    /// e.L(a,b)^k
    LApply(Box<Expr>, Box<Expr>, Box<Expr>, u32),
    /// e.R(a)^k
    RApply(Box<Expr>, Box<Expr>, u32),
    /// e.G^k, G applied with the fixed generators x, y, z
    GApply(Box<Expr>, u32),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn scale(q: BigRational, a: Expr) -> Expr {
        Expr::Scale(q, Box::new(a))
    }

    pub fn jac(a: Expr, b: Expr, c: Expr) -> Expr {
        Expr::Jacobian(Box::new(a), Box::new(b), Box::new(c))
    }

    pub fn lop(self, a: Expr, b: Expr, k: u32) -> Expr {
        Expr::LApply(Box::new(self), Box::new(a), Box::new(b), k)
    }

    pub fn rop(self, a: Expr, k: u32) -> Expr {
        Expr::RApply(Box::new(self), Box::new(a), k)
    }

    pub fn gop(self, k: u32) -> Expr {
        Expr::GApply(Box::new(self), k)
    }

    /// Left-normed product of a factor sequence.
    pub fn left_normed(factors: Vec<Expr>) -> Expr {
        let mut it = factors.into_iter();
        let first = it.next().expect("nonempty factor sequence");
        it.fold(first, Expr::mul)
    }

    /// Total degree, taking the maximum over sum branches (used only to
    /// apply degree caps before evaluating).
    pub fn total_degree(&self) -> u32 {
        match self {
            Expr::Zero => 0,
            Expr::Var(_) => 1,
            Expr::Scale(_, e) => e.total_degree(),
            Expr::Add(a, b) | Expr::Sub(a, b) => a.total_degree().max(b.total_degree()),
            Expr::Mul(a, b) => a.total_degree() + b.total_degree(),
            Expr::Jacobian(a, b, c) => a.total_degree() + b.total_degree() + c.total_degree(),
            Expr::LApply(e, a, b, k) => {
                e.total_degree() + k * (a.total_degree() + b.total_degree())
            }
            Expr::RApply(e, a, k) => e.total_degree() + k * a.total_degree(),
            Expr::GApply(e, k) => e.total_degree() + 3 * k,
        }
    }

    /// Variable names, in first-appearance order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Zero => {}
            Expr::Var(n) => {
                if !out.iter().any(|m| m == n) {
                    out.push(n.clone());
                }
            }
            Expr::Scale(_, e) | Expr::GApply(e, _) => e.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Jacobian(a, b, c) => {
                a.collect_vars(out);
                b.collect_vars(out);
                c.collect_vars(out);
            }
            Expr::LApply(e, a, b, _) => {
                e.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::RApply(e, a, _) => {
                e.collect_vars(out);
                a.collect_vars(out);
            }
        }
    }

    pub fn eval<M: Model>(&self, model: &M) -> Result<M::Value, AlgebraError> {
        match self {
            Expr::Zero => Ok(model.zero()),
            Expr::Var(n) => model.var(n),
            Expr::Scale(q, e) => Ok(model.scale(q, &e.eval(model)?)),
            Expr::Add(a, b) => Ok(model.add(&a.eval(model)?, &b.eval(model)?)),
            Expr::Sub(a, b) => {
                let minus = model.scale(&-BigRational::one(), &b.eval(model)?);
                Ok(model.add(&a.eval(model)?, &minus))
            }
            Expr::Mul(a, b) => Ok(model.mul(&a.eval(model)?, &b.eval(model)?)),
            Expr::Jacobian(a, b, c) => {
                let (a, b, c) = (a.eval(model)?, b.eval(model)?, c.eval(model)?);
                Ok(jac_value(model, &a, &b, &c))
            }
            Expr::LApply(e, a, b, k) => {
                let mut cur = e.eval(model)?;
                let (a, b) = (a.eval(model)?, b.eval(model)?);
                for _ in 0..*k {
                    cur = l_value(model, &cur, &a, &b);
                }
                Ok(cur)
            }
            Expr::RApply(e, a, k) => {
                let mut cur = e.eval(model)?;
                let a = a.eval(model)?;
                for _ in 0..*k {
                    cur = model.mul(&cur, &a);
                }
                Ok(cur)
            }
            Expr::GApply(e, k) => {
                let mut cur = e.eval(model)?;
                let x = model.var("x")?;
                let y = model.var("y")?;
                let z = model.var("z")?;
                for _ in 0..*k {
                    cur = g_value(model, &cur, &x, &y, &z);
                }
                Ok(cur)
            }
        }
    }
}

/// J(a,b,c) = (ab)c + (ca)b + (bc)a in any model.
fn jac_value<M: Model>(m: &M, a: &M::Value, b: &M::Value, c: &M::Value) -> M::Value {
    let t1 = m.mul(&m.mul(a, b), c);
    let t2 = m.mul(&m.mul(c, a), b);
    let t3 = m.mul(&m.mul(b, c), a);
    m.add(&m.add(&t1, &t2), &t3)
}

/// e L_{a,b} = (e a b + e b a) / 2.
fn l_value<M: Model>(m: &M, e: &M::Value, a: &M::Value, b: &M::Value) -> M::Value {
    let t1 = m.mul(&m.mul(e, a), b);
    let t2 = m.mul(&m.mul(e, b), a);
    m.scale(&BigRational::new(1.into(), 2.into()), &m.add(&t1, &t2))
}

/// G(t,a,b,c) = J(ta,b,c) - a J(t,b,c) - J(a,b,c) t.
fn g_value<M: Model>(
    m: &M,
    t: &M::Value,
    a: &M::Value,
    b: &M::Value,
    c: &M::Value,
) -> M::Value {
    let j1 = jac_value(m, &m.mul(t, a), b, c);
    let j2 = m.mul(a, &jac_value(m, t, b, c));
    let j3 = m.mul(&jac_value(m, a, b, c), t);
    let neg = -BigRational::one();
    m.add(&j1, &m.add(&m.scale(&neg, &j2), &m.scale(&neg, &j3)))
}

/// An algebra to evaluate expressions in.
pub trait Model {
    type Value: Clone;
    fn zero(&self) -> Self::Value;
    fn var(&self, name: &str) -> Result<Self::Value, AlgebraError>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn scale(&self, q: &BigRational, a: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
}

/// The free anticommutative algebra over a declared alphabet.
pub struct FreeModel {
    pub alphabet: Alphabet,
    pub assignment: BTreeMap<String, Element>,
}

impl FreeModel {
    pub fn new(alphabet: &Alphabet) -> FreeModel {
        FreeModel {
            alphabet: alphabet.clone(),
            assignment: BTreeMap::new(),
        }
    }

    pub fn with_assignment(alphabet: &Alphabet, assignment: BTreeMap<String, Element>) -> FreeModel {
        FreeModel {
            alphabet: alphabet.clone(),
            assignment,
        }
    }
}

impl Model for FreeModel {
    type Value = Element;

    fn zero(&self) -> Element {
        Element::zero(&self.alphabet)
    }

    fn var(&self, name: &str) -> Result<Element, AlgebraError> {
        if let Some(e) = self.assignment.get(name) {
            return Ok(e.clone());
        }
        Element::gen(&self.alphabet, name)
    }

    fn add(&self, a: &Element, b: &Element) -> Element {
        a.add(b)
    }

    fn scale(&self, q: &BigRational, a: &Element) -> Element {
        a.scale(q)
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        a.mul(b)
    }
}

/// The commutator algebra of the free associative algebra on x, y, z;
/// abstract variables must be given an assignment.
pub struct AssocModel {
    pub assignment: BTreeMap<String, AssocPoly>,
}

impl AssocModel {
    pub fn new() -> AssocModel {
        AssocModel {
            assignment: BTreeMap::new(),
        }
    }
}

impl Default for AssocModel {
    fn default() -> Self {
        AssocModel::new()
    }
}

impl Model for AssocModel {
    type Value = AssocPoly;

    fn zero(&self) -> AssocPoly {
        AssocPoly::zero()
    }

    fn var(&self, name: &str) -> Result<AssocPoly, AlgebraError> {
        if let Some(p) = self.assignment.get(name) {
            return Ok(p.clone());
        }
        match name {
            "x" => Ok(AssocPoly::word(AssocWord::letter(0))),
            "y" => Ok(AssocPoly::word(AssocWord::letter(1))),
            "z" => Ok(AssocPoly::word(AssocWord::letter(2))),
            _ => Err(AlgebraError::UnknownVariable(name.to_string())),
        }
    }

    fn add(&self, a: &AssocPoly, b: &AssocPoly) -> AssocPoly {
        a.add(b)
    }

    fn scale(&self, q: &BigRational, a: &AssocPoly) -> AssocPoly {
        a.scale(q)
    }

    fn mul(&self, a: &AssocPoly, b: &AssocPoly) -> AssocPoly {
        a.commutator(b)
    }
}

/// Generic evaluation in m7; abstract variables must be assigned.
pub struct M7Model {
    pub assignment: BTreeMap<String, M7Element>,
}

impl M7Model {
    pub fn new() -> M7Model {
        M7Model {
            assignment: BTreeMap::new(),
        }
    }
}

impl Default for M7Model {
    fn default() -> Self {
        M7Model::new()
    }
}

impl Model for M7Model {
    type Value = M7Element;

    fn zero(&self) -> M7Element {
        M7Element::zero()
    }

    fn var(&self, name: &str) -> Result<M7Element, AlgebraError> {
        if let Some(v) = self.assignment.get(name) {
            return Ok(v.clone());
        }
        match name {
            "x" => Ok(M7Element::generic_generator(0)),
            "y" => Ok(M7Element::generic_generator(1)),
            "z" => Ok(M7Element::generic_generator(2)),
            _ => Err(AlgebraError::UnknownVariable(name.to_string())),
        }
    }

    fn add(&self, a: &M7Element, b: &M7Element) -> M7Element {
        a.add(b)
    }

    fn scale(&self, q: &BigRational, a: &M7Element) -> M7Element {
        a.scaled(q)
    }

    fn mul(&self, a: &M7Element, b: &M7Element) -> M7Element {
        m7_mul(a, b)
    }
}

/// Exact zero test of an expression in the free Malcev algebra through
/// both projections, evaluated compositionally. Variables other than
/// x, y, z must be covered by `assignment` (elements over x, y, z).
pub fn expr_zero_in_m(
    expr: &Expr,
    assignment: &BTreeMap<String, Element>,
) -> Result<bool, AlgebraError> {
    let mut assoc = AssocModel::new();
    let mut m7 = M7Model::new();
    for (name, elem) in assignment {
        assoc
            .assignment
            .insert(name.clone(), commutator_embed(elem)?);
        m7.assignment.insert(name.clone(), eval_generic(elem)?);
    }
    let a = expr.eval(&assoc)?;
    if !a.is_zero() {
        return Ok(false);
    }
    let o = expr.eval(&m7)?;
    Ok(o.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{int, rat};
    use crate::subdirect::zero_in_m;

    #[test]
    fn free_eval_matches_direct_construction() {
        let al = Alphabet::xyz();
        let model = FreeModel::new(&al);
        let e = Expr::jac(Expr::var("x"), Expr::var("y"), Expr::var("z"));
        let x = Element::gen(&al, "x").unwrap();
        let y = Element::gen(&al, "y").unwrap();
        let z = Element::gen(&al, "z").unwrap();
        assert_eq!(e.eval(&model).unwrap(), Element::jacobian(&x, &y, &z));

        let e2 = e.clone().lop(Expr::var("x"), Expr::var("x"), 2);
        let manual = Element::jacobian(&x, &y, &z).lop(&x, &x).lop(&x, &x);
        assert_eq!(e2.eval(&model).unwrap(), manual);
    }

    #[test]
    fn compositional_zero_test_matches_element_route() {
        // J(x,y,z).G - 6 J(x,y,z).L(x, zy) is zero in M
        let j = Expr::jac(Expr::var("x"), Expr::var("y"), Expr::var("z"));
        let lhs = j.clone().gop(1);
        let rhs = Expr::scale(
            int(6),
            j.clone()
                .lop(Expr::var("x"), Expr::mul(Expr::var("z"), Expr::var("y")), 1),
        );
        let diff = Expr::sub(lhs, rhs);
        assert!(expr_zero_in_m(&diff, &BTreeMap::new()).unwrap());

        // element route agrees
        let al = Alphabet::xyz();
        let elem = diff.eval(&FreeModel::new(&al)).unwrap();
        assert!(zero_in_m(&elem).unwrap());
    }

    #[test]
    fn assignments_substitute_abstract_variables() {
        // J(a, b, ab) is zero in M for any a, b (binary-Lie property
        // holds in Malcev algebras); spot-check one substitution
        let al = Alphabet::xyz();
        let x = Element::gen(&al, "x").unwrap();
        let y = Element::gen(&al, "y").unwrap();
        let z = Element::gen(&al, "z").unwrap();
        let expr = Expr::jac(
            Expr::var("a"),
            Expr::var("b"),
            Expr::mul(Expr::var("a"), Expr::var("b")),
        );
        let mut env = BTreeMap::new();
        env.insert("a".to_string(), x.mul(&y));
        env.insert("b".to_string(), z.mul(&x).scale(&rat(2, 3)));
        assert!(expr_zero_in_m(&expr, &env).unwrap());
    }

    #[test]
    fn degree_estimation() {
        let j = Expr::jac(Expr::var("x"), Expr::var("y"), Expr::var("z"));
        assert_eq!(j.total_degree(), 3);
        assert_eq!(j.clone().gop(2).total_degree(), 9);
        assert_eq!(
            j.clone()
                .lop(Expr::var("x"), Expr::mul(Expr::var("z"), Expr::var("y")), 2)
                .total_degree(),
            9
        );
        assert_eq!(j.variables(), vec!["x", "y", "z"]);
    }

    #[test]
    fn eq27_n2_compositional() {
        // J G^2 = 36 J L_{x,zy}^2 in M; degree 9, evaluated without
        // expanding the free element
        let j = Expr::jac(Expr::var("x"), Expr::var("y"), Expr::var("z"));
        let lhs = j.clone().gop(2);
        let rhs = Expr::scale(
            int(36),
            j.lop(Expr::var("x"), Expr::mul(Expr::var("z"), Expr::var("y")), 2),
        );
        let diff = Expr::sub(lhs, rhs);
        assert!(expr_zero_in_m(&diff, &BTreeMap::new()).unwrap());
    }
}
