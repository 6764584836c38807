//! Elements of the free anticommutative algebra: sparse rational linear
//! combinations of canonical monomials, together with the products and
//! operators (J, G, R, L) used throughout.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::alphabet::{Alphabet, Grading, MultiDegree, Variable};
use crate::error::AlgebraError;
use crate::monomial::{Mono, NamedTree, RawTree};

/// A sparse rational linear combination of canonical monomials over one
/// alphabet. Stored coefficients are never zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    alphabet: Alphabet,
    terms: BTreeMap<Mono, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl Element {
    pub fn zero(alphabet: &Alphabet) -> Element {
        Element {
            alphabet: alphabet.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn variable(alphabet: &Alphabet, v: Variable) -> Element {
        Element::from_mono(alphabet, Mono::leaf(v), BigRational::one())
    }

    pub fn gen(alphabet: &Alphabet, name: &str) -> Result<Element, AlgebraError> {
        Ok(Element::variable(alphabet, alphabet.lookup(name)?))
    }

    pub fn from_mono(alphabet: &Alphabet, m: Mono, coeff: BigRational) -> Element {
        let mut e = Element::zero(alphabet);
        e.add_term(m, coeff);
        e
    }

    /// The element equal to a raw signed tree modulo anticommutativity.
    /// Signs from reordering are absorbed into the coefficient.
    pub fn canonicalize(
        alphabet: &Alphabet,
        tree: &NamedTree,
        coeff: BigRational,
    ) -> Result<Element, AlgebraError> {
        let raw = tree.resolve(alphabet)?;
        Ok(Element::from_raw(alphabet, &raw, coeff))
    }

    pub fn from_raw(alphabet: &Alphabet, raw: &RawTree, coeff: BigRational) -> Element {
        match raw.canonicalize() {
            None => Element::zero(alphabet),
            Some((m, s)) => Element::from_mono(alphabet, m, coeff * int(s as i64)),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mono, &BigRational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, m: Mono) -> BigRational {
        self.terms.get(&m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn add_term(&mut self, m: Mono, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn assert_same_alphabet(&self, other: &Element) {
        assert_eq!(
            self.alphabet, other.alphabet,
            "elements over different alphabets"
        );
    }

    pub fn add(&self, other: &Element) -> Element {
        self.assert_same_alphabet(other);
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.assert_same_alphabet(other);
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, -c.clone());
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Element {
        if q.is_zero() {
            return Element::zero(&self.alphabet);
        }
        Element {
            alphabet: self.alphabet.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c * q)).collect(),
        }
    }

    pub fn neg(&self) -> Element {
        self.scale(&int(-1))
    }

    /// Bilinear extension of tree grafting followed by canonicalization.
    /// Anticommutative: `mul(a, b) = -mul(b, a)`, `mul(a, a) = 0`.
    pub fn mul(&self, other: &Element) -> Element {
        self.assert_same_alphabet(other);
        let mut out = Element::zero(&self.alphabet);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if let Some((m, s)) = Mono::prod(ma, mb) {
                    out.add_term(m, ca * cb * int(s as i64));
                }
            }
        }
        out
    }

    /// J(a,b,c) = ((ab)c) + ((ca)b) + ((bc)a), left-normed.
    pub fn jacobian(a: &Element, b: &Element, c: &Element) -> Element {
        a.mul(b).mul(c).add(&c.mul(a).mul(b)).add(&b.mul(c).mul(a))
    }

    /// G(a,b,c,d) = J(ab,c,d) - b J(a,c,d) - J(b,c,d) a.
    pub fn gfunc(a: &Element, b: &Element, c: &Element, d: &Element) -> Element {
        Element::jacobian(&a.mul(b), c, d)
            .sub(&b.mul(&Element::jacobian(a, c, d)))
            .sub(&Element::jacobian(b, c, d).mul(a))
    }

    /// L_{a,b} = (R_a R_b + R_b R_a)/2 applied to `self`.
    pub fn lop(&self, a: &Element, b: &Element) -> Element {
        self.mul(a)
            .mul(b)
            .add(&self.mul(b).mul(a))
            .scale(&rat(1, 2))
    }

    /// The common multidegree of all monomials, `Mixed` when they
    /// disagree, `Zero` for the zero element.
    pub fn multidegree(&self) -> Grading {
        let mut it = self.terms.keys();
        let first = match it.next() {
            None => return Grading::Zero,
            Some(m) => m.multidegree(&self.alphabet),
        };
        for m in it {
            if m.multidegree(&self.alphabet) != first {
                return Grading::Mixed;
            }
        }
        Grading::Homogeneous(first)
    }

    /// Split into homogeneous components, keyed by multidegree.
    pub fn components(&self) -> BTreeMap<MultiDegree, Element> {
        let mut out: BTreeMap<MultiDegree, Element> = BTreeMap::new();
        for (m, c) in self.terms() {
            let d = m.multidegree(&self.alphabet);
            out.entry(d)
                .or_insert_with(|| Element::zero(&self.alphabet))
                .add_term(m, c.clone());
        }
        out
    }

    /// Relabel each monomial through a leaf map into the target alphabet.
    /// Trees are re-canonicalized, so any sign changes are absorbed.
    pub fn map_variables(
        &self,
        target: &Alphabet,
        f: impl Fn(Variable) -> Variable,
    ) -> Element {
        let mut out = Element::zero(target);
        for (m, c) in self.terms() {
            let raw = m.to_raw().map_leaves(&mut |v| RawTree::Leaf(f(v)));
            match raw.canonicalize() {
                None => {}
                Some((m2, s)) => out.add_term(m2, c * int(s as i64)),
            }
        }
        out
    }

    /// Substitute each variable by an element of the target alphabet,
    /// expanding multilinearly over the tree structure.
    pub fn substitute(
        &self,
        target: &Alphabet,
        assign: &impl Fn(Variable) -> Element,
    ) -> Element {
        let mut out = Element::zero(target);
        for (m, c) in self.terms() {
            out = out.add(&subst_tree(target, m, assign).scale(c));
        }
        out
    }
}

fn subst_tree(
    target: &Alphabet,
    m: Mono,
    assign: &impl Fn(Variable) -> Element,
) -> Element {
    match m.children() {
        None => assign(m.leaf_var().unwrap()),
        Some((l, r)) => subst_tree(target, l, assign).mul(&subst_tree(target, r, assign)),
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            write!(f, "{}", m.format(&self.alphabet))?;
        }
        Ok(())
    }
}

/// One primitive operator with a positive power.
#[derive(Debug, Clone)]
pub enum Operator {
    /// e -> e a
    RightMul(Element),
    /// e -> (e a b + e b a)/2
    LOp(Element, Element),
    /// e -> G(e, x, y, z)
    GOp,
}

/// A composition of primitive operators, applied left to right.
#[derive(Debug, Clone, Default)]
pub struct OperatorWord {
    ops: Vec<(Operator, u32)>,
}

impl OperatorWord {
    pub fn new() -> OperatorWord {
        OperatorWord { ops: Vec::new() }
    }

    pub fn push(&mut self, op: Operator, power: u32) -> Result<(), AlgebraError> {
        match &op {
            Operator::RightMul(a) if a.is_zero() => return Err(AlgebraError::ZeroOperand),
            Operator::LOp(a, b) if a.is_zero() || b.is_zero() => {
                return Err(AlgebraError::ZeroOperand)
            }
            _ => {}
        }
        if power > 0 {
            self.ops.push((op, power));
        }
        Ok(())
    }

    pub fn right_mul(mut self, a: Element) -> Result<OperatorWord, AlgebraError> {
        self.push(Operator::RightMul(a), 1)?;
        Ok(self)
    }

    pub fn lop(mut self, a: Element, b: Element, power: u32) -> Result<OperatorWord, AlgebraError> {
        self.push(Operator::LOp(a, b), power)?;
        Ok(self)
    }

    pub fn gop(mut self, power: u32) -> Result<OperatorWord, AlgebraError> {
        self.push(Operator::GOp, power)?;
        Ok(self)
    }

    pub fn ops(&self) -> impl Iterator<Item = (&Operator, u32)> {
        self.ops.iter().map(|(op, p)| (op, *p))
    }

    /// Total multidegree added by applying the word once.
    pub fn added_multidegree(&self, alphabet: &Alphabet) -> Result<MultiDegree, AlgebraError> {
        let mut d = MultiDegree::zero(alphabet.len());
        for (op, p) in self.ops() {
            let step = match op {
                Operator::RightMul(a) => match a.multidegree() {
                    Grading::Homogeneous(da) => da,
                    _ => return Err(AlgebraError::MixedDegree),
                },
                Operator::LOp(a, b) => match (a.multidegree(), b.multidegree()) {
                    (Grading::Homogeneous(da), Grading::Homogeneous(db)) => da.plus(&db),
                    _ => return Err(AlgebraError::MixedDegree),
                },
                Operator::GOp => {
                    let [x, y, z] = alphabet.xyz_vars().map_err(|_| AlgebraError::MissingXyz)?;
                    let mut g = MultiDegree::zero(alphabet.len());
                    g.0[x.index()] = 1;
                    g.0[y.index()] = 1;
                    g.0[z.index()] = 1;
                    g
                }
            };
            for _ in 0..p {
                d = d.plus(&step);
            }
        }
        Ok(d)
    }
}

/// Apply an operator word to an element, composing left to right with
/// powers expanded.
pub fn apply_operator(e: &Element, word: &OperatorWord) -> Result<Element, AlgebraError> {
    let mut cur = e.clone();
    for (op, power) in word.ops() {
        for _ in 0..power {
            cur = match op {
                Operator::RightMul(a) => cur.mul(a),
                Operator::LOp(a, b) => cur.lop(a, b),
                Operator::GOp => {
                    let [x, y, z] = cur
                        .alphabet()
                        .xyz_vars()
                        .map_err(|_| AlgebraError::MissingXyz)?;
                    let al = cur.alphabet().clone();
                    let gx = Element::variable(&al, x);
                    let gy = Element::variable(&al, y);
                    let gz = Element::variable(&al, z);
                    Element::gfunc(&cur, &gx, &gy, &gz)
                }
            };
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Alphabet, Element, Element, Element) {
        let a = Alphabet::xyz();
        let x = Element::gen(&a, "x").unwrap();
        let y = Element::gen(&a, "y").unwrap();
        let z = Element::gen(&a, "z").unwrap();
        (a, x, y, z)
    }

    #[test]
    fn mul_square_is_zero() {
        let (_, x, _, _) = setup();
        assert!(x.mul(&x).is_zero());
    }

    #[test]
    fn mul_anticommutes() {
        let (_, x, y, _) = setup();
        let xy = x.mul(&y);
        assert_eq!(y.mul(&x), xy.neg());
        assert_eq!(xy.num_terms(), 1);
    }

    #[test]
    fn canonicalize_named_trees() {
        let (a, x, y, _) = setup();
        // (x.x) -> 0
        let t = NamedTree::node(NamedTree::leaf("x"), NamedTree::leaf("x"));
        assert!(Element::canonicalize(&a, &t, int(1)).unwrap().is_zero());
        // (y.x) -> -(x.y)
        let t = NamedTree::node(NamedTree::leaf("y"), NamedTree::leaf("x"));
        assert_eq!(
            Element::canonicalize(&a, &t, int(1)).unwrap(),
            x.mul(&y).neg()
        );
        // ((x.y).(x.y)) -> 0
        let xy = NamedTree::node(NamedTree::leaf("x"), NamedTree::leaf("y"));
        let t = NamedTree::node(xy.clone(), xy);
        assert!(Element::canonicalize(&a, &t, int(1)).unwrap().is_zero());
        // unknown variable
        let t = NamedTree::leaf("w");
        assert!(Element::canonicalize(&a, &t, int(1)).is_err());
    }

    #[test]
    fn add_and_scale() {
        let (a, x, y, _) = setup();
        assert!(x.add(&x.neg()).is_zero());
        let j = Element::jacobian(&x, &y, &Element::gen(&a, "z").unwrap());
        assert!(j.scale(&int(0)).is_zero());
        assert!(x.mul(&y).add(&y.mul(&x)).is_zero());
    }

    #[test]
    fn jacobian_three_terms_and_symmetries() {
        let (_, x, y, z) = setup();
        let j = Element::jacobian(&x, &y, &z);
        assert_eq!(j.num_terms(), 3);
        // cyclic invariance
        assert_eq!(Element::jacobian(&y, &z, &x), j);
        assert_eq!(Element::jacobian(&z, &x, &y), j);
        // alternating
        assert_eq!(Element::jacobian(&y, &x, &z), j.neg());
        assert!(Element::jacobian(&x, &x, &y).is_zero());
    }

    #[test]
    fn apply_operator_basics() {
        let (a, x, y, z) = setup();
        // z L_{x,x} = ((z x) x)
        let w = OperatorWord::new().lop(x.clone(), x.clone(), 1).unwrap();
        let got = apply_operator(&z, &w).unwrap();
        assert_eq!(got, z.mul(&x).mul(&x));
        // x R_x = 0
        let w = OperatorWord::new().right_mul(x.clone()).unwrap();
        assert!(apply_operator(&x, &w).unwrap().is_zero());
        // J L_{x,y} = (J x y + J y x)/2
        let j = Element::jacobian(&x, &y, &z);
        let w = OperatorWord::new().lop(x.clone(), y.clone(), 1).unwrap();
        let got = apply_operator(&j, &w).unwrap();
        let want = j
            .mul(&x)
            .mul(&y)
            .add(&j.mul(&y).mul(&x))
            .scale(&rat(1, 2));
        assert_eq!(got, want);
        let _ = a;
    }

    #[test]
    fn gop_needs_xyz() {
        let a = Alphabet::new(["a", "b"]);
        let e = Element::gen(&a, "a").unwrap();
        let w = OperatorWord::new().gop(1).unwrap();
        assert!(matches!(
            apply_operator(&e, &w),
            Err(AlgebraError::MissingXyz)
        ));
    }

    #[test]
    fn zero_operand_rejected() {
        let (a, x, _, _) = setup();
        let zero = Element::zero(&a);
        assert!(OperatorWord::new().right_mul(zero.clone()).is_err());
        assert!(OperatorWord::new().lop(x, zero, 1).is_err());
    }

    #[test]
    fn multidegree_reporting() {
        let (a, x, y, z) = setup();
        let j = Element::jacobian(&x, &y, &z);
        assert_eq!(
            j.multidegree(),
            Grading::Homogeneous(MultiDegree(vec![1, 1, 1]))
        );
        let mixed = x.add(&x.mul(&y));
        assert_eq!(mixed.multidegree(), Grading::Mixed);
        assert_eq!(Element::zero(&a).multidegree(), Grading::Zero);
    }

    #[test]
    fn operator_word_multidegree_bookkeeping() {
        let (a, x, y, z) = setup();
        let j = Element::jacobian(&x, &y, &z);
        let w = OperatorWord::new()
            .lop(x.clone(), x.clone(), 2)
            .unwrap()
            .lop(y.clone(), z.clone(), 1)
            .unwrap();
        let applied = apply_operator(&j, &w).unwrap();
        // (1,1,1) + 2*(2,0,0) + (0,1,1)
        let want = MultiDegree(vec![5, 2, 2]);
        assert_eq!(w.added_multidegree(&a).unwrap(), MultiDegree(vec![4, 1, 1]));
        assert_eq!(applied.multidegree(), Grading::Homogeneous(want));
    }

    #[test]
    fn gfunc_skew_symmetry_is_not_syntactic() {
        // Swapping two arguments of G negates it only modulo Malcev
        // relations; as free elements the sum is generally nonzero.
        // That equivalence is checked through the models elsewhere.
        let al = Alphabet::new(["a", "b", "c", "d"]);
        let a = Element::gen(&al, "a").unwrap();
        let b = Element::gen(&al, "b").unwrap();
        let c = Element::gen(&al, "c").unwrap();
        let d = Element::gen(&al, "d").unwrap();
        let g = Element::gfunc(&a, &b, &c, &d);
        assert!(!g.add(&Element::gfunc(&c, &b, &a, &d)).is_zero());
        assert!(!g.is_zero());
        // the (1,2) and (3,4) swaps do follow from anticommutativity alone
        assert!(g.add(&Element::gfunc(&b, &a, &c, &d)).is_zero());
        assert!(g.add(&Element::gfunc(&a, &b, &d, &c)).is_zero());
    }

    #[test]
    fn display_round_shape() {
        let (_, x, y, z) = setup();
        let j = Element::jacobian(&x, &y, &z);
        let s = format!("{j}");
        assert!(s.contains("x (y z)"));
    }
}
