//! The free Lie projection: commutator expansion into the free
//! associative algebra on {x, y, z}, exact zero test, and graded
//! dimensions with the Witt necklace formula as an independent oracle.
//!
//! Coordinates are taken directly on associative words; no Lyndon basis
//! is needed for zero tests and ranks.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::alphabet::MultiDegree;
use crate::element::Element;
use crate::error::AlgebraError;
use crate::linalg::SparseRationalMatrix;
use crate::monomial::Mono;

/// A word over {x, y, z}, letters packed two bits per position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AssocWord {
    len: u8,
    bits: u64,
}

impl AssocWord {
    pub fn letter(l: u8) -> AssocWord {
        debug_assert!(l < 3);
        AssocWord {
            len: 1,
            bits: l as u64,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn concat(&self, other: &AssocWord) -> AssocWord {
        debug_assert!(self.len as usize + other.len as usize <= 32);
        AssocWord {
            len: self.len + other.len,
            bits: self.bits | (other.bits << (2 * self.len)),
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| ((self.bits >> (2 * i)) & 3) as u8)
    }

    pub fn multidegree(&self) -> MultiDegree {
        let mut d = vec![0u32; 3];
        for l in self.letters() {
            d[l as usize] += 1;
        }
        MultiDegree(d)
    }
}

impl Ord for AssocWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // length, then lex
        self.len.cmp(&other.len).then_with(|| {
            self.letters()
                .collect::<Vec<_>>()
                .cmp(&other.letters().collect::<Vec<_>>())
        })
    }
}

impl PartialOrd for AssocWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for AssocWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in self.letters() {
            write!(f, "{}", ["x", "y", "z"][l as usize])?;
        }
        Ok(())
    }
}

/// Sparse polynomial over the free associative algebra on {x, y, z}.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AssocPoly {
    terms: BTreeMap<AssocWord, BigRational>,
}

impl AssocPoly {
    pub fn zero() -> AssocPoly {
        AssocPoly::default()
    }

    pub fn word(w: AssocWord) -> AssocPoly {
        let mut p = AssocPoly::zero();
        p.add_term(w, BigRational::from_integer(1.into()));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AssocWord, &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, w: AssocWord, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &AssocPoly) -> AssocPoly {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(*w, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AssocPoly) -> AssocPoly {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(*w, -c.clone());
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> AssocPoly {
        if q.is_zero() {
            return AssocPoly::zero();
        }
        AssocPoly {
            terms: self.terms.iter().map(|(w, c)| (*w, c * q)).collect(),
        }
    }

    /// Concatenation product, extended bilinearly.
    pub fn mul(&self, other: &AssocPoly) -> AssocPoly {
        let mut out = AssocPoly::zero();
        for (wa, ca) in self.terms() {
            for (wb, cb) in other.terms() {
                out.add_term(wa.concat(wb), ca * cb);
            }
        }
        out
    }

    /// ab - ba.
    pub fn commutator(&self, other: &AssocPoly) -> AssocPoly {
        self.mul(other).sub(&other.mul(self))
    }
}

/// Expand every tree product as a commutator; linear in `e`. The
/// element must live over the {x, y, z} alphabet.
pub fn commutator_embed(e: &Element) -> Result<AssocPoly, AlgebraError> {
    let [x, y, z] = e.alphabet().xyz_vars()?;
    let letter_of = |v: crate::alphabet::Variable| -> u8 {
        if v == x {
            0
        } else if v == y {
            1
        } else if v == z {
            2
        } else {
            unreachable!("alphabet is exactly x,y,z")
        }
    };
    if e.alphabet().len() != 3 {
        return Err(AlgebraError::MissingXyz);
    }
    let mut out = AssocPoly::zero();
    let mut cache: rustc_hash::FxHashMap<Mono, AssocPoly> = rustc_hash::FxHashMap::default();
    for (m, c) in e.terms() {
        let p = embed_mono(m, &letter_of, &mut cache);
        out = out.add(&p.scale(c));
    }
    Ok(out)
}

fn embed_mono(
    m: Mono,
    letter_of: &impl Fn(crate::alphabet::Variable) -> u8,
    cache: &mut rustc_hash::FxHashMap<Mono, AssocPoly>,
) -> AssocPoly {
    if let Some(p) = cache.get(&m) {
        return p.clone();
    }
    let p = match m.children() {
        None => AssocPoly::word(AssocWord::letter(letter_of(m.leaf_var().unwrap()))),
        Some((l, r)) => {
            let pl = embed_mono(l, letter_of, cache);
            let pr = embed_mono(r, letter_of, cache);
            pl.commutator(&pr)
        }
    };
    cache.insert(m, p.clone());
    p
}

/// True iff the commutator expansion vanishes identically.
pub fn lie_is_zero(e: &Element) -> Result<bool, AlgebraError> {
    Ok(commutator_embed(e)?.is_zero())
}

/// Dimension of the multidegree-d component of the free Lie algebra of
/// rank three, computed as the rank of the commutator embeddings of all
/// canonical monomials of that multidegree.
pub fn lie_dim(d: &MultiDegree) -> usize {
    assert_eq!(d.len(), 3);
    assert!(d.total() >= 1);
    let al = crate::alphabet::Alphabet::xyz();
    let monos = crate::enumerate::monomials_of(&al, d);
    if monos.is_empty() {
        return 0;
    }
    // column index: lex rank among words of this multidegree
    let mut word_cols: BTreeMap<AssocWord, u32> = BTreeMap::new();
    let mut matrix = SparseRationalMatrix::new();
    let mut cache = rustc_hash::FxHashMap::default();
    let [x, y, z] = al.xyz_vars().unwrap();
    let letter_of = move |v: crate::alphabet::Variable| -> u8 {
        if v == x {
            0
        } else if v == y {
            1
        } else {
            debug_assert!(v == z);
            2
        }
    };
    for m in monos {
        let p = embed_mono(m, &letter_of, &mut cache);
        let entries: Vec<(u32, BigRational)> = p
            .terms()
            .map(|(w, c)| {
                let next = word_cols.len() as u32;
                let col = *word_cols.entry(*w).or_insert(next);
                (col, c.clone())
            })
            .collect();
        matrix.push_rational_row(entries);
    }
    matrix.rank()
}

/// Witt (necklace) formula for the same dimension:
/// (1/n) * sum over j | gcd(d) of mu(j) * (n/j)! / prod (d_i/j)!.
pub fn witt_dim(d: &MultiDegree) -> u64 {
    let n = d.total() as u64;
    assert!(n >= 1);
    let nonzero: Vec<u64> = d.0.iter().filter(|&&c| c > 0).map(|&c| c as u64).collect();
    let g = nonzero.iter().fold(0u64, |a, &b| num_integer::gcd(a, b));
    let mut sum: i128 = 0;
    for j in 1..=g {
        if g % j != 0 {
            continue;
        }
        let mu = moebius(j);
        if mu == 0 {
            continue;
        }
        let mut term = factorial(n / j) as i128;
        for &c in &nonzero {
            term /= factorial(c / j) as i128;
        }
        sum += mu as i128 * term;
    }
    assert!(sum >= 0 && sum % n as i128 == 0, "Witt sum must divide");
    (sum / n as i128) as u64
}

fn factorial(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

fn moebius(mut n: u64) -> i64 {
    let mut mu = 1i64;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    fn setup() -> (Alphabet, Element, Element, Element) {
        let a = Alphabet::xyz();
        (
            a.clone(),
            Element::gen(&a, "x").unwrap(),
            Element::gen(&a, "y").unwrap(),
            Element::gen(&a, "z").unwrap(),
        )
    }

    #[test]
    fn embed_product_is_commutator() {
        let (_, x, y, _) = setup();
        let p = commutator_embed(&x.mul(&y)).unwrap();
        assert_eq!(p.num_terms(), 2); // xy - yx
        let px = commutator_embed(&x).unwrap();
        let py = commutator_embed(&y).unwrap();
        assert_eq!(p, px.commutator(&py));
    }

    #[test]
    fn jacobian_embeds_to_zero() {
        let (_, x, y, z) = setup();
        let j = Element::jacobian(&x, &y, &z);
        assert!(lie_is_zero(&j).unwrap());
        assert!(!lie_is_zero(&x.mul(&y)).unwrap());
        assert!(lie_is_zero(&Element::zero(&Alphabet::xyz())).unwrap());
    }

    #[test]
    fn jacobian_image_stays_zero_under_operators() {
        let (_, x, y, z) = setup();
        let j = Element::jacobian(&x, &y, &z);
        let e = j.lop(&x, &x);
        assert!(lie_is_zero(&e).unwrap());
    }

    #[test]
    fn word_order_is_length_then_lex() {
        let x = AssocWord::letter(0);
        let y = AssocWord::letter(1);
        let xy = x.concat(&y);
        let yx = y.concat(&x);
        assert!(x < y);
        assert!(y < xy);
        assert!(xy < yx);
        assert_eq!(format!("{}", xy.concat(&x)), "xyx");
    }

    #[test]
    fn witt_formula_values() {
        assert_eq!(witt_dim(&MultiDegree(vec![1, 0, 0])), 1);
        assert_eq!(witt_dim(&MultiDegree(vec![2, 0, 0])), 0);
        assert_eq!(witt_dim(&MultiDegree(vec![1, 1, 0])), 1);
        assert_eq!(witt_dim(&MultiDegree(vec![1, 1, 1])), 2);
        assert_eq!(witt_dim(&MultiDegree(vec![2, 1, 1])), 3);
        assert_eq!(witt_dim(&MultiDegree(vec![2, 2, 1])), 6);
        assert_eq!(witt_dim(&MultiDegree(vec![2, 2, 2])), 14);
        assert_eq!(witt_dim(&MultiDegree(vec![3, 3, 0])), 3);
    }

    #[test]
    fn lie_dim_matches_witt_through_degree_five() {
        for total in 1..=5u32 {
            for d in crate::enumerate::multidegrees_of_total(3, total) {
                assert_eq!(
                    lie_dim(&d) as u64,
                    witt_dim(&d),
                    "multidegree {d} disagrees"
                );
            }
        }
    }

    #[test]
    fn commutator_embed_is_homomorphism_on_samples() {
        let (_, x, y, z) = setup();
        let a = Element::jacobian(&x, &y, &z).add(&x.mul(&y));
        let b = z.mul(&x).sub(&y);
        let lhs = commutator_embed(&a.mul(&b)).unwrap();
        let ea = commutator_embed(&a).unwrap();
        let eb = commutator_embed(&b).unwrap();
        assert_eq!(lhs, ea.commutator(&eb));
    }
}
