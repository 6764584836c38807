//! The faithful subdirect model of the free Malcev algebra of rank
//! three: an element is zero exactly when both its free-Lie projection
//! (commutator expansion) and its generic octonion evaluation vanish.
//!
//! Joint coordinate vectors concatenate the Lie block (associative
//! words, length-then-lex) with the octonion block (coordinate index,
//! then exponent-vector lex), giving exact graded dimensions by rank.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;

use crate::alphabet::{Alphabet, MultiDegree};
use crate::assoc::{commutator_embed, lie_is_zero, AssocWord};
use crate::element::Element;
use crate::enumerate::monomials_of;
use crate::error::AlgebraError;
use crate::linalg::{IntRow, SparseRationalMatrix};
use crate::m7::{exponent, oct_is_zero, GenericEvaluator};
use crate::monomial::{Mono, RawTree};

/// Exact zero test in the free Malcev algebra: both projections vanish.
pub fn zero_in_m(e: &Element) -> Result<bool, AlgebraError> {
    Ok(lie_is_zero(e)? && oct_is_zero(e)?)
}

/// Column layout of the joint (Lie + octonion) coordinate vector of a
/// fixed multidegree.
pub struct JointLayout {
    word_index: BTreeMap<AssocWord, u32>,
    block_index: [BTreeMap<u32, u32>; 3],
    block_sizes: [u64; 3],
    oct_offset: u64,
}

impl JointLayout {
    pub fn new(d: &MultiDegree) -> JointLayout {
        assert_eq!(d.len(), 3);
        let words = words_of_multidegree(d);
        let word_index: BTreeMap<AssocWord, u32> = words
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w, i as u32))
            .collect();
        let block_index: [BTreeMap<u32, u32>; 3] = std::array::from_fn(|b| {
            compositions7(d.0[b])
                .into_iter()
                .enumerate()
                .map(|(i, key)| (key, i as u32))
                .collect()
        });
        let block_sizes = std::array::from_fn(|b| block_index[b].len() as u64);
        let oct_offset = word_index.len() as u64;
        JointLayout {
            word_index,
            block_index,
            block_sizes,
            oct_offset,
        }
    }

    pub fn num_cols(&self) -> u64 {
        self.oct_offset + 7 * self.block_sizes.iter().product::<u64>()
    }

    /// Joint coordinates of a homogeneous element of this multidegree.
    pub fn joint_image(
        &self,
        e: &Element,
        evaluator: &GenericEvaluator,
    ) -> Result<IntRow, AlgebraError> {
        let mut entries: Vec<(u32, BigRational)> = Vec::new();
        let embedded = commutator_embed(e)?;
        for (w, c) in embedded.terms() {
            let col = *self
                .word_index
                .get(w)
                .expect("word matches the layout multidegree");
            entries.push((col, c.clone()));
        }
        let img = evaluator.eval_element(e);
        let per_entry: u64 = self.block_sizes.iter().product();
        for k in 0..7usize {
            let poly = img.coordinate(k);
            for &(key, coeff) in poly.terms() {
                let mut rank = 0u64;
                for b in 0..3 {
                    let mut packed = 0u32;
                    for v in 0..7 {
                        packed |= exponent(key, 7 * b + v) << (4 * v);
                    }
                    let r = *self
                        .block_index[b]
                        .get(&packed)
                        .expect("exponent matches the layout multidegree")
                        as u64;
                    rank = rank * self.block_sizes[b] + r;
                }
                let col = self.oct_offset + (k as u64) * per_entry + rank;
                let col = u32::try_from(col).expect("column index fits u32");
                entries.push((
                    col,
                    img.scale_factor() * BigRational::from_integer(coeff.into()),
                ));
            }
        }
        Ok(IntRow::from_rational(entries))
    }
}

/// All words over {x,y,z} of the given multidegree, lex order.
fn words_of_multidegree(d: &MultiDegree) -> Vec<AssocWord> {
    let mut out = Vec::new();
    let total = d.total();
    let mut counts = [d.0[0], d.0[1], d.0[2]];
    let mut prefix: Vec<u8> = Vec::with_capacity(total as usize);
    fn rec(counts: &mut [u32; 3], prefix: &mut Vec<u8>, total: u32, out: &mut Vec<AssocWord>) {
        if prefix.len() as u32 == total {
            let mut w: Option<AssocWord> = None;
            for &l in prefix.iter() {
                let lw = AssocWord::letter(l);
                w = Some(match w {
                    None => lw,
                    Some(acc) => acc.concat(&lw),
                });
            }
            if let Some(w) = w {
                out.push(w);
            }
            return;
        }
        for l in 0..3u8 {
            if counts[l as usize] > 0 {
                counts[l as usize] -= 1;
                prefix.push(l);
                rec(counts, prefix, total, out);
                prefix.pop();
                counts[l as usize] += 1;
            }
        }
    }
    if total > 0 {
        rec(&mut counts, &mut prefix, total, &mut out);
    }
    out
}

/// Exponent vectors of 7 variables summing to `d`, lex order, packed
/// four bits per variable.
fn compositions7(d: u32) -> Vec<u32> {
    let mut out = Vec::new();
    fn rec(v: usize, left: u32, packed: u32, out: &mut Vec<u32>) {
        if v == 6 {
            out.push(packed | (left << (4 * 6)));
            return;
        }
        for e in 0..=left {
            rec(v + 1, left - e, packed | (e << (4 * v)), out);
        }
    }
    assert!(d < 16, "block degree must fit a nibble");
    rec(0, d, 0, &mut out);
    out
}

/// Graded dimension of the free Malcev algebra at multidegree `d`: the
/// rank of the joint images of all canonical monomials.
pub fn dim_m(d: &MultiDegree) -> usize {
    assert!(d.total() >= 1);
    let al = Alphabet::xyz();
    let monos = monomials_of(&al, d);
    rank_of_joint_images(d, monos.into_iter().map(|m| {
        Element::from_mono(&al, m, BigRational::from_integer(1.into()))
    }))
}

fn rank_of_joint_images(
    d: &MultiDegree,
    elements: impl Iterator<Item = Element>,
) -> usize {
    let layout = JointLayout::new(d);
    let evaluator = GenericEvaluator::new(&Alphabet::xyz()).unwrap();
    let elements: Vec<Element> = elements.collect();
    let rows: Vec<IntRow> = elements
        .par_iter()
        .map(|e| layout.joint_image(e, &evaluator).expect("xyz element"))
        .collect();
    let mut matrix = SparseRationalMatrix::new();
    for r in rows {
        matrix.push_row(r);
    }
    matrix.rank()
}

/// Graded dimension of J(M,M,M): the quotient by it is the free Lie
/// algebra, so the dimension is dim_M minus the Lie dimension.
pub fn dim_j(d: &MultiDegree) -> usize {
    assert!(d.total() >= 3);
    let dm = dim_m(d);
    let dl = crate::assoc::lie_dim(d);
    assert!(dm >= dl, "model dimensions inconsistent at {d}");
    dm - dl
}

/// Rank of the joint images of J(x,y,z) right-multiplied by all
/// generator sequences of multidegree d - (1,1,1). Zero (the component
/// has no Jacobian part) when d is not componentwise at least (1,1,1).
pub fn jspan_rank(d: &MultiDegree) -> usize {
    assert_eq!(d.len(), 3);
    let one = MultiDegree(vec![1, 1, 1]);
    let Some(rest) = d.checked_sub(&one) else {
        return 0;
    };
    let al = Alphabet::xyz();
    let x = Element::gen(&al, "x").unwrap();
    let y = Element::gen(&al, "y").unwrap();
    let z = Element::gen(&al, "z").unwrap();
    let j = Element::jacobian(&x, &y, &z);
    let seqs = sequences_of_multidegree(&rest);
    let elements = seqs.into_iter().map(|seq| {
        let mut e = j.clone();
        for l in seq {
            let g = [&x, &y, &z][l as usize];
            e = e.mul(g);
        }
        e
    });
    rank_of_joint_images(d, elements)
}

/// All letter sequences with the given multidegree (multiset
/// permutations), lex order.
fn sequences_of_multidegree(d: &MultiDegree) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let total = d.total();
    let mut counts = [d.0[0], d.0[1], d.0[2]];
    let mut prefix = Vec::with_capacity(total as usize);
    fn rec(counts: &mut [u32; 3], prefix: &mut Vec<u8>, total: u32, out: &mut Vec<Vec<u8>>) {
        if prefix.len() as u32 == total {
            out.push(prefix.clone());
            return;
        }
        for l in 0..3u8 {
            if counts[l as usize] > 0 {
                counts[l as usize] -= 1;
                prefix.push(l);
                rec(counts, prefix, total, out);
                prefix.pop();
                counts[l as usize] += 1;
            }
        }
    }
    rec(&mut counts, &mut prefix, total, &mut out);
    out
}

/// Left-normed product J(x,y,z) w for a word w, as a convenience for
/// the Proposition-1 spanning set.
pub fn jspan_element(word: &[u8]) -> Element {
    let al = Alphabet::xyz();
    let x = Element::gen(&al, "x").unwrap();
    let y = Element::gen(&al, "y").unwrap();
    let z = Element::gen(&al, "z").unwrap();
    let mut e = Element::jacobian(&x, &y, &z);
    for &l in word {
        e = e.mul([&x, &y, &z][l as usize]);
    }
    e
}

/// Convenience: the monomial element of a canonical tree.
pub fn mono_element(m: Mono) -> Element {
    Element::from_mono(&Alphabet::xyz(), m, BigRational::from_integer(1.into()))
}

/// The three generators as elements, plus helpers shared by callers.
pub fn xyz_elements() -> (Alphabet, Element, Element, Element) {
    let al = Alphabet::xyz();
    (
        al.clone(),
        Element::gen(&al, "x").unwrap(),
        Element::gen(&al, "y").unwrap(),
        Element::gen(&al, "z").unwrap(),
    )
}

/// Left-normed word of generators as a raw tree (e.g. for tails).
pub fn left_normed_word(al: &Alphabet, names: &[&str]) -> Result<Element, AlgebraError> {
    let vars: Result<Vec<_>, _> = names.iter().map(|n| al.lookup(n)).collect();
    let raw = RawTree::left_normed(&vars?);
    Ok(Element::from_raw(al, &raw, BigRational::from_integer(1.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{apply_operator, OperatorWord};

    #[test]
    fn zero_in_m_basics() {
        let (_, x, y, z) = xyz_elements();
        let j = Element::jacobian(&x, &y, &z);
        assert!(!zero_in_m(&j).unwrap());
        assert!(zero_in_m(&x.mul(&x)).unwrap());
        assert!(zero_in_m(&Element::zero(&Alphabet::xyz())).unwrap());
    }

    #[test]
    fn lemma_one_annihilation_instances() {
        // J(x,y,z) L_{x,xy} = 0 and J(x,y,z) L_{y,zy} = 0 in M
        let (_, x, y, z) = xyz_elements();
        let j = Element::jacobian(&x, &y, &z);
        let e = j.lop(&x, &x.mul(&y));
        assert!(zero_in_m(&e).unwrap());
        let e = j.lop(&y, &z.mul(&y));
        assert!(zero_in_m(&e).unwrap());
        // but J L_{x,zy} is not zero
        let e = j.lop(&x, &z.mul(&y));
        assert!(!zero_in_m(&e).unwrap());
    }

    #[test]
    fn g_acts_as_six_l_on_jacobian() {
        // J(x,y,z) G = 6 J(x,y,z) L_{x,zy}
        let (_, x, y, z) = xyz_elements();
        let j = Element::jacobian(&x, &y, &z);
        let jg = apply_operator(&j, &OperatorWord::new().gop(1).unwrap()).unwrap();
        let jl = j.lop(&x, &z.mul(&y));
        let diff = jg.sub(&jl.scale(&crate::element::int(6)));
        assert!(zero_in_m(&diff).unwrap());
    }

    #[test]
    fn dims_at_low_degree() {
        assert_eq!(dim_m(&MultiDegree(vec![1, 0, 0])), 1);
        assert_eq!(dim_m(&MultiDegree(vec![2, 0, 0])), 0);
        assert_eq!(dim_m(&MultiDegree(vec![1, 1, 1])), 3);
        assert_eq!(dim_j(&MultiDegree(vec![1, 1, 1])), 1);
        assert_eq!(dim_j(&MultiDegree(vec![3, 0, 0])), 0);
    }

    #[test]
    fn jspan_matches_dim_j_at_low_degree() {
        assert_eq!(jspan_rank(&MultiDegree(vec![1, 1, 1])), 1);
        assert_eq!(jspan_rank(&MultiDegree(vec![1, 1, 0])), 0);
        let d = MultiDegree(vec![2, 1, 1]);
        // frozen regression values: dim_M(2,1,1) = 4, so dim_J = 4 - 3
        assert_eq!(dim_m(&d), 4);
        assert_eq!(dim_j(&d), 1);
        assert_eq!(jspan_rank(&d), dim_j(&d));
        // dim_M = lie_dim + dim_J there as well
        assert_eq!(
            dim_m(&d),
            crate::assoc::lie_dim(&d) + dim_j(&d)
        );
    }

    #[test]
    fn faithfulness_consistency_on_zero_elements() {
        // an element zero in M maps to zero on both sides separately
        let (_, x, y, z) = xyz_elements();
        let j = Element::jacobian(&x, &y, &z);
        let e = j.lop(&x, &x.mul(&y)); // zero in M per Lemma 1
        assert!(crate::assoc::lie_is_zero(&e).unwrap());
        assert!(crate::m7::oct_is_zero(&e).unwrap());
        // and at a specific rational point of m7
        let out = crate::m7::oct_is_zero_randomized(&e, 12345, 2).unwrap();
        assert!(out.is_zero);
    }

    #[test]
    fn layout_columns_are_stable() {
        let d = MultiDegree(vec![1, 1, 1]);
        let layout = JointLayout::new(&d);
        // 6 words + 7 * 7^3-style blocks (degree-1 blocks each have 7)
        assert_eq!(layout.num_cols(), 6 + 7 * 343);
        let (_, x, y, z) = xyz_elements();
        let ev = GenericEvaluator::new(&Alphabet::xyz()).unwrap();
        let row1 = layout.joint_image(&Element::jacobian(&x, &y, &z), &ev).unwrap();
        let row2 = layout.joint_image(&Element::jacobian(&x, &y, &z), &ev).unwrap();
        assert_eq!(row1, row2);
    }
}
