//! Partial polarization (the Δ-operator) and full multilinearization.
//!
//! `delta(e, a, i, b)` sums over all ways to replace exactly `i`
//! occurrences of `a` by `b`. Over a field of characteristic zero the
//! full multilinearization of a multihomogeneous identity is equivalent
//! to it, which is what the T-ideal checker consumes.

use num_rational::BigRational;


use crate::alphabet::{Alphabet, Grading, MultiDegree, Variable};
use crate::element::Element;
use crate::error::AlgebraError;
use crate::monomial::RawTree;

/// A multihomogeneous identity expression: an element over an abstract
/// alphabet together with its per-variable degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityExpr {
    element: Element,
    multiplicities: MultiDegree,
}

impl IdentityExpr {
    /// Wraps a multihomogeneous element; fails on mixed degrees.
    pub fn new(element: Element) -> Result<IdentityExpr, AlgebraError> {
        match element.multidegree() {
            Grading::Homogeneous(d) => Ok(IdentityExpr {
                element,
                multiplicities: d,
            }),
            Grading::Zero => {
                let len = element.alphabet().len();
                Ok(IdentityExpr {
                    element,
                    multiplicities: MultiDegree::zero(len),
                })
            }
            Grading::Mixed => Err(AlgebraError::MixedDegree),
        }
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn multiplicities(&self) -> &MultiDegree {
        &self.multiplicities
    }

    pub fn is_multilinear(&self) -> bool {
        self.multiplicities.0.iter().all(|&c| c <= 1)
    }

    pub fn total_degree(&self) -> u32 {
        self.multiplicities.total()
    }
}

/// Positions (in left-to-right leaf order) where `a` occurs.
fn occurrences(leaves: &[Variable], a: Variable) -> Vec<usize> {
    leaves
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v == a).then_some(i))
        .collect()
}

/// Δ_a^i(b) with a fresh variable replacement: the sum over all ways of
/// replacing exactly `i` occurrences of `a` by `b`.
pub fn delta(
    e: &Element,
    a: Variable,
    i: u32,
    b: Variable,
) -> Result<Element, AlgebraError> {
    let alphabet = e.alphabet();
    for (m, _) in e.terms() {
        if m.multidegree(alphabet).get(b) != 0 {
            return Err(AlgebraError::NotFresh(alphabet.name(b).to_string()));
        }
    }
    delta_subst(e, a, i, &Element::variable(alphabet, b))
}

/// Δ_a^i(r) with an arbitrary element replacement (used with compound
/// replacements such as Δ_y^{2m}(z) or Δ_z^2(zx); no freshness demanded).
pub fn delta_subst(
    e: &Element,
    a: Variable,
    i: u32,
    replacement: &Element,
) -> Result<Element, AlgebraError> {
    let alphabet = e.alphabet().clone();
    assert_eq!(
        alphabet,
        *replacement.alphabet(),
        "replacement over a different alphabet"
    );
    let mut out = Element::zero(&alphabet);
    for (m, c) in e.terms() {
        let leaves = m.leaves();
        let occ = occurrences(&leaves, a);
        if (occ.len() as u32) < i {
            return Err(AlgebraError::DegreeShort {
                var: alphabet.name(a).to_string(),
                monomial: m.format(&alphabet),
                found: occ.len() as u32,
                needed: i,
            });
        }
        let raw = m.to_raw();
        for subset in subsets(&occ, i as usize) {
            let term = substitute_marked(&alphabet, &raw, &subset, replacement);
            out = out.add(&term.scale(c));
        }
    }
    Ok(out)
}

/// Replace the leaves at the marked positions by `replacement`,
/// expanding multilinearly; all other leaves stay.
fn substitute_marked(
    alphabet: &Alphabet,
    raw: &RawTree,
    marked: &[usize],
    replacement: &Element,
) -> Element {
    fn rec(
        alphabet: &Alphabet,
        raw: &RawTree,
        marked: &[usize],
        replacement: &Element,
        pos: &mut usize,
    ) -> Element {
        match raw {
            RawTree::Leaf(v) => {
                let here = *pos;
                *pos += 1;
                if marked.contains(&here) {
                    replacement.clone()
                } else {
                    Element::variable(alphabet, *v)
                }
            }
            RawTree::Node(l, r) => {
                let le = rec(alphabet, l, marked, replacement, pos);
                let re = rec(alphabet, r, marked, replacement, pos);
                le.mul(&re)
            }
        }
    }
    let mut pos = 0;
    rec(alphabet, raw, marked, replacement, &mut pos)
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// Full multilinearization: one multilinear identity per homogeneous
/// component, over an expanded alphabet where a variable of degree d is
/// split into clones `v#1..v#d` (degree-1 variables keep their name).
///
/// Setting all clones of `v` back to `v` recovers the component times
/// the product of the multiplicity factorials.
pub fn multilinearize(id: &IdentityExpr) -> Vec<IdentityExpr> {
    id.element()
        .components()
        .into_values()
        .map(|component| polarize_component(&component))
        .collect()
}

fn polarize_component(e: &Element) -> IdentityExpr {
    let alphabet = e.alphabet();
    let degrees = match e.multidegree() {
        Grading::Homogeneous(d) => d,
        _ => unreachable!("components are homogeneous"),
    };

    // expanded alphabet: clones in (variable, clone index) order
    let mut names: Vec<String> = Vec::new();
    // clone_ids[v] = variable indices of the clones of v in the new alphabet
    let mut clone_names: Vec<Vec<String>> = Vec::new();
    for v in alphabet.variables() {
        let d = degrees.get(v);
        let name = alphabet.name(v);
        let mut mine = Vec::new();
        match d {
            0 => {}
            1 => {
                mine.push(name.to_string());
                names.push(name.to_string());
            }
            _ => {
                for i in 1..=d {
                    let n = format!("{name}#{i}");
                    mine.push(n.clone());
                    names.push(n);
                }
            }
        }
        clone_names.push(mine);
    }
    if names.is_empty() {
        // zero element: nothing to polarize
        let out = Alphabet::new(["v1"]);
        return IdentityExpr::new(Element::zero(&out)).unwrap();
    }
    let out_alphabet = Alphabet::new(names);
    let clone_vars: Vec<Vec<Variable>> = clone_names
        .iter()
        .map(|ns| {
            ns.iter()
                .map(|n| out_alphabet.lookup(n).unwrap())
                .collect()
        })
        .collect();

    let mut acc = Element::zero(&out_alphabet);
    for (m, c) in e.terms() {
        let leaves = m.leaves();
        let raw = m.to_raw();
        // per variable, positions of its occurrences
        let occ: Vec<Vec<usize>> = alphabet
            .variables()
            .map(|v| occurrences(&leaves, v))
            .collect();
        // iterate over the product of permutations, assigning clone t to
        // occurrence sigma(t)
        let mut assignment: Vec<Variable> = leaves
            .iter()
            .map(|_| Variable(u16::MAX)) // overwritten below
            .collect();
        let var_indices: Vec<usize> = (0..alphabet.len()).collect();
        fn rec(
            var_indices: &[usize],
            vi: usize,
            occ: &[Vec<usize>],
            clone_vars: &[Vec<Variable>],
            assignment: &mut Vec<Variable>,
            raw: &RawTree,
            coeff: &BigRational,
            out_alphabet: &Alphabet,
            acc: &mut Element,
        ) {
            if vi == var_indices.len() {
                let mut pos = 0usize;
                let relabeled = raw.map_leaves(&mut |_| {
                    let t = RawTree::Leaf(assignment[pos]);
                    pos += 1;
                    t
                });
                *acc = acc.add(&Element::from_raw(out_alphabet, &relabeled, coeff.clone()));
                return;
            }
            let v = var_indices[vi];
            let positions = &occ[v];
            if positions.is_empty() {
                rec(
                    var_indices, vi + 1, occ, clone_vars, assignment, raw, coeff, out_alphabet,
                    acc,
                );
                return;
            }
            permutations(positions.len(), &mut |perm| {
                for (t, &p) in perm.iter().enumerate() {
                    assignment[positions[p]] = clone_vars[v][t];
                }
                rec(
                    var_indices, vi + 1, occ, clone_vars, assignment, raw, coeff, out_alphabet,
                    acc,
                );
            });
        }
        rec(
            &var_indices,
            0,
            &occ,
            &clone_vars,
            &mut assignment,
            &raw,
            c,
            &out_alphabet,
            &mut acc,
        );
    }
    IdentityExpr::new(acc).expect("polarization output is multilinear")
}

fn permutations(n: usize, f: &mut impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..n).collect();
    fn heap(k: usize, idx: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            f(idx);
            return;
        }
        for i in 0..k {
            heap(k - 1, idx, f);
            if k % 2 == 0 {
                idx.swap(i, k - 1);
            } else {
                idx.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut idx, f);
}

/// Evaluate a multilinearized identity back with all clones set to the
/// original variable. Used by tests: the result is the original element
/// times the product of the multiplicity factorials.
pub fn fold_clones(polarized: &Element, original_alphabet: &Alphabet) -> Element {
    let src = polarized.alphabet();
    let map: Vec<Variable> = src
        .names()
        .map(|n| {
            let base = n.split('#').next().unwrap();
            original_alphabet
                .lookup(base)
                .expect("clone name resolves to an original variable")
        })
        .collect();
    polarized.map_variables(original_alphabet, |v| map[v.index()])
}

/// The fully multilinearized Malcev identity
/// J(x,y,xz) - J(x,y,z)x, polarized in x, as an element over the
/// four-letter alphabet `x#1, x#2, y, z`.
pub fn malcev_multilinear() -> IdentityExpr {
    let al = Alphabet::xyz();
    let x = Element::gen(&al, "x").unwrap();
    let y = Element::gen(&al, "y").unwrap();
    let z = Element::gen(&al, "z").unwrap();
    let lhs = Element::jacobian(&x, &y, &x.mul(&z));
    let rhs = Element::jacobian(&x, &y, &z).mul(&x);
    let id = IdentityExpr::new(lhs.sub(&rhs)).unwrap();
    let mut parts = multilinearize(&id);
    assert_eq!(parts.len(), 1);
    parts.pop().unwrap()
}
