//! Membership of multilinear identities in the T-ideal generated by the
//! Malcev identity, decided degree by degree with exact linear algebra,
//! with replayable certificates.
//!
//! The degree-n component of the T-ideal is spanned by instances of the
//! multilinearized generator: substitute multilinear monomials over
//! four disjoint variable blocks, then embed the result as a marked
//! leaf inside every multilinear monomial pattern on the remaining
//! variables.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::One;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::alphabet::{Alphabet, MultiDegree, Variable};
use crate::element::Element;
use crate::enumerate::monomials_of;
use crate::error::AlgebraError;
use crate::linalg::{Echelon, IntRow};
use crate::linearize::{malcev_multilinear, IdentityExpr};
use crate::monomial::Mono;

/// The ambient space of multilinear elements of degree n over v1..vn.
pub struct MultilinearSpace {
    pub n: usize,
    pub alphabet: Alphabet,
    pub basis: Vec<Mono>,
    index: FxHashMap<Mono, u32>,
}

impl MultilinearSpace {
    pub fn new(n: usize) -> MultilinearSpace {
        let alphabet = Alphabet::abstract_vars(n);
        let basis = monomials_of(&alphabet, &MultiDegree(vec![1; n]));
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, i as u32))
            .collect();
        MultilinearSpace {
            n,
            alphabet,
            basis,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinate row of a multilinear element, together with the
    /// content factor: element = scale * row.
    pub fn row_of(&self, e: &Element) -> (IntRow, BigRational) {
        let entries = e.terms().map(|(m, c)| {
            let col = *self
                .index
                .get(&m)
                .expect("monomial lies in the multilinear space");
            (col, c.clone())
        });
        IntRow::from_rational_with_scale(entries)
    }
}

/// A pattern: a multilinear monomial over the unused variables with one
/// marked leaf where a generator instance is grafted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTree {
    Star,
    Leaf(Variable),
    Node(Box<PatternTree>, Box<PatternTree>),
}

impl PatternTree {
    fn realize(&self, alphabet: &Alphabet, instance: &Element) -> Element {
        match self {
            PatternTree::Star => instance.clone(),
            PatternTree::Leaf(v) => Element::variable(alphabet, *v),
            PatternTree::Node(l, r) => l
                .realize(alphabet, instance)
                .mul(&r.realize(alphabet, instance)),
        }
    }
}

/// One substitution instance of the multilinearized Malcev identity:
/// the four block monomials plus an optional embedding pattern.
#[derive(Debug, Clone)]
pub struct GeneratorInstance {
    pub substitutions: [Mono; 4],
    pub pattern: Option<PatternTree>,
}

impl GeneratorInstance {
    /// Replay the instance through the term algebra.
    pub fn realize(&self, space_alphabet: &Alphabet) -> Element {
        let gen = malcev_generator();
        let subs: Vec<Element> = self
            .substitutions
            .iter()
            .map(|&m| Element::from_mono(space_alphabet, m, BigRational::one()))
            .collect();
        let inst = gen.element().substitute(space_alphabet, &|u: Variable| {
            subs[u.index()].clone()
        });
        match &self.pattern {
            None => inst,
            Some(p) => p.realize(space_alphabet, &inst),
        }
    }
}

fn malcev_generator() -> &'static IdentityExpr {
    static GEN: std::sync::LazyLock<IdentityExpr> = std::sync::LazyLock::new(malcev_multilinear);
    &GEN
}

/// A certificate: the target as an exact combination of generator
/// instances.
#[derive(Debug, Clone)]
pub struct ConsequenceCertificate {
    pub n: usize,
    pub terms: Vec<(GeneratorInstance, BigRational)>,
}

impl ConsequenceCertificate {
    /// Rebuild the combination through the term algebra; equals the
    /// target exactly when the certificate is valid.
    pub fn replay(&self) -> Element {
        let alphabet = Alphabet::abstract_vars(self.n);
        let mut acc = Element::zero(&alphabet);
        for (inst, c) in &self.terms {
            acc = acc.add(&inst.realize(&alphabet).scale(c));
        }
        acc
    }
}

struct DegreeSpace {
    space: MultilinearSpace,
    echelon: Echelon,
    instances: Vec<GeneratorInstance>,
    scales: Vec<BigRational>,
    tracked: bool,
    spanning_count: usize,
}

/// Decides consequence-of-Malcev for multilinear identities, caching
/// one eliminated spanning set per degree.
pub struct VarietyChecker {
    degree_cap: u32,
    certificate_cap: u32,
    spaces: Mutex<BTreeMap<usize, Arc<DegreeSpace>>>,
}

impl Default for VarietyChecker {
    fn default() -> Self {
        VarietyChecker::new(7, 5)
    }
}

impl VarietyChecker {
    /// `degree_cap`: largest multilinear degree to decide (dimension
    /// (2n-3)!! grows fast). `certificate_cap`: largest degree at which
    /// combination tracking is kept for certificates.
    pub fn new(degree_cap: u32, certificate_cap: u32) -> VarietyChecker {
        VarietyChecker {
            degree_cap,
            certificate_cap,
            spaces: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    fn degree_space(&self, n: usize) -> Arc<DegreeSpace> {
        let mut guard = self.spaces.lock().unwrap();
        if let Some(s) = guard.get(&n) {
            return s.clone();
        }
        let tracked = n as u32 <= self.certificate_cap;
        let space = Arc::new(build_degree_space(n, tracked));
        guard.insert(n, space.clone());
        space
    }

    /// Size and rank of the spanning set at degree n (diagnostics).
    pub fn consequence_space_stats(&self, n: usize) -> (usize, usize, usize) {
        if n < 4 {
            return (0, 0, MultilinearSpace::new(n).dim());
        }
        let s = self.degree_space(n);
        (s.spanning_count, s.echelon.rank(), s.space.dim())
    }

    /// The spanning set of the degree-n component of the T-ideal, as
    /// elements (diagnostics and tests).
    pub fn consequence_space(&self, n: usize) -> Vec<Element> {
        if n < 4 {
            return Vec::new();
        }
        let s = self.degree_space(n);
        s.instances
            .iter()
            .map(|inst| inst.realize(&s.space.alphabet))
            .collect()
    }

    /// Is the (multilinear, moved-to-one-side) identity a consequence of
    /// the Malcev identity? With a certificate when tracking covers the
    /// degree.
    pub fn is_consequence(
        &self,
        target: &IdentityExpr,
    ) -> Result<(bool, Option<ConsequenceCertificate>), AlgebraError> {
        if !target.is_multilinear() {
            return Err(AlgebraError::NotMultilinear);
        }
        if target.element().is_zero() {
            return Ok((
                true,
                Some(ConsequenceCertificate {
                    n: 1,
                    terms: Vec::new(),
                }),
            ));
        }
        let n = target.total_degree() as usize;
        if n < 4 {
            // the generator has degree 4; below it only anticommutative
            // collapse (already canonical) can make something zero
            return Ok((false, None));
        }
        if n as u32 > self.degree_cap {
            return Err(AlgebraError::DegreeCap {
                degree: n as u32,
                cap: self.degree_cap,
            });
        }
        let ds = self.degree_space(n);
        // rename the target onto v1..vn positionally
        let src = target.element().alphabet().clone();
        let renamed = target.element().map_variables(&ds.space.alphabet, |v| {
            debug_assert!(src.len() == n);
            Variable::from_index(v.index())
        });
        let (row, scale) = ds.space.row_of(&renamed);
        match ds.echelon.member(row) {
            None => Ok((false, None)),
            Some(comb) if ds.tracked => {
                let terms = comb
                    .into_iter()
                    .map(|(j, c)| {
                        (
                            ds.instances[j as usize].clone(),
                            &scale * c / &ds.scales[j as usize],
                        )
                    })
                    .collect();
                Ok((true, Some(ConsequenceCertificate { n, terms })))
            }
            Some(_) => Ok((true, None)),
        }
    }
}

fn build_degree_space(n: usize, tracked: bool) -> DegreeSpace {
    let space = MultilinearSpace::new(n);
    let gen = malcev_generator();
    debug_assert_eq!(gen.total_degree(), 4);

    // enumerate instances: ordered partitions of a subset into four
    // nonempty blocks, block monomials, embedding patterns
    let mut raw_instances: Vec<GeneratorInstance> = Vec::new();
    let vars: Vec<Variable> = space.alphabet.variables().collect();
    for used_mask in subsets_of_size_at_least(n, 4) {
        let used: Vec<Variable> = (0..n)
            .filter(|i| used_mask & (1 << i) != 0)
            .map(|i| vars[i])
            .collect();
        let rest: Vec<Variable> = (0..n)
            .filter(|i| used_mask & (1 << i) == 0)
            .map(|i| vars[i])
            .collect();
        let patterns = patterns_over(&rest);
        for blocks in ordered_partitions_into_4(&used) {
            let choices: Vec<Vec<Mono>> = blocks
                .iter()
                .map(|b| multilinear_monos_on(&space.alphabet, b))
                .collect();
            for w0 in &choices[0] {
                for w1 in &choices[1] {
                    for w2 in &choices[2] {
                        for w3 in &choices[3] {
                            for p in &patterns {
                                raw_instances.push(GeneratorInstance {
                                    substitutions: [*w0, *w1, *w2, *w3],
                                    pattern: p.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    // realize, deduplicate by normalized coordinate row, eliminate
    let realized: Vec<(IntRow, BigRational)> = raw_instances
        .par_iter()
        .map(|inst| {
            let e = inst.realize(&space.alphabet);
            space.row_of(&e)
        })
        .collect();
    let mut echelon = Echelon::new(tracked);
    let mut instances = Vec::new();
    let mut scales = Vec::new();
    let mut seen: FxHashSet<Vec<(u32, String)>> = FxHashSet::default();
    let mut spanning_count = 0usize;
    for (inst, (row, scale)) in raw_instances.into_iter().zip(realized) {
        if row.is_empty() {
            continue;
        }
        spanning_count += 1;
        let key: Vec<(u32, String)> = row
            .cols()
            .iter()
            .map(|&c| (c, row.coeff_at(c).unwrap().to_string()))
            .collect();
        if !seen.insert(key) {
            continue;
        }
        // membership combinations refer to insertion order
        instances.push(inst);
        scales.push(scale);
        echelon.insert(row);
    }
    DegreeSpace {
        space,
        echelon,
        instances,
        scales,
        tracked,
        spanning_count,
    }
}

fn subsets_of_size_at_least(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize >= k)
        .collect()
}

/// Ordered partitions of `used` into four nonempty blocks, each block
/// sorted; enumeration order is deterministic.
fn ordered_partitions_into_4(used: &[Variable]) -> Vec<[Vec<Variable>; 4]> {
    let mut out = Vec::new();
    let mut assign = vec![0usize; used.len()];
    fn rec(
        used: &[Variable],
        i: usize,
        assign: &mut Vec<usize>,
        out: &mut Vec<[Vec<Variable>; 4]>,
    ) {
        if i == used.len() {
            let mut blocks: [Vec<Variable>; 4] = Default::default();
            for (j, &b) in assign.iter().enumerate() {
                blocks[b].push(used[j]);
            }
            if blocks.iter().all(|b| !b.is_empty()) {
                out.push(blocks);
            }
            return;
        }
        for b in 0..4 {
            assign[i] = b;
            rec(used, i + 1, assign, out);
        }
    }
    rec(used, 0, &mut assign, &mut out);
    out
}

/// Canonical multilinear monomials whose leaves are exactly `vars`.
fn multilinear_monos_on(alphabet: &Alphabet, vars: &[Variable]) -> Vec<Mono> {
    // use a scratch alphabet of the right size, then map leaves back
    let scratch = Alphabet::abstract_vars(vars.len());
    let monos = monomials_of(&scratch, &MultiDegree(vec![1; vars.len()]));
    monos
        .into_iter()
        .map(|m| {
            let e = Element::from_mono(&scratch, m, BigRational::one()).map_variables(
                alphabet,
                |v| vars[v.index()],
            );
            let mut it = e.terms();
            let (mono, _c) = it.next().expect("renaming a monomial stays a monomial");
            mono
        })
        .collect()
}

/// Multilinear patterns over `rest` plus the marked leaf. With no
/// remaining variables the only pattern is the bare star (`None`).
fn patterns_over(rest: &[Variable]) -> Vec<Option<PatternTree>> {
    if rest.is_empty() {
        return vec![None];
    }
    let r = rest.len();
    let scratch = Alphabet::abstract_vars(r + 1);
    let monos = monomials_of(&scratch, &MultiDegree(vec![1; r + 1]));
    monos
        .into_iter()
        .map(|m| Some(pattern_of(m, rest, r)))
        .collect()
}

fn pattern_of(m: Mono, rest: &[Variable], star_index: usize) -> PatternTree {
    match m.children() {
        None => {
            let v = m.leaf_var().unwrap();
            if v.index() == star_index {
                PatternTree::Star
            } else {
                PatternTree::Leaf(rest[v.index()])
            }
        }
        Some((l, r)) => PatternTree::Node(
            Box::new(pattern_of(l, rest, star_index)),
            Box::new(pattern_of(r, rest, star_index)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{int, rat};
    use crate::linearize::multilinearize;

    fn abcd() -> (Alphabet, Element, Element, Element, Element) {
        let al = Alphabet::new(["a", "b", "c", "d"]);
        (
            al.clone(),
            Element::gen(&al, "a").unwrap(),
            Element::gen(&al, "b").unwrap(),
            Element::gen(&al, "c").unwrap(),
            Element::gen(&al, "d").unwrap(),
        )
    }

    fn checker() -> VarietyChecker {
        VarietyChecker::new(6, 5)
    }

    #[test]
    fn degree_three_space_is_empty() {
        let ck = checker();
        assert_eq!(ck.consequence_space(3).len(), 0);
    }

    #[test]
    fn jacobi_is_not_a_consequence() {
        let ck = checker();
        let al = Alphabet::abstract_vars(3);
        let a = Element::gen(&al, "v1").unwrap();
        let b = Element::gen(&al, "v2").unwrap();
        let c = Element::gen(&al, "v3").unwrap();
        let jac = IdentityExpr::new(Element::jacobian(&a, &b, &c)).unwrap();
        let (ok, cert) = ck.is_consequence(&jac).unwrap();
        assert!(!ok);
        assert!(cert.is_none());
    }

    #[test]
    fn degree_four_span_is_proper_and_nontrivial() {
        let ck = checker();
        let (count, rank, dim) = ck.consequence_space_stats(4);
        assert_eq!(dim, 15);
        assert!(count > 0);
        assert!(rank > 0 && rank < 15, "rank {rank}");
    }

    #[test]
    fn generator_itself_is_member() {
        let ck = checker();
        let gen = malcev_multilinear();
        let (ok, cert) = ck.is_consequence(&gen).unwrap();
        assert!(ok);
        let cert = cert.expect("tracked at degree 4");
        assert_eq!(cert.replay(), {
            let al = Alphabet::abstract_vars(4);
            gen.element().map_variables(&al, |v| v)
        });
    }

    #[test]
    fn eq1_is_a_consequence_with_replayable_certificate() {
        // (ab)(cd) = acbd + dacb + bdac + cbda
        let (_, a, b, c, d) = abcd();
        let lhs = a.mul(&b).mul(&c.mul(&d));
        let rhs = a
            .mul(&c)
            .mul(&b)
            .mul(&d)
            .add(&d.mul(&a).mul(&c).mul(&b))
            .add(&b.mul(&d).mul(&a).mul(&c))
            .add(&c.mul(&b).mul(&d).mul(&a));
        let target = IdentityExpr::new(lhs.sub(&rhs)).unwrap();
        let ck = checker();
        let (ok, cert) = ck.is_consequence(&target).unwrap();
        assert!(ok, "identity (1) must be a Malcev consequence");
        let cert = cert.expect("certificate at degree 4");
        let al = Alphabet::abstract_vars(4);
        let expected = target.element().map_variables(&al, |v| v);
        assert_eq!(cert.replay(), expected, "certificate replays exactly");
    }

    #[test]
    fn eq2_is_a_consequence() {
        // 3J(wa,b,c) = J(a,b,c)w - J(b,c,w)a - 2J(c,w,a)b + 2J(w,a,b)c
        let al = Alphabet::new(["w", "a", "b", "c"]);
        let w = Element::gen(&al, "w").unwrap();
        let a = Element::gen(&al, "a").unwrap();
        let b = Element::gen(&al, "b").unwrap();
        let c = Element::gen(&al, "c").unwrap();
        let lhs = Element::jacobian(&w.mul(&a), &b, &c).scale(&int(3));
        let rhs = Element::jacobian(&a, &b, &c)
            .mul(&w)
            .sub(&Element::jacobian(&b, &c, &w).mul(&a))
            .sub(&Element::jacobian(&c, &w, &a).mul(&b).scale(&int(2)))
            .add(&Element::jacobian(&w, &a, &b).mul(&c).scale(&int(2)));
        let target = IdentityExpr::new(lhs.sub(&rhs)).unwrap();
        let ck = checker();
        let (ok, cert) = ck.is_consequence(&target).unwrap();
        assert!(ok, "identity (2) must be a Malcev consequence");
        let cert = cert.unwrap();
        let vspace = Alphabet::abstract_vars(4);
        assert_eq!(cert.replay(), target.element().map_variables(&vspace, |v| v));
    }

    #[test]
    fn monotone_under_right_multiplication() {
        // a consequence at degree 4 stays one after multiplying by a
        // fresh variable
        let (_, a, b, c, d) = abcd();
        let lhs = a.mul(&b).mul(&c.mul(&d));
        let rhs = a
            .mul(&c)
            .mul(&b)
            .mul(&d)
            .add(&d.mul(&a).mul(&c).mul(&b))
            .add(&b.mul(&d).mul(&a).mul(&c))
            .add(&c.mul(&b).mul(&d).mul(&a));
        let diff = lhs.sub(&rhs);
        let al5 = Alphabet::new(["a", "b", "c", "d", "e"]);
        let lifted = diff.map_variables(&al5, |v| v);
        let e5 = Element::gen(&al5, "e").unwrap();
        let target = IdentityExpr::new(lifted.mul(&e5)).unwrap();
        let ck = checker();
        let (ok, _) = ck.is_consequence(&target).unwrap();
        assert!(ok);
    }

    #[test]
    fn eq5_after_multilinearization_is_a_consequence() {
        // J(J(a,b,c),a,b) = 3(ab)J(a,b,c), degrees a:2 b:2 c:1
        let al = Alphabet::new(["a", "b", "c"]);
        let a = Element::gen(&al, "a").unwrap();
        let b = Element::gen(&al, "b").unwrap();
        let c = Element::gen(&al, "c").unwrap();
        let j = Element::jacobian(&a, &b, &c);
        let lhs = Element::jacobian(&j, &a, &b);
        let rhs = a.mul(&b).mul(&j).scale(&rat(3, 1));
        let id = IdentityExpr::new(lhs.sub(&rhs)).unwrap();
        let ck = checker();
        for part in multilinearize(&id) {
            let (ok, _) = ck.is_consequence(&part).unwrap();
            assert!(ok, "each multilinear component of (5) is a consequence");
        }
    }

    #[test]
    fn degree_cap_is_reported() {
        let ck = VarietyChecker::new(4, 4);
        let al = Alphabet::abstract_vars(5);
        let vars: Vec<Element> = (1..=5)
            .map(|i| Element::gen(&al, &format!("v{i}")).unwrap())
            .collect();
        let e = vars[0]
            .mul(&vars[1])
            .mul(&vars[2])
            .mul(&vars[3])
            .mul(&vars[4]);
        let target = IdentityExpr::new(e).unwrap();
        assert!(matches!(
            ck.is_consequence(&target),
            Err(AlgebraError::DegreeCap { .. })
        ));
    }

    #[test]
    fn mixed_degree_is_rejected() {
        let (_, a, b, c, _) = abcd();
        let e = a.mul(&b).add(&Element::jacobian(&a, &b, &c));
        assert!(IdentityExpr::new(e).is_err());
    }
}
