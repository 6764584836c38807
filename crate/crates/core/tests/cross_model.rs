//! Cross-model soundness: identities certified by the T-ideal checker
//! must vanish in both projections of the subdirect model under random
//! substitutions, and operator reorderings predicted harmless by the
//! operator relations stay harmless in the model.

use num_rational::BigRational;

use malcev_core::alphabet::Alphabet;
use malcev_core::basis::{enumerate, realize, BasisDescriptor, Tail};
use malcev_core::element::{int, Element};
use malcev_core::enumerate::multidegrees_of_total;
use malcev_core::linearize::IdentityExpr;
use malcev_core::m7::SplitMix64;
use malcev_core::monomial::RawTree;
use malcev_core::subdirect::zero_in_m;
use malcev_core::variety::VarietyChecker;

fn random_element(rng: &mut SplitMix64, al: &Alphabet, max_degree: u32) -> Element {
    let vars: Vec<_> = al.variables().collect();
    let mut e = Element::zero(al);
    for _ in 0..=(rng.next_u64() % 2) {
        let degree = 1 + (rng.next_u64() % max_degree as u64) as u32;
        fn build(
            rng: &mut SplitMix64,
            vars: &[malcev_core::Variable],
            degree: u32,
        ) -> RawTree {
            if degree == 1 {
                return RawTree::Leaf(vars[(rng.next_u64() % vars.len() as u64) as usize]);
            }
            let left = 1 + (rng.next_u64() % (degree as u64 - 1)) as u32;
            RawTree::node(build(rng, vars, left), build(rng, vars, degree - left))
        }
        let tree = build(rng, &vars, degree);
        let num = (rng.next_u64() % 5) as i64 - 2;
        e = e.add(&Element::from_raw(al, &tree, BigRational::new(num.into(), 1.into())));
    }
    e
}

#[test]
fn certified_consequences_vanish_in_the_model_under_substitution() {
    // identity (2), certified as a Malcev consequence, evaluated at ten
    // random substitutions of elements over x, y, z
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
    let diff = lhs.sub(&rhs);

    let checker = VarietyChecker::new(4, 4);
    let target = IdentityExpr::new(diff.clone()).unwrap();
    let (ok, _) = checker.is_consequence(&target).unwrap();
    assert!(ok);

    let xyz = Alphabet::xyz();
    let mut rng = SplitMix64(314159);
    for _ in 0..10 {
        let assigns: Vec<Element> = (0..4)
            .map(|_| random_element(&mut rng, &xyz, 2))
            .collect();
        let substituted = diff.substitute(&xyz, &|v| assigns[v.index()].clone());
        assert!(
            zero_in_m(&substituted).unwrap(),
            "certified consequence must vanish in the model"
        );
    }
}

#[test]
fn jacobi_counterexample_survives_substitution_search() {
    // Jacobi is not a consequence; the octonion projection exhibits a
    // nonzero value at the generators
    let al = Alphabet::xyz();
    let x = Element::gen(&al, "x").unwrap();
    let y = Element::gen(&al, "y").unwrap();
    let z = Element::gen(&al, "z").unwrap();
    assert!(!zero_in_m(&Element::jacobian(&x, &y, &z)).unwrap());
}

#[test]
fn l_operator_reorderings_vanish_in_the_model() {
    // permuting the L factors of a realized basis descriptor changes
    // the element by something zero in M
    let mut rng = SplitMix64(2718281828);
    let mut checked = 0;
    'outer: for total in 5..=7u32 {
        for d in multidegrees_of_total(3, total) {
            for desc in enumerate(&d) {
                if checked >= 6 {
                    break 'outer;
                }
                let ops = [desc.lxx, desc.lyy, desc.lzz, desc.lxy, desc.lxz, desc.lyz];
                if desc.g_pow > 0 || ops.iter().sum::<u32>() < 2 {
                    continue;
                }
                let e = realize(&desc).unwrap();
                // a random transposition of two L slots
                let mut order: Vec<usize> =
                    (0..6).filter(|&i| ops[i] > 0).collect();
                if order.len() < 2 {
                    // a repeated slot still exercises the commutation
                    order = vec![order[0], order[0]];
                }
                let i = (rng.next_u64() % order.len() as u64) as usize;
                let j = (rng.next_u64() % order.len() as u64) as usize;
                let permuted = realize_with_order(&desc, order[i], order[j]).unwrap();
                assert!(
                    zero_in_m(&e.sub(&permuted)).unwrap(),
                    "L reordering must be invisible in M for {desc}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 3, "exercised {checked} reorderings");
}

/// realize with the L operators applied in an order that brings slots
/// `first` and `second` to the front.
fn realize_with_order(
    desc: &BasisDescriptor,
    first: usize,
    second: usize,
) -> Result<Element, malcev_core::AlgebraError> {
    let al = Alphabet::xyz();
    let x = Element::gen(&al, "x")?;
    let y = Element::gen(&al, "y")?;
    let z = Element::gen(&al, "z")?;
    let j = Element::jacobian(&x, &y, &z);
    let pairs: [(Element, Element); 6] = [
        (x.clone(), x.clone()),
        (y.clone(), y.clone()),
        (z.clone(), z.clone()),
        (x.clone(), y.clone()),
        (x.clone(), z.clone()),
        (y.clone(), z.clone()),
    ];
    let counts = [desc.lxx, desc.lyy, desc.lzz, desc.lxy, desc.lxz, desc.lyz];
    let mut slots: Vec<usize> = Vec::new();
    for (slot, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            slots.push(slot);
        }
    }
    // bring one occurrence of `first`, then of `second`, to the front
    if let Some(p) = slots.iter().position(|&s| s == first) {
        let s = slots.remove(p);
        slots.insert(0, s);
    }
    if let Some(p) = slots.iter().skip(1).position(|&s| s == second) {
        let s = slots.remove(p + 1);
        slots.insert(1, s);
    }
    let mut e = j;
    for &slot in &slots {
        let (a, b) = &pairs[slot];
        e = e.lop(a, b);
    }
    for l in desc.tail.letters() {
        e = e.mul(&Element::gen(&al, l)?);
    }
    let _ = Tail::ALL;
    Ok(e)
}
