//! Enumeration of canonical monomials by multidegree.
//!
//! Every canonical monomial of multidegree d arises from exactly one
//! unordered pair of canonical factors whose multidegrees sum to d, so
//! the recursion below visits each monomial once. The multilinear count
//! is the double factorial (2n-3)!!.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, MultiDegree, Variable};
use crate::monomial::Mono;

/// All canonical monomials of multidegree `d`, in increasing monomial
/// order.
pub fn monomials_of(alphabet: &Alphabet, d: &MultiDegree) -> Vec<Mono> {
    assert_eq!(d.len(), alphabet.len());
    let mut cache: BTreeMap<MultiDegree, Vec<Mono>> = BTreeMap::new();
    let mut out = gen(d, &mut cache);
    out.sort();
    out
}

fn gen(d: &MultiDegree, cache: &mut BTreeMap<MultiDegree, Vec<Mono>>) -> Vec<Mono> {
    if let Some(v) = cache.get(d) {
        return v.clone();
    }
    let total = d.total();
    let result: Vec<Mono> = if total == 0 {
        Vec::new()
    } else if total == 1 {
        let idx = d.0.iter().position(|&c| c == 1).unwrap();
        vec![Mono::leaf(Variable(idx as u16))]
    } else {
        let mut out = Vec::new();
        for dl in splittings(d) {
            let dr = d.checked_sub(&dl).unwrap();
            // visit each unordered pair of parts once
            match dl.cmp(&dr) {
                std::cmp::Ordering::Greater => continue,
                std::cmp::Ordering::Equal => {
                    let parts = gen(&dl, cache);
                    for (i, &l) in parts.iter().enumerate() {
                        for &r in &parts[i + 1..] {
                            let (m, _) = Mono::prod(l, r).unwrap();
                            out.push(m);
                        }
                    }
                }
                std::cmp::Ordering::Less => {
                    let left = gen(&dl, cache);
                    let right = gen(&dr, cache);
                    for &l in &left {
                        for &r in &right {
                            let (m, _) = Mono::prod(l, r).unwrap();
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    };
    cache.insert(d.clone(), result.clone());
    result
}

/// Nonzero proper sub-multidegrees of `d` (candidates for one factor).
fn splittings(d: &MultiDegree) -> Vec<MultiDegree> {
    let mut out = Vec::new();
    let mut cur = MultiDegree::zero(d.len());
    fn rec(d: &MultiDegree, i: usize, cur: &mut MultiDegree, out: &mut Vec<MultiDegree>) {
        if i == d.len() {
            let t = cur.total();
            if t > 0 && t < d.total() {
                out.push(cur.clone());
            }
            return;
        }
        for c in 0..=d.0[i] {
            cur.0[i] = c;
            rec(d, i + 1, cur, out);
        }
        cur.0[i] = 0;
    }
    rec(d, 0, &mut cur, &mut out);
    out
}

/// Count of canonical monomials of multidegree `d` without materializing
/// them (used as a cross-check in tests).
pub fn count_monomials(d: &MultiDegree) -> u64 {
    fn rec(d: &MultiDegree, cache: &mut BTreeMap<MultiDegree, u64>) -> u64 {
        if let Some(&c) = cache.get(d) {
            return c;
        }
        let total = d.total();
        let result = if total == 0 {
            0
        } else if total == 1 {
            1
        } else {
            let mut sum = 0u64;
            for dl in splittings(d) {
                let dr = d.checked_sub(&dl).unwrap();
                match dl.cmp(&dr) {
                    std::cmp::Ordering::Greater => continue,
                    std::cmp::Ordering::Equal => {
                        let n = rec(&dl, cache);
                        sum += n * (n.saturating_sub(1)) / 2;
                    }
                    std::cmp::Ordering::Less => {
                        sum += rec(&dl, cache) * rec(&dr, cache);
                    }
                }
            }
            sum
        };
        cache.insert(d.clone(), result);
        result
    }
    rec(d, &mut BTreeMap::new())
}

/// All multidegrees over `len` variables with the given total degree, in
/// lexicographic order.
pub fn multidegrees_of_total(len: usize, total: u32) -> Vec<MultiDegree> {
    let mut out = Vec::new();
    let mut cur = MultiDegree::zero(len);
    fn rec(len: usize, i: usize, left: u32, cur: &mut MultiDegree, out: &mut Vec<MultiDegree>) {
        if i == len - 1 {
            cur.0[i] = left;
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur.0[i] = c;
            rec(len, i + 1, left - c, cur, out);
        }
        cur.0[i] = 0;
    }
    if len > 0 {
        rec(len, 0, total, &mut cur, &mut out);
    }
    out
}
