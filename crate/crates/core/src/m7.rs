//! The simple seven-dimensional Malcev algebra m7: imaginary octonions
//! under the commutator, built by Cayley-Dickson doubling of the
//! quaternions, and exact generic-point evaluation over its rank-3
//! relatively free algebra.
//!
//! Generic elements are 7-vectors of multivariate polynomials in the 21
//! indeterminates a1..a7, b1..b7, c1..c7; an element of the free
//! algebra vanishes in the relatively free algebra exactly when its
//! generic evaluation is the zero vector.

use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use rustc_hash::FxHashMap;

use crate::alphabet::Variable;
use crate::element::Element;
use crate::error::AlgebraError;
use crate::monomial::Mono;

/// q_a * q_b over the quaternion basis 1, i, j, k: (sign, index).
fn quat_mul(a: usize, b: usize) -> (i32, usize) {
    const TBL: [[(i32, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (-1, 0), (1, 3), (-1, 2)],
        [(1, 2), (-1, 3), (-1, 0), (1, 1)],
        [(1, 3), (1, 2), (-1, 1), (-1, 0)],
    ];
    TBL[a][b]
}

fn conj_sign(i: usize) -> i32 {
    if i == 0 {
        1
    } else {
        -1
    }
}

/// e_a * e_b over the octonion basis e0..e7, with the doubling
/// (u,v)(w,t) = (uw - conj(t) v, t u + v conj(w)).
fn oct_mul(a: usize, b: usize) -> (i32, usize) {
    match (a < 4, b < 4) {
        (true, true) => quat_mul(a, b),
        (true, false) => {
            let (s, i) = quat_mul(b - 4, a);
            (s, i + 4)
        }
        (false, true) => {
            let (s, i) = quat_mul(a - 4, b);
            (s * conj_sign(b), i + 4)
        }
        (false, false) => {
            let (s, i) = quat_mul(b - 4, a - 4);
            (-s * conj_sign(b - 4), i)
        }
    }
}

/// Structure constants of m7: e_i * e_j = sum_k c[i][j][k] e_k over the
/// imaginary units e1..e7 (indices 0..6), with * the octonion
/// commutator.
pub struct StructureTable {
    c: [[[i64; 7]; 7]; 7],
    /// per output coordinate k: the nonzero (i, j, c[i][j][k])
    by_output: [Vec<(usize, usize, i64)>; 7],
}

impl StructureTable {
    fn build_unchecked() -> StructureTable {
        let mut c = [[[0i64; 7]; 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                if i == j {
                    continue;
                }
                // [e_{i+1}, e_{j+1}] = 2 e_{i+1} e_{j+1} for distinct
                // imaginary units (they anticommute)
                let (s, idx) = oct_mul(i + 1, j + 1);
                assert!(idx >= 1, "commutator of imaginary units is imaginary");
                c[i][j][idx - 1] = 2 * s as i64;
            }
        }
        let by_output = std::array::from_fn(|k| {
            let mut v = Vec::new();
            for i in 0..7 {
                for j in 0..7 {
                    if c[i][j][k] != 0 {
                        v.push((i, j, c[i][j][k]));
                    }
                }
            }
            v
        });
        StructureTable { c, by_output }
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> i64 {
        self.c[i][j][k]
    }

    /// Bilinear product of integer coordinate vectors.
    pub fn mul_vec(&self, a: &[i64; 7], b: &[i64; 7]) -> [i64; 7] {
        let mut out = [0i64; 7];
        for (k, entries) in self.by_output.iter().enumerate() {
            for &(i, j, c) in entries {
                out[k] += c * a[i] * b[j];
            }
        }
        out
    }

    pub fn mul_vec_big(&self, a: &[BigInt; 7], b: &[BigInt; 7]) -> [BigInt; 7] {
        let mut out: [BigInt; 7] = std::array::from_fn(|_| BigInt::zero());
        for (k, entries) in self.by_output.iter().enumerate() {
            for &(i, j, c) in entries {
                out[k] += c * &a[i] * &b[j];
            }
        }
        out
    }

    fn jac_vec(&self, a: &[i64; 7], b: &[i64; 7], c: &[i64; 7]) -> [i64; 7] {
        let ab_c = self.mul_vec(&self.mul_vec(a, b), c);
        let ca_b = self.mul_vec(&self.mul_vec(c, a), b);
        let bc_a = self.mul_vec(&self.mul_vec(b, c), a);
        std::array::from_fn(|k| ab_c[k] + ca_b[k] + bc_a[k])
    }

    /// Exhaustive verification of the table invariants: antisymmetry,
    /// the (linearized) Malcev identity on all 7^4 basis quadruples, and
    /// a non-Lie witness triple.
    pub fn verify(&self) -> Result<(), String> {
        for i in 0..7 {
            for k in 0..7 {
                if self.c[i][i][k] != 0 {
                    return Err(format!("c[{i}][{i}][{k}] nonzero"));
                }
                for j in 0..7 {
                    if self.c[i][j][k] != -self.c[j][i][k] {
                        return Err(format!("antisymmetry fails at ({i},{j},{k})"));
                    }
                }
            }
        }
        let basis: Vec<[i64; 7]> = (0..7)
            .map(|i| std::array::from_fn(|k| (k == i) as i64))
            .collect();
        // linearized Malcev identity:
        // J(a,c,b*d) + J(b,c,a*d) = J(a,c,d)*b + J(b,c,d)*a
        for a in 0..7 {
            for b in 0..7 {
                for c in 0..7 {
                    for d in 0..7 {
                        let lhs1 = self.jac_vec(
                            &basis[a],
                            &basis[c],
                            &self.mul_vec(&basis[b], &basis[d]),
                        );
                        let lhs2 = self.jac_vec(
                            &basis[b],
                            &basis[c],
                            &self.mul_vec(&basis[a], &basis[d]),
                        );
                        let rhs1 =
                            self.mul_vec(&self.jac_vec(&basis[a], &basis[c], &basis[d]), &basis[b]);
                        let rhs2 =
                            self.mul_vec(&self.jac_vec(&basis[b], &basis[c], &basis[d]), &basis[a]);
                        for k in 0..7 {
                            if lhs1[k] + lhs2[k] != rhs1[k] + rhs2[k] {
                                return Err(format!(
                                    "Malcev identity fails at quadruple ({a},{b},{c},{d})"
                                ));
                            }
                        }
                    }
                }
            }
        }
        // non-Lie witness
        let witness = (0..7).any(|i| {
            (0..7).any(|j| {
                (0..7).any(|k| {
                    self.jac_vec(&basis[i], &basis[j], &basis[k])
                        .iter()
                        .any(|&v| v != 0)
                })
            })
        });
        if !witness {
            return Err("no basis triple has a nonzero Jacobian".into());
        }
        Ok(())
    }

    /// A basis triple with nonzero Jacobian (exhaustive search).
    pub fn jacobi_witness(&self) -> Option<(usize, usize, usize)> {
        let basis: Vec<[i64; 7]> = (0..7)
            .map(|i| std::array::from_fn(|k| (k == i) as i64))
            .collect();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    if self
                        .jac_vec(&basis[i], &basis[j], &basis[k])
                        .iter()
                        .any(|&v| v != 0)
                    {
                        return Some((i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        None
    }
}

/// Build and verify the structure table. Deterministic; any invariant
/// violation is a construction bug and panics.
pub fn build_table() -> &'static StructureTable {
    static TABLE: LazyLock<StructureTable> = LazyLock::new(|| {
        let t = StructureTable::build_unchecked();
        if let Err(e) = t.verify() {
            panic!("structure table invariant violated: {e}");
        }
        t
    });
    &TABLE
}

/// Number of indeterminates: a1..a7, b1..b7, c1..c7.
pub const NUM_VARS: usize = 21;

/// Exponent vector packed four bits per indeterminate.
pub type ExpKey = u128;

pub fn exp_of_var(v: usize) -> ExpKey {
    debug_assert!(v < NUM_VARS);
    1u128 << (4 * v)
}

pub fn exponent(key: ExpKey, v: usize) -> u32 {
    ((key >> (4 * v)) & 0xf) as u32
}

/// Sparse multivariate polynomial with integer coefficients over the
/// 21 indeterminates; terms sorted by packed exponent key.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OctPoly {
    terms: Vec<(ExpKey, i128)>,
}

impl OctPoly {
    pub fn zero() -> OctPoly {
        OctPoly::default()
    }

    pub fn var(v: usize) -> OctPoly {
        OctPoly {
            terms: vec![(exp_of_var(v), 1)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(ExpKey, i128)] {
        &self.terms
    }

    fn from_map(map: FxHashMap<ExpKey, i128>) -> OctPoly {
        let mut terms: Vec<(ExpKey, i128)> = map.into_iter().filter(|&(_, c)| c != 0).collect();
        terms.sort_unstable_by_key(|&(k, _)| k);
        OctPoly { terms }
    }

    pub fn add_scaled(&self, other: &OctPoly, w: i128) -> OctPoly {
        if w == 0 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ka = self.terms.get(i).map(|t| t.0).unwrap_or(u128::MAX);
            let kb = other.terms.get(j).map(|t| t.0).unwrap_or(u128::MAX);
            if ka < kb {
                out.push(self.terms[i]);
                i += 1;
            } else if kb < ka {
                let c = other.terms[j]
                    .1
                    .checked_mul(w)
                    .expect("polynomial coefficient overflow");
                out.push((kb, c));
                j += 1;
            } else {
                let c = self.terms[i]
                    .1
                    .checked_add(
                        other.terms[j]
                            .1
                            .checked_mul(w)
                            .expect("polynomial coefficient overflow"),
                    )
                    .expect("polynomial coefficient overflow");
                if c != 0 {
                    out.push((ka, c));
                }
                i += 1;
                j += 1;
            }
        }
        OctPoly { terms: out }
    }

    pub fn scale(&self, w: i128) -> OctPoly {
        if w == 0 {
            return OctPoly::zero();
        }
        OctPoly {
            terms: self
                .terms
                .iter()
                .map(|&(k, c)| (k, c.checked_mul(w).expect("polynomial coefficient overflow")))
                .collect(),
        }
    }

    pub fn mul(&self, other: &OctPoly) -> OctPoly {
        let mut map: FxHashMap<ExpKey, i128> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * other.terms.len() / 2 + 4, Default::default());
        for &(ka, ca) in &self.terms {
            for &(kb, cb) in &other.terms {
                let key = ka + kb; // no nibble overflow below degree 15
                let c = ca.checked_mul(cb).expect("polynomial coefficient overflow");
                *map.entry(key).or_insert(0) += c;
            }
        }
        OctPoly::from_map(map)
    }

    fn content(&self) -> i128 {
        let mut g: i128 = 0;
        for &(_, c) in &self.terms {
            g = g.gcd(&c);
            if g == 1 {
                break;
            }
        }
        g
    }

    fn div_exact(&mut self, g: i128) {
        if g == 1 {
            return;
        }
        for t in &mut self.terms {
            t.1 /= g;
        }
    }

    /// Evaluate at big-integer values (randomized zero testing).
    pub fn eval_big(&self, values: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for &(k, c) in &self.terms {
            let mut term = BigInt::from(c);
            for (v, val) in values.iter().enumerate() {
                let e = exponent(k, v);
                for _ in 0..e {
                    term *= val;
                }
            }
            acc += term;
        }
        acc
    }
}

/// A generic element of m7 over the polynomial coordinate ring: a
/// rational scale times seven integer-coefficient polynomials.
#[derive(Debug, Clone)]
pub struct M7Element {
    scale: BigRational,
    polys: [OctPoly; 7],
}

impl M7Element {
    pub fn zero() -> M7Element {
        M7Element {
            scale: BigRational::one(),
            polys: std::array::from_fn(|_| OctPoly::zero()),
        }
    }

    /// The generic generator for block `block` (0 = a, 1 = b, 2 = c):
    /// sum_i block_i e_i.
    pub fn generic_generator(block: usize) -> M7Element {
        M7Element {
            scale: BigRational::one(),
            polys: std::array::from_fn(|k| OctPoly::var(7 * block + k)),
        }
    }

    pub fn basis_unit(i: usize) -> M7Element {
        debug_assert!((1..=7).contains(&i));
        let mut polys: [OctPoly; 7] = std::array::from_fn(|_| OctPoly::zero());
        polys[i - 1] = OctPoly {
            terms: vec![(0, 1)],
        };
        M7Element {
            scale: BigRational::one(),
            polys,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.polys.iter().all(OctPoly::is_zero)
    }

    pub fn coordinate(&self, k: usize) -> &OctPoly {
        &self.polys[k]
    }

    pub fn scale_factor(&self) -> &BigRational {
        &self.scale
    }

    fn normalized(mut self) -> M7Element {
        if self.is_zero() {
            self.scale = BigRational::one();
            return self;
        }
        let mut g: i128 = 0;
        for p in &self.polys {
            g = g.gcd(&p.content());
            if g == 1 {
                break;
            }
        }
        if g > 1 {
            for p in &mut self.polys {
                p.div_exact(g);
            }
            self.scale *= BigRational::from_integer(g.into());
        }
        self
    }

    pub fn scaled(&self, q: &BigRational) -> M7Element {
        if q.is_zero() {
            return M7Element::zero();
        }
        M7Element {
            scale: &self.scale * q,
            polys: self.polys.clone(),
        }
    }

    pub fn add(&self, other: &M7Element) -> M7Element {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // write both over a common rational factor g with integer
        // cofactors
        let g = rational_gcd(&self.scale, &other.scale);
        let na = to_i128(&(&self.scale / &g));
        let nb = to_i128(&(&other.scale / &g));
        let polys = std::array::from_fn(|k| {
            self.polys[k].scale(na).add_scaled(&other.polys[k], nb)
        });
        M7Element { scale: g, polys }.normalized()
    }

    pub fn sub(&self, other: &M7Element) -> M7Element {
        self.add(&other.scaled(&-BigRational::one()))
    }
}

fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new(
        a.numer().gcd(b.numer()),
        a.denom().lcm(b.denom()),
    )
}

fn to_i128(q: &BigRational) -> i128 {
    assert!(q.is_integer(), "cofactor must be integral");
    q.numer().to_i128().expect("cofactor exceeds i128")
}

/// Bilinear product through the structure table.
pub fn m7_mul(u: &M7Element, v: &M7Element) -> M7Element {
    let table = build_table();
    let scale = &u.scale * &v.scale;
    let polys: [OctPoly; 7] = std::array::from_fn(|k| {
        let mut map: FxHashMap<ExpKey, i128> = FxHashMap::default();
        for &(i, j, c) in &table.by_output[k] {
            let (pi, pj) = (&u.polys[i], &v.polys[j]);
            if pi.is_zero() || pj.is_zero() {
                continue;
            }
            for &(ka, ca) in &pi.terms {
                for &(kb, cb) in &pj.terms {
                    let coeff = ca
                        .checked_mul(cb)
                        .and_then(|x| x.checked_mul(c as i128))
                        .expect("polynomial coefficient overflow");
                    *map.entry(ka + kb).or_insert(0) += coeff;
                }
            }
        }
        OctPoly::from_map(map)
    });
    M7Element { scale, polys }.normalized()
}

/// Evaluator with a per-instance subtree cache: substitute
/// x -> sum a_i e_i, y -> sum b_i e_i, z -> sum c_i e_i and evaluate
/// every tree product with m7_mul.
pub struct GenericEvaluator {
    cache: RwLock<FxHashMap<Mono, Arc<M7Element>>>,
    vars: [Variable; 3],
}

impl GenericEvaluator {
    pub fn new(e_alphabet: &crate::alphabet::Alphabet) -> Result<GenericEvaluator, AlgebraError> {
        let vars = e_alphabet.xyz_vars()?;
        Ok(GenericEvaluator {
            cache: RwLock::new(FxHashMap::default()),
            vars,
        })
    }

    pub fn eval_mono(&self, m: Mono) -> Arc<M7Element> {
        if let Some(v) = self.cache.read().unwrap().get(&m) {
            return v.clone();
        }
        let val = match m.children() {
            None => {
                let v = m.leaf_var().unwrap();
                let block = self
                    .vars
                    .iter()
                    .position(|&g| g == v)
                    .expect("element over the x,y,z alphabet");
                Arc::new(M7Element::generic_generator(block))
            }
            Some((l, r)) => {
                let le = self.eval_mono(l);
                let re = self.eval_mono(r);
                Arc::new(m7_mul(&le, &re))
            }
        };
        self.cache
            .write()
            .unwrap()
            .entry(m)
            .or_insert(val)
            .clone()
    }

    pub fn eval_element(&self, e: &Element) -> M7Element {
        let mut acc = M7Element::zero();
        for (m, c) in e.terms() {
            acc = acc.add(&self.eval_mono(m).scaled(c));
        }
        acc
    }
}

/// Generic evaluation of an element over {x, y, z}.
pub fn eval_generic(e: &Element) -> Result<M7Element, AlgebraError> {
    let ev = GenericEvaluator::new(e.alphabet())?;
    Ok(ev.eval_element(e))
}

/// Exact symbolic zero test in the relatively free algebra.
pub fn oct_is_zero(e: &Element) -> Result<bool, AlgebraError> {
    Ok(eval_generic(e)?.is_zero())
}

/// Outcome of the randomized zero test, with its one-sided error bound.
#[derive(Debug, Clone)]
pub struct RandomizedOutcome {
    pub is_zero: bool,
    pub trials: u32,
    /// log2 of the Schwartz-Zippel failure probability bound
    pub error_bound_log2: f64,
}

/// SplitMix64: a fixed, portable generator for the randomized mode.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-2^15, 2^15].
    pub fn next_sample(&mut self) -> i64 {
        let span = (1u64 << 16) + 1;
        (self.next_u64() % span) as i64 - (1 << 15)
    }
}

/// Randomized zero test: evaluate the indeterminates at uniform random
/// integers with |value| <= 2^15 over several trials.
pub fn oct_is_zero_randomized(
    e: &Element,
    seed: u64,
    trials: u32,
) -> Result<RandomizedOutcome, AlgebraError> {
    if trials == 0 {
        return Err(AlgebraError::NoTrials);
    }
    let vars = e.alphabet().xyz_vars()?;
    let table = build_table();
    let mut rng = SplitMix64(seed);
    let mut max_degree = 0u32;
    let mut is_zero = true;
    'trial: for _ in 0..trials {
        let points: [[BigInt; 7]; 3] = std::array::from_fn(|_| {
            std::array::from_fn(|_| BigInt::from(rng.next_sample()))
        });
        for (m, c) in e.terms() {
            max_degree = max_degree.max(m.degree());
            if c.is_zero() {
                continue;
            }
        }
        let mut acc: [BigRational; 7] = std::array::from_fn(|_| BigRational::zero());
        for (m, c) in e.terms() {
            let v = eval_mono_at(table, m, &vars, &points);
            for k in 0..7 {
                acc[k] += c * BigRational::from_integer(v[k].clone());
            }
        }
        if acc.iter().any(|q| !q.is_zero()) {
            is_zero = false;
            break 'trial;
        }
    }
    // Schwartz-Zippel: failure probability per trial at most d / |S|
    let span = ((1u64 << 16) + 1) as f64;
    let per_trial = (max_degree.max(1) as f64 / span).min(1.0);
    Ok(RandomizedOutcome {
        is_zero,
        trials,
        error_bound_log2: per_trial.log2() * trials as f64,
    })
}

fn eval_mono_at(
    table: &StructureTable,
    m: Mono,
    vars: &[Variable; 3],
    points: &[[BigInt; 7]; 3],
) -> [BigInt; 7] {
    match m.children() {
        None => {
            let v = m.leaf_var().unwrap();
            let block = vars.iter().position(|&g| g == v).unwrap();
            points[block].clone()
        }
        Some((l, r)) => {
            let a = eval_mono_at(table, l, vars, points);
            let b = eval_mono_at(table, r, vars, points);
            table.mul_vec_big(&a, &b)
        }
    }
}
