//! Enumeration and verification of the basis of J(M,M,M): descriptors
//! J(x,y,z) G^k L_{x,x}^l L_{y,y}^m L_{z,z}^n L_{x,y}^p L_{x,z}^q
//! L_{y,z}^r followed by one of the seven tails
//! {1, x, y, z, xy, xz, yz}, realized literally and checked for
//! independence and spanning against the graded dimension of J(M,M,M).

use rayon::prelude::*;

use crate::alphabet::{Alphabet, MultiDegree};
use crate::element::{apply_operator, Element, OperatorWord};
use crate::error::AlgebraError;
use crate::linalg::SparseRationalMatrix;
use crate::m7::GenericEvaluator;
use crate::subdirect::{dim_j, JointLayout};

/// Tail right-multiplications appended after the operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tail {
    None,
    X,
    Y,
    Z,
    Xy,
    Xz,
    Yz,
}

impl Tail {
    pub const ALL: [Tail; 7] = [
        Tail::None,
        Tail::X,
        Tail::Y,
        Tail::Z,
        Tail::Xy,
        Tail::Xz,
        Tail::Yz,
    ];

    pub fn letters(self) -> &'static [&'static str] {
        match self {
            Tail::None => &[],
            Tail::X => &["x"],
            Tail::Y => &["y"],
            Tail::Z => &["z"],
            Tail::Xy => &["x", "y"],
            Tail::Xz => &["x", "z"],
            Tail::Yz => &["y", "z"],
        }
    }

    fn multidegree(self) -> MultiDegree {
        let mut d = MultiDegree::zero(3);
        for l in self.letters() {
            match *l {
                "x" => d.0[0] += 1,
                "y" => d.0[1] += 1,
                _ => d.0[2] += 1,
            }
        }
        d
    }
}

impl std::fmt::Display for Tail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if matches!(self, Tail::None) {
            return write!(f, "1");
        }
        write!(f, "{}", self.letters().join(""))
    }
}

/// Exponent tuple (k,l,m,n,p,q,r) plus tail: one basis vector of the
/// theorem's generating set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisDescriptor {
    pub g_pow: u32,
    pub lxx: u32,
    pub lyy: u32,
    pub lzz: u32,
    pub lxy: u32,
    pub lxz: u32,
    pub lyz: u32,
    pub tail: Tail,
}

impl BasisDescriptor {
    /// Base multidegree (1+k+2l+p+q, 1+k+2m+p+r, 1+k+2n+q+r) plus the
    /// tail letters.
    pub fn multidegree(&self) -> MultiDegree {
        let k = self.g_pow;
        let base = MultiDegree(vec![
            1 + k + 2 * self.lxx + self.lxy + self.lxz,
            1 + k + 2 * self.lyy + self.lxy + self.lyz,
            1 + k + 2 * self.lzz + self.lxz + self.lyz,
        ]);
        base.plus(&self.tail.multidegree())
    }

    pub fn total_degree(&self) -> u32 {
        self.multidegree().total()
    }
}

impl std::fmt::Display for BasisDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "J G^{} Lxx^{} Lyy^{} Lzz^{} Lxy^{} Lxz^{} Lyz^{} tail {}",
            self.g_pow, self.lxx, self.lyy, self.lzz, self.lxy, self.lxz, self.lyz, self.tail
        )
    }
}

/// All descriptors of the given multidegree, in lexicographic
/// (k,l,m,n,p,q,r,tail) order; solves the exponent equations
/// exhaustively.
pub fn enumerate(d: &MultiDegree) -> Vec<BasisDescriptor> {
    assert_eq!(d.len(), 3);
    let mut out = Vec::new();
    let total = d.total();
    if total < 3 {
        return out;
    }
    let bound = |c: u32| c; // exponents are bounded by the coordinates
    for g_pow in 0..=d.0.iter().copied().min().unwrap() {
        for lxx in 0..=bound(d.0[0]) / 2 {
            for lyy in 0..=bound(d.0[1]) / 2 {
                for lzz in 0..=bound(d.0[2]) / 2 {
                    for lxy in 0..=bound(d.0[0]) {
                        for lxz in 0..=bound(d.0[0]) {
                            for lyz in 0..=bound(d.0[1]) {
                                for tail in Tail::ALL {
                                    let desc = BasisDescriptor {
                                        g_pow,
                                        lxx,
                                        lyy,
                                        lzz,
                                        lxy,
                                        lxz,
                                        lyz,
                                        tail,
                                    };
                                    if desc.multidegree() == *d {
                                        out.push(desc);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Realize a descriptor literally: G first (via the quadrilinear
/// function, not the L_{x,zy} shortcut), then the L operators, then the
/// tail letters.
pub fn realize(desc: &BasisDescriptor) -> Result<Element, AlgebraError> {
    let al = Alphabet::xyz();
    let x = Element::gen(&al, "x")?;
    let y = Element::gen(&al, "y")?;
    let z = Element::gen(&al, "z")?;
    let j = Element::jacobian(&x, &y, &z);
    let mut word = OperatorWord::new().gop(desc.g_pow)?;
    word = word.lop(x.clone(), x.clone(), desc.lxx)?;
    word = word.lop(y.clone(), y.clone(), desc.lyy)?;
    word = word.lop(z.clone(), z.clone(), desc.lzz)?;
    word = word.lop(x.clone(), y.clone(), desc.lxy)?;
    word = word.lop(x.clone(), z.clone(), desc.lxz)?;
    word = word.lop(y.clone(), z.clone(), desc.lyz)?;
    let mut e = apply_operator(&j, &word)?;
    for l in desc.tail.letters() {
        e = e.mul(&Element::gen(&al, l)?);
    }
    Ok(e)
}

/// Result of checking one multidegree component of the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisReport {
    pub multidegree: MultiDegree,
    pub count: usize,
    pub rank: usize,
    pub dim_j: usize,
    pub independent: bool,
    pub spanning: bool,
}

impl BasisReport {
    pub fn ok(&self) -> bool {
        self.independent && self.spanning
    }
}

/// Verify independence and spanning of the realized descriptors at one
/// multidegree against the model dimension of J(M,M,M).
pub fn verify_basis(d: &MultiDegree) -> Result<BasisReport, AlgebraError> {
    let descs = enumerate(d);
    let count = descs.len();
    let dim_j = if d.total() >= 3 { dim_j(d) } else { 0 };
    let rank = if count == 0 {
        0
    } else {
        let layout = JointLayout::new(d);
        let evaluator = GenericEvaluator::new(&Alphabet::xyz())?;
        let rows: Result<Vec<_>, AlgebraError> = descs
            .par_iter()
            .map(|desc| {
                let e = realize(desc)?;
                layout.joint_image(&e, &evaluator)
            })
            .collect();
        let mut matrix = SparseRationalMatrix::new();
        for r in rows? {
            matrix.push_row(r);
        }
        matrix.rank()
    };
    Ok(BasisReport {
        multidegree: d.clone(),
        count,
        rank,
        dim_j,
        independent: rank == count,
        spanning: count == dim_j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Grading;
    use crate::element::int;
    use crate::subdirect::zero_in_m;

    #[test]
    fn enumerate_degree_three() {
        let d = MultiDegree(vec![1, 1, 1]);
        let descs = enumerate(&d);
        assert_eq!(descs.len(), 1);
        let only = descs[0];
        assert_eq!(only.g_pow, 0);
        assert_eq!(only.tail, Tail::None);
        let e = realize(&only).unwrap();
        let al = Alphabet::xyz();
        let x = Element::gen(&al, "x").unwrap();
        let y = Element::gen(&al, "y").unwrap();
        let z = Element::gen(&al, "z").unwrap();
        assert_eq!(e, Element::jacobian(&x, &y, &z));
    }

    #[test]
    fn enumerate_empty_when_base_exceeds() {
        assert!(enumerate(&MultiDegree(vec![1, 1, 0])).is_empty());
        assert!(enumerate(&MultiDegree(vec![3, 0, 0])).is_empty());
    }

    #[test]
    fn enumerate_two_two_one() {
        let descs = enumerate(&MultiDegree(vec![2, 2, 1]));
        assert_eq!(descs.len(), 2);
        // (p=1, rest 0, tail none) and (all 0, tail xy)
        assert!(descs
            .iter()
            .any(|d| d.lxy == 1 && d.tail == Tail::None && d.g_pow == 0));
        assert!(descs
            .iter()
            .any(|d| d.lxy == 0 && d.tail == Tail::Xy && d.g_pow == 0));
    }

    #[test]
    fn realized_multidegree_matches_formula() {
        for total in 3..=6u32 {
            for d in crate::enumerate::multidegrees_of_total(3, total) {
                for desc in enumerate(&d) {
                    let e = realize(&desc).unwrap();
                    match e.multidegree() {
                        Grading::Homogeneous(got) => assert_eq!(got, d, "descriptor {desc}"),
                        g => panic!("realized descriptor {desc} has grading {g:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn tail_realization_has_expected_multidegree() {
        // l=1, rest 0, tail x: J L_{x,x} x has multidegree (4,1,1)
        let desc = BasisDescriptor {
            g_pow: 0,
            lxx: 1,
            lyy: 0,
            lzz: 0,
            lxy: 0,
            lxz: 0,
            lyz: 0,
            tail: Tail::X,
        };
        assert_eq!(desc.multidegree(), MultiDegree(vec![4, 1, 1]));
    }

    #[test]
    fn g_realization_matches_six_l_shortcut_in_m() {
        // k=1: realize is G(J,x,y,z); equals 6 J L_{x,zy} in M
        let desc = BasisDescriptor {
            g_pow: 1,
            lxx: 0,
            lyy: 0,
            lzz: 0,
            lxy: 0,
            lxz: 0,
            lyz: 0,
            tail: Tail::None,
        };
        let e = realize(&desc).unwrap();
        let al = Alphabet::xyz();
        let x = Element::gen(&al, "x").unwrap();
        let y = Element::gen(&al, "y").unwrap();
        let z = Element::gen(&al, "z").unwrap();
        let j = Element::jacobian(&x, &y, &z);
        let shortcut = j.lop(&x, &z.mul(&y)).scale(&int(6));
        assert!(zero_in_m(&e.sub(&shortcut)).unwrap());
    }

    #[test]
    fn verify_basis_low_degrees() {
        let r = verify_basis(&MultiDegree(vec![1, 1, 1])).unwrap();
        assert_eq!(
            (r.count, r.rank, r.dim_j, r.independent, r.spanning),
            (1, 1, 1, true, true)
        );
        let r = verify_basis(&MultiDegree(vec![3, 0, 0])).unwrap();
        assert_eq!(
            (r.count, r.rank, r.dim_j, r.independent, r.spanning),
            (0, 0, 0, true, true)
        );
        let r = verify_basis(&MultiDegree(vec![2, 2, 1])).unwrap();
        assert_eq!(
            (r.count, r.rank, r.dim_j, r.independent, r.spanning),
            (2, 2, 2, true, true)
        );
    }
}
