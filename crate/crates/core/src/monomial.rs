//! Canonical anticommutative monomials: binary trees over an alphabet,
//! interned so that structurally equal trees share one identity.
//!
//! Canonical form: at every internal node the left subtree is strictly
//! smaller than the right subtree in the monomial order (total degree
//! first, then left subtree, then right subtree, leaves by alphabet
//! order). A node with equal subtrees is zero and never interned.

use std::cmp::Ordering;
use std::sync::{LazyLock, RwLock};

use rustc_hash::FxHashMap;

use crate::alphabet::{Alphabet, MultiDegree, Variable};
use crate::error::AlgebraError;

/// Handle to an interned canonical tree. Equality is O(1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mono(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Leaf(u16),
    Prod(Mono, Mono),
}

struct Store {
    // (node, total degree), append-only
    nodes: Vec<(Node, u32)>,
    index: FxHashMap<Node, Mono>,
}

static STORE: LazyLock<RwLock<Store>> = LazyLock::new(|| {
    RwLock::new(Store {
        nodes: Vec::new(),
        index: FxHashMap::default(),
    })
});

fn intern(node: Node) -> Mono {
    {
        let store = STORE.read().unwrap();
        if let Some(&m) = store.index.get(&node) {
            return m;
        }
    }
    let mut store = STORE.write().unwrap();
    if let Some(&m) = store.index.get(&node) {
        return m;
    }
    let degree = match node {
        Node::Leaf(_) => 1,
        Node::Prod(l, r) => store.nodes[l.0 as usize].1 + store.nodes[r.0 as usize].1,
    };
    let id = Mono(store.nodes.len() as u32);
    store.nodes.push((node, degree));
    store.index.insert(node, id);
    id
}

fn cmp_in(store: &Store, a: Mono, b: Mono) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let (na, da) = store.nodes[a.0 as usize];
    let (nb, db) = store.nodes[b.0 as usize];
    da.cmp(&db).then_with(|| match (na, nb) {
        (Node::Leaf(i), Node::Leaf(j)) => i.cmp(&j),
        (Node::Prod(l1, r1), Node::Prod(l2, r2)) => {
            cmp_in(store, l1, l2).then_with(|| cmp_in(store, r1, r2))
        }
        // unreachable with equal degrees, but keep a total order
        (Node::Leaf(_), Node::Prod(..)) => Ordering::Less,
        (Node::Prod(..), Node::Leaf(_)) => Ordering::Greater,
    })
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let store = STORE.read().unwrap();
        cmp_in(&store, *self, *other)
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mono {
    pub fn leaf(v: Variable) -> Mono {
        intern(Node::Leaf(v.0))
    }

    /// Canonical product of two canonical monomials: `None` when the
    /// factors are equal (the square is zero), otherwise the ordered
    /// node together with the sign produced by the swap.
    pub fn prod(a: Mono, b: Mono) -> Option<(Mono, i32)> {
        match a.cmp(&b) {
            Ordering::Equal => None,
            Ordering::Less => Some((intern(Node::Prod(a, b)), 1)),
            Ordering::Greater => Some((intern(Node::Prod(b, a)), -1)),
        }
    }

    pub fn degree(self) -> u32 {
        STORE.read().unwrap().nodes[self.0 as usize].1
    }

    pub fn is_leaf(self) -> bool {
        matches!(STORE.read().unwrap().nodes[self.0 as usize].0, Node::Leaf(_))
    }

    /// `Some((left, right))` for a product node, `None` for a leaf.
    pub fn children(self) -> Option<(Mono, Mono)> {
        match STORE.read().unwrap().nodes[self.0 as usize].0 {
            Node::Leaf(_) => None,
            Node::Prod(l, r) => Some((l, r)),
        }
    }

    pub fn leaf_var(self) -> Option<Variable> {
        match STORE.read().unwrap().nodes[self.0 as usize].0 {
            Node::Leaf(i) => Some(Variable(i)),
            Node::Prod(..) => None,
        }
    }

    pub fn multidegree(self, alphabet: &Alphabet) -> MultiDegree {
        let mut counts = vec![0u32; alphabet.len()];
        let store = STORE.read().unwrap();
        fn walk(store: &Store, m: Mono, counts: &mut [u32]) {
            match store.nodes[m.0 as usize].0 {
                Node::Leaf(i) => counts[i as usize] += 1,
                Node::Prod(l, r) => {
                    walk(store, l, counts);
                    walk(store, r, counts);
                }
            }
        }
        walk(&store, self, &mut counts);
        MultiDegree(counts)
    }

    /// Leaves in left-to-right order.
    pub fn leaves(self) -> Vec<Variable> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        let store = STORE.read().unwrap();
        fn walk(store: &Store, m: Mono, out: &mut Vec<Variable>) {
            match store.nodes[m.0 as usize].0 {
                Node::Leaf(i) => out.push(Variable(i)),
                Node::Prod(l, r) => {
                    walk(store, l, out);
                    walk(store, r, out);
                }
            }
        }
        walk(&store, self, &mut out);
        out
    }

    pub fn to_raw(self) -> RawTree {
        match self.children() {
            None => RawTree::Leaf(self.leaf_var().unwrap()),
            Some((l, r)) => RawTree::node(l.to_raw(), r.to_raw()),
        }
    }

    pub fn format(self, alphabet: &Alphabet) -> String {
        match self.children() {
            None => alphabet.name(self.leaf_var().unwrap()).to_string(),
            Some((l, r)) => {
                let left = l.format(alphabet);
                let right = if r.is_leaf() {
                    r.format(alphabet)
                } else {
                    format!("({})", r.format(alphabet))
                };
                format!("{left} {right}")
            }
        }
    }
}

/// An uncanonicalized product tree, the input of `canonicalize`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTree {
    Leaf(Variable),
    Node(Box<RawTree>, Box<RawTree>),
}

impl RawTree {
    pub fn node(l: RawTree, r: RawTree) -> RawTree {
        RawTree::Node(Box::new(l), Box::new(r))
    }

    /// Left-normed product of a nonempty leaf sequence.
    pub fn left_normed(vars: &[Variable]) -> RawTree {
        assert!(!vars.is_empty());
        let mut tree = RawTree::Leaf(vars[0]);
        for &v in &vars[1..] {
            tree = RawTree::node(tree, RawTree::Leaf(v));
        }
        tree
    }

    /// Normal form under anticommutativity: `None` when the tree is zero
    /// (a repeated subtree), otherwise the canonical monomial and the
    /// accumulated sign.
    pub fn canonicalize(&self) -> Option<(Mono, i32)> {
        match self {
            RawTree::Leaf(v) => Some((Mono::leaf(*v), 1)),
            RawTree::Node(l, r) => {
                let (lm, ls) = l.canonicalize()?;
                let (rm, rs) = r.canonicalize()?;
                let (m, s) = Mono::prod(lm, rm)?;
                Some((m, ls * rs * s))
            }
        }
    }

    /// Replace every leaf through `f` (used by polarization and
    /// substitution; the result must be re-canonicalized).
    pub fn map_leaves(&self, f: &mut impl FnMut(Variable) -> RawTree) -> RawTree {
        match self {
            RawTree::Leaf(v) => f(*v),
            RawTree::Node(l, r) => RawTree::node(l.map_leaves(f), r.map_leaves(f)),
        }
    }
}

/// Also used by the raw-input path of `canonicalize`: trees given with
/// variable names rather than resolved `Variable`s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedTree {
    Leaf(String),
    Node(Box<NamedTree>, Box<NamedTree>),
}

impl NamedTree {
    pub fn leaf(name: impl Into<String>) -> NamedTree {
        NamedTree::Leaf(name.into())
    }

    pub fn node(l: NamedTree, r: NamedTree) -> NamedTree {
        NamedTree::Node(Box::new(l), Box::new(r))
    }

    pub fn resolve(&self, alphabet: &Alphabet) -> Result<RawTree, AlgebraError> {
        match self {
            NamedTree::Leaf(name) => Ok(RawTree::Leaf(alphabet.lookup(name)?)),
            NamedTree::Node(l, r) => Ok(RawTree::node(
                l.resolve(alphabet)?,
                r.resolve(alphabet)?,
            )),
        }
    }
}
