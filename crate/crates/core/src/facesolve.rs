//! Assigning edge values so that every bounded face attains a prescribed
//! monodromy.
//!
//! The construction is shared by Kasteleyn signs (values in {±1}), the
//! q-connection (integer exponents), gauge fixing of face weights (positive
//! rationals) and flat SL_n connections (matrices): put the identity on a
//! spanning tree, observe that the duals of the non-tree edges form a
//! spanning tree of the dual graph, root it at the outer face, and solve the
//! face constraints from the leaves inward. Each bounded face then has
//! exactly one undetermined edge (the one towards its dual parent) when its
//! turn comes.

use std::collections::VecDeque;

use crate::algebra::matrix::{invert_rational, RingMatrix};
use crate::algebra::rational::Rational;
use crate::error::Result;
use crate::graph::{Dart, Face, PlanarBipartiteGraph};
use num_traits::One;

/// Group operations for edge values. `op(a, b)` composes with `b` applied
/// first, matching matrix products.
pub trait GroupOps<T: Clone> {
    fn identity(&self) -> T;
    fn op(&self, a: &T, b: &T) -> T;
    fn inv(&self, a: &T) -> T;
}

/// {+1, -1} under multiplication.
pub struct SignGroup;
impl GroupOps<i8> for SignGroup {
    fn identity(&self) -> i8 {
        1
    }
    fn op(&self, a: &i8, b: &i8) -> i8 {
        a * b
    }
    fn inv(&self, a: &i8) -> i8 {
        *a
    }
}

/// Integer exponents of q under addition.
pub struct ExpGroup;
impl GroupOps<i64> for ExpGroup {
    fn identity(&self) -> i64 {
        0
    }
    fn op(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
    fn inv(&self, a: &i64) -> i64 {
        -a
    }
}

/// Nonzero rationals under multiplication.
pub struct RationalMulGroup;
impl GroupOps<Rational> for RationalMulGroup {
    fn identity(&self) -> Rational {
        Rational::one()
    }
    fn op(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn inv(&self, a: &Rational) -> Rational {
        Rational::one() / a
    }
}

/// Invertible rational n x n matrices.
pub struct MatrixGroup {
    pub n: usize,
}
impl GroupOps<RingMatrix<Rational>> for MatrixGroup {
    fn identity(&self) -> RingMatrix<Rational> {
        RingMatrix::identity(self.n)
    }
    fn op(&self, a: &RingMatrix<Rational>, b: &RingMatrix<Rational>) -> RingMatrix<Rational> {
        a.matmul(b)
    }
    fn inv(&self, a: &RingMatrix<Rational>) -> RingMatrix<Rational> {
        invert_rational(a).expect("group element must be invertible")
    }
}

/// Deterministic spanning tree: breadth-first from vertex 0, scanning
/// incident edges in increasing id order. Returns `is_tree_edge`.
pub fn spanning_tree(g: &PlanarBipartiteGraph) -> Vec<bool> {
    let nv = g.vertex_count();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in 0..g.edge_count() {
        let (b, w) = g.endpoints(e);
        incident[b].push(e);
        incident[w].push(e);
    }
    for list in &mut incident {
        list.sort_unstable();
    }
    let mut in_tree = vec![false; g.edge_count()];
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &e in &incident[v] {
            let u = g.other_end(e, v);
            if !seen[u] {
                seen[u] = true;
                in_tree[e] = true;
                queue.push_back(u);
            }
        }
    }
    in_tree
}

/// Dual spanning tree over the non-tree edges, rooted at the outer face.
/// `parent_edge[f]` is the non-tree edge crossing from bounded face `f`
/// towards the root; faces are returned deepest first.
struct DualTree {
    parent_edge: Vec<Option<usize>>,
    order: Vec<usize>,
}

fn dual_tree(g: &PlanarBipartiteGraph, in_tree: &[bool]) -> DualTree {
    let nf = g.faces().len();
    // face -> (non-tree edge, neighbor face), sorted by edge id
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nf];
    for e in 0..g.edge_count() {
        if in_tree[e] {
            continue;
        }
        let f1 = g.face_of(Dart { edge: e, from_black: true });
        let f2 = g.face_of(Dart { edge: e, from_black: false });
        debug_assert_ne!(f1, f2, "non-tree edge with both sides on one face");
        adj[f1].push((e, f2));
        adj[f2].push((e, f1));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let root = g.outer_face();
    let mut parent_edge = vec![None; nf];
    let mut depth = vec![usize::MAX; nf];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut order = Vec::new();
    while let Some(f) = queue.pop_front() {
        for &(e, f2) in &adj[f] {
            if depth[f2] == usize::MAX {
                depth[f2] = depth[f] + 1;
                parent_edge[f2] = Some(e);
                order.push(f2);
                queue.push_back(f2);
            }
        }
    }
    debug_assert!(
        (0..nf).all(|f| f == root || parent_edge[f].is_some()),
        "dual tree must span all faces"
    );
    // deepest first; BFS order reversed does exactly that per level
    order.reverse();
    DualTree { parent_edge, order }
}

/// Ordered monodromy of a face walk: `val(d_k) ∘ ... ∘ val(d_1)` where a dart
/// traversed from its black end contributes the edge value and a dart
/// traversed from its white end contributes the inverse.
pub fn walk_monodromy<T: Clone, G: GroupOps<T>>(
    group: &G,
    values: &[T],
    face: &Face,
) -> T {
    let mut acc = group.identity();
    for d in &face.walk {
        let v = if d.from_black {
            values[d.edge].clone()
        } else {
            group.inv(&values[d.edge])
        };
        acc = group.op(&v, &acc);
    }
    acc
}

/// Assigns a value to each edge so that every bounded face `f` has
/// `walk_monodromy == target(f)`. Tree edges carry the identity.
pub fn solve_face_constraints<T: Clone + PartialEq, G: GroupOps<T>>(
    g: &PlanarBipartiteGraph,
    group: &G,
    target: impl Fn(usize) -> T,
) -> Result<Vec<T>> {
    g.require_planar()?;
    let in_tree = spanning_tree(g);
    let dual = dual_tree(g, &in_tree);
    let mut values: Vec<T> = (0..g.edge_count()).map(|_| group.identity()).collect();
    for &f in &dual.order {
        let unknown = dual.parent_edge[f].expect("bounded face has a parent edge");
        let face = &g.faces()[f];
        let pos = face
            .walk
            .iter()
            .position(|d| d.edge == unknown)
            .expect("parent edge lies on its face");
        // target = post ∘ U^sigma ∘ pre, solve for U
        let mut pre = group.identity();
        for d in &face.walk[..pos] {
            let v = if d.from_black {
                values[d.edge].clone()
            } else {
                group.inv(&values[d.edge])
            };
            pre = group.op(&v, &pre);
        }
        let mut post = group.identity();
        for d in &face.walk[pos + 1..] {
            let v = if d.from_black {
                values[d.edge].clone()
            } else {
                group.inv(&values[d.edge])
            };
            post = group.op(&v, &post);
        }
        let mid = group.op(
            &group.op(&group.inv(&post), &target(f)),
            &group.inv(&pre),
        );
        let sigma_black = face.walk[pos].from_black;
        values[unknown] = if sigma_black { mid } else { group.inv(&mid) };
    }
    // certify
    for face in g.bounded_faces() {
        debug_assert!(
            walk_monodromy(group, &values, face) == target(face.id),
            "face {} constraint not met",
            face.id
        );
    }
    Ok(values)
}
