//! Brute-force ground truth: enumeration of dimer covers and n-multiwebs,
//! double-dimer loop decompositions with enclosed areas, Tait colorings, and
//! the nondegeneracy test. Everything here is desk-scale by design and used
//! to pin down the determinant-based fast paths.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Dart, PlanarBipartiteGraph};

/// Default cap on vertices for exhaustive enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 30;

/// A dimer cover as a sorted list of edge ids.
pub type DimerCover = Vec<usize>;

/// Edge multiplicities summing to `order` at every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiweb {
    pub order: u32,
    pub mult: Vec<u8>,
}

impl Multiweb {
    pub fn from_cover(g: &PlanarBipartiteGraph, cover: &[usize]) -> Self {
        let mut mult = vec![0u8; g.edge_count()];
        for &e in cover {
            mult[e] += 1;
        }
        Multiweb { order: 1, mult }
    }

    pub fn superpose(&self, other: &Multiweb) -> Multiweb {
        Multiweb {
            order: self.order + other.order,
            mult: self
                .mult
                .iter()
                .zip(&other.mult)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Check the per-vertex sum invariant.
    pub fn is_valid(&self, g: &PlanarBipartiteGraph) -> bool {
        let mut sums = vec![0u32; g.vertex_count()];
        for (e, &m) in self.mult.iter().enumerate() {
            let (b, w) = g.endpoints(e);
            sums[b] += u32::from(m);
            sums[w] += u32::from(m);
        }
        sums.iter().all(|&s| s == self.order)
    }
}

fn check_cap(g: &PlanarBipartiteGraph, cap: usize) -> Result<()> {
    if g.vertex_count() > cap {
        Err(Error::TooLarge(format!(
            "{} vertices exceeds enumeration cap {cap}",
            g.vertex_count()
        )))
    } else {
        Ok(())
    }
}

/// All dimer covers, by backtracking on the lowest-id uncovered vertex.
pub fn enumerate_dimer_covers(g: &PlanarBipartiteGraph) -> Result<Vec<DimerCover>> {
    enumerate_dimer_covers_capped(g, DEFAULT_VERTEX_CAP)
}

pub fn enumerate_dimer_covers_capped(
    g: &PlanarBipartiteGraph,
    cap: usize,
) -> Result<Vec<DimerCover>> {
    check_cap(g, cap)?;
    let nv = g.vertex_count();
    let mut covered = vec![false; nv];
    let mut current = Vec::new();
    let mut out = Vec::new();
    fn rec(
        g: &PlanarBipartiteGraph,
        covered: &mut [bool],
        current: &mut Vec<usize>,
        out: &mut Vec<DimerCover>,
    ) {
        let v = match covered.iter().position(|&c| !c) {
            Some(v) => v,
            None => {
                out.push(current.clone());
                return;
            }
        };
        let mut edges: Vec<usize> = g.incident_edges(v).to_vec();
        edges.sort_unstable();
        for e in edges {
            let u = g.other_end(e, v);
            if covered[u] {
                continue;
            }
            covered[v] = true;
            covered[u] = true;
            current.push(e);
            rec(g, covered, current, out);
            current.pop();
            covered[v] = false;
            covered[u] = false;
        }
    }
    rec(g, &mut covered, &mut current, &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    Ok(out)
}

/// All multiplicity functions summing to `n` at each vertex.
pub fn enumerate_multiwebs(g: &PlanarBipartiteGraph, n: u32) -> Result<Vec<Multiweb>> {
    enumerate_multiwebs_capped(g, n, DEFAULT_VERTEX_CAP)
}

pub fn enumerate_multiwebs_capped(
    g: &PlanarBipartiteGraph,
    n: u32,
    cap: usize,
) -> Result<Vec<Multiweb>> {
    check_cap(g, cap)?;
    let nv = g.vertex_count();
    let ne = g.edge_count();
    // an edge is decided at its lower-id endpoint
    let mut later_edges: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in 0..ne {
        let (b, w) = g.endpoints(e);
        later_edges[b.min(w)].push(e);
    }
    for list in &mut later_edges {
        list.sort_unstable();
    }
    let mut mult = vec![0u8; ne];
    let mut vertex_sum = vec![0u32; nv];
    let mut out = Vec::new();

    fn rec(
        g: &PlanarBipartiteGraph,
        n: u32,
        later_edges: &[Vec<usize>],
        v: usize,
        mult: &mut Vec<u8>,
        vertex_sum: &mut Vec<u32>,
        out: &mut Vec<Multiweb>,
    ) {
        if v == g.vertex_count() {
            out.push(Multiweb { order: n, mult: mult.clone() });
            return;
        }
        let edges = &later_edges[v];
        // distribute the remaining multiplicity of v over its undecided edges
        fn assign(
            g: &PlanarBipartiteGraph,
            n: u32,
            later_edges: &[Vec<usize>],
            v: usize,
            edges: &[usize],
            idx: usize,
            remaining: u32,
            mult: &mut Vec<u8>,
            vertex_sum: &mut Vec<u32>,
            out: &mut Vec<Multiweb>,
        ) {
            if idx == edges.len() {
                if remaining == 0 {
                    rec(g, n, later_edges, v + 1, mult, vertex_sum, out);
                }
                return;
            }
            let e = edges[idx];
            let other = g.other_end(e, v);
            let head_room = n - vertex_sum[other];
            let max_here = remaining.min(head_room).min(n);
            for m in 0..=max_here {
                mult[e] = m as u8;
                vertex_sum[other] += m;
                assign(
                    g,
                    n,
                    later_edges,
                    v,
                    edges,
                    idx + 1,
                    remaining - m,
                    mult,
                    vertex_sum,
                    out,
                );
                vertex_sum[other] -= m;
                mult[e] = 0;
            }
        }
        let remaining = n - vertex_sum[v];
        assign(g, n, later_edges, v, edges, 0, remaining, mult, vertex_sum, out);
    }
    rec(g, n, &later_edges, 0, &mut mult, &mut vertex_sum, &mut out);
    Ok(out)
}

/// One loop of a double-dimer configuration.
#[derive(Debug, Clone)]
pub struct LoopInfo {
    /// Edges in cyclic walk order.
    pub edges: Vec<usize>,
    /// Vertices in cyclic walk order; `edges[i]` joins `vertices[i]` and
    /// `vertices[(i+1) % len]`.
    pub vertices: Vec<usize>,
    /// Bounded faces enclosed by the loop.
    pub enclosed_faces: Vec<usize>,
}

impl LoopInfo {
    pub fn area(&self) -> usize {
        self.enclosed_faces.len()
    }
}

#[derive(Debug, Clone)]
pub struct LoopDecomposition {
    pub loops: Vec<LoopInfo>,
    pub doubled_edges: Vec<usize>,
}

/// Splits a 2-multiweb into doubled edges and loops of multiplicity-1 edges;
/// the area of each loop is found by flood fill in the dual graph from the
/// outer face, crossing the loop being forbidden.
pub fn decompose_double_dimer(
    g: &PlanarBipartiteGraph,
    m2: &Multiweb,
) -> Result<LoopDecomposition> {
    g.require_planar()?;
    if m2.order != 2 || !m2.is_valid(g) {
        return Err(Error::WrongOrder("expected a 2-multiweb".into()));
    }
    let doubled_edges: Vec<usize> = (0..g.edge_count()).filter(|&e| m2.mult[e] == 2).collect();
    // per vertex, its multiplicity-1 edges (0 or 2 of them)
    let nv = g.vertex_count();
    let mut single: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in 0..g.edge_count() {
        if m2.mult[e] == 1 {
            let (b, w) = g.endpoints(e);
            single[b].push(e);
            single[w].push(e);
        }
    }
    for list in &mut single {
        list.sort_unstable();
        debug_assert!(list.len() == 0 || list.len() == 2);
    }
    let mut used = vec![false; g.edge_count()];
    let mut loops = Vec::new();
    for start in 0..nv {
        if single[start].is_empty() || used[single[start][0]] {
            continue;
        }
        let mut vertices = vec![start];
        let mut edges = Vec::new();
        let mut v = start;
        let mut e = single[start][0];
        loop {
            used[e] = true;
            edges.push(e);
            let u = g.other_end(e, v);
            if u == start {
                break;
            }
            vertices.push(u);
            let next = if single[u][0] == e { single[u][1] } else { single[u][0] };
            v = u;
            e = next;
        }
        let enclosed_faces = enclosed_faces(g, &edges);
        loops.push(LoopInfo { edges, vertices, enclosed_faces });
    }
    Ok(LoopDecomposition { loops, doubled_edges })
}

/// Bounded faces not reachable from the outer face in the dual graph without
/// crossing one of `blocked` edges.
pub fn enclosed_faces(g: &PlanarBipartiteGraph, blocked: &[usize]) -> Vec<usize> {
    let nf = g.faces().len();
    let mut is_blocked = vec![false; g.edge_count()];
    for &e in blocked {
        is_blocked[e] = true;
    }
    let mut reached = vec![false; nf];
    reached[g.outer_face()] = true;
    let mut queue = VecDeque::from([g.outer_face()]);
    while let Some(f) = queue.pop_front() {
        for d in &g.faces()[f].walk {
            if is_blocked[d.edge] {
                continue;
            }
            let other = g.face_of(Dart { edge: d.edge, from_black: !d.from_black });
            if !reached[other] {
                reached[other] = true;
                queue.push_back(other);
            }
        }
    }
    (0..nf).filter(|&f| !reached[f]).collect()
}

/// The double-dimer measure: every 2-multiweb with weight `2^loops`.
/// The weights always satisfy `sum = |M|^2`, which callers can re-check.
pub fn double_dimer_measure(g: &PlanarBipartiteGraph) -> Result<Vec<(Multiweb, u128)>> {
    let webs = enumerate_multiwebs(g, 2)?;
    webs.into_iter()
        .map(|m2| {
            let dec = decompose_double_dimer(g, &m2)?;
            Ok((m2, 1u128 << dec.loops.len()))
        })
        .collect()
}

/// Number of proper 3-edge-colorings of an abstract trivalent graph given as
/// an edge list. Exhaustive search.
pub fn tait_colorings_of_graph(vertex_count: usize, edges: &[(usize, usize)]) -> Result<u64> {
    let mut degree = vec![0usize; vertex_count];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
    for (i, &(u, v)) in edges.iter().enumerate() {
        degree[u] += 1;
        degree[v] += 1;
        incident[u].push(i);
        incident[v].push(i);
    }
    if degree.iter().any(|&d| d != 3) {
        return Err(Error::NotTrivalent(format!(
            "vertex degrees must all be 3, got {degree:?}"
        )));
    }
    let mut colors = vec![0u8; edges.len()];
    fn rec(
        edges: &[(usize, usize)],
        incident: &[Vec<usize>],
        colors: &mut [u8],
        e: usize,
    ) -> u64 {
        if e == edges.len() {
            return 1;
        }
        let mut count = 0;
        'next: for c in 1..=3u8 {
            let (u, v) = edges[e];
            for &f in incident[u].iter().chain(&incident[v]) {
                if f < e && colors[f] == c {
                    continue 'next;
                }
            }
            colors[e] = c;
            count += rec(edges, incident, colors, e + 1);
            colors[e] = 0;
        }
        count
    }
    Ok(rec(edges, &incident, &mut colors, 0))
}

/// Tait colorings of a trivalent (all multiplicities 1) multiweb.
pub fn tait_colorings(g: &PlanarBipartiteGraph, web: &Multiweb) -> Result<u64> {
    if web.mult.iter().any(|&m| m > 1) {
        return Err(Error::NotTrivalent("web has an edge of multiplicity > 1".into()));
    }
    let edges: Vec<(usize, usize)> = (0..g.edge_count())
        .filter(|&e| web.mult[e] == 1)
        .map(|e| g.endpoints(e))
        .collect();
    // restrict to covered vertices with compact ids
    let mut map = vec![usize::MAX; g.vertex_count()];
    let mut next = 0;
    let mut compact = Vec::new();
    for &(b, w) in &edges {
        for v in [b, w] {
            if map[v] == usize::MAX {
                map[v] = next;
                next += 1;
            }
        }
        compact.push((map[b], map[w]));
    }
    tait_colorings_of_graph(next, &compact)
}

/// Edges participating in no dimer cover.
pub fn unused_edges(g: &PlanarBipartiteGraph) -> Result<Vec<usize>> {
    let covers = enumerate_dimer_covers(g)?;
    if covers.is_empty() {
        return Err(Error::NoPerfectMatching);
    }
    let mut used = vec![false; g.edge_count()];
    for c in &covers {
        for &e in c {
            used[e] = true;
        }
    }
    Ok((0..g.edge_count()).filter(|&e| !used[e]).collect())
}

#[derive(Debug)]
pub struct NondegeneracyReport {
    pub nondegenerate: bool,
    /// dimension of the affine hull of the enumerated covers
    pub polytope_dim: usize,
    pub cycle_dim: usize,
    pub unused_edges: Vec<usize>,
}

/// A graph is nondegenerate when the matching polytope has full dimension
/// `|E| - |V| + 1`; tested by the rank of cover differences over Q.
pub fn check_nondegenerate(g: &PlanarBipartiteGraph) -> Result<NondegeneracyReport> {
    use crate::algebra::matrix::{rank_rational, RingMatrix};
    use crate::algebra::rational::int;

    let covers = enumerate_dimer_covers(g)?;
    if covers.is_empty() {
        return Err(Error::NoPerfectMatching);
    }
    let ne = g.edge_count();
    let base = &covers[0];
    let mut base_vec = vec![0i64; ne];
    for &e in base {
        base_vec[e] = 1;
    }
    let rows = covers.len().saturating_sub(1);
    let diff = RingMatrix::from_fn(rows.max(1), ne, |i, j| {
        if rows == 0 {
            return int(0);
        }
        let mut v = -base_vec[j];
        if covers[i + 1].binary_search(&j).is_ok() {
            v += 1;
        }
        int(v)
    });
    let polytope_dim = if rows == 0 { 0 } else { rank_rational(&diff) };
    let cycle_dim = g.cycle_dimension();
    let mut used = vec![false; ne];
    for c in &covers {
        for &e in c {
            used[e] = true;
        }
    }
    let unused: Vec<usize> = (0..ne).filter(|&e| !used[e]).collect();
    Ok(NondegeneracyReport {
        nondegenerate: polytope_dim == cycle_dim,
        polytope_dim,
        cycle_dim,
        unused_edges: unused,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::{make_grid, make_torus_grid};

    #[test]
    fn cover_counts_on_small_graphs() {
        assert_eq!(enumerate_dimer_covers(&make_grid(1, 2).unwrap()).unwrap().len(), 1);
        assert_eq!(enumerate_dimer_covers(&make_grid(2, 2).unwrap()).unwrap().len(), 2);
        assert_eq!(enumerate_dimer_covers(&make_grid(2, 3).unwrap()).unwrap().len(), 3);
        assert_eq!(enumerate_dimer_covers(&make_grid(2, 4).unwrap()).unwrap().len(), 5);
        assert_eq!(enumerate_dimer_covers(&make_grid(4, 4).unwrap()).unwrap().len(), 36);
        // 2x2 torus: two pairings, two parallel choices each
        assert_eq!(enumerate_dimer_covers(&make_torus_grid(2).unwrap()).unwrap().len(), 8);
    }

    #[test]
    fn multiwebs_of_order_one_are_covers() {
        for entry in corpus::all() {
            let covers = enumerate_dimer_covers(&entry.graph).unwrap();
            let webs = enumerate_multiwebs(&entry.graph, 1).unwrap();
            let mut from_covers: Vec<Vec<u8>> = covers
                .iter()
                .map(|c| Multiweb::from_cover(&entry.graph, c).mult)
                .collect();
            let mut from_webs: Vec<Vec<u8>> = webs.into_iter().map(|w| w.mult).collect();
            from_covers.sort();
            from_webs.sort();
            assert_eq!(from_covers, from_webs, "{}", entry.name);
        }
    }

    #[test]
    fn c4_multiweb_counts() {
        let g = make_grid(2, 2).unwrap();
        assert_eq!(enumerate_multiwebs(&g, 2).unwrap().len(), 3);
        let k2 = make_grid(1, 2).unwrap();
        let webs = enumerate_multiwebs(&k2, 3).unwrap();
        assert_eq!(webs.len(), 1);
        assert_eq!(webs[0].mult, vec![3]);
    }

    #[test]
    fn c4_loop_decomposition() {
        let g = make_grid(2, 2).unwrap();
        let all_ones = Multiweb { order: 2, mult: vec![1; 4] };
        let dec = decompose_double_dimer(&g, &all_ones).unwrap();
        assert_eq!(dec.loops.len(), 1);
        assert_eq!(dec.loops[0].area(), 1);
        assert!(dec.doubled_edges.is_empty());

        let covers = enumerate_dimer_covers(&g).unwrap();
        let doubled = Multiweb::from_cover(&g, &covers[0])
            .superpose(&Multiweb::from_cover(&g, &covers[0]));
        let dec = decompose_double_dimer(&g, &doubled).unwrap();
        assert!(dec.loops.is_empty());
        assert_eq!(dec.doubled_edges.len(), 2);
    }

    #[test]
    fn double_dimer_weights_square_the_cover_count() {
        for entry in corpus::all() {
            let covers = enumerate_dimer_covers(&entry.graph).unwrap();
            let measure = double_dimer_measure(&entry.graph).unwrap();
            let total: u128 = measure.iter().map(|(_, w)| w).sum();
            assert_eq!(total, (covers.len() as u128).pow(2), "{}", entry.name);
        }
    }

    #[test]
    fn superposition_pairs_regenerate_counts() {
        // every ordered pair of covers lands on a 2-multiweb; each 2-multiweb
        // accounts for exactly 2^loops pairs
        let g = make_grid(2, 3).unwrap();
        let covers = enumerate_dimer_covers(&g).unwrap();
        let mut pair_count: std::collections::HashMap<Vec<u8>, u128> =
            std::collections::HashMap::new();
        for a in &covers {
            for b in &covers {
                let m2 = Multiweb::from_cover(&g, a).superpose(&Multiweb::from_cover(&g, b));
                *pair_count.entry(m2.mult).or_insert(0) += 1;
            }
        }
        for (m2, w) in double_dimer_measure(&g).unwrap() {
            assert_eq!(pair_count.get(&m2.mult).copied().unwrap_or(0), w);
        }
    }

    #[test]
    fn theta_tait_count_is_six() {
        let entry = corpus::theta();
        let web = Multiweb { order: 3, mult: vec![1, 1, 1] };
        assert_eq!(tait_colorings(&entry.graph, &web).unwrap(), 6);
    }

    #[test]
    fn bridged_cubic_graph_has_no_tait_coloring() {
        // two doubled-edge triangles joined by a bridge (not bipartite)
        let edges = vec![
            (0, 1),
            (0, 1),
            (0, 2),
            (1, 2),
            (3, 4),
            (3, 4),
            (3, 5),
            (4, 5),
            (2, 5), // bridge
        ];
        assert_eq!(tait_colorings_of_graph(6, &edges).unwrap(), 0);
    }

    #[test]
    fn unused_edges_and_nondegeneracy() {
        for (name, want_unused, want_nondeg) in [
            ("c4", 0usize, true),
            ("grid2x3", 0, true),
            ("degenerate", 2, false),
            ("p4", 1, true),
        ] {
            let entry = corpus::by_name(name).unwrap();
            let unused = unused_edges(&entry.graph).unwrap();
            assert_eq!(unused.len(), want_unused, "{name}");
            let rep = check_nondegenerate(&entry.graph).unwrap();
            assert_eq!(rep.nondegenerate, want_nondeg, "{name}");
            if name == "degenerate" {
                assert_eq!(rep.cycle_dim, 3);
                assert_eq!(rep.polytope_dim, 2);
                assert_eq!(unused, vec![8, 9]);
            }
        }
    }

    #[test]
    fn unused_edges_agree_with_deletion_oracle() {
        // e = bw is unused iff the graph minus {b, w} has no perfect matching
        fn has_matching(nv: usize, edges: &[(usize, usize)], skip: &[usize]) -> bool {
            let alive: Vec<(usize, usize)> = edges
                .iter()
                .filter(|(b, w)| !skip.contains(b) && !skip.contains(w))
                .copied()
                .collect();
            let mut covered = vec![false; nv];
            for &v in skip {
                covered[v] = true;
            }
            fn rec(covered: &mut [bool], alive: &[(usize, usize)]) -> bool {
                let v = match covered.iter().position(|&c| !c) {
                    Some(v) => v,
                    None => return true,
                };
                for &(b, w) in alive {
                    let u = if b == v {
                        w
                    } else if w == v {
                        b
                    } else {
                        continue;
                    };
                    if covered[u] {
                        continue;
                    }
                    covered[v] = true;
                    covered[u] = true;
                    if rec(covered, alive) {
                        covered[v] = false;
                        covered[u] = false;
                        return true;
                    }
                    covered[v] = false;
                    covered[u] = false;
                }
                false
            }
            rec(&mut covered, &alive)
        }
        for name in ["c4", "grid2x3", "degenerate", "p4"] {
            let g = corpus::by_name(name).unwrap().graph;
            let edges: Vec<(usize, usize)> = (0..g.edge_count()).map(|e| g.endpoints(e)).collect();
            let unused = unused_edges(&g).unwrap();
            for e in 0..g.edge_count() {
                let (b, w) = g.endpoints(e);
                let deletion_says_unused = !has_matching(g.vertex_count(), &edges, &[b, w]);
                assert_eq!(
                    unused.contains(&e),
                    deletion_says_unused,
                    "{name} edge {e}"
                );
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = make_grid(4, 4).unwrap();
        assert!(matches!(
            enumerate_dimer_covers_capped(&g, 10),
            Err(Error::TooLarge(_))
        ));
    }
}
