//! Closed SL3 webs as standalone embedded multigraphs: the half-edge
//! coloring trace, reducedness, and skein reduction to scalars.
//!
//! A web lives on the sphere: every face is contractible. Vertices carry a
//! counterclockwise rotation of incident edges; edges carry a multiplicity
//! in {1,2,3} and an SL3 transport black -> white. Vertexless closed strands
//! are kept separately as circles with their holonomies.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::connection::{MatrixLocalSystem, SqMatrix};
use crate::algebra::matrix::{det_rational, invert_rational, RingMatrix};
use crate::algebra::rational::Rational;
use crate::error::{Error, Result};
use crate::graph::PlanarBipartiteGraph;
use crate::oracle::Multiweb;

#[derive(Debug, Clone)]
pub struct WebVertex {
    pub black: bool,
    /// counterclockwise incident edge ids
    pub rotation: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct WebEdge {
    pub black: usize,
    pub white: usize,
    pub mult: u8,
    /// transport V_black -> V_white
    pub matrix: SqMatrix,
}

#[derive(Debug, Clone)]
pub struct Web {
    vertices: Vec<Option<WebVertex>>,
    edges: Vec<Option<WebEdge>>,
    /// holonomies of vertexless closed strands
    pub circles: Vec<SqMatrix>,
}

/// A directed edge side of a web.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct WDart {
    edge: usize,
    from_black: bool,
}

impl Web {
    pub fn empty() -> Self {
        Web { vertices: Vec::new(), edges: Vec::new(), circles: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.live_edges().next().is_none() && self.circles.is_empty()
    }

    /// Builds the web of a 3-multiweb inside an ambient graph, inheriting
    /// the rotation system restricted to positive-multiplicity edges.
    pub fn from_multiweb(
        g: &PlanarBipartiteGraph,
        m: &Multiweb,
        phi: &MatrixLocalSystem,
    ) -> Result<Self> {
        if m.order != 3 || !m.is_valid(g) {
            return Err(Error::WrongOrder("expected a 3-multiweb".into()));
        }
        let mut edge_map = vec![usize::MAX; g.edge_count()];
        let mut edges = Vec::new();
        for e in 0..g.edge_count() {
            if m.mult[e] > 0 {
                edge_map[e] = edges.len();
                let (b, w) = g.endpoints(e);
                edges.push(Some(WebEdge {
                    black: b,
                    white: w,
                    mult: m.mult[e],
                    matrix: phi.matrices[e].clone(),
                }));
            }
        }
        let vertices = (0..g.vertex_count())
            .map(|v| {
                let rotation: Vec<usize> = g
                    .rotation(v)
                    .iter()
                    .filter(|&&e| edge_map[e] != usize::MAX)
                    .map(|&e| edge_map[e])
                    .collect();
                Some(WebVertex { black: g.is_black(v), rotation })
            })
            .collect();
        Ok(Web { vertices, edges, circles: Vec::new() })
    }

    /// Builds a web from explicit parts (testing helper).
    pub fn from_parts(
        colors: &[bool],
        rotations: &[Vec<usize>],
        edges: Vec<(usize, usize, u8, SqMatrix)>,
    ) -> Self {
        Web {
            vertices: colors
                .iter()
                .zip(rotations)
                .map(|(&black, rot)| Some(WebVertex { black, rotation: rot.clone() }))
                .collect(),
            edges: edges
                .into_iter()
                .map(|(b, w, mult, matrix)| Some(WebEdge { black: b, white: w, mult, matrix }))
                .collect(),
            circles: Vec::new(),
        }
    }

    fn live_edges(&self) -> impl Iterator<Item = (usize, &WebEdge)> {
        self.edges.iter().enumerate().filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
    }

    fn live_vertices(&self) -> impl Iterator<Item = (usize, &WebVertex)> {
        self.vertices.iter().enumerate().filter_map(|(i, v)| v.as_ref().map(|v| (i, v)))
    }

    fn edge(&self, e: usize) -> &WebEdge {
        self.edges[e].as_ref().expect("live edge")
    }

    fn vertex(&self, v: usize) -> &WebVertex {
        self.vertices[v].as_ref().expect("live vertex")
    }

    fn other_end(&self, e: usize, v: usize) -> usize {
        let edge = self.edge(e);
        if edge.black == v {
            edge.white
        } else {
            edge.black
        }
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges().count()
    }

    pub fn vertex_count(&self) -> usize {
        self.live_vertices().count()
    }

    /// A vertex is trivalent when it has three incident multiplicity-1 edges.
    fn is_trivalent(&self, v: usize) -> bool {
        let vert = self.vertex(v);
        vert.rotation.len() == 3 && vert.rotation.iter().all(|&e| self.edge(e).mult == 1)
    }

    fn dart_head(&self, d: WDart) -> usize {
        let e = self.edge(d.edge);
        if d.from_black {
            e.white
        } else {
            e.black
        }
    }

    fn next_face_dart(&self, d: WDart) -> WDart {
        let v = self.dart_head(d);
        let rot = &self.vertex(v).rotation;
        let pos = rot.iter().position(|&e| e == d.edge).expect("edge in rotation");
        let e2 = rot[(pos + rot.len() - 1) % rot.len()];
        WDart { edge: e2, from_black: self.edge(e2).black == v }
    }

    /// Faces as dart walks, in deterministic discovery order.
    fn faces(&self) -> Vec<Vec<WDart>> {
        let mut seen: std::collections::BTreeSet<(usize, bool)> = Default::default();
        let mut faces = Vec::new();
        let live: Vec<usize> = self.live_edges().map(|(i, _)| i).collect();
        for &e in &live {
            for from_black in [false, true] {
                let start = WDart { edge: e, from_black };
                if seen.contains(&(e, from_black)) {
                    continue;
                }
                let mut walk = Vec::new();
                let mut d = start;
                loop {
                    seen.insert((d.edge, d.from_black));
                    walk.push(d);
                    d = self.next_face_dart(d);
                    if d == start {
                        break;
                    }
                }
                faces.push(walk);
            }
        }
        faces
    }

    /// True when no face bounded by the web has 0, 2 or 4 trivalent
    /// vertices. On the sphere every face counts; circles are never reduced.
    pub fn is_reduced(&self) -> bool {
        if !self.circles.is_empty() {
            return false;
        }
        for walk in self.faces() {
            let trivalent = walk
                .iter()
                .map(|d| {
                    let v = if d.from_black { self.edge(d.edge).black } else { self.edge(d.edge).white };
                    usize::from(self.is_trivalent(v))
                })
                .sum::<usize>();
            if trivalent == 0 || trivalent == 2 || trivalent == 4 {
                return false;
            }
        }
        true
    }

    /// Trace of the web with its SL3 transports: the signed sum over
    /// half-edge colorings, times Tr(holonomy) for each circle.
    ///
    /// Black-vertex assignments are enumerated; for fixed black sets the sum
    /// factorizes over white vertices.
    pub fn trace(&self) -> Rational {
        let mut total = Rational::one();
        for c in &self.circles {
            let mut tr = Rational::zero();
            for i in 0..c.rows() {
                tr += c.get(i, i);
            }
            total *= tr;
        }
        if total.is_zero() {
            return total;
        }
        let blacks: Vec<usize> =
            self.live_vertices().filter(|(_, v)| v.black).map(|(i, _)| i).collect();
        let whites: Vec<usize> =
            self.live_vertices().filter(|(_, v)| !v.black).map(|(i, _)| i).collect();
        if blacks.is_empty() {
            return total;
        }
        // per-edge color sets chosen by the black endpoints, as bitmasks
        let mut tsets = vec![0u8; self.edges.len()];
        let mut memo: std::collections::HashMap<(usize, u32), Rational> = Default::default();
        let sum = self.sum_black(&blacks, &whites, 0, &mut tsets, &mut memo);
        total * sum
    }

    fn sum_black(
        &self,
        blacks: &[usize],
        whites: &[usize],
        idx: usize,
        tsets: &mut Vec<u8>,
        memo: &mut std::collections::HashMap<(usize, u32), Rational>,
    ) -> Rational {
        if idx == blacks.len() {
            // whites factorize; their local sums depend only on the color
            // sets of their own incident edges, so memoize on that key
            let mut prod = Rational::one();
            for &w in whites {
                let mut key = 0u32;
                for (i, &e) in self.vertex(w).rotation.iter().enumerate() {
                    key |= u32::from(tsets[e]) << (8 * i);
                }
                let local = memo
                    .entry((w, key))
                    .or_insert_with(|| self.white_local_sum(w, tsets))
                    .clone();
                if local.is_zero() {
                    return Rational::zero();
                }
                prod *= local;
            }
            return prod;
        }
        let v = blacks[idx];
        let vert = self.vertex(v);
        let mults: Vec<u8> = vert.rotation.iter().map(|&e| self.edge(e).mult).collect();
        let mut acc = Rational::zero();
        for assignment in color_assignments(&mults) {
            for (slot, &e) in vert.rotation.iter().enumerate() {
                tsets[e] = assignment[slot];
            }
            let sgn = cyclic_sign(&assignment, true);
            let sub = self.sum_black(blacks, whites, idx + 1, tsets, memo);
            if sgn > 0 {
                acc += sub;
            } else {
                acc -= sub;
            }
        }
        acc
    }

    fn white_local_sum(&self, w: usize, tsets: &[u8]) -> Rational {
        let vert = self.vertex(w);
        let mults: Vec<u8> = vert.rotation.iter().map(|&e| self.edge(e).mult).collect();
        let mut acc = Rational::zero();
        for assignment in color_assignments(&mults) {
            let mut term = Rational::one();
            for (slot, &e) in vert.rotation.iter().enumerate() {
                let s_mask = assignment[slot]; // white side rows
                let t_mask = tsets[e]; // black side cols
                term *= minor_det(&self.edge(e).matrix, s_mask, t_mask);
                if term.is_zero() {
                    break;
                }
            }
            if term.is_zero() {
                continue;
            }
            let sgn = cyclic_sign(&assignment, false);
            if sgn > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }
}

/// All ways to split {1,2,3} into ordered sets of the given sizes, returned
/// as bitmasks per slot (bit i = color i+1).
fn color_assignments(mults: &[u8]) -> Vec<Vec<u8>> {
    let total: u8 = mults.iter().sum();
    debug_assert_eq!(total, 3);
    let mut out = Vec::new();
    let mut current = vec![0u8; mults.len()];
    fn rec(mults: &[u8], slot: usize, used: u8, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if slot == mults.len() {
            out.push(current.clone());
            return;
        }
        let need = mults[slot];
        let free: Vec<u8> = (0..3).filter(|i| used & (1 << i) == 0).collect();
        // choose `need` of the free colors
        let k = free.len();
        for mask in 0u8..(1 << k) {
            if mask.count_ones() as u8 != need {
                continue;
            }
            let mut bits = 0u8;
            for (i, &c) in free.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    bits |= 1 << c;
                }
            }
            current[slot] = bits;
            rec(mults, slot + 1, used | bits, current, out);
        }
    }
    rec(mults, 0, 0, &mut current, &mut out);
    out
}

/// Sign of the cyclic color word read counterclockwise: + when the colors
/// appear in cyclic order (1,2,3) at a black vertex, reversed at white.
/// Within a multi-color half-edge the colors count in increasing order at a
/// black vertex and decreasing order at a white one (the dual wedge pairing
/// contributes (-1)^{k(k-1)/2} per k-color half-edge).
fn cyclic_sign(assignment: &[u8], black: bool) -> i8 {
    let mut word = Vec::with_capacity(3);
    for &mask in assignment {
        let colors = (0..3u8).filter(|c| mask & (1 << c) != 0);
        if black {
            word.extend(colors);
        } else {
            let mut set: Vec<u8> = colors.collect();
            set.reverse();
            word.extend(set);
        }
    }
    debug_assert_eq!(word.len(), 3);
    // cyclic order (0,1,2)?
    let i = word.iter().position(|&c| c == 0).unwrap();
    let ccw = word[(i + 1) % 3] == 1;
    let sign = if ccw { 1 } else { -1 };
    if black {
        sign
    } else {
        -sign
    }
}

/// Minor of `m` with rows `s_mask` (white side) and columns `t_mask` (black
/// side), both read in increasing index order.
fn minor_det(m: &SqMatrix, s_mask: u8, t_mask: u8) -> Rational {
    let rows: Vec<usize> = (0..3).filter(|i| s_mask & (1 << i) != 0).collect();
    let cols: Vec<usize> = (0..3).filter(|i| t_mask & (1 << i) != 0).collect();
    debug_assert_eq!(rows.len(), cols.len());
    match rows.len() {
        1 => m.get(rows[0], cols[0]).clone(),
        2 => {
            m.get(rows[0], cols[0]) * m.get(rows[1], cols[1])
                - m.get(rows[0], cols[1]) * m.get(rows[1], cols[0])
        }
        3 => det_rational(m).expect("3x3"),
        _ => unreachable!("color sets have size 1..=3"),
    }
}

// ---------------------------------------------------------------------------
// skein reduction

#[derive(Debug, Clone, PartialEq, Eq)]
enum Site {
    Circle(usize),
    /// multiplicity-3 edge: an isolated doubled-theta component worth det=1
    Triple(usize),
    /// multiplicity-2 edge: splice the 1-2-1 chain through it
    Chain(usize),
    /// 2-gon face: both edges multiplicity 1
    Bigon(Vec<WDart>),
    /// 4-gon face with four distinct trivalent corners
    Square(Vec<WDart>),
}

fn find_site(web: &Web) -> Option<Site> {
    if !web.circles.is_empty() {
        return Some(Site::Circle(0));
    }
    if let Some((e, _)) = web.live_edges().find(|(_, edge)| edge.mult == 3) {
        return Some(Site::Triple(e));
    }
    if let Some((e, _)) = web.live_edges().find(|(_, edge)| edge.mult == 2) {
        return Some(Site::Chain(e));
    }
    let faces = web.faces();
    for walk in &faces {
        if walk.len() == 2 && walk[0].edge != walk[1].edge {
            return Some(Site::Bigon(walk.clone()));
        }
    }
    for walk in &faces {
        if walk.len() == 4 {
            return Some(Site::Square(walk.clone()));
        }
    }
    None
}

/// Tail vertex of a dart.
fn dart_tail(web: &Web, d: WDart) -> usize {
    let e = web.edge(d.edge);
    if d.from_black {
        e.black
    } else {
        e.white
    }
}

/// Core splice: delete `corners` and `deleted` edges, then re-route the
/// strands through `connectors` (edges kept only as transport), composing
/// matrices along each walk. Every corner must have exactly two surviving
/// incident edges.
fn splice(
    web: &Web,
    corners: &[usize],
    connectors: &[usize],
    deleted: &[usize],
) -> Web {
    let mut out = web.clone();
    let is_corner = |v: usize| corners.contains(&v);
    let consumed: Vec<usize> = {
        let mut c: Vec<usize> = connectors.to_vec();
        for &v in corners {
            for &e in &web.vertex(v).rotation {
                if !deleted.contains(&e) && !connectors.contains(&e) && !c.contains(&e) {
                    c.push(e); // legs
                }
            }
        }
        c.sort_unstable();
        c
    };
    let mut used = vec![false; web.edges.len()];
    for &e in deleted {
        used[e] = true;
    }

    // transport of edge `e` traversed out of vertex `v`
    let step = |e: usize, v: usize| -> SqMatrix {
        let edge = web.edge(e);
        if edge.black == v {
            edge.matrix.clone()
        } else {
            invert_rational(&edge.matrix).expect("SL3")
        }
    };
    let next_through_corner = |corner: usize, via: usize| -> usize {
        *web.vertex(corner)
            .rotation
            .iter()
            .find(|&&e| e != via && !deleted.contains(&e))
            .expect("corner has exactly two surviving edges")
    };

    // open strands: start from consumed edges with a non-corner endpoint
    for &start_edge in &consumed {
        if used[start_edge] {
            continue;
        }
        let edge = web.edge(start_edge);
        let start_vertex = if !is_corner(edge.black) {
            Some(edge.black)
        } else if !is_corner(edge.white) {
            Some(edge.white)
        } else {
            None
        };
        let Some(s) = start_vertex else { continue };
        let mut m: SqMatrix = RingMatrix::identity(3);
        let mut v = s;
        let mut e = start_edge;
        loop {
            used[e] = true;
            m = step(e, v).matmul(&m);
            let u = web.other_end(e, v);
            if !is_corner(u) {
                // finished: new edge from s to u
                let new_id = out.edges.len();
                let (black, white, matrix) = if !web.vertex(s).black {
                    // walked white -> black: store the reverse transport
                    (u, s, invert_rational(&m).expect("SL3"))
                } else {
                    (s, u, m.clone())
                };
                out.edges.push(Some(WebEdge { black, white, mult: 1, matrix }));
                // splice into the rotations of both endpoints
                for (vtx, via) in [(s, start_edge), (u, e)] {
                    let rot = &mut out.vertices[vtx].as_mut().expect("live").rotation;
                    let pos = rot.iter().position(|&x| x == via).expect("incident");
                    rot[pos] = new_id;
                }
                break;
            }
            let nxt = next_through_corner(u, e);
            v = u;
            e = nxt;
        }
    }
    // closed strands among corners become circles
    for &start_edge in &consumed {
        if used[start_edge] {
            continue;
        }
        let mut base = web.edge(start_edge).black;
        // deterministic base point: lowest corner on the cycle
        {
            let mut v = base;
            let mut e = start_edge;
            let mut best = v;
            loop {
                let u = web.other_end(e, v);
                if u == base {
                    break;
                }
                best = best.min(u);
                e = next_through_corner(u, e);
                v = u;
            }
            base = best.min(base);
        }
        let first = *web
            .vertex(base)
            .rotation
            .iter()
            .filter(|&&e| !deleted.contains(&e))
            .min()
            .expect("two surviving edges");
        let mut m: SqMatrix = RingMatrix::identity(3);
        let mut v = base;
        let mut e = first;
        loop {
            used[e] = true;
            m = step(e, v).matmul(&m);
            let u = web.other_end(e, v);
            if u == base {
                break;
            }
            e = next_through_corner(u, e);
            v = u;
        }
        out.circles.push(m);
    }
    for &e in deleted {
        out.edges[e] = None;
    }
    for &e in &consumed {
        out.edges[e] = None;
    }
    for &v in corners {
        out.vertices[v] = None;
    }
    out
}

fn apply_site(web: &Web, site: &Site) -> Vec<(Web, BigInt)> {
    match site {
        Site::Circle(i) => {
            let mut w = web.clone();
            w.circles.remove(*i);
            vec![(w, BigInt::from(3))]
        }
        Site::Triple(e) => {
            let mut w = web.clone();
            let edge = w.edge(*e).clone();
            w.vertices[edge.black] = None;
            w.vertices[edge.white] = None;
            w.edges[*e] = None;
            vec![(w, BigInt::one())] // det of the SL3 transport is 1
        }
        Site::Chain(e) => {
            let edge = web.edge(*e);
            let corners = [edge.black, edge.white];
            vec![(splice(web, &corners, &[*e], &[]), BigInt::one())]
        }
        Site::Bigon(walk) => {
            let (e0, e1) = (walk[0].edge.min(walk[1].edge), walk[0].edge.max(walk[1].edge));
            let edge = web.edge(e0);
            let corners = [edge.black, edge.white];
            vec![(splice(web, &corners, &[e0], &[e1]), BigInt::from(2))]
        }
        Site::Square(walk) => {
            let corners: Vec<usize> = walk.iter().map(|&d| dart_tail(web, d)).collect();
            let edges: Vec<usize> = walk.iter().map(|d| d.edge).collect();
            let mut out = Vec::new();
            for class in 0..2usize {
                let connectors = [edges[class], edges[class + 2]];
                let deleted = [edges[1 - class], edges[3 - class]];
                out.push((splice(web, &corners, &connectors, &deleted), BigInt::one()));
            }
            out
        }
    }
}

const SKEIN_STEP_CAP: usize = 10_000;

/// Reduces a web by the skein relations (loop x3, bigon x2, chain and triple
/// simplification x1, square resolution 1+1), applied in a fixed
/// deterministic order. Returns the reduced webs with coefficients; a fully
/// reducible (closed planar) web comes back as the empty web and a scalar.
pub fn skein_reduce(web: &Web) -> Result<Vec<(Web, BigInt)>> {
    let mut queue: Vec<(Web, BigInt)> = vec![(web.clone(), BigInt::one())];
    let mut done: Vec<(Web, BigInt)> = Vec::new();
    let mut steps = 0;
    while let Some((w, coeff)) = queue.pop() {
        steps += 1;
        if steps > SKEIN_STEP_CAP {
            return Err(Error::NonTermination(SKEIN_STEP_CAP));
        }
        match find_site(&w) {
            None => {
                if w.is_empty() {
                    if let Some(slot) =
                        done.iter_mut().find(|(d, _)| d.is_empty())
                    {
                        slot.1 += coeff;
                    } else {
                        done.push((w, coeff));
                    }
                } else {
                    done.push((w, coeff));
                }
            }
            Some(site) => {
                for (next, factor) in apply_site(&w, &site) {
                    queue.push((next, &coeff * factor));
                }
            }
        }
    }
    Ok(done)
}

/// `sum coeff * trace(web)` over a reduction output.
pub fn reduction_trace(parts: &[(Web, BigInt)]) -> Rational {
    parts
        .iter()
        .map(|(w, c)| Rational::from_integer(c.clone()) * w.trace())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::connection::{gauge_connection, random_sln};
    use crate::algebra::rational::int;
    use crate::corpus;
    use crate::oracle::{enumerate_multiwebs, tait_colorings};
    use num_traits::Signed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity3() -> SqMatrix {
        RingMatrix::identity(3)
    }

    fn theta_web(mats: [SqMatrix; 3]) -> Web {
        let [m0, m1, m2] = mats;
        Web::from_parts(
            &[true, false],
            &[vec![1, 0, 2], vec![0, 1, 2]],
            vec![(0, 1, 1, m0), (0, 1, 1, m1), (0, 1, 1, m2)],
        )
    }

    #[test]
    fn theta_identity_trace_matches_tait_count() {
        let w = theta_web([identity3(), identity3(), identity3()]);
        assert_eq!(w.trace().abs(), int(6));
    }

    #[test]
    fn tripled_edge_trace_is_unit() {
        let w = Web::from_parts(
            &[true, false],
            &[vec![0], vec![0]],
            vec![(0, 1, 3, identity3())],
        );
        assert_eq!(w.trace().abs(), int(1));
    }

    #[test]
    fn gauge_invariance_of_web_trace() {
        // trace under a pure-gauge connection equals the identity trace
        let entry = corpus::theta();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let phi = gauge_connection(&entry.graph, 3, &mut rng);
            let m = Multiweb { order: 3, mult: vec![1, 1, 1] };
            let w = Web::from_multiweb(&entry.graph, &m, &phi).unwrap();
            assert_eq!(w.trace().abs(), int(6));
        }
    }

    #[test]
    fn reducedness_checks() {
        assert!(Web::empty().is_reduced());
        let mut circle_only = Web::empty();
        circle_only.circles.push(identity3());
        assert!(!circle_only.is_reduced());
        let theta = theta_web([identity3(), identity3(), identity3()]);
        assert!(!theta.is_reduced());
    }

    #[test]
    fn theta_reduces_to_scalar_six() {
        let theta = theta_web([identity3(), identity3(), identity3()]);
        let parts = skein_reduce(&theta).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(parts[0].0.is_empty());
        assert_eq!(parts[0].1, BigInt::from(6));
    }

    #[test]
    fn circle_alone_reduces_to_three() {
        let mut w = Web::empty();
        w.circles.push(identity3());
        let parts = skein_reduce(&w).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(parts[0].0.is_empty());
        assert_eq!(parts[0].1, BigInt::from(3));
    }

    #[test]
    fn already_reduced_returns_itself() {
        let w = Web::empty();
        let parts = skein_reduce(&w).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, BigInt::one());
    }

    #[test]
    fn chain_simplification_preserves_trace_under_flat_connections() {
        // 1-2-1 chain around C4 with a gauge connection
        let entry = corpus::c4();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let phi = gauge_connection(&entry.graph, 3, &mut rng);
            // C4 edges in cyclic order: 0 (bottom), 3 (right), 1 (top), 2 (left)
            let mut mult = vec![0u8; 4];
            mult[0] = 1;
            mult[3] = 2;
            mult[1] = 1;
            mult[2] = 2;
            let m = Multiweb { order: 3, mult };
            let w = Web::from_multiweb(&entry.graph, &m, &phi).unwrap();
            let before = w.trace();
            let parts = skein_reduce(&w).unwrap();
            assert_eq!(reduction_trace(&parts), before);
        }
    }

    #[test]
    fn single_moves_preserve_trace_under_flat_connections() {
        let entry = corpus::theta();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let phi = gauge_connection(&entry.graph, 3, &mut rng);
            let m = Multiweb { order: 3, mult: vec![1, 1, 1] };
            let w = Web::from_multiweb(&entry.graph, &m, &phi).unwrap();
            let before = w.trace();
            // one bigon move only
            let site = find_site(&w).unwrap();
            let parts = apply_site(&w, &site);
            let after: Rational = parts
                .iter()
                .map(|(nw, c)| Rational::from_integer(c.clone()) * nw.trace())
                .sum();
            assert_eq!(after, before);
        }
    }

    #[test]
    fn cube_web_reduces_to_its_tait_count() {
        // the 3-multiweb with every edge of the cube graph at multiplicity 1
        let entry = corpus::annulus_w2(); // cube graph drawn on the annulus
        let g = &entry.graph;
        let all_ones = Multiweb { order: 3, mult: vec![1; g.edge_count()] };
        let tait = tait_colorings(g, &all_ones).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let phi = gauge_connection(g, 3, &mut rng);
            let w = Web::from_multiweb(g, &all_ones, &phi).unwrap();
            assert_eq!(w.trace().abs(), int(tait as i64));
            let parts = skein_reduce(&w).unwrap();
            assert_eq!(reduction_trace(&parts).abs(), int(tait as i64));
        }
    }

    #[test]
    fn reduction_preserves_trace_for_all_2x3_multiwebs_under_gauge() {
        let g = corpus::grid(2, 3, "grid2x3").graph;
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let phi = gauge_connection(&g, 3, &mut rng);
        for m in enumerate_multiwebs(&g, 3).unwrap() {
            let w = Web::from_multiweb(&g, &m, &phi).unwrap();
            let before = w.trace();
            let parts = skein_reduce(&w).unwrap();
            assert_eq!(reduction_trace(&parts), before);
        }
    }

    #[test]
    fn random_sln_sanity() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let m = random_sln(3, &mut rng);
        assert_eq!(det_rational(&m).unwrap(), int(1));
    }
}
