//! Planar bipartite graphs with an explicit combinatorial embedding.
//!
//! The embedding is a rotation system: for each vertex, the counterclockwise
//! cyclic order of its incident edges. Faces are derived by dart tracing and
//! validated against the Euler formula. Torus grids are carried by the same
//! struct but flagged, with no faces; they are enumeration-only.

use std::collections::VecDeque;

use crate::algebra::rational::{parse_rational, Rational};
use crate::error::{Error, Result};
use num_traits::One;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    Plane,
    Torus,
}

/// A directed edge side: `from_black` means the dart leaves the black endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dart {
    pub edge: usize,
    pub from_black: bool,
}

impl Dart {
    pub fn index(&self) -> usize {
         2 * self.edge + usize::from(self.from_black)
    }
}

#[derive(Debug, Clone)]
pub struct Face {
    pub id: usize,
    /// Cyclic boundary walk; bounded faces are traced counterclockwise.
    pub walk: Vec<Dart>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.walk.iter().map(|d| d.edge)
    }
}

#[derive(Debug, Clone)]
pub struct PlanarBipartiteGraph {
    colors: Vec<Color>,
    /// edge id -> (black endpoint, white endpoint)
    edges: Vec<(usize, usize)>,
    rotations: Vec<Vec<usize>>,
    faces: Vec<Face>,
    outer_face: usize,
    /// dart index -> face id (empty for torus graphs)
    face_of_dart: Vec<usize>,
    surface: Surface,
}

/// How to pick the outer face after tracing.
pub enum OuterRule {
    /// Face index in trace order, from an input file or a constructor.
    Explicit(usize),
    /// Longest face, ties broken by the smallest contained edge id, then by
    /// trace order.
    MaxLength,
    /// The unique face with negative signed area under the given coordinates.
    ByCoordinates(Vec<(f64, f64)>),
}

impl PlanarBipartiteGraph {
    pub fn new(
        colors: Vec<Color>,
        edges: Vec<(usize, usize)>,
        rotations: Vec<Vec<usize>>,
        outer: OuterRule,
    ) -> Result<Self> {
        validate_structure(&colors, &edges, &rotations)?;
        let mut g = PlanarBipartiteGraph {
            colors,
            edges,
            rotations,
            faces: Vec::new(),
            outer_face: 0,
            face_of_dart: Vec::new(),
            surface: Surface::Plane,
        };
        g.trace_faces()?;
        g.outer_face = g.pick_outer(outer)?;
        Ok(g)
    }

    /// Torus grids skip face tracing entirely.
    fn new_torus(colors: Vec<Color>, edges: Vec<(usize, usize)>, rotations: Vec<Vec<usize>>) -> Result<Self> {
        validate_structure(&colors, &edges, &rotations)?;
        Ok(PlanarBipartiteGraph {
            colors,
            edges,
            rotations,
            faces: Vec::new(),
            outer_face: usize::MAX,
            face_of_dart: Vec::new(),
            surface: Surface::Torus,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn is_black(&self, v: usize) -> bool {
        self.colors[v] == Color::Black
    }

    pub fn black_end(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn white_end(&self, e: usize) -> usize {
        self.edges[e].1
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (b, w) = self.edges[e];
        if v == b {
            w
        } else {
            b
        }
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotations[v]
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.rotations[v]
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn is_torus(&self) -> bool {
        self.surface == Surface::Torus
    }

    pub fn require_planar(&self) -> Result<()> {
        if self.is_torus() {
            Err(Error::TorusGraph)
        } else {
            Ok(())
        }
    }

    pub fn black_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.is_black(v)).collect()
    }

    pub fn white_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.is_black(v)).collect()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn outer_face(&self) -> usize {
        self.outer_face
    }

    pub fn is_outer(&self, face: usize) -> bool {
        face == self.outer_face
    }

    pub fn bounded_faces(&self) -> impl Iterator<Item = &Face> {
        let outer = self.outer_face;
        self.faces.iter().filter(move |f| f.id != outer)
    }

    pub fn face_of(&self, dart: Dart) -> usize {
        self.face_of_dart[dart.index()]
    }

    /// `|E| - |V| + 1` for a connected graph; equals the bounded face count.
    pub fn cycle_dimension(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// The tail vertex of a dart.
    pub fn dart_tail(&self, d: Dart) -> usize {
        if d.from_black {
            self.black_end(d.edge)
        } else {
            self.white_end(d.edge)
        }
    }

    /// The head vertex of a dart.
    pub fn dart_head(&self, d: Dart) -> usize {
        if d.from_black {
            self.white_end(d.edge)
        } else {
            self.black_end(d.edge)
        }
    }

    /// Next dart of the face walk: arrive at the head of `d`, leave along the
    /// previous edge in counterclockwise order (i.e. the next one clockwise).
    fn next_face_dart(&self, d: Dart) -> Dart {
        let v = self.dart_head(d);
        let rot = &self.rotations[v];
        let pos = rot
            .iter()
            .position(|&e| e == d.edge)
            .expect("rotation validated");
        let e2 = rot[(pos + rot.len() - 1) % rot.len()];
        Dart { edge: e2, from_black: self.black_end(e2) == v }
    }

    fn trace_faces(&mut self) -> Result<()> {
        let nd = 2 * self.edge_count();
        let mut face_of = vec![usize::MAX; nd];
        let mut faces = Vec::new();
        for start_idx in 0..nd {
            if face_of[start_idx] != usize::MAX {
                continue;
            }
            let start = Dart { edge: start_idx / 2, from_black: start_idx % 2 == 1 };
            let id = faces.len();
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                face_of[d.index()] = id;
                walk.push(d);
                d = self.next_face_dart(d);
                if d == start {
                    break;
                }
                if walk.len() > nd {
                    return Err(Error::BadRotation("face walk does not close".into()));
                }
            }
            faces.push(Face { id, walk });
        }
        let (v, e, f) = (self.vertex_count(), self.edge_count(), faces.len());
        if v + f != e + 2 {
            return Err(Error::NonPlanarEmbedding { v, e, f });
        }
        for face in &faces {
            debug_assert!(face.len() % 2 == 0, "odd face in a bipartite graph");
        }
        self.faces = faces;
        self.face_of_dart = face_of;
        Ok(())
    }

    fn pick_outer(&self, rule: OuterRule) -> Result<usize> {
        match rule {
            OuterRule::Explicit(id) => {
                if id < self.faces.len() {
                    Ok(id)
                } else {
                    Err(Error::Parse(format!(
                        "outer face index {id} out of range (graph has {} faces)",
                        self.faces.len()
                    )))
                }
            }
            OuterRule::MaxLength => Ok(self
                .faces
                .iter()
                .max_by(|a, b| {
                    a.len()
                        .cmp(&b.len())
                        .then_with(|| {
                            let ma = a.edge_ids().min().unwrap_or(usize::MAX);
                            let mb = b.edge_ids().min().unwrap_or(usize::MAX);
                            mb.cmp(&ma)
                        })
                        .then_with(|| b.id.cmp(&a.id))
                })
                .expect("at least one face")
                .id),
            OuterRule::ByCoordinates(coords) => {
                if self.faces.len() == 1 {
                    return Ok(0); // trees: the unique face is the outer one
                }
                let mut best = None;
                for face in &self.faces {
                    let mut area = 0.0;
                    for d in &face.walk {
                        let (xa, ya) = coords[self.dart_tail(*d)];
                        let (xb, yb) = coords[self.dart_head(*d)];
                        area += xa * yb - xb * ya;
                    }
                    if area < 0.0 {
                        if best.is_some() {
                            return Err(Error::BadRotation(
                                "multiple clockwise faces; embedding is inconsistent".into(),
                            ));
                        }
                        best = Some(face.id);
                    }
                }
                best.ok_or_else(|| Error::BadRotation("no clockwise face found".into()))
            }
        }
    }
}

fn validate_structure(
    colors: &[Color],
    edges: &[(usize, usize)],
    rotations: &[Vec<usize>],
) -> Result<()> {
    let nv = colors.len();
    if nv == 0 || edges.is_empty() {
        return Err(Error::NotConnected);
    }
    for (id, &(b, w)) in edges.iter().enumerate() {
        if b >= nv || w >= nv {
            return Err(Error::Parse(format!("edge {id} references a missing vertex")));
        }
        if b == w {
            return Err(Error::NotBipartite(format!("edge {id} is a self-loop")));
        }
        if colors[b] != Color::Black || colors[w] != Color::White {
            return Err(Error::NotBipartite(format!(
                "edge {id} must join a black vertex to a white vertex"
            )));
        }
    }
    if rotations.len() != nv {
        return Err(Error::BadRotation("one rotation list per vertex required".into()));
    }
    // rotation lists contain exactly the incident edges, each once
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (id, &(b, w)) in edges.iter().enumerate() {
        incident[b].push(id);
        incident[w].push(id);
    }
    for v in 0..nv {
        let mut a = rotations[v].clone();
        let mut b = incident[v].clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::BadRotation(format!(
                "rotation at vertex {v} does not list its incident edges exactly once"
            )));
        }
    }
    // connectivity
    let mut seen = vec![false; nv];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &e in &incident[v] {
            let u = if edges[e].0 == v { edges[e].1 } else { edges[e].0 };
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    if count != nv {
        return Err(Error::NotConnected);
    }
    Ok(())
}

/// `rows x cols` rectangular grid, vertex `(x, y)` at id `y*cols + x`,
/// black when `x + y` is even. `make_grid(2, 3)` is the 2-row, 3-column
/// grid with three dimer covers.
pub fn make_grid(rows: usize, cols: usize) -> Result<PlanarBipartiteGraph> {
    if rows == 0 || cols == 0 || (rows * cols) % 2 != 0 {
        return Err(Error::OddVertexCount(rows * cols));
    }
    let vid = |x: usize, y: usize| y * cols + x;
    let h_count = rows * (cols - 1);
    let h_id = |x: usize, y: usize| y * (cols - 1) + x; // (x,y)-(x+1,y)
    let v_id = |x: usize, y: usize| h_count + y * cols + x; // (x,y)-(x,y+1)

    let colors: Vec<Color> = (0..rows * cols)
        .map(|id| {
            let (x, y) = (id % cols, id / cols);
            if (x + y) % 2 == 0 {
                Color::Black
            } else {
                Color::White
            }
        })
        .collect();

    let mut edges = Vec::new();
    for y in 0..rows {
        for x in 0..cols - 1 {
            edges.push(orient(&colors, vid(x, y), vid(x + 1, y)));
        }
    }
    for y in 0..rows - 1 {
        for x in 0..cols {
            edges.push(orient(&colors, vid(x, y), vid(x, y + 1)));
        }
    }

    let mut rotations = vec![Vec::new(); rows * cols];
    for y in 0..rows {
        for x in 0..cols {
            let mut rot = Vec::new();
            if x + 1 < cols {
                rot.push(h_id(x, y)); // east
            }
            if y + 1 < rows {
                rot.push(v_id(x, y)); // north
            }
            if x > 0 {
                rot.push(h_id(x - 1, y)); // west
            }
            if y > 0 {
                rot.push(v_id(x, y - 1)); // south
            }
            rotations[vid(x, y)] = rot;
        }
    }

    let coords: Vec<(f64, f64)> = (0..rows * cols)
        .map(|id| ((id % cols) as f64, (id / cols) as f64))
        .collect();
    PlanarBipartiteGraph::new(colors, edges, rotations, OuterRule::ByCoordinates(coords))
}

fn orient(colors: &[Color], u: usize, v: usize) -> (usize, usize) {
    if colors[u] == Color::Black {
        (u, v)
    } else {
        (v, u)
    }
}

/// `n x n` grid on the torus (n even). Doubled edges appear for n = 2.
/// Flagged as a torus graph: enumeration-only, no Kasteleyn support.
pub fn make_torus_grid(n: usize) -> Result<PlanarBipartiteGraph> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::OddTorusSide(n));
    }
    let vid = |x: usize, y: usize| y * n + x;
    let colors: Vec<Color> = (0..n * n)
        .map(|id| {
            let (x, y) = (id % n, id / n);
            if (x + y) % 2 == 0 {
                Color::Black
            } else {
                Color::White
            }
        })
        .collect();
    let mut edges = Vec::new();
    // right edges: id = y*n + x, then up edges: id = n^2 + y*n + x
    for y in 0..n {
        for x in 0..n {
            edges.push(orient(&colors, vid(x, y), vid((x + 1) % n, y)));
        }
    }
    for y in 0..n {
        for x in 0..n {
            edges.push(orient(&colors, vid(x, y), vid(x, (y + 1) % n)));
        }
    }
    let right = |x: usize, y: usize| y * n + x;
    let up = |x: usize, y: usize| n * n + y * n + x;
    let mut rotations = vec![Vec::new(); n * n];
    for y in 0..n {
        for x in 0..n {
            rotations[vid(x, y)] = vec![
                right(x, y),
                up(x, y),
                right((x + n - 1) % n, y),
                up(x, (y + n - 1) % n),
            ];
        }
    }
    PlanarBipartiteGraph::new_torus(colors, edges, rotations)
}

/// Displacement of a torus-grid edge, oriented out of vertex `v`.
pub fn torus_edge_step(n: usize, edge: usize, v: usize) -> (i64, i64) {
    let right = edge < n * n;
    let e = if right { edge } else { edge - n * n };
    let (x, y) = (e % n, e / n);
    let from_origin = v == y * n + x;
    match (right, from_origin) {
        (true, true) => (1, 0),
        (true, false) => (-1, 0),
        (false, true) => (0, 1),
        (false, false) => (0, -1),
    }
}

/// Parses the `dimergraph v1` text format. Returns the graph together with
/// the edge weights (default 1).
pub fn parse_graph(text: &str) -> Result<(PlanarBipartiteGraph, Vec<Rational>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some("dimergraph v1") => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header 'dimergraph v1', got {other:?}"
            )))
        }
    }
    let mut colors: Vec<(usize, Color)> = Vec::new();
    let mut edges: Vec<(usize, usize, usize, Rational)> = Vec::new();
    let mut rotations: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut outer: Option<usize> = None;
    for line in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let id: usize = parse_tok(tok.next(), "vertex id")?;
                let color = match tok.next() {
                    Some("b") => Color::Black,
                    Some("w") => Color::White,
                    other => return Err(Error::Parse(format!("vertex color must be b or w, got {other:?}"))),
                };
                colors.push((id, color));
            }
            Some("e") => {
                let id: usize = parse_tok(tok.next(), "edge id")?;
                let b: usize = parse_tok(tok.next(), "black endpoint")?;
                let w: usize = parse_tok(tok.next(), "white endpoint")?;
                let weight = match tok.next() {
                    Some(t) => parse_rational(t)?,
                    None => Rational::one(),
                };
                edges.push((id, b, w, weight));
            }
            Some("r") => {
                let v: usize = parse_tok(tok.next(), "rotation vertex id")?;
                let rot: Vec<usize> = tok
                    .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad edge id {t:?} in rotation"))))
                    .collect::<Result<_>>()?;
                rotations.push((v, rot));
            }
            Some("outer") => {
                outer = Some(parse_tok(tok.next(), "outer face index")?);
            }
            Some(other) => return Err(Error::Parse(format!("unknown record {other:?}"))),
            None => {}
        }
    }
    let nv = colors.len();
    let ne = edges.len();
    let mut color_vec = vec![None; nv];
    for (id, c) in colors {
        if id >= nv || color_vec[id].is_some() {
            return Err(Error::Parse(format!("vertex ids must be 0..{} without repeats", nv - 1)));
        }
        color_vec[id] = Some(c);
    }
    let color_vec: Vec<Color> = color_vec.into_iter().map(|c| c.unwrap()).collect();
    let mut edge_vec = vec![None; ne];
    let mut weight_vec = vec![None; ne];
    for (id, b, w, c) in edges {
        if id >= ne || edge_vec[id].is_some() {
            return Err(Error::Parse(format!("edge ids must be 0..{} without repeats", ne - 1)));
        }
        edge_vec[id] = Some((b, w));
        weight_vec[id] = Some(c);
    }
    let edge_vec: Vec<(usize, usize)> = edge_vec.into_iter().map(|e| e.unwrap()).collect();
    let weight_vec: Vec<Rational> = weight_vec.into_iter().map(|w| w.unwrap()).collect();
    let mut rot_vec = vec![None; nv];
    for (v, rot) in rotations {
        if v >= nv || rot_vec[v].is_some() {
            return Err(Error::BadRotation(format!("rotation vertex {v} repeated or out of range")));
        }
        rot_vec[v] = Some(rot);
    }
    let rot_vec: Vec<Vec<usize>> = rot_vec
        .into_iter()
        .enumerate()
        .map(|(v, r)| r.ok_or_else(|| Error::BadRotation(format!("missing rotation for vertex {v}"))))
        .collect::<Result<_>>()?;
    let rule = match outer {
        Some(id) => OuterRule::Explicit(id),
        None => OuterRule::MaxLength,
    };
    let g = PlanarBipartiteGraph::new(color_vec, edge_vec, rot_vec, rule)?;
    Ok((g, weight_vec))
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what}")))
}

/// Writes the `dimergraph v1` format (weights included when not all 1).
pub fn format_graph(g: &PlanarBipartiteGraph, weights: Option<&[Rational]>) -> String {
    use std::fmt::Write;
    let mut out = String::from("dimergraph v1\n");
    for v in 0..g.vertex_count() {
        let c = if g.is_black(v) { 'b' } else { 'w' };
        writeln!(out, "v {v} {c}").unwrap();
    }
    for e in 0..g.edge_count() {
        let (b, w) = g.endpoints(e);
        match weights {
            Some(ws) if !ws[e].is_one() => {
                writeln!(out, "e {e} {b} {w} {}", crate::algebra::rational::format_rational(&ws[e])).unwrap()
            }
            _ => writeln!(out, "e {e} {b} {w}").unwrap(),
        }
    }
    for v in 0..g.vertex_count() {
        let rot: Vec<String> = g.rotation(v).iter().map(|e| e.to_string()).collect();
        writeln!(out, "r {v} {}", rot.join(" ")).unwrap();
    }
    if !g.is_torus() {
        writeln!(out, "outer {}", g.outer_face()).unwrap();
    }
    out
}
