//! Built-in test graphs shared by the CLI, the test suites and the Python
//! bindings.

use crate::error::{Error, Result};
use crate::graph::{make_grid, Color, OuterRule, PlanarBipartiteGraph};

pub struct CorpusEntry {
    pub name: &'static str,
    pub graph: PlanarBipartiteGraph,
    /// Bounded faces acting as punctures for annulus/pants computations.
    pub holes: Vec<usize>,
}

impl CorpusEntry {
    fn plain(name: &'static str, graph: PlanarBipartiteGraph) -> Self {
        CorpusEntry { name, graph, holes: Vec::new() }
    }
}

pub fn k2() -> CorpusEntry {
    CorpusEntry::plain("k2", make_grid(1, 2).unwrap())
}

pub fn c4() -> CorpusEntry {
    CorpusEntry::plain("c4", make_grid(2, 2).unwrap())
}

pub fn p4() -> CorpusEntry {
    CorpusEntry::plain("p4", make_grid(1, 4).unwrap())
}

pub fn grid(rows: usize, cols: usize, name: &'static str) -> CorpusEntry {
    CorpusEntry::plain(name, make_grid(rows, cols).unwrap())
}

/// C4 viewed on an annulus: the single bounded square face is the hole.
pub fn annulus_c4() -> CorpusEntry {
    let graph = make_grid(2, 2).unwrap();
    let hole = graph
        .bounded_faces()
        .map(|f| f.id)
        .next()
        .expect("C4 has one bounded face");
    CorpusEntry { name: "annulus_c4", graph, holes: vec![hole] }
}

/// Width-2 annulus: two concentric 4-cycles joined by 4 spokes (the cube
/// graph drawn on an annulus). The inner square face is the hole.
pub fn annulus_w2() -> CorpusEntry {
    // inner vertices 0..4 (black for even k), outer 4..8 (black for odd k)
    let colors: Vec<Color> = (0..8)
        .map(|v| {
            let k = v % 4;
            let inner = v < 4;
            if (k % 2 == 0) == inner {
                Color::Black
            } else {
                Color::White
            }
        })
        .collect();
    let orient = |u: usize, v: usize| {
        if colors[u] == Color::Black {
            (u, v)
        } else {
            (v, u)
        }
    };
    let mut edges = Vec::new();
    for k in 0..4 {
        edges.push(orient(k, (k + 1) % 4)); // inner cycle, ids 0..4
    }
    for k in 0..4 {
        edges.push(orient(4 + k, 4 + (k + 1) % 4)); // outer cycle, ids 4..8
    }
    for k in 0..4 {
        edges.push(orient(k, 4 + k)); // spokes, ids 8..12
    }
    let mut rotations = vec![Vec::new(); 8];
    for k in 0..4 {
        rotations[k] = vec![8 + k, k, (k + 3) % 4];
        rotations[4 + k] = vec![4 + k, 8 + k, 4 + (k + 3) % 4];
    }
    let coords: Vec<(f64, f64)> = (0..8)
        .map(|v| {
            let k = (v % 4) as f64;
            let r = if v < 4 { 1.0 } else { 2.0 };
            let theta = std::f64::consts::FRAC_PI_2 * k + std::f64::consts::FRAC_PI_4;
            (r * theta.cos(), r * theta.sin())
        })
        .collect();
    let graph =
        PlanarBipartiteGraph::new(colors, edges, rotations, OuterRule::ByCoordinates(coords))
            .unwrap();
    let hole = graph
        .bounded_faces()
        .find(|f| f.walk.iter().all(|d| d.edge < 4))
        .expect("inner square face")
        .id;
    CorpusEntry { name: "annulus_w2", graph, holes: vec![hole] }
}

/// 2x5 grid on a pair of pants: the first and last of its four bounded cells
/// are the two holes.
pub fn pants_2x5() -> CorpusEntry {
    let graph = make_grid(2, 5).unwrap();
    // verticals have ids 8..13; the cell between columns k,k+1 contains
    // verticals 8+k and 9+k. Identify cells by their smallest vertical id.
    let mut cells: Vec<(usize, usize)> = graph
        .bounded_faces()
        .map(|f| {
            let min_vertical = f.edge_ids().filter(|&e| e >= 8).min().unwrap();
            (min_vertical, f.id)
        })
        .collect();
    cells.sort_unstable();
    let holes = vec![cells[0].1, cells[3].1];
    CorpusEntry { name: "pants_2x5", graph, holes }
}

/// Degenerate graph: two squares whose
/// white (resp. black) corners saturate the Hall condition, joined by two
/// diagonal-looking edges that appear in no dimer cover. Cycle dimension 3,
/// matching polytope dimension 2.
pub fn degenerate() -> CorpusEntry {
    // left square on vertices 0..4, right square on 4..8, joins 1-4 and 3-6.
    // Blacks 0 and 2 see only whites 1 and 3, so both join edges are unused.
    let colors = vec![
        Color::Black, // 0 = b1 at (0,1)
        Color::White, // 1 = w1 at (1,2)
        Color::Black, // 2 = b2 at (1,1)
        Color::White, // 3 = w2 at (1,0)
        Color::Black, // 4 = b3 at (3,2)
        Color::White, // 5 = w3 at (4,1)
        Color::Black, // 6 = b4 at (3,0)
        Color::White, // 7 = w4 at (3,1)
    ];
    let edges = vec![
        (0, 1), // 0: b1-w1
        (2, 1), // 1: b2-w1
        (2, 3), // 2: b2-w2
        (0, 3), // 3: b1-w2
        (4, 5), // 4: b3-w3
        (6, 5), // 5: b4-w3
        (6, 7), // 6: b4-w4
        (4, 7), // 7: b3-w4
        (4, 1), // 8: join w1-b3 (unused)
        (6, 3), // 9: join w2-b4 (unused)
    ];
    let rotations = vec![
        vec![0, 3],
        vec![8, 0, 1],
        vec![1, 2],
        vec![9, 2, 3],
        vec![8, 7, 4],
        vec![4, 5],
        vec![5, 6, 9],
        vec![7, 6],
    ];
    let coords = vec![
        (0.0, 1.0),
        (1.0, 2.0),
        (1.0, 1.0),
        (1.0, 0.0),
        (3.0, 2.0),
        (4.0, 1.0),
        (3.0, 0.0),
        (3.0, 1.0),
    ];
    let graph =
        PlanarBipartiteGraph::new(colors, edges, rotations, OuterRule::ByCoordinates(coords))
            .unwrap();
    CorpusEntry::plain("degenerate", graph)
}

/// Theta graph: two vertices joined by three parallel edges.
pub fn theta() -> CorpusEntry {
    let colors = vec![Color::Black, Color::White];
    let edges = vec![(0, 1), (0, 1), (0, 1)];
    let rotations = vec![vec![1, 0, 2], vec![0, 1, 2]];
    // face 1 is bounded by the two outermost arcs in the intended drawing
    let graph =
        PlanarBipartiteGraph::new(colors, edges, rotations, OuterRule::Explicit(1)).unwrap();
    CorpusEntry::plain("theta", graph)
}

/// All planar corpus graphs (torus grids are built on demand).
pub fn all() -> Vec<CorpusEntry> {
    vec![
        k2(),
        c4(),
        p4(),
        grid(2, 3, "grid2x3"),
        grid(2, 4, "grid2x4"),
        grid(3, 4, "grid3x4"),
        grid(4, 4, "grid4x4"),
        annulus_c4(),
        annulus_w2(),
        pants_2x5(),
        degenerate(),
        theta(),
    ]
}

pub fn by_name(name: &str) -> Result<CorpusEntry> {
    match name {
        "k2" => Ok(k2()),
        "c4" => Ok(c4()),
        "p4" => Ok(p4()),
        "grid2x3" => Ok(grid(2, 3, "grid2x3")),
        "grid2x4" => Ok(grid(2, 4, "grid2x4")),
        "grid3x4" => Ok(grid(3, 4, "grid3x4")),
        "grid4x4" => Ok(grid(4, 4, "grid4x4")),
        "grid2x5" => Ok(grid(2, 5, "grid2x5")),
        "annulus_c4" => Ok(annulus_c4()),
        "annulus_w2" => Ok(annulus_w2()),
        "pants_2x5" => Ok(pants_2x5()),
        "degenerate" => Ok(degenerate()),
        "theta" => Ok(theta()),
        other => Err(Error::Parse(format!(
            "unknown builtin graph {other:?} (try: k2, c4, p4, grid2x3, grid2x4, grid3x4, \
             grid4x4, grid2x5, annulus_c4, annulus_w2, pants_2x5, degenerate, theta)"
        ))),
    }
}

/// Column labels of a grid's vertices, for the x-coordinate walk quotient.
pub fn grid_column_labels(rows: usize, cols: usize) -> Vec<usize> {
    (0..rows * cols).map(|v| v % cols).collect()
}
