//! Kasteleyn matrices for planar bipartite graphs: sign assignment by dual
//! spanning-tree propagation, exact partition functions, edge and local
//! statistics as minors of the inverse, and exact sampling of dimer covers
//! by sequential conditioning.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::matrix::{det_rational, invert_rational, Ring, RingMatrix};
use crate::algebra::rational::Rational;
use crate::error::{Error, Result};
use crate::facesolve::{solve_face_constraints, walk_monodromy, SignGroup};
use crate::graph::PlanarBipartiteGraph;
use crate::oracle::DimerCover;

/// Kasteleyn signs: every bounded face of length `l` carries a number of
/// minus signs congruent to `l/2 + 1` mod 2.
pub fn kasteleyn_signs(g: &PlanarBipartiteGraph) -> Result<Vec<i8>> {
    solve_face_constraints(g, &SignGroup, |f| {
        let l = g.faces()[f].len();
        if (l / 2 + 1) % 2 == 0 {
            1
        } else {
            -1
        }
    })
}

/// Certifies the face rule for a given sign assignment.
pub fn verify_sign_rule(g: &PlanarBipartiteGraph, signs: &[i8]) -> bool {
    g.bounded_faces().all(|f| {
        let want = if (f.len() / 2 + 1) % 2 == 0 { 1 } else { -1 };
        walk_monodromy(&SignGroup, signs, f) == want
    })
}

/// Signed weighted white x black matrix together with its index maps.
pub struct KasteleynSystem {
    pub whites: Vec<usize>,
    pub blacks: Vec<usize>,
    /// vertex -> row (whites) or column (blacks); usize::MAX when not applicable
    pub white_index: Vec<usize>,
    pub black_index: Vec<usize>,
    pub signs: Vec<i8>,
    pub matrix: RingMatrix<Rational>,
}

fn check_weights(g: &PlanarBipartiteGraph, weights: &[Rational]) -> Result<()> {
    assert_eq!(weights.len(), g.edge_count(), "one weight per edge");
    for (e, w) in weights.iter().enumerate() {
        if !w.is_positive() {
            return Err(Error::NonPositiveWeight(e));
        }
    }
    Ok(())
}

/// Generic signed Kasteleyn builder over any ring; parallel edges sum.
pub fn kasteleyn_matrix_with<T: Ring>(
    g: &PlanarBipartiteGraph,
    signs: &[i8],
    entry: impl Fn(usize) -> T,
) -> (Vec<usize>, Vec<usize>, RingMatrix<T>) {
    let whites = g.white_vertices();
    let blacks = g.black_vertices();
    let mut white_index = vec![usize::MAX; g.vertex_count()];
    let mut black_index = vec![usize::MAX; g.vertex_count()];
    for (i, &w) in whites.iter().enumerate() {
        white_index[w] = i;
    }
    for (j, &b) in blacks.iter().enumerate() {
        black_index[b] = j;
    }
    let mut m: RingMatrix<T> = RingMatrix::zeros(whites.len(), blacks.len());
    for e in 0..g.edge_count() {
        let (b, w) = g.endpoints(e);
        let (r, c) = (white_index[w], black_index[b]);
        let term = if signs[e] >= 0 { entry(e) } else { entry(e).ring_neg() };
        let v = m.get(r, c).ring_add(&term);
        m.set(r, c, v);
    }
    (whites, blacks, m)
}

pub fn kasteleyn_system(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
) -> Result<KasteleynSystem> {
    g.require_planar()?;
    check_weights(g, weights)?;
    let signs = kasteleyn_signs(g)?;
    let (whites, blacks, matrix) = kasteleyn_matrix_with(g, &signs, |e| weights[e].clone());
    let mut white_index = vec![usize::MAX; g.vertex_count()];
    let mut black_index = vec![usize::MAX; g.vertex_count()];
    for (i, &w) in whites.iter().enumerate() {
        white_index[w] = i;
    }
    for (j, &b) in blacks.iter().enumerate() {
        black_index[b] = j;
    }
    Ok(KasteleynSystem { whites, blacks, white_index, black_index, signs, matrix })
}

/// `|det K|`, the weighted count of dimer covers. Returns 0 when the color
/// classes have different sizes (no cover can exist).
pub fn partition_function(g: &PlanarBipartiteGraph, weights: &[Rational]) -> Result<Rational> {
    let sys = kasteleyn_system(g, weights)?;
    if !sys.matrix.is_square() {
        return Ok(Rational::zero());
    }
    Ok(det_rational(&sys.matrix)?.abs())
}

impl KasteleynSystem {
    pub(crate) fn inverse(&self) -> Result<RingMatrix<Rational>> {
        if !self.matrix.is_square() {
            return Err(Error::NoPerfectMatching);
        }
        invert_rational(&self.matrix).map_err(|_| Error::Singular)
    }

    /// `K^{-1}(b, w)` given an inverse matrix (blacks x whites).
    pub(crate) fn inv_entry<'m>(
        &self,
        inv: &'m RingMatrix<Rational>,
        b: usize,
        w: usize,
    ) -> &'m Rational {
        inv.get(self.black_index[b], self.white_index[w])
    }
}

/// Probability that a specific edge occurs in a random dimer cover.
pub fn edge_probability(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    edge: usize,
) -> Result<Rational> {
    Ok(edge_probabilities(g, weights)?[edge].clone())
}

/// All edge probabilities from one matrix inversion.
pub fn edge_probabilities(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
) -> Result<Vec<Rational>> {
    let sys = kasteleyn_system(g, weights)?;
    let inv = sys.inverse()?;
    Ok((0..g.edge_count())
        .map(|e| {
            let (b, w) = g.endpoints(e);
            (&weights[e] * sys.inv_entry(&inv, b, w)).abs()
        })
        .collect())
}

/// Probability that all the given edges occur simultaneously:
/// `|prod_i K(w_i, b_i) * det(K^{-1}(b_j, w_i))|`.
pub fn local_statistics(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    edges: &[usize],
) -> Result<Rational> {
    for (i, &e) in edges.iter().enumerate() {
        for &f in &edges[..i] {
            let (be, we) = g.endpoints(e);
            let (bf, wf) = g.endpoints(f);
            if be == bf || we == wf {
                return Err(Error::SharedVertex(format!("edges {f} and {e}")));
            }
        }
    }
    let sys = kasteleyn_system(g, weights)?;
    let inv = sys.inverse()?;
    Ok(local_statistics_from_inverse(g, &sys, &inv, weights, edges))
}

pub(crate) fn local_statistics_from_inverse(
    g: &PlanarBipartiteGraph,
    sys: &KasteleynSystem,
    inv: &RingMatrix<Rational>,
    weights: &[Rational],
    edges: &[usize],
) -> Rational {
    let k = edges.len();
    let mut prefactor = Rational::one();
    for &e in edges {
        let sign = if sys.signs[e] >= 0 { Rational::one() } else { -Rational::one() };
        prefactor *= sign * &weights[e];
    }
    let minor = RingMatrix::from_fn(k, k, |i, j| {
        let (_, w) = g.endpoints(edges[i]);
        let (b, _) = g.endpoints(edges[j]);
        sys.inv_entry(inv, b, w).clone()
    });
    (prefactor * det_rational(&minor).expect("square")).abs()
}

/// Which implementation the sampler uses for the running inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplePath {
    /// Re-invert the reduced matrix at every step (reference path).
    Recompute,
    /// Maintain the inverse by rank-1 Schur updates.
    RankOneUpdate,
    /// Recompute below 40 vertices, update above.
    Auto,
}

/// Draws one dimer cover exactly from the weighted measure. Deterministic
/// per seed.
pub fn sample_dimer_cover(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    seed: u64,
) -> Result<DimerCover> {
    sample_dimer_cover_with(g, weights, seed, SamplePath::Auto)
}

pub fn sample_dimer_cover_with(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    seed: u64,
    path: SamplePath,
) -> Result<DimerCover> {
    let sys = kasteleyn_system(g, weights)?;
    let mut inv = sys.inverse().map_err(|_| Error::NoPerfectMatching)?;
    let use_updates = match path {
        SamplePath::Recompute => false,
        SamplePath::RankOneUpdate => true,
        SamplePath::Auto => g.vertex_count() >= 40,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // active rows (whites) and cols (blacks) of the running submatrix, as
    // positions into sys.whites / sys.blacks
    let mut active_w: Vec<usize> = (0..sys.whites.len()).collect();
    let mut active_b: Vec<usize> = (0..sys.blacks.len()).collect();
    let mut matched = vec![false; g.vertex_count()];
    let mut cover = Vec::new();

    while !active_w.is_empty() {
        // lowest-id unmatched white vertex
        let (w_pos_idx, &w_row) = active_w
            .iter()
            .enumerate()
            .min_by_key(|(_, &r)| sys.whites[r])
            .expect("nonempty");
        let w = sys.whites[w_row];
        // conditional probabilities of the incident edges
        let mut options: Vec<(usize, Rational)> = Vec::new();
        let mut edges: Vec<usize> = g.incident_edges(w).to_vec();
        edges.sort_unstable();
        for e in edges {
            let b = g.other_end(e, w);
            if matched[b] {
                continue;
            }
            let sign = if sys.signs[e] >= 0 { Rational::one() } else { -Rational::one() };
            let p = (sign * &weights[e] * inv.get(sys.black_index[b], sys.white_index[w])).abs();
            if !p.is_zero() {
                options.push((e, p));
            }
        }
        if options.is_empty() {
            return Err(Error::NoPerfectMatching);
        }
        debug_assert_eq!(
            options.iter().map(|(_, p)| p.clone()).sum::<Rational>(),
            Rational::one()
        );
        let chosen = options[sample_index(&options, &mut rng)].0;
        let (b, _) = g.endpoints(chosen);
        cover.push(chosen);
        matched[b] = true;
        matched[w] = true;

        let b_col = sys.black_index[b];
        let w_col_in_inv = sys.white_index[w];
        active_w.remove(w_pos_idx);
        active_b.retain(|&c| c != b_col);

        if active_w.is_empty() {
            break;
        }
        if use_updates {
            // Schur update: inv'[b'][w'] = inv[b'][w'] - inv[b'][w] inv[b][w'] / inv[b][w]
            let pivot = inv.get(b_col, w_col_in_inv).clone();
            let mut next = inv.clone();
            for &bp in &active_b {
                for &wp in &active_w {
                    let v = inv.get(bp, wp)
                        - inv.get(bp, w_col_in_inv) * inv.get(b_col, wp) / &pivot;
                    next.set(bp, wp, v);
                }
            }
            inv = next;
        } else {
            // re-invert the reduced matrix, then scatter back into full indexing
            let sub = RingMatrix::from_fn(active_w.len(), active_b.len(), |i, j| {
                sys.matrix.get(active_w[i], active_b[j]).clone()
            });
            let sub_inv = invert_rational(&sub).map_err(|_| Error::NoPerfectMatching)?;
            let mut full: RingMatrix<Rational> =
                RingMatrix::zeros(sys.blacks.len(), sys.whites.len());
            for (j, &bc) in active_b.iter().enumerate() {
                for (i, &wr) in active_w.iter().enumerate() {
                    full.set(bc, wr, sub_inv.get(j, i).clone());
                }
            }
            inv = full;
        }
    }
    cover.sort_unstable();
    Ok(cover)
}

/// Exact draw from a rational distribution (weights must sum to 1).
fn sample_index(options: &[(usize, Rational)], rng: &mut ChaCha8Rng) -> usize {
    let mut den = num_bigint::BigInt::one();
    for (_, p) in options {
        den = den.lcm(p.denom());
    }
    let weights: Vec<BigUint> = options
        .iter()
        .map(|(_, p)| (p.numer() * (&den / p.denom())).to_biguint().expect("positive"))
        .collect();
    let total: BigUint = weights.iter().sum();
    let r = rand_below(&total, rng);
    let mut acc = BigUint::zero();
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if r < acc {
            return i;
        }
    }
    options.len() - 1
}

/// Uniform BigUint in [0, bound) by rejection sampling.
fn rand_below(bound: &BigUint, rng: &mut ChaCha8Rng) -> BigUint {
    debug_assert!(!bound.is_zero());
    let bits = bound.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let extra = (nbytes as u64) * 8 - bits;
    loop {
        let mut bytes = vec![0u8; nbytes];
        rng.fill_bytes(&mut bytes);
        bytes[0] &= 0xFFu8 >> extra;
        let candidate = BigUint::from_bytes_be(&bytes);
        if &candidate < bound {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::corpus;
    use crate::graph::make_grid;
    use crate::oracle::enumerate_dimer_covers;
    use std::collections::HashMap;

    fn unit_weights(g: &PlanarBipartiteGraph) -> Vec<Rational> {
        vec![Rational::one(); g.edge_count()]
    }

    fn oracle_z(g: &PlanarBipartiteGraph, weights: &[Rational]) -> Rational {
        enumerate_dimer_covers(g)
            .unwrap()
            .iter()
            .map(|c| c.iter().map(|&e| weights[e].clone()).product::<Rational>())
            .sum()
    }

    #[test]
    fn signs_satisfy_face_rule_everywhere() {
        for entry in corpus::all() {
            let signs = kasteleyn_signs(&entry.graph).unwrap();
            assert!(verify_sign_rule(&entry.graph, &signs), "{}", entry.name);
        }
    }

    #[test]
    fn c4_has_odd_minus_count() {
        let g = make_grid(2, 2).unwrap();
        let signs = kasteleyn_signs(&g).unwrap();
        let minus = signs.iter().filter(|&&s| s < 0).count();
        assert_eq!(minus % 2, 1);
    }

    #[test]
    fn k2_sign_trivial() {
        let g = make_grid(1, 2).unwrap();
        assert_eq!(kasteleyn_signs(&g).unwrap(), vec![1]);
    }

    #[test]
    fn partition_function_matches_oracle_on_corpus() {
        for entry in corpus::all() {
            let w = unit_weights(&entry.graph);
            let z = partition_function(&entry.graph, &w).unwrap();
            assert_eq!(z, oracle_z(&entry.graph, &w), "{}", entry.name);
        }
    }

    #[test]
    fn weighted_partition_function_c4() {
        // weights a,b,c,d in cyclic order around C4 -> Z = ac + bd
        let g = make_grid(2, 2).unwrap();
        // cyclic order of edges around the square: 0 (bottom), 3 (right), 1 (top), 2 (left)
        let mut w = unit_weights(&g);
        w[0] = int(2);
        w[3] = int(3);
        w[1] = int(5);
        w[2] = int(7);
        let z = partition_function(&g, &w).unwrap();
        assert_eq!(z, oracle_z(&g, &w));
        assert_eq!(z, int(2 * 5 + 3 * 7));
    }

    #[test]
    fn k2_weighted() {
        let g = make_grid(1, 2).unwrap();
        assert_eq!(partition_function(&g, &[rat(7, 3)]).unwrap(), rat(7, 3));
        assert_eq!(edge_probability(&g, &[rat(7, 3)], 0).unwrap(), int(1));
    }

    #[test]
    fn fig1_edge_probability() {
        let g = make_grid(2, 3).unwrap();
        let w = unit_weights(&g);
        // leftmost vertical edge: (0,0)-(0,1) has id 4 (verticals start at 4)
        assert_eq!(edge_probability(&g, &w, 4).unwrap(), rat(2, 3));
        // C4: every edge probability 1/2
        let c4 = make_grid(2, 2).unwrap();
        for e in 0..4 {
            assert_eq!(edge_probability(&c4, &unit_weights(&c4), e).unwrap(), rat(1, 2));
        }
    }

    #[test]
    fn probabilities_match_oracle_everywhere() {
        for entry in corpus::all() {
            let g = &entry.graph;
            let w = unit_weights(g);
            let covers = enumerate_dimer_covers(g).unwrap();
            if covers.is_empty() {
                continue;
            }
            let z = int(covers.len() as i64);
            let probs = edge_probabilities(g, &w).unwrap();
            for e in 0..g.edge_count() {
                let hits = covers.iter().filter(|c| c.binary_search(&e).is_ok()).count();
                assert_eq!(probs[e], rat(hits as i64, 1) / &z, "{} edge {e}", entry.name);
            }
            // vertex sums are exactly one
            for v in 0..g.vertex_count() {
                let sum: Rational = g.incident_edges(v).iter().map(|&e| probs[e].clone()).sum();
                assert_eq!(sum, int(1), "{} vertex {v}", entry.name);
            }
        }
    }

    #[test]
    fn local_statistics_is_oracle_exact() {
        let g = make_grid(2, 3).unwrap();
        let w = unit_weights(&g);
        let covers = enumerate_dimer_covers(&g).unwrap();
        // single edge agrees with edge_probability
        for e in 0..g.edge_count() {
            assert_eq!(
                local_statistics(&g, &w, &[e]).unwrap(),
                edge_probability(&g, &w, e).unwrap()
            );
        }
        // the two horizontal left edges (top and bottom): ids 0 (y=0) and 2 (y=1)
        let p = local_statistics(&g, &w, &[0, 2]).unwrap();
        let hits = covers
            .iter()
            .filter(|c| c.binary_search(&0).is_ok() && c.binary_search(&2).is_ok())
            .count();
        assert_eq!(p, rat(hits as i64, covers.len() as i64));

        // C4: both edges of one cover
        let c4 = make_grid(2, 2).unwrap();
        let wc = unit_weights(&c4);
        let covers = enumerate_dimer_covers(&c4).unwrap();
        let p = local_statistics(&c4, &wc, &covers[0]).unwrap();
        assert_eq!(p, rat(1, 2));
    }

    #[test]
    fn local_statistics_rejects_shared_vertices() {
        let g = make_grid(2, 3).unwrap();
        let w = unit_weights(&g);
        // edges 0 and 1 share the middle bottom vertex
        assert!(matches!(
            local_statistics(&g, &w, &[0, 1]),
            Err(Error::SharedVertex(_))
        ));
    }

    #[test]
    fn gauge_invariance_of_probabilities() {
        let g = make_grid(2, 3).unwrap();
        let mut w = unit_weights(&g);
        w[0] = rat(3, 2);
        w[5] = rat(2, 7);
        let before = edge_probabilities(&g, &w).unwrap();
        // multiply all weights at vertex 1 by 5
        let mut w2 = w.clone();
        for &e in g.incident_edges(1) {
            w2[e] *= int(5);
        }
        let after = edge_probabilities(&g, &w2).unwrap();
        assert_eq!(before, after);
        assert_eq!(
            partition_function(&g, &w2).unwrap(),
            partition_function(&g, &w).unwrap() * int(5)
        );
    }

    #[test]
    fn reweighting_reproduces_log_derivative() {
        // Z(t) is linear in the weight t of edge e; check Pr(e) = t Z'(t)/Z(t)
        let g = make_grid(2, 3).unwrap();
        let e = 4usize;
        let t = rat(5, 3);
        let mut w = unit_weights(&g);
        w[e] = t.clone();
        let z_at = |tv: &Rational| {
            let mut wt = unit_weights(&g);
            wt[e] = tv.clone();
            oracle_z(&g, &wt)
        };
        // exact slope from two evaluations of the linear polynomial Z(t)
        let z1 = z_at(&int(1));
        let z2 = z_at(&int(2));
        let slope = z2 - &z1;
        let z_t = z_at(&t);
        let expected = &t * slope / &z_t;
        assert_eq!(edge_probability(&g, &w, e).unwrap(), expected);
        assert_eq!(partition_function(&g, &w).unwrap(), z_t);
    }

    #[test]
    fn sampler_is_exact_and_paths_agree() {
        let g = make_grid(2, 3).unwrap();
        let w = unit_weights(&g);
        for seed in 0..50 {
            let a = sample_dimer_cover_with(&g, &w, seed, SamplePath::Recompute).unwrap();
            let b = sample_dimer_cover_with(&g, &w, seed, SamplePath::RankOneUpdate).unwrap();
            assert_eq!(a, b, "paths diverge at seed {seed}");
        }
    }

    #[test]
    fn sampler_frequencies_match_measure() {
        let c4 = make_grid(2, 2).unwrap();
        let w = unit_weights(&c4);
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        let n = 10_000;
        for seed in 0..n {
            *counts.entry(sample_dimer_cover(&c4, &w, seed).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 2);
        let freq = *counts.values().next().unwrap() as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq {freq}");

        let g = make_grid(2, 3).unwrap();
        let w = unit_weights(&g);
        let mut hits = 0;
        for seed in 0..n {
            let cover = sample_dimer_cover(&g, &w, seed).unwrap();
            if cover.binary_search(&4).is_ok() {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        assert!((freq - 2.0 / 3.0).abs() < 0.02, "freq {freq}");
    }

    #[test]
    fn k2_sampler_forced() {
        let g = make_grid(1, 2).unwrap();
        assert_eq!(sample_dimer_cover(&g, &[int(3)], 7).unwrap(), vec![0]);
    }

    #[test]
    fn zero_weight_rejected() {
        let g = make_grid(2, 2).unwrap();
        let mut w = unit_weights(&g);
        w[1] = int(0);
        assert!(matches!(
            partition_function(&g, &w),
            Err(Error::NonPositiveWeight(1))
        ));
    }

    #[test]
    fn torus_unsupported() {
        let g = crate::graph::make_torus_grid(2).unwrap();
        let w = unit_weights(&g);
        assert!(matches!(partition_function(&g, &w), Err(Error::TorusGraph)));
    }
}
