//! Face weights, expected fractional matchings, and the map Psi from face
//! weights to edge probabilities together with its Newton inversion.
//!
//! Newton runs in spanning-tree gauge coordinates: tree edges keep weight 1
//! and the variables are the energies (log weights) of the non-tree edges.
//! In these coordinates the Hessian of log Z is the covariance matrix of the
//! edge indicators, so the objective log Z - <target, u> is strictly convex
//! on nondegenerate graphs and damped Newton descends globally.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::algebra::matrix::{rank_rational, RingMatrix};
use crate::algebra::rational::{from_f64_exact, to_f64, Rational};
use crate::error::{Error, Result};
use crate::facesolve::{solve_face_constraints, spanning_tree, walk_monodromy, RationalMulGroup};
use crate::graph::PlanarBipartiteGraph;
use crate::kasteleyn::{
    edge_probabilities, kasteleyn_signs, kasteleyn_system, local_statistics_from_inverse,
};
use crate::oracle::{check_nondegenerate, enumerate_dimer_covers};

/// Bounded face id -> positive monodromy X_f.
pub type FaceWeights = BTreeMap<usize, Rational>;

/// Counterclockwise alternating product of edge weights around each bounded
/// face (first weight divided by second times third ...); gauge invariant.
pub fn face_weights(g: &PlanarBipartiteGraph, weights: &[Rational]) -> Result<FaceWeights> {
    g.require_planar()?;
    Ok(g
        .bounded_faces()
        .map(|f| (f.id, walk_monodromy(&RationalMulGroup, weights, f)))
        .collect())
}

/// Weights realizing the given face monodromies, with weight 1 on the
/// breadth-first lowest-id spanning tree.
pub fn gauge_fix(g: &PlanarBipartiteGraph, xs: &FaceWeights) -> Result<Vec<Rational>> {
    g.require_planar()?;
    for f in g.bounded_faces() {
        match xs.get(&f.id) {
            Some(x) if x.is_positive() => {}
            Some(_) => {
                return Err(Error::Parse(format!("face weight X_{} must be positive", f.id)))
            }
            None => return Err(Error::Parse(format!("missing face weight for face {}", f.id))),
        }
    }
    solve_face_constraints(g, &RationalMulGroup, |f| xs[&f].clone())
}

/// The expected fractional matching (barycenter of the cover measure):
/// every edge's probability. Vertex sums are exactly one.
pub fn expected_fractional_matching(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
) -> Result<Vec<Rational>> {
    edge_probabilities(g, weights)
}

/// Forward map Psi: face weights -> expected fractional matching.
pub fn psi_forward(g: &PlanarBipartiteGraph, xs: &FaceWeights) -> Result<Vec<Rational>> {
    let weights = gauge_fix(g, xs)?;
    expected_fractional_matching(g, &weights)
}

/// Non-tree edges in id order; these index the Newton coordinates.
pub fn nontree_edges(g: &PlanarBipartiteGraph) -> Vec<usize> {
    let tree = spanning_tree(g);
    (0..g.edge_count()).filter(|&e| !tree[e]).collect()
}

/// Exact covariance matrix of the indicators of the listed edges:
/// `Cov(X_e, X_f) = E[X_e X_f] - E[X_e] E[X_f]`.
pub fn covariance_matrix(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    edges: &[usize],
) -> Result<RingMatrix<Rational>> {
    let sys = kasteleyn_system(g, weights)?;
    let inv = sys.inverse()?;
    let probs: Vec<Rational> = edges
        .iter()
        .map(|&e| local_statistics_from_inverse(g, &sys, &inv, weights, &[e]))
        .collect();
    let n = edges.len();
    Ok(RingMatrix::from_fn(n, n, |i, j| {
        let joint = if i == j {
            probs[i].clone()
        } else {
            let (bi, wi) = g.endpoints(edges[i]);
            let (bj, wj) = g.endpoints(edges[j]);
            if bi == bj || wi == wj {
                Rational::zero() // disjointness fails: edges never co-occur
            } else {
                local_statistics_from_inverse(g, &sys, &inv, weights, &[edges[i], edges[j]])
            }
        };
        joint - &probs[i] * &probs[j]
    }))
}

/// Floating-point dimer statistics used inside Newton.
pub(crate) struct FloatDimer {
    signs: Vec<i8>,
    white_index: Vec<usize>,
    black_index: Vec<usize>,
    nw: usize,
}

pub(crate) struct FloatStats {
    pub log_z: f64,
    pub probs: Vec<f64>,
    inv: DMatrix<f64>,
}

impl FloatDimer {
    pub fn new(g: &PlanarBipartiteGraph) -> Result<Self> {
        g.require_planar()?;
        let signs = kasteleyn_signs(g)?;
        let whites = g.white_vertices();
        let blacks = g.black_vertices();
        if whites.len() != blacks.len() {
            return Err(Error::NoPerfectMatching);
        }
        let mut white_index = vec![usize::MAX; g.vertex_count()];
        let mut black_index = vec![usize::MAX; g.vertex_count()];
        for (i, &w) in whites.iter().enumerate() {
            white_index[w] = i;
        }
        for (j, &b) in blacks.iter().enumerate() {
            black_index[b] = j;
        }
        Ok(FloatDimer { signs, white_index, black_index, nw: whites.len() })
    }

    pub fn stats(&self, g: &PlanarBipartiteGraph, weights: &[f64]) -> Option<FloatStats> {
        let n = self.nw;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for e in 0..g.edge_count() {
            let (b, w) = g.endpoints(e);
            m[(self.white_index[w], self.black_index[b])] += f64::from(self.signs[e]) * weights[e];
        }
        let det = m.clone().lu().determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let inv = m.try_inverse()?;
        let probs: Vec<f64> = (0..g.edge_count())
            .map(|e| {
                let (b, w) = g.endpoints(e);
                (weights[e]
                    * f64::from(self.signs[e])
                    * inv[(self.black_index[b], self.white_index[w])])
                .abs()
            })
            .collect();
        Some(FloatStats { log_z: det.abs().ln(), probs, inv })
    }

    /// P(e and f both occur), floating point.
    fn pair_probability(
        &self,
        g: &PlanarBipartiteGraph,
        weights: &[f64],
        stats: &FloatStats,
        e: usize,
        f: usize,
    ) -> f64 {
        let (be, we) = g.endpoints(e);
        let (bf, wf) = g.endpoints(f);
        if be == bf || we == wf {
            return 0.0;
        }
        let pref = weights[e] * weights[f] * f64::from(self.signs[e]) * f64::from(self.signs[f]);
        let a = stats.inv[(self.black_index[be], self.white_index[we])];
        let b = stats.inv[(self.black_index[bf], self.white_index[we])];
        let c = stats.inv[(self.black_index[be], self.white_index[wf])];
        let d = stats.inv[(self.black_index[bf], self.white_index[wf])];
        (pref * (a * d - b * c)).abs()
    }

    fn covariance(
        &self,
        g: &PlanarBipartiteGraph,
        weights: &[f64],
        stats: &FloatStats,
        edges: &[usize],
    ) -> DMatrix<f64> {
        let n = edges.len();
        DMatrix::from_fn(n, n, |i, j| {
            let joint = if i == j {
                stats.probs[edges[i]]
            } else {
                self.pair_probability(g, weights, stats, edges[i], edges[j])
            };
            joint - stats.probs[edges[i]] * stats.probs[edges[j]]
        })
    }
}

pub struct PsiInversion {
    pub face_weights: FaceWeights,
    /// The gauge-fixed edge weights realizing the face weights (tree = 1),
    /// rationalized exactly from the converged floats.
    pub weights: Vec<Rational>,
    pub iterations: usize,
    pub residual: f64,
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 200;
const NEWTON_MAX_HALVINGS: usize = 40;
const ENERGY_BLOWUP: f64 = 60.0;

/// Inverts Psi: finds face weights whose expected fractional matching is
/// `target` (one rational per edge, in the open matching polytope).
pub fn invert_psi(g: &PlanarBipartiteGraph, target: &[Rational]) -> Result<PsiInversion> {
    let report = check_nondegenerate(g)?;
    if !report.nondegenerate {
        return Err(Error::DegenerateGraph);
    }
    validate_target(g, target)?;

    let nontree = nontree_edges(g);
    let d = nontree.len();
    let target_f: Vec<f64> = target.iter().map(to_f64).collect();
    let target_nt = DVector::from_fn(d, |i, _| target_f[nontree[i]]);

    let fd = FloatDimer::new(g)?;
    let mut u = DVector::<f64>::zeros(d);
    let make_weights = |u: &DVector<f64>| {
        let mut w = vec![1.0f64; g.edge_count()];
        for (i, &e) in nontree.iter().enumerate() {
            w[e] = u[i].exp();
        }
        w
    };
    let objective = |stats: &FloatStats, u: &DVector<f64>| stats.log_z - target_nt.dot(u);

    let mut weights = make_weights(&u);
    let mut stats = fd.stats(g, &weights).ok_or(Error::Singular)?;
    for iter in 0..NEWTON_MAX_ITER {
        let residual = (0..g.edge_count())
            .map(|e| (stats.probs[e] - target_f[e]).abs())
            .fold(0.0, f64::max);
        if residual <= NEWTON_TOL {
            return finish(g, &nontree, &u, iter, residual);
        }
        let grad = DVector::from_fn(d, |i, _| stats.probs[nontree[i]] - target_f[nontree[i]]);
        let hess = fd.covariance(g, &weights, &stats, &nontree);
        let delta = hess
            .clone()
            .lu()
            .solve(&(-&grad))
            .ok_or(Error::IllConditioned)?;
        if residual < 1e-8 {
            // quadratic regime: objective differences drown in float noise,
            // take the undamped Newton step
            let u_try = &u + &delta;
            if u_try.amax() > ENERGY_BLOWUP {
                return Err(Error::TargetOutsidePolytope(
                    "edge energies diverge; no interior preimage".into(),
                ));
            }
            let w_try = make_weights(&u_try);
            let s_try = fd.stats(g, &w_try).ok_or(Error::Singular)?;
            u = u_try;
            weights = w_try;
            stats = s_try;
            continue;
        }
        // damped step keeping the convex objective decreasing
        let phi0 = objective(&stats, &u);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let u_try = &u + t * &delta;
            if u_try.amax() > ENERGY_BLOWUP {
                t *= 0.5;
                continue;
            }
            let w_try = make_weights(&u_try);
            if let Some(s_try) = fd.stats(g, &w_try) {
                if objective(&s_try, &u_try) < phi0 || t * delta.amax() < 1e-15 {
                    accepted = Some((u_try, w_try, s_try));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((u2, w2, s2)) => {
                u = u2;
                weights = w2;
                stats = s2;
            }
            None => {
                return Err(Error::TargetOutsidePolytope(
                    "Newton cannot descend further; target appears to sit on the boundary".into(),
                ))
            }
        }
        if u.amax() > ENERGY_BLOWUP - 1.0 {
            return Err(Error::TargetOutsidePolytope(
                "edge energies diverge; no interior preimage".into(),
            ));
        }
    }
    Err(Error::MaxIterations(NEWTON_MAX_ITER))
}

fn finish(
    g: &PlanarBipartiteGraph,
    nontree: &[usize],
    u: &DVector<f64>,
    iterations: usize,
    residual: f64,
) -> Result<PsiInversion> {
    let mut weights = vec![Rational::one(); g.edge_count()];
    for (i, &e) in nontree.iter().enumerate() {
        weights[e] = from_f64_exact(u[i].exp())?;
    }
    let xs = face_weights(g, &weights)?;
    Ok(PsiInversion { face_weights: xs, weights, iterations, residual })
}

fn validate_target(g: &PlanarBipartiteGraph, target: &[Rational]) -> Result<()> {
    if target.len() != g.edge_count() {
        return Err(Error::Parse("one target coordinate per edge required".into()));
    }
    for v in 0..g.vertex_count() {
        let sum: Rational = g.incident_edges(v).iter().map(|&e| target[e].clone()).sum();
        if sum != Rational::one() {
            return Err(Error::TargetOutsidePolytope(format!(
                "vertex {v} sums to {sum}, not 1"
            )));
        }
    }
    let covers = enumerate_dimer_covers(g)?;
    if covers.is_empty() {
        return Err(Error::NoPerfectMatching);
    }
    // per-edge bounds: forced edges must match exactly, free edges strictly
    // inside (0,1)
    for e in 0..g.edge_count() {
        let hits = covers.iter().filter(|c| c.binary_search(&e).is_ok()).count();
        let (lo, hi) = (hits == 0, hits == covers.len());
        let t = &target[e];
        match (lo, hi) {
            (true, _) if !t.is_zero() => {
                return Err(Error::TargetOutsidePolytope(format!(
                    "edge {e} is unused; target must be 0"
                )))
            }
            (_, true) if !t.is_one() => {
                return Err(Error::TargetOutsidePolytope(format!(
                    "edge {e} is forced; target must be 1"
                )))
            }
            (false, false) if !(t.is_positive() && t < &Rational::one()) => {
                return Err(Error::TargetOutsidePolytope(format!(
                    "edge {e} target must lie strictly inside (0,1)"
                )))
            }
            _ => {}
        }
    }
    // affine-hull membership: adding target - cover_0 must not raise the rank
    let ne = g.edge_count();
    let base = &covers[0];
    let indicator = |c: &Vec<usize>, e: usize| {
        if c.binary_search(&e).is_ok() {
            Rational::one()
        } else {
            Rational::zero()
        }
    };
    let rows = covers.len(); // covers[1..] differences plus the target row
    let m_with = RingMatrix::from_fn(rows, ne, |i, j| {
        if i + 1 < covers.len() {
            indicator(&covers[i + 1], j) - indicator(base, j)
        } else {
            target[j].clone() - indicator(base, j)
        }
    });
    let m_without = RingMatrix::from_fn(rows - 1, ne.max(1), |i, j| {
        if rows <= 1 {
            Rational::zero()
        } else {
            indicator(&covers[i + 1], j) - indicator(base, j)
        }
    });
    let r_with = rank_rational(&m_with);
    let r_without = if rows <= 1 { 0 } else { rank_rational(&m_without) };
    if r_with != r_without {
        return Err(Error::TargetOutsidePolytope(
            "target lies outside the affine hull of the dimer covers".into(),
        ));
    }
    Ok(())
}

/// Random point in the relative interior of the matching polytope: a convex
/// combination of all covers with strictly positive rational coefficients.
pub fn convex_combination_target(
    g: &PlanarBipartiteGraph,
    rng: &mut impl Rng,
) -> Result<Vec<Rational>> {
    let covers = enumerate_dimer_covers(g)?;
    if covers.is_empty() {
        return Err(Error::NoPerfectMatching);
    }
    let coeffs: Vec<i64> = covers.iter().map(|_| rng.random_range(1..=100)).collect();
    let total: i64 = coeffs.iter().sum();
    let mut target = vec![Rational::zero(); g.edge_count()];
    for (c, &k) in covers.iter().zip(&coeffs) {
        for &e in c {
            target[e] += Rational::new(k.into(), total.into());
        }
    }
    Ok(target)
}
