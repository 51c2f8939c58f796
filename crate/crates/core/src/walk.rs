//! Random walks on permutation groups driven by i.i.d. dimer covers: the
//! involution of a matching, exact group-algebra transition operators and
//! their spectra, total-variation mixing profiles, and the torus winding
//! experiment.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::laurent::LaurentPoly;
use crate::algebra::matrix::{det_laurent, det_rational, RingMatrix};
use crate::algebra::rational::{to_f64, Rational};
use crate::error::{Error, Result};
use crate::graph::{make_torus_grid, torus_edge_step, PlanarBipartiteGraph};
use crate::kasteleyn::sample_dimer_cover;
use crate::oracle::{enumerate_dimer_covers, DimerCover};

/// Permutation as an image table.
pub type Permutation = Vec<usize>;

pub fn identity_permutation(n: usize) -> Permutation {
    (0..n).collect()
}

/// `a ∘ b`: apply `b` first.
pub fn compose(a: &Permutation, b: &Permutation) -> Permutation {
    b.iter().map(|&x| a[x]).collect()
}

/// The fixed-point-free involution swapping the endpoints of every matched
/// edge.
pub fn matching_involution(g: &PlanarBipartiteGraph, cover: &DimerCover) -> Permutation {
    let mut perm = identity_permutation(g.vertex_count());
    for &e in cover {
        let (b, w) = g.endpoints(e);
        perm[b] = w;
        perm[w] = b;
    }
    perm
}

/// The three dimer covers of K4 as involutions of {0,1,2,3}:
/// (01)(23), (02)(13), (03)(12). K4 is not bipartite; it is admitted as the
/// worked example for walks only.
pub fn k4_involutions() -> Vec<Permutation> {
    vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]]
}

/// Projects a permutation of vertices to a permutation of labels, failing if
/// the map is not constant on fibers.
pub fn quotient_permutation(
    perm: &Permutation,
    labels: &[usize],
    num_labels: usize,
) -> Result<Permutation> {
    let mut image = vec![usize::MAX; num_labels];
    for (v, &l) in labels.iter().enumerate() {
        let target = labels[perm[v]];
        if image[l] == usize::MAX {
            image[l] = target;
        } else if image[l] != target {
            return Err(Error::BadQuotient(format!(
                "label {l} maps to both {} and {target}",
                image[l]
            )));
        }
    }
    if image.iter().any(|&x| x == usize::MAX) {
        return Err(Error::BadQuotient("a label has no representative".into()));
    }
    Ok(image)
}

/// Samples one cover per step; works for planar graphs (exact conditional
/// sampler) and torus grids (exact draw from the enumerated list).
pub struct CoverSampler<'a> {
    g: &'a PlanarBipartiteGraph,
    weights: &'a [Rational],
    enumerated: Option<(Vec<DimerCover>, Vec<Rational>)>,
}

impl<'a> CoverSampler<'a> {
    pub fn new(g: &'a PlanarBipartiteGraph, weights: &'a [Rational]) -> Result<Self> {
        let enumerated = if g.is_torus() {
            let covers = enumerate_dimer_covers(g)?;
            if covers.is_empty() {
                return Err(Error::NoPerfectMatching);
            }
            let probs = cover_distribution(&covers, weights);
            Some((covers, probs))
        } else {
            None
        };
        Ok(CoverSampler { g, weights, enumerated })
    }

    pub fn sample(&self, seed: u64) -> Result<DimerCover> {
        match &self.enumerated {
            Some((covers, probs)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(covers[sample_discrete(probs, &mut rng)].clone())
            }
            None => sample_dimer_cover(self.g, self.weights, seed),
        }
    }
}

fn cover_distribution(covers: &[DimerCover], weights: &[Rational]) -> Vec<Rational> {
    let ws: Vec<Rational> = covers
        .iter()
        .map(|c| c.iter().map(|&e| weights[e].clone()).product())
        .collect();
    let z: Rational = ws.iter().cloned().sum();
    ws.into_iter().map(|w| w / &z).collect()
}

/// Exact draw from a rational distribution summing to 1.
fn sample_discrete(probs: &[Rational], rng: &mut ChaCha8Rng) -> usize {
    use num_integer::Integer;
    let mut den = num_bigint::BigInt::one();
    for p in probs {
        den = den.lcm(p.denom());
    }
    let weights: Vec<num_bigint::BigUint> = probs
        .iter()
        .map(|p| (p.numer() * (&den / p.denom())).to_biguint().expect("nonnegative"))
        .collect();
    let total: num_bigint::BigUint = weights.iter().sum();
    let bits = total.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let extra = (nbytes as u64) * 8 - bits;
    let r = loop {
        let mut bytes = vec![0u8; nbytes];
        rng.fill_bytes(&mut bytes);
        bytes[0] &= 0xFFu8 >> extra;
        let candidate = num_bigint::BigUint::from_bytes_be(&bytes);
        if candidate < total {
            break candidate;
        }
    };
    let mut acc = num_bigint::BigUint::ZERO;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if r < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Composes `steps` i.i.d. matching involutions; returns the state after
/// every step (not including the identity start).
pub fn simulate_walk(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    steps: usize,
    seed: u64,
) -> Result<Vec<Permutation>> {
    let sampler = CoverSampler::new(g, weights)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut state = identity_permutation(g.vertex_count());
    let mut trajectory = Vec::with_capacity(steps);
    for _ in 0..steps {
        let cover = sampler.sample(seeds.next_u64())?;
        let inv = matching_involution(g, &cover);
        state = compose(&inv, &state);
        trajectory.push(state.clone());
    }
    Ok(trajectory)
}

pub const DEFAULT_GROUP_CAP: usize = 10_080;

/// Left-multiplication operator by `g = sum_m p_m e_{pi_m}` on the group
/// algebra of the subgroup generated by the involutions.
pub struct GroupOperator {
    /// sorted group elements; row/column i corresponds to `elements[i]`
    pub elements: Vec<Permutation>,
    pub matrix: RingMatrix<Rational>,
    pub step_distribution: Vec<(Permutation, Rational)>,
}

pub fn group_algebra_operator(
    generators: &[(Permutation, Rational)],
    cap: usize,
) -> Result<GroupOperator> {
    assert!(!generators.is_empty());
    let n = generators[0].0.len();
    // close under composition
    let mut elements: Vec<Permutation> = vec![identity_permutation(n)];
    let mut index: HashMap<Permutation, usize> = HashMap::new();
    index.insert(elements[0].clone(), 0);
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        let base = elements[i].clone();
        for (gen, _) in generators {
            let next = compose(gen, &base);
            if !index.contains_key(&next) {
                if elements.len() >= cap {
                    return Err(Error::GroupTooLarge(cap));
                }
                index.insert(next.clone(), elements.len());
                frontier.push(elements.len());
                elements.push(next);
            }
        }
    }
    let order: Vec<usize> = {
        let mut idx: Vec<usize> = (0..elements.len()).collect();
        idx.sort_by(|&a, &b| elements[a].cmp(&elements[b]));
        idx
    };
    let sorted: Vec<Permutation> = order.iter().map(|&i| elements[i].clone()).collect();
    let mut sorted_index: HashMap<&Permutation, usize> = HashMap::new();
    for (i, p) in sorted.iter().enumerate() {
        sorted_index.insert(p, i);
    }
    let mut matrix: RingMatrix<Rational> =
        RingMatrix::zeros(sorted.len(), sorted.len());
    for (col, h) in sorted.iter().enumerate() {
        for (gen, p) in generators {
            let product = compose(gen, h);
            let row = sorted_index[&product];
            let v = matrix.get(row, col) + p;
            matrix.set(row, col, v);
        }
    }
    Ok(GroupOperator {
        elements: sorted,
        matrix,
        step_distribution: generators.to_vec(),
    })
}

impl GroupOperator {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| to_f64(self.matrix.get(i, j)))
    }

    /// Eigenvalues, descending. The operator is symmetric because matching
    /// involutions give symmetric permutation matrices.
    pub fn spectrum(&self) -> Vec<f64> {
        let eig = nalgebra::SymmetricEigen::new(self.to_f64());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        vals
    }

    /// Exact characteristic polynomial `det(M - t I)` in the Laurent variable.
    pub fn characteristic_polynomial(&self) -> LaurentPoly {
        let m = RingMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            let mut p = LaurentPoly::constant(self.matrix.get(i, j).clone());
            if i == j {
                p = p.add(&LaurentPoly::monomial(-Rational::one(), 1));
            }
            p
        });
        det_laurent(&m, None).expect("square")
    }

    /// Exact test for eigenvalue -1 (period-2 behavior).
    pub fn is_periodic(&self) -> bool {
        let m = RingMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            let mut v = self.matrix.get(i, j).clone();
            if i == j {
                v += Rational::one();
            }
            v
        });
        det_rational(&m).expect("square").is_zero()
    }

    /// Exact distribution after `t` steps, starting from the identity.
    pub fn distribution_at(&self, t: usize) -> Vec<Rational> {
        let id_pos = self
            .elements
            .iter()
            .position(|p| p.iter().enumerate().all(|(i, &x)| i == x))
            .expect("identity in group");
        let mut dist = vec![Rational::zero(); self.dim()];
        dist[id_pos] = Rational::one();
        for _ in 0..t {
            let mut next = vec![Rational::zero(); self.dim()];
            for (col, mass) in dist.iter().enumerate() {
                if mass.is_zero() {
                    continue;
                }
                for row in 0..self.dim() {
                    let p = self.matrix.get(row, col);
                    if !p.is_zero() {
                        next[row] += p * mass;
                    }
                }
            }
            dist = next;
        }
        dist
    }

    /// Exact total-variation distance to uniform after t = 1..=horizon steps.
    pub fn mixing_profile(&self, horizon: usize) -> Vec<Rational> {
        let uniform = Rational::new(1.into(), (self.dim() as i64).into());
        let mut out = Vec::with_capacity(horizon);
        let mut dist = self.distribution_at(0);
        for _ in 0..horizon {
            let mut next = vec![Rational::zero(); self.dim()];
            for (col, mass) in dist.iter().enumerate() {
                if mass.is_zero() {
                    continue;
                }
                for row in 0..self.dim() {
                    let p = self.matrix.get(row, col);
                    if !p.is_zero() {
                        next[row] += p * mass;
                    }
                }
            }
            dist = next;
            let tv: Rational = dist
                .iter()
                .map(|p| (p - &uniform).abs())
                .sum::<Rational>()
                / Rational::from_integer(2.into());
            out.push(tv);
        }
        out
    }
}

/// The walk operator of a graph: involutions of all covers with their exact
/// probabilities, optionally quotiented by a vertex labelling.
pub fn graph_walk_operator(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    labels: Option<&[usize]>,
    cap: usize,
) -> Result<GroupOperator> {
    let covers = enumerate_dimer_covers(g)?;
    if covers.is_empty() {
        return Err(Error::NoPerfectMatching);
    }
    let probs = cover_distribution(&covers, weights);
    let mut merged: BTreeMap<Permutation, Rational> = BTreeMap::new();
    for (cover, p) in covers.iter().zip(probs) {
        let mut perm = matching_involution(g, cover);
        if let Some(l) = labels {
            let num_labels = l.iter().max().unwrap() + 1;
            perm = quotient_permutation(&perm, l, num_labels)?;
        }
        *merged.entry(perm).or_insert_with(Rational::zero) += p;
    }
    let generators: Vec<(Permutation, Rational)> = merged.into_iter().collect();
    group_algebra_operator(&generators, cap)
}

/// Monte Carlo fallback for groups beyond the cap: empirical TV against the
/// uniform distribution on the observed support, with a crude standard error.
pub struct MonteCarloMixing {
    pub tv_estimate: Vec<f64>,
    pub standard_error: Vec<f64>,
}

pub fn monte_carlo_mixing(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloMixing> {
    let sampler = CoverSampler::new(g, weights)?;
    let mut histograms: Vec<HashMap<Permutation, usize>> = vec![HashMap::new(); horizon];
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut state = identity_permutation(g.vertex_count());
        for t in 0..horizon {
            let cover = sampler.sample(seeds.next_u64())?;
            state = compose(&matching_involution(g, &cover), &state);
            *histograms[t].entry(state.clone()).or_insert(0) += 1;
        }
    }
    let mut tv = Vec::with_capacity(horizon);
    let mut se = Vec::with_capacity(horizon);
    for h in &histograms {
        let support = h.len() as f64;
        let uniform = 1.0 / support;
        let t: f64 = h
            .values()
            .map(|&c| (c as f64 / trials as f64 - uniform).abs())
            .sum::<f64>()
            / 2.0;
        tv.push(t);
        se.push((t * (1.0 - t).max(0.0) / trials as f64).sqrt());
    }
    Ok(MonteCarloMixing { tv_estimate: tv, standard_error: se })
}

/// Relative winding statistics of two tracked vertices on the n x n torus.
///
/// Each step matches every vertex to a neighbor by an exact draw from the
/// cover measure; a tracked vertex hops along its matched edge. The
/// "winding" reported is the relative displacement of the two lifts in Z^2
/// (the homology class of the difference path, one reasonable reading of the
/// informal observable).
pub struct WindingStats {
    pub mean: (f64, f64),
    pub half_width_95: (f64, f64),
    pub histogram: BTreeMap<(i64, i64), usize>,
    pub marginal_step_counts: BTreeMap<(i64, i64), usize>,
}

pub fn torus_walk_experiment(
    n: usize,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<WindingStats> {
    if n > 4 {
        return Err(Error::TooLarge(format!("torus side {n} > 4")));
    }
    let g = make_torus_grid(n)?;
    let weights = vec![Rational::one(); g.edge_count()];
    let sampler = CoverSampler::new(&g, &weights)?;
    let tracked = [0usize, 1usize]; // vertex (0,0) and its right neighbor
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut marginal: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut sum = (0.0f64, 0.0f64);
    let mut sumsq = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let mut pos = tracked;
        let mut disp = [(0i64, 0i64); 2];
        for _ in 0..steps {
            let cover = sampler.sample(seeds.next_u64())?;
            for (i, p) in pos.iter_mut().enumerate() {
                let e = *cover
                    .iter()
                    .find(|&&e| {
                        let (b, w) = g.endpoints(e);
                        b == *p || w == *p
                    })
                    .expect("perfect matching covers every vertex");
                let step = torus_edge_step(n, e, *p);
                *marginal.entry(step).or_insert(0) += 1;
                disp[i].0 += step.0;
                disp[i].1 += step.1;
                *p = g.other_end(e, *p);
            }
        }
        let rel = (disp[0].0 - disp[1].0, disp[0].1 - disp[1].1);
        *histogram.entry(rel).or_insert(0) += 1;
        sum.0 += rel.0 as f64;
        sum.1 += rel.1 as f64;
        sumsq.0 += (rel.0 * rel.0) as f64;
        sumsq.1 += (rel.1 * rel.1) as f64;
    }
    let t = trials.max(1) as f64;
    let mean = (sum.0 / t, sum.1 / t);
    let var = (
        (sumsq.0 / t - mean.0 * mean.0).max(0.0),
        (sumsq.1 / t - mean.1 * mean.1).max(0.0),
    );
    let half = (
        1.96 * (var.0 / t).sqrt(),
        1.96 * (var.1 / t).sqrt(),
    );
    Ok(WindingStats { mean, half_width_95: half, histogram, marginal_step_counts: marginal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::corpus;
    use crate::graph::make_grid;

    fn unit(g: &PlanarBipartiteGraph) -> Vec<Rational> {
        vec![Rational::one(); g.edge_count()]
    }

    #[test]
    fn involutions_are_fixed_point_free_neighbor_maps() {
        for name in ["c4", "grid2x3", "grid2x4"] {
            let g = corpus::by_name(name).unwrap().graph;
            for cover in enumerate_dimer_covers(&g).unwrap() {
                let p = matching_involution(&g, &cover);
                for v in 0..g.vertex_count() {
                    assert_ne!(p[v], v);
                    assert_eq!(p[p[v]], v);
                    assert!(g.incident_edges(v).iter().any(|&e| g.other_end(e, v) == p[v]));
                    assert_ne!(g.is_black(v), g.is_black(p[v]));
                }
            }
        }
    }

    #[test]
    fn k2_walk_alternates() {
        let g = make_grid(1, 2).unwrap();
        let traj = simulate_walk(&g, &unit(&g), 4, 0).unwrap();
        assert_eq!(traj[0], vec![1, 0]);
        assert_eq!(traj[1], vec![0, 1]);
        assert_eq!(traj[2], vec![1, 0]);
        assert_eq!(traj[3], vec![0, 1]);
    }

    #[test]
    fn k2_operator_eigenvalues() {
        let g = make_grid(1, 2).unwrap();
        let op = graph_walk_operator(&g, &unit(&g), None, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(op.dim(), 2);
        let spec = op.spectrum();
        assert!((spec[0] - 1.0).abs() < 1e-12 && (spec[1] + 1.0).abs() < 1e-12);
        assert!(op.is_periodic());
        // TV to uniform stays 1/2 forever
        for tv in op.mixing_profile(5) {
            assert_eq!(tv, rat(1, 2));
        }
    }

    #[test]
    fn grid_3x2_quotient_spectrum_exact() {
        let g = make_grid(2, 3).unwrap();
        let labels = corpus::grid_column_labels(2, 3);
        let op = graph_walk_operator(&g, &unit(&g), Some(&labels), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(op.dim(), 6); // S3
        // g = (1/3)(1 + e_(01) + e_(12))
        let gens = &op.step_distribution;
        assert_eq!(gens.len(), 3);
        assert!(gens.iter().all(|(_, p)| *p == rat(1, 3)));
        // char poly = (t-1)(t-2/3)^2 (t+1/3) t^2
        let t = LaurentPoly::monomial(int(1), 1);
        let want = t
            .sub(&LaurentPoly::constant(int(1)))
            .mul(&t.sub(&LaurentPoly::constant(rat(2, 3))))
            .mul(&t.sub(&LaurentPoly::constant(rat(2, 3))))
            .mul(&t.add(&LaurentPoly::constant(rat(1, 3))))
            .mul(&t)
            .mul(&t);
        assert_eq!(op.characteristic_polynomial(), want);
        let spec = op.spectrum();
        let expected = [1.0, 2.0 / 3.0, 2.0 / 3.0, 0.0, 0.0, -1.0 / 3.0];
        for (a, b) in spec.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10, "{spec:?}");
        }
    }

    #[test]
    fn k4_walk_is_simple_random_walk() {
        let gens: Vec<(Permutation, Rational)> = k4_involutions()
            .into_iter()
            .map(|p| (p, rat(1, 3)))
            .collect();
        let op = group_algebra_operator(&gens, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(op.dim(), 4); // Klein four-group
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { int(0) } else { rat(1, 3) };
                assert_eq!(*op.matrix.get(i, j), want);
            }
        }
        // closed-form TV for SRW on K4: after t steps the return probability
        // is 1/4 + (3/4)(-1/3)^t
        let profile = op.mixing_profile(6);
        for (t, tv) in profile.iter().enumerate() {
            let steps = (t + 1) as i32;
            let p_ret = 0.25 + 0.75 * (-1.0f64 / 3.0).powi(steps);
            let expect = ((p_ret - 0.25).abs() + 3.0 * ((1.0 - p_ret) / 3.0 - 0.25).abs()) / 2.0;
            assert!((to_f64(tv) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_rows_sum_to_one_and_spectrum_bounded() {
        for name in ["c4", "grid2x3", "grid2x4"] {
            let g = corpus::by_name(name).unwrap().graph;
            let op = graph_walk_operator(&g, &unit(&g), None, DEFAULT_GROUP_CAP).unwrap();
            for i in 0..op.dim() {
                let row: Rational = (0..op.dim()).map(|j| op.matrix.get(i, j).clone()).sum();
                let col: Rational = (0..op.dim()).map(|j| op.matrix.get(j, i).clone()).sum();
                assert_eq!(row, int(1));
                assert_eq!(col, int(1));
            }
            let spec = op.spectrum();
            assert!((spec[0] - 1.0).abs() < 1e-10, "{name}");
            assert!(spec.iter().all(|&x| x >= -1.0 - 1e-10 && x <= 1.0 + 1e-10));
        }
    }

    #[test]
    fn empirical_one_step_matches_cover_measure() {
        // chi-square at the 1% level: critical values for 1 and 2 dof
        for (name, crit) in [("c4", 6.635), ("grid2x3", 9.210)] {
            let g = corpus::by_name(name).unwrap().graph;
            let w = unit(&g);
            let covers = enumerate_dimer_covers(&g).unwrap();
            let sampler = CoverSampler::new(&g, &w).unwrap();
            let mut counts = vec![0usize; covers.len()];
            let trials = 100_000;
            for seed in 0..trials {
                let c = sampler.sample(seed as u64).unwrap();
                let idx = covers.iter().position(|x| *x == c).unwrap();
                counts[idx] += 1;
            }
            let expected = trials as f64 / covers.len() as f64;
            let chi2: f64 = counts
                .iter()
                .map(|&c| (c as f64 - expected).powi(2) / expected)
                .sum();
            assert!(chi2 < crit, "{name}: chi2 = {chi2}, counts {counts:?}");
        }
    }

    #[test]
    fn grid_3x2_tv_decay_follows_spectral_gap() {
        // the second eigenvalue 2/3 governs the decay of the TV profile
        let g = make_grid(2, 3).unwrap();
        let labels = corpus::grid_column_labels(2, 3);
        let op = graph_walk_operator(&g, &unit(&g), Some(&labels), DEFAULT_GROUP_CAP).unwrap();
        let profile = op.mixing_profile(10);
        for t in 5..9 {
            let ratio = to_f64(&profile[t]) / to_f64(&profile[t - 1]);
            assert!((ratio - 2.0 / 3.0).abs() < 0.05, "t={t}: ratio {ratio}");
        }
        // and an explicit spectral upper bound
        for (t, tv) in profile.iter().enumerate() {
            let bound = 3.0 * (2.0f64 / 3.0).powi(t as i32 + 1);
            assert!(to_f64(tv) <= bound + 1e-12, "t={}: {tv} > {bound}", t + 1);
        }
    }

    #[test]
    fn k4_walk_empirically_uniform() {
        // composing uniform draws of the three K4 involutions mixes to the
        // uniform distribution on the Klein four-group
        use rand::Rng;
        let gens = k4_involutions();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut counts: HashMap<Permutation, usize> = HashMap::new();
        let mut state = identity_permutation(4);
        let steps = 10_000;
        for _ in 0..steps {
            let pick = rng.random_range(0..3);
            state = compose(&gens[pick], &state);
            *counts.entry(state.clone()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 4);
        for (_, c) in counts {
            let f = c as f64 / steps as f64;
            assert!((f - 0.25).abs() < 0.02, "frequency {f}");
        }
    }

    #[test]
    fn group_cap_enforced() {
        let g = make_grid(2, 4).unwrap();
        assert!(matches!(
            graph_walk_operator(&g, &unit(&g), None, 3),
            Err(Error::GroupTooLarge(3))
        ));
    }

    #[test]
    fn torus_marginal_is_uniform_over_neighbors() {
        // on the 2x2 torus each vertex is matched to any neighbor with
        // probability 1/4
        let stats = torus_walk_experiment(2, 8, 2_000, 1).unwrap();
        let total: usize = stats.marginal_step_counts.values().sum();
        for (&step, &count) in &stats.marginal_step_counts {
            let f = count as f64 / total as f64;
            assert!((f - 0.25).abs() < 0.02, "step {step:?}: {f}");
        }
    }

    #[test]
    fn torus_winding_zero_steps_and_symmetry() {
        let stats = torus_walk_experiment(2, 0, 10, 3).unwrap();
        assert_eq!(stats.histogram.len(), 1);
        assert_eq!(*stats.histogram.keys().next().unwrap(), (0, 0));

        let stats = torus_walk_experiment(4, 50, 400, 5).unwrap();
        assert!(stats.mean.0.abs() <= stats.half_width_95.0 + 0.35);
        assert!(stats.mean.1.abs() <= stats.half_width_95.1 + 0.35);
    }
}
