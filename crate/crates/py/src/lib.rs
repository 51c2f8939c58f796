//! Python bindings: graphs, exact dimer statistics, the Psi map, magnetic
//! double dimers, lamination coefficients and walk spectra. Exact rationals
//! cross the boundary as `p/q` strings paired with float approximations.

use std::collections::BTreeMap;

use num_traits::One;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dimerlab::algebra::rational::{format_rational, parse_rational, to_f64, Rational};
use dimerlab::corpus;
use dimerlab::error::Error;
use dimerlab::graph::{make_grid, make_torus_grid, parse_graph, PlanarBipartiteGraph};

fn pyerr(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational_pair(r: &Rational) -> (String, f64) {
    (format_rational(r), to_f64(r))
}

/// A planar bipartite graph with edge weights.
#[pyclass]
struct Graph {
    inner: PlanarBipartiteGraph,
    weights: Vec<Rational>,
    holes: Vec<usize>,
}

#[pymethods]
impl Graph {
    /// Built-in corpus graph by name (k2, c4, grid2x3, annulus_w2, ...).
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let entry = corpus::by_name(name).map_err(pyerr)?;
        let weights = vec![Rational::one(); entry.graph.edge_count()];
        Ok(Graph { inner: entry.graph, weights, holes: entry.holes })
    }

    /// Rectangular grid graph.
    #[staticmethod]
    fn grid(rows: usize, cols: usize) -> PyResult<Self> {
        let g = make_grid(rows, cols).map_err(pyerr)?;
        let weights = vec![Rational::one(); g.edge_count()];
        Ok(Graph { inner: g, weights, holes: Vec::new() })
    }

    /// n x n torus grid (enumeration-only).
    #[staticmethod]
    fn torus(n: usize) -> PyResult<Self> {
        let g = make_torus_grid(n).map_err(pyerr)?;
        let weights = vec![Rational::one(); g.edge_count()];
        Ok(Graph { inner: g, weights, holes: Vec::new() })
    }

    /// Parse a `dimergraph v1` file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
        let (g, weights) = parse_graph(&text).map_err(pyerr)?;
        Ok(Graph { inner: g, weights, holes: Vec::new() })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn cycle_dimension(&self) -> usize {
        self.inner.cycle_dimension()
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.inner.faces().len()
    }

    #[getter]
    fn holes(&self) -> Vec<usize> {
        self.holes.clone()
    }

    /// Edge endpoints as (black, white) pairs.
    fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.inner.edge_count()).map(|e| self.inner.endpoints(e)).collect()
    }

    /// Bounded face ids.
    fn bounded_faces(&self) -> Vec<usize> {
        self.inner.bounded_faces().map(|f| f.id).collect()
    }

    /// Set edge weights from `p/q` strings (one per edge).
    fn set_weights(&mut self, weights: Vec<String>) -> PyResult<()> {
        if weights.len() != self.inner.edge_count() {
            return Err(PyValueError::new_err("one weight per edge required"));
        }
        self.weights = weights
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_, _>>()
            .map_err(pyerr)?;
        Ok(())
    }

    /// Exact partition function as (rational string, float).
    fn partition_function(&self) -> PyResult<(String, f64)> {
        let z = dimerlab::kasteleyn::partition_function(&self.inner, &self.weights)
            .map_err(pyerr)?;
        Ok(rational_pair(&z))
    }

    /// Number of dimer covers by enumeration.
    fn cover_count(&self) -> PyResult<usize> {
        Ok(dimerlab::oracle::enumerate_dimer_covers(&self.inner).map_err(pyerr)?.len())
    }

    /// Per-edge probabilities as (rational string, float) pairs.
    fn edge_probabilities(&self) -> PyResult<Vec<(String, f64)>> {
        let p = dimerlab::kasteleyn::edge_probabilities(&self.inner, &self.weights)
            .map_err(pyerr)?;
        Ok(p.iter().map(rational_pair).collect())
    }

    /// Exact samples from the weighted cover measure.
    fn sample(&self, samples: usize, seed: u64) -> PyResult<Vec<Vec<usize>>> {
        use rand::RngCore;
        use rand_chacha_seed::derive_seeds;
        let mut out = Vec::with_capacity(samples);
        let mut seeds = derive_seeds(seed);
        for _ in 0..samples {
            out.push(
                dimerlab::kasteleyn::sample_dimer_cover(&self.inner, &self.weights, seeds.next_u64())
                    .map_err(pyerr)?,
            );
        }
        Ok(out)
    }

    /// Face weights of the current edge weights: {face id: rational string}.
    fn face_weights(&self) -> PyResult<BTreeMap<usize, String>> {
        let xs = dimerlab::psi::face_weights(&self.inner, &self.weights).map_err(pyerr)?;
        Ok(xs.iter().map(|(f, x)| (*f, format_rational(x))).collect())
    }

    /// Psi: face weights ({face id: "p/q"}) to the expected fractional
    /// matching (one (rational, float) per edge).
    fn psi_forward(&self, xs: BTreeMap<usize, String>) -> PyResult<Vec<(String, f64)>> {
        let parsed: BTreeMap<usize, Rational> = xs
            .into_iter()
            .map(|(f, s)| Ok((f, parse_rational(&s).map_err(pyerr)?)))
            .collect::<PyResult<_>>()?;
        let m = dimerlab::psi::psi_forward(&self.inner, &parsed).map_err(pyerr)?;
        Ok(m.iter().map(rational_pair).collect())
    }

    /// Inverse Psi: target fractional matching (one "p/q" per edge) to face
    /// weights {face id: (rational string, float)}.
    fn psi_invert(&self, target: Vec<String>) -> PyResult<BTreeMap<usize, (String, f64)>> {
        let parsed: Vec<Rational> = target
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_, _>>()
            .map_err(pyerr)?;
        let inv = dimerlab::psi::invert_psi(&self.inner, &parsed).map_err(pyerr)?;
        Ok(inv.face_weights.iter().map(|(f, x)| (*f, rational_pair(x))).collect())
    }

    /// det K(q) det K(1/q) as a Laurent polynomial string.
    fn magnetic_partition(&self) -> PyResult<String> {
        let p = dimerlab::double_dimer::magnetic_partition(&self.inner, &self.weights)
            .map_err(pyerr)?;
        Ok(p.to_string())
    }

    /// Exact check of the magnetic double-dimer identity.
    fn verify_magnetic_identity(&self) -> PyResult<bool> {
        Ok(dimerlab::double_dimer::verify_magnetic_identity(&self.inner, &self.weights)
            .map_err(pyerr)?
            .equal)
    }

    /// Annulus lamination coefficients C_j as rational strings.
    #[pyo3(signature = (hole=None))]
    fn annulus_coefficients(&self, hole: Option<usize>) -> PyResult<Vec<String>> {
        let h = hole.or_else(|| self.holes.first().copied());
        let c = dimerlab::multiweb::annulus_coefficients(&self.inner, h).map_err(pyerr)?;
        Ok(c.iter().map(format_rational).collect())
    }

    /// Eigenvalues of the dimer-walk operator, optionally quotiented by
    /// vertex labels.
    #[pyo3(signature = (labels=None))]
    fn walk_spectrum(&self, labels: Option<Vec<usize>>) -> PyResult<Vec<f64>> {
        let op = dimerlab::walk::graph_walk_operator(
            &self.inner,
            &self.weights,
            labels.as_deref(),
            dimerlab::walk::DEFAULT_GROUP_CAP,
        )
        .map_err(pyerr)?;
        Ok(op.spectrum())
    }
}

/// Deterministic per-call seed stream (mirrors the CLI).
mod rand_chacha_seed {
    use rand_chacha::rand_core::SeedableRng;

    pub fn derive_seeds(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }
}

/// Density of Z^2 double-dimer loops of the given area (1..3).
#[pyfunction]
fn loop_density(area: usize) -> PyResult<f64> {
    dimerlab::double_dimer::z2::loop_density(area).map_err(pyerr)
}

/// The closed form printed in the literature for the given area.
#[pyfunction]
fn density_closed_form(area: usize) -> PyResult<f64> {
    dimerlab::double_dimer::z2::density_closed_form(area).map_err(pyerr)
}

/// Inverse-Kasteleyn coupling K^{-1}((0,0),(x,y)) on Z^2.
#[pyfunction]
fn coupling(x: i64, y: i64) -> PyResult<f64> {
    dimerlab::double_dimer::z2::coupling(x, y).map_err(pyerr)
}

/// Probability that all the given Z^2 edges occur in a random dimer cover.
#[pyfunction]
fn pair_probability(edges: Vec<((i64, i64), (i64, i64))>) -> PyResult<f64> {
    dimerlab::double_dimer::z2::pair_probability(&edges).map_err(pyerr)
}

/// Relative winding experiment of two tracked vertices on the n x n torus.
#[pyfunction]
fn torus_winding(
    n: usize,
    steps: usize,
    trials: usize,
    seed: u64,
) -> PyResult<((f64, f64), (f64, f64), BTreeMap<(i64, i64), usize>)> {
    let s = dimerlab::walk::torus_walk_experiment(n, steps, trials, seed).map_err(pyerr)?;
    Ok((s.mean, s.half_width_95, s.histogram))
}

#[pymodule]
fn dimerlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(loop_density, m)?)?;
    m.add_function(wrap_pyfunction!(density_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(coupling, m)?)?;
    m.add_function(wrap_pyfunction!(pair_probability, m)?)?;
    m.add_function(wrap_pyfunction!(torus_winding, m)?)?;
    Ok(())
}
