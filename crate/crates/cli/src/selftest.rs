//! Per-subcommand self-tests: oracle-equivalence checks on the built-in
//! corpus. Each prints one line per check and fails fast with a validation
//! exit code.

use num_traits::{One, Signed};

use dimerlab::algebra::rational::{int, rat, Rational};
use dimerlab::corpus;
use dimerlab::error::Error;
use dimerlab::graph::PlanarBipartiteGraph;

type R = Result<(), Error>;

fn unit(g: &PlanarBipartiteGraph) -> Vec<Rational> {
    vec![Rational::one(); g.edge_count()]
}

fn fail(msg: String) -> Error {
    Error::TargetOutsidePolytope(msg) // validation exit; message names the invariant
}

fn check(ok: bool, what: &str) -> R {
    if ok {
        println!("selftest ok: {what}");
        Ok(())
    } else {
        Err(fail(format!("selftest failed: {what}")))
    }
}

pub fn graph() -> R {
    for entry in corpus::all() {
        let g = &entry.graph;
        check(
            g.vertex_count() + g.faces().len() == g.edge_count() + 2,
            &format!("{}: Euler formula V - E + F = 2", entry.name),
        )?;
        check(
            g.faces().iter().all(|f| f.len() % 2 == 0),
            &format!("{}: every face has even length", entry.name),
        )?;
    }
    Ok(())
}

pub fn count() -> R {
    for entry in corpus::all() {
        let g = &entry.graph;
        let z = dimerlab::kasteleyn::partition_function(g, &unit(g))?;
        let oracle = int(dimerlab::oracle::enumerate_dimer_covers(g)?.len() as i64);
        check(z == oracle, &format!("{}: |det K| equals enumerated Z", entry.name))?;
    }
    Ok(())
}

pub fn probs() -> R {
    for name in ["c4", "grid2x3", "grid2x4", "theta"] {
        let g = corpus::by_name(name)?.graph;
        let w = unit(&g);
        let probs = dimerlab::kasteleyn::edge_probabilities(&g, &w)?;
        let covers = dimerlab::oracle::enumerate_dimer_covers(&g)?;
        let z = int(covers.len() as i64);
        for e in 0..g.edge_count() {
            let hits = covers.iter().filter(|c| c.binary_search(&e).is_ok()).count();
            if probs[e] != rat(hits as i64, 1) / &z {
                return Err(fail(format!("{name}: edge {e} probability vs oracle")));
            }
        }
        for v in 0..g.vertex_count() {
            let sum: Rational = g.incident_edges(v).iter().map(|&e| probs[e].clone()).sum();
            if !sum.is_one() {
                return Err(fail(format!("{name}: vertex {v} probability sum is 1")));
            }
        }
        println!("selftest ok: {name}: probabilities oracle-exact with unit vertex sums");
    }
    Ok(())
}

pub fn sample() -> R {
    use dimerlab::kasteleyn::{sample_dimer_cover_with, SamplePath};
    for name in ["c4", "grid2x3"] {
        let g = corpus::by_name(name)?.graph;
        let w = unit(&g);
        for seed in 0..20 {
            let a = sample_dimer_cover_with(&g, &w, seed, SamplePath::Recompute)?;
            let b = sample_dimer_cover_with(&g, &w, seed, SamplePath::RankOneUpdate)?;
            if a != b {
                return Err(fail(format!("{name}: sampler paths agree at seed {seed}")));
            }
        }
        println!("selftest ok: {name}: recompute and rank-1 sampler paths bit-identical");
    }
    Ok(())
}

pub fn psi() -> R {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for name in ["c4", "grid2x3"] {
        let g = corpus::by_name(name)?.graph;
        for _ in 0..5 {
            let target = dimerlab::psi::convex_combination_target(&g, &mut rng)?;
            let inv = dimerlab::psi::invert_psi(&g, &target)?;
            let forward = dimerlab::psi::expected_fractional_matching(&g, &inv.weights)?;
            let tol = rat(1, 10_000_000_000i64);
            for e in 0..g.edge_count() {
                if (&forward[e] - &target[e]).abs() > tol {
                    return Err(fail(format!("{name}: Psi round trip within 1e-10")));
                }
            }
        }
        println!("selftest ok: {name}: Psi inversion round trips within 1e-10");
    }
    Ok(())
}

pub fn ddimer() -> R {
    for name in ["c4", "grid2x3", "grid2x4"] {
        let g = corpus::by_name(name)?.graph;
        let id = dimerlab::double_dimer::verify_magnetic_identity(&g, &unit(&g))?;
        check(id.equal, &format!("{name}: det K(q) det K(1/q) equals loop-area sum"))?;
    }
    let d1 = dimerlab::double_dimer::z2::loop_density(1)?;
    check((d1 - 1.0 / 32.0).abs() < 1e-8, "Z^2 area-1 loop density is 1/32")?;
    Ok(())
}

pub fn web() -> R {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for name in ["c4", "theta"] {
        let g = corpus::by_name(name)?.graph;
        for n in [2u32, 3] {
            for _ in 0..3 {
                let phi = dimerlab::multiweb::random_connection(&g, n as usize, &mut rng);
                let res = dimerlab::multiweb::verify_sln_sum(&g, &phi, n)?;
                if !res.equal_up_to_sign {
                    return Err(fail(format!("{name}: SL{n} determinant-trace identity")));
                }
            }
            println!("selftest ok: {name}: SL{n} determinant-trace identity, 3 random connections");
        }
    }
    let entry = corpus::annulus_c4();
    let c = dimerlab::multiweb::annulus_coefficients(&entry.graph, Some(entry.holes[0]))?;
    check(c[0] == int(2) && c[1] == int(1), "annular C4 coefficients are (2, 1)")?;
    Ok(())
}

pub fn walk() -> R {
    let g = corpus::by_name("grid2x3")?.graph;
    let labels = corpus::grid_column_labels(2, 3);
    let op = dimerlab::walk::graph_walk_operator(
        &g,
        &unit(&g),
        Some(&labels),
        dimerlab::walk::DEFAULT_GROUP_CAP,
    )?;
    check(op.dim() == 6, "3x2 grid column quotient generates S3")?;
    let spec = op.spectrum();
    let expected = [1.0, 2.0 / 3.0, 2.0 / 3.0, 0.0, 0.0, -1.0 / 3.0];
    check(
        spec.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-10),
        "3x2 quotient spectrum is {1, 2/3, 2/3, -1/3, 0, 0}",
    )?;
    let gens: Vec<(Vec<usize>, Rational)> = dimerlab::walk::k4_involutions()
        .into_iter()
        .map(|p| (p, rat(1, 3)))
        .collect();
    let k4 = dimerlab::walk::group_algebra_operator(&gens, 100)?;
    check(k4.dim() == 4, "K4 involutions generate the Klein four-group")?;
    Ok(())
}

pub fn oracle() -> R {
    for entry in corpus::all() {
        let g = &entry.graph;
        let covers = dimerlab::oracle::enumerate_dimer_covers(g)?;
        let measure = dimerlab::oracle::double_dimer_measure(g)?;
        let total: u128 = measure.iter().map(|(_, w)| w).sum();
        check(
            total == (covers.len() as u128).pow(2),
            &format!("{}: sum of 2^loops equals |M|^2", entry.name),
        )?;
    }
    Ok(())
}
