//! dimerlab command line: exact dimer statistics, the Psi map, magnetic
//! double dimers, SL2/SL3 webs and dimer walks, over built-in graphs or
//! `dimergraph v1` files.

mod selftest;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde_json::{json, Value};

use dimerlab::algebra::matrix::RingMatrix;
use dimerlab::algebra::rational::{format_rational, parse_rational, to_f64, Rational};
use dimerlab::corpus;
use dimerlab::error::Error;
use dimerlab::graph::{parse_graph, PlanarBipartiteGraph};
use dimerlab::multiweb::{MatrixLocalSystem, SqMatrix};
use dimerlab::oracle::Multiweb;

const EXIT_VALIDATION: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_FILE: u8 = 66;

#[derive(Parser)]
#[command(name = "dimerlab", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct GraphSource {
    /// Path to a `dimergraph v1` file
    #[arg(long, conflicts_with = "builtin")]
    graph: Option<String>,
    /// Name of a built-in graph (k2, c4, p4, grid2x3, grid2x4, grid3x4,
    /// grid4x4, grid2x5, annulus_c4, annulus_w2, pants_2x5, degenerate, theta)
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph and print its structure
    Graph {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        selftest: bool,
    },
    /// Partition function (weighted dimer-cover count)
    Count {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        selftest: bool,
    },
    /// Edge probabilities (the expected fractional matching)
    Probs {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        selftest: bool,
    },
    /// Draw dimer covers exactly from the weighted measure
    Sample {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        selftest: bool,
    },
    /// The Psi map between face weights and fractional matchings
    Psi {
        #[command(subcommand)]
        action: PsiAction,
    },
    /// Magnetic double-dimer identities and Z^2 loop densities
    Ddimer {
        #[command(subcommand)]
        action: DdimerAction,
    },
    /// SL2/SL3 block determinants, multiweb traces, lamination coefficients
    Web {
        #[command(subcommand)]
        action: WebAction,
    },
    /// Dimer-driven random walks on permutations
    Walk {
        #[command(subcommand)]
        action: WalkAction,
    },
    /// Brute-force enumeration dumps
    Oracle {
        #[command(flatten)]
        source: GraphSource,
        /// covers | multiwebs | double
        #[arg(long, default_value = "covers")]
        kind: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        selftest: bool,
    },
}

#[derive(Subcommand)]
enum PsiAction {
    /// Face weights -> expected fractional matching
    Forward {
        #[command(flatten)]
        source: GraphSource,
        /// JSON file mapping face id -> rational, e.g. {"0": "3/2"}
        #[arg(long)]
        faceweights: String,
        #[arg(long)]
        selftest: bool,
    },
    /// Fractional matching -> face weights (Newton inversion)
    Invert {
        #[command(flatten)]
        source: GraphSource,
        /// JSON file mapping edge id -> rational target probability
        #[arg(long)]
        target: String,
        #[arg(long)]
        selftest: bool,
    },
    /// Run the module self-checks only
    Selftest,
}

#[derive(Subcommand)]
enum DdimerAction {
    /// Check det K(q) det K(1/q) against the loop-area oracle, exactly
    Verify {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        selftest: bool,
    },
    /// Density of Z^2 double-dimer loops of a given area (1..3)
    Density {
        #[arg(long)]
        area: usize,
        #[arg(long)]
        selftest: bool,
    },
    Selftest,
}

#[derive(Subcommand)]
enum WebAction {
    /// Block Kasteleyn determinant of an SL_n connection
    Det {
        #[command(flatten)]
        source: GraphSource,
        /// JSON connection file: {"n": 2, "edges": {"0": [["1","0"],["0","1"]]}}
        #[arg(long)]
        connection: String,
        #[arg(long)]
        selftest: bool,
    },
    /// Trace of one multiweb under an SL_n connection
    Trace {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        connection: String,
        /// JSON list of edge multiplicities, e.g. [1,1,2,2]
        #[arg(long)]
        multiweb: String,
        #[arg(long)]
        selftest: bool,
    },
    /// Lamination coefficients on an annulus or pair of pants
    Coeffs {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_parser = ["annulus", "pants"])]
        surface: String,
        /// Hole face id (defaults to the builtin's designated hole)
        #[arg(long)]
        hole: Option<usize>,
        /// Second hole face id for the pants surface
        #[arg(long)]
        hole2: Option<usize>,
        /// Degree cap for pants interpolation
        #[arg(long, default_value_t = 3)]
        cap: usize,
        #[arg(long)]
        selftest: bool,
    },
    Selftest,
}

#[derive(Subcommand)]
enum WalkAction {
    /// Simulate the walk and print the trajectory of permutations
    Simulate {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Quotient grid walks to column permutations (builtin grids only)
        #[arg(long)]
        quotient_columns: bool,
        #[arg(long)]
        selftest: bool,
    },
    /// Spectrum of the group-algebra transition operator
    Spectrum {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        quotient_columns: bool,
        #[arg(long)]
        selftest: bool,
    },
    /// Exact total-variation mixing profile
    Mixing {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        #[arg(long)]
        quotient_columns: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        selftest: bool,
    },
    /// Relative winding of two tracked vertices on the torus
    Winding {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        selftest: bool,
    },
    Selftest,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DIMERLAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: DIMERLAB_THREADS must be a positive integer");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                Error::Io(_) | Error::Parse(_) => EXIT_FILE,
                _ => EXIT_VALIDATION,
            };
            ExitCode::from(code)
        }
    }
}

fn load_graph(source: &GraphSource) -> Result<(PlanarBipartiteGraph, Vec<Rational>), Error> {
    match (&source.graph, &source.builtin) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            parse_graph(&text)
        }
        (None, Some(name)) => {
            let entry = corpus::by_name(name)?;
            let w = vec![Rational::one(); entry.graph.edge_count()];
            Ok((entry.graph, w))
        }
        (None, None) => Err(Error::Parse("one of --graph or --builtin is required".into())),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn rational_value(r: &Rational) -> Value {
    json!({ "rational": format_rational(r), "decimal": to_f64(r) })
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Graph { source, format, selftest } => {
            if selftest {
                return selftest::graph();
            }
            let (g, weights) = load_graph(&source)?;
            cmd_graph(&g, &weights, format)
        }
        Command::Count { source, format, selftest } => {
            if selftest {
                return selftest::count();
            }
            let (g, weights) = load_graph(&source)?;
            cmd_count(&g, &weights, format)
        }
        Command::Probs { source, format, selftest } => {
            if selftest {
                return selftest::probs();
            }
            let (g, weights) = load_graph(&source)?;
            cmd_probs(&g, &weights, format)
        }
        Command::Sample { source, samples, seed, selftest } => {
            if selftest {
                return selftest::sample();
            }
            let (g, weights) = load_graph(&source)?;
            cmd_sample(&g, &weights, samples, seed)
        }
        Command::Psi { action } => match action {
            PsiAction::Selftest => selftest::psi(),
            PsiAction::Forward { source, faceweights, selftest } => {
                if selftest {
                    return selftest::psi();
                }
                let (g, _) = load_graph(&source)?;
                cmd_psi_forward(&g, &faceweights)
            }
            PsiAction::Invert { source, target, selftest } => {
                if selftest {
                    return selftest::psi();
                }
                let (g, _) = load_graph(&source)?;
                cmd_psi_invert(&g, &target)
            }
        },
        Command::Ddimer { action } => match action {
            DdimerAction::Selftest => selftest::ddimer(),
            DdimerAction::Verify { source, selftest } => {
                if selftest {
                    return selftest::ddimer();
                }
                let (g, weights) = load_graph(&source)?;
                cmd_ddimer_verify(&g, &weights)
            }
            DdimerAction::Density { area, selftest } => {
                if selftest {
                    return selftest::ddimer();
                }
                cmd_ddimer_density(area)
            }
        },
        Command::Web { action } => match action {
            WebAction::Selftest => selftest::web(),
            WebAction::Det { source, connection, selftest } => {
                if selftest {
                    return selftest::web();
                }
                let (g, _) = load_graph(&source)?;
                let phi = load_connection(&g, &connection)?;
                cmd_web_det(&g, &phi)
            }
            WebAction::Trace { source, connection, multiweb, selftest } => {
                if selftest {
                    return selftest::web();
                }
                let (g, _) = load_graph(&source)?;
                let phi = load_connection(&g, &connection)?;
                cmd_web_trace(&g, &phi, &multiweb)
            }
            WebAction::Coeffs { source, surface, hole, hole2, cap, selftest } => {
                if selftest {
                    return selftest::web();
                }
                cmd_web_coeffs(&source, &surface, hole, hole2, cap)
            }
        },
        Command::Walk { action } => match action {
            WalkAction::Selftest => selftest::walk(),
            WalkAction::Simulate { source, steps, seed, quotient_columns, selftest } => {
                if selftest {
                    return selftest::walk();
                }
                let (g, weights) = load_graph(&source)?;
                let labels = quotient_labels(&source, quotient_columns)?;
                cmd_walk_simulate(&g, &weights, steps, seed, labels)
            }
            WalkAction::Spectrum { source, quotient_columns, selftest } => {
                if selftest {
                    return selftest::walk();
                }
                let (g, weights) = load_graph(&source)?;
                let labels = quotient_labels(&source, quotient_columns)?;
                cmd_walk_spectrum(&g, &weights, labels)
            }
            WalkAction::Mixing { source, horizon, quotient_columns, format, selftest } => {
                if selftest {
                    return selftest::walk();
                }
                let (g, weights) = load_graph(&source)?;
                let labels = quotient_labels(&source, quotient_columns)?;
                cmd_walk_mixing(&g, &weights, horizon, labels, format)
            }
            WalkAction::Winding { n, steps, trials, seed, format, selftest } => {
                if selftest {
                    return selftest::walk();
                }
                cmd_walk_winding(n, steps, trials, seed, format)
            }
        },
        Command::Oracle { source, kind, n, selftest } => {
            if selftest {
                return selftest::oracle();
            }
            let (g, _) = load_graph(&source)?;
            cmd_oracle(&g, &kind, n)
        }
    }
}

fn cmd_graph(g: &PlanarBipartiteGraph, weights: &[Rational], format: Format) -> Result<(), Error> {
    let faces: Vec<Value> = g
        .faces()
        .iter()
        .map(|f| {
            json!({
                "id": f.id,
                "length": f.len(),
                "edges": f.edge_ids().collect::<Vec<_>>(),
                "outer": g.is_outer(f.id),
            })
        })
        .collect();
    let nondeg = if g.is_torus() {
        Value::Null
    } else {
        match dimerlab::oracle::check_nondegenerate(g) {
            Ok(rep) => json!({
                "nondegenerate": rep.nondegenerate,
                "polytope_dim": rep.polytope_dim,
                "cycle_dim": rep.cycle_dim,
                "unused_edges": rep.unused_edges,
            }),
            Err(Error::NoPerfectMatching) => json!({"no_perfect_matching": true}),
            Err(e) => return Err(e),
        }
    };
    let v = json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "faces": if g.is_torus() { Value::Null } else { json!(g.faces().len()) },
        "cycle_dimension": g.cycle_dimension(),
        "surface": if g.is_torus() { "torus" } else { "plane" },
        "weighted": weights.iter().any(|w| !w.is_one()),
        "face_list": if g.is_torus() { Value::Null } else { json!(faces) },
        "matching_polytope": nondeg,
    });
    match format {
        Format::Text => {
            println!(
                "V={} E={} F={} d={} surface={}",
                g.vertex_count(),
                g.edge_count(),
                if g.is_torus() { 0 } else { g.faces().len() },
                g.cycle_dimension(),
                if g.is_torus() { "torus" } else { "plane" }
            );
        }
        _ => emit(&v),
    }
    Ok(())
}

fn cmd_count(g: &PlanarBipartiteGraph, weights: &[Rational], format: Format) -> Result<(), Error> {
    let z = dimerlab::kasteleyn::partition_function(g, weights)?;
    let covers = if g.vertex_count() <= dimerlab::oracle::DEFAULT_VERTEX_CAP {
        Some(dimerlab::oracle::enumerate_dimer_covers(g)?.len())
    } else {
        None
    };
    match format {
        Format::Text => println!("{}", format_rational(&z)),
        _ => emit(&json!({
            "partition_function": rational_value(&z),
            "cover_count": covers,
        })),
    }
    Ok(())
}

fn cmd_probs(g: &PlanarBipartiteGraph, weights: &[Rational], format: Format) -> Result<(), Error> {
    let probs = dimerlab::kasteleyn::edge_probabilities(g, weights)?;
    match format {
        Format::Csv => {
            println!("edge,black,white,probability,decimal");
            for (e, p) in probs.iter().enumerate() {
                let (b, w) = g.endpoints(e);
                println!("{e},{b},{w},{},{}", format_rational(p), to_f64(p));
            }
        }
        Format::Text => {
            for (e, p) in probs.iter().enumerate() {
                println!("edge {e}: {}", format_rational(p));
            }
        }
        Format::Json => {
            let edges: Vec<Value> = probs
                .iter()
                .enumerate()
                .map(|(e, p)| {
                    let (b, w) = g.endpoints(e);
                    json!({"edge": e, "black": b, "white": w, "probability": rational_value(p)})
                })
                .collect();
            emit(&json!({ "edges": edges }));
        }
    }
    Ok(())
}

fn cmd_sample(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    samples: usize,
    seed: u64,
) -> Result<(), Error> {
    use rand::RngCore;
    use rand_chacha::rand_core::SeedableRng;
    let mut seeds = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let cover = dimerlab::kasteleyn::sample_dimer_cover(g, weights, seeds.next_u64())?;
        out.push(cover);
    }
    emit(&json!({ "seed": seed, "samples": out }));
    Ok(())
}

fn parse_rational_map(path: &str) -> Result<BTreeMap<usize, Rational>, Error> {
    let text = std::fs::read_to_string(path)?;
    let raw: BTreeMap<String, String> = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    raw.into_iter()
        .map(|(k, v)| {
            let id: usize =
                k.parse().map_err(|_| Error::Parse(format!("bad id {k:?} in {path}")))?;
            Ok((id, parse_rational(&v)?))
        })
        .collect()
}

fn cmd_psi_forward(g: &PlanarBipartiteGraph, path: &str) -> Result<(), Error> {
    let xs = parse_rational_map(path)?;
    let matching = dimerlab::psi::psi_forward(g, &xs)?;
    let edges: BTreeMap<String, Value> = matching
        .iter()
        .enumerate()
        .map(|(e, p)| (e.to_string(), rational_value(p)))
        .collect();
    emit(&json!({ "fractional_matching": edges }));
    Ok(())
}

fn cmd_psi_invert(g: &PlanarBipartiteGraph, path: &str) -> Result<(), Error> {
    let raw = parse_rational_map(path)?;
    let mut target = vec![Rational::zero(); g.edge_count()];
    for (e, v) in raw {
        if e >= g.edge_count() {
            return Err(Error::Parse(format!("edge id {e} out of range")));
        }
        target[e] = v;
    }
    let inv = dimerlab::psi::invert_psi(g, &target)?;
    let xs: BTreeMap<String, Value> = inv
        .face_weights
        .iter()
        .map(|(f, x)| (f.to_string(), rational_value(x)))
        .collect();
    emit(&json!({
        "face_weights": xs,
        "iterations": inv.iterations,
        "residual": inv.residual,
    }));
    Ok(())
}

fn cmd_ddimer_verify(g: &PlanarBipartiteGraph, weights: &[Rational]) -> Result<(), Error> {
    let id = dimerlab::double_dimer::verify_magnetic_identity(g, weights)?;
    let z = dimerlab::kasteleyn::partition_function(g, weights)?;
    emit(&json!({
        "determinant_side": id.determinant_side.to_string(),
        "oracle_side": id.oracle_side.to_string(),
        "equal": id.equal,
        "palindromic": id.determinant_side.is_palindromic(),
        "q1_equals_z_squared": id.determinant_side.eval(&Rational::one()) == &z * &z,
    }));
    if !id.equal {
        return Err(Error::Parse("magnetic identity failed".into()));
    }
    Ok(())
}

fn cmd_ddimer_density(area: usize) -> Result<(), Error> {
    let computed = dimerlab::double_dimer::z2::loop_density(area)?;
    let closed = dimerlab::double_dimer::z2::density_closed_form(area)?;
    let mut v = json!({
        "area": area,
        "computed": computed,
        "closed_form": closed,
    });
    if area == 3 {
        let rec = dimerlab::double_dimer::z2::area3_printed_reconstruction()?;
        v["printed_form_reconstruction"] = json!(rec);
        v["note"] = json!(
            "the printed area-3 expression is negative and equals 3S-12L of the \
             straight/bent shape probabilities; `computed` is the honest density 3(2S+4L)"
        );
    }
    emit(&v);
    Ok(())
}

fn load_connection(g: &PlanarBipartiteGraph, path: &str) -> Result<MatrixLocalSystem, Error> {
    let text = std::fs::read_to_string(path)?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    let n = raw["n"].as_u64().ok_or_else(|| Error::Parse("connection needs field n".into()))?
        as usize;
    let edges = raw["edges"]
        .as_object()
        .ok_or_else(|| Error::Parse("connection needs an edges map".into()))?;
    let mut matrices: Vec<SqMatrix> = (0..g.edge_count()).map(|_| RingMatrix::identity(n)).collect();
    for (k, v) in edges {
        let e: usize = k.parse().map_err(|_| Error::Parse(format!("bad edge id {k:?}")))?;
        if e >= g.edge_count() {
            return Err(Error::Parse(format!("edge id {e} out of range")));
        }
        let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array".into()))?;
        if rows.len() != n {
            return Err(Error::Parse(format!("edge {e}: expected {n} rows")));
        }
        let mut m: SqMatrix = RingMatrix::identity(n);
        for (i, row) in rows.iter().enumerate() {
            let cells =
                row.as_array().ok_or_else(|| Error::Parse("matrix row must be an array".into()))?;
            if cells.len() != n {
                return Err(Error::Parse(format!("edge {e}: expected {n} columns")));
            }
            for (j, cell) in cells.iter().enumerate() {
                let s = cell
                    .as_str()
                    .map(str::to_owned)
                    .or_else(|| cell.as_i64().map(|x| x.to_string()))
                    .ok_or_else(|| Error::Parse("matrix entries are rational strings".into()))?;
                m.set(i, j, parse_rational(&s)?);
            }
        }
        matrices[e] = m;
    }
    let phi = MatrixLocalSystem { n, matrices };
    phi.validate(g)?;
    Ok(phi)
}

fn cmd_web_det(g: &PlanarBipartiteGraph, phi: &MatrixLocalSystem) -> Result<(), Error> {
    let det = dimerlab::multiweb::det_block(g, phi)?;
    let check = dimerlab::multiweb::verify_sln_sum(g, phi, phi.n as u32)?;
    emit(&json!({
        "n": phi.n,
        "determinant": rational_value(&det),
        "trace_sum": rational_value(&check.trace_sum),
        "identity_holds": check.equal_up_to_sign,
        "multiwebs": check.multiweb_count,
    }));
    Ok(())
}

fn cmd_web_trace(
    g: &PlanarBipartiteGraph,
    phi: &MatrixLocalSystem,
    multiweb_path: &str,
) -> Result<(), Error> {
    let text = std::fs::read_to_string(multiweb_path)?;
    let mult: Vec<u8> = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{multiweb_path}: {e}")))?;
    if mult.len() != g.edge_count() {
        return Err(Error::Parse("one multiplicity per edge required".into()));
    }
    let order = phi.n as u32;
    let m = Multiweb { order, mult };
    let tr = dimerlab::multiweb::multiweb_trace(g, &m, phi)?;
    emit(&json!({ "order": order, "trace": rational_value(&tr) }));
    Ok(())
}

fn cmd_web_coeffs(
    source: &GraphSource,
    surface: &str,
    hole: Option<usize>,
    hole2: Option<usize>,
    cap: usize,
) -> Result<(), Error> {
    // builtin entries carry designated holes; files must name them
    let (g, holes) = match (&source.graph, &source.builtin) {
        (None, Some(name)) => {
            let entry = corpus::by_name(name)?;
            (entry.graph, entry.holes)
        }
        _ => {
            let (g, _) = load_graph(source)?;
            (g, Vec::new())
        }
    };
    let h1 = hole.or(holes.first().copied());
    match surface {
        "annulus" => {
            let c = dimerlab::multiweb::annulus_coefficients(&g, h1)?;
            let oracle = match h1 {
                Some(h) => dimerlab::multiweb::oracle_annulus_coefficients(&g, h)?,
                None => Vec::new(),
            };
            let coeffs: Vec<String> = c.iter().map(format_rational).collect();
            emit(&json!({
                "surface": "annulus",
                "hole": h1.map(|h| h as i64).unwrap_or(-1),
                "coefficients": coeffs,
                "oracle": oracle.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            }));
        }
        "pants" => {
            let h1 = h1.ok_or(Error::BadHoleFace(usize::MAX))?;
            let h2 = hole2.or(holes.get(1).copied()).ok_or(Error::BadHoleFace(usize::MAX))?;
            let poly = dimerlab::multiweb::pants_coefficients(&g, h1, h2, cap)?;
            let oracle = dimerlab::multiweb::oracle_pants_coefficients(&g, h1, h2)?;
            let coeffs: BTreeMap<String, String> = poly
                .coefficients
                .iter()
                .map(|((i, j, k), c)| (format!("{i},{j},{k}"), format_rational(c)))
                .collect();
            let oracle_map: BTreeMap<String, String> = oracle
                .iter()
                .map(|((i, j, k), c)| (format!("{i},{j},{k}"), c.to_string()))
                .collect();
            emit(&json!({
                "surface": "pants",
                "holes": [h1, h2],
                "coefficients": coeffs,
                "oracle": oracle_map,
            }));
        }
        other => return Err(Error::Parse(format!("unknown surface {other:?}"))),
    }
    Ok(())
}

fn quotient_labels(
    source: &GraphSource,
    quotient_columns: bool,
) -> Result<Option<Vec<usize>>, Error> {
    if !quotient_columns {
        return Ok(None);
    }
    match source.builtin.as_deref() {
        Some("grid2x3") => Ok(Some(corpus::grid_column_labels(2, 3))),
        Some("grid2x4") => Ok(Some(corpus::grid_column_labels(2, 4))),
        Some("grid2x5") => Ok(Some(corpus::grid_column_labels(2, 5))),
        Some("grid3x4") => Ok(Some(corpus::grid_column_labels(3, 4))),
        Some("grid4x4") => Ok(Some(corpus::grid_column_labels(4, 4))),
        Some("c4") => Ok(Some(corpus::grid_column_labels(2, 2))),
        _ => Err(Error::Parse(
            "--quotient-columns needs a builtin grid graph".into(),
        )),
    }
}

fn cmd_walk_simulate(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    steps: usize,
    seed: u64,
    labels: Option<Vec<usize>>,
) -> Result<(), Error> {
    let traj = dimerlab::walk::simulate_walk(g, weights, steps, seed)?;
    let out: Result<Vec<Vec<usize>>, Error> = traj
        .into_iter()
        .map(|p| match &labels {
            Some(l) => {
                let num = l.iter().max().unwrap() + 1;
                dimerlab::walk::quotient_permutation(&p, l, num)
            }
            None => Ok(p),
        })
        .collect();
    emit(&json!({ "seed": seed, "trajectory": out? }));
    Ok(())
}

fn cmd_walk_spectrum(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    labels: Option<Vec<usize>>,
) -> Result<(), Error> {
    let op = dimerlab::walk::graph_walk_operator(
        g,
        weights,
        labels.as_deref(),
        dimerlab::walk::DEFAULT_GROUP_CAP,
    )?;
    emit(&json!({
        "group_order": op.dim(),
        "eigenvalues": op.spectrum(),
        "periodic": op.is_periodic(),
    }));
    Ok(())
}

fn cmd_walk_mixing(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
    horizon: usize,
    labels: Option<Vec<usize>>,
    format: Format,
) -> Result<(), Error> {
    match dimerlab::walk::graph_walk_operator(
        g,
        weights,
        labels.as_deref(),
        dimerlab::walk::DEFAULT_GROUP_CAP,
    ) {
        Ok(op) => {
            let profile = op.mixing_profile(horizon);
            match format {
                Format::Csv => {
                    println!("t,tv,tv_decimal");
                    for (t, tv) in profile.iter().enumerate() {
                        println!("{},{},{}", t + 1, format_rational(tv), to_f64(tv));
                    }
                }
                _ => {
                    let rows: Vec<Value> = profile
                        .iter()
                        .enumerate()
                        .map(|(t, tv)| json!({"t": t + 1, "tv": rational_value(tv)}))
                        .collect();
                    emit(&json!({
                        "exact": true,
                        "group_order": op.dim(),
                        "periodic": op.is_periodic(),
                        "profile": rows,
                    }));
                }
            }
            Ok(())
        }
        Err(Error::GroupTooLarge(_)) => {
            // Monte Carlo fallback with standard errors
            let mc = dimerlab::walk::monte_carlo_mixing(g, weights, horizon, 2000, 0)?;
            let rows: Vec<Value> = mc
                .tv_estimate
                .iter()
                .zip(&mc.standard_error)
                .enumerate()
                .map(|(t, (tv, se))| json!({"t": t + 1, "tv_estimate": tv, "standard_error": se}))
                .collect();
            emit(&json!({ "exact": false, "profile": rows }));
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn cmd_walk_winding(
    n: usize,
    steps: usize,
    trials: usize,
    seed: u64,
    format: Format,
) -> Result<(), Error> {
    let stats = dimerlab::walk::torus_walk_experiment(n, steps, trials, seed)?;
    match format {
        Format::Csv => {
            println!("dx,dy,count");
            for ((dx, dy), c) in &stats.histogram {
                println!("{dx},{dy},{c}");
            }
        }
        _ => {
            let hist: Vec<Value> = stats
                .histogram
                .iter()
                .map(|((dx, dy), c)| json!({"dx": dx, "dy": dy, "count": c}))
                .collect();
            emit(&json!({
                "n": n,
                "steps": steps,
                "trials": trials,
                "seed": seed,
                "mean": [stats.mean.0, stats.mean.1],
                "ci95_half_width": [stats.half_width_95.0, stats.half_width_95.1],
                "histogram": hist,
            }));
        }
    }
    Ok(())
}

fn cmd_oracle(g: &PlanarBipartiteGraph, kind: &str, n: u32) -> Result<(), Error> {
    match kind {
        "covers" => {
            let covers = dimerlab::oracle::enumerate_dimer_covers(g)?;
            emit(&json!({ "count": covers.len(), "covers": covers }));
        }
        "multiwebs" => {
            let webs = dimerlab::oracle::enumerate_multiwebs(g, n)?;
            let list: Vec<Vec<u8>> = webs.into_iter().map(|w| w.mult).collect();
            emit(&json!({ "n": n, "count": list.len(), "multiwebs": list }));
        }
        "double" => {
            let measure = dimerlab::oracle::double_dimer_measure(g)?;
            let rows: Vec<Value> = measure
                .iter()
                .map(|(m, w)| {
                    let dec = dimerlab::oracle::decompose_double_dimer(g, m).expect("valid");
                    json!({
                        "multiplicities": m.mult,
                        "weight": w.to_string(),
                        "loops": dec.loops.iter().map(|l| json!({
                            "edges": l.edges,
                            "area": l.area(),
                        })).collect::<Vec<_>>(),
                        "doubled_edges": dec.doubled_edges,
                    })
                })
                .collect();
            let total: u128 = measure.iter().map(|(_, w)| w).sum();
            emit(&json!({ "total_weight": total.to_string(), "configurations": rows }));
        }
        other => return Err(Error::Parse(format!("unknown oracle dump {other:?}"))),
    }
    Ok(())
}
