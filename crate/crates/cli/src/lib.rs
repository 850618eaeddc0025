//! Command-line front end. [`run`] parses arguments, does the work and
//! returns the process exit code: 0 on success, 1 on usage or input errors,
//! 2 when the numerical machinery fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use spectral_uncertainty::closed_form::OracleCurve;
use spectral_uncertainty::diffusion::{diffusion_curve, TimeGrid};
use spectral_uncertainty::er_approx::{distance_distribution, expected_curve, reduced_model};
use spectral_uncertainty::graph::geodesic_distances;
use spectral_uncertainty::io::{
    render_svg, write_diffusion_csv, write_knots_csv, write_oracle_csv, write_points_csv, CurveDocument,
    DiffusionDocument, Metadata,
};
use spectral_uncertainty::spectral::{normalized_laplacian, SolverOptions};
use spectral_uncertainty::spreads::{global_graph_spread, spread_point};
use spectral_uncertainty::{
    Budget, CurveBounds, DistanceVector, Error, Geodesic, Graph, GraphSpec, HeatKernel, PencilProblem,
};

#[derive(Parser, Debug)]
#[command(name = "specunc", version, about = "Graph/spectral uncertainty curves of graph signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sandwich bounds on the uncertainty curve around a vertex.
    Curve(CurveArgs),
    /// Bracket the curve at a single spectral spread.
    Point(PointArgs),
    /// Spreads of a signal read one value per line.
    Spreads(SpreadsArgs),
    /// Spreads of heat diffusion from the center vertex.
    Diffusion(DiffusionArgs),
    /// Expected curve of Erdős–Rényi graphs from the radial model.
    ErExpected(ErArgs),
    /// Sample a closed-form curve.
    Oracle(OracleArgs),
    /// Write a generated graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Edge-list file.
    #[arg(long, group = "source")]
    input: Option<PathBuf>,
    /// Generator such as `star:10`, `complete:4`, `er:1000:0.03`, `grid:12:9`.
    #[arg(long, group = "source")]
    generate: Option<GraphSpec>,
    /// Seed for random generators.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Common {
    #[command(flatten)]
    source: Source,
    /// Center vertex.
    #[arg(long, default_value_t = 0)]
    center: usize,
    /// Relative residual tolerance of the eigensolver.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    common: Common,
    /// Target Hausdorff gap; defaults to 1e-6·W.
    #[arg(long, conflicts_with = "rounds")]
    epsilon: Option<f64>,
    /// Refine every segment this many times instead (2^r + 1 solves).
    #[arg(long)]
    rounds: Option<u32>,
    /// Cap on eigenvalue solves beyond the two endpoints.
    #[arg(long)]
    max_refinements: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[command(flatten)]
    common: Common,
    /// Spectral spread to query.
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct SpreadsArgs {
    #[command(flatten)]
    common: Common,
    /// Signal file, one value per vertex per line.
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct DiffusionArgs {
    #[command(flatten)]
    common: Common,
    /// Number of logarithmically spaced times.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Stop once the spectral spread falls below this.
    #[arg(long, default_value_t = 1e-4)]
    s_stop: f64,
    /// Gap of the curve bounds drawn under the trace (SVG only).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct ErArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// `star` or `complete:N`.
    #[arg(long)]
    family: String,
    /// Number of intervals in the sample.
    #[arg(long, default_value_t = 256)]
    points: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    generate: GraphSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Curve(a) => curve(a),
        Command::Point(a) => point(a),
        Command::Spreads(a) => spreads(a),
        Command::Diffusion(a) => diffusion(a),
        Command::ErExpected(a) => er_expected(a),
        Command::Oracle(a) => oracle(a),
        Command::Generate(a) => generate(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        // output cut short by the reader, as in `| head`
        Err(Failure::Lib(Error::Io(e))) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_numeric() {
                2
            } else {
                1
            }
        }
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

struct Loaded {
    graph: Graph,
    family: String,
}

fn load(src: &Source) -> Result<Loaded, Failure> {
    match (&src.input, &src.generate) {
        (Some(path), _) => {
            let parsed = Graph::from_edge_list(BufReader::new(File::open(path)?))?;
            Ok(Loaded { graph: parsed.graph, family: "edge-list".into() })
        }
        (None, Some(spec)) => Ok(Loaded { graph: spec.generate(src.seed)?, family: spec.to_string() }),
        (None, None) => Err(Failure::Usage("one of --input or --generate is required".into())),
    }
}

struct Prepared {
    loaded: Loaded,
    dist: DistanceVector,
    problem: PencilProblem,
}

fn prepare(c: &Common) -> Result<Prepared, Failure> {
    let loaded = load(&c.source)?;
    let mut problem = PencilProblem::for_graph(&loaded.graph, c.center)?;
    if let Some(tol) = c.tol {
        if !(tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
        }
        problem = problem.with_options(SolverOptions::default().with_tol(tol));
    }
    let dist = geodesic_distances(&loaded.graph, c.center)?;
    Ok(Prepared { loaded, dist, problem })
}

fn metadata(p: &Prepared, lambda_max: f64) -> Metadata {
    Metadata {
        family: p.loaded.family.clone(),
        n: p.loaded.graph.n_vertices(),
        m: p.loaded.graph.n_edges(),
        u0: p.problem.center(),
        lambda_max,
        eccentricity: p.dist.eccentricity(),
        w: p.problem.rate_scale(lambda_max),
    }
}

fn positive(name: &str, x: f64) -> Outcome {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be positive, got {x}")))
    }
}

fn emit_curve(doc: &CurveDocument, format: Format, out: Option<&Path>) -> Outcome {
    let mut w = sink(out)?;
    match format {
        Format::Csv => write_knots_csv(doc, &mut w)?,
        Format::Json => writeln!(w, "{}", doc.to_json()?)?,
        Format::Svg => w.write_all(render_svg(doc, None)?.as_bytes())?,
    }
    w.flush()?;
    Ok(())
}

fn curve_budget(epsilon: Option<f64>, rounds: Option<u32>, max_refinements: Option<usize>) -> Result<Budget, Failure> {
    if let Some(eps) = epsilon {
        positive("epsilon", eps)?;
    }
    let mut budget = match rounds {
        Some(r) => Budget::rounds(r),
        None => Budget { epsilon, max_solves: None, rounds: None },
    };
    budget.max_solves = max_refinements.map(|r| r + 2);
    Ok(budget)
}

fn curve(a: CurveArgs) -> Outcome {
    let prep = prepare(&a.common)?;
    let bounds = prep.problem.sandwich(&curve_budget(a.epsilon, a.rounds, a.max_refinements)?)?;
    let doc = CurveDocument::from_bounds(&bounds, metadata(&prep, bounds.lambda_max));
    emit_curve(&doc, a.format, a.common.output.as_deref())
}

fn point(a: PointArgs) -> Outcome {
    positive("epsilon", a.epsilon)?;
    let prep = prepare(&a.common)?;
    let q = prep.problem.point_query(a.s, a.epsilon)?;
    let mut w = sink(a.common.output.as_deref())?;
    match a.format {
        Format::Csv => {
            writeln!(w, "s,lower,upper,achieved_s,achieved_g")?;
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", q.s, q.lower, q.upper, q.achieved_s, q.achieved_g)?;
        }
        Format::Json => {
            let v = json!({
                "s": q.s,
                "lower": q.lower,
                "upper": q.upper,
                "achieved": {"s": q.achieved_s, "g": q.achieved_g},
                "vector": q.vector,
                "solves": q.solves,
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&v).map_err(Error::from)?)?;
        }
        Format::Svg => return Err(Failure::Usage("point has no SVG output".into())),
    }
    w.flush()?;
    Ok(())
}

fn read_signal(path: &Path) -> Result<Vec<f64>, Failure> {
    let mut x = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v = t
            .parse::<f64>()
            .map_err(|_| Error::Parse { line: i + 1, msg: format!("malformed value {t:?}") })?;
        x.push(v);
    }
    Ok(x)
}

fn spreads(a: SpreadsArgs) -> Outcome {
    let prep = prepare(&a.common)?;
    let x = read_signal(&a.signal)?;
    let p = spread_point(&x, prep.problem.laplacian(), &prep.dist)?;
    let (global, at) = global_graph_spread(&x, &prep.loaded.graph, &Geodesic)?;
    let mut w = sink(a.common.output.as_deref())?;
    match a.format {
        Format::Csv => write_points_csv(&[p], &mut w)?,
        Format::Json => {
            let v = json!({
                "center": prep.problem.center(),
                "s": p.s,
                "g": p.g,
                "global": {"g": global, "center": at},
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&v).map_err(Error::from)?)?;
        }
        Format::Svg => return Err(Failure::Usage("spreads has no SVG output".into())),
    }
    w.flush()?;
    Ok(())
}

fn diffusion(a: DiffusionArgs) -> Outcome {
    positive("s-stop", a.s_stop)?;
    let prep = prepare(&a.common)?;
    let l = normalized_laplacian(&prep.loaded.graph)?;
    let kernel = HeatKernel::new(&l)?;
    let p2 = prep.dist.squared();
    let trace = diffusion_curve(&kernel, &p2, prep.problem.center(), &TimeGrid::Log { points: a.points, s_stop: a.s_stop })?;
    let meta = metadata(&prep, kernel.lambda_max());
    let mut w = sink(a.common.output.as_deref())?;
    match a.format {
        Format::Csv => write_diffusion_csv(&DiffusionDocument::from_trace(&trace, meta), &mut w)?,
        Format::Json => writeln!(w, "{}", DiffusionDocument::from_trace(&trace, meta).to_json()?)?,
        Format::Svg => {
            let bounds: CurveBounds = prep.problem.sandwich(&curve_budget(a.epsilon, None, None)?)?;
            let doc = CurveDocument::from_bounds(&bounds, metadata(&prep, bounds.lambda_max));
            w.write_all(render_svg(&doc, Some(&trace.points))?.as_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn er_expected(a: ErArgs) -> Outcome {
    positive("epsilon", a.epsilon)?;
    let dd = distance_distribution(a.n, a.p)?;
    let rm = reduced_model(&dd)?;
    let bounds = expected_curve(&rm, &Budget::epsilon(a.epsilon))?;
    let n = a.n as f64;
    let meta = Metadata {
        family: format!("er-expected:{}:{}", a.n, a.p),
        n: a.n,
        m: (n * (n - 1.0) * a.p / 2.0).round() as usize,
        u0: 0,
        lambda_max: bounds.lambda_max,
        eccentricity: dd.d_max() as f64,
        w: rm.problem()?.rate_scale(bounds.lambda_max),
    };
    emit_curve(&CurveDocument::from_bounds(&bounds, meta), a.format, a.output.as_deref())
}

fn oracle(a: OracleArgs) -> Outcome {
    let curve = match a.family.split(':').collect::<Vec<_>>().as_slice() {
        ["star"] => OracleCurve::Star,
        ["complete", n] => {
            let n = n.parse().map_err(|_| Failure::Usage(format!("bad vertex count in {:?}", a.family)))?;
            OracleCurve::new_complete(n)?
        }
        _ => return Err(Failure::Usage(format!("unknown oracle family {:?}; use star or complete:N", a.family))),
    };
    let mut w = sink(a.output.as_deref())?;
    write_oracle_csv(&curve.sample::<f64>(a.points), &mut w)?;
    w.flush()?;
    Ok(())
}

fn generate(a: GenerateArgs) -> Outcome {
    let g = a.generate.generate(a.seed)?;
    let mut w = sink(a.output.as_deref())?;
    g.write_edge_list(&mut w)?;
    w.flush()?;
    Ok(())
}
