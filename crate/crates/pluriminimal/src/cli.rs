//! Command-line entry point wiring the pipeline: verification reports,
//! family generation, kernel computation, self-intersection search, and
//! mesh export.
//!
//! Exit codes: 0 all checks pass, 1 geometric failure, 2 input error,
//! 3 resource guard. All randomness flows from the single `--seed`, so a
//! fixed configuration reproduces output bytes exactly.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::checks::{
    check_closed, check_rank, conformality, sample_polydisk, CLOSED_TOL, CONFORMALITY_TOL,
    RANK_REL_TOL,
};
use crate::data::WeierstrassData;
use crate::family::{family_data, FamilyInput};
use crate::geometry::{line_restriction_mean_curvature, metric_blocks, second_fundamental_form};
use crate::intersect::{self_intersect, SearchConfig};
use crate::mesh::{mesh_surface, MeshSlice};
use crate::relation::{
    build_mu, diagonalize, dimension_report, emit_map, kernel, report_csv, QuadraticRelation,
    RelationError, SYM2_CAP,
};
use crate::C64;

const EXIT_PASS: i32 = 0;
const EXIT_GEOMETRIC: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_GUARD: i32 = 3;

#[derive(Parser)]
#[command(
    name = "pluriminimal",
    about = "Weierstrass data for pluriminimal immersions: generate, verify, explore"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SampleOpts {
    /// Number of sample points in the polydisk of radius 2.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Seed for all randomness in the subcommand.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check a data file: closed holomorphic forms, conformality, rank,
    /// and finite-difference minimality probes.
    Verify {
        data: PathBuf,
        /// Conformality residual tolerance.
        #[arg(long, default_value_t = CONFORMALITY_TOL)]
        tol_conf: f64,
        /// Relative singular-value cutoff for the rank check.
        #[arg(long, default_value_t = RANK_REL_TOL)]
        tol_rank: f64,
        #[command(flatten)]
        sample: SampleOpts,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate the C² → R⁶ family from entire functions f and g.
    Family {
        /// Entire function of one variable (written in z1).
        #[arg(long)]
        f: String,
        /// Entire function of one variable (written in z1).
        #[arg(long)]
        g: String,
        /// Output data file.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        sample: SampleOpts,
    },
    /// Compute the exact kernel of the cup-product matrix and the
    /// dimension report; optionally emit one kernel element as data.
    Relations {
        /// Number of domain variables.
        #[arg(long)]
        m: usize,
        /// Polynomial degree bound.
        #[arg(long)]
        n: usize,
        /// Kernel basis output (JSON).
        #[arg(long)]
        out: PathBuf,
        /// Dimension report output (CSV); defaults to stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Index of a kernel element to diagonalize and emit as data.
        #[arg(long)]
        emit: Option<usize>,
        /// Output path for the emitted data file.
        #[arg(long, default_value = "emitted.json")]
        emit_out: PathBuf,
        /// Append chart pairs when the emitted forms are rank-deficient.
        #[arg(long)]
        ensure_immersion: bool,
        /// Size guard on dim Sym²V.
        #[arg(long, default_value_t = SYM2_CAP)]
        cap: usize,
        #[command(flatten)]
        sample: SampleOpts,
    },
    /// Export a minimal-surface slice of a data file as a text mesh.
    Mesh {
        data: PathBuf,
        /// Curve component z_k = expr(z1); repeat once per domain variable.
        #[arg(long = "curve", required = true)]
        curve: Vec<String>,
        /// Grid points per side.
        #[arg(long, default_value_t = 33)]
        resolution: usize,
        /// Three distinct zero-based target coordinates, e.g. 0,1,2.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        project: Vec<usize>,
        /// Output mesh file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for a self-intersection of the immersion.
    Selfintersect {
        data: PathBuf,
        /// Number of multistart attempts.
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(err: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INPUT, message: err.to_string() }
    }
}

macro_rules! impl_input_failure {
    ($($ty:ty),*) => {$(
        impl From<$ty> for Failure {
            fn from(err: $ty) -> Self {
                Failure::input(err)
            }
        }
    )*};
}

impl_input_failure!(
    crate::expr::ExprError,
    crate::data::DataError,
    crate::family::FamilyError,
    crate::immerse::ImmerseError,
    crate::geometry::GeometryError,
    crate::intersect::IntersectError,
    crate::mesh::MeshError,
    std::io::Error,
    std::fmt::Error
);

impl From<RelationError> for Failure {
    fn from(err: RelationError) -> Self {
        let code = match err {
            RelationError::SizeGuard { .. } => EXIT_GUARD,
            RelationError::ResidualTooLarge { .. } | RelationError::NotInKernel => EXIT_GEOMETRIC,
            _ => EXIT_INPUT,
        };
        Failure { code, message: err.to_string() }
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are requested output, not input errors.
            let benign = err.use_stderr();
            let _ = err.print();
            return if benign { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Verify { data, tol_conf, tol_rank, sample, report } => {
            cmd_verify(&data, tol_conf, tol_rank, &sample, report.as_deref())
        }
        Command::Family { f, g, out, sample } => cmd_family(&f, &g, &out, &sample),
        Command::Relations { m, n, out, csv, emit, emit_out, ensure_immersion, cap, sample } => {
            cmd_relations(m, n, &out, csv.as_deref(), emit, &emit_out, ensure_immersion, cap, &sample)
        }
        Command::Mesh { data, curve, resolution, project, out } => {
            cmd_mesh(&data, &curve, resolution, &project, &out)
        }
        Command::Selfintersect { data, budget, seed, report } => {
            cmd_selfintersect(&data, budget, seed, report.as_deref())
        }
    }
}

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    pass: bool,
    worst_residual: f64,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    arity: usize,
    target_dimension: usize,
    samples: usize,
    seed: u64,
    checks: Vec<CheckResult>,
    pass: bool,
}

fn format_point(z: &[C64]) -> String {
    let coords: Vec<String> = z.iter().map(|c| format!("{}+{}i", c.re, c.im)).collect();
    format!("({})", coords.join(", "))
}

fn build_verify_report(
    data: &WeierstrassData,
    tol_conf: f64,
    tol_rank: f64,
    sample: &SampleOpts,
) -> Result<VerifyReport, Failure> {
    let m = data.arity;
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let points = sample_polydisk(m, sample.samples.max(1), 2.0, &mut rng);
    let mut checks = Vec::new();

    let closed = check_closed(data, &points, CLOSED_TOL)?;
    checks.push(CheckResult {
        name: "closed",
        pass: closed.pass,
        worst_residual: closed.worst_residual,
        tolerance: closed.tolerance,
        detail: closed.worst_site.as_ref().map(|(form, j, k, z)| {
            format!(
                "worst at form {}, d(ω_{{{}}})/dz{} − d(ω_{{{}}})/dz{} at {}",
                form + 1, j + 1, k + 1, k + 1, j + 1, format_point(z)
            )
        }),
    });

    let mut worst_conf = 0.0f64;
    let mut worst_conf_point = points[0].clone();
    for z in &points {
        let r = conformality(data, z)?.residual();
        if r > worst_conf {
            worst_conf = r;
            worst_conf_point = z.clone();
        }
    }
    checks.push(CheckResult {
        name: "conformality",
        pass: worst_conf < tol_conf,
        worst_residual: worst_conf,
        tolerance: tol_conf,
        detail: Some(format!("worst at {}", format_point(&worst_conf_point))),
    });

    let rank = check_rank(data, &points, tol_rank)?;
    checks.push(CheckResult {
        name: "rank",
        pass: rank.pass,
        worst_residual: rank.worst_singular_values.0,
        tolerance: tol_rank,
        detail: Some(format!(
            "worst rank {} of required {} at {}",
            rank.worst_rank,
            rank.required_rank,
            format_point(&rank.worst_point)
        )),
    });

    // The remaining probes need an immersion whose tangent spaces are
    // totally real (n >= 2m); otherwise no normal frame exists and they
    // are skipped.
    if rank.pass && data.n() >= 2 * m {
        let mut worst_kahler = 0.0f64;
        let mut worst_circ = 0.0f64;
        for z in points.iter().take(20) {
            let blocks = metric_blocks(data, z)?;
            worst_kahler = worst_kahler
                .max(blocks.cross_block_residual())
                .max(blocks.diag_block_residual())
                .max(blocks.j_invariance_residual())
                .max((-blocks.min_eigenvalue()).max(0.0));
            let sff = second_fundamental_form(data, z)?;
            worst_circ = worst_circ.max(sff.circularity_residual());
            for _ in 0..10 {
                let v: Vec<C64> = (0..m)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                worst_circ = worst_circ.max(sff.mean_curvature_of_direction(&v));
            }
        }
        checks.push(CheckResult {
            name: "kahler",
            pass: worst_kahler < 1e-10,
            worst_residual: worst_kahler,
            tolerance: 1e-10,
            detail: None,
        });
        checks.push(CheckResult {
            name: "circularity",
            pass: worst_circ < 1e-9,
            worst_residual: worst_circ,
            tolerance: 1e-9,
            detail: None,
        });
        let mut worst_line = 0.0f64;
        for z in points.iter().take(10) {
            let v: Vec<C64> = (0..m)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            worst_line = worst_line.max(line_restriction_mean_curvature(data, z, &v, 1e-4)?);
        }
        checks.push(CheckResult {
            name: "line_minimality",
            pass: worst_line < 1e-6,
            worst_residual: worst_line,
            tolerance: 1e-6,
            detail: Some("finite-difference mean curvature of complex-line restrictions".into()),
        });
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        arity: m,
        target_dimension: data.n(),
        samples: sample.samples,
        seed: sample.seed,
        checks,
        pass,
    })
}

fn cmd_verify(
    path: &std::path::Path,
    tol_conf: f64,
    tol_rank: f64,
    sample: &SampleOpts,
    report_path: Option<&std::path::Path>,
) -> Result<i32, Failure> {
    let data = WeierstrassData::load(path)?;
    let report = build_verify_report(&data, tol_conf, tol_rank, sample)?;
    let text = serde_json::to_string_pretty(&report).map_err(Failure::input)?;
    println!("{text}");
    if let Some(p) = report_path {
        std::fs::write(p, &text)?;
    }
    Ok(if report.pass { EXIT_PASS } else { EXIT_GEOMETRIC })
}

fn cmd_family(
    f: &str,
    g: &str,
    out: &std::path::Path,
    sample: &SampleOpts,
) -> Result<i32, Failure> {
    let input = FamilyInput::parse(f, g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let points = sample_polydisk(2, sample.samples.max(1), 2.0, &mut rng);
    let data = family_data(&input, &points)?;
    data.save(out)?;
    println!("wrote data with {} forms on C^{} to {}", data.n(), data.arity, out.display());
    Ok(EXIT_PASS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_relations(
    m: usize,
    n: usize,
    out: &std::path::Path,
    csv: Option<&std::path::Path>,
    emit: Option<usize>,
    emit_out: &std::path::Path,
    ensure_immersion: bool,
    cap: usize,
    sample: &SampleOpts,
) -> Result<i32, Failure> {
    if m == 0 || n == 0 {
        return Err(Failure::input("m and n must be at least 1"));
    }
    let mu = build_mu(m, n, cap)?;
    let kern = kernel(&mu);
    std::fs::write(out, QuadraticRelation::list_to_json(&kern))?;
    let rows = dimension_report(m, 1..=n, cap)?;
    let csv_text = report_csv(&rows);
    match csv {
        Some(p) => std::fs::write(p, &csv_text)?,
        None => print!("{csv_text}"),
    }
    println!("kernel dimension {} written to {}", kern.len(), out.display());
    if let Some(index) = emit {
        let rel = kern
            .get(index)
            .ok_or_else(|| Failure::input(format!("--emit {index} out of range (kernel dimension {})", kern.len())))?;
        let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
        let points = sample_polydisk(m, sample.samples.max(1), 2.0, &mut rng);
        let diag = diagonalize(rel, &mu, &points)?;
        let data = emit_map(&diag.primitives, m, ensure_immersion, &points)?;
        data.save(emit_out)?;
        println!(
            "emitted rank-{} element as {} forms to {} (residual {:e})",
            diag.rank,
            data.n(),
            emit_out.display(),
            diag.achieved_residual
        );
    }
    Ok(EXIT_PASS)
}

fn cmd_mesh(
    path: &std::path::Path,
    curve: &[String],
    resolution: usize,
    project: &[usize],
    out: &std::path::Path,
) -> Result<i32, Failure> {
    if project.len() != 3 {
        return Err(Failure::input("--project needs exactly three indices, e.g. 0,1,2"));
    }
    let data = WeierstrassData::load(path)?;
    let curve = curve
        .iter()
        .map(|text| crate::expr::HoloExpr::parse(text, 1))
        .collect::<Result<Vec<_>, _>>()?;
    let slice = MeshSlice {
        curve,
        resolution,
        projection: [project[0], project[1], project[2]],
    };
    let mesh = mesh_surface(&data, &slice)?;
    std::fs::write(out, &mesh)?;
    println!(
        "wrote {} vertices, {} faces to {}",
        resolution * resolution,
        (resolution - 1) * (resolution - 1),
        out.display()
    );
    Ok(EXIT_PASS)
}

fn cmd_selfintersect(
    path: &std::path::Path,
    budget: usize,
    seed: u64,
    report_path: Option<&std::path::Path>,
) -> Result<i32, Failure> {
    let data = WeierstrassData::load(path)?;
    let config = SearchConfig { starts: budget, seed, ..Default::default() };
    let found = self_intersect(&data, &config)?;
    let mut text = String::new();
    match found {
        Some(hit) => {
            writeln!(text, "self-intersection found")?;
            writeln!(text, "p = {}", format_point(&hit.p))?;
            writeln!(text, "q = {}", format_point(&hit.q))?;
            writeln!(text, "separation = {:.6e}", hit.separation)?;
            writeln!(text, "certified image distance = {:.6e}", hit.distance)?;
        }
        None => {
            writeln!(text, "none found within {budget} starts")?;
        }
    }
    print!("{text}");
    if let Some(p) = report_path {
        std::fs::write(p, &text)?;
    }
    Ok(EXIT_PASS)
}
