use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hypercover::ball_cover::{
    approx_adjusted, approx_normal, approx_petrov, cf_oracle, mc_oracle, mc_oracle_at, LocalCoverQuery, PointKind,
};
use hypercover::cube_cover::{cube_cover_mc_curve, expected_coverage_closed_form, CubeCoverQuery};
use hypercover::designs::{generate, SchemeId, SchemeSpec};
use hypercover::geometry::{ball_volume, cap_volume, two_ball_intersection_volume, unit_volume_radius};
use hypercover::mc::configure_threads_from_env;
use hypercover::quantize::{
    minimize_over_delta, normalized_error, quantization_approx, quantization_mc_averaged,
    DEFAULT_REPLICATIONS as QUANT_REPLICATIONS, DEFAULT_TEST_POINTS as QUANT_TEST_POINTS,
};
use hypercover::sweep::{format_g17, parse_range, to_csv, to_json, Provenance, SweepOutput, SweepRow};
use hypercover::tables::{reference_cells, reproduce_table, results_to_csv, CellFilter, Verdict, UNIT_RADIUS};
use hypercover::union_cover::{
    coverage_at, min_radius_over_delta, optimize_delta, radius_for_target, CoverageMethod, McBudget,
    DEFAULT_REPLICATIONS, DEFAULT_TEST_POINTS,
};
use hypercover::{Error, Result};

/// Table reproduction uses a lighter default budget than single runs: every
/// cell is an optimization over delta.
const TABLE_TEST_POINTS: u64 = 20_000;
const TABLE_REPLICATIONS: u32 = 20;

#[derive(Parser)]
#[command(name = "hypercover", version, about = "Coverage of the cube [-1,1]^d by balls and cubes, and quantization error")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo test points (per design).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    /// Independent designs averaged for random schemes.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    replications: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SchemeArgs {
    /// Dimension.
    #[arg(long)]
    d: usize,
    /// Number of design points.
    #[arg(long)]
    n: usize,
    /// Scheme s1..s7.
    #[arg(long, default_value = "s1")]
    scheme: SchemeId,
    /// Half-side of the sampling cube (or radius for s5/s6).
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Beta shape parameter (scheme s4 only).
    #[arg(long)]
    alpha: Option<f64>,
    /// Evaluate on a grid of delta values `start:stop:step` instead of `--delta`.
    #[arg(long)]
    sweep_delta: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Ball volumes, unit-volume radii, caps and two-ball intersections.
    Geometry {
        /// Radius of the unit-volume ball for the published dimensions.
        #[arg(long)]
        table7: bool,
        /// Volume of the ball of radius `--r` in dimension `--dim`.
        #[arg(long)]
        ball_volume: bool,
        /// Volume of the cap at distance `--h` from the centre.
        #[arg(long)]
        cap: bool,
        /// Volume of the intersection of two balls with centres `--dist` apart.
        #[arg(long)]
        intersection: bool,
        #[arg(long)]
        dim: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        dist: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Fraction of the cube covered by a single ball.
    LocalCover {
        #[arg(long)]
        dim: u32,
        /// Norm of the centre, placed on the diagonal.
        #[arg(long, conflicts_with = "z")]
        z_norm: Option<f64>,
        /// Centre coordinates, comma separated.
        #[arg(long, value_delimiter = ',')]
        z: Option<Vec<f64>>,
        #[arg(long)]
        r: f64,
        /// normal, petrov, adjusted, mc or cf.
        #[arg(long, default_value = "adjusted")]
        method: LocalMethod,
        /// Correction used by `adjusted`: diagonal or typical.
        #[arg(long, default_value = "diagonal")]
        point_kind: Kind,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Coverage of the cube by the union of balls around a design.
    Cover {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Ball radius.
        #[arg(long)]
        r: Option<f64>,
        /// Report the smallest radius reaching this coverage.
        #[arg(long, conflicts_with = "r")]
        target: Option<f64>,
        /// With `--r`: choose delta maximizing coverage. With `--target`:
        /// choose delta minimizing the radius.
        #[arg(long)]
        optimize_delta: bool,
        /// mc, approx1 or approx2.
        #[arg(long, default_value = "mc")]
        method: CoverageMethod,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Coverage of the cube by cubes of half-side `--r` around uniform centres.
    CubeCover {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        sweep_delta: Option<String>,
        #[arg(long, value_enum, default_value_t = CubeMethod::ClosedForm)]
        method: CubeMethod,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Normalized quantization error n^(2/d) E theta_n.
    Quantize {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Minimize over delta.
        #[arg(long)]
        minimize_delta: bool,
        /// mc, approx (8/5 coefficient) or approx-rough (coefficient 2).
        #[arg(long, value_enum, default_value_t = QuantMethod::Mc)]
        method: QuantMethod,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Generate a design.
    Design {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "s1")]
        scheme: SchemeId,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Reproduce a published table with per-cell PASS/NEAR/FAIL marks.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
        id: u8,
        /// Restrict to these schemes, e.g. `s1,s7`.
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<SchemeId>,
        /// Restrict to these design sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Print the published cells without recomputing them.
        #[arg(long)]
        reference_only: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LocalMethod {
    Normal,
    Petrov,
    Adjusted,
    Mc,
    Cf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Diagonal,
    Typical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CubeMethod {
    ClosedForm,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuantMethod {
    Mc,
    Approx,
    ApproxRough,
}

impl RunArgs {
    fn budget(&self, test_points: u64, replications: u32) -> Result<McBudget> {
        McBudget::new(self.samples.unwrap_or(test_points), self.replications.unwrap_or(replications), self.seed)
    }

    fn emit(&self, text: &str) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write output: {e}"));
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(io),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(io)?;
                out.flush().map_err(io)
            }
        }
    }
}

impl SchemeArgs {
    fn spec(&self) -> Result<SchemeSpec> {
        let spec = SchemeSpec::new(self.scheme, self.delta, self.alpha)?;
        spec.validate_for(self.d)?;
        Ok(spec)
    }

    fn deltas(&self) -> Result<Vec<f64>> {
        match &self.sweep_delta {
            Some(s) => parse_range(s),
            None => Ok(vec![self.delta]),
        }
    }
}

fn warn_deterministic(spec: &SchemeSpec, run: &RunArgs) {
    if !spec.id.is_random() && run.replications.is_some_and(|m| m > 1) {
        eprintln!("warning: scheme {} is deterministic; using a single design instead of {} replications", spec.id, run.replications.unwrap());
    }
}

fn emit_rows(run: &RunArgs, command: &str, budget: &McBudget, rows: Vec<SweepRow>) -> Result<()> {
    let text = match run.format {
        Format::Csv => to_csv(&rows)?,
        Format::Json => {
            let provenance = Provenance::new(command, budget.seed, budget.test_points, budget.replications);
            to_json(&SweepOutput { provenance, rows })? + "\n"
        }
    };
    run.emit(&text)
}

fn simple_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn simple_json(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
        .iter()
        .map(|r| {
            header
                .iter()
                .zip(r)
                .map(|(k, v)| {
                    let val = v.parse::<f64>().ok().and_then(serde_json::Number::from_f64).map(serde_json::Value::Number);
                    (k.to_string(), val.unwrap_or_else(|| serde_json::Value::String(v.clone())))
                })
                .collect()
        })
        .collect();
    serde_json::to_string_pretty(&objs).map(|s| s + "\n").map_err(|e| Error::InvalidArgument(format!("json: {e}")))
}

fn emit_table(run: &RunArgs, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let text = match run.format {
        Format::Csv => simple_csv(header, rows),
        Format::Json => simple_json(header, rows)?,
    };
    run.emit(&text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_geometry(
    table7: bool,
    ball: bool,
    cap: bool,
    intersection: bool,
    dim: Option<u32>,
    r: f64,
    h: Option<f64>,
    dist: Option<f64>,
    run: &RunArgs,
) -> Result<()> {
    if table7 {
        let rows: Vec<Vec<String>> = UNIT_RADIUS
            .iter()
            .map(|&(d, _)| {
                let v = unit_volume_radius(d as u32);
                vec![d.to_string(), format!("{v:.3}"), format_g17(v)]
            })
            .collect();
        return emit_table(run, &["d", "r_d", "r_d_full"], &rows);
    }
    let dim = dim.ok_or_else(|| Error::InvalidArgument("--dim is required".into()))?;
    if dim == 0 {
        return Err(Error::InvalidArgument("--dim must be at least 1".into()));
    }
    let (quantity, value) = if ball {
        ("ball_volume", ball_volume(dim, r))
    } else if cap {
        let h = h.ok_or_else(|| Error::InvalidArgument("--cap needs --h".into()))?;
        ("cap_volume", cap_volume(dim, r, h)?)
    } else if intersection {
        let dist = dist.ok_or_else(|| Error::InvalidArgument("--intersection needs --dist".into()))?;
        ("intersection_volume", two_ball_intersection_volume(dim, r, dist)?)
    } else {
        return Err(Error::InvalidArgument(
            "choose one of --table7, --ball-volume, --cap or --intersection".into(),
        ));
    };
    emit_table(run, &["quantity", "dim", "r", "value"], &[vec![
        quantity.into(),
        dim.to_string(),
        format_g17(r),
        format_g17(value),
    ]])
}

fn cmd_local_cover(
    dim: u32,
    z_norm: Option<f64>,
    z: Option<Vec<f64>>,
    r: f64,
    method: LocalMethod,
    kind: Kind,
    run: &RunArgs,
) -> Result<()> {
    let kind = match kind {
        Kind::Diagonal => PointKind::Diagonal,
        Kind::Typical => PointKind::Typical,
    };
    let coords = match &z {
        Some(v) => {
            if v.len() != dim as usize {
                return Err(Error::InvalidArgument(format!("--z has {} coordinates, expected {dim}", v.len())));
            }
            Some(v.clone())
        }
        None => None,
    };
    let z_norm_sq = match (&coords, z_norm) {
        (Some(v), _) => v.iter().map(|x| x * x).sum(),
        (None, Some(nz)) if nz >= 0.0 => nz * nz,
        (None, Some(nz)) => return Err(Error::InvalidArgument(format!("--z-norm must be >= 0, got {nz}"))),
        (None, None) => 0.0,
    };
    let q = LocalCoverQuery::new(dim, z_norm_sq, r, kind)?;
    let samples = run.samples.unwrap_or(1_000_000);
    let (name, value, se) = match method {
        LocalMethod::Normal => ("normal", approx_normal(&q), 0.0),
        LocalMethod::Petrov => ("petrov", approx_petrov(&q), 0.0),
        LocalMethod::Adjusted => ("adjusted", approx_adjusted(&q), 0.0),
        LocalMethod::Mc => {
            let e = match &coords {
                Some(v) => mc_oracle_at(v, &[r], samples, run.seed)?.remove(0),
                None => mc_oracle(&q, samples, run.seed)?,
            };
            ("mc", e.value, e.std_err)
        }
        LocalMethod::Cf => {
            let v = match &coords {
                Some(v) => v.clone(),
                None => hypercover::ball_cover::diagonal_center(dim, z_norm_sq),
            };
            ("cf", cf_oracle(&v, r)?, 0.0)
        }
    };
    emit_table(run, &["d", "z_norm_sq", "r", "method", "value", "stderr"], &[vec![
        dim.to_string(),
        format_g17(z_norm_sq),
        format_g17(r),
        name.into(),
        format_g17(value),
        format_g17(se),
    ]])
}

fn cmd_cover(
    s: &SchemeArgs,
    r: Option<f64>,
    target: Option<f64>,
    optimize: bool,
    method: CoverageMethod,
    run: &RunArgs,
) -> Result<()> {
    let spec = s.spec()?;
    warn_deterministic(&spec, run);
    let budget = run.budget(DEFAULT_TEST_POINTS, DEFAULT_REPLICATIONS)?;
    let row = |delta: f64, value: f64, se: f64, r: f64| SweepRow {
        delta,
        value,
        stderr: se,
        method: method.to_string(),
        d: s.d,
        n: s.n,
        r: Some(r),
        scheme: spec.id.to_string(),
        seed: run.seed,
    };
    let mut rows = Vec::new();
    match (r, target) {
        (Some(r), None) => {
            if optimize {
                let (delta, _) = optimize_delta(&spec, s.d, s.n, r, method, &budget)?;
                let e = coverage_at(&spec.with_delta(delta)?, s.d, s.n, r, method, &budget)?;
                rows.push(row(delta, e.value, e.std_err, r));
            } else {
                for delta in s.deltas()? {
                    let e = coverage_at(&spec.with_delta(delta)?, s.d, s.n, r, method, &budget)?;
                    rows.push(row(delta, e.value, e.std_err, r));
                }
            }
        }
        (None, Some(t)) => {
            let found: Vec<(f64, f64)> = if optimize {
                vec![min_radius_over_delta(&spec, s.d, s.n, t, method, &budget)?]
            } else {
                s.deltas()?
                    .into_iter()
                    .map(|delta| Ok((delta, radius_for_target(&spec.with_delta(delta)?, s.d, s.n, t, method, &budget)?)))
                    .collect::<Result<_>>()?
            };
            for (delta, rr) in found {
                let e = coverage_at(&spec.with_delta(delta)?, s.d, s.n, rr, method, &budget)?;
                rows.push(row(delta, e.value, e.std_err, rr));
            }
        }
        _ => return Err(Error::InvalidArgument("give exactly one of --r and --target".into())),
    }
    emit_rows(run, "cover", &budget, rows)
}

fn cmd_cube_cover(
    d: usize,
    n: usize,
    r: f64,
    delta: f64,
    sweep: Option<&str>,
    method: CubeMethod,
    run: &RunArgs,
) -> Result<()> {
    let budget = run.budget(DEFAULT_TEST_POINTS, DEFAULT_REPLICATIONS)?;
    let deltas = match sweep {
        Some(s) => parse_range(s)?,
        None => vec![delta],
    };
    let mut rows = Vec::new();
    for delta in deltas {
        let (name, value, se) = match method {
            CubeMethod::ClosedForm => {
                ("closed-form", expected_coverage_closed_form(&CubeCoverQuery::new(d, n, r, delta)?)?, 0.0)
            }
            CubeMethod::Mc => {
                CubeCoverQuery::new(d, n, r, delta)?;
                let e = cube_cover_mc_curve(d, n, &[r], delta, &budget)?.remove(0);
                ("mc", e.value, e.std_err)
            }
        };
        rows.push(SweepRow {
            delta,
            value,
            stderr: se,
            method: name.into(),
            d,
            n,
            r: Some(r),
            scheme: "cube-uniform".into(),
            seed: run.seed,
        });
    }
    emit_rows(run, "cube-cover", &budget, rows)
}

fn cmd_quantize(s: &SchemeArgs, minimize: bool, method: QuantMethod, run: &RunArgs) -> Result<()> {
    let spec = s.spec()?;
    warn_deterministic(&spec, run);
    let budget = run.budget(QUANT_TEST_POINTS, QUANT_REPLICATIONS)?;
    let name = match method {
        QuantMethod::Mc => "mc",
        QuantMethod::Approx => "approx",
        QuantMethod::ApproxRough => "approx-rough",
    };
    let eval = |delta: f64| -> Result<(f64, f64)> {
        match method {
            QuantMethod::Mc => {
                let e = quantization_mc_averaged(&spec.with_delta(delta)?, s.d, s.n, &budget)?;
                let factor = normalized_error(s.d, s.n, 1.0)?;
                Ok((factor * e.value, factor * e.std_err))
            }
            QuantMethod::Approx | QuantMethod::ApproxRough => {
                if spec.id != SchemeId::S1 {
                    return Err(Error::InvalidArgument("the quantization approximation applies to scheme s1 only".into()));
                }
                let v = quantization_approx(s.d, s.n, delta, method == QuantMethod::Approx)?;
                Ok((normalized_error(s.d, s.n, v.max(0.0))?, 0.0))
            }
        }
    };
    let deltas = if minimize {
        match method {
            QuantMethod::Mc => vec![minimize_over_delta(&spec, s.d, s.n, &budget)?.0],
            _ => {
                let (x, _) = hypercover::union_cover::maximize_over_delta(1.0, |x| Ok(-eval(x)?.0))?;
                vec![x]
            }
        }
    } else {
        s.deltas()?
    };
    let mut rows = Vec::new();
    for delta in deltas {
        let (value, se) = eval(delta)?;
        rows.push(SweepRow {
            delta,
            value,
            stderr: se,
            method: name.into(),
            d: s.d,
            n: s.n,
            r: None,
            scheme: spec.id.to_string(),
            seed: run.seed,
        });
    }
    emit_rows(run, "quantize", &budget, rows)
}

fn cmd_design(d: usize, n: usize, scheme: SchemeId, delta: f64, alpha: Option<f64>, run: &RunArgs) -> Result<()> {
    let spec = SchemeSpec::new(scheme, delta, alpha)?;
    spec.validate_for(d)?;
    let design = generate(&spec, d, n, run.seed)?;
    let text = match run.format {
        Format::Csv => design.to_csv(),
        Format::Json => design.to_json()? + "\n",
    };
    run.emit(&text)
}

fn cmd_table(id: u8, schemes: &[SchemeId], sizes: &[usize], reference_only: bool, run: &RunArgs) -> Result<()> {
    let filter = CellFilter { schemes: schemes.to_vec(), sizes: sizes.to_vec() };
    if reference_only {
        let rows: Vec<Vec<String>> = reference_cells(id)?
            .iter()
            .filter(|c| filter.keeps(c))
            .map(|c| {
                vec![
                    c.table.to_string(),
                    c.row.clone(),
                    c.d.to_string(),
                    c.n.to_string(),
                    format!("{}", c.value),
                    c.delta.map(|x| format!("{x:.2}")).unwrap_or_default(),
                ]
            })
            .collect();
        return emit_table(run, &["table", "row", "d", "n", "published_value", "published_delta"], &rows);
    }
    let budget = run.budget(TABLE_TEST_POINTS, TABLE_REPLICATIONS)?;
    let results = reproduce_table(id, &filter, &budget)?;
    let text = match run.format {
        Format::Csv => results_to_csv(&results)?,
        Format::Json => {
            serde_json::to_string_pretty(&results).map_err(|e| Error::InvalidArgument(format!("json: {e}")))? + "\n"
        }
    };
    run.emit(&text)?;
    let count = |v: Verdict| results.iter().filter(|r| r.verdict == v).count();
    eprintln!(
        "table {id}: {} cells, {} PASS, {} NEAR, {} FAIL",
        results.len(),
        count(Verdict::Pass),
        count(Verdict::Near),
        count(Verdict::Fail)
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Geometry { table7, ball_volume, cap, intersection, dim, r, h, dist, run } => {
            cmd_geometry(table7, ball_volume, cap, intersection, dim, r, h, dist, &run)
        }
        Command::LocalCover { dim, z_norm, z, r, method, point_kind, run } => {
            cmd_local_cover(dim, z_norm, z, r, method, point_kind, &run)
        }
        Command::Cover { scheme, r, target, optimize_delta, method, run } => {
            cmd_cover(&scheme, r, target, optimize_delta, method, &run)
        }
        Command::CubeCover { d, n, r, delta, sweep_delta, method, run } => {
            cmd_cube_cover(d, n, r, delta, sweep_delta.as_deref(), method, &run)
        }
        Command::Quantize { scheme, minimize_delta, method, run } => cmd_quantize(&scheme, minimize_delta, method, &run),
        Command::Design { d, n, scheme, delta, alpha, run } => cmd_design(d, n, scheme, delta, alpha, &run),
        Command::Table { id, schemes, sizes, reference_only, run } => {
            cmd_table(id, &schemes, &sizes, reference_only, &run)
        }
    }
}

fn main() -> ExitCode {
    configure_threads_from_env();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric(_) | Error::Overflow(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
