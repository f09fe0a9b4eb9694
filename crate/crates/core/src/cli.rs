//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bracket::DimBracket;
use crate::cf::{cf_report, search_power_l, CfReportOptions};
use crate::cover::{
    box_count_series, box_dim_regression, default_fit_deltas, fit_dim_theta, log_spaced,
    SetDescriptor,
};
use crate::curves::{
    combine_max, fbm_image_dims, holder_bounds, interpolation_lower_bound, lattice_curve,
    lattice_dim_theta, phase_transition_theta, seq_curve, theta_grid, DEFAULT_GRID_POINTS,
};
use crate::digits::DigitSet;
use crate::emit::{curve_csv, read_table_csv, render_svg, series_csv, table_csv, PlotSpec, Series};
use crate::error::Error;
use crate::generic::{generic_box_dim_experiment, ExperimentConfig, RandomSystemSpec};
use crate::ifs::SystemSpec;
use crate::pressure::{hausdorff_bracket, pressure_estimate, RatioFamily, DEFAULT_TOL};

pub const THREADS_ENV: &str = "IIFS_DIM_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "iifs-dim",
    version,
    about = "Dimension calculators for infinitely generated attractors"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Pressure bracket at one value of t.
    Pressure(PressureArgs),
    /// Certified Hausdorff-dimension bracket.
    Hausdorff(HausdorffArgs),
    /// Intermediate-dimension curve max{h, family(θ)} as CSV.
    Curve(CurveArgs),
    /// Report for a real (or complex) continued-fraction digit set.
    Cf(CfArgs),
    /// Report for the complex power family.
    CfComplex(CfComplexArgs),
    /// Lattice-inversion closed form against the general lower bound.
    Lattice(LatticeArgs),
    /// Hölder-exponent bounds between two power-family sets.
    Holder(HolderArgs),
    /// Dimensions of fractional Brownian images.
    Fbm(FbmArgs),
    /// Cover-based estimate of the lattice curve at one θ.
    CoverFit(CoverFitArgs),
    /// Box counts and slope bracket for a sequence or lattice set.
    Boxdim(BoxdimArgs),
    /// Monte Carlo ensemble for random-translation attractors.
    Generic(GenericArgs),
    /// Line chart of a numeric CSV table.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct PressureArgs {
    /// System JSON (a path, or inline JSON starting with '{').
    #[arg(long)]
    system: String,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    level: usize,
    #[arg(long, default_value_t = 1000)]
    truncate: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HausdorffArgs {
    #[arg(long)]
    system: String,
    #[arg(long, default_value_t = 4)]
    level: usize,
    #[arg(long, default_value_t = 1000)]
    truncate: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Family {
    Seq,
    Lattice,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 0.0)]
    h: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    truncate: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Use this h instead of computing a bracket.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,
    /// Report JSON path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Curve CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CfArgs {
    /// DigitSet JSON (a path, or inline JSON starting with '{').
    #[arg(long)]
    digits: String,
    /// For the power family, search l so that h < 1/(p+1) - margin.
    #[arg(long)]
    search_l: bool,
    #[arg(long, default_value_t = 0.01)]
    margin: f64,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct CfComplexArgs {
    #[arg(long)]
    p: f64,
    #[arg(long = "R", alias = "r")]
    radius: f64,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HolderArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long)]
    hp: f64,
    #[arg(long)]
    hq: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FbmArgs {
    #[arg(long)]
    h: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    ambient: usize,
}

#[derive(Args, Debug)]
struct CoverFitArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    theta: f64,
    /// Scale range `from:to`; 1e-3:1e-300 when absent.
    #[arg(long)]
    deltas: Option<String>,
    #[arg(long, default_value_t = 1)]
    per_decade: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum SetKind {
    Seq,
    Lattice,
}

#[derive(Args, Debug)]
struct BoxdimArgs {
    #[arg(long, value_enum)]
    set: SetKind,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value = "1e-2:1e-5")]
    deltas: String,
    #[arg(long, default_value_t = 4)]
    per_decade: usize,
    /// Box-count CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Ratios {
    Dyadic,
    Geometric,
}

#[derive(Args, Debug)]
struct GenericArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = crate::generic::DEFAULT_MAPS)]
    maps: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// First seed; seeds run from here upward.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dyadic scale range `from:to` such as 1/2:1/16.
    #[arg(long)]
    deltas: Option<String>,
    #[arg(long, default_value = "1/32")]
    density_delta: String,
    #[arg(long, default_value_t = 1.0)]
    window: f64,
    #[arg(long, default_value_t = crate::generic::DEFAULT_DEPTH)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Ratios::Dyadic)]
    ratios: Ratios,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// Numeric CSV; the first column is the x axis.
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    svg: PathBuf,
    #[arg(long, default_value = "")]
    title: String,
    #[arg(long)]
    x_label: Option<String>,
    #[arg(long, default_value = "")]
    y_label: String,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidWord(_)
            | Error::Domain(_)
            | Error::Spec(_)
            | Error::Regime(_)
            | Error::InsufficientSpan(_)
            | Error::EmptyInput(_)
            | Error::Misaligned(_)
            | Error::Guard(_)
            | Error::Json(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage<T>(msg: impl Into<String>) -> std::result::Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Parses `a/b` or a decimal.
fn parse_scale(s: &str) -> std::result::Result<f64, Failure> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad scale '{s}'")))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad scale '{s}'")))?;
            a / b
        }
        None => s
            .parse()
            .map_err(|_| Failure::Usage(format!("bad scale '{s}'")))?,
    };
    if !(v.is_finite() && v > 0.0) {
        return usage(format!("scale '{s}' must be positive"));
    }
    Ok(v)
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), Failure> {
    let Some((a, b)) = s.split_once(':') else {
        return usage(format!("range '{s}' must look like from:to"));
    };
    let (a, b) = (parse_scale(a)?, parse_scale(b)?);
    if !(b < a) {
        return usage(format!(
            "range '{s}' must run from the larger scale to the smaller"
        ));
    }
    Ok((a, b))
}

/// Halving sequence from `a` down to `b`; the ratio must be a power of two.
fn dyadic_scales(a: f64, b: f64) -> std::result::Result<Vec<f64>, Failure> {
    let k = (a / b).log2();
    let r = k.round();
    if (k - r).abs() > 1e-9 {
        return usage("scale range must have a power-of-two ratio");
    }
    Ok((0..=r as i32).map(|i| a * 2f64.powi(-i)).collect())
}

fn load_json<T: serde::de::DeserializeOwned>(arg: &str) -> std::result::Result<T, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| Failure::Usage(format!("cannot read '{arg}': {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed JSON: {e}")))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text)
        .map_err(|e| Failure::Compute(format!("cannot write '{}': {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn deliver(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => write_file(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Compute(e.to_string())),
    }
}

fn positive(name: &str, v: f64) -> Outcome {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        usage(format!("--{name} must be positive"))
    }
}

#[derive(Serialize)]
struct BracketOut {
    lower: f64,
    upper: f64,
    level: usize,
    truncation: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
}

fn cmd_pressure(a: PressureArgs, out: &mut dyn Write) -> Outcome {
    positive("t", a.t)?;
    if a.level == 0 || a.truncate == 0 {
        return usage("--level and --truncate must be at least 1");
    }
    let sys: SystemSpec = load_json(&a.system)?;
    sys.validate()?;
    let e = pressure_estimate(&sys, a.t, a.level, a.truncate)?;
    let o = BracketOut {
        lower: e.lower_value,
        upper: e.upper_value,
        level: e.level,
        truncation: e.truncation,
        t: Some(e.t),
        converged: None,
    };
    deliver(out, a.out.as_deref(), &json(&o))
}

fn cmd_hausdorff(a: HausdorffArgs, out: &mut dyn Write) -> Outcome {
    positive("tol", a.tol)?;
    if a.level == 0 || a.truncate == 0 {
        return usage("--level and --truncate must be at least 1");
    }
    let sys: SystemSpec = load_json(&a.system)?;
    sys.validate()?;
    let b = hausdorff_bracket(&sys, a.level, a.truncate, a.tol)?;
    let o = BracketOut {
        lower: b.lower,
        upper: b.upper,
        level: a.level,
        truncation: a.truncate,
        t: None,
        converged: Some(b.converged),
    };
    deliver(out, a.out.as_deref(), &json(&o))
}

fn grid_size(n: usize) -> Outcome {
    if n < 2 {
        return usage("--grid must be at least 2");
    }
    Ok(())
}

fn cmd_curve(a: CurveArgs, out: &mut dyn Write) -> Outcome {
    positive("p", a.p)?;
    grid_size(a.grid)?;
    let d = match a.family {
        Family::Seq => {
            if a.d != 1 {
                return usage("the sequence family lives in dimension 1");
            }
            1
        }
        Family::Lattice => a.d,
    };
    if d == 0 || !(0.0..=d as f64).contains(&a.h) {
        return usage(format!("--h must lie in [0, {d}]"));
    }
    let extra: Vec<f64> = phase_transition_theta(a.h, a.p, d)
        .ok()
        .into_iter()
        .collect();
    let grid = theta_grid(a.grid, &extra);
    let base = match a.family {
        Family::Seq => seq_curve(a.p, &grid)?,
        Family::Lattice => lattice_curve(a.p, d, &grid)?,
    };
    let curve = combine_max(&DimBracket::point(a.h), &base);
    deliver(out, a.out.as_deref(), &curve_csv(&curve)?)
}

fn options(digits: &DigitSet, r: &ReportArgs) -> std::result::Result<CfReportOptions, Failure> {
    let mut o = CfReportOptions::for_digits(digits);
    if let Some(l) = r.level {
        o.level = l;
    }
    if let Some(t) = r.truncate {
        o.truncation = t;
    }
    if o.level == 0 || o.truncation == 0 {
        return usage("--level and --truncate must be at least 1");
    }
    positive("tol", r.tol)?;
    grid_size(r.grid)?;
    o.tol = r.tol;
    o.grid_points = r.grid;
    o.h_override = r.h;
    Ok(o)
}

fn report(digits: &DigitSet, r: &ReportArgs, out: &mut dyn Write) -> Outcome {
    digits.validate()?;
    let o = options(digits, r)?;
    let rep = cf_report(digits, &o)?;
    if let Some(p) = &r.csv {
        write_file(p, &curve_csv(&rep.curve)?)?;
    }
    deliver(out, r.out.as_deref(), &json(&rep))
}

fn cmd_cf(a: CfArgs, out: &mut dyn Write) -> Outcome {
    let mut digits: DigitSet = load_json(&a.digits)?;
    digits.validate()?;
    if a.search_l {
        let DigitSet::Power { p, .. } = digits else {
            return usage("--search-l needs a power digit set");
        };
        positive("margin", a.margin)?;
        let o = options(&digits, &a.report)?;
        let found = search_power_l(p, o.level, o.truncation, a.margin)?;
        digits = DigitSet::Power { p, l: found.l };
    }
    report(&digits, &a.report, out)
}

fn cmd_cf_complex(a: CfComplexArgs, out: &mut dyn Write) -> Outcome {
    let digits = DigitSet::ComplexPower {
        p: a.p,
        radius: a.radius,
    };
    report(&digits, &a.report, out)
}

#[derive(Serialize)]
struct LatticeSummary {
    p: f64,
    d: usize,
    box_dim: f64,
    max_identity_gap: f64,
}

fn cmd_lattice(a: LatticeArgs, out: &mut dyn Write) -> Outcome {
    positive("p", a.p)?;
    grid_size(a.grid)?;
    if a.d == 0 {
        return usage("--d must be at least 1");
    }
    let grid = theta_grid(a.grid, &[]);
    let box_dim = a.d as f64 / (a.p + 1.0);
    let mut rows = Vec::with_capacity(grid.len());
    let mut gap = 0f64;
    for &t in &grid {
        let upper = lattice_dim_theta(a.p, a.d, t)?;
        let lower = if t > 0.0 {
            interpolation_lower_bound(t, a.d as f64, box_dim)?
        } else {
            0.0
        };
        gap = gap.max((upper - lower).abs());
        rows.push(vec![t, lower, upper]);
    }
    let text = table_csv(&["theta", "lower", "upper"], &rows)?;
    match &a.out {
        Some(p) => {
            write_file(p, &text)?;
            let s = LatticeSummary {
                p: a.p,
                d: a.d,
                box_dim,
                max_identity_gap: gap,
            };
            deliver(out, None, &json(&s))
        }
        None => deliver(out, None, &text),
    }
}

#[derive(Serialize)]
struct HolderSummary {
    p: f64,
    q: f64,
    h_p: f64,
    h_q: f64,
    theta_opt: f64,
    argmin_theta: f64,
    bound_intermediate: f64,
    bound_closed_form: f64,
    bound_hausdorff: f64,
    bound_box: f64,
}

fn cmd_holder(a: HolderArgs, out: &mut dyn Write) -> Outcome {
    let r = holder_bounds(a.p, a.q, a.hp, a.hq, None)?;
    let rows: Vec<Vec<f64>> = r
        .curve
        .iter()
        .map(|c| vec![c.theta, c.dim_p, c.dim_q, c.alpha_bound])
        .collect();
    if let Some(p) = &a.out {
        write_file(
            p,
            &table_csv(&["theta", "dim_p", "dim_q", "alpha_bound"], &rows)?,
        )?;
    }
    if let Some(p) = &a.svg {
        let xs: Vec<f64> = r.curve.iter().map(|c| c.theta).collect();
        let plot = PlotSpec {
            title: format!(
                "Intermediate dimensions, p = {}, q = {}, h_p = {}, h_q = {}",
                a.p, a.q, a.hp, a.hq
            ),
            x_label: "theta".into(),
            y_label: "dimension".into(),
            x_range: Some((0.0, 1.0)),
            y_range: None,
            series: vec![
                Series::new(
                    format!("dim_theta F (p = {})", a.p),
                    xs.clone(),
                    r.curve.iter().map(|c| c.dim_p).collect(),
                ),
                Series::new(
                    format!("dim_theta F (q = {})", a.q),
                    xs.clone(),
                    r.curve.iter().map(|c| c.dim_q).collect(),
                ),
                Series::new(
                    "ratio dim_q / dim_p",
                    xs.clone(),
                    r.curve.iter().map(|c| c.alpha_bound).collect(),
                ),
                Series::new(
                    format!("best bound {:.4}", r.bound_intermediate),
                    vec![0.0, 1.0],
                    vec![r.bound_intermediate; 2],
                ),
            ],
        };
        write_file(p, &render_svg(&plot)?)?;
    }
    let s = HolderSummary {
        p: r.p,
        q: r.q,
        h_p: r.h_p,
        h_q: r.h_q,
        theta_opt: r.theta_opt,
        argmin_theta: r.argmin_theta,
        bound_intermediate: r.bound_intermediate,
        bound_closed_form: r.bound_closed_form,
        bound_hausdorff: r.bound_hausdorff,
        bound_box: r.bound_box,
    };
    deliver(out, None, &json(&s))
}

fn cmd_fbm(a: FbmArgs, out: &mut dyn Write) -> Outcome {
    let r = fbm_image_dims(a.h, a.alpha, a.ambient)?;
    deliver(out, None, &json(&r))
}

#[derive(Serialize)]
struct FitOut {
    p: f64,
    d: usize,
    theta: f64,
    fit: f64,
    closed_form: f64,
    difference: f64,
}

fn cmd_cover_fit(a: CoverFitArgs, out: &mut dyn Write) -> Outcome {
    positive("p", a.p)?;
    if a.d == 0 || a.per_decade == 0 {
        return usage("--d and --per-decade must be at least 1");
    }
    if !(a.theta > 0.0 && a.theta <= 1.0) {
        return usage("--theta must lie in (0, 1]");
    }
    let deltas = match &a.deltas {
        Some(s) => {
            let (hi, lo) = parse_range(s)?;
            log_spaced(hi, lo, a.per_decade)
        }
        None => default_fit_deltas(),
    };
    let fit = fit_dim_theta(a.p, a.d, a.theta, &deltas)?;
    let closed = lattice_dim_theta(a.p, a.d, a.theta)?;
    let o = FitOut {
        p: a.p,
        d: a.d,
        theta: a.theta,
        fit,
        closed_form: closed,
        difference: fit - closed,
    };
    deliver(out, None, &json(&o))
}

fn cmd_boxdim(a: BoxdimArgs, out: &mut dyn Write) -> Outcome {
    positive("p", a.p)?;
    if a.per_decade == 0 {
        return usage("--per-decade must be at least 1");
    }
    let set = match a.set {
        SetKind::Seq => {
            if a.d != 1 {
                return usage("the sequence set lives in dimension 1");
            }
            SetDescriptor::Sequence { p: a.p }
        }
        SetKind::Lattice => {
            if a.d == 0 {
                return usage("--d must be at least 1");
            }
            SetDescriptor::Lattice { p: a.p, d: a.d }
        }
    };
    let (hi, lo) = parse_range(&a.deltas)?;
    if hi >= 1.0 {
        return usage("scales must be below 1");
    }
    let series = box_count_series(&set, &log_spaced(hi, lo, a.per_decade))?;
    let reg = box_dim_regression(&series)?;
    if let Some(p) = &a.out {
        write_file(p, &series_csv(&series)?)?;
    }
    deliver(out, None, &json(&reg))
}

fn cmd_generic(a: GenericArgs, out: &mut dyn Write) -> Outcome {
    if a.d == 0 || a.maps == 0 || a.samples == 0 || a.seeds == 0 || a.depth == 0 {
        return usage("--d, --maps, --samples, --seeds and --depth must be at least 1");
    }
    let ratios = match a.ratios {
        Ratios::Dyadic => RatioFamily::DyadicBlocks { first_exponent: 3 },
        Ratios::Geometric => RatioFamily::Geometric {
            first: 0.25,
            factor: 0.5,
        },
    };
    let rs = RandomSystemSpec {
        ratios,
        ambient_dim: a.d,
        window: a.window,
        truncation: a.maps,
        seed: a.seed,
    };
    rs.validate()?;
    let mut cfg = ExperimentConfig::for_dim(a.d);
    if let Some(s) = &a.deltas {
        let (hi, lo) = parse_range(s)?;
        cfg.scales = dyadic_scales(hi, lo)?;
    }
    cfg.density_delta = parse_scale(&a.density_delta)?;
    cfg.num_samples = a.samples;
    cfg.depth = a.depth;
    cfg.seeds = (0..a.seeds).map(|i| a.seed.wrapping_add(i)).collect();
    let r = generic_box_dim_experiment(&rs, &cfg)?;
    deliver(out, a.out.as_deref(), &json(&r))
}

fn cmd_plot(a: PlotArgs) -> Outcome {
    let text = std::fs::read_to_string(&a.csv)
        .map_err(|e| Failure::Usage(format!("cannot read '{}': {e}", a.csv.display())))?;
    let (headers, rows) = read_table_csv(&text)?;
    if headers.len() < 2 || rows.is_empty() {
        return usage("plot needs at least two columns and one row");
    }
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let series = (1..headers.len())
        .map(|j| {
            Series::new(
                headers[j].clone(),
                xs.clone(),
                rows.iter().map(|r| r[j]).collect(),
            )
        })
        .collect();
    let plot = PlotSpec {
        title: a.title,
        x_label: a.x_label.unwrap_or_else(|| headers[0].clone()),
        y_label: a.y_label,
        x_range: None,
        y_range: None,
        series,
    };
    write_file(&a.svg, &render_svg(&plot)?)
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        Cmd::Pressure(a) => cmd_pressure(a, out),
        Cmd::Hausdorff(a) => cmd_hausdorff(a, out),
        Cmd::Curve(a) => cmd_curve(a, out),
        Cmd::Cf(a) => cmd_cf(a, out),
        Cmd::CfComplex(a) => cmd_cf_complex(a, out),
        Cmd::Lattice(a) => cmd_lattice(a, out),
        Cmd::Holder(a) => cmd_holder(a, out),
        Cmd::Fbm(a) => cmd_fbm(a, out),
        Cmd::CoverFit(a) => cmd_cover_fit(a, out),
        Cmd::Boxdim(a) => cmd_boxdim(a, out),
        Cmd::Generic(a) => cmd_generic(a, out),
        Cmd::Plot(a) => cmd_plot(a),
    }
}

fn thread_pool() -> std::result::Result<Option<rayon::ThreadPool>, Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Failure::Compute(e.to_string()))
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let mut buf = Vec::new();
    let result = thread_pool().and_then(|pool| match pool {
        Some(p) => p.install(|| dispatch(cli.cmd, &mut buf)),
        None => dispatch(cli.cmd, &mut buf),
    });
    let _ = out.write_all(&buf);
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let code = run_with(
            std::iter::once("iifs-dim").chain(args.iter().copied()),
            &mut o,
            &mut e,
        );
        (
            code,
            String::from_utf8(o).unwrap(),
            String::from_utf8(e).unwrap(),
        )
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, _, err) = call(&["bogus"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn scales_parse() {
        assert_eq!(parse_scale("1/8").ok(), Some(0.125));
        assert!(parse_scale("-1").is_err());
        assert_eq!(
            dyadic_scales(0.125, 1.0 / 64.0).ok(),
            Some(vec![0.125, 0.0625, 0.03125, 0.015625])
        );
        assert!(dyadic_scales(0.125, 0.1).is_err());
        assert!(parse_range("1e-5:1e-2").is_err());
    }

    #[test]
    fn lattice_curve_ends_at_box_dim() {
        let (code, out, _) = call(&[
            "curve", "--family", "lattice", "--p", "2", "--d", "2", "--h", "0",
        ]);
        assert_eq!(code, 0);
        let last = out.lines().last().unwrap();
        let cols: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[0], 1.0);
        assert!((cols[2] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_flags_exit_two() {
        assert_eq!(
            call(&["curve", "--family", "seq", "--p", "2", "--h", "1.5"]).0,
            2
        );
        assert_eq!(call(&["fbm", "--h", "0.3", "--alpha", "1.5"]).0, 2);
        assert_eq!(
            call(&["holder", "--p", "2", "--q", "4", "--hp", "0.26", "--hq", "0.22"]).0,
            2
        );
        assert_eq!(call(&["hausdorff", "--system", "{not json"]).0, 2);
    }
}
