//! Command-line front end. Every subcommand emits a JSON report; verdicts are
//! report content, so a completed run exits 0 and bad input exits 2.

pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::certify::{self, Kind, Objective, OracleGrid, ParamBox};
use crate::convert::{self, Direction};
use crate::error::{Error, Result};
use crate::geometry::{classify_admittance_with, classify_scattering_with, DISCRIMINANT_TOL};
use crate::kernel::Kernel;
use crate::laplace::{self, HalfPlaneGrid, Spacing};
use crate::testfn::{self, QuadratureSpec};
use crate::timedomain::{self, AdmittanceParams, Horizons, Params};
pub use report::Report;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "PSEUDOPASS_MAX_THREADS";

#[derive(Debug, Parser)]
#[command(name = "pseudopass", version, about = "Check, sample and fit pseudo-passivity of convolution kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search a test-function corpus for violations of the energy inequality.
    Verify(VerifyArgs),
    /// Evaluate the transfer function and range residual over a half-plane grid.
    Sweep(SweepArgs),
    /// Classify the admissible range region of one parameter pair.
    Classify(ClassifyArgs),
    /// Fit parameters to sampled transfer data by linear programming.
    Fit(FitArgs),
    /// Cayley-convert transfer samples between admittance and scattering form.
    Convert(ConvertArgs),
    /// Render the nine-panel admittance region figure.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CorpusChoice {
    Default,
    Bumps,
    Windows,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Kernel spec JSON.
    kernel: PathBuf,
    /// Parameter JSON, `{"c": [..], "d": [..]}` or `{"F": [..], "G": [..]}`. Defaults to zero admittance parameters.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Falsification threshold on normalized residuals.
    #[arg(long, default_value_t = timedomain::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value = "default")]
    corpus: CorpusChoice,
    /// Horizons per test function.
    #[arg(long, default_value_t = timedomain::DEFAULT_HORIZONS)]
    horizons: usize,
    /// Time origin for the causality test.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    kernel: PathBuf,
    #[arg(long)]
    params: Option<PathBuf>,
    /// `re0,re1,nre,im0,im1,nim`
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, value_enum, default_value = "log-re")]
    spacing: SpacingArg,
    /// CSV of samples with a residual column.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    LogRe,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("family").required(true).args(["adm", "scat"])))]
struct ClassifyArgs {
    /// Admittance pair `c d`.
    #[arg(long, num_args = 2, value_names = ["C", "D"], allow_negative_numbers = true)]
    adm: Option<Vec<f64>>,
    /// Scattering pair `F G`.
    #[arg(long, num_args = 2, value_names = ["F", "G"], allow_negative_numbers = true)]
    scat: Option<Vec<f64>>,
    /// Tolerance for treating the discriminant as zero.
    #[arg(long, default_value_t = DISCRIMINANT_TOL)]
    tol: f64,
    /// Decide the discriminant sign exactly.
    #[arg(long)]
    exact: bool,
    /// Also draw the region over [-3, 3]².
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Adm,
    Scat,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Adm => Kind::Admittance,
            KindArg::Scat => Kind::Scattering,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MaxMargin,
    MaxHalfPlane,
    MaxDisk,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MaxMargin => Objective::MaxMargin,
            ObjectiveArg::MaxHalfPlane => Objective::MaxHalfPlane,
            ObjectiveArg::MaxDisk => Objective::MaxDisk,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Sample CSV with header `s_re,s_im,w_re,w_im`.
    samples: PathBuf,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, value_enum, default_value = "adm")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "max-margin")]
    objective: ObjectiveArg,
    /// Symmetric bound on every parameter.
    #[arg(long = "box", default_value_t = certify::DEFAULT_BOX)]
    box_bound: f64,
    /// Cross-check against an exhaustive parameter grid (N = 0 only).
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 1e-3)]
    oracle_step: f64,
    /// `x0,x1,y0,y1`
    #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
    oracle_range: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    AdmToScat,
    ScatToAdm,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    samples: PathBuf,
    #[arg(long, value_enum, default_value = "adm-to-scat")]
    direction: DirectionArg,
    /// Smallest admissible `|1 + w|`.
    #[arg(long, default_value_t = convert::DEFAULT_POLE_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// SVG destination; without it the SVG goes to stdout.
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::Validation(_) | Error::Parse(_) | Error::Io(_) | Error::Domain(_) | Error::Pole { .. })
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                let _ = writeln!(stderr, "error: {THREADS_ENV} must be a positive integer, got {v:?}");
                return 2;
            }
        },
        Err(_) => 0,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(text) => {
            if let Err(e) = stdout.write_all(text.as_bytes()) {
                let _ = writeln!(stderr, "error: {e}");
                return 1;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if is_input_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

/// Writes the report to `--report` if given; otherwise returns it for stdout.
fn emit(cli: &Cli, report: &Report) -> Result<String> {
    let text = report.render();
    match &cli.report {
        Some(path) => {
            fs::write(path, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Runs the subcommand; returns what belongs on stdout.
fn dispatch(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Verify(a) => emit(cli, &cmd_verify(a)?),
        Command::Sweep(a) => emit(cli, &cmd_sweep(a)?),
        Command::Classify(a) => emit(cli, &cmd_classify(a)?),
        Command::Fit(a) => emit(cli, &cmd_fit(a)?),
        Command::Convert(a) => emit(cli, &cmd_convert(a)?),
        Command::Plot(a) => {
            let (report, svg) = cmd_plot(a)?;
            match &a.svg {
                Some(_) => emit(cli, &report),
                None => {
                    if let Some(path) = &cli.report {
                        fs::write(path, report.render())?;
                    }
                    Ok(svg)
                }
            }
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_kernel(path: &Path) -> Result<Kernel> {
    Kernel::from_json(&read_text(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_params(path: Option<&Path>) -> Result<Params> {
    let Some(path) = path else {
        return Ok(AdmittanceParams::zero(0).into());
    };
    let p: Params = serde_json::from_str(&read_text(path)?)
        .map_err(|e| Error::Parse(format!("{}: expected {{\"c\", \"d\"}} or {{\"F\", \"G\"}} arrays: {e}", path.display())))?;
    p.validate()?;
    Ok(p)
}

fn parse_list(text: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let vals: std::result::Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(Error::Parse(format!("{what} needs {count} comma-separated numbers, got {text:?}"))),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn kernel_warnings(k: &Kernel) -> Vec<String> {
    let mut w = Vec::new();
    if !k.is_tempered() {
        w.push("kernel has a growing exponential tail and is not tempered".into());
    }
    w
}

fn cmd_verify(a: &VerifyArgs) -> Result<Report> {
    let k = load_kernel(&a.kernel)?;
    let p = load_params(a.params.as_deref())?;
    if !(a.tol >= 0.0) {
        return Err(Error::validation("--tol must be non-negative"));
    }
    if a.horizons == 0 {
        return Err(Error::validation("--horizons must be positive"));
    }
    let corpus = match a.corpus {
        CorpusChoice::Default => testfn::default_corpus(),
        CorpusChoice::Bumps => testfn::bump_corpus(),
        CorpusChoice::Windows => testfn::window_corpus(),
    };
    let q = QuadratureSpec::default();
    let verdict = timedomain::falsify(&k, &p, &corpus, &Horizons::PerFunction(a.horizons), a.tol, &q);
    let causality = timedomain::causality_check(&k, a.t0, &testfn::bump_corpus(), 1e-9, &q);
    let mut warnings = kernel_warnings(&k);
    for (f, t, m) in &verdict.failures {
        warnings.push(format!("{f} at t = {t:e}: {m}"));
    }
    let inputs = json!({
        "kernel": path_str(&a.kernel),
        "kernel_digest": k.digest(),
        "params": p,
        "corpus": format!("{:?}", a.corpus).to_lowercase(),
        "corpus_size": corpus.len(),
        "horizons_per_function": a.horizons,
        "tol": a.tol,
        "quadrature_abs_tol": q.abs_tol,
        "t0": a.t0,
    });
    let results = json!({
        "verdict": verdict.status,
        "min_residual": verdict.min_residual,
        "witness": verdict.witness,
        "evaluated": verdict.evaluated,
        "failed_evaluations": verdict.failures.len(),
        "causality": causality,
        "support_lower_bound": k.support_lower_bound(),
        "tempered": k.is_tempered(),
    });
    Ok(Report::new("verify", inputs, results, warnings))
}

fn grid_from(a: &SweepArgs) -> Result<HalfPlaneGrid> {
    let spacing = match a.spacing {
        SpacingArg::Linear => Spacing::Linear,
        SpacingArg::LogRe => Spacing::LogRe,
    };
    let Some(text) = &a.grid else {
        return Ok(HalfPlaneGrid { spacing, ..HalfPlaneGrid::default() });
    };
    let v = parse_list(text, 6, "--grid")?;
    let count = |x: f64| {
        if x >= 1.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(Error::Parse(format!("--grid point counts must be positive integers, got {x}")))
        }
    };
    HalfPlaneGrid::new((v[0], v[1]), (v[3], v[4]), count(v[2])?, count(v[5])?, spacing)
}

fn cmd_sweep(a: &SweepArgs) -> Result<Report> {
    let k = load_kernel(&a.kernel)?;
    let p = load_params(a.params.as_deref())?;
    let grid = grid_from(a)?;
    let rep = laplace::sweep(&k, &grid, &p)?;
    if let Some(out) = &a.out {
        let mut wr = csv::Writer::from_path(out)?;
        wr.write_record(["s_re", "s_im", "w_re", "w_im", "residual"])?;
        for r in &rep.rows {
            wr.write_record([r.s.re, r.s.im, r.w.re, r.w.im, r.residual].map(|x| x.to_string()))?;
        }
        wr.flush()?;
    }
    let mut warnings = kernel_warnings(&k);
    if !rep.skipped.is_empty() {
        warnings.push(format!("{} grid points outside the region of convergence were skipped", rep.skipped.len()));
    }
    let skipped: Vec<Value> = rep.skipped.iter().map(|(s, m)| json!({"s": s, "reason": m})).collect();
    let inputs = json!({
        "kernel": path_str(&a.kernel),
        "kernel_digest": k.digest(),
        "params": p,
        "grid": grid,
        "out": a.out.as_deref().map(path_str),
    });
    let results = json!({
        "evaluated": rep.rows.len(),
        "skipped": skipped,
        "min_residual": rep.min_residual,
        "argmin": rep.argmin,
        "argmin_w": rep.argmin.and_then(|s| rep.rows.iter().find(|r| r.s == s)).map(|r| r.w),
        "non_tempered": rep.non_tempered,
    });
    Ok(Report::new("sweep", inputs, results, warnings))
}

fn cmd_classify(a: &ClassifyArgs) -> Result<Report> {
    let tol = if a.exact { 0.0 } else { a.tol };
    if !(tol >= 0.0) {
        return Err(Error::validation("--tol must be non-negative"));
    }
    let (family, pair, region) = match (&a.adm, &a.scat) {
        (Some(v), _) => ("admittance", v.clone(), classify_admittance_with(v[0], v[1], tol)),
        (_, Some(v)) => ("scattering", v.clone(), classify_scattering_with(v[0], v[1], tol)),
        _ => unreachable!("clap requires one family"),
    };
    if !pair.iter().all(|x| x.is_finite()) {
        return Err(Error::validation("parameters must be finite"));
    }
    if let Some(path) = &a.svg {
        let title = match family {
            "admittance" => format!("c = {}, d = {}", pair[0], pair[1]),
            _ => format!("F = {}, G = {}", pair[0], pair[1]),
        };
        fs::write(path, svg::render(&[svg::Panel { title, region: region.clone() }], 1))?;
    }
    let inputs = json!({
        "family": family,
        "pair": pair,
        "discriminant_tol": tol,
        "svg": a.svg.as_deref().map(path_str),
    });
    let mut results = serde_json::to_value(&region)?;
    results["description"] = json!(region.to_string());
    Ok(Report::new("classify", inputs, results, vec![]))
}

fn read_samples(path: &Path) -> Result<Vec<laplace::TransferSample>> {
    let file = fs::File::open(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    laplace::read_samples(file).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn cmd_fit(a: &FitArgs) -> Result<Report> {
    let samples = read_samples(&a.samples)?;
    let kind: Kind = a.kind.into();
    let cs = certify::build_constraints(&samples, a.n, kind)?;
    if !(a.box_bound > 0.0) || !a.box_bound.is_finite() {
        return Err(Error::validation("--box must be positive and finite"));
    }
    let objective: Objective = a.objective.into();
    let fit = certify::fit(&cs, &ParamBox::symmetric(cs.dim(), a.box_bound), objective)?;
    let mut warnings = Vec::new();
    if fit.box_active {
        warnings.push("optimum touches the parameter box; the data leave this direction unbounded".into());
    }
    if fit.degenerate {
        warnings.push("degenerate sample set: the margin is limited only by the box".into());
    }
    let oracle = if a.oracle {
        if a.n != 0 {
            warnings.push("oracle skipped: it only covers N = 0".into());
            Value::Null
        } else {
            oracle_report(&samples, &cs, kind, objective, a)?
        }
    } else {
        Value::Null
    };
    let inputs = json!({
        "samples": path_str(&a.samples),
        "sample_count": samples.len(),
        "n": a.n,
        "kind": kind,
        "objective": objective,
        "box": a.box_bound,
    });
    let mut results = serde_json::to_value(&fit)?;
    results["oracle"] = oracle;
    Ok(Report::new("fit", inputs, results, warnings))
}

fn oracle_report(samples: &[laplace::TransferSample], cs: &certify::ConstraintSet, kind: Kind, objective: Objective, a: &FitArgs) -> Result<Value> {
    let r = parse_list(&a.oracle_range, 4, "--oracle-range")?;
    let grid = OracleGrid {
        x_range: (r[0], r[1]),
        y_range: (r[2], r[3]),
        step: a.oracle_step,
    };
    let oracle = certify::brute_force_oracle(samples, kind, &grid)?;
    // Compare on the oracle's own box so both searches cover the same set.
    let lp = certify::fit(cs, &grid.as_box(), Objective::MaxMargin)?;
    let agreement = certify::compare_with_oracle(cs, &lp, &oracle);
    Ok(json!({
        "grid": grid,
        "objective_compared": Objective::MaxMargin,
        "requested_objective": objective,
        "feasible_cells": oracle.feasible_count,
        "total_cells": oracle.feasible.len(),
        "best_cell": oracle.best,
        "lp_point": lp.x,
        "lp_margin": lp.margin,
        "agreement": agreement,
    }))
}

fn cmd_convert(a: &ConvertArgs) -> Result<Report> {
    let samples = read_samples(&a.samples)?;
    if !(a.tol > 0.0) {
        return Err(Error::validation("--tol must be positive"));
    }
    let direction = match a.direction {
        DirectionArg::AdmToScat => Direction::AdmToScat,
        DirectionArg::ScatToAdm => Direction::ScatToAdm,
    };
    let rep = convert::convert_samples(&samples, direction, a.tol);
    if let Some(out) = &a.out {
        laplace::write_samples(fs::File::create(out)?, &rep.samples)?;
    }
    let mut warnings = Vec::new();
    if !rep.pole_warnings.is_empty() {
        warnings.push(format!("{} samples sit on the pole w = -1 and were excluded", rep.pole_warnings.len()));
    }
    let inputs = json!({
        "samples": path_str(&a.samples),
        "sample_count": samples.len(),
        "direction": direction,
        "pole_tol": a.tol,
        "out": a.out.as_deref().map(path_str),
    });
    let results = json!({
        "direction": direction,
        "converted": rep.samples.len(),
        "excluded": rep.pole_warnings.len(),
        "pole_warnings": rep.pole_warnings,
    });
    Ok(Report::new("convert", inputs, results, warnings))
}

fn cmd_plot(a: &PlotArgs) -> Result<(Report, String)> {
    let panels = svg::figure_panels();
    let text = svg::render(&panels, 3);
    if let Some(path) = &a.svg {
        fs::write(path, &text)?;
    }
    let described: Vec<Value> = svg::FIGURE_PAIRS
        .iter()
        .zip(&panels)
        .map(|(&(c, d), p)| {
            json!({
                "c": c,
                "d": d,
                "shape": p.region.shape,
                "case": p.region.case,
                "description": p.region.to_string(),
            })
        })
        .collect();
    let report = Report::new(
        "plot",
        json!({"svg": a.svg.as_deref().map(path_str), "viewport": [-3.0, 3.0, -3.0, 3.0]}),
        json!({"panels": described}),
        vec![],
    );
    Ok((report, text))
}
