// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use spacetimes::ads::*;
use spacetimes::earthquake::*;
use spacetimes::flat::*;
use spacetimes::fuchsian::*;
use spacetimes::lamination::*;
use spacetimes::{HyperbolicPoint, Mat2};

/// Largest word-ball radius accepted on the command line.
const MAX_BALL: usize = 8;

#[derive(Parser)]
#[command(name = "spacetimes", version, about = "Constant-curvature 2+1 spacetimes from surface-group data")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Tolerance for residual checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Word-ball radius for group enumerations.
    #[arg(long, global = true, default_value_t = 3)]
    ball: usize,
    /// Sample count (surface samples, boundary samples, hull points).
    #[arg(long, global = true, default_value_t = 400)]
    density: usize,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Directory for the report and artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Euler class of a representation and the Milnor–Wood verdict.
    Euler { rep: PathBuf },
    #[command(subcommand)]
    Flat(FlatCommand),
    /// Earthquake along a finite lamination of the hyperbolic plane.
    Quake {
        lamination: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        /// CSV of upper-half-plane points `re,im` to move.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    #[command(subcommand)]
    Ads(AdsCommand),
}

#[derive(Subcommand)]
enum FlatCommand {
    /// Translation cocycle and developed surface of a measured multicurve.
    Build {
        rep: PathBuf,
        multicurve: PathBuf,
        /// Hyperbolic radius of the sampled disc.
        #[arg(long, default_value_t = 1.5)]
        radius: f64,
    },
    /// Cocycle identities for a stored cocycle.
    Check { rep: PathBuf, cocycle: PathBuf },
}

#[derive(Args)]
struct GraphSource {
    /// Circle map CSV (`theta_in,theta_out`) whose graph is hulled.
    #[arg(long, conflicts_with_all = ["left", "right", "twist"])]
    map: Option<PathBuf>,
    /// Left holonomy.
    #[arg(long)]
    left: Option<PathBuf>,
    /// Right holonomy.
    #[arg(long, conflicts_with = "twist")]
    right: Option<PathBuf>,
    /// Multicurve: the right holonomy is the left one after a left earthquake.
    #[arg(long)]
    twist: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AdsCommand {
    /// Convex hull of the graph, bending data and the extracted earthquake.
    Hull {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Whether a point of anti-de Sitter space lies between the hull boundaries.
    Between {
        #[command(flatten)]
        source: GraphSource,
        /// Matrix entries `a,b,c,d` of the point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Serialize)]
struct Check {
    name: String,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct Report {
    schema: String,
    command: Vec<String>,
    inputs: BTreeMap<String, String>,
    values: Map<String, Value>,
    checks: Vec<Check>,
    notices: Vec<String>,
    artifacts: Vec<String>,
}

struct Run {
    config: RunConfig,
    report: Report,
    files: Vec<(String, String)>,
    started: Instant,
}

impl Run {
    fn new(config: RunConfig, schema: &str) -> Self {
        let report = Report {
            schema: format!("spacetimes.{schema}/1"),
            command: std::env::args().skip(1).collect(),
            inputs: BTreeMap::new(),
            values: Map::new(),
            checks: Vec::new(),
            notices: Vec::new(),
            artifacts: Vec::new(),
        };
        Self { config, report, files: Vec::new(), started: Instant::now() }
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.report.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn value(&mut self, key: &str, v: impl Serialize) {
        self.report.values.insert(key.into(), serde_json::to_value(v).expect("serializable value"));
    }

    fn check(&mut self, name: &str, residual: f64, tolerance: f64) {
        let pass = residual <= tolerance;
        self.report.checks.push(Check { name: name.into(), residual, tolerance, pass });
    }

    fn artifact(&mut self, name: &str, contents: String) {
        self.files.push((name.into(), contents));
    }

    fn lap(&self, label: &str) {
        eprintln!("timing {label}: {:.3} s", self.started.elapsed().as_secs_f64());
    }

    /// Prints the report, writes artifacts, and returns whether every check passed.
    fn finish(mut self) -> Result<bool> {
        if let Some(dir) = &self.config.out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, contents) in &self.files {
                fs::write(dir.join(name), contents).with_context(|| format!("writing {name}"))?;
                self.report.artifacts.push(name.clone());
            }
        }
        let text = serde_json::to_string_pretty(&self.report)?;
        if let Some(dir) = &self.config.out {
            fs::write(dir.join("report.json"), format!("{text}\n"))?;
        }
        // A closed pipe (e.g. `| head`) is not a failure of the run.
        let _ = writeln!(std::io::stdout(), "{text}");
        self.lap("total");
        Ok(self.report.checks.iter().all(|c| c.pass))
    }
}

fn load_rep(run: &mut Run, path: &Path) -> Result<Representation> {
    let text = run.read(path)?;
    Representation::from_json(&text).with_context(|| format!("loading representation {}", path.display()))
}

fn load_multicurve(run: &mut Run, path: &Path) -> Result<WeightedMulticurve> {
    let text = run.read(path)?;
    WeightedMulticurve::from_json(&text).with_context(|| format!("loading multicurve {}", path.display()))
}

fn cmd_euler(mut run: Run, path: &Path) -> Result<bool> {
    let rep = load_rep(&mut run, path)?;
    let genus = rep.presentation().genus().context("the Euler class needs a closed-surface presentation")?;
    let e = euler_class(&rep)?;
    let bound = 2 * genus as i64 - 2;
    run.value("genus", genus);
    run.value("euler_class", e);
    run.value("milnor_wood_bound", bound);
    run.value("maximal", e.abs() == bound);
    run.check("relator residual", rep.relator_residual(), run.config.tol);
    run.check("milnor-wood |e| <= 2g - 2", (e.abs() - bound).max(0) as f64, 0.0);
    run.finish()
}

/// Cocycle identity residuals over pairs of short words, each product
/// looked up in the full ball.
fn cocycle_checks(run: &mut Run, rep: &Representation, coc: &TranslationCocycle) {
    run.check("cocycle relator residual", relator_residual(rep, coc), run.config.tol);
    let ball = enumerate_ball(rep, run.config.ball);
    let half = run.config.ball.div_ceil(2);
    let short: Vec<&Word> = ball.elements().iter().filter(|e| e.word.len() <= half).map(|e| &e.word).collect();
    let mut worst: f64 = 0.0;
    for a in &short {
        for b in &short {
            worst = worst.max(cocycle_residual(rep, coc, &ball, a, b));
        }
    }
    run.value("cocycle_pairs", short.len() * short.len());
    run.check("cocycle identity t(ab) = t(a) + f(a) t(b)", worst, run.config.tol);
}

fn cmd_flat_build(mut run: Run, rep_path: &Path, mc_path: &Path, radius: f64) -> Result<bool> {
    let rep = load_rep(&mut run, rep_path)?;
    let mc = load_multicurve(&mut run, mc_path)?;
    if !disjointness_check(&rep, &mc, run.config.ball)? {
        bail!(spacetimes::Error::NotDisjoint);
    }
    let mut lam = LiftedLamination::from_multicurve(&rep, &mc, 1)?;
    let base = lam.default_basepoint();
    let coc = cocycle_from_lifted(&mut lam, base)?;
    run.lap("cocycle");
    cocycle_checks(&mut run, &rep, &coc);
    run.lap("cocycle checks");
    let opts = DevelopOptions { radius, density: run.config.density, seed: run.config.seed, basepoint: Some(base) };
    let patch = develop_lifted(&mut lam, &opts)?;
    run.lap("development");
    let slope = patch.graph_slope_check()?;
    let gap = patch.injectivity_gap();
    let planes = patch.support_planes(64);
    let margin = planes
        .iter()
        .flat_map(|p| patch.samples.iter().map(move |s| p.margin(s.f)))
        .fold(f64::INFINITY, f64::min);
    run.value("basepoint", base.vector().to_array());
    run.value("cocycle", coc.generator_values().iter().map(|v| v.to_array()).collect::<Vec<_>>());
    run.value("samples", patch.samples.len());
    run.value("regions", patch.region_count());
    run.value("lifts_used", patch.leaves().len());
    run.value("max_time_slope", slope);
    run.value("min_null_gap", gap.min_gap);
    run.value("min_support_margin", margin);
    run.check("developed surface is spacelike (slope < 1)", slope, 1.0 - 1e-12);
    run.check("no null-separated pair (negated gap)", (-gap.min_gap).max(0.0), run.config.tol);
    run.check("surface inside the support half-spaces", (-margin).max(0.0), run.config.tol);
    run.artifact("cocycle.json", coc.to_json());
    run.artifact("surface.obj", patch.to_obj());
    run.artifact("surface.csv", patch.to_csv());
    let plane_list: Vec<Value> =
        planes.iter().map(|p| json!({ "normal": p.normal.to_array(), "offset": p.offset })).collect();
    run.artifact("support_planes.json", serde_json::to_string_pretty(&plane_list)?);
    run.finish()
}

fn cmd_flat_check(mut run: Run, rep_path: &Path, coc_path: &Path) -> Result<bool> {
    let rep = load_rep(&mut run, rep_path)?;
    let text = run.read(coc_path)?;
    let coc = TranslationCocycle::from_json(&text, rep.generator_count())?;
    cocycle_checks(&mut run, &rep, &coc);
    run.finish()
}

fn parse_points(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.chars().any(|c| c.is_ascii_alphabetic())) {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            bail!("points line {}: expected `re,im`", i + 1);
        }
        let re: f64 = parts[0].parse().with_context(|| format!("points line {}", i + 1))?;
        let im: f64 = parts[1].parse().with_context(|| format!("points line {}", i + 1))?;
        if !(im > 0.0) {
            bail!("points line {}: imaginary part must be positive", i + 1);
        }
        out.push((re, im));
    }
    Ok(out)
}

fn cmd_quake(mut run: Run, path: &Path, scale: f64, side: SideArg, points: Option<&Path>) -> Result<bool> {
    let text = run.read(path)?;
    let lam = FiniteLaminationH2::from_json(&text)?;
    if !(scale >= 0.0) {
        bail!("scale must be non-negative, got {scale}");
    }
    let side = match side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    };
    let quake = earthquake_along(lam, side, scale);
    let bv = quake.boundary_value(run.config.density.max(3));
    let monotone = bv.is_monotone(1e-9);
    run.value("leaves", quake.lamination.leaves().len());
    run.value("boundary_samples", bv.samples().len());
    run.value("monotone", monotone);
    run.check("boundary map is monotone (|winding - 1|)", (bv.winding() - 1.0).abs(), 1e-9);
    run.artifact("boundary.csv", bv.to_csv());
    if let Some(p) = points {
        let text = run.read(p)?;
        let pts = parse_points(&text)?;
        let mut csv = String::from("re,im,status,image_re,image_im,far_re,far_im\n");
        let mut flagged = 0;
        for (re, im) in pts {
            match quake.apply(HyperbolicPoint::from_upper_half_plane((re, im))) {
                QuakeImage::Point(q) => {
                    let (a, b) = q.to_upper_half_plane();
                    writeln!(csv, "{re},{im},ok,{a},{b},,").unwrap();
                }
                QuakeImage::OnLeaf { near, far } => {
                    flagged += 1;
                    let ((a, b), (c, d)) = (near.to_upper_half_plane(), far.to_upper_half_plane());
                    writeln!(csv, "{re},{im},on_leaf,{a},{b},{c},{d}").unwrap();
                }
            }
        }
        run.value("points_on_leaves", flagged);
        if flagged > 0 {
            run.report.notices.push(format!("{flagged} point(s) lie on a leaf; both one-sided images are listed"));
        }
        run.artifact("images.csv", csv);
    }
    run.finish()
}

/// The sampled graph, and the full (unthinned) sample set for residuals.
fn load_graph(run: &mut Run, source: &GraphSource) -> Result<CircleGraph> {
    if let Some(map) = &source.map {
        let text = run.read(map)?;
        return Ok(CircleGraph::from_csv(&text)?);
    }
    let Some(left) = &source.left else {
        bail!("give either --map or --left with --right/--twist");
    };
    let left = load_rep(run, left)?;
    let right = match (&source.right, &source.twist) {
        (Some(r), None) => load_rep(run, r)?,
        (None, Some(t)) => {
            let mc = load_multicurve(run, t)?;
            rep_after_earthquake(&left, &mc, 1.0, Side::Left)?
        }
        _ => bail!("give exactly one of --right or --twist"),
    };
    let graph = sample_conjugacy(&left, &right, run.config.ball)?;
    run.lap("conjugacy samples");
    Ok(graph)
}

fn cmd_ads_hull(mut run: Run, source: &GraphSource) -> Result<bool> {
    let graph = load_graph(&mut run, source)?;
    let thin = if graph.len() > run.config.density { graph.thinned(run.config.density)? } else { graph.clone() };
    let plane = disjoint_spacelike_plane(&thin)?;
    let hull = convex_hull_seeded(&thin, plane, run.config.seed)?;
    run.lap("hull");
    let bending = bending_data(&hull)?;
    let extracted = extract_left_earthquake(&hull)?;
    run.lap("extraction");
    let err = graph
        .pairs()
        .map(|(a, r)| {
            let d = (extracted.boundary.eval(a) - r).rem_euclid(1.0);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max);
    if hull.flat {
        run.report.notices.push("flat hull: the graph is a Möbius map and the earthquake is trivial".into());
    }
    let p = plane.to_array();
    run.value("samples", graph.len());
    run.value("hull_samples", thin.len());
    run.value("chart_plane", p);
    run.value("flat", hull.flat);
    run.value("faces", hull.faces.len());
    run.value("future_faces", hull.future_faces().count());
    run.value("bending_edges", bending.len());
    run.value("bending_sum", bending.iter().map(|b| b.weight).sum::<f64>() + 0.0);
    run.value("leaf_shear_sum", extracted.total_shear() + 0.0);
    let leaves: Vec<Value> = extracted
        .leaves
        .iter()
        .map(|l| json!({ "start": l.geodesic.start.angle(), "end": l.geodesic.end.angle(), "shear": l.signed_shear }))
        .collect();
    run.value("leaves", leaves);
    run.value("roundtrip_error", err);
    run.check("chart plane misses the graph", if plane_disjoint(&thin, plane) { 0.0 } else { 1.0 }, 0.0);
    run.check("vertices on the quadric", hull.quadric_residual(), QUADRIC_EPS);
    run.check("face coplanarity", hull.coplanarity_residual(), COPLANAR_EPS);
    run.check("convexity", hull.convexity_residual(), 1e-9);
    run.check("no Lorentzian faces", hull.count_class(PlaneClass::Lorentzian) as f64, 0.0);
    run.check("roundtrip boundary error (vs 10 x spacing)", err, 10.0 * thin.spacing());
    run.artifact("hull.obj", hull.to_obj());
    let bend: Vec<Value> = bending
        .iter()
        .map(|b| {
            json!({
                "endpoints": [thin.left_params()[b.vertices[0]], thin.left_params()[b.vertices[1]]],
                "faces": b.faces,
                "pairing": b.pairing,
                "weight": b.weight,
            })
        })
        .collect();
    run.artifact("bending.json", serde_json::to_string_pretty(&bend)?);
    run.artifact("earthquake_boundary.csv", extracted.boundary.to_csv());
    run.artifact("graph.csv", thin.to_csv());
    run.finish()
}

fn cmd_ads_between(mut run: Run, source: &GraphSource, point: &[f64]) -> Result<bool> {
    if point.len() != 4 {
        bail!("--point needs four comma-separated entries, got {}", point.len());
    }
    let graph = load_graph(&mut run, source)?;
    let m = Mat2::new(point[0], point[1], point[2], point[3]);
    run.value("point", point);
    match dependence_membership(&m, &graph) {
        Ok(inside) => {
            run.value("between", inside);
            run.check("membership determinate", 0.0, 0.0);
        }
        Err(spacetimes::Error::Indeterminate(why)) => {
            run.value("between", Value::Null);
            run.report.notices.push(format!("indeterminate: {why}"));
            run.check("membership determinate", 1.0, 0.0);
        }
        Err(e) => return Err(e.into()),
    }
    run.finish()
}

fn dispatch(cli: Cli) -> Result<bool> {
    let config = cli.config;
    if !(config.tol > 0.0) {
        bail!("--tol must be positive");
    }
    if config.ball > MAX_BALL {
        bail!("--ball {} exceeds the cap {MAX_BALL}", config.ball);
    }
    match cli.command {
        Command::Euler { rep } => cmd_euler(Run::new(config, "euler"), &rep),
        Command::Flat(FlatCommand::Build { rep, multicurve, radius }) => {
            cmd_flat_build(Run::new(config, "flat-build"), &rep, &multicurve, radius)
        }
        Command::Flat(FlatCommand::Check { rep, cocycle }) => cmd_flat_check(Run::new(config, "flat-check"), &rep, &cocycle),
        Command::Quake { lamination, scale, side, points } => {
            cmd_quake(Run::new(config, "quake"), &lamination, scale, side, points.as_deref())
        }
        Command::Ads(AdsCommand::Hull { source }) => cmd_ads_hull(Run::new(config, "ads-hull"), &source),
        Command::Ads(AdsCommand::Between { source, point }) => {
            cmd_ads_between(Run::new(config, "ads-between"), &source, &point)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("{}", json!({ "schema": "spacetimes.error/1", "error": chain.join(": ") }));
            ExitCode::from(2)
        }
    }
}
