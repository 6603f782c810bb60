//! Subcommand execution: parse the small argument grammars, call the library,
//! and write artifacts. Every output file embeds the config hash (a comment
//! line in CSV, a top-level field in JSON) and each run ends with a
//! `manifest.json` recording hash, seed, versions, and wall time.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::continuous::{
    self, CurveGrid, GraphFamily, IntrinsicGraphFn, Region, RegionSampler, VBox,
};
use crate::embed::{self, FiniteMetric, NegativeType};
use crate::group::{word_ball, ContinuousPoint, DiscretePoint, DiscretePoint3};
use crate::perimeter::corpus::{box_set, corpus, random_cellular, scan, CorpusSpec, ScanRow};
use crate::perimeter::LatticeSet;
use crate::poincare::{self, integral_criterion, Modulus, VectorEmbedding};
use crate::sdp::{self, Instance, Lattice, Transform};

use super::config::{Command, ExperimentConfig};
use super::CliError;

/// Node budget for word-ball searches launched from the command line.
const BALL_NODE_BUDGET: usize = 20_000_000;

pub type SetFn = Box<dyn Fn(ContinuousPoint) -> bool + Send + Sync>;

/// What a run produced: the artifact paths and the exact stdout text.
#[derive(Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub stdout: String,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_text().as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Artifact sink for one run: knows the output directory and the config hash
/// and accumulates stdout lines in a deterministic order.
struct Sink {
    dir: PathBuf,
    hash: String,
    files: Vec<PathBuf>,
    lines: Vec<String>,
}

impl Sink {
    fn write_raw(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn write_csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
        let mut text = format!("# config_hash={}\n{header}\n", self.hash);
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        self.write_raw(name, &text)
    }

    fn write_json(&mut self, name: &str, value: Value) -> Result<(), CliError> {
        let Value::Object(mut map) = value else {
            return Err(CliError::Invalid(format!("artifact {name} is not a JSON object")));
        };
        map.insert("config_hash".into(), Value::String(self.hash.clone()));
        let text = serde_json::to_string_pretty(&Value::Object(map))
            .map_err(|e| CliError::Invalid(format!("cannot serialize {name}: {e}")))?;
        self.write_raw(name, &format!("{text}\n"))
    }

    fn say(&mut self, line: String) {
        self.lines.push(line);
    }
}

/// Runs one experiment config to completion and writes its artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let hash = config_hash(cfg);
    let dir = Path::new(&cfg.out);
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", dir.display())))?;
    let mut sink = Sink {
        dir: dir.to_path_buf(),
        hash: hash.clone(),
        files: Vec::new(),
        lines: Vec::new(),
    };
    match &cfg.command {
        Command::Ball { radius, lattice, budget } => {
            exec_ball(*radius, lattice, *budget, &mut sink)?
        }
        Command::Perimeter { source } => exec_perimeter(source, &mut sink)?,
        Command::IsoScan => exec_iso_scan(cfg.seed, &mut sink)?,
        Command::Poincare { phi, p } => exec_poincare(phi, *p, &mut sink)?,
        Command::Criterion { omega, r, cutoff } => exec_criterion(omega, *r, *cutoff, &mut sink)?,
        Command::C1 { metric, semimetric } => exec_c1(metric, *semimetric, &mut sink)?,
        Command::Negtype { metric, semimetric } => exec_negtype(metric, *semimetric, &mut sink)?,
        Command::Gap { instance } => exec_gap(instance, &mut sink)?,
        Command::HeisGap { radius, lattice, transform } => {
            exec_heis_gap(*radius, lattice, transform, &mut sink)?
        }
        Command::Vbar { region, set, r, budget, s_min, step, comparability } => exec_vbar(
            cfg,
            region,
            set,
            *r,
            *budget,
            CurveGrid {
                s_min: *s_min,
                step: *step,
                comparability: *comparability,
                total_budget: None,
            },
            &mut sink,
        )?,
        Command::Lipgraph { family, r, budget, lip_budget, target_lambda } => {
            exec_lipgraph(cfg, family, *r, *budget, *lip_budget, *target_lambda, &mut sink)?
        }
    }
    let manifest = json!({
        "config_hash": hash,
        "seed": cfg.seed,
        "versions": { "heis": env!("CARGO_PKG_VERSION") },
        "wall_time": start.elapsed().as_secs_f64(),
    });
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Invalid(format!("cannot serialize manifest: {e}")))?;
    sink.write_raw("manifest.json", &format!("{text}\n"))?;
    let mut stdout = sink.lines.join("\n");
    stdout.push('\n');
    Ok(RunOutput { files: sink.files, stdout })
}

fn exec_ball(radius: u32, lattice: &str, budget: usize, sink: &mut Sink) -> Result<(), CliError> {
    let (rows, dists): (Vec<String>, Vec<u32>) = match parse_lattice(lattice)? {
        Lattice::H5 => {
            let ball = word_ball::<DiscretePoint>(radius, budget)?;
            ball.members_sorted()
                .into_iter()
                .map(|(p, d)| (format!("{},{},{},{},{},{d}", p.a, p.b, p.c, p.d, p.e), d))
                .unzip()
        }
        Lattice::H3 => {
            let ball = word_ball::<DiscretePoint3>(radius, budget)?;
            ball.members_sorted()
                .into_iter()
                .map(|(p, d)| (format!("{},0,{},0,{},{d}", p.a, p.c, p.e), d))
                .unzip()
        }
    };
    sink.write_csv("ball.csv", "a,b,c,d,e,dist", &rows)?;
    let mut counts = vec![0u64; radius as usize + 1];
    for d in dists {
        counts[d as usize] += 1;
    }
    let mut total = 0;
    for (r, count) in counts.iter().enumerate() {
        total += count;
        sink.say(format!("radius {r} size {total}"));
    }
    Ok(())
}

fn exec_perimeter(source: &str, sink: &mut Sink) -> Result<(), CliError> {
    let set = load_lattice_set(source)?;
    let report = set.report()?;
    sink.write_json(
        "perimeter.json",
        json!({
            "source": source,
            "size": report.size,
            "h_perim": report.h_count,
            "v_perim_lo": report.v_perimeter.lo,
            "v_perim_hi": report.v_perimeter.hi,
            "iso_ratio_lo": report.iso_ratio.lo,
            "iso_ratio_hi": report.iso_ratio.hi,
            "sup_rate_depth": report.sup_rate_depth,
            "sup_rate": report.sup_rate,
            "z_extent": report.z_extent,
        }),
    )?;
    sink.say(format!("size {}", report.size));
    sink.say(format!("h_perim {}", report.h_count));
    sink.say(format!("iso_ratio [{}, {}]", report.iso_ratio.lo, report.iso_ratio.hi));
    Ok(())
}

fn exec_iso_scan(seed: u64, sink: &mut Sink) -> Result<(), CliError> {
    let spec = CorpusSpec { seed, ..CorpusSpec::default() };
    let items = corpus(&spec)?;
    let rows = scan(&items);
    let csv: Vec<String> = rows.iter().map(ScanRow::to_csv).collect();
    sink.write_csv("scan.csv", ScanRow::CSV_HEADER, &csv)?;
    let max_ratio = rows.iter().map(|r| r.ratio_hi).fold(f64::NEG_INFINITY, f64::max);
    sink.say(format!("rows {}", rows.len()));
    sink.say(format!("max_iso_ratio {max_ratio}"));
    Ok(())
}

fn exec_poincare(phi: &str, p: f64, sink: &mut Sink) -> Result<(), CliError> {
    let text = read_file(phi)?;
    let (domain, vectors) = parse_phi_file(&text)?;
    let embedding = VectorEmbedding::new(domain, vectors)?;
    let report = poincare::report(&embedding, p)?;
    let value = serde_json::to_value(&report)
        .map_err(|e| CliError::Invalid(format!("cannot serialize report: {e}")))?;
    sink.write_json("poincare.json", value)?;
    sink.say(format!("lhs [{}, {}]", report.lhs_lo, report.lhs_hi));
    sink.say(format!("rhs {}", report.rhs));
    match report.ratio {
        Some(ratio) => sink.say(format!("ratio {ratio}")),
        None => sink.say("ratio undefined (zero right-hand side)".into()),
    }
    Ok(())
}

fn exec_criterion(omega: &str, r: f64, cutoff: f64, sink: &mut Sink) -> Result<(), CliError> {
    let modulus = parse_omega(omega)?;
    let value = integral_criterion(&modulus, r, cutoff)?;
    sink.write_json(
        "criterion.json",
        json!({ "omega": omega, "r": r, "cutoff": cutoff, "value": value }),
    )?;
    sink.say(format!("criterion {value}"));
    Ok(())
}

fn exec_c1(metric: &str, semimetric: bool, sink: &mut Sink) -> Result<(), CliError> {
    let text = read_file(metric)?;
    let metric = FiniteMetric::from_text(&text, semimetric)?;
    let cert = embed::c1_exact(&metric)?;
    let value = serde_json::to_value(&cert)
        .map_err(|e| CliError::Invalid(format!("cannot serialize certificate: {e}")))?;
    sink.write_json("certificate.json", value)?;
    sink.say(format!("c1 {}", cert.c1));
    Ok(())
}

fn exec_negtype(metric: &str, semimetric: bool, sink: &mut Sink) -> Result<(), CliError> {
    let text = read_file(metric)?;
    let metric = FiniteMetric::from_text(&text, semimetric)?;
    let verdict = embed::is_negative_type(&metric);
    let (flag, witness, value) = match verdict {
        NegativeType::Yes => (true, Value::Null, Value::Null),
        NegativeType::No { witness, value } => (false, json!(witness), json!(value)),
    };
    sink.write_json(
        "negtype.json",
        json!({
            "n": metric.n(),
            "negative_type": flag,
            "witness": witness,
            "witness_value": value,
        }),
    )?;
    sink.say(format!("negative_type {flag}"));
    Ok(())
}

fn exec_gap(instance: &str, sink: &mut Sink) -> Result<(), CliError> {
    let text = read_file(instance)?;
    let inst = Instance::from_text(&text)?;
    let report = sdp::integrality_gap(&inst)?;
    let value = serde_json::to_value(&report)
        .map_err(|e| CliError::Invalid(format!("cannot serialize report: {e}")))?;
    sink.write_json("gap.json", value)?;
    sink.say(format!("lp {}", report.lp));
    sink.say(format!("sdp {}", report.sdp));
    sink.say(format!("opt {}", report.opt));
    sink.say(format!("gap {}", report.gap));
    Ok(())
}

fn exec_heis_gap(
    radius: u32,
    lattice: &str,
    transform: &str,
    sink: &mut Sink,
) -> Result<(), CliError> {
    let lattice = parse_lattice(lattice)?;
    let transform = parse_transform(transform)?;
    let report = sdp::heis_instance(lattice, radius, transform)?;
    sink.write_json(
        "heis_gap.json",
        json!({
            "lattice": report.lattice,
            "radius": report.radius,
            "transform": report.transform,
            "n": report.metric.n(),
            "metric": report.metric.matrix(),
            "negative_type": report.negative_type,
            "witness_value": report.witness_value,
            "c1": report.c1,
            "instance": report.instance,
            "gap": report.gap,
        }),
    )?;
    sink.say(format!("n {}", report.metric.n()));
    sink.say(format!("negative_type {}", report.negative_type));
    if let Some(c1) = report.c1 {
        sink.say(format!("c1 {c1}"));
    }
    if let Some(gap) = &report.gap {
        sink.say(format!("gap {}", gap.gap));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn exec_vbar(
    cfg: &ExperimentConfig,
    region: &str,
    set: &str,
    r: Option<f64>,
    budget: usize,
    grid: CurveGrid,
    sink: &mut Sink,
) -> Result<(), CliError> {
    let region_spec = parse_region(region)?;
    let set_fn = parse_set(set)?;
    let r = r.unwrap_or_else(|| region_radius(&region_spec));
    let sampler = RegionSampler::with_streams(set_fn, region_spec, budget, cfg.seed, cfg.streams)?;
    let curve = continuous::vbar_l2(&sampler, r, &grid).map_err(CliError::from)?;
    sink.write_raw("curve.csv", &format!("# config_hash={}\n{}", sink.hash, curve.to_csv()))?;
    sink.write_json(
        "summary.json",
        json!({
            "l2": curve.l2,
            "l2_stderr": curve.l2_stderr,
            "tail": curve.tail,
            "s_max": curve.s_max,
            "comparability": curve.comparability,
            "seed": cfg.seed,
            "params": {
                "region": region,
                "set": set,
                "r": r,
                "budget": budget,
                "streams": cfg.streams,
            },
        }),
    )?;
    sink.say(format!("points {}", curve.s.len()));
    sink.say(format!("l2 {}", curve.l2));
    Ok(())
}

fn exec_lipgraph(
    cfg: &ExperimentConfig,
    family: &str,
    r: f64,
    budget: usize,
    lip_budget: usize,
    target_lambda: Option<f64>,
    sink: &mut Sink,
) -> Result<(), CliError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(CliError::Invalid(format!("ball radius must be positive, got {r}")));
    }
    let parsed = parse_family(family)?;
    let graph = match target_lambda {
        Some(target) => {
            let GraphFamily::Sinusoid { frequency, .. } = parsed else {
                return Err(CliError::Invalid(
                    "target_lambda calibration needs a sinusoid family".into(),
                ));
            };
            continuous::sinusoid_with_lambda(
                target,
                frequency,
                &VBox::standard(),
                lip_budget,
                cfg.seed,
            )?
        }
        None => {
            let mut graph = IntrinsicGraphFn::new(parsed)?;
            continuous::estimate_lambda(&mut graph, &VBox::standard(), lip_budget, cfg.seed)?;
            graph
        }
    };
    let lambda = graph.lambda_hat().expect("estimate ran above");
    let inflated = graph.inflated_lambda()?;
    let set: SetFn = Box::new(move |u| continuous::in_half_space(&graph, u));
    let sampler =
        RegionSampler::with_streams(set, Region::Ball { radius: r }, budget, cfg.seed, cfg.streams)?;
    let grid = CurveGrid::default();
    let curve = continuous::vbar_l2(&sampler, r, &grid).map_err(CliError::from)?;
    let normalized = curve.l2 * (1.0 - inflated) / r.powi(5);
    sink.write_raw("curve.csv", &format!("# config_hash={}\n{}", sink.hash, curve.to_csv()))?;
    sink.write_json(
        "summary.json",
        json!({
            "family": graph.describe(),
            "lambda_hat": lambda,
            "lambda_inflated": inflated,
            "r": r,
            "l2": curve.l2,
            "l2_stderr": curve.l2_stderr,
            "tail": curve.tail,
            "normalized": normalized,
            "seed": cfg.seed,
            "params": { "budget": budget, "lip_budget": lip_budget, "streams": cfg.streams },
        }),
    )?;
    sink.say(format!("lambda_hat {lambda}"));
    sink.say(format!("l2 {}", curve.l2));
    sink.say(format!("normalized {normalized}"));
    Ok(())
}

fn read_file(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {path}: {e}")))
}

// ---- argument grammars ----

pub(crate) fn parse_lattice(s: &str) -> Result<Lattice, CliError> {
    match s {
        "h3" => Ok(Lattice::H3),
        "h5" => Ok(Lattice::H5),
        other => Err(CliError::Invalid(format!("unknown lattice {other:?} (use h3 or h5)"))),
    }
}

pub(crate) fn parse_transform(s: &str) -> Result<Transform, CliError> {
    match s.split_once(':') {
        None if s == "raw" => Ok(Transform::Raw),
        None if s == "sqrt" => Ok(Transform::Sqrt),
        Some(("snowflake", eps)) => {
            let eps: f64 = eps
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad snowflake exponent {eps:?}")))?;
            Ok(Transform::Snowflake(eps))
        }
        _ => Err(CliError::Invalid(format!(
            "unknown transform {s:?} (use raw, sqrt, or snowflake:<eps>)"
        ))),
    }
}

/// `linear:D=<v>`, `power:eps=<v>,D=<v>`, or `table:<path>` where the file
/// holds `t omega(t)` pairs, one knot per line.
pub(crate) fn parse_omega(s: &str) -> Result<Modulus, CliError> {
    let Some((kind, rest)) = s.split_once(':') else {
        return Err(CliError::Invalid(format!(
            "unknown modulus {s:?} (use linear:D=.., power:eps=..,D=.., or table:<path>)"
        )));
    };
    match kind {
        "linear" => {
            let d = parse_named_value(rest, "D")?;
            Ok(Modulus::linear(d)?)
        }
        "power" => {
            let (eps_part, d_part) = rest.split_once(',').ok_or_else(|| {
                CliError::Invalid(format!("power modulus needs eps=..,D=.., got {rest:?}"))
            })?;
            let eps = parse_named_value(eps_part, "eps")?;
            let d = parse_named_value(d_part, "D")?;
            Ok(Modulus::power(eps, d)?)
        }
        "table" => {
            let text = read_file(rest)?;
            let mut knots = Vec::new();
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let mut parts = line.split_whitespace();
                let (Some(t), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(CliError::Invalid(format!(
                        "{rest}:{}: expected two numbers per knot",
                        lineno + 1
                    )));
                };
                let t: f64 = t.parse().map_err(|_| {
                    CliError::Invalid(format!("{rest}:{}: bad number {t:?}", lineno + 1))
                })?;
                let v: f64 = v.parse().map_err(|_| {
                    CliError::Invalid(format!("{rest}:{}: bad number {v:?}", lineno + 1))
                })?;
                knots.push((t, v));
            }
            Ok(Modulus::tabulated(knots)?)
        }
        other => Err(CliError::Invalid(format!("unknown modulus kind {other:?}"))),
    }
}

fn parse_named_value(part: &str, name: &str) -> Result<f64, CliError> {
    let (key, value) = part
        .split_once('=')
        .ok_or_else(|| CliError::Invalid(format!("expected {name}=<value>, got {part:?}")))?;
    if key.trim() != name {
        return Err(CliError::Invalid(format!("expected key {name}, got {key:?}")));
    }
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Invalid(format!("bad value for {name}: {value:?}")))
}

/// `zero`, `constant:<v>`, `linear:<a>,<c>,<d>,<e>`, `bump:<amp>,<width>`,
/// or `sinusoid:<amp>,<freq>`.
pub(crate) fn parse_family(s: &str) -> Result<GraphFamily, CliError> {
    match s.split_once(':') {
        None if s == "zero" => Ok(GraphFamily::Zero),
        Some(("constant", rest)) => {
            let [value] = parse_floats(rest, s)?;
            Ok(GraphFamily::Constant { value })
        }
        Some(("linear", rest)) => {
            let [a, c, d, e] = parse_floats(rest, s)?;
            Ok(GraphFamily::Linear { a, c, d, e })
        }
        Some(("bump", rest)) => {
            let [amplitude, width] = parse_floats(rest, s)?;
            Ok(GraphFamily::Bump { amplitude, width })
        }
        Some(("sinusoid", rest)) => {
            let [amplitude, frequency] = parse_floats(rest, s)?;
            Ok(GraphFamily::Sinusoid { amplitude, frequency })
        }
        _ => Err(CliError::Invalid(format!(
            "unknown graph family {s:?} (use zero, constant:v, linear:a,c,d,e, bump:amp,width, \
             or sinusoid:amp,freq)"
        ))),
    }
}

/// `ball:<r>`, `ballh3:<r>`, or `box:<h1>,<h2>,<h3>,<h4>,<hz>`.
pub(crate) fn parse_region(s: &str) -> Result<Region, CliError> {
    match s.split_once(':') {
        Some(("ball", rest)) => {
            let [radius] = parse_floats(rest, s)?;
            Ok(Region::Ball { radius })
        }
        Some(("ballh3", rest)) => {
            let [radius] = parse_floats(rest, s)?;
            Ok(Region::BallH3 { radius })
        }
        Some(("box", rest)) => {
            let half = parse_floats::<5>(rest, s)?;
            Ok(Region::Box { half })
        }
        _ => Err(CliError::Invalid(format!(
            "unknown region {s:?} (use ball:r, ballh3:r, or box:h1,h2,h3,h4,hz)"
        ))),
    }
}

/// `upper-z`, `quasiball:<r>`, or `halfspace:<graph family>`.
pub(crate) fn parse_set(s: &str) -> Result<SetFn, CliError> {
    if s == "upper-z" {
        return Ok(Box::new(|u: ContinuousPoint| u.z > 0.0));
    }
    match s.split_once(':') {
        Some(("quasiball", rest)) => {
            let [r] = parse_floats(rest, s)?;
            Ok(Box::new(move |u: ContinuousPoint| u.quasi_norm() < r))
        }
        Some(("halfspace", rest)) => {
            let graph = IntrinsicGraphFn::new(parse_family(rest)?)?;
            Ok(Box::new(move |u| continuous::in_half_space(&graph, u)))
        }
        _ => Err(CliError::Invalid(format!(
            "unknown set {s:?} (use upper-z, quasiball:r, or halfspace:<family>)"
        ))),
    }
}

fn parse_floats<const N: usize>(rest: &str, whole: &str) -> Result<[f64; N], CliError> {
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != N {
        return Err(CliError::Invalid(format!(
            "{whole:?}: expected {N} comma-separated numbers, got {}",
            parts.len()
        )));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{whole:?}: bad number {part:?}")))?;
    }
    Ok(out)
}

/// Default vertical-cutoff radius for a region: its quasi-norm circumradius.
pub(crate) fn region_radius(region: &Region) -> f64 {
    match region {
        Region::Ball { radius } | Region::BallH3 { radius } => *radius,
        Region::Box { half } => half[0] + half[1] + half[2] + half[3] + 4.0 * half[4].sqrt(),
    }
}

/// A perimeter source is either a family spec (`ball:`, `box:`, `segment:`,
/// `random:` prefixes) or a path to a file of `a b c d e` lines.
pub(crate) fn load_lattice_set(source: &str) -> Result<LatticeSet<DiscretePoint>, CliError> {
    match source.split_once(':') {
        Some(("ball", rest)) => {
            let radius: u32 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad ball radius {rest:?}")))?;
            let ball = word_ball::<DiscretePoint>(radius, BALL_NODE_BUDGET)?;
            Ok(LatticeSet::from_points(ball.members_within(radius)))
        }
        Some(("box", rest)) => {
            let sides = parse_ints::<5>(rest, source)?;
            Ok(box_set(sides[0], sides[1], sides[2], sides[3], sides[4]))
        }
        Some(("segment", rest)) => {
            let n: i64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad segment length {rest:?}")))?;
            if n <= 0 {
                return Err(CliError::Invalid(format!("segment length must be positive, got {n}")));
            }
            Ok(LatticeSet::from_points(
                (0..n).map(|e| DiscretePoint { a: 0, b: 0, c: 0, d: 0, e }),
            ))
        }
        Some(("random", rest)) => {
            let params = parse_ints::<2>(rest, source)?;
            if params[0] <= 0 || params[1] < 0 {
                return Err(CliError::Invalid(format!("bad random spec {source:?}")));
            }
            Ok(random_cellular(params[0] as usize, params[1] as u64))
        }
        _ => {
            let text = read_file(source)?;
            parse_set_file(&text, source)
        }
    }
}

fn parse_ints<const N: usize>(rest: &str, whole: &str) -> Result<[i64; N], CliError> {
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != N {
        return Err(CliError::Invalid(format!(
            "{whole:?}: expected {N} comma-separated integers, got {}",
            parts.len()
        )));
    }
    let mut out = [0i64; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{whole:?}: bad integer {part:?}")))?;
    }
    Ok(out)
}

fn parse_set_file(text: &str, path: &str) -> Result<LatticeSet<DiscretePoint>, CliError> {
    let mut points = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords: Vec<&str> = line.split_whitespace().collect();
        if coords.len() != 5 {
            return Err(CliError::Invalid(format!(
                "{path}:{}: expected five integers, got {}",
                lineno + 1,
                coords.len()
            )));
        }
        let mut v = [0i64; 5];
        for (slot, part) in v.iter_mut().zip(&coords) {
            *slot = part.parse().map_err(|_| {
                CliError::Invalid(format!("{path}:{}: bad integer {part:?}", lineno + 1))
            })?;
        }
        points.push(DiscretePoint { a: v[0], b: v[1], c: v[2], d: v[3], e: v[4] });
    }
    Ok(LatticeSet::from_points(points))
}

/// Embedding file: one `a b c d e : v1 v2 ...` line per domain point.
pub(crate) fn parse_phi_file(
    text: &str,
) -> Result<(Vec<DiscretePoint>, Vec<Vec<f64>>), CliError> {
    let mut domain = Vec::new();
    let mut vectors = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (coords, vec_part) = line.split_once(':').ok_or_else(|| {
            CliError::Invalid(format!("line {}: expected `a b c d e : v1 v2 ...`", lineno + 1))
        })?;
        let ints: Vec<&str> = coords.split_whitespace().collect();
        if ints.len() != 5 {
            return Err(CliError::Invalid(format!(
                "line {}: expected five point coordinates, got {}",
                lineno + 1,
                ints.len()
            )));
        }
        let mut v = [0i64; 5];
        for (slot, part) in v.iter_mut().zip(&ints) {
            *slot = part.parse().map_err(|_| {
                CliError::Invalid(format!("line {}: bad integer {part:?}", lineno + 1))
            })?;
        }
        domain.push(DiscretePoint { a: v[0], b: v[1], c: v[2], d: v[3], e: v[4] });
        let mut entries = Vec::new();
        for part in vec_part.split_whitespace() {
            entries.push(part.parse().map_err(|_| {
                CliError::Invalid(format!("line {}: bad number {part:?}", lineno + 1))
            })?);
        }
        if entries.is_empty() {
            return Err(CliError::Invalid(format!(
                "line {}: empty embedding vector",
                lineno + 1
            )));
        }
        vectors.push(entries);
    }
    Ok((domain, vectors))
}
