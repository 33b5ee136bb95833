//! The `qnetfid` command line: `generate`, `compute` and `sweep`.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 graph validation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use crate::analytic::{self, parse_exact};
use crate::error::{Error, Result};
use crate::fidelity;
use crate::network::{self, Family, Network, TopologySpec, WeightAssignment};
use crate::scenarios::{
    self, PlacementMode, RNG_ALGORITHM, DEFAULT_EXHAUSTIVE_CAP,
};
use crate::sweep::{format_sig, SweepResult, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_GRAPH: i32 = 4;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "QNETFID_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qnetfid", version, about = "Average maximum teleportation fidelity of Werner-state repeater networks")]
pub struct Cli {
    /// Worker threads (0 = all cores). Falls back to QNETFID_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a canonical topology as an edge-list file.
    Generate(GenerateArgs),
    /// Compute F^max_avg for one network.
    Compute(ComputeArgs),
    /// Parameter sweeps and figure presets, written as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct TopologyArgs {
    /// chain, star, flower, ring or complete (flower<k> also accepted).
    #[arg(long)]
    pub family: Option<String>,
    /// Node count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Flower index k (0 = chain shape, N-3 = star shape).
    #[arg(long)]
    pub k: Option<usize>,
}

impl TopologyArgs {
    fn family(&self) -> Result<Option<Family>> {
        let Some(name) = &self.family else { return Ok(None) };
        if name.trim().eq_ignore_ascii_case("flower") {
            return match self.k {
                Some(k) => Ok(Some(Family::Flower(k))),
                None => Err(Error::param("flower needs --k")),
            };
        }
        let family: Family = name.parse()?;
        Ok(Some(match (family, self.k) {
            (Family::Flower(_), Some(k)) => Family::Flower(k),
            (other, _) => other,
        }))
    }

    fn spec(&self) -> Result<TopologySpec> {
        let family = self.family()?.ok_or_else(|| Error::param("--family is required"))?;
        let n = self.n.ok_or_else(|| Error::param("--n is required"))?;
        let spec = TopologySpec::new(family, n);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub topology: TopologyArgs,
    /// Uniform link weight.
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma-separated per-link weights in generation order.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Comma-separated indices of links that are maximally entangled (weight 1).
    #[arg(long, value_delimiter = ',')]
    pub me_links: Option<Vec<usize>>,
    /// Output file (stdout if omitted).
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioKind {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Placement {
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Edge-list file to evaluate instead of a generated family.
    #[arg(long, conflicts_with_all = ["family", "n", "k"])]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub topology: TopologyArgs,
    /// A: uniform p. B: M ME links, rest p. C: i.i.d. uniform weights.
    /// Without it, a --graph file is evaluated with its own weights.
    #[arg(long, value_enum, ignore_case = true)]
    pub scenario: Option<ScenarioKind>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of ME links (Scenario B).
    #[arg(long, conflicts_with = "m")]
    pub m_links: Option<usize>,
    /// Fraction of ME links (Scenario B), rounded to the nearest count.
    #[arg(long)]
    pub m: Option<f64>,
    /// Placement averaging for Scenario B (default: exhaustive when C(L,M) <= 1e6).
    #[arg(long, value_enum)]
    pub placement: Option<Placement>,
    /// Sample count for Scenario C or sampled placements.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print every pair's best path and fidelity.
    #[arg(long)]
    pub pairs: bool,
    /// Print the effective path length.
    #[arg(long)]
    pub eff_length: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    P,
    M,
    #[value(name = "N", alias = "n")]
    N,
    D,
    PmGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3def,
    Fig4,
    Fig5,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Figure preset; explicit flags override its parameters.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum, ignore_case = true)]
    pub kind: Option<SweepKind>,
    /// Families; repeat or comma-separate (e.g. chain,flower3,star).
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Fraction of ME links.
    #[arg(long)]
    pub m: Option<f64>,
    /// Node counts for N sweeps.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, default_value_t = 101)]
    pub p_steps: usize,
    #[arg(long, default_value_t = 101)]
    pub m_steps: usize,
    #[arg(long, default_value_t = 30.0)]
    pub d_min: f64,
    #[arg(long, default_value_t = 150.0)]
    pub d_max: f64,
    #[arg(long, default_value_t = 10.0)]
    pub d_step: f64,
    /// Fibre attenuation in dB/km.
    #[arg(long, default_value_t = 0.46)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_det: f64,
    #[arg(long, value_enum)]
    pub placement: Option<Placement>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path (stdout if omitted). Written atomically.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Leave the timestamp out of the metadata, for byte-identical reruns.
    #[arg(long)]
    pub no_timestamp: bool,
}

/// Runs the CLI on the process arguments.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_from(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI on explicit arguments (first item is the program name).
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let command_line = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let threads = cli.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    let mut buffer = Vec::new();
    let result = pool.install(|| match &cli.command {
        Command::Generate(args) => cmd_generate(args, &mut buffer),
        Command::Compute(args) => cmd_compute(args, &mut buffer),
        Command::Sweep(args) => cmd_sweep(args, &format!("qnetfid {command_line}"), &mut buffer),
    });
    let result = result.and_then(|()| emit(out, &String::from_utf8_lossy(&buffer)));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        e if e.is_graph_validation() => EXIT_GRAPH,
        _ => EXIT_USAGE,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
}

pub fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let spec = args.topology.spec()?;
    let links = spec.link_count().expect("canonical family");
    let weights = match (&args.weights, &args.me_links, args.p) {
        (Some(w), None, None) => WeightAssignment::PerLink(w.clone()),
        (None, Some(me), p) => {
            let mut mask = vec![false; links];
            for &i in me {
                if i >= links {
                    return Err(Error::param(format!("ME link index {i} out of range 0..{links}")));
                }
                mask[i] = true;
            }
            WeightAssignment::MeMask { me: mask, p: p.unwrap_or(1.0) }
        }
        (None, None, Some(p)) => WeightAssignment::Uniform(p),
        (None, None, None) => WeightAssignment::Uniform(1.0),
        _ => return Err(Error::param("--weights cannot be combined with --p or --me-links")),
    };
    let net = network::generate(&spec, &weights)?;
    match &args.output {
        Some(path) => network::save_edge_list(&net, path),
        None => emit(out, &network::format_edge_list(&net)),
    }
}

fn require_p(p: Option<f64>) -> Result<f64> {
    p.ok_or_else(|| Error::param("--p is required for scenarios A and B"))
}

pub fn cmd_compute(args: &ComputeArgs, out: &mut dyn Write) -> Result<()> {
    let spec = match &args.graph {
        Some(path) => TopologySpec::new(Family::Custom(path.clone()), 0),
        None => args.topology.spec()?,
    };
    let base = scenarios::base_network(&spec)?;
    let scenario = match (args.scenario, &args.graph) {
        (Some(s), _) => s,
        (None, Some(_)) if args.p.is_none() => return compute_as_loaded(args, &spec, &base, out),
        _ => ScenarioKind::A,
    };
    match scenario {
        ScenarioKind::A => compute_a(args, &spec, &base, require_p(args.p)?, out),
        ScenarioKind::B => compute_b(args, &spec, &base, out),
        ScenarioKind::C => compute_c(args, &spec, &base, out),
    }
}

struct Report {
    lines: Vec<(String, String)>,
    json: serde_json::Map<String, serde_json::Value>,
}

impl Report {
    fn new(spec: &TopologySpec, net: &Network) -> Self {
        let mut r = Report { lines: Vec::new(), json: serde_json::Map::new() };
        r.put("topology", spec.to_string(), serde_json::json!(spec.to_string()));
        r.json.insert("nodes".into(), net.node_count().into());
        r.json.insert("links".into(), net.edge_count().into());
        r
    }

    fn put(&mut self, key: &str, text: String, json: serde_json::Value) {
        self.lines.push((key.to_string(), text));
        self.json.insert(key.to_string(), json);
    }

    fn render(self, format: OutputFormat, pairs: Option<&[fidelity::PairFidelity]>) -> String {
        match format {
            OutputFormat::Json => {
                let mut json = self.json;
                if let Some(pairs) = pairs {
                    json.insert("pairs".into(), serde_json::to_value(pairs).unwrap_or_default());
                }
                format!("{}\n", serde_json::Value::Object(json))
            }
            OutputFormat::Text => {
                let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                let mut s = String::new();
                for (k, v) in &self.lines {
                    s.push_str(&format!("{k:<width$}  {v}\n"));
                }
                if let Some(pairs) = pairs {
                    s.push_str("source target fidelity product path\n");
                    for r in pairs {
                        let path = r.best_path.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
                        s.push_str(&format!(
                            "{} {} {:.6} {} {}\n",
                            r.source,
                            r.target,
                            r.fidelity,
                            format_sig(r.product, 12),
                            path
                        ));
                    }
                }
                s
            }
            OutputFormat::Csv => match pairs {
                Some(pairs) => pairs_table(pairs).to_csv(),
                None => {
                    let mut t = SweepResult::new(self.lines.iter().map(|(k, _)| k.clone()));
                    let row = self.lines.into_iter().map(|(_, v)| Value::Text(v)).collect();
                    t.push(row).expect("one cell per column");
                    t.to_csv()
                }
            },
        }
    }
}

fn pairs_table(pairs: &[fidelity::PairFidelity]) -> SweepResult {
    let mut t = SweepResult::new(["source", "target", "fidelity", "product", "path"]);
    for r in pairs {
        let path = r.best_path.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
        t.push(vec![r.source.into(), r.target.into(), r.fidelity.into(), r.product.into(), path.into()])
            .expect("five cells");
    }
    t
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn exact_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn add_engine_fields(report: &mut Report, args: &ComputeArgs, net: &Network) -> Result<Option<Vec<fidelity::PairFidelity>>> {
    let nf = fidelity::average_max_fidelity(net)?;
    report.put("F_max_avg", fmt6(nf.avg_max_fidelity), nf.avg_max_fidelity.into());
    if args.eff_length {
        let len = fidelity::effective_path_length(net);
        report.put("eff_length", format_sig(len, 12), len.into());
    }
    Ok(args.pairs.then_some(nf.pair_records))
}

fn compute_as_loaded(args: &ComputeArgs, spec: &TopologySpec, net: &Network, out: &mut dyn Write) -> Result<()> {
    let mut report = Report::new(spec, net);
    report.put("scenario", "as loaded".into(), "as-loaded".into());
    let pairs = add_engine_fields(&mut report, args, net)?;
    emit(out, &report.render(args.format, pairs.as_deref()))
}

fn compute_a(args: &ComputeArgs, spec: &TopologySpec, base: &Network, p: f64, out: &mut dyn Write) -> Result<()> {
    let net = base.reweighted(&vec![p; base.edge_count()])?;
    let mut report = Report::new(spec, &net);
    report.put("scenario", format!("A (p = {p})"), "A".into());
    report.json.insert("p".into(), p.into());
    let pairs = add_engine_fields(&mut report, args, &net)?;
    let engine = fidelity::average_max_fidelity_value(&net)?;
    if let Some(analytic) = analytic::scenario_a(spec, p).transpose()? {
        let diff = (analytic - engine).abs();
        let exact = parse_exact(&p.to_string())
            .ok()
            .and_then(|q| analytic::scenario_a(spec, q).and_then(|r| r.ok()));
        let text = match &exact {
            Some(q) => format!("{} = {}, diff {}", exact_string(q), fmt6(analytic), format_sig(diff, 3)),
            None => format!("{}, diff {}", fmt6(analytic), format_sig(diff, 3)),
        };
        report.put("analytic", text, analytic.into());
        report.json.insert("analytic_diff".into(), diff.into());
        if let Some(q) = exact {
            report.json.insert("analytic_exact".into(), exact_string(&q).into());
        }
    }
    emit(out, &report.render(args.format, pairs.as_deref()))
}

fn default_placement(links: usize, m: usize, placement: Option<Placement>, samples: Option<u64>) -> PlacementMode {
    let sampled = PlacementMode::Sample(samples.unwrap_or(1000));
    match placement {
        Some(Placement::Sample) => sampled,
        Some(Placement::Exhaustive) => PlacementMode::Exhaustive,
        None => match scenarios::binomial_u128(links as u64, m as u64) {
            Some(c) if c <= DEFAULT_EXHAUSTIVE_CAP as u128 => PlacementMode::Exhaustive,
            _ => sampled,
        },
    }
}

fn me_links(m_links: Option<usize>, m: Option<f64>, links: usize) -> Result<usize> {
    match (m_links, m) {
        (Some(count), _) => Ok(count),
        (None, Some(frac)) => scenarios::me_count(frac, links),
        (None, None) => Err(Error::param("Scenario B needs --m-links or --m")),
    }
}

fn compute_b(args: &ComputeArgs, spec: &TopologySpec, base: &Network, out: &mut dyn Write) -> Result<()> {
    let p = require_p(args.p)?;
    let links = base.edge_count();
    let m = me_links(args.m_links, args.m, links)?;
    let mode = default_placement(links, m, args.placement, args.samples);
    let est = scenarios::run_scenario_b(spec, p, m, mode, args.seed)?;
    let mut report = Report::new(spec, base);
    report.put("scenario", format!("B (p = {p}, M = {m} of {links})"), "B".into());
    report.json.insert("p".into(), p.into());
    report.json.insert("M".into(), m.into());
    let e = &est.estimate;
    report.put("F_max_avg", fmt6(e.mean), e.mean.into());
    let mode_text = match mode {
        PlacementMode::Exhaustive => format!("exhaustive, {} placements", e.sample_count),
        PlacementMode::Sample(s) => format!("sampled, {s} placements, seed {}", args.seed),
    };
    report.put("placements", mode_text, e.sample_count.into());
    report.put("envelope", format!("[{}, {}]", fmt6(e.min), fmt6(e.max)), serde_json::json!([e.min, e.max]));
    report.put("std_dev", format_sig(e.std_dev, 6), e.std_dev.into());
    report.put("std_error", format_sig(e.std_error, 6), e.std_error.into());
    report.put(
        "pair_range",
        format!("[{}, {}]", fmt6(est.min_pair_fidelity), fmt6(est.max_pair_fidelity)),
        serde_json::json!([est.min_pair_fidelity, est.max_pair_fidelity]),
    );
    match est.analytic {
        Some(a) => report.put("analytic", format!("{}, diff {}", fmt6(a), format_sig((a - e.mean).abs(), 3)), a.into()),
        None => report.put("analytic", "none (numeric-only)".into(), serde_json::Value::Null),
    }
    if let PlacementMode::Sample(_) = mode {
        report.json.insert("rng".into(), RNG_ALGORITHM.into());
        report.json.insert("seed".into(), args.seed.into());
    }
    emit(out, &report.render(args.format, None))
}

fn compute_c(args: &ComputeArgs, spec: &TopologySpec, base: &Network, out: &mut dyn Write) -> Result<()> {
    let samples = args.samples.unwrap_or_else(|| scenarios::default_scenario_c_samples(base.node_count()));
    let m = match (args.m_links, args.m) {
        (None, None) => 0,
        (m_links, m) => me_links(m_links, m, base.edge_count())?,
    };
    let est = scenarios::run_scenario_c_with_me(spec, m, samples, args.seed)?;
    let mut report = Report::new(spec, base);
    report.put("scenario", format!("C (iid uniform weights, M = {m})"), "C".into());
    report.put("F_max_avg", fmt6(est.mean), est.mean.into());
    report.put("std_error", format_sig(est.std_error, 6), est.std_error.into());
    report.put("samples", samples.to_string(), samples.into());
    report.put("range", format!("[{}, {}]", fmt6(est.min), fmt6(est.max)), serde_json::json!([est.min, est.max]));
    report.put("seed", args.seed.to_string(), args.seed.into());
    report.put("rng", RNG_ALGORITHM.into(), RNG_ALGORITHM.into());
    emit(out, &report.render(args.format, None))
}

struct SweepPlan {
    kind: SweepKind,
    families: Vec<Family>,
    n: Option<usize>,
    p: Option<f64>,
    m: Option<f64>,
    n_list: Vec<usize>,
}

fn parse_families(names: &[String], k: Option<usize>) -> Result<Vec<Family>> {
    names
        .iter()
        .map(|name| {
            let topo = TopologyArgs { family: Some(name.clone()), n: None, k };
            topo.family().map(|f| f.expect("name given"))
        })
        .collect()
}

fn preset_plan(preset: Preset) -> SweepPlan {
    let trio = |k| vec![Family::Chain, Family::Flower(k), Family::Star];
    let plan = |kind, families, n: Option<usize>, p, m| SweepPlan { kind, families, n, p, m, n_list: Vec::new() };
    match preset {
        Preset::Fig2 => plan(SweepKind::M, Vec::new(), Some(7), Some(0.5), None),
        Preset::Fig3a => plan(SweepKind::P, trio(3), Some(10), None, None),
        Preset::Fig3b => plan(SweepKind::M, trio(3), Some(10), Some(0.5), None),
        Preset::Fig3c => plan(SweepKind::M, trio(3), Some(10), None, None),
        Preset::Fig3def => plan(SweepKind::PmGrid, trio(48), Some(100), None, None),
        Preset::Fig4 => SweepPlan {
            kind: SweepKind::N,
            families: vec![Family::Chain, Family::Star],
            n: None,
            p: None,
            m: None,
            n_list: vec![10, 20, 50, 100, 200, 500, 1000],
        },
        Preset::Fig5 => plan(
            SweepKind::D,
            vec![Family::Chain, Family::Star, Family::Ring, Family::Complete],
            Some(8),
            None,
            None,
        ),
    }
}

pub fn cmd_sweep(args: &SweepArgs, command_line: &str, out: &mut dyn Write) -> Result<()> {
    let mut plan = match (args.preset, args.kind) {
        (Some(preset), _) => preset_plan(preset),
        (None, Some(kind)) => SweepPlan { kind, families: Vec::new(), n: None, p: None, m: None, n_list: Vec::new() },
        (None, None) => return Err(Error::param("sweep needs --preset or --kind")),
    };
    if let (Some(_), Some(kind)) = (args.preset, args.kind) {
        if kind != plan.kind {
            return Err(Error::param("--kind conflicts with the preset"));
        }
    }
    if !args.family.is_empty() {
        plan.families = parse_families(&args.family, args.k)?;
    }
    plan.n = args.n.or(plan.n);
    plan.p = args.p.or(plan.p);
    plan.m = args.m.or(plan.m);
    if let Some(list) = &args.n_list {
        plan.n_list = list.clone();
    }

    let table = match (args.preset, plan.kind) {
        (Some(Preset::Fig2), _) => sweep_fig2(&plan, args)?,
        (Some(Preset::Fig3c), _) => sweep_scenario_c_m(&plan, args)?,
        (Some(Preset::Fig4), _) if args.p.is_none() && args.m.is_none() => sweep_fig4_cases(&plan, args)?,
        (_, SweepKind::P) => sweep_p(&plan, args)?,
        (_, SweepKind::M) => sweep_m(&plan, args)?,
        (_, SweepKind::N) => sweep_n(&plan, args)?,
        (_, SweepKind::D) => sweep_d(&plan, args)?,
        (_, SweepKind::PmGrid) => sweep_pm(&plan, args)?,
    };

    let mut table = table
        .with_meta("command", command_line)
        .with_meta("seed", args.seed)
        .with_meta("version", concat!("qnetfid ", env!("CARGO_PKG_VERSION")))
        .with_meta("rng", RNG_ALGORITHM);
    if !args.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        table = table.with_meta("timestamp_unix", secs);
    }
    let text = match args.format {
        OutputFormat::Json => format!("{}\n", table.to_json()),
        _ => table.to_csv(),
    };
    match &args.output {
        Some(path) => crate::io::write_atomic(path, text.as_bytes()),
        None => emit(out, &text),
    }
}

fn need_families(plan: &SweepPlan) -> Result<&[Family]> {
    if plan.families.is_empty() {
        return Err(Error::param("--family is required"));
    }
    Ok(&plan.families)
}

fn need_n(plan: &SweepPlan) -> Result<usize> {
    plan.n.ok_or_else(|| Error::param("--n is required"))
}

fn spec_for(family: &Family, n: usize) -> Result<TopologySpec> {
    let spec = TopologySpec::new(family.clone(), n);
    spec.validate()?;
    Ok(spec)
}

fn sweep_p(plan: &SweepPlan, args: &SweepArgs) -> Result<SweepResult> {
    let n = need_n(plan)?;
    let mut table = SweepResult::new(["topology", "N", "p", "F_avg", "F_analytic", "abs_diff"]);
    for family in need_families(plan)? {
        let spec = spec_for(family, n)?;
        let base = scenarios::base_network(&spec)?;
        for p in scenarios::unit_grid(args.p_steps) {
            let f = fidelity::average_max_fidelity_value(&base.reweighted(&vec![p; base.edge_count()])?)?;
            let a = analytic::scenario_a(&spec, p).transpose()?;
            table.push(vec![
                family.to_string().into(),
                n.into(),
                p.into(),
                f.into(),
                a.into(),
                a.map(|a| (a - f).abs()).into(),
            ])?;
        }
    }
    Ok(table)
}

const M_COLUMNS: [&str; 14] = [
    "topology",
    "N",
    "avg_path_length",
    "p",
    "M",
    "m",
    "F_mean",
    "F_min",
    "F_max",
    "F_std_dev",
    "F_std_error",
    "F_analytic",
    "placements",
    "avg_advantage",
];

fn m_sweep_rows(table: &mut SweepResult, spec: &TopologySpec, p: f64, args: &SweepArgs) -> Result<()> {
    let base = scenarios::base_network(spec)?;
    let links = base.edge_count();
    let avg_len = base.average_path_length();
    for m in 0..=links {
        let mode = default_placement(links, m, args.placement, args.samples);
        let est = scenarios::run_scenario_b(spec, p, m, mode, args.seed)?;
        let e = est.estimate;
        table.push(vec![
            spec.family.to_string().into(),
            base.node_count().into(),
            avg_len.into(),
            p.into(),
            m.into(),
            (m as f64 / links as f64).into(),
            e.mean.into(),
            e.min.into(),
            e.max.into(),
            e.std_dev.into(),
            e.std_error.into(),
            est.analytic.into(),
            match mode {
                PlacementMode::Exhaustive => format!("exhaustive:{}", e.sample_count),
                PlacementMode::Sample(s) => format!("sample:{s}"),
            }
            .into(),
            (e.mean > scenarios::CLASSICAL_FIDELITY).into(),
        ])?;
    }
    Ok(())
}

fn sweep_m(plan: &SweepPlan, args: &SweepArgs) -> Result<SweepResult> {
    let n = need_n(plan)?;
    let p = plan.p.ok_or_else(|| Error::param("--p is required"))?;
    let mut table = SweepResult::new(M_COLUMNS);
    for family in need_families(plan)? {
        m_sweep_rows(&mut table, &spec_for(family, n)?, p, args)?;
    }
    Ok(table)
}

/// Seven-node chain → flowers → star at p = 1/2 for every M, plus Scenario C.
fn sweep_fig2(plan: &SweepPlan, args: &SweepArgs) -> Result<SweepResult> {
    let n = need_n(plan)?;
    let p = plan.p.unwrap_or(0.5);
    let families: Vec<Family> = if plan.families.is_empty() {
        let mut f = vec![Family::Chain];
        f.extend((1..=n.saturating_sub(4)).map(Family::Flower));
        f.push(Family::Star);
        f
    } else {
        plan.families.clone()
    };
    let mut columns: Vec<&str> = vec!["scenario"];
    columns.extend(M_COLUMNS);
    let mut table = SweepResult::new(columns);
    let samples = args.samples.unwrap_or_else(|| scenarios::default_scenario_c_samples(n));
    for family in &families {
        let spec = spec_for(family, n)?;
        let mut b = SweepResult::new(M_COLUMNS);
        m_sweep_rows(&mut b, &spec, p, args)?;
        for row in b.rows {
            let mut full = vec![Value::from("B")];
            full.extend(row);
            table.push(full)?;
        }
        let base = scenarios::base_network(&spec)?;
        let c = scenarios::run_scenario_c(&spec, samples, args.seed)?;
        table.push(vec![
            "C".into(),
            family.to_string().into(),
            n.into(),
            base.average_path_length().into(),
            Value::Missing,
            Value::Missing,
            Value::Missing,
            c.mean.into(),
            c.min.into(),
            c.max.into(),
            c.std_dev.into(),
            c.std_error.into(),
            Value::Missing,
            format!("sample:{samples}").into(),
            (c.mean > scenarios::CLASSICAL_FIDELITY).into(),
        ])?;
    }
    Ok(table)
}

/// Scenario C with a growing number of randomly placed ME links.
fn sweep_scenario_c_m(plan: &SweepPlan, args: &SweepArgs) -> Result<SweepResult> {
    let n = need_n(plan)?;
    let samples = args.samples.unwrap_or_else(|| scenarios::default_scenario_c_samples(n));
    let mut table = SweepResult::new(["topology", "N", "M", "m", "F_mean", "F_std_error", "F_min", "F_max", "samples"]);
    for family in need_families(plan)? {
        let spec = spec_for(family, n)?;
        let links = spec.link_count().expect("canonical");
        for m in 0..=links {
            let e = scenarios::run_scenario_c_with_me(&spec, m, samples, args.seed)?;
            table.push(vec![
                family.to_string().into(),
                n.into(),
                m.into(),
                (m as f64 / links as f64).into(),
                e.mean.into(),
                e.std_error.into(),
                e.min.into(),
                e.max.into(),
                (samples as usize).into(),
            ])?;
        }
    }
    Ok(table)
}

const NUMERIC_MAX_N: usize = 100;
const NUMERIC_SAMPLES: u64 = 32;

fn sweep_n(plan: &SweepPlan, args: &SweepArgs) -> Result<SweepResult> {
    let p = plan.p.ok_or_else(|| Error::param("--p is required"))?;
    let m = plan.m.unwrap_or(0.0);
    if plan.n_list.is_empty() {
        return Err(Error::param("--n-list is required"));
    }
    let samples = args.samples.unwrap_or(NUMERIC_SAMPLES);
    let mut table: Option<SweepResult> = None;
    for family in need_families(plan)? {
        let t = scenarios::large_n_table(family, p, m, &plan.n_list, NUMERIC_MAX_N, samples, args.seed)?;
        match &mut table {
            Some(acc) => acc.extend(t)?,
            None => table = Some(t),
        }
    }
    Ok(table.expect("at least one family"))
}

/// The four benchmark (p, m) combinations for chain and star.
fn sweep_fig4_cases(plan: &SweepPlan, args: &SweepArgs) -> Result<SweepResult> {
    let mut table: Option<SweepResult> = None;
    for (p, m) in [(0.5, 0.6), (0.9, 0.6), (0.5, 0.5), (0.5, 0.9)] {
        let case = SweepPlan {
            kind: SweepKind::N,
            families: plan.families.clone(),
            n: None,
            p: Some(p),
            m: Some(m),
            n_list: plan.n_list.clone(),
        };
        let t = sweep_n(&case, args)?;
        match &mut table {
            Some(acc) => acc.extend(t)?,
            None => table = Some(t),
        }
    }
    Ok(table.expect("four cases"))
}

fn sweep_d(plan: &SweepPlan, args: &SweepArgs) -> Result<SweepResult> {
    let n = need_n(plan)?;
    if args.d_step.is_nan() || args.d_step <= 0.0 || args.d_max < args.d_min {
        return Err(Error::param("distance range needs d_step > 0 and d_max >= d_min"));
    }
    let steps = ((args.d_max - args.d_min) / args.d_step + 1e-9).floor() as usize;
    let distances: Vec<f64> = (0..=steps).map(|i| args.d_min + i as f64 * args.d_step).collect();
    let families = need_families(plan)?;
    for f in families {
        spec_for(f, n)?;
    }
    scenarios::decoherence_sweep(families, n, args.alpha, args.p_det, &distances)
}

fn sweep_pm(plan: &SweepPlan, args: &SweepArgs) -> Result<SweepResult> {
    let n = need_n(plan)?;
    let mode = match args.placement {
        Some(Placement::Exhaustive) => PlacementMode::Exhaustive,
        _ => PlacementMode::Sample(args.samples.unwrap_or(64)),
    };
    let p_grid = scenarios::unit_grid(args.p_steps);
    let m_grid = scenarios::unit_grid(args.m_steps);
    let mut table: Option<SweepResult> = None;
    for family in need_families(plan)? {
        let t = scenarios::advantage_region(&spec_for(family, n)?, &p_grid, &m_grid, mode, args.seed)?;
        match &mut table {
            Some(acc) => acc.extend(t)?,
            None => table = Some(t),
        }
    }
    Ok(table.expect("at least one family"))
}

/// Path helper for callers that want the CLI's atomic write.
pub fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    crate::io::write_atomic(path, bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_from(std::iter::once("qnetfid").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn generate_to_stdout() {
        let (code, out, _) = run(&["generate", "--family", "chain", "--n", "4", "--p", "0.5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "4\n0 1 0.5\n1 2 0.5\n2 3 0.5\n");
    }

    #[test]
    fn generate_invalid_ring_is_usage_error() {
        let (code, _, err) = run(&["generate", "--family", "ring", "--n", "2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("ring"), "{err}");
    }

    #[test]
    fn compute_star_table_value() {
        let (code, out, _) = run(&["compute", "--family", "star", "--n", "4", "--scenario", "A", "--p", "0.5"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("0.687500"), "{out}");
        assert!(out.contains("11/16 = 0.687500, diff 0"), "{out}");
    }

    #[test]
    fn unknown_preset_is_usage_error() {
        let (code, _, _) = run(&["sweep", "--preset", "fig9"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sweep"));
    }

    #[test]
    fn flower_needs_k() {
        let (code, _, err) = run(&["generate", "--family", "flower", "--n", "6"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--k"));
        let (code, out, _) = run(&["generate", "--family", "flower2", "--n", "6", "--p", "0.5"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 6);
    }
}
