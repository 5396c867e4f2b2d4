use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use percolab::degrees::{power_law_weights, quantile_degrees, DegreeSequence, PowerLawSpec};
use percolab::dynamics::{log_checkpoints, track_growth, GrowthModel, TrackOptions};
use percolab::experiment::{run, ExperimentConfig, WindowKind};
use percolab::exploration::{components_from_trace, explore_cm};
use percolab::generators::{
    chung_lu, configuration_model, grg, nr_graph, nr_multigraph, preferential_attachment, uniform_attachment, PASpec,
};
use percolab::limit::levy::{simulate_levy_pair, simulate_tau23_process, tau23_mark_scale};
use percolab::limit::path::default_tolerance;
use percolab::limit::tiny_giant::{zeta_limit, RHO_GRID};
use percolab::limit::{
    excursions, lambda_c, limit_component_vector, poisson_marks, reflect, simulate_bm_parabolic, tiny_giant_graph,
    LimitPath, ThetaSequence, TinyGiantParams,
};
use percolab::percolation::{percolate, PercolationParams, Regime};
use percolab::MultiGraph;

#[derive(Parser)]
#[command(name = "percolab", version, about = "Percolation experiments on random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph as an edge list
    Gen(GenArgs),
    /// Percolate an edge list
    Perc(PercArgs),
    /// Explore a configuration model and write the exploration trace
    Explore(ExploreArgs),
    /// Simulate a scaling-limit process
    Limit(LimitArgs),
    /// Track susceptibilities of a percolated growing graph
    Dyn(DynArgs),
    /// Run an experiment from a JSON config
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenModel {
    Cm,
    Nr,
    Nrmulti,
    Cl,
    Grg,
    Pa,
    Ua,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    model: GenModel,
    #[arg(long)]
    n: usize,
    /// power-law exponent; the configuration model is 3-regular (see --r) without it
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    cf: f64,
    /// degree of the regular configuration model
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// also write the degree or weight sequence, with a JSON manifest next to it
    #[arg(long)]
    sequence_out: Option<PathBuf>,
}

#[derive(Args)]
struct PercArgs {
    /// input edge list
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, conflicts_with_all = ["window", "lambda"])]
    pi: Option<f64>,
    #[arg(long, requires = "lambda")]
    window: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// needed by the heavy and single windows
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    cf: f64,
    #[arg(long, default_value_t = 3)]
    r: usize,
    /// degree file (one value per line) instead of --n
    #[arg(long)]
    degrees: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum LimitKind {
    Bm,
    Levy34,
    Levy23,
    Tinygiant,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(value_enum)]
    kind: LimitKind,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[arg(long, default_value_t = 3.5)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    cf: f64,
    /// truncation of the theta sequence
    #[arg(long, default_value_t = 10_000)]
    k: usize,
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    #[arg(long, default_value_t = 0.001)]
    dt: f64,
    /// hub-graph truncation for tinygiant
    #[arg(long, default_value_t = 100)]
    vertices: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DynModel {
    Ua,
    Pa,
}

#[derive(Args)]
struct DynArgs {
    #[arg(long, value_enum, default_value = "ua")]
    model: DynModel,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long)]
    pi: f64,
    #[arg(long)]
    nmax: usize,
    /// `log` or a comma-separated list
    #[arg(long, default_value = "log")]
    checkpoints: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// exit with status 2 when a configured assertion fails
    #[arg(long)]
    assert: bool,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn need_tau(tau: Option<f64>) -> Result<f64> {
    tau.context("this model needs --tau")
}

fn gen(a: &GenArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut seq: Option<Vec<String>> = None;
    let g = match a.model {
        GenModel::Cm => {
            let d = match a.tau {
                Some(tau) => quantile_degrees(a.n, &PowerLawSpec::new(tau, a.cf)?)?.fix_parity(),
                None => DegreeSequence::regular(a.n, a.r)?.fix_parity(),
            };
            seq = Some(d.as_slice().iter().map(|x| x.to_string()).collect());
            configuration_model(&d, &mut rng)?
        }
        GenModel::Nr | GenModel::Nrmulti | GenModel::Cl | GenModel::Grg => {
            let w = power_law_weights(a.n, &PowerLawSpec::new(need_tau(a.tau)?, a.cf)?)?;
            seq = Some(w.as_slice().iter().map(|x| x.to_string()).collect());
            match a.model {
                GenModel::Nr => nr_graph(&w, &mut rng)?,
                GenModel::Nrmulti => nr_multigraph(&w, &mut rng)?,
                GenModel::Cl => chung_lu(&w, &mut rng)?,
                _ => grg(&w, &mut rng)?,
            }
        }
        GenModel::Pa => preferential_attachment(a.n, &PASpec::new(a.m, a.delta, a.a)?, &mut rng)?.0,
        GenModel::Ua => uniform_attachment(a.n, a.m, &mut rng)?.0,
    };
    g.write_edge_list(create(&a.out)?)?;
    if let Some(path) = &a.sequence_out {
        let values = seq.context("attachment models have no input sequence")?;
        let mut w = create(path)?;
        for v in values {
            writeln!(w, "{v}")?;
        }
        let manifest = json!({ "n": a.n, "tau": a.tau, "c_f": a.cf, "seed": a.seed });
        let mpath = path.with_extension("json");
        serde_json::to_writer_pretty(create(&mpath)?, &manifest)?;
    }
    print_json(&json!({ "n": g.vertex_count(), "edges": g.edge_count(), "seed": a.seed }))
}

fn read_graph(path: &Path) -> Result<MultiGraph> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(MultiGraph::read_edge_list(BufReader::new(f))?)
}

fn perc(a: &PercArgs) -> Result<()> {
    let g = read_graph(&a.input)?;
    let n = g.vertex_count();
    let pi = match (a.pi, &a.window) {
        (Some(pi), None) => PercolationParams::fixed(pi)?.pi,
        (None, Some(w)) => {
            let kind: WindowKind = w.parse()?;
            let regime = kind.regime(a.tau)?;
            let nu = if matches!(regime, Regime::SingleEdge { .. }) {
                1.0
            } else {
                DegreeSequence::new(g.degrees())?.nu_n()
            };
            PercolationParams::window(regime, a.lambda.unwrap_or(0.0), n, nu)?.pi
        }
        _ => bail!("give either --pi or --window with --lambda"),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    percolate(&g, pi, &mut rng)?.write_edge_list(create(&a.out)?)?;
    print_json(&json!({ "pi_used": pi, "n": n, "seed": a.seed }))
}

fn explore(a: &ExploreArgs) -> Result<()> {
    let d = match (&a.degrees, a.n) {
        (Some(path), _) => DegreeSequence::read_lines(BufReader::new(File::open(path)?))?,
        (None, Some(n)) => match a.tau {
            Some(tau) => quantile_degrees(n, &PowerLawSpec::new(tau, a.cf)?)?.fix_parity(),
            None => DegreeSequence::regular(n, a.r)?.fix_parity(),
        },
        (None, None) => bail!("give --n or --degrees"),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (trace, _) = explore_cm(&d, &mut rng)?;
    trace.write_csv(create(&a.out)?)?;
    let comps = components_from_trace(&trace)?;
    let largest = comps.iter().map(|c| c.0).max().unwrap_or(0);
    print_json(&json!({ "n": d.len(), "steps": trace.steps.len(), "components": comps.len(), "largest": largest, "seed": a.seed }))
}

#[derive(Serialize)]
struct PathSummary {
    kind: &'static str,
    excursion_lengths: Vec<f64>,
    marks: Vec<u64>,
    final_value: f64,
    tail_bound: Option<f64>,
}

fn summarize_path(kind: &'static str, p: &LimitPath<f64>, tol: f64, mark_scale: f64, rng: &mut ChaCha8Rng) -> Result<PathSummary> {
    let mut set = excursions(p, tol)?;
    set.attach_marks(&poisson_marks(&reflect(p), mark_scale, rng)?);
    let z = limit_component_vector(&set, 1.0);
    Ok(PathSummary {
        kind,
        excursion_lengths: z.pairs().iter().take(20).map(|x| x.0).collect(),
        marks: z.pairs().iter().take(20).map(|x| x.1).collect(),
        final_value: *p.values().last().expect("nonempty path"),
        tail_bound: None,
    })
}

fn limit(a: &LimitArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    match a.kind {
        LimitKind::Bm => {
            let p = simulate_bm_parabolic(a.mu, a.kappa, a.lambda, a.horizon, a.dt, &mut rng)?;
            p.write_csv(create(&a.out)?, "S")?;
            let drift = a.lambda.abs() + a.kappa * a.horizon / a.mu.powi(3);
            let s = summarize_path("bm", &p, default_tolerance(a.dt, drift), 1.0 / a.mu, &mut rng)?;
            print_json(&s)
        }
        LimitKind::Levy34 => {
            let theta = ThetaSequence::power_law(a.tau, a.cf, a.k)?;
            let pair = simulate_levy_pair(&theta, a.mu, a.nu, a.lambda, a.horizon, a.dt, None, &mut rng)?;
            pair.thinned.write_csv(create(&a.out)?, "S")?;
            let drift = (a.lambda - theta.head_sq() / (a.mu * a.nu)).abs();
            let mut s = summarize_path("levy34", &pair.thinned, default_tolerance(a.dt, drift), 1.0 / a.mu, &mut rng)?;
            s.tail_bound = Some(pair.tail_bound);
            print_json(&s)
        }
        LimitKind::Levy23 => {
            if a.tau >= 3.0 {
                bail!("levy23 needs --tau in (2, 3)");
            }
            let theta = ThetaSequence::power_law(a.tau, a.cf, a.k)?;
            let p = simulate_tau23_process(&theta, a.mu, a.lambda, a.horizon, a.dt, &mut rng)?;
            p.write_csv(create(&a.out)?, "S")?;
            let scale = tau23_mark_scale(&theta, a.mu, a.lambda);
            let s = summarize_path("levy23", &p, default_tolerance(a.dt, 1.0), scale, &mut rng)?;
            print_json(&s)
        }
        LimitKind::Tinygiant => {
            let params = TinyGiantParams::with_weight_mean(a.tau, a.cf)?;
            let lc = lambda_c(params.tau, params.c_f, params.mu)?;
            let z = zeta_limit(&params, a.lambda, a.tol)?;
            let mut w = create(&a.out)?;
            writeln!(w, "a,zeta_a")?;
            for (x, y) in &z.sequence {
                writeln!(w, "{x},{y}")?;
            }
            let g = tiny_giant_graph(&params, a.lambda, a.vertices, &mut rng)?;
            let dec = g.components();
            print_json(&json!({
                "lambda": a.lambda,
                "lambda_c": lc,
                "mu": params.mu,
                "zeta": z.value,
                "converged": z.converged,
                "rho_grid": RHO_GRID,
                "hub_graph": { "vertices": a.vertices, "edges": g.edge_count(), "largest": dec.largest(), "second": dec.second_largest() },
            }))
        }
    }
}

fn dynamics(a: &DynArgs) -> Result<()> {
    let model = match a.model {
        DynModel::Ua => GrowthModel::Uniform { m: a.m },
        DynModel::Pa => GrowthModel::Preferential(PASpec::new(a.m, a.delta, a.a)?),
    };
    let checkpoints = if a.checkpoints == "log" {
        log_checkpoints(a.nmax)
    } else {
        a.checkpoints.split(',').map(|s| s.trim().parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>()?
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let t = track_growth(&model, a.pi, a.nmax, &checkpoints, TrackOptions::default(), &mut rng)?;
    t.write_csv(create(&a.out)?)?;
    let last = t.last().context("no checkpoint recorded")?;
    print_json(&json!({ "pi": a.pi, "n": last.n, "s2": last.s2, "cmax": last.cmax, "seed": a.seed }))
}

fn run_config(a: &RunArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let config = ExperimentConfig::from_json(&text)?;
    let report = run(&config)?;
    report.write_to(&a.out_dir)?;
    for o in &report.assertions {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => gen(a).map(|_| true),
        Command::Perc(a) => perc(a).map(|_| true),
        Command::Explore(a) => explore(a).map(|_| true),
        Command::Limit(a) => limit(a).map(|_| true),
        Command::Dyn(a) => dynamics(a).map(|_| true),
        Command::Run(a) => run_config(a).map(|ok| ok || !a.assert),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
