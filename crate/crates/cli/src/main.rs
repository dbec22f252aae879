use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netsamp::asymptotics::{clustering_asymptotics, ego_functionals, inclusion_probability, sigma2, theta_set};
use netsamp::counting::{count_estimated, count_population};
use netsamp::error::{Error, Result};
use netsamp::estimation::Scenario;
use netsamp::harness::{
    analyze_real, arb_bias, fmt_num, parse_list, run_coverage, run_sparse_clt, ExperimentConfig, SparseCltConfig, Table,
    Target,
};
use netsamp::inference::{pi_clustering, pi_subgraph};
use netsamp::io::{load_graph, write_edge_list, write_labels};
use netsamp::pattern::Pattern;
use netsamp::sampling::{bernoulli_select, SampleView, Scheme};
use netsamp::sbm::{generate, materialize_sparse, sparse_simulation_c, SparseSbmSpec};
use netsamp::sparse::sparse_profile;

#[derive(Parser)]
#[command(name = "netsamp", version, about = "Subgraph-count and clustering inference under Bernoulli node sampling")]
struct Cli {
    /// Plain-text key=value configuration; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// Population size.
    #[arg(long)]
    n: Option<usize>,
    /// Edge probabilities, rows separated by ';' (default: the simulation Π).
    #[arg(long)]
    pi: Option<String>,
    /// Class proportions, comma separated.
    #[arg(long)]
    lambda: Option<String>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Edge list with lines "u v" (gzip accepted).
    #[arg(long)]
    graph: PathBuf,
    /// Labels with lines "u k".
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a population graph and write PREFIX.edges and PREFIX.labels.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        /// Sparse decay rate; uses the sparse simulation C scaled by N^-beta.
        #[arg(long)]
        beta: Option<f64>,
        /// Output prefix.
        #[arg(long)]
        prefix: PathBuf,
    },
    /// Draw a Bernoulli node sample and print the selected ids.
    Sample {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact population count and, with --p, the sample count and its expansion.
    Count {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "triangle")]
        motif: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_enum, default_value_t = SchemeArg::Induced)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Limiting variance, inclusion functionals and clustering constants.
    Variance {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "edge")]
        motif: String,
        #[arg(long, value_enum, default_value_t = SchemeArg::Induced)]
        scheme: SchemeArg,
        #[arg(long)]
        p: f64,
    },
    /// Prediction interval from a sample statistic and known parameters.
    Interval {
        #[command(flatten)]
        model: ModelArgs,
        /// Motif name or `clustering`.
        #[arg(long, default_value = "edge")]
        motif: String,
        #[arg(long, value_enum, default_value_t = SchemeArg::Induced)]
        scheme: SchemeArg,
        #[arg(long)]
        p: f64,
        /// Sample count Ŝ for a motif, or Γ̂ for clustering.
        #[arg(long)]
        estimate: f64,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Monte-Carlo coverage of the prediction intervals.
    SimulateCoverage {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Also write per-replicate records as CSV.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Average relative bias of the estimated ego clustering bias term.
    Arb {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// f1 table, c(H) and the admissible sparse decay rates for a motif.
    SparseProfile {
        #[arg(long, default_value = "triangle")]
        motif: String,
    },
    /// Standardized sparse-regime pivots under induced sampling.
    SparseClt {
        #[arg(long, default_value_t = 3000)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, default_value_t = 0.2)]
        beta: f64,
        #[arg(long, default_value = "edge")]
        motif: String,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        bins: usize,
    },
    /// Known-parameter analysis of a labelled network from one node sample.
    Analyze {
        /// Edge list (directed input is symmetrized, isolated vertices dropped).
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, value_enum, default_value_t = SchemeArg::Induced)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Induced,
    Ego,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Induced => Scheme::Induced,
            SchemeArg::Ego => Scheme::Ego,
        }
    }
}

#[derive(Args, Clone, Default)]
struct ExperimentArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Selection probabilities, comma separated.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    /// Schemes, comma separated (induced, ego).
    #[arg(long)]
    scheme: Option<String>,
    /// Scenarios, comma separated (c1..c4).
    #[arg(long)]
    scenario: Option<String>,
    /// Targets, comma separated: motif names, file:PATH, clustering.
    #[arg(long)]
    motif: Option<String>,
    #[arg(long)]
    level: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut base = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        base.apply_text(&std::fs::read_to_string(path)?)?;
    }
    match &cli.command {
        Command::Generate { model, beta, prefix } => {
            let cfg = with_model(base, model)?;
            let sbm = match beta {
                Some(b) => materialize_sparse(
                    &SparseSbmSpec::new(sparse_simulation_c(), *b, cfg.lambda.clone())?,
                    cfg.n,
                )?,
                None => cfg.model()?,
            };
            let g = generate(&sbm, cfg.n, cfg.seed)?;
            write_edge_list(&g, BufWriter::new(File::create(with_ext(prefix, "edges"))?))?;
            let labels: Vec<Option<usize>> = g.labels().iter().map(|&l| Some(l)).collect();
            write_labels(&labels, BufWriter::new(File::create(with_ext(prefix, "labels"))?))?;
            let mut t = Table::new(&["n", "edges", "seed"]);
            t.rows.push(vec![cfg.n.to_string(), g.edge_count().to_string(), cfg.seed.to_string()]);
            emit(cli, &t)
        }
        Command::Sample { graph, p, seed } => {
            let loaded = load_graph(&graph.graph, graph.labels.as_deref(), false)?;
            let mask = bernoulli_select(loaded.graph.n(), *p, *seed)?;
            let mut t = Table::new(&["id"]);
            t.comments = vec![format!("p={p}"), format!("seed={seed}"), format!("selected={}", mask.selected_count())];
            t.rows = mask.bits().iter().map(|i| vec![loaded.ids[i].to_string()]).collect();
            emit(cli, &t)
        }
        Command::Count {
            graph,
            motif,
            p,
            scheme,
            seed,
        } => {
            let loaded = load_graph(&graph.graph, graph.labels.as_deref(), false)?;
            let g = &loaded.graph;
            let h = motif_pattern(motif)?;
            let n = g.n();
            let pop = count_population(g, &h)?;
            let mut t = Table::new(&["quantity", "count", "density"]);
            t.comments = vec![format!("n={n}"), format!("motif={}", h.name())];
            t.rows.push(vec!["population".into(), pop.value.to_string(), fmt_num(pop.density(n))]);
            if let Some(p) = p {
                let scheme = Scheme::from(*scheme);
                let mask = bernoulli_select(n, *p, *seed)?;
                let est = count_estimated(&SampleView::new(g, &mask, scheme)?, &h)?;
                let f = inclusion_probability(&h, scheme, *p)?;
                t.comments.extend([format!("p={p}"), format!("scheme={scheme}"), format!("seed={seed}")]);
                t.rows.push(vec!["sample".into(), est.value.to_string(), fmt_num(est.density(n))]);
                t.rows.push(vec![
                    "expanded".into(),
                    fmt_num(est.value as f64 / f),
                    fmt_num(est.density(n) / f),
                ]);
            }
            emit(cli, &t)
        }
        Command::Variance { model, motif, scheme, p } => {
            let cfg = with_model(base, model)?;
            let scheme = Scheme::from(*scheme);
            let mut t = Table::new(&["quantity", "value"]);
            t.comments = cfg.echo()[6..8].to_vec();
            if motif == "clustering" {
                let th = theta_set(&cfg.pi, &cfg.lambda)?;
                let ca = clustering_asymptotics(&cfg.pi, &cfg.lambda, *p, scheme)?;
                t.rows.push(vec!["theta1".into(), fmt_num(th.theta1)]);
                t.rows.push(vec!["theta2".into(), fmt_num(th.theta2)]);
                for (name, v) in [("theta3", &th.theta3), ("theta4", &th.theta4), ("theta5", &th.theta5)] {
                    for (k, x) in v.iter().enumerate() {
                        t.rows.push(vec![format!("{name}[{}]", k + 1), fmt_num(*x)]);
                    }
                }
                t.rows.push(vec!["bias".into(), fmt_num(ca.bias)]);
                t.rows.push(vec!["tau2".into(), fmt_num(ca.tau2)]);
            } else {
                let h = motif_pattern(motif)?;
                let rep = sigma2(&h, scheme, &cfg.pi, &cfg.lambda, *p)?;
                t.rows.push(vec!["sigma2".into(), fmt_num(rep.sigma2)]);
                t.rows.push(vec!["f".into(), fmt_num(inclusion_probability(&h, scheme, *p)?)]);
                if scheme == Scheme::Ego {
                    for (r, d) in ego_functionals(&h, *p)?.delta.iter().enumerate() {
                        t.rows.push(vec![format!("delta[{}]", r + 1), fmt_num(*d)]);
                    }
                }
                for (k, c) in rep.components.iter().enumerate() {
                    t.rows.push(vec![format!("component[{}]", k + 1), fmt_num(*c)]);
                }
            }
            emit(cli, &t)
        }
        Command::Interval {
            model,
            motif,
            scheme,
            p,
            estimate,
            level,
        } => {
            let cfg = with_model(base, model)?;
            let scheme = Scheme::from(*scheme);
            let mut t = Table::new(&[
                "target", "scheme", "scenario", "point", "lower", "upper", "level", "bias", "sigma_or_tau",
            ]);
            let iv = if motif == "clustering" {
                pi_clustering(*estimate, scheme, &cfg.pi, &cfg.lambda, *p, cfg.n, *level)?
            } else {
                let h = motif_pattern(motif)?;
                pi_subgraph(*estimate, &h, scheme, &cfg.pi, &cfg.lambda, *p, cfg.n, *level)?
            };
            t.comments = vec![format!("n={}", cfg.n), format!("p={p}"), format!("feasible={}", iv.feasible)];
            t.rows.push(vec![
                iv.target.to_string(),
                scheme.to_string(),
                Scenario::C1.to_string(),
                fmt_num(iv.point),
                fmt_num(iv.lower),
                fmt_num(iv.upper),
                fmt_num(iv.level),
                fmt_num(iv.bias),
                fmt_num(iv.sigma_or_tau),
            ]);
            emit(cli, &t)
        }
        Command::SimulateCoverage { exp, records } => {
            let cfg = with_experiment(base, exp)?;
            let report = run_coverage(&cfg)?;
            if let Some(path) = records {
                report.records_table().write(path)?;
            }
            emit(cli, &report.table())
        }
        Command::Arb { exp } => {
            let mut cfg = with_experiment(base, exp)?;
            if exp.scenario.is_none() {
                cfg.scenarios = vec![Scenario::C2, Scenario::C3, Scenario::C4];
            }
            let rows = arb_bias(&cfg)?;
            let mut t = Table::new(&["p", "scenario", "true_bias", "arb_percent", "m", "failures"]);
            t.comments = cfg.echo();
            for r in rows {
                t.rows.push(vec![
                    fmt_num(r.p),
                    r.scenario.to_string(),
                    fmt_num(r.bias_true),
                    fmt_num(r.arb_percent),
                    r.m_used.to_string(),
                    r.failures.to_string(),
                ]);
            }
            emit(cli, &t)
        }
        Command::SparseProfile { motif } => {
            let h = motif_pattern(motif)?;
            let prof = sparse_profile(&h);
            let mut t = Table::new(&["t", "f1", "ratio"]);
            t.comments = vec![
                format!("motif={}", h.name()),
                format!("r={}", prof.r),
                format!("edges={}", prof.t),
                format!("c_h={}", prof.c),
                format!("admissible_beta=(0,{})", prof.c),
            ];
            for &(tt, f) in &prof.f1 {
                t.rows.push(vec![tt.to_string(), f.to_string(), fmt_num((tt - 1) as f64 / f as f64)]);
            }
            emit(cli, &t)
        }
        Command::SparseClt {
            n,
            p,
            beta,
            motif,
            reps,
            seed,
            bins,
        } => {
            let spec = SparseSbmSpec::new(sparse_simulation_c(), *beta, vec![0.25; 4])?;
            let summary = run_sparse_clt(&SparseCltConfig {
                spec,
                n: *n,
                p: *p,
                pattern: motif_pattern(motif)?,
                reps: *reps,
                seed: *seed,
                bins: *bins,
            })?;
            if let Some(w) = &summary.warning {
                eprintln!("warning: {w}");
            }
            emit(cli, &summary.table())
        }
        Command::Analyze {
            edges,
            labels,
            p,
            scheme,
            level,
            seed,
        } => {
            let loaded = load_graph(edges, Some(labels), true)?;
            let report = analyze_real(&loaded.graph, *p, &[Scheme::from(*scheme)], *level, *seed)?;
            emit(cli, &report.table())
        }
    }
}

fn with_model(mut cfg: ExperimentConfig, m: &ModelArgs) -> Result<ExperimentConfig> {
    if let Some(n) = m.n {
        cfg.n = n;
    }
    if let Some(pi) = &m.pi {
        cfg.set("pi", pi)?;
    }
    if let Some(l) = &m.lambda {
        cfg.set("lambda", l)?;
    }
    if let Some(s) = m.seed {
        cfg.seed = s;
    }
    if cfg.lambda.len() != cfg.pi.nrows() && m.lambda.is_none() {
        let k = cfg.pi.nrows();
        cfg.lambda = vec![1.0 / k as f64; k];
    }
    Ok(cfg)
}

fn with_experiment(cfg: ExperimentConfig, e: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = with_model(cfg, &e.model)?;
    if let Some(p) = &e.p {
        cfg.ps = parse_list(p)?;
    }
    if let Some(r) = e.reps {
        cfg.reps = r;
    }
    if let Some(s) = &e.scheme {
        cfg.set("scheme", s)?;
    }
    if let Some(s) = &e.scenario {
        cfg.set("scenario", s)?;
    }
    if let Some(m) = &e.motif {
        cfg.set("targets", m)?;
    }
    if let Some(l) = e.level {
        cfg.level = l;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn motif_pattern(s: &str) -> Result<Pattern> {
    match Target::parse(s)? {
        Target::Motif(h) => Ok(h),
        Target::Clustering => Err(Error::Config("a motif is required here, not `clustering`".into())),
    }
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn emit(cli: &Cli, t: &Table) -> Result<()> {
    let text = match cli.format {
        Format::Csv => t.to_csv(),
        Format::Table => {
            let mut s: String = t.comments.iter().map(|c| format!("# {c}\n")).collect();
            s.push_str(&t.to_aligned());
            s
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
