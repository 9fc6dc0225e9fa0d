use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bunkbed::engines::{
    conditioned_model, exact_enumeration, exact_reach_dp, monte_carlo, posts_exactly_model, EdgeModel, EnumOptions,
    ExactProb, McOptions, DEFAULT_CONFIDENCE, DEFAULT_FREE_EDGE_CAP,
};
use bunkbed::error::SuiteError;
use bunkbed::events::{parse_event, Event};
use bunkbed::graph::text::{parse_graph, write_graph};
use bunkbed::graph::{build_g1, build_g2k, bunkbed, BunkbedGraph, DiGraph};
use bunkbed::suite::{
    certify_theorem, verify_claim_i, verify_claim_ii, verify_claim_iii, verify_proposition, ClaimReport, Coverage,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bunkbed", version, about = "Exact and sampled directed bunkbed percolation")]
struct Cli {
    #[command(flatten)]
    out: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Include wall-clock times (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// `g1`, `g2k` or a graph file.
    #[arg(long, default_value = "g1")]
    graph: String,
    /// Gadget size for `g2k`.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// `uniform[:p]`, `conditioned:T[@p]` or `posts-exactly:T[@p]`, with T a
    /// comma-separated vertex list and p a fraction or decimal.
    #[arg(long, default_value = "uniform")]
    model: String,
    /// Event expression; repeatable.
    #[arg(long = "event", required = true)]
    events: Vec<String>,
}

#[derive(Args, Clone)]
struct McArgs {
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
    confidence: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Enum,
    Dp,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum Claim {
    ClaimI,
    ClaimIi,
    ClaimIii,
    Proposition,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a graph in the text format.
    Graph(GraphArgs),
    /// Exact probabilities by enumeration.
    Exact {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_FREE_EDGE_CAP)]
        cap: usize,
    },
    /// Exact reachability probability by frontier DP.
    Dp {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Monte Carlo estimates.
    Mc {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Any engine by name.
    Prob {
        #[arg(long, value_enum)]
        engine: Engine,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Run a scripted verification.
    Verify {
        #[arg(value_enum)]
        claim: Claim,
        #[arg(long, value_enum, default_value_t = Mode::Sampled)]
        mode: Mode,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certify the unconditioned inequality at an explicit gadget size.
    Theorem {
        #[arg(long, default_value_t = 1000)]
        kmax: usize,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Verification(String),
}

struct Output {
    text: String,
    pass: bool,
}

fn rational_json(r: &BigRational) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string(), "float": bunkbed::engines::rational_to_f64(r)})
}

fn parse_probability(s: &str) -> Result<BigRational, String> {
    let bad = || format!("cannot parse probability {s:?}");
    let r = if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        BigRational::new(n, d)
    } else {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{}{frac}", if int.is_empty() { "0" } else { int })
            .parse()
            .map_err(|_| bad())?;
        BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32))
    };
    Ok(r)
}

fn load_graph(args: &GraphArgs) -> Result<DiGraph, Failure> {
    match args.graph.as_str() {
        "g1" => Ok(build_g1()),
        "g2k" => build_g2k(args.k).map_err(|e| Failure::Usage(e.to_string())),
        path => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?;
            parse_graph(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))
        }
    }
}

fn load_model(bb: &BunkbedGraph, desc: &str) -> Result<EdgeModel, Failure> {
    let usage = |e: String| Failure::Usage(format!("--model {desc}: {e}"));
    let (kind, rest) = desc.split_once(':').unwrap_or((desc, ""));
    let (list, p) = match rest.split_once('@') {
        Some((l, p)) => (l, parse_probability(p).map_err(usage)?),
        None if kind == "uniform" && !rest.is_empty() => ("", parse_probability(rest).map_err(usage)?),
        None => (rest, BigRational::new(1.into(), 2.into())),
    };
    let posts: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let model = match kind {
        "uniform" => EdgeModel::uniform(bb, p),
        "conditioned" => conditioned_model(bb, &posts, p),
        "posts-exactly" => posts_exactly_model(bb, &posts, p),
        _ => return Err(usage("expected uniform, conditioned or posts-exactly".into())),
    };
    model.map_err(|e| usage(e.to_string()))
}

fn load_events(exprs: &[String]) -> Result<Vec<Event>, Failure> {
    exprs
        .iter()
        .map(|s| parse_event(s).map_err(|e| Failure::Usage(format!("--event {s:?}: {e}"))))
        .collect()
}

fn graph_label(args: &GraphArgs) -> String {
    match args.graph.as_str() {
        "g2k" => format!("g2k(k={})", args.k),
        other => other.to_string(),
    }
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
}

fn exact_output(command: &str, args: &ModelArgs, events: &[Event], probs: &[ExactProb], format: Format) -> String {
    match format {
        Format::Human => events
            .iter()
            .zip(probs)
            .map(|(e, p)| {
                format!(
                    "{e}\t{}\t{}\n",
                    bunkbed::engines::rational_string(p.value()),
                    p.to_f64()
                )
            })
            .collect(),
        Format::Json => {
            let results: Vec<Value> = events
                .iter()
                .zip(probs)
                .map(|(e, p)| json!({"event": e.to_string(), "probability": rational_json(p.value())}))
                .collect();
            pretty(&json!({
                "command": command,
                "graph": graph_label(&args.graph),
                "model": args.model,
                "results": results,
            }))
        }
        Format::Csv => csv_text(
            &["event", "num", "den", "float"],
            events
                .iter()
                .zip(probs)
                .map(|(e, p)| {
                    vec![
                        e.to_string(),
                        p.value().numer().to_string(),
                        p.value().denom().to_string(),
                        p.to_f64().to_string(),
                    ]
                })
                .collect(),
        ),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn run_exact(args: &ModelArgs, cap: usize, format: Format, command: &str) -> Result<Output, Failure> {
    let bb = bunkbed(&load_graph(&args.graph)?);
    let model = load_model(&bb, &args.model)?;
    let events = load_events(&args.events)?;
    let opts = EnumOptions {
        cap,
        ..Default::default()
    };
    let probs = exact_enumeration(&bb, &model, &events, opts).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(Output {
        text: exact_output(command, args, &events, &probs, format),
        pass: true,
    })
}

fn run_dp(args: &ModelArgs, format: Format) -> Result<Output, Failure> {
    let bb = bunkbed(&load_graph(&args.graph)?);
    let model = load_model(&bb, &args.model)?;
    let events = load_events(&args.events)?;
    let mut probs = Vec::new();
    for ev in &events {
        let Event::Reach(x, y) = ev else {
            return Err(Failure::Usage(format!(
                "dp accepts only single reach(x,y) events, got {ev}"
            )));
        };
        probs.push(exact_reach_dp(&bb, &model, x, y).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    Ok(Output {
        text: exact_output("dp", args, &events, &probs, format),
        pass: true,
    })
}

fn run_mc(args: &ModelArgs, mc: &McArgs, format: Format) -> Result<Output, Failure> {
    let bb = bunkbed(&load_graph(&args.graph)?);
    let model = load_model(&bb, &args.model)?;
    let events = load_events(&args.events)?;
    let opts = McOptions {
        confidence: mc.confidence,
        ..Default::default()
    };
    let ests = monte_carlo(&bb, &model, &events, mc.n, mc.seed, opts).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = match format {
        Format::Human => events
            .iter()
            .zip(&ests)
            .map(|(e, m)| {
                format!(
                    "{e}\t{:.6} [{:.6}, {:.6}] n={} hits={} seed={} confidence={}\n",
                    m.estimate, m.ci_low, m.ci_high, m.n, m.hits, m.seed, m.confidence
                )
            })
            .collect(),
        Format::Json => {
            let results: Vec<Value> = events
                .iter()
                .zip(&ests)
                .map(|(e, m)| json!({"event": e.to_string(), "estimate": m}))
                .collect();
            pretty(&json!({
                "command": "mc",
                "graph": graph_label(&args.graph),
                "model": args.model,
                "results": results,
            }))
        }
        Format::Csv => csv_text(
            &[
                "event",
                "n",
                "hits",
                "estimate",
                "ci_low",
                "ci_high",
                "seed",
                "confidence",
            ],
            events
                .iter()
                .zip(&ests)
                .map(|(e, m)| {
                    vec![
                        e.to_string(),
                        m.n.to_string(),
                        m.hits.to_string(),
                        m.estimate.to_string(),
                        m.ci_low.to_string(),
                        m.ci_high.to_string(),
                        m.seed.to_string(),
                        m.confidence.to_string(),
                    ]
                })
                .collect(),
        ),
    };
    Ok(Output { text, pass: true })
}

fn report_output(rep: &ClaimReport, format: Format) -> String {
    match format {
        Format::Human => rep.to_string(),
        Format::Json => {
            let mut v = serde_json::to_value(rep).expect("serialisable");
            v["pass"] = Value::Bool(rep.pass());
            pretty(&v)
        }
        Format::Csv => csv_text(
            &["claim", "name", "expected", "computed", "provenance", "pass"],
            rep.checks
                .iter()
                .map(|c| {
                    vec![
                        rep.claim.clone(),
                        c.name.clone(),
                        c.expected.clone(),
                        c.computed.clone(),
                        serde_json::to_value(c.provenance)
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_string))
                            .unwrap_or_default(),
                        c.pass.to_string(),
                    ]
                })
                .collect(),
        ),
    }
}

fn run_verify(claim: Claim, mode: Mode, n: u64, seed: u64, out: &OutputArgs) -> Result<Output, Failure> {
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let coverage = match mode {
        Mode::Exhaustive => Coverage::Exhaustive,
        Mode::Sampled => Coverage::Sampled { n, seed },
    };
    let mut rep = match claim {
        Claim::ClaimI => verify_claim_i(coverage),
        Claim::ClaimIi => verify_claim_ii(),
        Claim::ClaimIii => verify_claim_iii(),
        Claim::Proposition => verify_proposition(coverage),
    };
    if out.timing {
        rep = rep.with_timing();
    }
    Ok(Output {
        pass: rep.pass(),
        text: report_output(&rep, out.format),
    })
}

fn run_theorem(kmax: usize, out: &OutputArgs) -> Result<Output, Failure> {
    if kmax == 0 {
        return Err(Failure::Usage("--kmax must be at least 1".into()));
    }
    let cert = certify_theorem(kmax, Default::default()).map_err(|e| match e {
        SuiteError::CertifiedKExceedsKMax { .. } | SuiteError::NonPositiveGap => Failure::Verification(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    let text = match out.format {
        Format::Csv => cert.csv(),
        Format::Json => {
            let mut v = serde_json::to_value(&cert).expect("serialisable");
            v["elapsed_ms"] = if out.timing {
                json!(cert.wall.as_millis() as u64)
            } else {
                Value::Null
            };
            pretty(&v)
        }
        Format::Human => {
            let f = bunkbed::engines::rational_to_f64;
            let mut s = format!(
                "theorem: {}\n  conditioned gap g = {} ({:e})\n  certified k = {}\n  P(C^c) at k = {:e}\n  P(A_k) = {:e}\n  P(B_k) = {:e}\n  gap at k = {:e}\n  smallest swept k with a positive gap = {}\n  bounds hold on the sweep: {}\n",
                if cert.pass { "PASS" } else { "FAIL" },
                bunkbed::engines::rational_string(&cert.conditioned_gap),
                f(&cert.conditioned_gap),
                cert.k_cert,
                f(&cert.p_no_crossbar_at_cert),
                f(&cert.p_a_at_cert),
                f(&cert.p_b_at_cert),
                f(&cert.gap_at_cert),
                cert.smallest_positive_k.map_or("none".to_string(), |k| k.to_string()),
                cert.bounds_hold,
            );
            if out.timing {
                s.push_str(&format!("  elapsed {} ms\n", cert.wall.as_millis()));
            }
            s
        }
    };
    Ok(Output { pass: cert.pass, text })
}

fn run_graph(args: &GraphArgs, format: Format) -> Result<Output, Failure> {
    let g = load_graph(args)?;
    let text = match format {
        Format::Json => {
            let edges: Vec<[&str; 2]> = g
                .edges()
                .iter()
                .map(|&(a, b)| [g.label(a).as_str(), g.label(b).as_str()])
                .collect();
            let vertices: Vec<&str> = g.vertices().iter().map(|v| v.as_str()).collect();
            pretty(&json!({"vertices": vertices, "edges": edges}))
        }
        Format::Csv => csv_text(
            &["tail", "head"],
            g.edges()
                .iter()
                .map(|&(a, b)| vec![g.label(a).to_string(), g.label(b).to_string()])
                .collect(),
        ),
        Format::Human => write_graph(&g),
    };
    Ok(Output { text, pass: true })
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    let format = cli.out.format;
    match &cli.command {
        Command::Graph(g) => run_graph(g, format),
        Command::Exact { model, cap } => run_exact(model, *cap, format, "exact"),
        Command::Dp { model } => run_dp(model, format),
        Command::Mc { model, mc } => run_mc(model, mc, format),
        Command::Prob { engine, model, mc } => match engine {
            Engine::Enum => run_exact(model, DEFAULT_FREE_EDGE_CAP, format, "exact"),
            Engine::Dp => run_dp(model, format),
            Engine::Mc => run_mc(model, mc, format),
        },
        Command::Verify { claim, mode, n, seed } => run_verify(*claim, *mode, *n, *seed, &cli.out),
        Command::Theorem { kmax } => run_theorem(*kmax, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.out.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let result = pool.install(|| dispatch(&cli));
    match result {
        Ok(out) => {
            let written = match &cli.out.out {
                Some(path) => fs::write(path, &out.text),
                None => std::io::stdout().write_all(out.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
