//! `selfsim` — reproducible experiments on affine embeddings of
//! self-similar sets.
//!
//! One binary, one reproducibility surface: every artifact embeds the tool
//! version, a digest of the effective configuration, the enclosure
//! precision and any seed, so identical invocations produce byte-identical
//! outputs.
//!
//! Exit codes: 0 = emptiness certified / certificate verified, 2 = unknown
//! (budget or depth exhausted), 3 = certificate refuted, 64 = invalid
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use selfsim::arith::{
    check_condition_big_d, check_condition_small_d, in_log_span, log_rank, Gamma,
};
use selfsim::embed::{
    certify_empty, search_embeddings, verify_certificate_at, Certificate, CertifyBudget,
    CertifyOutcome,
};
use selfsim::ifs::IfsConfig;
use selfsim::measures::AtomicMeasure;
use selfsim::orbits::{
    box_dim_estimate, check_separation, generate_multirotation, lambda_of, ChoiceSeq,
};
use selfsim::renorm::theta_sequence;
use selfsim::{num, Rational, RationalIfs};

const EXIT_UNKNOWN: u8 = 2;
const EXIT_REFUTED: u8 = 3;
const EXIT_BAD_CONFIG: u8 = 64;

#[derive(Parser)]
#[command(name = "selfsim", version, about = "rigorous toolkit for affine embeddings of self-similar sets")]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Enclosure precision in bits (overrides SELFSIM_PRECISION).
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify emptiness of the affine-embedding set by branch and bound.
    Certify(CertifyArgs),
    /// Replay and check an emptiness certificate.
    Verify(VerifyArgs),
    /// Enumerate and verify candidate embeddings.
    Search(SearchArgs),
    /// Rank over the rationals of the logarithms of the given ratios.
    Rank(RankArgs),
    /// Rational log-span membership with witness coefficients.
    Span(SpanArgs),
    /// Exhaustive Diophantine lower-bound scans.
    Dioph(DiophArgs),
    /// Generate a multi-rotation orbit.
    Multirot(MultirotArgs),
    /// Box-dimension estimate of a point set.
    Boxdim(BoxdimArgs),
    /// Renormalization trajectory of a verified embedding.
    Renorm(RenormArgs),
    /// Iterate the measure zoom-in Markov step.
    Cpstep(CpstepArgs),
}

#[derive(Args)]
struct CertifyArgs {
    /// Source system config (TOML or JSON).
    #[arg(long)]
    x: PathBuf,
    /// Target system config (TOML or JSON).
    #[arg(long)]
    y: PathBuf,
    #[arg(long, default_value_t = 24)]
    max_depth: u32,
    #[arg(long, default_value_t = 12)]
    witness_depth: u32,
    #[arg(long, default_value_t = 16)]
    cover_depth: u32,
    /// Total cell budget.
    #[arg(long, default_value_t = 400_000)]
    budget: u64,
    /// Also use right hull endpoints as witness points.
    #[arg(long)]
    endpoint_witnesses: bool,
    /// Search only orientation-preserving embeddings.
    #[arg(long)]
    orientation_preserving: bool,
    /// Probe surviving cells for embeddings verified to this depth.
    #[arg(long)]
    probe_candidates: Option<u32>,
    /// Output file (certificate on success, survivor dump otherwise).
    #[arg(long)]
    out: PathBuf,
    /// Optional per-depth run report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate file.
    cert: PathBuf,
    /// Cross-check against this source config instead of the embedded one.
    #[arg(long)]
    x: Option<PathBuf>,
    /// Cross-check against this target config instead of the embedded one.
    #[arg(long)]
    y: Option<PathBuf>,
    /// Replay precision (defaults to the certificate's recorded one).
    #[arg(long)]
    at_precision: Option<u32>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long, default_value_t = 3)]
    candidate_depth: u32,
    #[arg(long, default_value_t = 6)]
    verify_depth: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    /// Comma-separated ratios in (0,1), e.g. "1/3,1/4,1/5".
    #[arg(long)]
    ratios: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpanArgs {
    /// Ratio whose log-span membership is tested.
    #[arg(long)]
    target: String,
    /// Comma-separated basis ratios.
    #[arg(long)]
    basis: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiophArgs {
    /// Comma-separated gammas: "log:R" for log of a rational R (use R < 1
    /// for negative values), "rat:Q" for an exact rational.
    #[arg(long)]
    gammas: String,
    /// Exponent c (rational).
    #[arg(long)]
    c: String,
    #[arg(long, default_value_t = 100)]
    n_max: u32,
    /// Coefficient regime: "D" (mixed sign) or "d" (nonnegative).
    #[arg(long, default_value = "D")]
    mode: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of (N, min margin, margin·N^c, status).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct MultirotArgs {
    /// Homogeneous source ratio α in (0,1).
    #[arg(long)]
    alpha: String,
    /// Comma-separated target ratios β_j in (0,1).
    #[arg(long)]
    betas: String,
    #[arg(long, default_value = "0")]
    theta0: String,
    /// Increment choices: "constant:I", "periodic:I,J,…" or "seeded:SEED".
    #[arg(long, default_value = "constant:0")]
    choices: String,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// CSV of (n, theta_n).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check pairwise separation ≥ (σN)^{-c} at this horizon.
    #[arg(long)]
    separation_horizon: Option<u32>,
    /// Exponent for the separation check.
    #[arg(long, default_value = "2")]
    separation_c: String,
}

#[derive(Args)]
struct BoxdimArgs {
    /// Point file: one rational or decimal per line.
    #[arg(long)]
    points: PathBuf,
    /// Comma-separated rational scales, e.g. "1/8,1/16,1/32".
    #[arg(long)]
    scales: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenormArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// The embedding, as "ratio,translation".
    #[arg(long)]
    f: String,
    /// Symbol stream: "constant:I", "periodic:I,J,…" or "seeded:SEED".
    #[arg(long, default_value = "constant:0")]
    stream: String,
    #[arg(long, default_value_t = 6)]
    n_start: u32,
    #[arg(long, default_value_t = 16)]
    n_end: u32,
    /// Re-verify each renormalized map to this depth.
    #[arg(long, default_value_t = 10)]
    reverify: u32,
    /// CSV of (n, k, |jj|, theta, norm).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CpstepArgs {
    /// Atom file: "x,weight" or "x,y,weight" per line (rationals).
    #[arg(long)]
    atoms: PathBuf,
    #[arg(long, default_value_t = 1)]
    level: u32,
    #[arg(long, default_value_t = 1)]
    steps: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON-lines trajectory output.
    #[arg(long)]
    jsonl: Option<PathBuf>,
}

/// Envelope stamped onto every artifact.
#[derive(Serialize)]
struct Meta {
    tool_version: String,
    config_digest: String,
    precision: u32,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    meta: Meta,
    #[serde(flatten)]
    data: T,
}

fn meta_for(config_repr: &str, seed: Option<u64>) -> Meta {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in config_repr.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    Meta {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: format!("{hash:016x}"),
        precision: num::default_precision(),
        seed,
    }
}

/// Comment header stamped onto CSV artifacts.
fn csv_header(meta: &Meta) -> String {
    format!(
        "# selfsim {} digest={} precision={}{}\n",
        meta.tool_version,
        meta.config_digest,
        meta.precision,
        match meta.seed {
            Some(s) => format!(" seed={s}"),
            None => String::new(),
        }
    )
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Load an IFS config (TOML by extension, else JSON), normalize it and
/// certify strong separation.
fn load_system(path: &Path) -> Result<RationalIfs> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: IfsConfig = if path.extension().and_then(|e| e.to_str()) == Some("toml") {
        toml::from_str(&text).with_context(|| format!("parsing TOML {}", path.display()))?
    } else {
        serde_json::from_str(&text).with_context(|| format!("parsing JSON {}", path.display()))?
    };
    let sys = config.to_system().map_err(|e| anyhow!("building system: {e}"))?;
    let mut sys =
        if sys.is_normalized() { sys } else { sys.normalize().map_err(|e| anyhow!("{e}"))? };
    sys.check_strong_separation(16);
    if !sys.separation().is_certified() {
        bail!(
            "strong separation of {} is {:?}; the toolkit requires certified separation",
            path.display(),
            sys.separation()
        );
    }
    Ok(sys)
}

fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|p| Rational::parse(p.trim()).map_err(|e| anyhow!("{e}")))
        .collect()
}

fn parse_choices(s: &str) -> Result<ChoiceSeq> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("choices must look like constant:0, periodic:0,1 or seeded:42"))?;
    match kind {
        "constant" => Ok(ChoiceSeq::Constant(rest.parse()?)),
        "periodic" => Ok(ChoiceSeq::Periodic(
            rest.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>()?,
        )),
        "seeded" => Ok(ChoiceSeq::Seeded(rest.parse()?)),
        other => bail!("unknown choice kind {other:?}"),
    }
}

fn parse_gammas(s: &str) -> Result<Vec<Gamma>> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            if let Some(r) = item.strip_prefix("log:") {
                Ok(Gamma::LogOfRational(Rational::parse(r).map_err(|e| anyhow!("{e}"))?))
            } else if let Some(q) = item.strip_prefix("rat:") {
                Ok(Gamma::Exact(Rational::parse(q).map_err(|e| anyhow!("{e}"))?))
            } else {
                bail!("gamma {item:?} must be log:R or rat:Q")
            }
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(p) = cli.precision {
        num::set_default_precision(p);
    }
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_BAD_CONFIG)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Certify(args) => cmd_certify(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Search(args) => cmd_search(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Span(args) => cmd_span(args),
        Command::Dioph(args) => cmd_dioph(args),
        Command::Multirot(args) => cmd_multirot(args),
        Command::Boxdim(args) => cmd_boxdim(args),
        Command::Renorm(args) => cmd_renorm(args),
        Command::Cpstep(args) => cmd_cpstep(args),
    }
}

fn cmd_certify(args: CertifyArgs) -> Result<ExitCode> {
    let x = load_system(&args.x)?;
    let y = load_system(&args.y)?;
    let budget = CertifyBudget {
        max_depth: args.max_depth,
        witness_depth: args.witness_depth,
        cover_depth: args.cover_depth,
        max_cells: args.budget,
        endpoint_witnesses: args.endpoint_witnesses,
        orientation_preserving_only: args.orientation_preserving,
        candidate_verify_depth: args.probe_candidates,
    };
    let config_repr = format!(
        "certify x={:?} y={:?} budget={budget:?}",
        IfsConfig::from_system(&x),
        IfsConfig::from_system(&y)
    );
    let (outcome, report) = certify_empty(&x, &y, &budget).map_err(|e| anyhow!("{e}"))?;
    if let Some(report_path) = &args.report {
        write_json(
            Some(report_path),
            &Envelope { meta: meta_for(&config_repr, None), data: &report },
        )?;
    }
    match outcome {
        CertifyOutcome::Empty(cert) => {
            fs::write(&args.out, cert.to_json() + "\n")
                .with_context(|| format!("writing {}", args.out.display()))?;
            println!(
                "empty: certified with {} leaves at precision {}",
                cert.leaf_count(),
                cert.precision
            );
            Ok(ExitCode::SUCCESS)
        }
        CertifyOutcome::Unknown(survivors) => {
            #[derive(Serialize)]
            struct Dump<'a> {
                outcome: &'static str,
                survivors: &'a selfsim::embed::SurvivorSet,
                report: &'a selfsim::embed::RunReport,
            }
            write_json(
                Some(&args.out),
                &Envelope {
                    meta: meta_for(&config_repr, None),
                    data: Dump { outcome: "unknown", survivors: &survivors, report: &report },
                },
            )?;
            println!(
                "unknown: {} surviving cells, area {}{}",
                survivors.cells.len(),
                survivors.total_area,
                if survivors.budget_exhausted { " (budget exhausted)" } else { "" }
            );
            Ok(ExitCode::from(EXIT_UNKNOWN))
        }
        CertifyOutcome::NonemptyCandidate { map, verified_depth, survivors } => {
            #[derive(Serialize)]
            struct Candidate<'a> {
                outcome: &'static str,
                ratio: &'a Rational,
                translation: &'a Rational,
                verified_depth: u32,
                surviving_cells: usize,
            }
            write_json(
                Some(&args.out),
                &Envelope {
                    meta: meta_for(&config_repr, None),
                    data: Candidate {
                        outcome: "nonempty-candidate",
                        ratio: &map.ratio,
                        translation: &map.translation,
                        verified_depth,
                        surviving_cells: survivors.cells.len(),
                    },
                },
            )?;
            println!(
                "nonempty candidate: ({}, {}) verified to depth {verified_depth}",
                map.ratio, map.translation
            );
            Ok(ExitCode::from(EXIT_UNKNOWN))
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.cert)
        .with_context(|| format!("reading {}", args.cert.display()))?;
    let cert = Certificate::from_json(&text).map_err(|e| anyhow!("{e}"))?;
    let x = match &args.x {
        Some(p) => load_system(p)?,
        None => embedded_system(&cert.instance.x)?,
    };
    let y = match &args.y {
        Some(p) => load_system(p)?,
        None => embedded_system(&cert.instance.y)?,
    };
    let prec = args.at_precision.unwrap_or(cert.precision);
    match verify_certificate_at(&cert, &x, &y, prec) {
        Ok(()) => {
            println!("verified: {} leaves replayed at precision {prec}", cert.leaf_count());
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("refuted: {e}");
            Ok(ExitCode::from(EXIT_REFUTED))
        }
    }
}

fn embedded_system(config: &IfsConfig) -> Result<RationalIfs> {
    let mut sys = config.to_system().map_err(|e| anyhow!("{e}"))?;
    sys.check_strong_separation(16);
    if !sys.separation().is_certified() {
        bail!("embedded instance fails separation certification");
    }
    Ok(sys)
}

fn cmd_search(args: SearchArgs) -> Result<ExitCode> {
    let x = load_system(&args.x)?;
    let y = load_system(&args.y)?;
    let found = search_embeddings(&x, &y, args.candidate_depth, args.verify_depth, None)
        .map_err(|e| anyhow!("{e}"))?;
    #[derive(Serialize)]
    struct Row<'a> {
        ratio: &'a Rational,
        translation: &'a Rational,
        status: &'a selfsim::embed::EmbedStatus,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        candidates: Vec<Row<'a>>,
        verified: usize,
    }
    let rows: Vec<Row> = found
        .iter()
        .map(|(m, s)| Row { ratio: &m.ratio, translation: &m.translation, status: s })
        .collect();
    let verified = found.iter().filter(|(_, s)| s.is_verified_to(args.verify_depth)).count();
    let config_repr = format!("search {:?} {:?} {} {}", args.x, args.y, args.candidate_depth, args.verify_depth);
    write_json(
        args.out.as_deref(),
        &Envelope { meta: meta_for(&config_repr, None), data: Out { candidates: rows, verified } },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_rank(args: RankArgs) -> Result<ExitCode> {
    let ratios = parse_rational_list(&args.ratios)?;
    let rank = log_rank(&ratios).map_err(|e| anyhow!("{e}"))?;
    #[derive(Serialize)]
    struct Out {
        ratios: Vec<String>,
        rank: usize,
    }
    write_json(
        args.out.as_deref(),
        &Envelope {
            meta: meta_for(&args.ratios, None),
            data: Out { ratios: ratios.iter().map(|r| r.to_string()).collect(), rank },
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_span(args: SpanArgs) -> Result<ExitCode> {
    let target = Rational::parse(&args.target).map_err(|e| anyhow!("{e}"))?;
    let basis = parse_rational_list(&args.basis)?;
    let witness = in_log_span(&target, &basis).map_err(|e| anyhow!("{e}"))?;
    #[derive(Serialize)]
    struct Out {
        target: String,
        basis: Vec<String>,
        in_span: bool,
        coefficients: Option<Vec<String>>,
    }
    let config = format!("span {} {}", args.target, args.basis);
    write_json(
        args.out.as_deref(),
        &Envelope {
            meta: meta_for(&config, None),
            data: Out {
                target: target.to_string(),
                basis: basis.iter().map(|b| b.to_string()).collect(),
                in_span: witness.is_some(),
                coefficients: witness.map(|w| w.iter().map(|c| c.to_string()).collect()),
            },
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_dioph(args: DiophArgs) -> Result<ExitCode> {
    let gammas = parse_gammas(&args.gammas)?;
    let c = Rational::parse(&args.c).map_err(|e| anyhow!("{e}"))?;
    let report = match args.mode.as_str() {
        "D" => check_condition_big_d(&gammas, &c, args.n_max),
        "d" => check_condition_small_d(&gammas, &c, args.n_max),
        other => bail!("mode must be D or d, got {other:?}"),
    }
    .map_err(|e| anyhow!("{e}"))?;
    let config = format!("dioph {} c={} n={} mode={}", args.gammas, args.c, args.n_max, args.mode);
    if let Some(csv_path) = &args.csv {
        let text = csv_header(&meta_for(&config, None)) + &report.csv();
        fs::write(csv_path, text)
            .with_context(|| format!("writing {}", csv_path.display()))?;
    }
    let violations = report.violations.len();
    write_json(
        args.out.as_deref(),
        &Envelope { meta: meta_for(&config, None), data: &report },
    )?;
    eprintln!(
        "scan done: {} horizons, {} violations, {} undecided",
        report.rows.len(),
        violations,
        report.undecided.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_multirot(args: MultirotArgs) -> Result<ExitCode> {
    let alpha = Rational::parse(&args.alpha).map_err(|e| anyhow!("{e}"))?;
    let betas = parse_rational_list(&args.betas)?;
    let theta0 = Rational::parse(&args.theta0).map_err(|e| anyhow!("{e}"))?;
    let choices = parse_choices(&args.choices)?;
    let lambda = lambda_of(&alpha, &betas).map_err(|e| anyhow!("{e}"))?;
    let orbit = generate_multirotation(&lambda, &theta0, &choices, args.n)
        .map_err(|e| anyhow!("{e}"))?;
    let seed = match &choices {
        ChoiceSeq::Seeded(s) => Some(*s),
        _ => None,
    };
    let config = format!(
        "multirot a={} b={} t0={} choices={} n={}",
        args.alpha, args.betas, args.theta0, args.choices, args.n
    );
    if let Some(csv) = &args.csv {
        let mut text = csv_header(&meta_for(&config, seed));
        text.push_str("n,theta\n");
        for i in 0..orbit.len() {
            text.push_str(&format!("{},{}\n", i, orbit.theta_f64(i)));
        }
        fs::write(csv, text).with_context(|| format!("writing {}", csv.display()))?;
    }
    #[derive(Serialize)]
    struct Out<'a> {
        lambda: &'a selfsim::orbits::LambdaSet,
        length: usize,
        validated: bool,
        separation: Option<selfsim::orbits::SeparationCheck>,
    }
    let separation = match args.separation_horizon {
        Some(h) => {
            let c = Rational::parse(&args.separation_c).map_err(|e| anyhow!("{e}"))?;
            Some(check_separation(&orbit, &lambda, &c, h).map_err(|e| anyhow!("{e}"))?)
        }
        None => None,
    };
    write_json(
        args.out.as_deref(),
        &Envelope {
            meta: meta_for(&config, seed),
            data: Out {
                lambda: &lambda,
                length: orbit.len(),
                validated: orbit.validate(&lambda),
                separation,
            },
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_boxdim(args: BoxdimArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.points)
        .with_context(|| format!("reading {}", args.points.display()))?;
    let points: Vec<Rational> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Rational::parse(l.trim()).map_err(|e| anyhow!("line {l:?}: {e}")))
        .collect::<Result<_>>()?;
    let scales = parse_rational_list(&args.scales)?;
    let est = box_dim_estimate(&points, &scales).map_err(|e| anyhow!("{e}"))?;
    let config = format!("boxdim {:?} {}", args.points, args.scales);
    write_json(args.out.as_deref(), &Envelope { meta: meta_for(&config, None), data: &est })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_renorm(args: RenormArgs) -> Result<ExitCode> {
    let x = load_system(&args.x)?;
    let y = load_system(&args.y)?;
    let parts: Vec<&str> = args.f.split(',').collect();
    if parts.len() != 2 {
        bail!("--f must be \"ratio,translation\"");
    }
    let f = selfsim::RationalMap::new(
        Rational::parse(parts[0].trim()).map_err(|e| anyhow!("{e}"))?,
        Rational::parse(parts[1].trim()).map_err(|e| anyhow!("{e}"))?,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let choices = parse_choices(&args.stream)?;
    let arity = x.len();
    let materialized: Vec<u8> = match &choices {
        ChoiceSeq::Constant(i) => vec![*i as u8; 4096],
        ChoiceSeq::Periodic(p) => (0..4096).map(|k| p[k % p.len()] as u8).collect(),
        ChoiceSeq::Seeded(_) => bail!("renorm streams must be constant or periodic"),
    };
    if materialized.iter().any(|&s| s as usize >= arity) {
        bail!("stream symbol out of range");
    }
    let reverify = if args.reverify == 0 { None } else { Some(args.reverify) };
    let traj = theta_sequence(
        &f,
        &x,
        &y,
        move |k| materialized[k % materialized.len()],
        args.n_start,
        args.n_end,
        reverify,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let config = format!(
        "renorm x={:?} y={:?} f={} stream={} n={}..{}",
        args.x, args.y, args.f, args.stream, args.n_start, args.n_end
    );
    if let Some(csv) = &args.csv {
        let mut text = csv_header(&meta_for(&config, None));
        text.push_str("n,k,jj_len,theta,norm\n");
        for step in &traj.steps {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                step.level,
                step.k,
                step.jj.len(),
                step.theta.to_f64(),
                step.norm
            ));
        }
        fs::write(csv, text).with_context(|| format!("writing {}", csv.display()))?;
    }
    write_json(args.out.as_deref(), &Envelope { meta: meta_for(&config, None), data: &traj })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_cpstep(args: CpstepArgs) -> Result<ExitCode> {
    use rand::SeedableRng;
    let text = fs::read_to_string(&args.atoms)
        .with_context(|| format!("reading {}", args.atoms.display()))?;
    let mut atoms = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        match parts.len() {
            2 => atoms.push((
                vec![Rational::parse(parts[0]).map_err(|e| anyhow!("{e}"))?],
                Rational::parse(parts[1]).map_err(|e| anyhow!("{e}"))?,
            )),
            3 => atoms.push((
                vec![
                    Rational::parse(parts[0]).map_err(|e| anyhow!("{e}"))?,
                    Rational::parse(parts[1]).map_err(|e| anyhow!("{e}"))?,
                ],
                Rational::parse(parts[2]).map_err(|e| anyhow!("{e}"))?,
            )),
            _ => bail!("atom line {line:?} must be x,w or x,y,w"),
        }
    }
    let mut measure = AtomicMeasure::new(atoms).map_err(|e| anyhow!("{e}"))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let config = format!("cpstep {:?} level={} steps={}", args.atoms, args.level, args.steps);
    let meta = meta_for(&config, Some(args.seed));
    let mut lines = format!("{}\n", serde_json::json!({ "meta": {
        "tool_version": meta.tool_version,
        "config_digest": meta.config_digest,
        "precision": meta.precision,
        "seed": args.seed,
    }}));
    for step in 0..args.steps {
        let (cell, next) = measure.cp_step(args.level, &mut rng).map_err(|e| anyhow!("{e}"))?;
        lines.push_str(&format!(
            "{}\n",
            serde_json::json!({
                "step": step,
                "cell": cell,
                "atoms": next.atoms().len(),
            })
        ));
        measure = next;
    }
    match &args.jsonl {
        Some(p) => fs::write(p, lines).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{lines}"),
    }
    Ok(ExitCode::SUCCESS)
}
