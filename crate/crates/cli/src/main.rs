//! `fillnorm`: batch front end for filling norms and filling-volume tables.

mod cache;
mod job;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use fillnorm::chain::ChainLiteral;
use fillnorm::config::Caps;
use fillnorm::enumerate::EnumerationMode;
use fillnorm::report::header_line;
use fillnorm::{builtins, Error, ErrorKind};
use serde::Serialize;

use job::{Format, Inputs, JobDoc, Loaded, Params, Plan, Settings, Task, Verdict};

#[derive(Parser)]
#[command(name = "fillnorm", version, about = "Exact filling norms and filling-volume tables on windows of cell complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Output directory for reports and the cache.
    #[arg(long, global = true, env = "FILLNORM_OUT", default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Allow caps above the configured ones.
    #[arg(long, global = true)]
    cap_override: bool,
    /// Config document with caps.
    #[arg(long, global = true, env = "FILLNORM_CONFIG")]
    config: Option<PathBuf>,
    /// Put per-row times into report bodies.
    #[arg(long, global = true)]
    timings: bool,
    /// Recompute even if a cached result exists.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Args, Default)]
struct Common {
    /// Built-in name or complex document.
    #[arg(long)]
    complex: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    max_k: Option<u64>,
    #[arg(long)]
    radius: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal filling of one cycle, escalating the window radius.
    Fill {
        #[command(flatten)]
        common: Common,
        /// Cycle as JSON `[[coef, orbit, word], ...]`.
        #[arg(long)]
        target: String,
        #[arg(long)]
        max_radius: Option<usize>,
    },
    /// Filling-volume table FV(k) for k = 1..max-k.
    Fv {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        fill_radius: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<EnumerationMode>,
    },
    /// Operator bound of a chain map, checked on random chains.
    OperatorBound {
        #[arg(long)]
        map: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
        /// Radius of the target window.
        #[arg(long)]
        radius_b: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Two-sided comparison of filling norms through a pair of chain maps.
    Equivalence {
        #[arg(long)]
        map: String,
        #[arg(long)]
        map_back: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        radius_b: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        enumerate_k: Option<u64>,
    },
    /// Compares FV²(k) with k times the largest circuit filling.
    DehnConsistency {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        fill_radius: Option<usize>,
    },
    /// Fits FV_H(k) ≤ C·FV_G(Ck+C) + Ck + C for an embedding H → G.
    SubgroupCheck {
        /// Embedding chain map.
        #[arg(long)]
        map: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        max_k: Option<u64>,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        g_max_k: Option<u64>,
        #[arg(long)]
        g_radius: Option<usize>,
        #[arg(long)]
        c_cap: Option<u64>,
        /// Optional retraction map G → H.
        #[arg(long)]
        retraction: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Checks that the rewriting system has unique normal forms up to a length.
    Confluence {
        #[arg(long, conflicts_with = "complex")]
        presentation: Option<String>,
        #[arg(long)]
        complex: Option<String>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Prints the built-in presentations, complexes and chain maps.
    ListBuiltins,
    /// Runs a job document.
    Run { job: PathBuf },
}

fn parse_mode(s: &str) -> Result<EnumerationMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Serialize)]
struct ErrorObject {
    kind: &'static str,
    exit_code: i32,
    message: String,
    path: Option<String>,
    field: Option<String>,
}

fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Validation => 2,
        ErrorKind::ResourceLimit => 3,
        ErrorKind::Inconsistency => 4,
    }
}

fn report_error(e: &Error) -> ExitCode {
    let code = exit_code(e.kind());
    let (path, field) = match e {
        Error::Document { path, field, .. } => (Some(path.clone()), Some(field.clone())),
        _ => (None, None),
    };
    let kind = match e.kind() {
        ErrorKind::Validation => "validation",
        ErrorKind::ResourceLimit => "resource-limit",
        ErrorKind::Inconsistency => "inconsistency",
    };
    let obj = ErrorObject { kind, exit_code: code, message: e.to_string(), path, field };
    eprintln!("{}", serde_json::json!({ "error": obj }));
    ExitCode::from(code as u8)
}

/// Builds the job a subcommand stands for.
fn job_from_command(cmd: Command, seed: Option<u64>) -> Result<(JobDoc, PathBuf), Error> {
    let here = PathBuf::from(".");
    let mut inputs = Inputs::default();
    let mut p = Params { seed, ..Params::default() };
    let set_common = |c: Common, inputs: &mut Inputs, p: &mut Params| {
        inputs.complex = c.complex;
        p.dim = c.dim;
        p.k_max = c.max_k;
        p.radius = c.radius;
    };
    let task = match cmd {
        Command::Fill { common, target, max_radius } => {
            set_common(common, &mut inputs, &mut p);
            let lit: ChainLiteral = serde_json::from_str(&target).map_err(|e| Error::Document {
                path: "--target".into(),
                field: String::new(),
                reason: format!("expected [[coef, orbit, word], ...]: {e}"),
            })?;
            inputs.target = Some(lit);
            p.max_radius = max_radius;
            Task::Fill
        }
        Command::Fv { common, fill_radius, mode } => {
            set_common(common, &mut inputs, &mut p);
            p.fill_radius = fill_radius;
            p.mode = mode;
            Task::Fv
        }
        Command::OperatorBound { map, dim, radius, radius_b, samples } => {
            inputs.map = Some(map);
            (p.dim, p.radius, p.radius_b, p.samples) = (dim, radius, radius_b, samples);
            Task::OperatorBound
        }
        Command::Equivalence { map, map_back, dim, radius, radius_b, samples, enumerate_k } => {
            inputs.map = Some(map);
            inputs.map_back = Some(map_back);
            (p.dim, p.radius, p.radius_b, p.samples, p.enumerate_k) = (dim, radius, radius_b, samples, enumerate_k);
            Task::Equivalence
        }
        Command::DehnConsistency { common, fill_radius } => {
            set_common(common, &mut inputs, &mut p);
            p.fill_radius = fill_radius;
            Task::DehnConsistency
        }
        Command::SubgroupCheck { map, dim, max_k, radius, g_max_k, g_radius, c_cap, retraction, samples } => {
            inputs.map = Some(map);
            inputs.retraction = retraction;
            (p.dim, p.k_max, p.radius, p.g_k_max, p.g_radius, p.c_cap, p.samples) =
                (dim, max_k, radius, g_max_k, g_radius, c_cap, samples);
            Task::SubgroupCheck
        }
        Command::Confluence { presentation, complex, bound } => {
            inputs.presentation = presentation;
            inputs.complex = complex;
            p.bound = bound;
            Task::Confluence
        }
        Command::ListBuiltins | Command::Run { .. } => unreachable!("handled before"),
    };
    Ok((JobDoc { version: 1, task, inputs, parameters: p }, here))
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'a str,
    task: &'a str,
    key: &'a str,
    cached: bool,
    format: &'a str,
    caps: &'a Caps,
    exit_code: i32,
    verdict: &'a Verdict,
    elapsed_ms: u64,
    unix_time: u64,
}

fn write_out(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let g = cli.global;
    let mut caps = Caps::default();
    if let Some(path) = &g.config {
        let cfg = job::read_config(path)?;
        caps = cfg.caps.apply(&caps, g.cap_override, &path.display().to_string())?;
    }
    let (job, base, origin) = match cli.command {
        Command::ListBuiltins => {
            let body = render::catalog(&builtins::catalog()?, g.format.unwrap_or(Format::Csv))?;
            print!("{body}");
            return Ok(ExitCode::SUCCESS);
        }
        Command::Run { job } => {
            let mut doc = job::read_job(&job)?;
            if g.seed.is_some() {
                doc.parameters.seed = g.seed;
            }
            (doc, job::job_base(&job), job.display().to_string())
        }
        cmd => {
            let (doc, base) = job_from_command(cmd, g.seed)?;
            (doc, base, "command line".to_string())
        }
    };
    if let Some(patch) = &job.parameters.caps {
        caps = patch.apply(&caps, g.cap_override, &origin)?;
    }
    let format = g.format.or(job.parameters.format).unwrap_or(Format::Csv);
    let plan = Plan::resolve(&job, &origin)?;
    let docs = Loaded::load(&plan, &base)?;
    let key = cache::key(&plan, &docs.fingerprint(), &caps, format, g.timings);
    let settings = Settings { caps: caps.clone(), format, timings: g.timings };

    let start = Instant::now();
    let (entry, cached) = match (!g.no_cache).then(|| cache::lookup(&g.out, &key)).flatten() {
        Some(e) => (e, true),
        None => {
            let o = job::execute(&plan, &docs, &settings)?;
            let entry = cache::Entry { verdict: o.verdict, body: o.body };
            if !matches!(entry.verdict, Verdict::Partial(_)) {
                cache::store(&g.out, &key, &entry)?;
            }
            (entry, false)
        }
    };
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let code = entry.verdict.exit_code();
    let task = plan.task().name();

    std::fs::create_dir_all(&g.out)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", g.out.display())))?;
    let stem = format!("{task}-{}", &key[..12]);
    let report_path = g.out.join(format!("{stem}.{}", format.ext()));
    let mut text = String::new();
    if format == Format::Csv {
        text.push_str(&header_line(&[
            ("fillnorm", cache::VERSION.to_string()),
            ("task", task.to_string()),
            ("key", key[..12].to_string()),
            ("cached", cached.to_string()),
            ("verdict", entry.verdict.name().to_string()),
            ("elapsed_ms", elapsed_ms.to_string()),
            ("unix_time", unix_time().to_string()),
        ]));
    }
    text.push_str(&entry.body);
    write_out(&report_path, &text)?;
    let meta = Meta {
        version: cache::VERSION,
        task,
        key: &key,
        cached,
        format: format.ext(),
        caps: &caps,
        exit_code: code,
        verdict: &entry.verdict,
        elapsed_ms,
        unix_time: unix_time(),
    };
    let meta_text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Internal(e.to_string()))?;
    write_out(&g.out.join(format!("{stem}.meta.json")), &meta_text)?;

    print!("{text}");
    eprintln!("{} {}", if cached { "cached" } else { "wrote" }, report_path.display());
    match &entry.verdict {
        Verdict::Ok => {}
        Verdict::Inconsistent(m) | Verdict::Invalid(m) | Verdict::Partial(m) => eprintln!("{m}"),
    }
    Ok(ExitCode::from(code as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}
