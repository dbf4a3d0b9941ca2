//! Job documents, parameter resolution and execution.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fillnorm::bounds::{check_norm_equivalence, operator_check, EquivalenceParams};
use fillnorm::chain::{literal_to_formal, ChainLiteral};
use fillnorm::chain_map::ChainMapSpec;
use fillnorm::complex::ComplexSpec;
use fillnorm::config::Caps;
use fillnorm::document::{
    chain_map_fingerprint, complex_fingerprint, load_chain_map, load_complex, load_presentation,
    parse_document, presentation_fingerprint,
};
use fillnorm::enumerate::EnumerationMode;
use fillnorm::fill::{escalate_until_stable, FillingCertificate};
use fillnorm::fv::{dehn_consistency, fv_table, DehnReport, FvTable, RadiusPolicy};
use fillnorm::group::GroupPresentation;
use fillnorm::subgroup::{subgroup_inequality_check, Retraction};
use fillnorm::{Error, ErrorKind, Result};
use serde::{Deserialize, Serialize};

use crate::render;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Fill,
    Fv,
    OperatorBound,
    Equivalence,
    DehnConsistency,
    SubgroupCheck,
    Confluence,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Fill => "fill",
            Task::Fv => "fv",
            Task::OperatorBound => "operator-bound",
            Task::Equivalence => "equivalence",
            Task::DehnConsistency => "dehn-consistency",
            Task::SubgroupCheck => "subgroup-check",
            Task::Confluence => "confluence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Document references: built-in names or JSON paths relative to the job.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub complex: Option<String>,
    pub presentation: Option<String>,
    pub map: Option<String>,
    pub map_back: Option<String>,
    pub retraction: Option<String>,
    pub target: Option<ChainLiteral>,
}

/// Caps requested by a job or config file; absent fields are inherited.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsPatch {
    pub max_ball_size: Option<usize>,
    pub max_ilp_nodes: Option<u64>,
    pub max_enumeration_count: Option<usize>,
    pub max_search_nodes: Option<u64>,
    pub max_exhaustive_k: Option<u64>,
}

impl CapsPatch {
    /// Applies the patch to `base`. Raising a limit needs `allow_raise`.
    pub fn apply(&self, base: &Caps, allow_raise: bool, origin: &str) -> Result<Caps> {
        let caps = Caps {
            max_ball_size: self.max_ball_size.unwrap_or(base.max_ball_size),
            max_ilp_nodes: self.max_ilp_nodes.unwrap_or(base.max_ilp_nodes),
            max_enumeration_count: self.max_enumeration_count.unwrap_or(base.max_enumeration_count),
            max_search_nodes: self.max_search_nodes.unwrap_or(base.max_search_nodes),
            max_exhaustive_k: self.max_exhaustive_k.unwrap_or(base.max_exhaustive_k),
        };
        if !allow_raise && !caps.within(base) {
            return Err(Error::Document {
                path: origin.to_string(),
                field: "caps".into(),
                reason: "raises a configured cap; pass --cap-override to allow it".into(),
            });
        }
        Ok(caps)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub dim: Option<usize>,
    pub k_max: Option<u64>,
    pub radius: Option<usize>,
    pub radius_b: Option<usize>,
    pub fill_radius: Option<usize>,
    pub max_radius: Option<usize>,
    pub g_k_max: Option<u64>,
    pub g_radius: Option<usize>,
    pub mode: Option<EnumerationMode>,
    pub samples: Option<usize>,
    pub enumerate_k: Option<u64>,
    pub c_cap: Option<u64>,
    pub bound: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub caps: Option<CapsPatch>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDoc {
    pub version: u32,
    pub task: Task,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub parameters: Params,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub version: u32,
    #[serde(default)]
    pub caps: CapsPatch,
}

pub fn read_job(path: &Path) -> Result<JobDoc> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Document {
        path: shown.clone(),
        field: String::new(),
        reason: format!("cannot read: {e}"),
    })?;
    parse_document(&shown, &text)
}

pub fn read_config(path: &Path) -> Result<ConfigDoc> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Document {
        path: shown.clone(),
        field: String::new(),
        reason: format!("cannot read: {e}"),
    })?;
    parse_document(&shown, &text)
}

/// Fully resolved parameters. Serialized into the cache key.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum Plan {
    Fill { complex: String, target: ChainLiteral, radius: usize, max_radius: usize },
    Fv { complex: String, dim: usize, k_max: u64, radius: usize, fill_radius: usize, mode: EnumerationMode },
    OperatorBound { map: String, dims: Vec<usize>, samples: usize, radius: usize, radius_b: usize, seed: u64 },
    Equivalence {
        map: String,
        map_back: String,
        dim: usize,
        samples: usize,
        radius: usize,
        radius_b: usize,
        enumerate_k: u64,
        seed: u64,
    },
    DehnConsistency { complex: String, k_max: u64, radius: usize, fill_radius: usize },
    SubgroupCheck {
        map: String,
        dim: usize,
        k_max: u64,
        radius: usize,
        g_k_max: u64,
        g_radius: usize,
        c_cap: u64,
        retraction: Option<String>,
        samples: usize,
        seed: u64,
    },
    Confluence { presentation: String, bound: Option<usize> },
}

fn missing(path: &str, field: &str) -> Error {
    Error::Document { path: path.to_string(), field: field.to_string(), reason: "required for this task".into() }
}

/// Radius holding every cycle of norm `k` anchored at the identity.
fn default_radius(k: u64) -> usize {
    ((k / 2) as usize).max(1)
}

impl Plan {
    /// Resolves defaults. `origin` names the job for error messages.
    pub fn resolve(job: &JobDoc, origin: &str) -> Result<Plan> {
        let i = &job.inputs;
        let p = &job.parameters;
        let need = |v: &Option<String>, f: &str| v.clone().ok_or_else(|| missing(origin, f));
        let seed = p.seed.unwrap_or(0);
        let plan = match job.task {
            Task::Fill => {
                let target = i.target.clone().ok_or_else(|| missing(origin, "inputs.target"))?;
                let radius = p.radius.unwrap_or(0);
                Plan::Fill {
                    complex: need(&i.complex, "inputs.complex")?,
                    target,
                    radius,
                    max_radius: p.max_radius.unwrap_or(radius + 4),
                }
            }
            Task::Fv => {
                let k_max = p.k_max.unwrap_or(8);
                let radius = p.radius.unwrap_or(default_radius(k_max));
                Plan::Fv {
                    complex: need(&i.complex, "inputs.complex")?,
                    dim: p.dim.unwrap_or(1),
                    k_max,
                    radius,
                    fill_radius: p.fill_radius.unwrap_or(radius),
                    mode: p.mode.unwrap_or(EnumerationMode::Exhaustive),
                }
            }
            Task::OperatorBound => {
                let radius = p.radius.unwrap_or(2);
                Plan::OperatorBound {
                    map: need(&i.map, "inputs.map")?,
                    dims: p.dim.map(|d| vec![d]).unwrap_or_default(),
                    samples: p.samples.unwrap_or(500),
                    radius,
                    radius_b: p.radius_b.unwrap_or(2 * radius + 1),
                    seed,
                }
            }
            Task::Equivalence => {
                let radius = p.radius.unwrap_or(3);
                Plan::Equivalence {
                    map: need(&i.map, "inputs.map")?,
                    map_back: need(&i.map_back, "inputs.map_back")?,
                    dim: p.dim.unwrap_or(1),
                    samples: p.samples.unwrap_or(60),
                    radius,
                    radius_b: p.radius_b.unwrap_or(radius),
                    enumerate_k: p.enumerate_k.unwrap_or(6),
                    seed,
                }
            }
            Task::DehnConsistency => {
                let k_max = p.k_max.unwrap_or(8);
                let radius = p.radius.unwrap_or(default_radius(k_max));
                Plan::DehnConsistency {
                    complex: need(&i.complex, "inputs.complex")?,
                    k_max,
                    radius,
                    fill_radius: p.fill_radius.unwrap_or(radius),
                }
            }
            Task::SubgroupCheck => {
                let k_max = p.k_max.unwrap_or(8);
                let g_k_max = p.g_k_max.unwrap_or(k_max + 1);
                Plan::SubgroupCheck {
                    map: need(&i.map, "inputs.map")?,
                    dim: p.dim.unwrap_or(1),
                    k_max,
                    radius: p.radius.unwrap_or(default_radius(k_max)),
                    g_k_max,
                    g_radius: p.g_radius.unwrap_or(default_radius(g_k_max)),
                    c_cap: p.c_cap.unwrap_or(10),
                    retraction: i.retraction.clone(),
                    samples: p.samples.unwrap_or(200),
                    seed,
                }
            }
            Task::Confluence => {
                let presentation = match (&i.presentation, &i.complex) {
                    (Some(p), _) => p.clone(),
                    (None, Some(c)) => format!("complex:{c}"),
                    (None, None) => return Err(missing(origin, "inputs.presentation")),
                };
                Plan::Confluence { presentation, bound: p.bound }
            }
        };
        Ok(plan)
    }

    pub fn task(&self) -> Task {
        match self {
            Plan::Fill { .. } => Task::Fill,
            Plan::Fv { .. } => Task::Fv,
            Plan::OperatorBound { .. } => Task::OperatorBound,
            Plan::Equivalence { .. } => Task::Equivalence,
            Plan::DehnConsistency { .. } => Task::DehnConsistency,
            Plan::SubgroupCheck { .. } => Task::SubgroupCheck,
            Plan::Confluence { .. } => Task::Confluence,
        }
    }
}

/// Documents a plan refers to, loaded and validated.
pub struct Loaded {
    pub complex: Option<Arc<ComplexSpec>>,
    pub presentation: Option<Arc<GroupPresentation>>,
    pub map: Option<Arc<ChainMapSpec>>,
    pub map_back: Option<Arc<ChainMapSpec>>,
    pub retraction: Option<Arc<ChainMapSpec>>,
}

impl Loaded {
    pub fn load(plan: &Plan, base: &Path) -> Result<Loaded> {
        let complex = |r: &str| load_complex(r, base).map(Arc::new);
        let map = |r: &str| load_chain_map(r, base).map(Arc::new);
        let mut l = Loaded { complex: None, presentation: None, map: None, map_back: None, retraction: None };
        match plan {
            Plan::Fill { complex: c, .. } | Plan::Fv { complex: c, .. } | Plan::DehnConsistency { complex: c, .. } => {
                l.complex = Some(complex(c)?);
            }
            Plan::OperatorBound { map: m, .. } => l.map = Some(map(m)?),
            Plan::Equivalence { map: m, map_back: b, .. } => {
                l.map = Some(map(m)?);
                l.map_back = Some(map(b)?);
            }
            Plan::SubgroupCheck { map: m, retraction, .. } => {
                l.map = Some(map(m)?);
                if let Some(r) = retraction {
                    l.retraction = Some(map(r)?);
                }
            }
            Plan::Confluence { presentation, .. } => {
                l.presentation = Some(match presentation.strip_prefix("complex:") {
                    Some(c) => complex(c)?.group().clone(),
                    None => Arc::new(load_presentation(presentation, base)?),
                });
            }
        }
        Ok(l)
    }

    /// Content description of every loaded document.
    pub fn fingerprint(&self) -> String {
        let mut s = String::new();
        if let Some(c) = &self.complex {
            s.push_str(&complex_fingerprint(c));
        }
        if let Some(p) = &self.presentation {
            s.push_str(&presentation_fingerprint(p));
        }
        for m in [&self.map, &self.map_back, &self.retraction].into_iter().flatten() {
            s.push_str(&chain_map_fingerprint(m));
        }
        s
    }
}

/// How a finished computation should be reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Ok,
    /// A property that must hold failed on the computed data.
    Inconsistent(String),
    /// The input was rejected after inspection (e.g. a non-confluent system).
    Invalid(String),
    /// A resource limit cut the computation short; the body is partial.
    Partial(String),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Ok => "ok",
            Verdict::Inconsistent(_) => "inconsistent",
            Verdict::Invalid(_) => "invalid",
            Verdict::Partial(_) => "partial",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Ok => 0,
            Verdict::Invalid(_) => 2,
            Verdict::Partial(_) => 3,
            Verdict::Inconsistent(_) => 4,
        }
    }
}

pub struct Outcome {
    pub body: String,
    pub verdict: Verdict,
}

pub struct Settings {
    pub caps: Caps,
    pub format: Format,
    pub timings: bool,
}

fn is_resource(e: &Error) -> bool {
    e.kind() == ErrorKind::ResourceLimit
}

/// Runs `compute` for `k_max`, and on a resource limit retries smaller
/// bounds so that the rows that fit are still reported.
fn with_partial<T>(k_max: u64, compute: impl Fn(u64) -> Result<T>) -> Result<(T, Option<String>)> {
    match compute(k_max) {
        Ok(t) => Ok((t, None)),
        Err(e) if is_resource(&e) => {
            for k in (1..k_max).rev() {
                match compute(k) {
                    Ok(t) => return Ok((t, Some(format!("rows above k={k} stopped: {e}")))),
                    Err(e2) if is_resource(&e2) => continue,
                    Err(e2) => return Err(e2),
                }
            }
            Err(e)
        }
        Err(e) => Err(e),
    }
}

pub fn execute(plan: &Plan, docs: &Loaded, s: &Settings) -> Result<Outcome> {
    let caps = &s.caps;
    match plan {
        Plan::Fill { target, radius, max_radius, .. } => {
            let spec = docs.complex.as_ref().expect("complex loaded");
            let formal = literal_to_formal(spec, target)?;
            let dim = match formal.iter().next() {
                Some((o, _, _)) => spec.orbits()[o].dim,
                None => return Err(Error::InvalidInput("empty target".into())),
            };
            let certs: Vec<FillingCertificate> = escalate_until_stable(spec, &formal, dim, *radius, *max_radius, caps)?;
            let body = render::fill(spec, &formal, dim, &certs, s)?;
            Ok(Outcome { body, verdict: Verdict::Ok })
        }
        Plan::Fv { dim, k_max, radius, fill_radius, mode, .. } => {
            let spec = docs.complex.as_ref().expect("complex loaded");
            let policy = RadiusPolicy { enumeration: *radius, fill: *fill_radius };
            let (mut table, partial): (FvTable, _) =
                with_partial(*k_max, |k| fv_table(spec, *dim, k, *mode, policy, caps))?;
            if let Some(msg) = &partial {
                table.notes.push(format!("partial: {msg}"));
            }
            let verdict = match partial {
                Some(m) => Verdict::Partial(m),
                None if !monotone(&table) => Verdict::Inconsistent("exact rows are not monotone in k".into()),
                None => Verdict::Ok,
            };
            Ok(Outcome { body: render::fv(&table, s)?, verdict })
        }
        Plan::OperatorBound { dims, samples, radius, radius_b, seed, .. } => {
            let map = docs.map.as_ref().expect("map loaded");
            let src = map.source().instantiate_window(*radius, caps.max_ball_size)?;
            let dst = map.target().instantiate_window(*radius_b, caps.max_ball_size)?;
            let dims: Vec<usize> =
                if dims.is_empty() { (0..=map.source().top_dim()).collect() } else { dims.clone() };
            let mut checks = Vec::new();
            for d in dims {
                checks.push(operator_check(map, d, &src, &dst, *samples, *seed)?);
            }
            let failures: usize = checks.iter().map(|c| c.failures).sum();
            let verdict = if failures == 0 {
                Verdict::Ok
            } else {
                Verdict::Inconsistent(format!("{failures} sampled chains exceed the operator bound"))
            };
            Ok(Outcome { body: render::operator(&checks, s)?, verdict })
        }
        Plan::Equivalence { dim, samples, radius, radius_b, enumerate_k, seed, .. } => {
            let a = docs.map.as_ref().expect("map loaded");
            let b = docs.map_back.as_ref().expect("map loaded");
            let params = EquivalenceParams {
                dim: *dim,
                samples: *samples,
                radius_a: *radius,
                radius_b: *radius_b,
                enumerate_k: *enumerate_k,
                seed: *seed,
            };
            let report = check_norm_equivalence(a, b, params, caps)?;
            let verdict = if report.holds() {
                Verdict::Ok
            } else {
                Verdict::Inconsistent("a sampled cycle violates a directional bound".into())
            };
            Ok(Outcome { body: render::equivalence(&report, s)?, verdict })
        }
        Plan::DehnConsistency { k_max, radius, fill_radius, .. } => {
            let spec = docs.complex.as_ref().expect("complex loaded");
            let policy = RadiusPolicy { enumeration: *radius, fill: *fill_radius };
            let (mut report, partial): (DehnReport, _) =
                with_partial(*k_max, |k| dehn_consistency(spec, k, policy, caps))?;
            if let Some(msg) = &partial {
                report.notes.push(format!("partial: {msg}"));
            }
            let verdict = match partial {
                Some(m) => Verdict::Partial(m),
                None if !report.holds() => Verdict::Inconsistent("FV(k) exceeds k·D(k) on some row".into()),
                None => Verdict::Ok,
            };
            Ok(Outcome { body: render::dehn(&report, s)?, verdict })
        }
        Plan::SubgroupCheck { dim, k_max, radius, g_k_max, g_radius, c_cap, samples, seed, .. } => {
            let map = docs.map.as_ref().expect("map loaded");
            let mode = EnumerationMode::Exhaustive;
            let h = fv_table(map.source(), *dim, *k_max, mode, RadiusPolicy::fixed(*radius), caps)?;
            let g = fv_table(map.target(), *dim, *g_k_max, mode, RadiusPolicy::fixed(*g_radius), caps)?;
            let retraction = docs.retraction.as_ref().map(|r| Retraction {
                map: r,
                radius: *g_radius,
                samples: *samples,
                seed: *seed,
            });
            let report = subgroup_inequality_check(h, g, map, *c_cap, retraction, caps)?;
            let verdict = match &report.retraction {
                Some(r) if r.failures > 0 => {
                    Verdict::Inconsistent(format!("{} sampled chains exceed the retraction bound", r.failures))
                }
                _ => Verdict::Ok,
            };
            Ok(Outcome { body: render::subgroup(&report, s)?, verdict })
        }
        Plan::Confluence { bound, .. } => {
            let p = docs.presentation.as_ref().expect("presentation loaded");
            let report = p.verify_confluence(bound.unwrap_or_else(|| p.default_confluence_bound()));
            let verdict = if report.budget_exhausted {
                Verdict::Partial("confluence check stopped at its word budget".into())
            } else if !report.violations.is_empty() {
                Verdict::Invalid(format!("{} words have several normal forms", report.violations.len()))
            } else {
                Verdict::Ok
            };
            Ok(Outcome { body: render::confluence(&report, s)?, verdict })
        }
    }
}

fn monotone(t: &FvTable) -> bool {
    let exact = t.exact_rows();
    exact.windows(2).all(|p| p[0].1 <= p[1].1)
}

/// Directory that relative references in a job resolve against.
pub fn job_base(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}
