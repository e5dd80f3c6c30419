//! TOML experiment documents.
//!
//! ```toml
//! phi = 0.12
//! R = 16.0
//! n_runs = 200
//!
//! [scheme]          # or flat: scheme = "cutoff", p_r = 0.01, d_c = 300
//! kind = "cutoff"
//! p_r = 0.01
//! d_c = 300.0
//!
//! [sweep]
//! axis1 = { param = "phi", values = [0.05, 0.10, 0.20] }
//! axis2 = { param = "R", start = 10.0, stop = 40.0, step = 1.0 }
//! ```
//!
//! Unset keys take the documented defaults: `n_nodes = 10000`, `L = 1000`,
//! `boundary = "torus"`, `schedule = "synchronous"`, `seed = "single"`,
//! `cutoff_fraction = 0.85`, `c = 1`, `n_runs = 1000`, `master_seed = 0`,
//! no long-range links. `phi` and `R` are required unless swept.

use std::ops::Range;

use serde::Deserialize;
use toml::{Spanned, Value};

use crate::cascade::{CascadeParams, Schedule, SeedSpec};
use crate::error::{Error, Result};
use crate::geom::BoundaryMode;
use crate::montecarlo::{Axis, ExperimentConfig, SweepParam, SweepSpec};
use crate::smallworld::{LinkKind, LinkScheme};

/// A parsed document: a single experiment, or a sweep when a `[sweep]`
/// table is present.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigDoc {
    Experiment(ExperimentConfig),
    Sweep(SweepSpec),
}

impl ConfigDoc {
    pub fn base(&self) -> &ExperimentConfig {
        match self {
            ConfigDoc::Experiment(c) => c,
            ConfigDoc::Sweep(s) => &s.base,
        }
    }

    pub fn base_mut(&mut self) -> &mut ExperimentConfig {
        match self {
            ConfigDoc::Experiment(c) => c,
            ConfigDoc::Sweep(s) => &mut s.base,
        }
    }
}

type Field<T> = Option<Spanned<T>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    phi: Field<f64>,
    #[serde(rename = "R")]
    range: Field<f64>,
    n_nodes: Field<i64>,
    #[serde(rename = "L")]
    side: Field<f64>,
    boundary: Field<String>,
    schedule: Field<String>,
    seed: Field<Value>,
    cutoff_fraction: Field<f64>,
    max_steps: Field<i64>,
    c: Field<f64>,
    n_runs: Field<i64>,
    master_seed: Field<i64>,
    scheme: Field<Value>,
    p_r: Field<f64>,
    d_c: Field<f64>,
    delta: Field<f64>,
    sweep: Option<RawSweep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis1: Spanned<RawAxis>,
    axis2: Option<Spanned<RawAxis>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    param: String,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn err(&self, key: &str, span: Range<usize>, message: impl Into<String>) -> Error {
        Error::Parse {
            key: key.to_string(),
            line: self.line(span),
            message: message.into(),
        }
    }

    fn toml_error(&self, e: toml::de::Error) -> Error {
        let span = e.span().unwrap_or(0..0);
        let message = e.message().trim().to_string();
        let key = backticked(&message)
            .or_else(|| {
                // fall back to the `key = ...` on the offending line
                let line = self.text.lines().nth(self.line(span.clone()) - 1)?;
                Some(line.split('=').next()?.trim().trim_matches(['[', ']']).to_string())
            })
            .unwrap_or_default();
        Error::Parse {
            key,
            line: self.line(span),
            message,
        }
    }

    fn check<T: Copy + PartialOrd + std::fmt::Display>(
        &self,
        key: &str,
        field: &Field<T>,
        ok: impl Fn(T) -> bool,
        what: &str,
    ) -> Result<Option<T>> {
        match field {
            None => Ok(None),
            Some(s) if ok(*s.get_ref()) => Ok(Some(*s.get_ref())),
            Some(s) => Err(self.err(key, s.span(), format!("{what}, got {}", s.get_ref()))),
        }
    }
}

fn backticked(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

/// Parses a TOML experiment or sweep document, applying defaults.
pub fn parse_config(text: &str) -> Result<ConfigDoc> {
    let ctx = Ctx { text };
    let raw: RawDoc = toml::from_str(text).map_err(|e| ctx.toml_error(e))?;

    let mut cfg = ExperimentConfig::default();
    let mut cascade = CascadeParams::default();

    let phi = ctx.check("phi", &raw.phi, |v| (0.0..=1.0).contains(&v), "phi must lie in [0, 1]")?;
    let range = ctx.check("R", &raw.range, |v| v > 0.0 && v.is_finite(), "R must be > 0")?;
    if let Some(n) = ctx.check("n_nodes", &raw.n_nodes, |v| v >= 1, "n_nodes must be >= 1")? {
        cfg.n_nodes = n as usize;
    }
    if let Some(l) = ctx.check("L", &raw.side, |v| v > 0.0 && v.is_finite(), "L must be > 0")? {
        cfg.side = l;
    }
    if let Some(b) = &raw.boundary {
        cfg.boundary = b
            .get_ref()
            .parse::<BoundaryMode>()
            .map_err(|e| ctx.err("boundary", b.span(), e.to_string()))?;
    }
    if let Some(s) = &raw.schedule {
        cascade.schedule = s
            .get_ref()
            .parse::<Schedule>()
            .map_err(|e| ctx.err("schedule", s.span(), e.to_string()))?;
    }
    if let Some(s) = &raw.seed {
        cascade.seed = parse_seed(&ctx, s)?;
    }
    if let Some(f) = ctx.check("cutoff_fraction", &raw.cutoff_fraction, |v| v > 0.0 && v <= 1.0, "cutoff_fraction must lie in (0, 1]")? {
        cascade.cutoff_fraction = f;
    }
    if let Some(m) = ctx.check("max_steps", &raw.max_steps, |v| v >= 1, "max_steps must be >= 1")? {
        cascade.max_steps = Some(m as usize);
    }
    if let Some(c) = ctx.check("c", &raw.c, |v| v > 0.0 && v.is_finite(), "c must be > 0")? {
        cfg.energy_c = c;
    }
    if let Some(n) = ctx.check("n_runs", &raw.n_runs, |v| v >= 1, "n_runs must be >= 1")? {
        cfg.n_runs = n as usize;
    }
    if let Some(s) = ctx.check("master_seed", &raw.master_seed, |v| v >= 0, "master_seed must be >= 0")? {
        cfg.master_seed = s as u64;
    }
    cfg.scheme = parse_scheme(&ctx, &raw)?;

    let sweep = match &raw.sweep {
        None => None,
        Some(s) => {
            let a1 = parse_axis(&ctx, "sweep.axis1", &s.axis1)?;
            let a2 = s.axis2.as_ref().map(|a| parse_axis(&ctx, "sweep.axis2", a)).transpose()?;
            if a2.as_ref().is_some_and(|a| a.param == a1.param) {
                let span = s.axis2.as_ref().map(|a| a.span()).unwrap_or(0..0);
                return Err(ctx.err("sweep.axis2", span, "both axes sweep the same parameter"));
            }
            Some((a1, a2))
        }
    };
    let swept = |p: SweepParam| {
        sweep
            .as_ref()
            .is_some_and(|(a1, a2)| a1.param == p || a2.as_ref().is_some_and(|a| a.param == p))
    };

    match (phi, swept(SweepParam::Phi)) {
        (Some(p), _) => cascade.phi = p,
        (None, true) => cascade.phi = 0.0,
        (None, false) => return Err(missing("phi")),
    }
    match (range, swept(SweepParam::Range)) {
        (Some(r), _) => cfg.range = r,
        (None, true) => {}
        (None, false) => return Err(missing("R")),
    }
    cfg.cascade = cascade;
    cfg.validate().map_err(|e| Error::Parse {
        key: match &e {
            Error::InvalidParameter { name, .. } => name.to_string(),
            _ => String::new(),
        },
        line: 0,
        message: e.to_string(),
    })?;

    Ok(match sweep {
        None => ConfigDoc::Experiment(cfg),
        Some((axis1, axis2)) => ConfigDoc::Sweep(SweepSpec { axis1, axis2, base: cfg }),
    })
}

fn missing(key: &str) -> Error {
    Error::Parse {
        key: key.to_string(),
        line: 0,
        message: format!("required key `{key}` is missing"),
    }
}

fn parse_seed(ctx: &Ctx, s: &Spanned<Value>) -> Result<SeedSpec> {
    let bad = |msg: &str| ctx.err("seed", s.span(), msg);
    match s.get_ref() {
        Value::String(name) => match name.as_str() {
            "single" | "single_node" => Ok(SeedSpec::SingleNode),
            "triple" | "connected_triple" => Ok(SeedSpec::ConnectedTriple),
            _ => Err(bad("expected `single`, `triple` or a list of node ids")),
        },
        Value::Array(ids) => ids
            .iter()
            .map(|v| match v.as_integer() {
                Some(i) if i >= 0 => Ok(i as usize),
                _ => Err(bad("node ids must be non-negative integers")),
            })
            .collect::<Result<Vec<_>>>()
            .and_then(|ids| {
                if ids.is_empty() {
                    Err(bad("explicit seed list is empty"))
                } else {
                    Ok(SeedSpec::Explicit(ids))
                }
            }),
        _ => Err(bad("expected `single`, `triple` or a list of node ids")),
    }
}

fn parse_scheme(ctx: &Ctx, raw: &RawDoc) -> Result<LinkScheme> {
    let mut kind_name: Option<(String, Range<usize>)> = None;
    let mut p_r = raw.p_r.clone();
    let mut d_c = raw.d_c.clone();
    let mut delta = raw.delta.clone();

    if let Some(s) = &raw.scheme {
        match s.get_ref() {
            Value::String(name) => kind_name = Some((name.clone(), s.span())),
            Value::Table(tbl) => {
                // Spans are lost inside the table; report the table's line.
                let at = |key: &str, msg: String| ctx.err(&format!("scheme.{key}"), s.span(), msg);
                for (key, value) in tbl {
                    let num = || {
                        value
                            .as_float()
                            .or_else(|| value.as_integer().map(|i| i as f64))
                            .ok_or_else(|| at(key, "expected a number".into()))
                    };
                    let dup = |flat: &Field<f64>| match flat {
                        Some(_) => Err(at(key, format!("`{key}` given both at top level and in [scheme]"))),
                        None => Ok(()),
                    };
                    match key.as_str() {
                        "kind" => match value.as_str() {
                            Some(k) => kind_name = Some((k.to_string(), s.span())),
                            None => return Err(at(key, "expected a string".into())),
                        },
                        "p_r" => {
                            dup(&raw.p_r)?;
                            p_r = Some(Spanned::new(s.span(), num()?));
                        }
                        "d_c" => {
                            dup(&raw.d_c)?;
                            d_c = Some(Spanned::new(s.span(), num()?));
                        }
                        "delta" => {
                            dup(&raw.delta)?;
                            delta = Some(Spanned::new(s.span(), num()?));
                        }
                        other => return Err(at(other, format!("unknown field `{other}` in [scheme]"))),
                    }
                }
            }
            _ => return Err(ctx.err("scheme", s.span(), "expected a scheme name or a [scheme] table")),
        }
    }

    let p_r = ctx.check("p_r", &p_r, |v| v >= 0.0 && v.is_finite(), "p_r must be >= 0")?;
    let d_c_v = ctx.check("d_c", &d_c, |v| v > 0.0, "d_c must be > 0")?;
    let delta_v = ctx.check("delta", &delta, |v| v >= 0.0 && v.is_finite(), "delta must be >= 0")?;

    let kind = match kind_name {
        Some((name, span)) => match name.as_str() {
            "uniform" => {
                if let Some(f) = d_c.as_ref().or(delta.as_ref()) {
                    return Err(ctx.err("scheme", f.span(), "uniform scheme takes neither d_c nor delta"));
                }
                LinkKind::Uniform
            }
            "power_law" | "powerlaw" => {
                if let Some(f) = &d_c {
                    return Err(ctx.err("d_c", f.span(), "d_c only applies to the cutoff scheme"));
                }
                LinkKind::PowerLaw {
                    delta: delta_v.ok_or_else(|| ctx.err("delta", span.clone(), "power_law scheme needs `delta`"))?,
                }
            }
            "cutoff" => {
                if let Some(f) = &delta {
                    return Err(ctx.err("delta", f.span(), "delta only applies to the power_law scheme"));
                }
                LinkKind::Cutoff {
                    d_c: d_c_v.ok_or_else(|| ctx.err("d_c", span.clone(), "cutoff scheme needs `d_c`"))?,
                }
            }
            other => {
                return Err(ctx.err(
                    "scheme",
                    span,
                    format!("unknown scheme `{other}` (uniform, power_law, cutoff)"),
                ))
            }
        },
        None => match (d_c_v, delta_v) {
            (Some(_), Some(_)) => {
                let span = d_c.map(|f| f.span()).unwrap_or(0..0);
                return Err(ctx.err("d_c", span, "d_c and delta select different schemes"));
            }
            (Some(d_c), None) => LinkKind::Cutoff { d_c },
            (None, Some(delta)) => LinkKind::PowerLaw { delta },
            (None, None) => LinkKind::Uniform,
        },
    };
    Ok(LinkScheme {
        kind,
        p_r: p_r.unwrap_or(0.0),
    })
}

fn parse_axis(ctx: &Ctx, key: &str, raw: &Spanned<RawAxis>) -> Result<Axis> {
    let span = raw.span();
    let a = raw.get_ref();
    let param = a
        .param
        .parse::<SweepParam>()
        .map_err(|e| ctx.err(key, span.clone(), e.to_string()))?;
    let values = match (&a.values, a.start, a.stop, a.step) {
        (Some(v), None, None, None) => v.clone(),
        (None, Some(start), Some(stop), Some(step)) => {
            if !(step > 0.0) || stop < start {
                return Err(ctx.err(key, span, "need step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect()
        }
        _ => return Err(ctx.err(key, span, "give either `values` or `start`/`stop`/`step`")),
    };
    if values.is_empty() {
        return Err(ctx.err(key, span, "grid is empty"));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ctx.err(key, span, "grid must be strictly increasing"));
    }
    Ok(Axis::new(param, values))
}
