//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [grid]
//! euclid_dims = 1
//! box_half_length = 40
//! torus_period = 2pi
//! ```
//!
//! Numbers accept decimals, `a/b`, multiples of `pi` (`pi`, `2pi`, `3*pi/4`)
//! and `inf`. Lists are comma separated.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;
use wgdl::exponents::{parse_rational, to_f64};
use wgdl::propagator::{Dealias, Sign};
use wgdl::{DiagnosticsPlan, GridSpec, SolverConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("line {line}: `{key}`: {msg}")]
    Value { line: usize, key: String, msg: String },
    #[error("unknown key `{key}` on line {line}")]
    Unknown { line: usize, key: String },
    #[error("{0}")]
    Invalid(String),
}

type Res<T> = Result<T, ConfigError>;

const SECTIONS: &[&str] = &["grid", "solver", "diagnostics", "output", "initial"];

const KNOWN: &[&str] = &[
    "grid.euclid_dims",
    "grid.torus_dims",
    "grid.box_half_length",
    "grid.torus_period",
    "grid.points_euclid",
    "grid.points_torus",
    "solver.order",
    "solver.p",
    "solver.sign",
    "solver.amplitude",
    "solver.dt",
    "solver.t_end",
    "solver.dealias",
    "diagnostics.q_list",
    "diagnostics.r_list",
    "diagnostics.morawetz",
    "diagnostics.rhs_terms",
    "diagnostics.record_every",
    "output.format",
    "output.checkpoint_every",
    "initial.kind",
    "initial.width",
    "initial.center",
    "initial.modulation",
    "initial.amplitude",
    "initial.k",
    "initial.seed",
    "initial.path",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Ndjson,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ndjson" => Ok(Format::Ndjson),
            "csv" => Ok(Format::Csv),
            other => Err(format!("format must be ndjson or csv, got `{other}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub enum InitialData {
    Gaussian {
        width: f64,
        center: Vec<f64>,
        modulation: Vec<f64>,
        amplitude: f64,
    },
    PlaneWave {
        k: Vec<f64>,
        amplitude: f64,
    },
    RandomSmooth {
        seed: u64,
        amplitude: f64,
    },
    Checkpoint(PathBuf),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub plan: DiagnosticsPlan,
    pub rhs_terms: bool,
    pub format: Format,
    /// Steps between checkpoints; 0 writes only the final one.
    pub checkpoint_every: usize,
    pub initial: InitialData,
}

struct Entry {
    line: usize,
    value: String,
}

struct Table {
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn parse(text: &str) -> Res<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Syntax {
                        line,
                        msg: "unterminated section header".into(),
                    })?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(ConfigError::Syntax {
                        line,
                        msg: format!("unknown section [{name}]"),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                msg: "expected `key = value`".into(),
            })?;
            let sec = section.as_ref().ok_or_else(|| ConfigError::Syntax {
                line,
                msg: "key outside of a section".into(),
            })?;
            let key = format!("{sec}.{}", k.trim());
            if !KNOWN.contains(&key.as_str()) {
                return Err(ConfigError::Unknown { line, key });
            }
            if let Some(prev) = entries.get(&key) {
                let prev: &Entry = prev;
                return Err(ConfigError::Syntax {
                    line,
                    msg: format!("`{key}` already set on line {}", prev.line),
                });
            }
            entries.insert(
                key,
                Entry {
                    line,
                    value: v.trim().to_string(),
                },
            );
        }
        Ok(Self { entries })
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Res<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).map_err(|msg| ConfigError::Value {
                line: e.line,
                key: key.to_string(),
                msg,
            }),
        }
    }

    fn req<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Res<T> {
        self.get(key, parse)?.ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map(|e| e.line).unwrap_or(0)
    }
}

/// Parse a real literal: decimal, `a/b`, a multiple of `pi`, or `inf`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let bad = || format!("not a number: `{t}`");
    match t {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    if let Some((left, right)) = t.split_once("pi") {
        let left = left.trim().trim_end_matches('*').trim();
        let coeff = match left {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => to_f64(&parse_rational(c).map_err(|_| bad())?),
        };
        let right = right.trim();
        let div = if right.is_empty() {
            1.0
        } else {
            let r = right.strip_prefix('/').ok_or_else(bad)?;
            to_f64(&parse_rational(r).map_err(|_| bad())?)
        };
        if div == 0.0 {
            return Err(bad());
        }
        return Ok(coeff * std::f64::consts::PI / div);
    }
    if let Ok(r) = parse_rational(t) {
        return Ok(to_f64(&r));
    }
    // Exponent notation such as `1e-3`.
    t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad)
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_real).collect()
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("expected a non-negative integer, got `{}`", s.trim()))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim().parse().map_err(|_| format!("expected a non-negative integer, got `{}`", s.trim()))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        other => Err(format!("expected true/false, got `{other}`")),
    }
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s.trim() {
        "defocusing" => Ok(Sign::Defocusing),
        "focusing" => Ok(Sign::Focusing),
        other => Err(format!("expected defocusing or focusing, got `{other}`")),
    }
}

fn parse_order(s: &str) -> Result<u32, String> {
    match s.trim() {
        "2" | "4nls" => Ok(2),
        "1" | "nls" => Ok(1),
        other => Err(format!("order is 2 (4nls) or 1 (nls), got `{other}`")),
    }
}

fn parse_dealias(s: &str) -> Result<Dealias, String> {
    match s.trim() {
        "off" | "none" => Ok(Dealias::Off),
        "two_thirds" | "2/3" => Ok(Dealias::TwoThirds),
        other => Err(format!("expected off or two_thirds, got `{other}`")),
    }
}

fn positive(v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {v}"))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Res<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Res<Self> {
        let t = Table::parse(text)?;

        let d = t.req("grid.euclid_dims", parse_usize)?;
        let n = t.req("grid.torus_dims", parse_usize)?;
        let l = t.req("grid.box_half_length", |s| parse_real(s).and_then(positive))?;
        let ne = t.req("grid.points_euclid", parse_usize)?;
        let nt = if n > 0 {
            t.req("grid.points_torus", parse_usize)?
        } else {
            t.get("grid.points_torus", parse_usize)?.unwrap_or(1)
        };
        let mut grid = GridSpec::new(d, n, l, ne, nt);
        if let Some(period) = t.get("grid.torus_period", |s| parse_real(s).and_then(positive))? {
            grid = grid.with_torus_period(period);
        }
        grid.validate()
            .map_err(|e| ConfigError::Invalid(format!("[grid]: {e}")))?;

        let order = t.req("solver.order", parse_order)?;
        let p = t.req("solver.p", |s| parse_real(s).and_then(positive))?;
        let sign = t.req("solver.sign", parse_sign)?;
        let dt = t.req("solver.dt", |s| parse_real(s).and_then(positive))?;
        let t_end = t.req("solver.t_end", |s| parse_real(s).and_then(positive))?;
        let amplitude = t.get("solver.amplitude", parse_real)?.unwrap_or(1.0);
        let dealias = t.get("solver.dealias", parse_dealias)?.unwrap_or_default();
        let record_every = t.get("diagnostics.record_every", parse_usize)?.unwrap_or(1);
        if record_every == 0 {
            return Err(ConfigError::Value {
                line: t.line("diagnostics.record_every"),
                key: "diagnostics.record_every".into(),
                msg: "must be positive".into(),
            });
        }
        let solver = SolverConfig {
            order,
            p,
            sign,
            nonlinear_amplitude: amplitude,
            dt,
            t_end,
            record_every,
            dealias,
        };
        solver
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("[solver]: {e}")))?;

        let plan = DiagnosticsPlan {
            q_list: t.get("diagnostics.q_list", parse_list)?.unwrap_or_default(),
            r_list: t.get("diagnostics.r_list", parse_list)?.unwrap_or_default(),
            morawetz: t.get("diagnostics.morawetz", parse_bool)?.unwrap_or(false),
        };
        let rhs_terms = t.get("diagnostics.rhs_terms", parse_bool)?.unwrap_or(false);
        if rhs_terms && order != 2 {
            return Err(ConfigError::Value {
                line: t.line("diagnostics.rhs_terms"),
                key: "diagnostics.rhs_terms".into(),
                msg: "the Morawetz derivative decomposition needs order 2".into(),
            });
        }

        let format = t.get("output.format", |s| s.trim().parse())?.unwrap_or(Format::Ndjson);
        let checkpoint_every = t.get("output.checkpoint_every", parse_usize)?.unwrap_or(0);
        if checkpoint_every % record_every != 0 {
            return Err(ConfigError::Value {
                line: t.line("output.checkpoint_every"),
                key: "output.checkpoint_every".into(),
                msg: format!("must be a multiple of diagnostics.record_every = {record_every}"),
            });
        }

        let kind = t.req("initial.kind", |s| Ok(s.trim().to_string()))?;
        let amp = t.get("initial.amplitude", parse_real)?.unwrap_or(1.0);
        let initial = match kind.as_str() {
            "gaussian" => InitialData::Gaussian {
                width: t.req("initial.width", |s| parse_real(s).and_then(positive))?,
                center: t.get("initial.center", parse_list)?.unwrap_or_else(|| vec![0.0; d]),
                modulation: t.get("initial.modulation", parse_list)?.unwrap_or_else(|| vec![0.0; d + n]),
                amplitude: amp,
            },
            "plane_wave" => InitialData::PlaneWave {
                k: t.req("initial.k", parse_list)?,
                amplitude: amp,
            },
            "random_smooth" => InitialData::RandomSmooth {
                seed: t.get("initial.seed", parse_u64)?.unwrap_or(0),
                amplitude: amp,
            },
            "checkpoint" => InitialData::Checkpoint(PathBuf::from(t.req("initial.path", |s| Ok(s.trim().to_string()))?)),
            other => {
                return Err(ConfigError::Value {
                    line: t.line("initial.kind"),
                    key: "initial.kind".into(),
                    msg: format!("expected gaussian, plane_wave, random_smooth or checkpoint, got `{other}`"),
                })
            }
        };

        Ok(Self {
            grid,
            solver,
            plan,
            rhs_terms,
            format,
            checkpoint_every,
            initial,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "
[grid]
euclid_dims = 1
torus_dims = 1
box_half_length = 20
points_euclid = 64
points_torus = 8
torus_period = 2pi

[solver]
order = 4nls
p = 8/5
sign = defocusing
dt = 1e-3
t_end = 0.01

[initial]
kind = gaussian
width = 1
";

    #[test]
    fn parses_literals() {
        assert_eq!(parse_real("3/4").unwrap(), 0.75);
        assert_eq!(parse_real("-2.5").unwrap(), -2.5);
        assert_eq!(parse_real("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_real("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_real("pi").unwrap(), std::f64::consts::PI);
        assert_eq!(parse_real("2pi").unwrap(), std::f64::consts::TAU);
        assert_eq!(parse_real("3*pi/4").unwrap(), 3.0 * std::f64::consts::PI / 4.0);
        assert!(parse_real("pi/0").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real("nan").is_err());
    }

    #[test]
    fn parses_base_config() {
        let c = RunConfig::parse(BASE).unwrap();
        assert_eq!(c.solver.order, 2);
        assert_eq!(c.solver.p, 1.6);
        assert_eq!(c.grid.torus_period, std::f64::consts::TAU);
        assert_eq!(c.format, Format::Ndjson);
        assert!(matches!(c.initial, InitialData::Gaussian { width, .. } if width == 1.0));
    }

    #[test]
    fn missing_key_is_named() {
        let text = BASE.replace("dt = 1e-3\n", "");
        let e = RunConfig::parse(&text).unwrap_err();
        assert_eq!(e.to_string(), "missing key `solver.dt`");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = BASE.replace("p = 8/5", "p = eight");
        let e = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(e.starts_with("line 12: `solver.p`"), "{e}");
        let text = BASE.replace("sign = defocusing", "sgn = defocusing");
        let e = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(e.contains("line 13"), "{e}");
        let e = RunConfig::parse("x = 1").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let text = BASE.replace("p = 8/5", "p = 8/5\np = 2");
        assert!(RunConfig::parse(&text).unwrap_err().to_string().contains("already set"));
    }

    #[test]
    fn checkpoint_cadence_follows_records() {
        let text = format!("{BASE}\n[diagnostics]\nrecord_every = 4\n[output]\ncheckpoint_every = 6\n");
        assert!(RunConfig::parse(&text).is_err());
        let text = format!("{BASE}\n[diagnostics]\nrecord_every = 4\n[output]\ncheckpoint_every = 8\n");
        assert_eq!(RunConfig::parse(&text).unwrap().checkpoint_every, 8);
    }
}
