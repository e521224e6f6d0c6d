//! Experiment configuration files.
//!
//! The format is line-oriented `key = value` text grouped under `[section]`
//! headers. See the README for the full grammar.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use ambec::fock::{CutoffPolicy, PropagatorOptions};
use ambec::perturbative::{CoefficientFault, CoefficientIndex};
use ambec::{preset, BackendSelection, Grid, Params, WitnessKind};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

/// How the rescaled-time grid is laid out.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// `samples` uniform points on `(0, max]`, or `[0, max]` with `include_zero`.
    Uniform {
        max: f64,
        samples: usize,
        include_zero: bool,
    },
    Points(Vec<f64>),
}

impl GridSpec {
    /// The grid, unchecked; validation reports any problem.
    pub fn build(&self) -> Grid {
        match self {
            GridSpec::Uniform {
                max,
                samples,
                include_zero,
            } => {
                let n = *samples;
                let pts = if *include_zero {
                    if n == 0 {
                        Vec::new()
                    } else if n == 1 {
                        vec![0.0]
                    } else {
                        (0..n).map(|k| max * k as f64 / (n - 1) as f64).collect()
                    }
                } else {
                    (1..=n).map(|k| max * k as f64 / n as f64).collect()
                };
                Grid::from_unchecked(pts)
            }
            GridSpec::Points(p) => Grid::from_unchecked(p.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareSpec {
    /// Largest accepted `|perturbative - exact|` on the grid.
    pub tolerance: f64,
    /// Smallest accepted log-log slope on the ladder.
    pub min_slope: f64,
    /// Explicit ladder; `None` halves the grid maximum three times.
    pub ladder: Option<Vec<f64>>,
}

impl Default for CompareSpec {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            min_slope: 3.0,
            ladder: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// File stem; defaults to the config file's stem.
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub params: Params,
    pub grid: GridSpec,
    pub kinds: Vec<WitnessKind>,
    pub backend: BackendSelection,
    pub cutoffs: CutoffPolicy,
    pub allow_heavy: bool,
    /// Local error per accepted step of the exact propagator.
    pub step_tolerance: f64,
    pub compare: CompareSpec,
    pub output: OutputSpec,
    /// Test hook: scales one perturbative coefficient.
    pub fault: Option<CoefficientFault<f64>>,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("", &["preset"]),
    ("params", &["omega", "delta", "alpha", "beta"]),
    ("grid", &["max", "samples", "include_zero", "points"]),
    ("witnesses", &["kinds"]),
    ("backend", &["select", "cutoff_a", "cutoff_b", "allow_heavy", "step_tolerance"]),
    ("compare", &["tolerance", "min_slope", "ladder"]),
    ("output", &["dir", "stem"]),
    ("debug", &["fault_coefficient", "fault_factor"]),
];

struct Entry {
    section: &'static str,
    key: &'static str,
    value: String,
    line: usize,
}

struct Entries(Vec<Entry>);

impl Entries {
    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.0.iter().find(|e| e.section == section && e.key == key)
    }

    fn parse<V: FromStr>(&self, section: &str, key: &str, what: &str) -> Result<Option<V>, ConfigError> {
        self.get(section, key)
            .map(|e| {
                e.value.parse::<V>().map_err(|_| {
                    ConfigError::at(e.line, format!("[{section}] {key}: expected {what}, got `{}`", e.value))
                })
            })
            .transpose()
    }
}

fn lex(text: &str) -> Result<Entries, ConfigError> {
    let mut section: &'static str = "";
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line, format!("malformed section header `{body}`")))?
                .trim();
            section = SECTIONS
                .iter()
                .find(|(s, _)| !s.is_empty() && *s == name)
                .map(|(s, _)| *s)
                .ok_or_else(|| ConfigError::at(line, format!("unknown section [{name}]")))?;
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, got `{body}`")))?;
        let key = key.trim();
        let keys = SECTIONS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
        let key = keys.iter().copied().find(|k| *k == key).ok_or_else(|| {
            if section.is_empty() {
                ConfigError::at(line, format!("unknown key `{key}` outside any section"))
            } else {
                ConfigError::at(line, format!("unknown key `{key}` in [{section}]"))
            }
        })?;
        if let Some(prev) = out.iter().find(|e| e.section == section && e.key == key) {
            return Err(ConfigError::at(
                line,
                format!("duplicate key `{key}` (first set on line {})", prev.line),
            ));
        }
        out.push(Entry {
            section,
            key,
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(Entries(out))
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts.retain(|p| !p.is_empty());
    parts
}

fn parse_floats(e: &Entry) -> Result<Vec<f64>, ConfigError> {
    split_top_level(&e.value)
        .into_iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| ConfigError::at(e.line, format!("[{}] {}: `{p}` is not a number", e.section, e.key)))
        })
        .collect()
}

fn parse_cutoff(e: Option<&Entry>) -> Result<Option<usize>, ConfigError> {
    match e {
        None => Ok(None),
        Some(e) if e.value == "auto" => Ok(None),
        Some(e) => e.value.parse().map(Some).map_err(|_| {
            ConfigError::at(e.line, format!("[backend] {}: expected `auto` or a count, got `{}`", e.key, e.value))
        }),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let entries = lex(text)?;

        let base = match entries.get("", "preset") {
            Some(e) => Some(
                preset(&e.value).ok_or_else(|| ConfigError::at(e.line, format!("unknown preset `{}`", e.value)))?,
            ),
            None => None,
        };

        let real = |key: &str| -> Result<f64, ConfigError> {
            match entries.parse::<f64>("params", key, "a number")? {
                Some(v) => Ok(v),
                None => base
                    .as_ref()
                    .map(|p| if key == "omega" { p.omega } else { p.delta })
                    .ok_or_else(|| ConfigError::global(format!("missing [params] {key}"))),
            }
        };
        let amplitude = |key: &str| -> Result<Complex64, ConfigError> {
            match entries.parse::<Complex64>("params", key, "a complex number like 1.5-0.5i")? {
                Some(v) => Ok(v),
                None => base
                    .as_ref()
                    .map(|p| Complex64::from(if key == "alpha" { p.alpha } else { p.beta }))
                    .ok_or_else(|| ConfigError::global(format!("missing [params] {key}"))),
            }
        };
        let params = Params {
            omega: real("omega")?,
            delta: real("delta")?,
            alpha: amplitude("alpha")?,
            beta: amplitude("beta")?,
        };

        let grid = match entries.get("grid", "points") {
            Some(e) => {
                if let Some(other) = ["max", "samples", "include_zero"]
                    .iter()
                    .find_map(|k| entries.get("grid", k))
                {
                    return Err(ConfigError::at(
                        other.line,
                        format!("[grid] {} conflicts with points (line {})", other.key, e.line),
                    ));
                }
                GridSpec::Points(parse_floats(e)?)
            }
            None => GridSpec::Uniform {
                max: entries.parse("grid", "max", "a number")?.unwrap_or(ambec::PRESET_GRID_MAX),
                samples: entries
                    .parse("grid", "samples", "a sample count")?
                    .unwrap_or(ambec::PRESET_GRID_SAMPLES),
                include_zero: entries.parse("grid", "include_zero", "true or false")?.unwrap_or(false),
            },
        };

        let kinds = match entries.get("witnesses", "kinds") {
            Some(e) => split_top_level(&e.value)
                .into_iter()
                .map(|k| k.parse::<WitnessKind>().map_err(|err| ConfigError::at(e.line, err.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
            None => base
                .as_ref()
                .map(|p| p.kinds.clone())
                .ok_or_else(|| ConfigError::global("missing [witnesses] kinds"))?,
        };

        let backend = match entries.get("backend", "select") {
            Some(e) => e.value.parse().map_err(|err: String| ConfigError::at(e.line, err))?,
            None => BackendSelection::Perturbative,
        };
        let cutoffs = match (
            parse_cutoff(entries.get("backend", "cutoff_a"))?,
            parse_cutoff(entries.get("backend", "cutoff_b"))?,
        ) {
            (None, None) => CutoffPolicy::Auto,
            (Some(cutoff_a), Some(cutoff_b)) => CutoffPolicy::Manual { cutoff_a, cutoff_b },
            _ => {
                let line = entries.get("backend", "cutoff_a").or(entries.get("backend", "cutoff_b")).map(|e| e.line);
                return Err(ConfigError {
                    line,
                    message: "cutoff_a and cutoff_b must both be numbers or both be auto".into(),
                });
            }
        };

        let mut compare = CompareSpec::default();
        if let Some(v) = entries.parse("compare", "tolerance", "a number")? {
            compare.tolerance = v;
        }
        if let Some(v) = entries.parse("compare", "min_slope", "a number")? {
            compare.min_slope = v;
        }
        if let Some(e) = entries.get("compare", "ladder") {
            if e.value != "auto" {
                compare.ladder = Some(parse_floats(e)?);
            }
        }

        let fault = match (entries.get("debug", "fault_coefficient"), entries.get("debug", "fault_factor")) {
            (None, None) => None,
            (Some(c), Some(_)) => Some(CoefficientFault {
                index: c
                    .value
                    .parse::<CoefficientIndex>()
                    .map_err(|err| ConfigError::at(c.line, err.to_string()))?,
                factor: entries.parse("debug", "fault_factor", "a number")?.unwrap_or(1.0),
            }),
            (Some(e), None) | (None, Some(e)) => {
                return Err(ConfigError::at(e.line, "fault_coefficient and fault_factor go together"))
            }
        };

        Ok(Self {
            preset: base.map(|p| p.name.to_string()),
            params,
            grid,
            kinds,
            backend,
            cutoffs,
            allow_heavy: entries.parse("backend", "allow_heavy", "true or false")?.unwrap_or(false),
            step_tolerance: entries
                .parse("backend", "step_tolerance", "a number")?
                .unwrap_or(PropagatorOptions::<f64>::default().tolerance),
            compare,
            output: OutputSpec {
                dir: entries.get("output", "dir").map(|e| PathBuf::from(&e.value)),
                stem: entries.get("output", "stem").map(|e| e.value.clone()),
            },
            fault,
        })
    }

    /// Canonical text form; [`ExperimentConfig::parse`] reads it back unchanged.
    pub fn render(&self) -> String {
        let mut s = String::new();
        if let Some(p) = &self.preset {
            let _ = writeln!(s, "preset = {p}\n");
        }
        let p = &self.params;
        let _ = writeln!(
            s,
            "[params]\nomega = {}\ndelta = {}\nalpha = {}\nbeta = {}\n",
            p.omega,
            p.delta,
            complex(p.alpha),
            complex(p.beta)
        );
        s.push_str("[grid]\n");
        match &self.grid {
            GridSpec::Uniform {
                max,
                samples,
                include_zero,
            } => {
                let _ = writeln!(s, "max = {max}\nsamples = {samples}\ninclude_zero = {include_zero}\n");
            }
            GridSpec::Points(pts) => {
                let _ = writeln!(s, "points = {}\n", join(pts));
            }
        }
        let kinds: Vec<String> = self.kinds.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(s, "[witnesses]\nkinds = {}\n", kinds.join(", "));
        let (ca, cb) = match self.cutoffs {
            CutoffPolicy::Auto => ("auto".to_string(), "auto".to_string()),
            CutoffPolicy::Manual { cutoff_a, cutoff_b } => (cutoff_a.to_string(), cutoff_b.to_string()),
        };
        let _ = writeln!(
            s,
            "[backend]\nselect = {}\ncutoff_a = {ca}\ncutoff_b = {cb}\nallow_heavy = {}\nstep_tolerance = {}\n",
            self.backend, self.allow_heavy, self.step_tolerance
        );
        let _ = writeln!(
            s,
            "[compare]\ntolerance = {}\nmin_slope = {}\nladder = {}",
            self.compare.tolerance,
            self.compare.min_slope,
            self.compare.ladder.as_deref().map_or("auto".to_string(), join)
        );
        if self.output.dir.is_some() || self.output.stem.is_some() {
            s.push_str("\n[output]\n");
            if let Some(d) = &self.output.dir {
                let _ = writeln!(s, "dir = {}", d.display());
            }
            if let Some(st) = &self.output.stem {
                let _ = writeln!(s, "stem = {st}");
            }
        }
        if let Some(f) = &self.fault {
            let _ = write!(s, "\n[debug]\nfault_coefficient = {}\nfault_factor = {}\n", f.index, f.factor);
        }
        s
    }
}

fn complex(z: Complex64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{}", z.re)
    } else {
        format!("{z}")
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
