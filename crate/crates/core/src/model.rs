//! Physical parameters, time grids, witness catalogue and figure presets.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One experiment: coupling, detuning and the initial coherent amplitudes.
///
/// Units have `hbar = 1`; `omega` and `delta` are angular frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub omega: T,
    pub delta: T,
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

impl<T: Real> SystemParams<T> {
    pub fn new(omega: T, delta: T, alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let params = Self {
            omega,
            delta,
            alpha,
            beta,
        };
        params.check()?;
        Ok(params)
    }

    /// Real initial amplitudes, as in every figure preset.
    pub fn real(omega: T, delta: T, alpha: T, beta: T) -> Result<Self> {
        Self::new(
            omega,
            delta,
            Complex::new(alpha, T::zero()),
            Complex::new(beta, T::zero()),
        )
    }

    /// Hard constraints. Fails on the first violation.
    pub fn check(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(msg) => Err(Error::InvalidParams(msg)),
            None => Ok(()),
        }
    }

    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.omega.is_finite() || self.omega <= T::zero() {
            out.push(format!("coupling omega must be positive and finite, got {}", self.omega));
        }
        if !self.delta.is_finite() {
            out.push(format!("detuning delta must be finite, got {}", self.delta));
        } else if self.delta == T::zero() {
            out.push("detuning delta must be nonzero (closed forms divide by delta)".to_string());
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            out.push(format!("alpha must be finite, got {}", self.alpha));
        }
        if !(self.beta.re.is_finite() && self.beta.im.is_finite()) {
            out.push(format!("beta must be finite, got {}", self.beta));
        }
        out
    }

    /// Physical time for a rescaled time `omega * t`.
    pub fn rescale(&self, omega_t: T) -> T {
        omega_t / self.omega
    }

    pub fn abs_alpha_sq(&self) -> T {
        self.alpha.norm_sqr()
    }

    pub fn abs_beta_sq(&self) -> T {
        self.beta.norm_sqr()
    }
}

/// Strictly increasing rescaled times `omega * t >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    samples: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(samples: Vec<T>) -> Result<Self> {
        let grid = Self { samples };
        if let Some(msg) = grid.violations().into_iter().next() {
            return Err(Error::InvalidGrid(msg));
        }
        Ok(grid)
    }

    /// Builds a grid without checking it; [`validate`] reports the problems.
    pub fn from_unchecked(samples: Vec<T>) -> Self {
        Self { samples }
    }

    /// `count` uniform samples on `(0, max]`.
    pub fn uniform(max: T, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidGrid("sample count must be positive".into()));
        }
        let step = max / T::count(count);
        Self::new((1..=count).map(|k| step * T::count(k)).collect())
    }

    /// `count + 1` uniform samples on `[0, max]`.
    pub fn uniform_from_zero(max: T, count: usize) -> Result<Self> {
        if count == 0 {
            return Self::new(vec![T::zero()]);
        }
        let step = max / T::count(count);
        Self::new((0..=count).map(|k| step * T::count(k)).collect())
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max(&self) -> Option<T> {
        self.samples.last().copied()
    }

    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.samples.is_empty() {
            out.push("grid is empty".to_string());
        }
        for (i, &s) in self.samples.iter().enumerate() {
            if !s.is_finite() || s < T::zero() {
                out.push(format!("sample {i} = {s} is not a finite nonnegative time"));
            }
        }
        for (i, w) in self.samples.windows(2).enumerate() {
            if w[1] <= w[0] {
                out.push(format!(
                    "grid not strictly increasing at sample {}: {} after {}",
                    i + 1,
                    w[1],
                    w[0]
                ));
            }
        }
        out
    }
}

/// Which backend produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BackendTag {
    Perturbative,
    Exact,
}

impl BackendTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendTag::Perturbative => "perturbative",
            BackendTag::Exact => "exact",
        }
    }
}

impl fmt::Display for BackendTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which backends a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendSelection {
    Perturbative,
    Exact,
    Both,
}

impl BackendSelection {
    pub fn tags(self) -> &'static [BackendTag] {
        match self {
            BackendSelection::Perturbative => &[BackendTag::Perturbative],
            BackendSelection::Exact => &[BackendTag::Exact],
            BackendSelection::Both => &[BackendTag::Perturbative, BackendTag::Exact],
        }
    }

    pub fn uses_perturbative(self) -> bool {
        self != BackendSelection::Exact
    }

    pub fn uses_exact(self) -> bool {
        self != BackendSelection::Perturbative
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BackendSelection::Perturbative => "perturbative",
            BackendSelection::Exact => "exact",
            BackendSelection::Both => "both",
        }
    }
}

impl FromStr for BackendSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "perturbative" | "pert" => Ok(BackendSelection::Perturbative),
            "exact" => Ok(BackendSelection::Exact),
            "both" => Ok(BackendSelection::Both),
            other => Err(format!(
                "unknown backend `{other}` (expected perturbative, exact or both)"
            )),
        }
    }
}

impl fmt::Display for BackendSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Atomic,
    Molecular,
}

impl Mode {
    fn suffix(self) -> &'static str {
        match self {
            Mode::Atomic => "a",
            Mode::Molecular => "b",
        }
    }
}

/// Every nonclassicality witness the simulator can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    VarXa,
    VarYa,
    VarXb,
    VarYb,
    VarXab,
    VarYab,
    AmpSq1a,
    AmpSq2a,
    AmpSq1b,
    AmpSq2b,
    Da,
    Db,
    Dab,
    /// `<a^dag^n a^n> - <a^dag a>^n`, `(n-1)`-th order antibunching.
    HoaA(u32),
    HoaB(u32),
    /// Lee's factorial-moment ratio `R(l, m)`.
    LeeR { l: u32, m: u32, mode: Mode },
    Hz1,
    Hz2,
    Duan,
    Hz1Higher { n: u32, m: u32 },
    Hz2Higher { n: u32, m: u32 },
}

impl WitnessKind {
    /// Squeezing threshold for quadrature variances, zero for sign-based witnesses.
    pub fn threshold<T: Real>(&self) -> T {
        if self.is_variance() {
            T::lit(0.25)
        } else {
            T::zero()
        }
    }

    pub fn is_variance(&self) -> bool {
        matches!(
            self,
            WitnessKind::VarXa
                | WitnessKind::VarYa
                | WitnessKind::VarXb
                | WitnessKind::VarYb
                | WitnessKind::VarXab
                | WitnessKind::VarYab
        )
    }

    /// Whether a third-order closed form exists for this kind and order.
    pub fn has_closed_form(&self) -> bool {
        match self {
            WitnessKind::LeeR { .. } => false,
            WitnessKind::Hz1Higher { n, m } => (*n, *m) == (1, 2),
            _ => true,
        }
    }

    /// Checks the order parameters.
    pub fn check(&self) -> Result<()> {
        match *self {
            WitnessKind::HoaA(n) | WitnessKind::HoaB(n) if n < 2 => Err(Error::InvalidOrder(
                format!("{self}: antibunching order n must be >= 2"),
            )),
            WitnessKind::LeeR { l, m, .. } if !(1 <= m && m <= l) => Err(Error::InvalidOrder(
                format!("{self}: Lee orders need 1 <= m <= l"),
            )),
            WitnessKind::Hz1Higher { n, m } | WitnessKind::Hz2Higher { n, m }
                if n < 1 || m < 1 =>
            {
                Err(Error::InvalidOrder(format!("{self}: HZ orders need n, m >= 1")))
            }
            _ => Ok(()),
        }
    }

    /// Name without order parameters, as written in the CSV `witness` column.
    pub fn base_name(&self) -> String {
        match self {
            WitnessKind::VarXa => "VarXa".into(),
            WitnessKind::VarYa => "VarYa".into(),
            WitnessKind::VarXb => "VarXb".into(),
            WitnessKind::VarYb => "VarYb".into(),
            WitnessKind::VarXab => "VarXab".into(),
            WitnessKind::VarYab => "VarYab".into(),
            WitnessKind::AmpSq1a => "AmpSq1a".into(),
            WitnessKind::AmpSq2a => "AmpSq2a".into(),
            WitnessKind::AmpSq1b => "AmpSq1b".into(),
            WitnessKind::AmpSq2b => "AmpSq2b".into(),
            WitnessKind::Da => "Da".into(),
            WitnessKind::Db => "Db".into(),
            WitnessKind::Dab => "Dab".into(),
            WitnessKind::HoaA(_) => "HOAa".into(),
            WitnessKind::HoaB(_) => "HOAb".into(),
            WitnessKind::LeeR { mode, .. } => format!("LeeR{}", mode.suffix()),
            WitnessKind::Hz1 => "HZ1".into(),
            WitnessKind::Hz2 => "HZ2".into(),
            WitnessKind::Duan => "Duan".into(),
            WitnessKind::Hz1Higher { .. } => "HZ1Higher".into(),
            WitnessKind::Hz2Higher { .. } => "HZ2Higher".into(),
        }
    }

    /// `(order_n, order_m)` CSV columns. Lee's `R(l, m)` reports `(l, m)`.
    pub fn orders(&self) -> (Option<u32>, Option<u32>) {
        match *self {
            WitnessKind::HoaA(n) | WitnessKind::HoaB(n) => (Some(n), None),
            WitnessKind::LeeR { l, m, .. } => (Some(l), Some(m)),
            WitnessKind::Hz1Higher { n, m } | WitnessKind::Hz2Higher { n, m } => {
                (Some(n), Some(m))
            }
            _ => (None, None),
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WitnessKind::HoaA(n) => write!(f, "HOAa({n})"),
            WitnessKind::HoaB(n) => write!(f, "HOAb({n})"),
            WitnessKind::LeeR { l, m, mode } => write!(f, "LeeR({l},{m},{})", mode.suffix()),
            WitnessKind::Hz1Higher { n, m } => write!(f, "HZ1Higher({n},{m})"),
            WitnessKind::Hz2Higher { n, m } => write!(f, "HZ2Higher({n},{m})"),
            _ => f.write_str(&self.base_name()),
        }
    }
}

impl FromStr for WitnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownWitness(s.trim().to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (name, args) = match compact.find('(') {
            Some(open) => {
                let inner = compact[open..]
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(unknown)?;
                (&compact[..open], inner.split(',').collect::<Vec<_>>())
            }
            None => (compact.as_str(), Vec::new()),
        };
        let num = |i: usize| -> Result<u32> {
            args.get(i)
                .and_then(|a| a.parse::<u32>().ok())
                .ok_or_else(unknown)
        };
        let kind = match (name, args.len()) {
            ("VarXa", 0) => WitnessKind::VarXa,
            ("VarYa", 0) => WitnessKind::VarYa,
            ("VarXb", 0) => WitnessKind::VarXb,
            ("VarYb", 0) => WitnessKind::VarYb,
            ("VarXab", 0) => WitnessKind::VarXab,
            ("VarYab", 0) => WitnessKind::VarYab,
            ("AmpSq1a", 0) => WitnessKind::AmpSq1a,
            ("AmpSq2a", 0) => WitnessKind::AmpSq2a,
            ("AmpSq1b", 0) => WitnessKind::AmpSq1b,
            ("AmpSq2b", 0) => WitnessKind::AmpSq2b,
            ("Da", 0) => WitnessKind::Da,
            ("Db", 0) => WitnessKind::Db,
            ("Dab", 0) => WitnessKind::Dab,
            ("HZ1", 0) => WitnessKind::Hz1,
            ("HZ2", 0) => WitnessKind::Hz2,
            ("Duan", 0) => WitnessKind::Duan,
            ("HOAa", 1) => WitnessKind::HoaA(num(0)?),
            ("HOAb", 1) => WitnessKind::HoaB(num(0)?),
            ("HZ1Higher", 2) => WitnessKind::Hz1Higher {
                n: num(0)?,
                m: num(1)?,
            },
            ("HZ2Higher", 2) => WitnessKind::Hz2Higher {
                n: num(0)?,
                m: num(1)?,
            },
            ("LeeR", 3) => WitnessKind::LeeR {
                l: num(0)?,
                m: num(1)?,
                mode: match args[2] {
                    "a" => Mode::Atomic,
                    "b" => Mode::Molecular,
                    _ => return Err(unknown()),
                },
            },
            _ => return Err(unknown()),
        };
        kind.check()?;
        Ok(kind)
    }
}

/// Severity of a validation finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.violations.iter().any(|v| v.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Warning)
    }
}

/// Message attached to grids that leave the closed forms' validity domain.
pub const OUTSIDE_VALIDITY: &str = "outside stated validity";

/// Checks a parameter set and grid against a backend selection.
pub fn validate<T: Real>(
    params: &SystemParams<T>,
    grid: &TimeGrid<T>,
    backend: BackendSelection,
) -> ValidationReport {
    let mut violations: Vec<Violation> = params
        .violations()
        .into_iter()
        .chain(grid.violations())
        .map(|message| Violation {
            severity: Severity::Error,
            message,
        })
        .collect();
    if backend.uses_perturbative() {
        if let Some(max) = grid.samples.iter().copied().fold(None, |acc: Option<T>, s| {
            Some(acc.map_or(s, |a| a.max(s)))
        }) {
            if max >= T::one() {
                violations.push(Violation {
                    severity: Severity::Warning,
                    message: format!(
                        "{OUTSIDE_VALIDITY}: perturbative backend with omega*t up to {max} (needs omega*t < 1)"
                    ),
                });
            }
        }
    }
    ValidationReport { violations }
}

/// A named figure-replication parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub omega: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kinds: Vec<WitnessKind>,
}

impl Preset {
    pub fn params(&self) -> SystemParams<f64> {
        SystemParams::real(self.omega, self.delta, self.alpha, self.beta)
            .expect("preset parameters are valid")
    }
}

/// Default preset grid: 200 uniform samples on `(0, 0.5]`.
pub const PRESET_GRID_MAX: f64 = 0.5;
pub const PRESET_GRID_SAMPLES: usize = 200;

/// All shipped presets. Every one uses `omega = 100`, `delta = 10^4`.
pub fn presets() -> Vec<Preset> {
    use WitnessKind::*;
    let variances = vec![VarXa, VarYa, VarXb, VarYb, VarXab, VarYab];
    let make = |name, description, alpha, beta, kinds| Preset {
        name,
        description,
        omega: 100.0,
        delta: 1.0e4,
        alpha,
        beta,
        kinds,
    };
    vec![
        make("fig1", "quadrature variances of a, b and ab", 5.0, 2.0, variances),
        make(
            "fig1d",
            "phase-controlled quadrature squeezing of a and ab",
            5.0,
            -2.0,
            vec![VarXa, VarYa, VarXab, VarYab],
        ),
        make(
            "fig2",
            "amplitude-squared squeezing of a and b",
            10.0,
            2.0,
            vec![AmpSq1a, AmpSq2a, AmpSq1b, AmpSq2b],
        ),
        make(
            "fig3",
            "antibunching in a, b and ab",
            10.0,
            2.0,
            vec![Da, Db, Dab],
        ),
        make(
            "fig3d",
            "phase-controlled antibunching in a",
            10.0,
            -2.0,
            vec![Da, Db, Dab],
        ),
        make(
            "fig4",
            "HZ-1, HZ-2 and Duan entanglement",
            10.0,
            2.0,
            vec![Hz1, Hz2, Duan],
        ),
        make(
            "fig5",
            "higher-order antibunching and higher-order HZ entanglement",
            10.0,
            2.0,
            vec![
                HoaA(3),
                HoaA(4),
                HoaB(3),
                HoaB(4),
                Hz1,
                Hz1Higher { n: 1, m: 2 },
                Hz2Higher { n: 1, m: 1 },
                Hz2Higher { n: 1, m: 2 },
                Hz2Higher { n: 1, m: 3 },
            ],
        ),
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}
