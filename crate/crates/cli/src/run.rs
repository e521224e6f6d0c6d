//! Sweep and comparison runs driven by an [`ExperimentConfig`].

use std::fmt::Write as _;

use ambec::{
    compare, sweep, validate, BackendSelection, Error, ExactOptions, Grid, Params, Report, Series,
    SweepOptions, WitnessKind,
};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};

pub const CSV_HEADER: &str = "omega_t,t,witness,order_n,order_m,backend,value";
pub const COMPARE_HEADER: &str = "witness,order_n,order_m,series,omega_t,t,abs_residual";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("invalid experiment: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("{context}: {source}")]
    Engine { context: String, source: Error },

    #[error("{0} witness(es) outside tolerance")]
    CompareFailed(usize),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// `1` for usage and configuration problems, `2` for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Invalid(_) | RunError::Io(_) => 1,
            RunError::Engine { source, .. } => match source {
                Error::InvalidParams(_)
                | Error::InvalidGrid(_)
                | Error::InvalidOrder(_)
                | Error::NotDerived { .. }
                | Error::ExactOnly { .. }
                | Error::InvalidCutoff(_)
                | Error::ExactCeiling { .. }
                | Error::DegenerateLadder(_)
                | Error::UnknownWitness(_) => 1,
                _ => 2,
            },
            RunError::CompareFailed(_) => 2,
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub backend: Option<BackendSelection>,
    pub cutoff_a: Option<usize>,
    pub cutoff_b: Option<usize>,
    pub tolerance: Option<f64>,
    pub force: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), ConfigError> {
        use ambec::fock::CutoffPolicy;
        if let Some(b) = self.backend {
            cfg.backend = b;
        }
        if let Some(t) = self.tolerance {
            cfg.compare.tolerance = t;
        }
        let (a, b) = match cfg.cutoffs {
            CutoffPolicy::Manual { cutoff_a, cutoff_b } => (Some(cutoff_a), Some(cutoff_b)),
            CutoffPolicy::Auto => (None, None),
        };
        cfg.cutoffs = match (self.cutoff_a.or(a), self.cutoff_b.or(b)) {
            (Some(cutoff_a), Some(cutoff_b)) => CutoffPolicy::Manual { cutoff_a, cutoff_b },
            (None, None) => CutoffPolicy::Auto,
            _ => {
                return Err(ConfigError {
                    line: None,
                    message: "--cutoff-a and --cutoff-b must be given together unless the config sets both".into(),
                })
            }
        };
        Ok(())
    }
}

fn context(p: &Params) -> String {
    format!(
        "omega={}, delta={}, alpha={}, beta={}",
        p.omega, p.delta, p.alpha, p.beta
    )
}

fn exact_options(cfg: &ExperimentConfig) -> ExactOptions<f64> {
    let mut opts = ExactOptions {
        cutoffs: cfg.cutoffs,
        allow_heavy: cfg.allow_heavy,
        ..Default::default()
    };
    opts.propagator.tolerance = cfg.step_tolerance;
    opts
}

/// Validation findings; errors always stop the run, warnings unless forced.
/// Returns the warnings that were let through.
pub fn check(cfg: &ExperimentConfig, force: bool) -> Result<Vec<String>, RunError> {
    let report = validate(&cfg.params, &cfg.grid.build(), cfg.backend);
    let mut errors: Vec<String> = report.errors().map(|v| v.message.clone()).collect();
    let warnings: Vec<String> = report.warnings().map(|v| v.message.clone()).collect();
    if cfg.kinds.is_empty() {
        errors.push("no witnesses requested".into());
    }
    for k in &cfg.kinds {
        if let Err(e) = k.check() {
            errors.push(e.to_string());
        }
    }
    if !errors.is_empty() {
        return Err(RunError::Invalid(errors));
    }
    if !warnings.is_empty() && !force {
        let mut w = warnings;
        w.push("rerun with --force to proceed".into());
        return Err(RunError::Invalid(w));
    }
    Ok(warnings)
}

/// Runs every requested witness on every selected backend.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<Series>, RunError> {
    if cfg.backend.uses_perturbative() {
        let missing: Vec<String> = cfg
            .kinds
            .iter()
            .filter(|k| !k.has_closed_form())
            .map(|k| k.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(RunError::Invalid(vec![format!(
                "no closed form for {}; select the exact backend",
                missing.join(", ")
            )]));
        }
    }
    let opts = SweepOptions {
        backend: cfg.backend,
        exact: exact_options(cfg),
        fault: cfg.fault.as_ref(),
    };
    sweep(&cfg.params, &cfg.grid.build(), &cfg.kinds, &opts).map_err(|source| RunError::Engine {
        context: context(&cfg.params),
        source,
    })
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn orders(k: &WitnessKind) -> (String, String) {
    let (n, m) = k.orders();
    (
        n.map(|v| v.to_string()).unwrap_or_default(),
        m.map(|v| v.to_string()).unwrap_or_default(),
    )
}

/// Sweep rows ordered by grid point, then kind, then backend.
pub fn sweep_csv(params: &Params, grid: &Grid, series: &[Series]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, &wt) in grid.samples().iter().enumerate() {
        let t = params.rescale(wt);
        for s in series {
            let (n, m) = orders(&s.kind);
            let _ = writeln!(
                out,
                "{},{},{},{n},{m},{},{}",
                sci(wt),
                sci(t),
                s.kind.base_name(),
                s.backend,
                sci(s.values[i])
            );
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub report: Report,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub verdicts: Vec<Verdict>,
    /// Exact-only kinds that were left out.
    pub skipped: Vec<WitnessKind>,
}

impl CompareOutcome {
    pub fn failures(&self) -> usize {
        self.verdicts.iter().filter(|v| !v.passed).count()
    }
}

/// Cross-backend comparison of every dual-backend kind in the config.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<CompareOutcome, RunError> {
    let (dual, skipped): (Vec<WitnessKind>, Vec<WitnessKind>) =
        cfg.kinds.iter().partition(|k| k.has_closed_form());
    if dual.is_empty() {
        return Err(RunError::Invalid(vec![
            "compare needs at least one witness with a closed form".into(),
        ]));
    }
    let grid = cfg.grid.build();
    let exact = exact_options(cfg);
    let verdicts = dual
        .iter()
        .map(|k| {
            let report = compare(
                &cfg.params,
                &grid,
                k,
                cfg.compare.ladder.as_deref(),
                &exact,
                cfg.fault.as_ref(),
            )
            .map_err(|source| RunError::Engine {
                context: format!("{k} at {}", context(&cfg.params)),
                source,
            })?;
            let passed = report.max_abs_residual <= cfg.compare.tolerance && report.slope >= cfg.compare.min_slope;
            Ok(Verdict { report, passed })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(CompareOutcome { verdicts, skipped })
}

pub fn compare_text(cfg: &ExperimentConfig, outcome: &CompareOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", context(&cfg.params));
    let _ = writeln!(
        out,
        "tolerance {:e}, minimum slope {}",
        cfg.compare.tolerance, cfg.compare.min_slope
    );
    let _ = writeln!(out, "{:<18} {:>14} {:>8}  status", "witness", "max_residual", "slope");
    for v in &outcome.verdicts {
        let _ = writeln!(
            out,
            "{:<18} {:>14.6e} {:>8.3}  {}",
            v.report.kind.to_string(),
            v.report.max_abs_residual,
            v.report.slope,
            if v.passed { "PASS" } else { "FAIL" }
        );
    }
    for k in &outcome.skipped {
        let _ = writeln!(out, "{:<18} {:>14} {:>8}  SKIPPED (exact only)", k.to_string(), "-", "-");
    }
    out
}

/// Residuals on the grid (`series = grid`) and on the ladder (`series = ladder`).
pub fn compare_csv(params: &Params, outcome: &CompareOutcome) -> String {
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for v in &outcome.verdicts {
        let r = &v.report;
        let (n, m) = orders(&r.kind);
        let name = r.kind.base_name();
        let rows = r
            .residuals
            .iter()
            .map(|&(x, y)| ("grid", x, y))
            .chain(r.ladder.iter().map(|p| ("ladder", p.x, p.residual)));
        for (series, x, y) in rows {
            let _ = writeln!(
                out,
                "{name},{n},{m},{series},{},{},{}",
                sci(x),
                sci(params.rescale(x)),
                sci(y)
            );
        }
    }
    out
}

/// `name  omega  delta  alpha  beta  kinds  description` per preset.
pub fn presets_text() -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:>6} {:>8} {:>6} {:>6}  kinds / description",
        "name", "omega", "delta", "alpha", "beta"
    );
    for p in ambec::presets() {
        let kinds: Vec<String> = p.kinds.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(
            out,
            "{:<6} {:>6} {:>8} {:>6} {:>6}  {}\n{:<38}{}",
            p.name,
            p.omega,
            p.delta,
            p.alpha,
            p.beta,
            kinds.join(", "),
            "",
            p.description
        );
    }
    out
}
