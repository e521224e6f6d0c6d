//! Witness sweeps over a time grid, nonclassical-region detection and
//! cross-backend convergence checks.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{witness_exact, CutoffPolicy, FockSpace, Hamiltonian, PropagatorOptions, StateVector, StepStats};
use crate::model::{BackendSelection, BackendTag, SystemParams, TimeGrid, WitnessKind};
use crate::perturbative::{closed_form, CoefficientFault, Coefficients};
use crate::scalar::Real;

/// Largest `|alpha|` the exact backend accepts without `allow_heavy`.
pub const EXACT_ALPHA_CEILING: f64 = 5.0;

/// Settings for the exact backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions<T> {
    pub propagator: PropagatorOptions<T>,
    pub cutoffs: CutoffPolicy,
    /// Permit `|alpha| > EXACT_ALPHA_CEILING`.
    pub allow_heavy: bool,
}

impl<T: Real> Default for ExactOptions<T> {
    fn default() -> Self {
        Self {
            propagator: PropagatorOptions::default(),
            cutoffs: CutoffPolicy::Auto,
            allow_heavy: false,
        }
    }
}

/// One witness evaluated by one backend on a grid of rescaled times.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSeries<T> {
    pub kind: WitnessKind,
    pub backend: BackendTag,
    pub params: SystemParams<T>,
    pub grid: TimeGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> WitnessSeries<T> {
    /// `(omega t, value)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.grid.samples().iter().copied().zip(self.values.iter().copied())
    }
}

/// Exact trajectory through a grid, sampled by a visitor.
pub struct ExactRun<T> {
    hamiltonian: Hamiltonian<T>,
    initial: StateVector<T>,
    options: PropagatorOptions<T>,
}

impl<T: Real> ExactRun<T> {
    pub fn new(params: &SystemParams<T>, opts: &ExactOptions<T>) -> Result<Self> {
        params.check()?;
        let alpha_sq = params.abs_alpha_sq().to_f64().unwrap_or(f64::INFINITY);
        let ceiling = EXACT_ALPHA_CEILING * EXACT_ALPHA_CEILING;
        if !opts.allow_heavy && alpha_sq > ceiling * (1.0 + 1e-12) {
            return Err(Error::ExactCeiling { alpha_sq, ceiling });
        }
        let space = Arc::new(FockSpace::build(params, opts.cutoffs)?);
        let initial = StateVector::coherent(space.clone(), params.alpha, params.beta)?;
        let hamiltonian = Hamiltonian::new(params, space)?;
        Ok(Self {
            hamiltonian,
            initial,
            options: opts.propagator,
        })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian<T> {
        &self.hamiltonian
    }

    pub fn initial(&self) -> &StateVector<T> {
        &self.initial
    }

    /// Propagates through the physical times `times` (nondecreasing), calling
    /// `visit` on each state.
    pub fn walk<F>(&self, times: &[T], mut visit: F) -> Result<StepStats>
    where
        F: FnMut(usize, &StateVector<T>) -> Result<()>,
    {
        let mut state = self.initial.clone();
        let mut stats = StepStats::default();
        for (i, &t) in times.iter().enumerate() {
            let (next, s) = state.propagate(&self.hamiltonian, t, &self.options)?;
            stats += s;
            state = next;
            visit(i, &state)?;
        }
        Ok(stats)
    }

    /// All `kinds` at every physical time, `values[kind][sample]`.
    pub fn witnesses(&self, times: &[T], kinds: &[WitnessKind]) -> Result<Vec<Vec<T>>> {
        let mut out = vec![Vec::with_capacity(times.len()); kinds.len()];
        self.walk(times, |_, state| {
            let row: Vec<T> = kinds
                .par_iter()
                .map(|k| witness_exact(state, k))
                .collect::<Result<_>>()?;
            for (series, v) in out.iter_mut().zip(row) {
                series.push(v);
            }
            Ok(())
        })?;
        Ok(out)
    }
}

/// Closed-form values of `kinds` on the physical times `times`,
/// `values[kind][sample]`.
pub fn perturbative_witnesses<T: Real>(
    params: &SystemParams<T>,
    times: &[T],
    kinds: &[WitnessKind],
    fault: Option<&CoefficientFault<T>>,
) -> Result<Vec<Vec<T>>> {
    if let Some(k) = kinds.iter().find(|k| !k.has_closed_form()) {
        let kind = k.to_string();
        return Err(match k {
            WitnessKind::LeeR { .. } => Error::ExactOnly { kind },
            _ => Error::NotDerived { kind },
        });
    }
    let rows: Vec<Vec<T>> = times
        .par_iter()
        .map(|&t| {
            let mut coeffs = Coefficients::at(params, t)?;
            if let Some(f) = fault {
                f.apply(&mut coeffs);
            }
            kinds.iter().map(|k| closed_form(k, params, &coeffs)).collect()
        })
        .collect::<Result<_>>()?;
    Ok((0..kinds.len())
        .map(|k| rows.iter().map(|r| r[k]).collect())
        .collect())
}

/// Everything a sweep needs beyond the physics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions<'a, T> {
    pub backend: BackendSelection,
    pub exact: ExactOptions<T>,
    pub fault: Option<&'a CoefficientFault<T>>,
}

impl<T: Real> Default for SweepOptions<'_, T> {
    fn default() -> Self {
        Self {
            backend: BackendSelection::Perturbative,
            exact: ExactOptions::default(),
            fault: None,
        }
    }
}

/// Evaluates `kinds` on `grid` (rescaled times) with the selected backends.
///
/// Series are ordered by kind, then backend.
pub fn sweep<T: Real>(
    params: &SystemParams<T>,
    grid: &TimeGrid<T>,
    kinds: &[WitnessKind],
    opts: &SweepOptions<'_, T>,
) -> Result<Vec<WitnessSeries<T>>> {
    params.check()?;
    if kinds.is_empty() {
        return Ok(Vec::new());
    }
    TimeGrid::new(grid.samples().to_vec())?;
    for k in kinds {
        k.check()?;
    }
    let times: Vec<T> = grid.samples().iter().map(|&s| params.rescale(s)).collect();

    let pert = if opts.backend.uses_perturbative() {
        Some(perturbative_witnesses(params, &times, kinds, opts.fault)?)
    } else {
        None
    };
    let exact = if opts.backend.uses_exact() {
        Some(ExactRun::new(params, &opts.exact)?.witnesses(&times, kinds)?)
    } else {
        None
    };

    let mut out = Vec::with_capacity(kinds.len() * opts.backend.tags().len());
    for (i, kind) in kinds.iter().enumerate() {
        for &tag in opts.backend.tags() {
            let values = match tag {
                BackendTag::Perturbative => pert.as_ref().map(|v| v[i].clone()),
                BackendTag::Exact => exact.as_ref().map(|v| v[i].clone()),
            }
            .expect("backend selected");
            out.push(WitnessSeries {
                kind: *kind,
                backend: tag,
                params: *params,
                grid: grid.clone(),
                values,
            });
        }
    }
    Ok(out)
}

/// Maximal intervals of rescaled time where a witness lies strictly below its
/// classical threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct NonclassicalRegion<T> {
    pub kind: WitnessKind,
    pub backend: BackendTag,
    pub threshold: T,
    pub intervals: Vec<(T, T)>,
}

impl<T: Real> NonclassicalRegion<T> {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, omega_t: T) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= omega_t && omega_t <= b)
    }
}

/// Nonclassical intervals of a series. Edges between samples are placed by
/// linear interpolation of the threshold crossing.
pub fn regions<T: Real>(series: &WitnessSeries<T>) -> NonclassicalRegion<T> {
    let threshold = series.kind.threshold::<T>();
    let pts: Vec<(T, T)> = series.points().collect();
    let below = |v: T| v < threshold;
    let crossing = |(x0, y0): (T, T), (x1, y1): (T, T)| {
        if y1 == y0 {
            x0
        } else {
            x0 + (threshold - y0) * (x1 - x0) / (y1 - y0)
        }
    };
    let mut intervals = Vec::new();
    let mut start: Option<T> = None;
    for (i, &(x, y)) in pts.iter().enumerate() {
        match (start, below(y)) {
            (None, true) => {
                start = Some(if i == 0 { x } else { crossing(pts[i - 1], (x, y)) });
            }
            (Some(s), false) => {
                intervals.push((s, crossing(pts[i - 1], (x, y))));
                start = None;
            }
            _ => {}
        }
    }
    if let (Some(s), Some(&(x, _))) = (start, pts.last()) {
        intervals.push((s, x));
    }
    NonclassicalRegion {
        kind: series.kind,
        backend: series.backend,
        threshold,
        intervals,
    }
}

/// `|perturbative - exact|` at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderPoint<T> {
    /// Rescaled time, or coupling for a coupling ladder.
    pub x: T,
    pub residual: T,
}

/// Fewest rungs a convergence ladder may have.
pub const MIN_LADDER_POINTS: usize = 4;

/// Cross-backend comparison of one witness.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T> {
    pub kind: WitnessKind,
    pub max_abs_residual: T,
    /// `(omega t, |perturbative - exact|)` on the requested grid.
    pub residuals: Vec<(T, T)>,
    pub ladder: Vec<LadderPoint<T>>,
    /// Least-squares slope of `log |residual|` against `log x` on the ladder.
    pub slope: T,
}

/// Rescaled times `max * {1, 1/2, 1/4, 1/8}`.
pub fn default_ladder<T: Real>(max: T) -> Result<Vec<T>> {
    if max.is_nan() || max <= T::zero() || !max.is_finite() {
        return Err(Error::DegenerateLadder(format!(
            "ladder needs a positive largest time, got {max}"
        )));
    }
    let half = T::lit(0.5);
    Ok((0..4).map(|k| max * half.powi(k)).collect())
}

/// Least-squares slope of `log y` against `log x`; at least two points
/// with positive `y` are needed.
pub fn log_log_slope<T: Real>(points: &[LadderPoint<T>]) -> Result<T> {
    let usable: Vec<(T, T)> = points
        .iter()
        .filter(|p| p.x > T::zero() && p.residual.abs() > T::zero())
        .map(|p| (p.x.ln(), p.residual.abs().ln()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::DegenerateLadder(format!(
            "{} usable ladder points, need 2",
            usable.len()
        )));
    }
    let n = T::count(usable.len());
    let mx = usable.iter().map(|p| p.0).sum::<T>() / n;
    let my = usable.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    if sxx == T::zero() {
        return Err(Error::DegenerateLadder("ladder abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Compares both backends for `kind` on `grid` and on a ladder of rescaled
/// times (`ladder`, or [`default_ladder`] of the grid maximum).
pub fn compare<T: Real>(
    params: &SystemParams<T>,
    grid: &TimeGrid<T>,
    kind: &WitnessKind,
    ladder: Option<&[T]>,
    exact: &ExactOptions<T>,
    fault: Option<&CoefficientFault<T>>,
) -> Result<ComparisonReport<T>> {
    kind.check()?;
    if !kind.has_closed_form() {
        return Err(Error::ExactOnly { kind: kind.to_string() });
    }
    let rungs = match ladder {
        Some(l) => l.to_vec(),
        None => default_ladder(grid.max().unwrap_or_else(T::zero))?,
    };
    if rungs.iter().any(|&x| !(x > T::zero() && x.is_finite())) {
        return Err(Error::DegenerateLadder("ladder times must be positive".into()));
    }
    let mut distinct = rungs.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    distinct.dedup();
    if distinct.len() < MIN_LADDER_POINTS {
        return Err(Error::DegenerateLadder(format!(
            "{} distinct ladder times, need {MIN_LADDER_POINTS}",
            distinct.len()
        )));
    }

    let mut all: Vec<T> = grid.samples().iter().chain(rungs.iter()).copied().collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    all.dedup();
    let times: Vec<T> = all.iter().map(|&s| params.rescale(s)).collect();
    let kinds = std::slice::from_ref(kind);
    let pert = perturbative_witnesses(params, &times, kinds, fault)?.remove(0);
    let exact = ExactRun::new(params, exact)?.witnesses(&times, kinds)?.remove(0);
    let residual_at = |x: T| {
        let i = all.iter().position(|&s| s == x).expect("sample present");
        (pert[i] - exact[i]).abs()
    };

    let residuals: Vec<(T, T)> = grid.samples().iter().map(|&x| (x, residual_at(x))).collect();
    let max_abs_residual = residuals.iter().map(|r| r.1).fold(T::zero(), T::max);
    let ladder: Vec<LadderPoint<T>> = rungs
        .iter()
        .map(|&x| LadderPoint { x, residual: residual_at(x) })
        .collect();
    let slope = log_log_slope(&ladder)?;
    Ok(ComparisonReport {
        kind: *kind,
        max_abs_residual,
        residuals,
        ladder,
        slope,
    })
}

/// Residuals at a fixed physical time `t` while the coupling is halved from
/// `params.omega` `rungs - 1` times. The neglected terms scale with a power of
/// the coupling, so the slope of this ladder measures the expansion order.
pub fn coupling_ladder<T: Real>(
    params: &SystemParams<T>,
    t: T,
    kind: &WitnessKind,
    rungs: usize,
    exact: &ExactOptions<T>,
) -> Result<(Vec<LadderPoint<T>>, T)> {
    if !kind.has_closed_form() {
        return Err(Error::ExactOnly { kind: kind.to_string() });
    }
    let half = T::lit(0.5);
    let points = (0..rungs)
        .map(|k| {
            let mut p = *params;
            p.omega = params.omega * half.powi(k as i32);
            let pert = closed_form(kind, &p, &Coefficients::at(&p, t)?)?;
            let ex = ExactRun::new(&p, exact)?.witnesses(&[t], std::slice::from_ref(kind))?[0][0];
            Ok(LadderPoint { x: p.omega, residual: (pert - ex).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = log_log_slope(&points)?;
    Ok((points, slope))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64], kind: WitnessKind) -> WitnessSeries<f64> {
        let grid = TimeGrid::new((0..values.len()).map(|i| i as f64).collect()).unwrap();
        WitnessSeries {
            kind,
            backend: BackendTag::Perturbative,
            params: SystemParams::real(1.0, 1.0, 0.0, 0.0).unwrap(),
            grid,
            values: values.to_vec(),
        }
    }

    #[test]
    fn region_edges_interpolate() {
        let r = regions(&series(&[1.0, -1.0, -1.0, 1.0], WitnessKind::Da));
        assert_eq!(r.intervals, vec![(0.5, 2.5)]);
    }

    #[test]
    fn region_threshold_is_strict() {
        let r = regions(&series(&[0.25, 0.25, 0.25], WitnessKind::VarXa));
        assert!(r.is_empty());
    }

    #[test]
    fn region_open_at_both_ends() {
        let r = regions(&series(&[-1.0, 1.0, 1.0, -2.0], WitnessKind::Hz1));
        assert_eq!(r.intervals.len(), 2);
        assert_eq!(r.intervals[0].0, 0.0);
        assert_eq!(r.intervals[1].1, 3.0);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = [1.0, 0.5, 0.25]
            .iter()
            .map(|&x: &f64| LadderPoint { x, residual: 3.0 * x.powi(4) })
            .collect();
        assert!((log_log_slope(&pts).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_ladder_is_degenerate() {
        assert!(matches!(default_ladder(0.0), Err(Error::DegenerateLadder(_))));
    }

    #[test]
    fn sweep_orders_kind_then_backend() {
        let p = SystemParams::real(100.0, 1.0e4, 0.5, 0.2).unwrap();
        let grid = TimeGrid::new(vec![0.0, 0.01]).unwrap();
        let opts = SweepOptions {
            backend: BackendSelection::Both,
            ..Default::default()
        };
        let kinds = [WitnessKind::Da, WitnessKind::Hz1];
        let out = sweep(&p, &grid, &kinds, &opts).unwrap();
        let order: Vec<_> = out.iter().map(|s| (s.kind, s.backend)).collect();
        assert_eq!(
            order,
            vec![
                (WitnessKind::Da, BackendTag::Perturbative),
                (WitnessKind::Da, BackendTag::Exact),
                (WitnessKind::Hz1, BackendTag::Perturbative),
                (WitnessKind::Hz1, BackendTag::Exact),
            ]
        );
    }
}
