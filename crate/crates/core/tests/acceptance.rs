//! Acceptance criteria A1-A7. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use ambec::fock::{witness_exact, CutoffPolicy};
use ambec::perturbative::{self, Coefficients};
use ambec::{
    compare, coupling_ladder, preset, presets, regions, sweep, BackendSelection, ExactOptions, ExactRun, Grid,
    Params, SweepOptions, WitnessKind, PRESET_GRID_MAX, PRESET_GRID_SAMPLES,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const A1_EXACT_TOL: f64 = 1e-9;
const A1_PERT_TOL: f64 = 1e-12;
const A2_DRAWS: usize = 100;
const A2_IDENTITY_TOL: f64 = 1e-12;
const A2_ODE_TOL: f64 = 1e-8;
const A2_MAX_OMEGA_T: f64 = 0.3;
const A3_LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
const A3_MIN_SLOPE: f64 = 3.0;
const A3_HEADROOM: f64 = 1.5;
const A3_COUPLING_TIME: f64 = 1e-3;
const A3_COUPLING_RUNGS: usize = 4;
const A4_MIN_LENGTH: f64 = 0.1;
const A5_TOL: f64 = 1e-12;
const A6_NORM_TOL: f64 = 1e-9;
const A6_CHARGE_TOL: f64 = 1e-8;
const A6_ENERGY_TOL: f64 = 1e-8;
const A6_BUMP_TOL: f64 = 1e-6;
const A6_SAMPLES: usize = 50;
const A7_SAMPLES: usize = 20;

/// `|pert - exact|` at `omega t = 0.1` for `omega = 100, delta = 1e4,
/// alpha = 2, beta = 1`, recorded at the first verified run.
const A3_FROZEN: [(&str, f64); 24] = [
    ("VarXa", 7.970714e-6),
    ("VarYa", 3.235856e-6),
    ("VarXb", 4.319669e-7),
    ("VarYb", 5.109347e-6),
    ("VarXab", 4.690857e-6),
    ("VarYab", 2.309184e-6),
    ("AmpSq1a", 1.239768e-4),
    ("AmpSq2a", 9.843336e-5),
    ("AmpSq1b", 9.943837e-6),
    ("AmpSq2b", 7.387399e-6),
    ("Da", 1.116902e-4),
    ("Db", 8.921475e-7),
    ("Dab", 3.233090e-5),
    ("HOAa(3)", 4.317930e-3),
    ("HOAa(4)", 6.026906e-2),
    ("HOAb(3)", 2.314522e-5),
    ("HOAb(4)", 8.418165e-5),
    ("HZ1", 6.130395e-5),
    ("HZ2", 7.974341e-6),
    ("Duan", 9.526691e-6),
    ("HZ1Higher(1,2)", 9.876067e-5),
    ("HZ2Higher(1,1)", 7.974341e-6),
    ("HZ2Higher(1,2)", 6.806350e-5),
    ("HZ2Higher(1,3)", 2.423347e-4),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn kind(s: &str) -> WitnessKind {
    s.parse().expect("valid witness")
}

fn preset_grid() -> Grid {
    Grid::uniform(PRESET_GRID_MAX, PRESET_GRID_SAMPLES).expect("valid grid")
}

fn a3_params() -> Params {
    Params::real(100.0, 1e4, 2.0, 1.0).expect("valid params")
}

fn a1_baselines() -> Outcome {
    let variances = ["VarXa", "VarYa", "VarXb", "VarYb", "VarXab", "VarYab"].map(kind);
    let mut worst_exact: f64 = 0.0;
    let mut worst_pert: f64 = 0.0;
    let mut checked = 0;
    for name in ["fig1", "fig4"] {
        let p = preset(name).expect("preset");
        let params = p.params();
        let mut kinds: Vec<WitnessKind> = variances.to_vec();
        kinds.extend(p.kinds.iter().filter(|k| !variances.contains(k)).cloned());
        let opts = ExactOptions {
            allow_heavy: true,
            ..Default::default()
        };
        let run = ExactRun::new(&params, &opts).expect("exact setup");
        for k in &kinds {
            let base = k.threshold::<f64>();
            let e = witness_exact(run.initial(), k).expect("exact witness");
            let q = perturbative::witness(k, &params, 0.0).expect("closed form");
            worst_exact = worst_exact.max((e - base).abs());
            worst_pert = worst_pert.max((q - base).abs());
            checked += 1;
        }
    }
    Outcome {
        pass: worst_exact <= A1_EXACT_TOL && worst_pert <= A1_PERT_TOL,
        detail: format!(
            "{checked} witness baselines on fig1/fig4: exact dev {worst_exact:.2e} (tol {A1_EXACT_TOL:.0e}), perturbative dev {worst_pert:.2e} (tol {A1_PERT_TOL:.0e})"
        ),
    }
}

fn a2_coefficients() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst_id: f64 = 0.0;
    let mut worst_ode: f64 = 0.0;
    for _ in 0..A2_DRAWS {
        let omega = rng.random_range(1.0..200.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let delta = sign * omega * 10f64.powf(rng.random_range(0.0..2.0));
        let t = rng.random_range(0.0..A2_MAX_OMEGA_T) / omega;
        let params = Params::real(omega, delta, 1.0, 1.0).expect("valid params");
        let c = Coefficients::at(&params, t).expect("coefficients");
        let identities = [
            c.g2 - c.f1 * c.f2 / 2.0,
            c.g3 - c.g4 / 2.0,
            c.g3 - c.f1 * c.f3.conj(),
            c.g5 + c.g7 / 4.0,
            c.g5 - c.g8 / 2.0,
            c.g5 - c.f1 * c.f5 / 2.0,
            c.g6 - c.f1 * c.f8.conj(),
            c.f3 + c.f4 / 2.0,
            c.f5 + c.f6 / 2.0,
            c.f5 - c.f7 / 3.0,
        ];
        worst_id = identities.iter().map(|z| z.norm()).fold(worst_id, f64::max);
        let oracle = common::integrate_coefficients(omega, delta, t, common::steps_for(delta, t));
        worst_ode = c
            .to_array()
            .iter()
            .zip(oracle.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(worst_ode, f64::max);
    }
    Outcome {
        pass: worst_id <= A2_IDENTITY_TOL && worst_ode <= A2_ODE_TOL,
        detail: format!(
            "{A2_DRAWS} draws: identity dev {worst_id:.2e} (tol {A2_IDENTITY_TOL:.0e}), ODE dev {worst_ode:.2e} (tol {A2_ODE_TOL:.0e})"
        ),
    }
}

fn a3_coincidence() -> (Outcome, Outcome) {
    let params = a3_params();
    let grid = Grid::new(vec![0.0, 0.1]).expect("grid");
    let opts = ExactOptions::default();
    let mut low_slopes = Vec::new();
    let mut regressions = Vec::new();
    let mut min_slope = f64::INFINITY;
    for (name, frozen) in A3_FROZEN {
        let k = kind(name);
        let r = compare(&params, &grid, &k, Some(&A3_LADDER), &opts, None).expect("comparison");
        min_slope = min_slope.min(r.slope);
        if r.slope < A3_MIN_SLOPE {
            low_slopes.push(format!("{name}={:.2}", r.slope));
        }
        let res = r.residuals[1].1;
        if r.residuals[0].1 > A1_EXACT_TOL || res > frozen * A3_HEADROOM {
            regressions.push(format!("{name}={res:.2e}"));
        }
    }
    let ladder = Outcome {
        pass: low_slopes.is_empty() && regressions.is_empty(),
        detail: format!(
            "{} witnesses, min t-ladder slope {min_slope:.2} (need {A3_MIN_SLOPE}); below: [{}]; frozen-tolerance regressions: [{}]",
            A3_FROZEN.len(),
            low_slopes.join(", "),
            regressions.join(", ")
        ),
    };

    let mut low = Vec::new();
    let mut min_c = f64::INFINITY;
    for (name, _) in A3_FROZEN {
        let (_, slope) = coupling_ladder(&params, A3_COUPLING_TIME, &kind(name), A3_COUPLING_RUNGS, &opts)
            .expect("coupling ladder");
        min_c = min_c.min(slope);
        if slope < A3_MIN_SLOPE {
            low.push(format!("{name}={slope:.2}"));
        }
    }
    let coupling = Outcome {
        pass: low.is_empty(),
        detail: format!(
            "supplementary coupling ladder (omega halved at t={A3_COUPLING_TIME}), min slope {min_c:.2} (need {A3_MIN_SLOPE}); below: [{}]",
            low.join(", ")
        ),
    };
    (ladder, coupling)
}

fn pert_series(name: &str, kinds: &[WitnessKind]) -> Vec<ambec::Series> {
    let p = preset(name).expect("preset");
    sweep(&p.params(), &preset_grid(), kinds, &SweepOptions::default()).expect("sweep")
}

fn min_of(s: &ambec::Series) -> f64 {
    s.values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn neg_length(s: &ambec::Series) -> f64 {
    regions(s).intervals.iter().map(|(a, b)| b - a).sum()
}

fn a4_signs() -> Outcome {
    let mut failed = Vec::new();
    let mut check = |label: &str, ok: bool| {
        if !ok {
            failed.push(label.to_string());
        }
    };
    let below = |s: &ambec::Series| !regions(s).is_empty();

    let f1 = pert_series("fig1", &[kind("VarXa"), kind("VarXb"), kind("VarYb")]);
    check("fig1 VarXa", below(&f1[0]));
    check("fig1 VarXb", below(&f1[1]));
    check("fig1 VarYb", below(&f1[2]));

    let f1d = pert_series("fig1d", &[kind("VarYa")]);
    check("fig1d VarYa", below(&f1d[0]));

    let amp = ["AmpSq1a", "AmpSq2a", "AmpSq1b", "AmpSq2b"].map(kind);
    for s in pert_series("fig2", &amp) {
        check(&format!("fig2 {}", s.kind), below(&s));
    }

    let f3 = pert_series("fig3", &[kind("Da"), kind("Db"), kind("Dab")]);
    check("fig3 Db length", neg_length(&f3[1]) >= A4_MIN_LENGTH);
    check("fig3 Dab length", neg_length(&f3[2]) >= A4_MIN_LENGTH);
    let f3d = pert_series("fig3d", &[kind("Da")]);
    check("fig3d Da grows", neg_length(&f3d[0]) > neg_length(&f3[0]));

    let f4 = pert_series("fig4", &[kind("HZ1"), kind("HZ2"), kind("Duan")]);
    check("fig4 HZ1", f4[0].values.iter().all(|&v| v < 0.0));
    check("fig4 HZ2", f4[1].values.iter().all(|&v| v < 0.0));
    check("fig4 Duan", f4[2].values.iter().all(|&v| v >= 0.0));

    let f5 = pert_series(
        "fig5",
        &["HOAa(3)", "HOAa(4)", "HOAb(3)", "HOAb(4)", "HZ2Higher(1,1)", "HZ2Higher(1,2)", "HZ2Higher(1,3)"].map(kind),
    );
    let depth = |s: &ambec::Series| (-min_of(s)).max(0.0);
    check("fig5 HOAa depth", min_of(&f5[1]) < 0.0 && depth(&f5[1]) > depth(&f5[0]));
    check("fig5 HOAb depth", min_of(&f5[3]) < 0.0 && depth(&f5[3]) > depth(&f5[2]));
    check(
        "fig5 HZ2Higher depth",
        min_of(&f5[4]) < 0.0 && depth(&f5[5]) > depth(&f5[4]) && depth(&f5[6]) > depth(&f5[5]),
    );
    Outcome {
        pass: failed.is_empty(),
        detail: format!("figure-sign claims on the 200-sample preset grids; failed: [{}]", failed.join(", ")),
    }
}

fn a5_reductions() -> Outcome {
    let grid = preset_grid();
    let mut worst_hoa: f64 = 0.0;
    let mut worst_hz: f64 = 0.0;
    for p in presets() {
        let params = p.params();
        let s = sweep(
            &params,
            &grid,
            &["HOAa(2)", "Da", "HZ2Higher(1,1)", "HZ2"].map(kind),
            &SweepOptions::default(),
        )
        .expect("sweep");
        for i in 0..grid.len() {
            worst_hoa = worst_hoa.max((s[0].values[i] - s[1].values[i]).abs());
            worst_hz = worst_hz.max((s[2].values[i] - s[3].values[i]).abs());
        }
    }
    Outcome {
        pass: worst_hoa <= A5_TOL && worst_hz <= A5_TOL,
        detail: format!(
            "max |HOAa(2) - Da| = {worst_hoa:.2e}, max |HZ2Higher(1,1) - HZ2| = {worst_hz:.2e} (tol {A5_TOL:.0e})"
        ),
    }
}

fn a6_conservation() -> Outcome {
    let params = a3_params();
    let opts = ExactOptions::default();
    let run = ExactRun::new(&params, &opts).expect("exact setup");
    let h = run.hamiltonian();
    let k0 = run.initial().mean_charge();
    let e0 = run.initial().energy(h).expect("energy");
    let grid = Grid::uniform(0.5, A6_SAMPLES).expect("grid");
    let times: Vec<f64> = grid.samples().iter().map(|&s| params.rescale(s)).collect();
    let (mut dn, mut dk, mut de) = (0.0f64, 0.0f64, 0.0f64);
    run.walk(&times, |_, s| {
        dn = dn.max((s.norm() - 1.0).abs());
        dk = dk.max((s.mean_charge() - k0).abs());
        de = de.max((s.energy(h)? - e0).abs());
        Ok(())
    })
    .expect("propagation");

    let kinds: Vec<WitnessKind> = A3_FROZEN
        .iter()
        .map(|(n, _)| kind(n))
        .chain(["LeeR(2,1,a)", "LeeR(3,2,b)", "HZ1Higher(2,3)"].map(kind))
        .collect();
    let space = run.initial().space().scaled(1.25).expect("bumped space");
    let bumped = ExactOptions {
        cutoffs: CutoffPolicy::Manual {
            cutoff_a: space.cutoff_a(),
            cutoff_b: space.cutoff_b(),
        },
        ..opts
    };
    let base = run.witnesses(&times, &kinds).expect("witnesses");
    let big = ExactRun::new(&params, &bumped)
        .and_then(|r| r.witnesses(&times, &kinds))
        .expect("bumped witnesses");
    let bump = base
        .iter()
        .flatten()
        .zip(big.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Outcome {
        pass: dn < A6_NORM_TOL && dk < A6_CHARGE_TOL && de < A6_ENERGY_TOL && bump < A6_BUMP_TOL,
        detail: format!(
            "to omega t = 0.5: norm {dn:.2e}, charge {dk:.2e}, energy {de:.2e}; 25% cutoff bump over {} witnesses {bump:.2e}",
            kinds.len()
        ),
    }
}

fn a7_overlay() -> Outcome {
    let p = preset("fig1").expect("preset");
    let params = p.params();
    let grid = Grid::uniform(PRESET_GRID_MAX, A7_SAMPLES).expect("grid");
    let k = kind("VarXa");
    let s = sweep(
        &params,
        &grid,
        std::slice::from_ref(&k),
        &SweepOptions {
            backend: BackendSelection::Both,
            ..Default::default()
        },
    )
    .expect("sweep");
    let frozen = A3_FROZEN.iter().find(|(n, _)| *n == "VarXa").expect("frozen").1 * A3_HEADROOM;
    let mut outside = Vec::new();
    for ((x, pv), ev) in s[0].points().zip(s[1].values.iter()) {
        let tol = frozen * (x / 0.1).powi(4);
        if (pv - ev).abs() > tol {
            outside.push(format!("{x:.3}"));
        }
    }
    let dip = s[1].values.iter().position(|&v| v < 0.25);
    let returns = dip.is_some_and(|i| s[1].values[i..].iter().any(|&v| v >= 0.25));
    Outcome {
        pass: outside.is_empty() && returns,
        detail: format!(
            "alpha=5 VarXa at {A7_SAMPLES} points: dip-and-return {}; {} points outside the (omega t)^4-scaled tolerance: [{}]",
            if returns { "reproduced" } else { "missing" },
            outside.len(),
            outside.join(", ")
        ),
    }
}

fn report(label: &str, started: Instant, o: &Outcome) -> bool {
    println!(
        "{label} {} ({:.1}s) {}",
        if o.pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        o.detail
    );
    o.pass
}

fn main() -> ExitCode {
    let mut all = true;
    let t = Instant::now();
    all &= report("A1", t, &a1_baselines());
    let t = Instant::now();
    all &= report("A2", t, &a2_coefficients());
    let t = Instant::now();
    let (ladder, coupling) = a3_coincidence();
    all &= report("A3", t, &ladder);
    report("A3+", t, &coupling);
    let t = Instant::now();
    all &= report("A4", t, &a4_signs());
    let t = Instant::now();
    all &= report("A5", t, &a5_reductions());
    let t = Instant::now();
    all &= report("A6", t, &a6_conservation());
    let t = Instant::now();
    all &= report("A7", t, &a7_overlay());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
