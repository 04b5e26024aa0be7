//! Time integration driver and mesh-refinement studies.

use std::collections::VecDeque;
use std::time::Instant;

use crate::cases::Experiment;
use crate::cat::{cat_update_sweep, conservative_update, CatTables, CatWorkspace};
use crate::error::SolverError;
use crate::field::StateField;
use crate::mesh::{compute_dt, fill_ghosts, Grid1D, SolverConfig};
use crate::mood::{mood_step, MoodContext};
use crate::report::{ConvergenceRow, MoodRunStats, RunReport, Snapshot, StepStats};
use crate::systems::{ConservationLaw, Fallback};
use crate::weights::WeightCache;

/// Scheme selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    Cat2,
    Cat6,
    /// The cascade runner (configured through `SolverConfig::cascade`).
    CatMood6,
    FirstOrder,
    /// Debug hook: writes the exact state instead of solving.
    Exact,
}

impl SchemeChoice {
    pub fn label(&self) -> &'static str {
        match self {
            SchemeChoice::Cat2 => "cat2",
            SchemeChoice::Cat6 => "cat6",
            SchemeChoice::CatMood6 => "catmood6",
            SchemeChoice::FirstOrder => "first",
            SchemeChoice::Exact => "exact",
        }
    }

    fn required_ghosts(&self, cfg: &SolverConfig) -> usize {
        match self {
            SchemeChoice::Cat2 => 1,
            SchemeChoice::Cat6 => 3,
            SchemeChoice::CatMood6 => cfg.cascade.max_p().max(cfg.cascade.top_p()),
            SchemeChoice::FirstOrder | SchemeChoice::Exact => 1,
        }
    }
}

enum Stepper<const M: usize> {
    Cat(CatTables, CatWorkspace<M>),
    Mood(Box<MoodContext<M>>),
    FirstOrder,
    Exact,
}

fn first_order_sweep<const M: usize, L: ConservationLaw<M>>(
    field: &StateField<M>,
    system: &L,
    grid: &Grid1D,
    dt: f64,
    fallback: Fallback,
) -> StateField<M> {
    let fluxes: Vec<[f64; M]> = (0..=grid.n_cells())
        .map(|f| {
            system.low_order_flux(field.cell(f as isize - 1), field.cell(f as isize), fallback)
        })
        .collect();
    conservative_update(field, &fluxes, grid, dt)
}

fn make_snapshot<const M: usize, L: ConservationLaw<M>>(
    field: &StateField<M>,
    law: &L,
    grid: &Grid1D,
    time: f64,
) -> Snapshot {
    let n = grid.n_cells();
    let x = (0..n).map(|i| grid.cell_center(i)).collect();
    let mut columns = vec![Vec::with_capacity(n); M];
    for u in field.interior() {
        let out = law.output_variables(u);
        for c in 0..M {
            columns[c].push(out[c]);
        }
    }
    Snapshot { time, x, columns }
}

/// Advance one experiment from its initial data to `cfg.t_final`.
///
/// Point values are taken at cell centers; every step lands exactly on
/// pending snapshot times and on the final time.
pub fn run_solver<const M: usize, L: ConservationLaw<M>>(
    exp: &Experiment<M, L>,
    scheme: SchemeChoice,
    n_cells: usize,
    cfg: &SolverConfig,
) -> Result<RunReport, SolverError> {
    run_solver_capped(exp, scheme, n_cells, cfg, None)
}

/// `run_solver` with an optional upper bound on the step size, used by
/// refinement studies to keep the Courant number fixed across meshes.
pub(crate) fn run_solver_capped<const M: usize, L: ConservationLaw<M>>(
    exp: &Experiment<M, L>,
    scheme: SchemeChoice,
    n_cells: usize,
    cfg: &SolverConfig,
    dt_cap: Option<f64>,
) -> Result<RunReport, SolverError> {
    let n_ghost = scheme.required_ghosts(cfg);
    assert!(
        n_cells >= 2 * n_ghost.max(1),
        "mesh too coarse for the scheme stencil"
    );
    let grid = exp.grid(n_cells, n_ghost);
    let mut field = StateField::from_fn(n_cells, n_ghost, |i| (exp.initial)(grid.cell_center(i)));

    let cache = WeightCache::new();
    let mut stepper: Stepper<M> = match scheme {
        SchemeChoice::Cat2 => Stepper::Cat(CatTables::new(1, &cache), CatWorkspace::new(1)),
        SchemeChoice::Cat6 => Stepper::Cat(CatTables::new(3, &cache), CatWorkspace::new(3)),
        SchemeChoice::CatMood6 => Stepper::Mood(Box::new(MoodContext::new(&cfg.cascade, &cache))),
        SchemeChoice::FirstOrder => Stepper::FirstOrder,
        SchemeChoice::Exact => {
            if exp.exact_state.is_none() {
                return Err(SolverError::MissingExactState);
            }
            Stepper::Exact
        }
    };

    let dx = grid.dx();
    let initial_integrals: Vec<f64> = field.component_sums().iter().map(|s| s * dx).collect();

    let t_end = cfg.t_final;
    let t_eps = 1e-12 * t_end.max(1.0);
    let mut pending: VecDeque<f64> = {
        let mut times: Vec<f64> = exp
            .snapshot_times
            .iter()
            .copied()
            .filter(|&ts| ts > t_eps && ts < t_end - t_eps)
            .collect();
        times.push(t_end);
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.into_iter().collect()
    };

    let mut snapshots = Vec::new();
    let mut mood_stats: Option<MoodRunStats> = match scheme {
        SchemeChoice::CatMood6 => Some(MoodRunStats::default()),
        _ => None,
    };
    let mut finite_throughout = true;
    let mut admissible_throughout = true;
    let mut t = 0.0;
    let mut steps = 0usize;

    if t_end <= t_eps {
        snapshots.push(make_snapshot(&field, &exp.law, &grid, 0.0));
    }

    let timer = Instant::now();
    while t_end - t > t_eps {
        fill_ghosts(&mut field, exp.bc);
        let mut dt = compute_dt(&field, &exp.law, &grid, cfg, t)?;
        if let Some(cap) = dt_cap {
            dt = dt.min(cap);
        }
        // Land on the next target time with equal steps instead of one
        // clipped stub: a stray small step changes the effective
        // Courant number of the whole run and muddies error tables.
        let target = pending.front().copied().unwrap_or(t_end);
        let remaining = target - t;
        if remaining > 0.0 && dt > 0.0 {
            let n_steps = (remaining / dt).ceil().max(1.0);
            dt = remaining / n_steps;
        }
        debug_assert!(dt > 0.0, "time step collapsed to zero");

        field = match &mut stepper {
            Stepper::Cat(tables, ws) => cat_update_sweep(&field, &exp.law, tables, ws, &grid, dt).0,
            Stepper::Mood(ctx) => {
                let (next, det) = mood_step(&field, &exp.law, &grid, exp.bc, dt, cfg, ctx);
                if det.unresolved_cad as f64 > cfg.divergence_fraction * n_cells as f64 {
                    return Err(SolverError::SolverDiverged {
                        failing: det.unresolved_cad,
                        total: n_cells,
                    });
                }
                let stats = mood_stats.as_mut().unwrap();
                stats.total_demotions += det.demotions;
                stats.max_unresolved = stats.max_unresolved.max(det.unresolved);
                stats.per_step.push(StepStats {
                    step: steps,
                    time: t + dt,
                    n_cad: det.n_cad,
                    n_pad: det.n_pad,
                    n_nad: det.n_nad,
                    rank_counts: det.rank_counts,
                    unresolved: det.unresolved,
                });
                next
            }
            Stepper::FirstOrder => first_order_sweep(&field, &exp.law, &grid, dt, cfg.fallback),
            Stepper::Exact => {
                let exact = exp.exact_state.as_ref().unwrap();
                StateField::from_fn(n_cells, n_ghost, |i| exact(grid.cell_center(i), t + dt))
            }
        };
        t += dt;
        steps += 1;

        finite_throughout &= field.all_finite();
        admissible_throughout &= field.interior().iter().all(|u| exp.law.is_admissible(u));

        if let Some(&ts) = pending.front() {
            if (ts - t).abs() <= t_eps {
                snapshots.push(make_snapshot(&field, &exp.law, &grid, t));
                pending.pop_front();
            }
        }
    }
    let cpu_seconds = timer.elapsed().as_secs_f64();

    let final_integrals: Vec<f64> = field.component_sums().iter().map(|s| s * dx).collect();

    let (reference, l1_errors) = match &exp.reference {
        Some(provider) => {
            let ref_vals = provider(&grid, t_end);
            let mut errors = vec![0.0; M];
            for (i, u) in field.interior().iter().enumerate() {
                let out = exp.law.output_variables(u);
                for c in 0..M {
                    errors[c] += (out[c] - ref_vals[i][c]).abs();
                }
            }
            for e in &mut errors {
                *e *= dx;
            }
            let mut columns = vec![Vec::with_capacity(n_cells); M];
            for v in &ref_vals {
                for c in 0..M {
                    columns[c].push(v[c]);
                }
            }
            let snap = Snapshot {
                time: t_end,
                x: (0..n_cells).map(|i| grid.cell_center(i)).collect(),
                columns,
            };
            (Some(snap), Some(errors))
        }
        None => (None, None),
    };

    Ok(RunReport {
        test_name: exp.name.to_string(),
        scheme_label: scheme.label().to_string(),
        n_cells,
        var_names: exp
            .law
            .output_names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        snapshots,
        reference,
        l1_errors,
        steps,
        cpu_seconds,
        initial_integrals,
        final_integrals,
        finite_throughout,
        admissible_throughout,
        mood: mood_stats,
    })
}

/// Run one scheme on a sequence of refined meshes and tabulate errors
/// and observed orders (first output variable).
///
/// Refined rows inherit the coarsest row's step density (dt scales
/// with dx), so the whole table runs at one Courant number and the
/// observed orders measure the joint space-time accuracy instead of
/// step-count rounding artifacts.
pub fn convergence_study<const M: usize, L: ConservationLaw<M>>(
    exp: &Experiment<M, L>,
    scheme: SchemeChoice,
    meshes: &[usize],
    cfg: &SolverConfig,
) -> Result<Vec<ConvergenceRow>, SolverError> {
    assert!(
        meshes.windows(2).all(|w| w[0] < w[1]),
        "mesh list must be strictly increasing"
    );
    let mut rows = Vec::with_capacity(meshes.len());
    let mut prev: Option<(usize, f64)> = None;
    let mut base: Option<(usize, usize)> = None; // (N0, steps0)
    for &n in meshes {
        let dt_cap = base.and_then(|(n0, steps0)| {
            (n % n0 == 0 && cfg.t_final > 0.0).then(|| cfg.t_final / (steps0 * (n / n0)) as f64)
        });
        let report = run_solver_capped(exp, scheme, n, cfg, dt_cap)?;
        if base.is_none() && report.steps > 0 {
            base = Some((n, report.steps));
        }
        let error = report
            .l1_errors
            .as_ref()
            .expect("convergence study needs a reference solution")[0];
        let order = prev.and_then(|(n0, e0)| {
            (e0 > 0.0 && error > 0.0).then(|| (e0 / error).ln() / (n as f64 / n0 as f64).ln())
        });
        rows.push(ConvergenceRow {
            n_cells: n,
            l1_error: error,
            order,
            cpu_seconds: report.cpu_seconds,
        });
        prev = Some((n, error));
    }
    Ok(rows)
}
