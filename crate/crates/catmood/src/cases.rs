//! The built-in test problems: smooth advection, Burgers with step
//! data, and the Sod shock tube.

use std::f64::consts::PI;

use crate::field::StateField;
use crate::mesh::{fill_ghosts, BoundaryCondition, Grid1D};
use crate::systems::euler::{EulerLaw, EulerPrimitive};
use crate::systems::riemann::exact_sod;
use crate::systems::scalar::{exact_advection, ScalarBounds, ScalarKind, ScalarLaw};
use crate::systems::ConservationLaw;

type InitFn<const M: usize> = Box<dyn Fn(f64) -> [f64; M] + Send + Sync>;
type ReferenceFn<const M: usize> = Box<dyn Fn(&Grid1D, f64) -> Vec<[f64; M]> + Send + Sync>;
type ExactStateFn<const M: usize> = Box<dyn Fn(f64, f64) -> [f64; M] + Send + Sync>;

/// Where the sample points sit relative to the stated domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplePhase {
    /// Cell centers `x_left + (i + 1/2) dx`.
    CellCenters,
    /// Nodes `x_left + i dx`, realized by shifting the mesh half a
    /// cell. For periodic problems the two phases are equivalent
    /// placements of the same period; they differ in whether profile
    /// extrema can coincide with sample points on coarse meshes.
    Nodes,
}

/// A complete problem setup: domain, law, initial data, and reference.
pub struct Experiment<const M: usize, L: ConservationLaw<M>> {
    pub name: &'static str,
    pub x_left: f64,
    pub x_right: f64,
    pub bc: BoundaryCondition,
    pub t_final: f64,
    pub law: L,
    pub phase: SamplePhase,
    /// Point values of the conserved state at a cell center.
    pub initial: InitFn<M>,
    /// Output-variable reference columns at the cell centers of `grid`.
    pub reference: Option<ReferenceFn<M>>,
    /// Exact conserved state, for the debug scheme that bypasses the
    /// solver entirely.
    pub exact_state: Option<ExactStateFn<M>>,
    /// Intermediate times to snapshot besides the final one.
    pub snapshot_times: Vec<f64>,
}

impl<const M: usize, L: ConservationLaw<M>> Experiment<M, L> {
    /// Mesh for `n_cells`, with the sample phase applied.
    pub fn grid(&self, n_cells: usize, n_ghost: usize) -> Grid1D {
        let dx = (self.x_right - self.x_left) / n_cells as f64;
        let shift = match self.phase {
            SamplePhase::CellCenters => 0.0,
            SamplePhase::Nodes => -0.5 * dx,
        };
        Grid1D::new(self.x_left + shift, self.x_right + shift, n_cells, n_ghost)
    }
}

fn advection_profile(x: f64) -> f64 {
    0.5 * x.sin() + 1.0
}

/// Smooth periodic advection on [0, 2π] to t = 1.
pub fn advection_smooth() -> Experiment<1, ScalarLaw> {
    let speed = 1.0;
    Experiment {
        name: "advection",
        x_left: 0.0,
        x_right: 2.0 * PI,
        bc: BoundaryCondition::Periodic,
        t_final: 1.0,
        law: ScalarLaw::with_bounds(ScalarKind::Advection { speed }, ScalarBounds::new(0.5, 1.5)),
        // Sample at the nodes i*dx: on coarse meshes the center phase
        // parks the sine extrema exactly on sample points, which mutes
        // the coarse-mesh detector activity this test is meant to show.
        phase: SamplePhase::Nodes,
        initial: Box::new(|x| [advection_profile(x)]),
        reference: Some(Box::new(move |grid, t| {
            (0..grid.n_cells())
                .map(|i| {
                    [exact_advection(
                        advection_profile,
                        speed,
                        grid.cell_center(i),
                        t,
                        0.0,
                        2.0 * PI,
                    )]
                })
                .collect()
        })),
        exact_state: Some(Box::new(move |x, t| {
            [exact_advection(
                advection_profile,
                speed,
                x,
                t,
                0.0,
                2.0 * PI,
            )]
        })),
        snapshot_times: vec![],
    }
}

fn burgers_profile(x: f64) -> f64 {
    if x <= 0.5 {
        1.1
    } else if x < 1.5 {
        2.1
    } else {
        0.1
    }
}

/// First-order Rusanov run used as the Burgers reference solution,
/// sampled by linear interpolation onto the requested grid.
fn burgers_reference(grid: &Grid1D, t_end: f64, n_fine: usize) -> Vec<[f64; 1]> {
    let law = ScalarLaw::new(ScalarKind::Burgers);
    let fine = Grid1D::new(grid.x_left(), grid.x_right(), n_fine, 1);
    let mut field = StateField::<1>::from_fn(n_fine, 1, |i| [burgers_profile(fine.cell_center(i))]);
    let mut t = 0.0;
    let eps = 1e-12 * t_end.max(1.0);
    while t_end - t > eps {
        fill_ghosts(&mut field, BoundaryCondition::Periodic);
        let mut lambda = 0.0f64;
        for u in field.interior() {
            lambda = lambda.max(law.max_wave_speed(u));
        }
        let dt = (0.9 * fine.dx() / lambda).min(t_end - t);
        let fluxes: Vec<[f64; 1]> = (0..=n_fine)
            .map(|f| {
                crate::loworder::rusanov_flux(
                    &law,
                    field.cell(f as isize - 1),
                    field.cell(f as isize),
                )
            })
            .collect();
        field = crate::cat::conservative_update(&field, &fluxes, &fine, dt);
        t += dt;
    }
    // Linear interpolation between fine cell centers.
    let values = field.interior();
    (0..grid.n_cells())
        .map(|i| {
            let x = grid.cell_center(i);
            let pos = (x - fine.cell_center(0)) / fine.dx();
            let j = (pos.floor().max(0.0) as usize).min(n_fine - 2);
            let w = (pos - j as f64).clamp(0.0, 1.0);
            [(1.0 - w) * values[j][0] + w * values[j + 1][0]]
        })
        .collect()
}

/// Burgers with piecewise-constant data on [0, 1.7], periodic, to
/// t = 0.65 with an intermediate snapshot at t = 0.3.
pub fn burgers_steps() -> Experiment<1, ScalarLaw> {
    Experiment {
        name: "burgers",
        x_left: 0.0,
        x_right: 1.7,
        bc: BoundaryCondition::Periodic,
        t_final: 0.65,
        law: ScalarLaw::with_bounds(ScalarKind::Burgers, ScalarBounds::new(0.1, 2.1)),
        phase: SamplePhase::CellCenters,
        initial: Box::new(|x| [burgers_profile(x)]),
        reference: Some(Box::new(|grid, t| burgers_reference(grid, t, 2000))),
        exact_state: None,
        snapshot_times: vec![0.3],
    }
}

/// Sod shock tube on [-1, 1], free boundaries, to t = 0.3.
pub fn sod(gamma: f64) -> Experiment<3, EulerLaw> {
    let law = EulerLaw::new(gamma);
    let left = EulerPrimitive {
        rho: 1.0,
        u: 0.0,
        p: 1.0,
    };
    let right = EulerPrimitive {
        rho: 0.125,
        u: 0.0,
        p: 0.1,
    };
    Experiment {
        name: "sod",
        x_left: -1.0,
        x_right: 1.0,
        bc: BoundaryCondition::Free,
        t_final: 0.3,
        law,
        phase: SamplePhase::CellCenters,
        initial: Box::new(move |x| law.from_primitive(if x <= 0.0 { left } else { right })),
        reference: Some(Box::new(move |grid, t| {
            (0..grid.n_cells())
                .map(|i| {
                    let w = exact_sod(grid.cell_center(i), t, left, right, gamma)
                        .expect("Sod data admit an exact solution");
                    [w.rho, w.u, w.p]
                })
                .collect()
        })),
        exact_state: None,
        snapshot_times: vec![],
    }
}
