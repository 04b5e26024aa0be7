//! Uniform 1D grid, boundary handling, and solver configuration.

use crate::error::SolverError;
use crate::field::StateField;
use crate::mood::{Cascade, DeltaForm};
use crate::systems::{ConservationLaw, Fallback};

/// Uniform cell-centered mesh with ghost layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x_left: f64,
    x_right: f64,
    n_cells: usize,
    n_ghost: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(x_left: f64, x_right: f64, n_cells: usize, n_ghost: usize) -> Self {
        assert!(n_cells > 0, "grid needs at least one cell");
        assert!(x_right > x_left, "grid extent must be positive");
        let dx = (x_right - x_left) / n_cells as f64;
        Grid1D {
            x_left,
            x_right,
            n_cells,
            n_ghost,
            dx,
        }
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_ghost(&self) -> usize {
        self.n_ghost
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Center of interior cell `i`.
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx
    }

    /// Domain length.
    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }
}

/// Ghost-cell policy at both ends of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Ghost at `-k` copies interior `n_cells - k`; symmetric on the right.
    Periodic,
    /// Ghosts copy the nearest interior cell (zeroth-order extrapolation).
    Free,
}

/// Populate the ghost layers of `field`; interior cells are untouched.
pub fn fill_ghosts<const M: usize>(field: &mut StateField<M>, bc: BoundaryCondition) {
    let n = field.n_cells() as isize;
    let g = field.n_ghost() as isize;
    for k in 1..=g {
        match bc {
            BoundaryCondition::Periodic => {
                *field.cell_mut(-k) = *field.cell(n - k);
                *field.cell_mut(n - 1 + k) = *field.cell(k - 1);
            }
            BoundaryCondition::Free => {
                *field.cell_mut(-k) = *field.cell(0);
                *field.cell_mut(n - 1 + k) = *field.cell(n - 1);
            }
        }
    }
}

/// Run-wide solver parameters.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Courant number in (0, 1].
    pub cfl: f64,
    pub t_final: f64,
    /// Strictly order-decreasing scheme cascade ending at first order.
    pub cascade: Cascade,
    /// Flat-region floor of the relaxed discrete maximum principle.
    pub tol1: f64,
    /// Range-proportional relaxation of the same.
    pub tol2: f64,
    pub delta_form: DeltaForm,
    /// First-order flux used at the bottom of the cascade.
    pub fallback: Fallback,
    /// Abort when more than this fraction of cells stays non-finite
    /// after the cascade is exhausted.
    pub divergence_fraction: f64,
}

impl SolverConfig {
    pub fn new(cfl: f64, t_final: f64) -> Self {
        assert!(cfl > 0.0 && cfl <= 1.0, "CFL must lie in (0, 1]");
        assert!(t_final >= 0.0, "final time must be non-negative");
        SolverConfig {
            cfl,
            t_final,
            cascade: Cascade::default(),
            tol1: 1e-4,
            tol2: 1e-3,
            delta_form: DeltaForm::Product,
            fallback: Fallback::Rusanov,
            divergence_fraction: 0.5,
        }
    }
}

/// Stable time step from the current field:
/// `min(cfl * dx / lambda_max, t_final - t_now)`.
///
/// A zero maximum wave speed is handled by the final-time cap, so runs
/// on quiescent data still terminate.
pub fn compute_dt<const M: usize, L: ConservationLaw<M>>(
    field: &StateField<M>,
    system: &L,
    grid: &Grid1D,
    cfg: &SolverConfig,
    t_now: f64,
) -> Result<f64, SolverError> {
    let mut lambda_max = 0.0f64;
    for u in field.interior() {
        let speed = system.max_wave_speed(u);
        // f64::max ignores NaN, so check each speed explicitly.
        if !speed.is_finite() {
            return Err(SolverError::NonFiniteWaveSpeed);
        }
        lambda_max = lambda_max.max(speed);
    }
    let remaining = cfg.t_final - t_now;
    let dt = if lambda_max > 0.0 {
        (cfg.cfl * grid.dx() / lambda_max).min(remaining)
    } else {
        remaining
    };
    Ok(dt)
}
