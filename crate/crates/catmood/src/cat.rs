//! Compact approximate Taylor (CAT2P) numerical fluxes.
//!
//! The order-2P flux at interface `i+1/2` is assembled from the 2P-cell
//! stencil `{x_{i-P+1}, ..., x_{i+P}}`:
//!
//! 1. start from the nodal fluxes `f(u_{i+j})`;
//! 2. for k = 2..=2P, recover the (k-1)-th time derivative of the flux
//!    at each node by (a) turning the previous flux level into a time
//!    derivative of the solution through the governing equation,
//!    (b) Taylor-predicting flux values at the 2P surrounding time
//!    levels, and (c) differentiating those predictions in time;
//! 3. sum the levels, brought to the interface with conservative
//!    reconstruction weights, using Taylor coefficients `dt^(k-1)/k!`.
//!
//! Everything is local to one stencil: the same physical point gets
//! different derivative approximations from different interfaces.
//! Systems are handled componentwise, with full state vectors fed to
//! the flux function.

use crate::field::StateField;
use crate::mesh::Grid1D;
use crate::systems::ConservationLaw;
use crate::weights::{make_face_reconstruction, Rational, WeightCache, WeightTable};
use std::sync::Arc;

/// The weight tables one CAT2P flux evaluation needs.
#[derive(Debug, Clone)]
pub struct CatTables {
    p: usize,
    /// Conservative interface-value weights at the central face.
    ///
    /// Plain midpoint interpolation would cap the telescoped update at
    /// second order whatever P is; the reconstruction weights make the
    /// flux difference a 2P-order derivative.
    face_value: WeightTable,
    /// First space derivative at each node offset: `(P, 1, j)`.
    space_deriv: Vec<Arc<WeightTable>>,
    /// Time derivatives at offset zero: `(P, k, 0)` for k = 1..=2P-1.
    time_deriv: Vec<Arc<WeightTable>>,
}

impl CatTables {
    /// All orders requested here satisfy `k <= 2P-1`, so construction
    /// cannot fail.
    pub fn new(p: usize, cache: &WeightCache) -> Self {
        let face_value = make_face_reconstruction(p);
        let space_deriv = (1 - p as i64..=p as i64)
            .map(|j| cache.get(p, 1, Rational::from(j)).unwrap())
            .collect();
        let time_deriv = (1..2 * p)
            .map(|k| cache.get(p, k, Rational::ZERO).unwrap())
            .collect();
        CatTables {
            p,
            face_value,
            space_deriv,
            time_deriv,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Update-stencil half width; the sweep needs this many ghosts.
    pub fn required_ghosts(&self) -> usize {
        self.p
    }
}

/// Scratch arrays for one stencil, reused across faces.
#[derive(Debug, Clone)]
pub struct CatWorkspace<const M: usize> {
    p: usize,
    /// Current flux time-derivative level at each node.
    f_level: Vec<[f64; M]>,
    /// Solution time derivatives `u^(l)` per node, l = 1..=2P-1.
    u_derivs: Vec<Vec<[f64; M]>>,
    /// Taylor-predicted fluxes at the 2P time levels of one node.
    predicted: Vec<[f64; M]>,
}

impl<const M: usize> CatWorkspace<M> {
    pub fn new(p: usize) -> Self {
        let n = 2 * p;
        CatWorkspace {
            p,
            f_level: vec![[0.0; M]; n],
            u_derivs: vec![vec![[0.0; M]; n]; n - 1],
            predicted: vec![[0.0; M]; n],
        }
    }
}

/// CAT2P flux across the interface in the middle of `window`
/// (the 2P cells `{x_{i-P+1}, ..., x_{i+P}}` for interface `i+1/2`).
///
/// Non-finite values propagate silently; the a posteriori detectors
/// deal with them after the update.
#[allow(clippy::needless_range_loop)] // componentwise math over [f64; M]
pub fn cat_flux_at_face<const M: usize, L: ConservationLaw<M>>(
    window: &[[f64; M]],
    system: &L,
    tables: &CatTables,
    ws: &mut CatWorkspace<M>,
    dx: f64,
    dt: f64,
) -> [f64; M] {
    let p = tables.p;
    let n = 2 * p;
    debug_assert_eq!(window.len(), n);
    debug_assert_eq!(ws.p, p);

    for (level, u) in ws.f_level.iter_mut().zip(window) {
        *level = system.flux(u);
    }

    let face = tables.face_value.gamma();
    let mut flux = [0.0; M];
    for j in 0..n {
        for c in 0..M {
            flux[c] += face[j] * ws.f_level[j][c];
        }
    }
    if dt == 0.0 {
        return flux;
    }

    let mut dt_pow = 1.0; // dt^(k-1)
    let mut factorial = 1.0; // k!
    for k in 2..=n {
        dt_pow *= dt;
        factorial *= k as f64;

        // (a) u^(k-1) at each node from the previous flux level.
        let lvl = k - 2;
        for j in 0..n {
            let gamma = tables.space_deriv[j].gamma();
            let mut d = [0.0; M];
            for (r, g) in gamma.iter().enumerate() {
                for c in 0..M {
                    d[c] += g * ws.f_level[r][c];
                }
            }
            for c in 0..M {
                ws.u_derivs[lvl][j][c] = -d[c] / dx;
            }
        }

        // (b) + (c) per node: predict, then differentiate in time.
        let time_gamma = tables.time_deriv[k - 2].gamma();
        for j in 0..n {
            for (ri, r) in (1 - p as i64..=p as i64).enumerate() {
                let r_dt = r as f64 * dt;
                let mut state = window[j];
                let mut pow = 1.0;
                let mut l_fact = 1.0;
                for l in 1..k {
                    pow *= r_dt;
                    l_fact *= l as f64;
                    let coeff = pow / l_fact;
                    for c in 0..M {
                        state[c] += coeff * ws.u_derivs[l - 1][j][c];
                    }
                }
                ws.predicted[ri] = system.flux(&state);
            }
            let mut d = [0.0; M];
            for (ri, g) in time_gamma.iter().enumerate() {
                for c in 0..M {
                    d[c] += g * ws.predicted[ri][c];
                }
            }
            for c in 0..M {
                ws.f_level[j][c] = d[c] / dt_pow;
            }
        }

        let coeff = dt_pow / factorial;
        for j in 0..n {
            for c in 0..M {
                flux[c] += coeff * face[j] * ws.f_level[j][c];
            }
        }
    }
    flux
}

/// CAT fluxes at every interface, `fluxes[f]` sitting between cells
/// `f-1` and `f`. Ghosts of `field` must be filled.
pub fn face_fluxes<const M: usize, L: ConservationLaw<M>>(
    field: &StateField<M>,
    system: &L,
    tables: &CatTables,
    ws: &mut CatWorkspace<M>,
    grid: &Grid1D,
    dt: f64,
) -> Vec<[f64; M]> {
    let p = tables.p as isize;
    (0..=grid.n_cells())
        .map(|f| {
            let window = field.window(f as isize - p, 2 * tables.p);
            cat_flux_at_face(window, system, tables, ws, grid.dx(), dt)
        })
        .collect()
}

/// Conservative update from interface fluxes:
/// `u_i += dt/dx * (fluxes[i] - fluxes[i+1])`.
pub fn conservative_update<const M: usize>(
    field: &StateField<M>,
    fluxes: &[[f64; M]],
    grid: &Grid1D,
    dt: f64,
) -> StateField<M> {
    debug_assert_eq!(fluxes.len(), grid.n_cells() + 1);
    let mut out = field.clone();
    let lambda = dt / grid.dx();
    for i in 0..grid.n_cells() {
        let u = out.cell_mut(i as isize);
        for c in 0..M {
            u[c] += lambda * (fluxes[i][c] - fluxes[i + 1][c]);
        }
    }
    out
}

/// One full unlimited CAT2P step; returns the new field together with
/// the fluxes so callers can splice in recomputed faces.
pub fn cat_update_sweep<const M: usize, L: ConservationLaw<M>>(
    field: &StateField<M>,
    system: &L,
    tables: &CatTables,
    ws: &mut CatWorkspace<M>,
    grid: &Grid1D,
    dt: f64,
) -> (StateField<M>, Vec<[f64; M]>) {
    let fluxes = face_fluxes(field, system, tables, ws, grid, dt);
    let updated = conservative_update(field, &fluxes, grid, dt);
    (updated, fluxes)
}
