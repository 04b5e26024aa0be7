//! Exact Riemann solver for the perfect-gas Euler equations.
//!
//! Reference oracle only: the star pressure is found by Newton
//! iteration on the standard two-shock/two-rarefaction pressure
//! function, then the self-similar solution is sampled by wave branch.

use super::euler::EulerPrimitive;
use crate::error::RiemannError;

const MAX_ITER: usize = 100;
const P_TOL: f64 = 1e-12;

/// Solved Riemann problem; sample it at any similarity coordinate.
#[derive(Debug, Clone)]
pub struct RiemannSolution {
    gamma: f64,
    left: EulerPrimitive,
    right: EulerPrimitive,
    a_left: f64,
    a_right: f64,
    p_star: f64,
    u_star: f64,
}

/// Pressure function for one side and its derivative w.r.t. p.
fn pressure_fn(p: f64, side: &EulerPrimitive, a: f64, gamma: f64) -> (f64, f64) {
    if p > side.p {
        // shock branch
        let big_a = 2.0 / ((gamma + 1.0) * side.rho);
        let big_b = (gamma - 1.0) / (gamma + 1.0) * side.p;
        let sq = (big_a / (p + big_b)).sqrt();
        let f = (p - side.p) * sq;
        let df = sq * (1.0 - 0.5 * (p - side.p) / (p + big_b));
        (f, df)
    } else {
        // rarefaction branch
        let z = (gamma - 1.0) / (2.0 * gamma);
        let ratio = p / side.p;
        let f = 2.0 * a / (gamma - 1.0) * (ratio.powf(z) - 1.0);
        let df = ratio.powf(-(gamma + 1.0) / (2.0 * gamma)) / (side.rho * a);
        (f, df)
    }
}

impl RiemannSolution {
    pub fn solve(
        left: EulerPrimitive,
        right: EulerPrimitive,
        gamma: f64,
    ) -> Result<Self, RiemannError> {
        let a_left = (gamma * left.p / left.rho).sqrt();
        let a_right = (gamma * right.p / right.rho).sqrt();
        let du = right.u - left.u;

        // Pressure positivity: the two rarefactions must not deplete
        // the gas between them.
        if 2.0 * (a_left + a_right) / (gamma - 1.0) <= du {
            return Err(RiemannError::VacuumGenerated);
        }

        // Two-rarefaction initial guess.
        let z = (gamma - 1.0) / (2.0 * gamma);
        let guess = ((a_left + a_right - 0.5 * (gamma - 1.0) * du)
            / (a_left / left.p.powf(z) + a_right / right.p.powf(z)))
        .powf(1.0 / z);
        let mut p = guess.max(P_TOL);

        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_ITER {
            let (fl, dfl) = pressure_fn(p, &left, a_left, gamma);
            let (fr, dfr) = pressure_fn(p, &right, a_right, gamma);
            let step = (fl + fr + du) / (dfl + dfr);
            let p_new = (p - step).max(P_TOL);
            residual = (p_new - p).abs();
            p = p_new;
            if residual <= P_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(RiemannError::NoConvergence {
                iterations: MAX_ITER,
                residual,
            });
        }

        let (fl, _) = pressure_fn(p, &left, a_left, gamma);
        let (fr, _) = pressure_fn(p, &right, a_right, gamma);
        let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);

        Ok(RiemannSolution {
            gamma,
            left,
            right,
            a_left,
            a_right,
            p_star: p,
            u_star,
        })
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    pub fn u_star(&self) -> f64 {
        self.u_star
    }

    /// Speed of the left wave when it is a shock.
    pub fn left_shock_speed(&self) -> Option<f64> {
        (self.p_star > self.left.p).then(|| {
            let g = self.gamma;
            self.left.u
                - self.a_left
                    * ((g + 1.0) / (2.0 * g) * self.p_star / self.left.p + (g - 1.0) / (2.0 * g))
                        .sqrt()
        })
    }

    /// Speed of the right wave when it is a shock.
    pub fn right_shock_speed(&self) -> Option<f64> {
        (self.p_star > self.right.p).then(|| {
            let g = self.gamma;
            self.right.u
                + self.a_right
                    * ((g + 1.0) / (2.0 * g) * self.p_star / self.right.p + (g - 1.0) / (2.0 * g))
                        .sqrt()
        })
    }

    /// Density just left of the contact.
    pub fn rho_star_left(&self) -> f64 {
        star_density(self.p_star, &self.left, self.gamma)
    }

    /// Density just right of the contact.
    pub fn rho_star_right(&self) -> f64 {
        star_density(self.p_star, &self.right, self.gamma)
    }

    /// Sample the self-similar solution at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> EulerPrimitive {
        if xi <= self.u_star {
            self.sample_left(xi)
        } else {
            self.sample_right(xi)
        }
    }

    fn sample_left(&self, xi: f64) -> EulerPrimitive {
        let g = self.gamma;
        let s = &self.left;
        if self.p_star > s.p {
            let speed = self.left_shock_speed().unwrap();
            if xi < speed {
                *s
            } else {
                EulerPrimitive {
                    rho: self.rho_star_left(),
                    u: self.u_star,
                    p: self.p_star,
                }
            }
        } else {
            let a_star = self.a_left * (self.p_star / s.p).powf((g - 1.0) / (2.0 * g));
            let head = s.u - self.a_left;
            let tail = self.u_star - a_star;
            if xi < head {
                *s
            } else if xi > tail {
                EulerPrimitive {
                    rho: self.rho_star_left(),
                    u: self.u_star,
                    p: self.p_star,
                }
            } else {
                // inside the fan
                let u = 2.0 / (g + 1.0) * (self.a_left + 0.5 * (g - 1.0) * s.u + xi);
                let a = 2.0 / (g + 1.0) * (self.a_left + 0.5 * (g - 1.0) * (s.u - xi));
                EulerPrimitive {
                    rho: s.rho * (a / self.a_left).powf(2.0 / (g - 1.0)),
                    u,
                    p: s.p * (a / self.a_left).powf(2.0 * g / (g - 1.0)),
                }
            }
        }
    }

    fn sample_right(&self, xi: f64) -> EulerPrimitive {
        let g = self.gamma;
        let s = &self.right;
        if self.p_star > s.p {
            let speed = self.right_shock_speed().unwrap();
            if xi > speed {
                *s
            } else {
                EulerPrimitive {
                    rho: self.rho_star_right(),
                    u: self.u_star,
                    p: self.p_star,
                }
            }
        } else {
            let a_star = self.a_right * (self.p_star / s.p).powf((g - 1.0) / (2.0 * g));
            let head = s.u + self.a_right;
            let tail = self.u_star + a_star;
            if xi > head {
                *s
            } else if xi < tail {
                EulerPrimitive {
                    rho: self.rho_star_right(),
                    u: self.u_star,
                    p: self.p_star,
                }
            } else {
                let u = 2.0 / (g + 1.0) * (-self.a_right + 0.5 * (g - 1.0) * s.u + xi);
                let a = 2.0 / (g + 1.0) * (self.a_right - 0.5 * (g - 1.0) * (s.u - xi));
                EulerPrimitive {
                    rho: s.rho * (a / self.a_right).powf(2.0 / (g - 1.0)),
                    u,
                    p: s.p * (a / self.a_right).powf(2.0 * g / (g - 1.0)),
                }
            }
        }
    }
}

fn star_density(p_star: f64, side: &EulerPrimitive, gamma: f64) -> f64 {
    let ratio = p_star / side.p;
    if p_star > side.p {
        let gm = (gamma - 1.0) / (gamma + 1.0);
        side.rho * (ratio + gm) / (gm * ratio + 1.0)
    } else {
        side.rho * ratio.powf(1.0 / gamma)
    }
}

/// Exact solution of the Riemann problem at position `x` and time `t`
/// (initial discontinuity at `x = 0`).
pub fn exact_sod(
    x: f64,
    t: f64,
    left: EulerPrimitive,
    right: EulerPrimitive,
    gamma: f64,
) -> Result<EulerPrimitive, RiemannError> {
    if t <= 0.0 {
        return Ok(if x <= 0.0 { left } else { right });
    }
    Ok(RiemannSolution::solve(left, right, gamma)?.sample(x / t))
}

/// The canonical shock-tube data.
pub fn sod_states() -> (EulerPrimitive, EulerPrimitive) {
    (
        EulerPrimitive {
            rho: 1.0,
            u: 0.0,
            p: 1.0,
        },
        EulerPrimitive {
            rho: 0.125,
            u: 0.0,
            p: 0.1,
        },
    )
}
