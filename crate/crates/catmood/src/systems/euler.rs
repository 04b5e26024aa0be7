//! 1D Euler equations of gas dynamics with a perfect-gas EOS.

use super::{ConservationLaw, Fallback};
use crate::loworder;

/// Conserved state (density, momentum, total energy per unit volume).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    pub rho: f64,
    pub mom: f64,
    pub energy: f64,
}

impl EulerState {
    pub fn from_array(u: &[f64; 3]) -> Self {
        EulerState {
            rho: u[0],
            mom: u[1],
            energy: u[2],
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rho, self.mom, self.energy]
    }
}

/// Primitive state (density, velocity, pressure).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerPrimitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

/// Perfect-gas Euler system. The admissible set is `rho > 0, p > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerLaw {
    pub gamma: f64,
}

impl EulerLaw {
    pub fn new(gamma: f64) -> Self {
        assert!(gamma > 1.0, "perfect gas needs gamma > 1");
        EulerLaw { gamma }
    }

    /// EOS: `p = (gamma - 1) * rho * eps` with `eps = E/rho - u^2/2`.
    pub fn pressure(&self, u: &[f64; 3]) -> f64 {
        (self.gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0])
    }

    pub fn sound_speed(&self, u: &[f64; 3]) -> f64 {
        (self.gamma * self.pressure(u) / u[0]).sqrt()
    }

    pub fn to_primitive(&self, u: &[f64; 3]) -> EulerPrimitive {
        EulerPrimitive {
            rho: u[0],
            u: u[1] / u[0],
            p: self.pressure(u),
        }
    }

    pub fn from_primitive(&self, w: EulerPrimitive) -> [f64; 3] {
        [
            w.rho,
            w.rho * w.u,
            w.p / (self.gamma - 1.0) + 0.5 * w.rho * w.u * w.u,
        ]
    }

    /// Flux with admissibility enforced up front, for callers that want
    /// the failure surfaced instead of NaN propagation.
    pub fn try_flux(&self, u: &[f64; 3]) -> Option<[f64; 3]> {
        if self.is_admissible(u) {
            Some(self.flux(u))
        } else {
            None
        }
    }
}

impl ConservationLaw<3> for EulerLaw {
    /// `F(U) = (rho u, rho u^2 + p, (E + p) u)`.
    fn flux(&self, u: &[f64; 3]) -> [f64; 3] {
        let vel = u[1] / u[0];
        let p = self.pressure(u);
        [u[1], u[1] * vel + p, (u[2] + p) * vel]
    }

    /// `|u| + c` with `c = sqrt(gamma p / rho)`.
    fn max_wave_speed(&self, u: &[f64; 3]) -> f64 {
        (u[1] / u[0]).abs() + self.sound_speed(u)
    }

    fn is_admissible(&self, u: &[f64; 3]) -> bool {
        u.iter().all(|v| v.is_finite()) && u[0] > 0.0 && self.pressure(u) > 0.0
    }

    fn nad_count(&self) -> usize {
        2
    }

    /// The relaxed maximum principle is checked on density and pressure.
    fn nad_variable(&self, which: usize, u: &[f64; 3]) -> f64 {
        match which {
            0 => u[0],
            _ => self.pressure(u),
        }
    }

    fn low_order_flux(&self, left: &[f64; 3], right: &[f64; 3], fallback: Fallback) -> [f64; 3] {
        match fallback {
            Fallback::Rusanov => loworder::rusanov_flux(self, left, right),
            Fallback::Hll => loworder::hll_flux(left, right, self.gamma),
        }
    }

    fn output_names(&self) -> &'static [&'static str] {
        &["rho", "u", "p"]
    }

    fn output_variables(&self, u: &[f64; 3]) -> [f64; 3] {
        let w = self.to_primitive(u);
        [w.rho, w.u, w.p]
    }
}
