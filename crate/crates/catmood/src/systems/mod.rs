//! Conservation-law interface and the concrete systems.

pub mod euler;
pub mod riemann;
pub mod scalar;

use crate::loworder;

/// First-order flux used when the cascade bottoms out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    Rusanov,
    /// Two-wave approximate Riemann flux; Euler only, scalar laws
    /// fall back to Rusanov.
    Hll,
}

/// A hyperbolic system `d/dt U + d/dx F(U) = 0` with `M` conserved
/// variables.
///
/// All methods are pure functions of the state; `flux` is total and may
/// return non-finite values on inadmissible input (the a posteriori
/// detectors catch those downstream).
pub trait ConservationLaw<const M: usize> {
    fn flux(&self, u: &[f64; M]) -> [f64; M];

    /// Largest absolute characteristic speed at `u`; non-negative for
    /// admissible states.
    fn max_wave_speed(&self, u: &[f64; M]) -> f64;

    /// Physical admissibility of a state (positivity for gas dynamics,
    /// the initial-data maximum principle for scalar laws).
    fn is_admissible(&self, u: &[f64; M]) -> bool;

    /// Number of variables subject to the relaxed maximum principle.
    fn nad_count(&self) -> usize;

    /// The `which`-th checked variable evaluated at `u`.
    fn nad_variable(&self, which: usize, u: &[f64; M]) -> f64;

    /// Robust first-order interface flux. Laws without a dedicated
    /// Riemann flux use Rusanov regardless of the requested fallback.
    fn low_order_flux(&self, left: &[f64; M], right: &[f64; M], _fallback: Fallback) -> [f64; M]
    where
        Self: Sized,
    {
        loworder::rusanov_flux(self, left, right)
    }

    /// Names of the output variables written to reports (conserved or
    /// primitive, whichever the literature plots).
    fn output_names(&self) -> &'static [&'static str];

    /// Map a conserved state to the output variables.
    fn output_variables(&self, u: &[f64; M]) -> [f64; M];
}
