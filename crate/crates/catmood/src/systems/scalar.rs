//! Scalar conservation laws: linear advection and Burgers.

use super::{ConservationLaw, Fallback};

/// Slack added to the initial-data bounds before the physical
/// admissibility check, so exact preservation is never flagged over
/// floating-point roundoff.
pub const PAD_SLACK: f64 = 1e-8;

/// Global bounds of the initial condition; the scalar admissible set is
/// `[u_min - PAD_SLACK, u_max + PAD_SLACK]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarBounds {
    pub u_min: f64,
    pub u_max: f64,
}

impl ScalarBounds {
    pub fn new(u_min: f64, u_max: f64) -> Self {
        assert!(u_min <= u_max, "bounds must be ordered");
        ScalarBounds { u_min, u_max }
    }

    /// Bounds of sampled initial data.
    pub fn from_samples<'a>(values: impl IntoIterator<Item = &'a f64>) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        ScalarBounds {
            u_min: lo,
            u_max: hi,
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.u_min - PAD_SLACK && u <= self.u_max + PAD_SLACK
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarKind {
    Advection { speed: f64 },
    Burgers,
}

/// Scalar law `u_t + f(u)_x = 0` with `f(u) = b u` or `f(u) = u^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarLaw {
    pub kind: ScalarKind,
    /// Admissibility bounds; unbounded when constructed without them.
    pub bounds: Option<ScalarBounds>,
}

impl ScalarLaw {
    pub fn new(kind: ScalarKind) -> Self {
        ScalarLaw { kind, bounds: None }
    }

    pub fn with_bounds(kind: ScalarKind, bounds: ScalarBounds) -> Self {
        ScalarLaw {
            kind,
            bounds: Some(bounds),
        }
    }

    pub fn flux_value(&self, u: f64) -> f64 {
        match self.kind {
            ScalarKind::Advection { speed } => speed * u,
            ScalarKind::Burgers => 0.5 * u * u,
        }
    }

    /// Characteristic speed f'(u).
    pub fn wave_speed(&self, u: f64) -> f64 {
        match self.kind {
            ScalarKind::Advection { speed } => speed,
            ScalarKind::Burgers => u,
        }
    }
}

impl ConservationLaw<1> for ScalarLaw {
    fn flux(&self, u: &[f64; 1]) -> [f64; 1] {
        [self.flux_value(u[0])]
    }

    fn max_wave_speed(&self, u: &[f64; 1]) -> f64 {
        self.wave_speed(u[0]).abs()
    }

    fn is_admissible(&self, u: &[f64; 1]) -> bool {
        match self.bounds {
            Some(b) => u[0].is_finite() && b.contains(u[0]),
            None => u[0].is_finite(),
        }
    }

    fn nad_count(&self) -> usize {
        1
    }

    fn nad_variable(&self, _which: usize, u: &[f64; 1]) -> f64 {
        u[0]
    }

    fn low_order_flux(&self, left: &[f64; 1], right: &[f64; 1], _fallback: Fallback) -> [f64; 1] {
        // Scalar cascades always use Rusanov, whatever the Euler flag says.
        crate::loworder::rusanov_flux(self, left, right)
    }

    fn output_names(&self) -> &'static [&'static str] {
        &["u"]
    }

    fn output_variables(&self, u: &[f64; 1]) -> [f64; 1] {
        *u
    }
}

/// Exact solution of periodic linear advection: the initial profile
/// translated by `b t` and wrapped back into the domain.
pub fn exact_advection(
    u0: impl Fn(f64) -> f64,
    speed: f64,
    x: f64,
    t: f64,
    x_left: f64,
    period: f64,
) -> f64 {
    let mut xi = (x - speed * t - x_left) % period;
    if xi < 0.0 {
        xi += period;
    }
    u0(x_left + xi)
}
