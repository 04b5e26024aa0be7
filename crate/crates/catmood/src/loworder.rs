//! Robust first-order interface fluxes used at the bottom of the cascade.

use crate::systems::ConservationLaw;

/// Left/right signal-speed estimates bounding the Riemann fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeedEstimate {
    pub s_left: f64,
    pub s_right: f64,
}

/// Davis estimates from the one-sided eigenvalue extremes.
pub fn davis_speeds(left: &[f64; 3], right: &[f64; 3], gamma: f64) -> WaveSpeedEstimate {
    let law = crate::systems::euler::EulerLaw::new(gamma);
    let wl = law.to_primitive(left);
    let wr = law.to_primitive(right);
    let cl = law.sound_speed(left);
    let cr = law.sound_speed(right);
    WaveSpeedEstimate {
        s_left: (wl.u - cl).min(wr.u - cr),
        s_right: (wl.u + cl).max(wr.u + cr),
    }
}

/// `0.5 (f(uL) + f(uR)) - 0.5 * alpha * (uR - uL)` with `alpha` the
/// larger of the two local maximum wave speeds.
pub fn rusanov_flux<const M: usize, L: ConservationLaw<M>>(
    system: &L,
    left: &[f64; M],
    right: &[f64; M],
) -> [f64; M] {
    let fl = system.flux(left);
    let fr = system.flux(right);
    let alpha = system
        .max_wave_speed(left)
        .max(system.max_wave_speed(right));
    let mut out = [0.0; M];
    for c in 0..M {
        out[c] = 0.5 * (fl[c] + fr[c]) - 0.5 * alpha * (right[c] - left[c]);
    }
    out
}

/// Two-wave HLL flux for the Euler equations with Davis speed
/// estimates. A degenerate fan (`s_left == s_right`) can only occur in
/// the one-sided branches, where the upwind flux is returned.
pub fn hll_flux(left: &[f64; 3], right: &[f64; 3], gamma: f64) -> [f64; 3] {
    let law = crate::systems::euler::EulerLaw::new(gamma);
    let est = davis_speeds(left, right, gamma);
    let fl = law.flux(left);
    if est.s_left >= 0.0 {
        return fl;
    }
    let fr = law.flux(right);
    if est.s_right <= 0.0 {
        return fr;
    }
    // Here s_left < 0 < s_right, so the fan has positive width.
    let inv = 1.0 / (est.s_right - est.s_left);
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = (est.s_right * fl[c] - est.s_left * fr[c]
            + est.s_left * est.s_right * (right[c] - left[c]))
            * inv;
    }
    out
}
