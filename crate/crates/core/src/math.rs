//! Scalar helpers shared across the crate: `no_std` math shims, the channel
//! bump profile and its integral, and periodic wrapping.

/// Quartic bump profile on [0,1]: psi(0) = psi(1) = 0, psi(1/2) = 1, C1 at
/// both ends (psi'(0) = psi'(1) = 0). Every open channel port carries this
/// shape for its normal velocity component.
pub fn psi(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let t = s * (1.0 - s);
    16.0 * t * t
}

/// Integral of `psi` over [0,1].
pub const PSI_MASS: f64 = 8.0 / 15.0;

/// Antiderivative of psi, normalized to climb from 0 to 1 over [0,1].
pub fn psi_ramp(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    // integral of 16 t^2 (1-t)^2 = 16 (s^3/3 - s^4/2 + s^5/5)
    let raw = 16.0 * (s * s * s / 3.0 - s * s * s * s / 2.0 + s * s * s * s * s / 5.0);
    raw / PSI_MASS
}

/// Bump across the middle third of [0,1]; zero on the outer thirds.
pub fn psi_mid(t: f64) -> f64 {
    psi(3.0 * t - 1.0)
}

/// C1 ramp from 1 down to 0 across the middle third of [0,1]: 1 on [0,1/3],
/// 0 on [2/3,1]. Used by the dead-end retracting profile.
pub fn retract_ramp(t: f64) -> f64 {
    1.0 - psi_ramp(3.0 * t - 1.0)
}

/// Wrap into [0, 1).
pub fn wrap01(x: f64) -> f64 {
    let f = x - floor(x);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Wrap into [0, w).
pub fn wrap(x: f64, w: f64) -> f64 {
    wrap01(x / w) * w
}

/// Distance on the unit circle between wrapped coordinates.
pub fn circ_dist01(a: f64, b: f64) -> f64 {
    let d = abs(wrap01(a) - wrap01(b));
    if d > 0.5 {
        1.0 - d
    } else {
        d
    }
}

pub fn clamp01(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else if x > 1.0 {
        1.0
    } else {
        x
    }
}

// no_std shims; `f64::sqrt` and friends live in std.

pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

pub fn max(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

pub fn min(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_peak_and_ends() {
        assert_eq!(psi(0.5), 1.0);
        assert_eq!(psi(0.0), 0.0);
        assert_eq!(psi(1.0), 0.0);
        assert!(psi(0.25) > 0.0);
    }

    #[test]
    fn psi_symmetric() {
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            assert!(abs(psi(s) - psi(1.0 - s)) < 1e-15);
        }
    }

    #[test]
    fn ramp_monotone_normalized() {
        assert_eq!(psi_ramp(0.0), 0.0);
        assert_eq!(psi_ramp(1.0), 1.0);
        let mut prev = 0.0;
        for k in 1..=50 {
            let v = psi_ramp(k as f64 / 50.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn wrapping() {
        assert!(abs(wrap01(1.25) - 0.25) < 1e-15);
        assert!(abs(wrap01(-0.25) - 0.75) < 1e-15);
        assert!(abs(circ_dist01(0.05, 0.95) - 0.1) < 1e-15);
    }
}
