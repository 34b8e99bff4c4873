//! Real branches of the Lambert W function, solving `w e^w = z`.
//!
//! Both branches are evaluated by a Halley iteration from branch-specific
//! initial guesses: a branch-point expansion in `p = sqrt(2(ez + 1))` near
//! `z = -1/e`, log-based asymptotics far from it.

use crate::error::{Error, Result};

/// `-1/e`, the left edge of both real branches.
pub const NEG_INV_E: f64 = -0.367_879_441_171_442_33;

/// Absolute slack under `-1/e` tolerated before rejecting the argument, so
/// callers that compute `-x e^{-x}` in floating point are not tripped up by
/// the final rounding.
const EDGE_SLOP: f64 = 1e-14;

/// Principal branch `W_0` on `[-1/e, inf)`; `W_0 >= -1`.
pub fn w0(z: f64) -> Result<f64> {
    if !z.is_finite() || z < NEG_INV_E - EDGE_SLOP {
        return Err(Error::DomainError(z));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let seed = if z < -0.3 {
        let p = branch_point_p(z);
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < std::f64::consts::E {
        (1.0 + z).ln()
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(seed, z))
}

/// Lower branch `W_{-1}` on `[-1/e, 0)`; `W_{-1} <= -1`.
pub fn wm1(z: f64) -> Result<f64> {
    if !(NEG_INV_E - EDGE_SLOP..0.0).contains(&z) {
        return Err(Error::DomainError(z));
    }
    let seed = if z < -0.25 {
        let p = branch_point_p(z);
        -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(seed, z))
}

/// `p = sqrt(2(ez + 1))`, clamped against rounding just below the branch point.
fn branch_point_p(z: f64) -> f64 {
    (2.0 * (std::f64::consts::E * z + 1.0)).max(0.0).sqrt()
}

fn halley(mut w: f64, z: f64) -> f64 {
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - z;
        if f == 0.0 {
            break;
        }
        let fp = ew * (w + 1.0);
        let halley_denom = fp - (w + 2.0) * f / (2.0 * w + 2.0);
        let step = if halley_denom.is_finite() && halley_denom != 0.0 {
            f / halley_denom
        } else if fp != 0.0 {
            f / fp
        } else {
            break;
        };
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= 1e-16 * next.abs();
        w = next;
        if done {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(w: f64, z: f64) -> f64 {
        (w * w.exp() - z).abs() / z.abs().max(1.0)
    }

    #[test]
    fn known_values() {
        assert_eq!(w0(0.0).unwrap(), 0.0);
        assert!((w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        let half_ln2 = -0.5 * 2f64.ln();
        assert!((w0(half_ln2).unwrap() + 2f64.ln()).abs() < 1e-15);
        assert!((wm1(-2.0 * (-2.0f64).exp()).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn branch_point_maps_to_minus_one() {
        assert!((w0(NEG_INV_E).unwrap() + 1.0).abs() < 1e-7);
        assert!((wm1(NEG_INV_E).unwrap() + 1.0).abs() < 1e-7);
    }

    #[test]
    fn principal_branch_keeps_trivial_root_below_critical_coupling() {
        // For x <= 1, W_0(-x e^{-x}) returns -x itself.
        for &x in &[0.1f64, 0.5, 0.9, 0.999] {
            let z = -x * (-x).exp();
            assert!((w0(z).unwrap() + x).abs() < 1e-13, "x = {x}");
        }
        // For x > 1 the same argument yields the conjugate root above -1.
        let x = 2.5f64;
        let w = w0(-x * (-x).exp()).unwrap();
        assert!(w > -1.0 && (w + x).abs() > 0.1);
        assert!(residual(w, -x * (-x).exp()) < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(w0(-0.4), Err(Error::DomainError(_))));
        assert!(matches!(wm1(-0.4), Err(Error::DomainError(_))));
        assert!(matches!(wm1(0.0), Err(Error::DomainError(_))));
        assert!(matches!(wm1(1.0), Err(Error::DomainError(_))));
        assert!(matches!(w0(f64::NAN), Err(Error::DomainError(_))));
    }

    #[test]
    fn principal_branch_residuals_over_log_spaced_grid() {
        // 500 points crowding the branch point from above, 500 spanning
        // positive arguments up to 1e3.
        for k in 0..500 {
            let t = 10f64.powf(-8.0 * k as f64 / 499.0);
            let z = NEG_INV_E * (1.0 - t);
            let w = w0(z).unwrap();
            assert!(residual(w, z) <= 1e-14, "z = {z}, w = {w}");
            assert!(w >= -1.0 - 1e-9);
        }
        for k in 0..500 {
            let z = 1e-6 * 10f64.powf(9.0 * k as f64 / 499.0);
            let w = w0(z).unwrap();
            assert!(residual(w, z) <= 1e-14, "z = {z}, w = {w}");
        }
    }

    #[test]
    fn lower_branch_residuals_over_log_spaced_grid() {
        for k in 0..1000 {
            let z = NEG_INV_E * 10f64.powf(-12.0 * k as f64 / 999.0);
            let w = wm1(z).unwrap();
            assert!(residual(w, z) <= 1e-14, "z = {z}, w = {w}");
            assert!(w <= -1.0 + 1e-9);
        }
    }

    #[test]
    fn branches_agree_only_at_the_branch_point() {
        let z = -0.2;
        let upper = w0(z).unwrap();
        let lower = wm1(z).unwrap();
        assert!(upper > -1.0 && lower < -1.0);
        assert!(residual(upper, z) < 1e-14 && residual(lower, z) < 1e-14);
    }
}
