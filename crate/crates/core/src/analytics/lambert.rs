//! Principal branch of the Lambert W function.

use crate::error::{EpiError, Result};

const TOL: f64 = 1e-13;

/// `W0(z)` for `z >= -1/e` by Halley iteration.
pub fn lambert_w0(z: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp();
    if z.is_nan() || z < branch - 1e-15 {
        return Err(EpiError::Domain(format!("W0 is undefined at {z}")));
    }
    if z <= branch {
        return Ok(-1.0);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if z < -0.3 {
        // series about the branch point
        let p = (2.0 * (std::f64::consts::E * z + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < 3.0 {
        z.ln_1p()
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            return Ok(w);
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= TOL * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    Err(EpiError::NoConvergence(format!(
        "Halley iteration for W0({z})"
    )))
}
