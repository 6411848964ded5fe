//! Closed forms for the rotationally symmetric α-stable process
//! (`φ(λ) = λ^{α/2}`), used as oracles for quadrature and Monte Carlo.

use std::f64::consts::PI;

use statrs::function::beta::{beta, beta_reg};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

fn check(d: u32, alpha: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    Ok(d as f64)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Jump density `j(r) = α 2^{α-1} Γ((d+α)/2) / (π^{d/2} Γ(1-α/2)) r^{-d-α}`.
pub fn stable_jump_density(d: u32, alpha: f64, r: f64) -> Result<f64> {
    let df = check(d, alpha)?;
    let c = alpha * 2f64.powf(alpha - 1.0) * gamma((df + alpha) / 2.0) / (PI.powf(df / 2.0) * gamma(1.0 - alpha / 2.0));
    Ok(c * r.powf(-df - alpha))
}

/// Riesz kernel `g(r) = Γ((d-α)/2) / (2^α π^{d/2} Γ(α/2)) r^{α-d}`, for `α < d`.
pub fn riesz_green(d: u32, alpha: f64, r: f64) -> Result<f64> {
    let df = check(d, alpha)?;
    if alpha >= df {
        return Err(Error::NotTransient { d, verdict: format!("alpha = {alpha} >= d") });
    }
    let c = gamma((df - alpha) / 2.0) / (2f64.powf(alpha) * PI.powf(df / 2.0) * gamma(alpha / 2.0));
    Ok(c * r.powf(alpha - df))
}

/// Expected exit time `E_x τ_{B(0,r)}`, zero outside the ball.
pub fn stable_ball_exit_time(d: u32, alpha: f64, radius: f64, x: &[f64]) -> Result<f64> {
    let df = check(d, alpha)?;
    let gap = radius * radius - norm(x).powi(2);
    if gap <= 0.0 {
        return Ok(0.0);
    }
    let c = gamma(df / 2.0) / (2f64.powf(alpha) * gamma(1.0 + alpha / 2.0) * gamma((df + alpha) / 2.0));
    Ok(c * gap.powf(alpha / 2.0))
}

/// Poisson kernel of `B(0,r)`:
/// `K(x,z) = Γ(d/2) π^{-d/2-1} sin(πα/2) ((r²-|x|²)/(|z|²-r²))^{α/2} |x-z|^{-d}`.
pub fn stable_poisson_kernel(d: u32, alpha: f64, radius: f64, x: &[f64], z: &[f64]) -> Result<f64> {
    let df = check(d, alpha)?;
    let r2 = radius * radius;
    let (inside, outside) = (r2 - norm(x).powi(2), norm(z).powi(2) - r2);
    if inside <= 0.0 {
        return Err(Error::Domain("x must lie inside the ball".into()));
    }
    if outside <= 0.0 {
        return Ok(0.0);
    }
    let c = gamma(df / 2.0) * PI.powf(-df / 2.0 - 1.0) * (PI * alpha / 2.0).sin();
    Ok(c * (inside / outside).powf(alpha / 2.0) * dist(x, z).powf(-df))
}

/// Green function of `B(0,r)` for `α < d`:
/// `G(x,y) = κ |x-y|^{α-d} ∫_0^w s^{α/2-1} (1+s)^{-d/2} ds`,
/// `w = (r²-|x|²)(r²-|y|²) / (r²|x-y|²)`.
pub fn stable_ball_green(d: u32, alpha: f64, radius: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    let df = check(d, alpha)?;
    if alpha >= df {
        return Err(Error::NotTransient { d, verdict: format!("alpha = {alpha} >= d") });
    }
    let r2 = radius * radius;
    let (gx, gy) = (r2 - norm(x).powi(2), r2 - norm(y).powi(2));
    if gx <= 0.0 || gy <= 0.0 {
        return Ok(0.0);
    }
    let h = dist(x, y);
    if h == 0.0 {
        return Err(Error::Domain("Green function is singular on the diagonal".into()));
    }
    let w = gx * gy / (r2 * h * h);
    let (p, q) = (alpha / 2.0, (df - alpha) / 2.0);
    // s = u / (1 - u) turns the integral into an incomplete beta function.
    let integral = beta(p, q) * beta_reg(p, q, w / (1.0 + w));
    let kappa = gamma(df / 2.0) / (2f64.powf(alpha) * PI.powf(df / 2.0) * gamma(alpha / 2.0).powi(2));
    Ok(kappa * h.powf(alpha - df) * integral)
}
