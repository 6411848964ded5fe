//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a quadrature call: value and absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quad {
    pub value: f64,
    pub abs_err: f64,
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        Quad { value: self.value + rhs.value, abs_err: self.abs_err + rhs.abs_err }
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * half, ((resk - resg) * half).abs())
}

/// Integrates `f` over `[a, b]` until the summed error estimate falls below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Quad> {
    if a == b {
        return Ok(Quad { value: 0.0, abs_err: 0.0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration bounds must be finite: [{a}, {b}]")));
    }
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = gk15(&f, a, b);
    if !v.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a:e}, {b:e}]")));
    }
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "subdivision limit reached on [{a:e}, {b:e}], err {err:e}"
            )));
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, v0, e0) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval collapsed to adjacent floats; accept what we have.
            intervals.push((lo, hi, v0, e0));
            break;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Quadrature(format!("non-finite integrand on [{lo:e}, {hi:e}]")));
        }
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // Re-sum to shed drift from the running updates.
    let value = intervals.iter().map(|iv| iv.2).sum();
    let abs_err = intervals.iter().map(|iv| iv.3).sum();
    Ok(Quad { value, abs_err })
}

/// Integrates over consecutive breakpoints and adds the pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64, abs_tol: f64) -> Result<Quad> {
    let mut acc = Quad { value: 0.0, abs_err: 0.0 };
    for w in breaks.windows(2) {
        acc = acc + integrate(&f, w[0], w[1], rel_tol, abs_tol)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((q.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand() {
        // integral of exp(-1/x) / x^2 over (0, 1] = e^{-1}
        let q = integrate(|x: f64| if x > 0.0 { (-1.0 / x).exp() / (x * x) } else { 0.0 }, 0.0, 1.0, 1e-12, 0.0)
            .unwrap();
        assert!((q.value - (-1.0f64).exp()).abs() < 1e-12);
        assert!(q.abs_err < 1e-11);
    }

    #[test]
    fn sqrt_singularity() {
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert!((q.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn pieces_add_up() {
        let q = integrate_pieces(|x: f64| x.cos(), &[0.0, 1.0, 2.0, 3.0], 1e-13, 0.0).unwrap();
        assert!((q.value - 3.0f64.sin()).abs() < 1e-13);
    }
}
