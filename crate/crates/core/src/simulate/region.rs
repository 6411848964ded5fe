//! Subsets of `R^d` used as balls, target sets and occupation cells.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

/// Open ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Ball> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if center.is_empty() {
            return Err(Error::InvalidParameter("ball center needs at least one coordinate".into()));
        }
        Ok(Ball { center, radius })
    }

    pub fn centered(d: u32, radius: f64) -> Result<Ball> {
        Ball::new(vec![0.0; d as usize], radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dist(x, &self.center) < self.radius
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim() as u32) * self.radius.powi(self.dim() as i32)
    }
}

/// Measurable sets with cheap membership tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Region {
    /// `|x - c| < radius`
    Ball { center: Vec<f64>, radius: f64 },
    /// `inner < |x - c| < outer`
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    /// `x · normal > offset`, `normal` a unit vector
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// `lo <= x < hi` coordinatewise
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `|x - c| > radius`
    Exterior { center: Vec<f64>, radius: f64 },
    Empty,
}

impl Region {
    pub fn annulus(center: Vec<f64>, inner: f64, outer: f64) -> Result<Region> {
        if !(inner >= 0.0 && outer > inner) {
            return Err(Error::InvalidParameter(format!("annulus needs 0 <= inner < outer, got {inner}, {outer}")));
        }
        Ok(Region::Annulus { center, inner, outer })
    }

    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Region> {
        let n = dot(&normal, &normal).sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidParameter("half-space normal must be nonzero".into()));
        }
        Ok(Region::HalfSpace { normal: normal.iter().map(|v| v / n).collect(), offset })
    }

    /// Axis-aligned cube of side `side` centred at `c`.
    pub fn cube(c: &[f64], side: f64) -> Region {
        Region::Box { lo: c.iter().map(|v| v - side / 2.0).collect(), hi: c.iter().map(|v| v + side / 2.0).collect() }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Ball { center, radius } => dist(x, center) < *radius,
            Region::Annulus { center, inner, outer } => {
                let r = dist(x, center);
                r > *inner && r < *outer
            }
            Region::HalfSpace { normal, offset } => dot(x, normal) > *offset,
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| v >= l && v < h),
            Region::Exterior { center, radius } => dist(x, center) > *radius,
            Region::Empty => false,
        }
    }

    /// Lebesgue measure in `R^d`; `None` when infinite.
    pub fn volume(&self, d: u32) -> Option<f64> {
        match self {
            Region::Ball { radius, .. } => Some(unit_ball_volume(d) * radius.powi(d as i32)),
            Region::Annulus { inner, outer, .. } => {
                Some(unit_ball_volume(d) * (outer.powi(d as i32) - inner.powi(d as i32)))
            }
            Region::Box { lo, hi } => Some(lo.iter().zip(hi).map(|(l, h)| (h - l).max(0.0)).product()),
            Region::Empty => Some(0.0),
            Region::HalfSpace { .. } | Region::Exterior { .. } => None,
        }
    }

    /// Smallest width of the set, used to judge grid resolution.
    pub fn thickness(&self) -> f64 {
        match self {
            Region::Ball { radius, .. } => 2.0 * radius,
            Region::Annulus { inner, outer, .. } => outer - inner,
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).fold(f64::INFINITY, f64::min),
            Region::HalfSpace { .. } | Region::Exterior { .. } => f64::INFINITY,
            Region::Empty => 0.0,
        }
    }

    /// Diameter; infinite for unbounded sets.
    pub fn diameter(&self) -> f64 {
        match self {
            Region::Ball { radius, .. } => 2.0 * radius,
            Region::Annulus { outer, .. } => 2.0 * outer,
            Region::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt(),
            Region::HalfSpace { .. } | Region::Exterior { .. } => f64::INFINITY,
            Region::Empty => 0.0,
        }
    }

    /// Whether the set does not meet the closed ball.
    pub fn avoids_closed_ball(&self, ball: &Ball) -> bool {
        let (c0, r) = (&ball.center, ball.radius);
        match self {
            Region::Ball { center, radius } => dist(center, c0) >= r + radius,
            Region::Annulus { center, inner, outer } => {
                let s = dist(center, c0);
                s + r <= *inner || s >= r + outer
            }
            Region::HalfSpace { normal, offset } => offset - dot(c0, normal) >= r,
            Region::Box { lo, hi } => {
                let gap2: f64 = c0.iter().zip(lo.iter().zip(hi)).map(|(c, (l, h))| (l - c).max(c - h).max(0.0).powi(2)).sum();
                gap2.sqrt() > r
            }
            Region::Exterior { center, radius } => dist(center, c0) + r <= *radius,
            Region::Empty => true,
        }
    }

    /// Whether the set does not meet the open ball. Exits land on the sphere
    /// with probability zero, so exit bins only need this.
    pub fn avoids_open_ball(&self, ball: &Ball) -> bool {
        match self {
            Region::Box { lo, hi } => {
                let gap2: f64 =
                    ball.center.iter().zip(lo.iter().zip(hi)).map(|(c, (l, h))| (l - c).max(c - h).max(0.0).powi(2)).sum();
                gap2.sqrt() >= ball.radius
            }
            _ => self.avoids_closed_ball(ball),
        }
    }

    /// Whether the set lies inside the open ball.
    pub fn inside_ball(&self, ball: &Ball) -> bool {
        let (c0, r) = (&ball.center, ball.radius);
        match self {
            Region::Ball { center, radius } => dist(center, c0) + radius <= r,
            Region::Annulus { center, outer, .. } => dist(center, c0) + outer <= r,
            Region::Box { lo, hi } => {
                // The farthest corner from the centre decides.
                let far2: f64 = c0.iter().zip(lo.iter().zip(hi)).map(|(c, (l, h))| (l - c).abs().max((h - c).abs()).powi(2)).sum();
                far2.sqrt() <= r
            }
            Region::Empty => true,
            Region::HalfSpace { .. } | Region::Exterior { .. } => false,
        }
    }

    /// Disjointness where it can be decided; `None` otherwise.
    pub fn disjoint(&self, other: &Region) -> Option<bool> {
        match (self, other) {
            (Region::Empty, _) | (_, Region::Empty) => Some(true),
            (Region::Box { lo: a0, hi: a1 }, Region::Box { lo: b0, hi: b1 }) => {
                Some(a0.iter().zip(a1).zip(b0.iter().zip(b1)).any(|((l, h), (m, k))| h <= m || k <= l))
            }
            (Region::Annulus { center: c, inner: i, outer: o }, Region::Annulus { center: e, inner: j, outer: p })
                if c == e =>
            {
                Some(o <= j || p <= i)
            }
            (Region::Ball { center: c, radius: r }, Region::Ball { center: e, radius: s }) => Some(dist(c, e) >= r + s),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn annulus_membership_and_volume() {
        let a = Region::annulus(vec![0.0, 0.0], 1.0, 2.0).unwrap();
        assert!(a.contains(&[1.5, 0.0]) && !a.contains(&[0.5, 0.0]) && !a.contains(&[0.0, 2.0]));
        assert!((a.volume(2).unwrap() - 3.0 * PI).abs() < 1e-12);
        assert_eq!(a.thickness(), 1.0);
    }

    #[test]
    fn separation_from_closed_ball() {
        let b = Ball::centered(2, 1.0).unwrap();
        assert!(Region::annulus(vec![0.0, 0.0], 1.0, 2.0).unwrap().avoids_closed_ball(&b));
        assert!(!Region::annulus(vec![0.0, 0.0], 0.9, 2.0).unwrap().avoids_closed_ball(&b));
        assert!(Region::annulus(vec![0.0, 0.0], 1.5, 2.0).unwrap().avoids_closed_ball(&b));
        assert!(Region::half_space(vec![2.0, 0.0], 2.0).unwrap().avoids_closed_ball(&b));
        assert!(!Region::half_space(vec![1.0, 0.0], 0.5).unwrap().avoids_closed_ball(&b));
        assert!(Region::Exterior { center: vec![0.0, 0.0], radius: 1.0 }.avoids_closed_ball(&b));
        assert!(Region::cube(&[3.0, 0.0], 1.0).avoids_closed_ball(&b));
    }

    #[test]
    fn box_disjointness() {
        let a = Region::cube(&[0.0], 1.0);
        assert_eq!(a.disjoint(&Region::cube(&[1.0], 1.0)), Some(true));
        assert_eq!(a.disjoint(&Region::cube(&[0.9], 1.0)), Some(false));
        assert_eq!(a.disjoint(&Region::half_space(vec![1.0], 0.0).unwrap()), None);
    }

    #[test]
    fn containment_in_ball() {
        let b = Ball::centered(3, 1.0).unwrap();
        assert!(Region::cube(&[0.5, 0.0, 0.0], 0.1).inside_ball(&b));
        assert!(!Region::cube(&[0.98, 0.0, 0.0], 0.1).inside_ball(&b));
    }
}
