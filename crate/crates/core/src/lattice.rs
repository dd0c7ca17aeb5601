//! Stair-climbing lattice approximations `L_{λ,t}(z) = (z, [λz + t])` of the
//! line with slope λ and intercept t, windows of consecutive steps, and the
//! identities tying them to the cocycle of the staircase coupling.

use num_rational::Ratio;

use crate::circle::{self, floor_affine, frac_affine, CirclePoint, Coupling, Slope, BOUNDARY_EPS};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::site::Site;

/// An ordered list of distinct lattice sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Window {
    points: Vec<Site>,
}

impl Window {
    pub fn new(points: Vec<Site>) -> Result<Window> {
        if points.is_empty() {
            return invalid("a window needs at least one site");
        }
        for (i, a) in points.iter().enumerate() {
            if points[..i].contains(a) {
                return invalid(format!("window site {a} repeated"));
            }
        }
        Ok(Window { points })
    }

    pub fn points(&self) -> &[Site] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn translate(&self, v: Site) -> Window {
        Window {
            points: self.points.iter().map(|&p| p + v).collect(),
        }
    }

    /// The same shape with its first site moved to the origin.
    pub fn canonical(&self) -> Window {
        self.translate(-self.points[0])
    }
}

/// `L_{λ,t}(z) = (z, [λz + t])`.
pub fn line_point(slope: &Slope, t: &CirclePoint, z: i64) -> Site {
    line_point_checked(slope, t, z).0
}

/// [`line_point`] plus a flag raised when, in approximate mode, `λz + t`
/// lies within [`BOUNDARY_EPS`] of an integer.
pub fn line_point_checked(slope: &Slope, t: &CirclePoint, z: i64) -> (Site, bool) {
    let (y, near) = floor_affine(t, slope, z);
    (Site::new(z, y), near)
}

/// The steps `L(z₁), …, L(z₁ + m − 1)`.
pub fn window(slope: &Slope, t: &CirclePoint, z1: i64, m: usize) -> Result<Window> {
    Ok(window_checked(slope, t, z1, m)?.0)
}

pub fn window_checked(slope: &Slope, t: &CirclePoint, z1: i64, m: usize) -> Result<(Window, bool)> {
    if m == 0 {
        return invalid("window size must be at least 1");
    }
    let mut near_any = false;
    let points = (0..m as i64)
        .map(|u| {
            let (p, near) = line_point_checked(slope, t, z1 + u);
            near_any |= near;
            p
        })
        .collect();
    Ok((Window { points }, near_any))
}

/// Both sides of an identity between lattice vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityCheck {
    pub lhs: Site,
    pub rhs: Site,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `L_{λ,t}(n + u)` against `L_{λ,t}(n) + L_{λ,τⁿ(t)}(u)`.
pub fn step_decompose(slope: &Slope, t: &CirclePoint, n: u64, u: u64) -> IdentityCheck {
    let shifted = circle::orbit_point(t, slope, n);
    IdentityCheck {
        lhs: line_point(slope, t, (n + u) as i64),
        rhs: line_point(slope, t, n as i64) + line_point(slope, &shifted, u as i64),
    }
}

/// The staircase cocycle `κ_n(t)` against `L_{λ,t}(n)`.
pub fn line_equals_cocycle(slope: &Slope, t: &CirclePoint, n: u64) -> IdentityCheck {
    IdentityCheck {
        lhs: circle::cocycle(t, slope, &Coupling::Staircase(*slope), n).vector,
        rhs: line_point(slope, t, n as i64),
    }
}

/// A maximal interval `[start, start + length)` of intercepts on which the
/// canonical window shape is constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeInterval {
    pub start: CirclePoint,
    pub length: Scalar,
    pub shape: Window,
}

/// Partition of `[0, 1)` by the breakpoints of `t ↦ window(λ, t, 0, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapePartition {
    pub slope: Slope,
    pub m: usize,
    pub breakpoints: Vec<CirclePoint>,
    pub intervals: Vec<ShapeInterval>,
}

impl ShapePartition {
    /// The interval containing `t`.
    pub fn locate(&self, t: &CirclePoint) -> &ShapeInterval {
        let idx = self.breakpoints.iter().rposition(|b| b <= t).unwrap_or(0);
        &self.intervals[idx]
    }

    /// Smallest circular distance from `t` to a breakpoint.
    pub fn distance_to_breakpoint(&self, t: &CirclePoint) -> f64 {
        self.breakpoints
            .iter()
            .map(|b| circle::circular_distance(b, t))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Breakpoints `{0} ∪ {frac(−λz) : 1 ≤ z ≤ m − 1}` and the shape on each
/// interval between them. Exact for rational slopes; for irrational slopes
/// breakpoints closer than [`BOUNDARY_EPS`] are merged.
pub fn shape_breakpoints(slope: &Slope, m: usize) -> Result<ShapePartition> {
    if m == 0 {
        return invalid("window size must be at least 1");
    }
    let breakpoints: Vec<CirclePoint> = match *slope {
        Slope::Rational { p, q } => {
            let mut b: Vec<i64> = (0..m as i64).map(|z| (-p * z).rem_euclid(q)).collect();
            b.sort_unstable();
            b.dedup();
            b.into_iter().map(|k| CirclePoint::Exact(Ratio::new(k, q))).collect()
        }
        Slope::Irrational(lambda) => {
            let mut b: Vec<f64> = (0..m as u64)
                .map(|z| {
                    let f = frac_affine(0.0, lambda, z);
                    if f == 0.0 {
                        0.0
                    } else {
                        1.0 - f
                    }
                })
                .collect();
            b.sort_by(f64::total_cmp);
            b.dedup_by(|a, prev| *a - *prev < BOUNDARY_EPS);
            b.into_iter().map(CirclePoint::Approx).collect()
        }
    };
    let intervals = breakpoints
        .iter()
        .enumerate()
        .map(|(k, start)| {
            let (length, probe) = match (start, breakpoints.get(k + 1)) {
                (CirclePoint::Exact(a), next) => {
                    let end = next.and_then(|n| n.as_ratio()).unwrap_or(Ratio::from_integer(1));
                    let len = end - a;
                    (Scalar::ratio(*len.numer(), *len.denom()), *start)
                }
                (a, next) => {
                    let end = next.map_or(1.0, |n| n.value());
                    let mid = CirclePoint::Approx(0.5 * (a.value() + end));
                    (Scalar::Approx(end - a.value()), mid)
                }
            };
            let shape = window(slope, &probe, 0, m).expect("m ≥ 1").canonical();
            ShapeInterval {
                start: *start,
                length,
                shape,
            }
        })
        .collect();
    Ok(ShapePartition {
        slope: *slope,
        m,
        breakpoints,
        intervals,
    })
}

/// `{(0,0), (1,0)}`, the window of a staircase without a rise at `z = 1`.
pub fn flat_pair() -> Window {
    Window::new(vec![Site::new(0, 0), Site::new(1, 0)]).unwrap()
}

/// `{(0,0), (1,1)}`, the window of a staircase rising at `z = 1`.
pub fn step_pair() -> Window {
    Window::new(vec![Site::new(0, 0), Site::new(1, 1)]).unwrap()
}
