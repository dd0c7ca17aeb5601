use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point of the lattice Z².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    /// Maximum norm.
    #[inline]
    pub fn max_norm(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }
}

impl From<(i64, i64)> for Site {
    fn from((x, y): (i64, i64)) -> Self {
        Site { x, y }
    }
}

impl Add for Site {
    type Output = Site;
    #[inline]
    fn add(self, o: Site) -> Site {
        Site::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Site {
    #[inline]
    fn add_assign(&mut self, o: Site) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Site {
    type Output = Site;
    #[inline]
    fn sub(self, o: Site) -> Site {
        Site::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Site {
    type Output = Site;
    #[inline]
    fn neg(self) -> Site {
        Site::new(-self.x, -self.y)
    }
}

impl Mul<Site> for i64 {
    type Output = Site;
    #[inline]
    fn mul(self, s: Site) -> Site {
        Site::new(self * s.x, self * s.y)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}
