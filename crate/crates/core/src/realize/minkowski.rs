use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Vector in R^{3,1} with inner product `x1y1 + x2y2 + x3y3 - x4y4`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkowskiVector {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl MinkowskiVector {
    pub const ORIGIN: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Self { x1, x2, x3, x4 }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    pub fn inner(self, o: Self) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3 - self.x4 * o.x4
    }

    pub fn norm_sq(self) -> f64 {
        self.inner(self)
    }

    /// Rescales a time-like vector onto the upper sheet `<x,x> = -1, x4 > 0`.
    pub fn to_hyperboloid(self) -> Option<Self> {
        let q = self.norm_sq();
        if !(q < 0.0) {
            return None;
        }
        let s = (-q).sqrt();
        Some(if self.x4 < 0.0 { self * (-1.0 / s) } else { self * (1.0 / s) })
    }

    /// Vector `w` with `<w, a> = <w, b> = <w, c> = 0`; its coordinates are
    /// the signed 3x3 minors of the matrix with rows `a, b, c`, with the
    /// last one sign-flipped to account for the metric.
    pub fn orthogonal_complement(a: Self, b: Self, c: Self) -> Self {
        let m = [a.to_array(), b.to_array(), c.to_array()];
        let minor = |skip: usize| {
            let cols: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
            let e = |r: usize, k: usize| m[r][cols[k]];
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        };
        // Euclidean null vector n of the rows satisfies sum m_rk n_k = 0;
        // the Minkowski one is eta n.
        Self::new(-minor(0), minor(1), -minor(2), -minor(3))
    }

    /// Hyperbolic distance between two points on the hyperboloid, computed
    /// from the chord so that short distances keep full precision.
    pub fn distance(self, o: Self) -> f64 {
        let chord = (self - o).norm_sq().max(0.0).sqrt();
        2.0 * (chord / 2.0).asinh()
    }
}

impl Add for MinkowskiVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3, self.x4 + o.x4)
    }
}

impl Sub for MinkowskiVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3, self.x4 - o.x4)
    }
}

impl Neg for MinkowskiVector {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for MinkowskiVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x1 * s, self.x2 * s, self.x3 * s, self.x4 * s)
    }
}
