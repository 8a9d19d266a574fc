//! Lobachevsky function, closed-form volumes and volume bounds for
//! right-angled hyperbolic polyhedra.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypError {
    #[error("non-finite argument {0}")]
    NonFinite(f64),
    #[error("{0}")]
    Domain(String),
}

/// An angle in radians, guaranteed finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleValue {
    pub radians: f64,
}

impl AngleValue {
    pub fn new(radians: f64) -> Result<Self, HypError> {
        if !radians.is_finite() {
            return Err(HypError::NonFinite(radians));
        }
        Ok(Self { radians })
    }

    /// Representative in `(-pi/2, pi/2]`, the fundamental domain of `Λ`.
    pub fn reduced(self) -> f64 {
        reduce(self.radians)
    }

    pub fn lobachevsky(self) -> f64 {
        lob(self.radians)
    }
}

fn reduce(theta: f64) -> f64 {
    let r = theta - PI * (theta / PI).round();
    if r <= -FRAC_PI_2 {
        r + PI
    } else {
        r
    }
}

const SERIES_TERMS: usize = 30;

// zeta(2k) / (k (2k+1) (2 pi)^(2k)) for k = 1..=SERIES_TERMS
fn clausen_coefficients() -> &'static [f64; SERIES_TERMS] {
    static COEFFS: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let pi2 = PI * PI;
        let exact = [pi2 / 6.0, pi2 * pi2 / 90.0, pi2 * pi2 * pi2 / 945.0, pi2.powi(4) / 9450.0];
        let mut c = [0.0; SERIES_TERMS];
        for (i, ci) in c.iter_mut().enumerate() {
            let k = i + 1;
            let zeta = if k <= exact.len() {
                exact[i]
            } else {
                // summed smallest-first; the n = 60 tail is below 1e-40 here
                (1..=60).rev().map(|n| (n as f64).powi(-2 * k as i32)).sum()
            };
            *ci = zeta / ((k * (2 * k + 1)) as f64) / (2.0 * PI).powi(2 * k as i32);
        }
        c
    })
}

/// Clausen function `Cl2(x)` for `|x| <= pi`.
fn clausen_reduced(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut power = x * x2;
    let mut sum = 0.0;
    for c in clausen_coefficients() {
        let term = c * power;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        power *= x2;
    }
    x - x * x.abs().ln() + sum
}

/// `Λ(θ)` without the finiteness check: NaN in, NaN out.
pub fn lob(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    0.5 * clausen_reduced(2.0 * reduce(theta))
}

/// Lobachevsky function `Λ(θ) = -∫_0^θ log|2 sin t| dt`.
pub fn lobachevsky(theta: f64) -> Result<f64, HypError> {
    Ok(AngleValue::new(theta)?.lobachevsky())
}

/// Volume of the regular ideal tetrahedron, `3Λ(π/3)`.
pub fn v3() -> f64 {
    3.0 * lob(PI / 3.0)
}

/// Volume of the regular ideal octahedron, `8Λ(π/4)`.
pub fn v8() -> f64 {
    8.0 * lob(PI / 4.0)
}

/// Angle parameter of the right-angled dodecahedron formula.
pub fn dodecahedron_theta() -> f64 {
    FRAC_PI_2 - (1.0 / (2.0 * (PI / 5.0).cos())).acos()
}

/// Volume of the right-angled hyperbolic dodecahedron.
pub fn dodecahedron_volume_closed_form() -> f64 {
    let t = dodecahedron_theta();
    let p = PI / 5.0;
    2.5 * (2.0 * lob(t) + lob(t + p) + lob(t - p) + lob(FRAC_PI_2 - 2.0 * t))
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), HypError> {
    if cond {
        Ok(())
    } else {
        Err(HypError::Domain(msg()))
    }
}

/// Lower and upper volume bounds for a bounded right-angled polyhedron.
pub fn atkinson_bounds(n: usize) -> Result<(f64, f64), HypError> {
    require(n >= 20, || format!("right-angled polyhedra have at least 20 vertices, got {n}"))?;
    let n = n as f64;
    Ok(((n - 2.0) * v8() / 32.0, (n - 10.0) * 5.0 * v3() / 8.0))
}

fn check_faces(sizes: &[usize]) -> Result<(), HypError> {
    require(sizes.iter().all(|&s| s >= 5), || {
        format!("face sizes must be at least 5, got {sizes:?}")
    })
}

/// Upper bound from any two faces of sizes `n1`, `n2`.
pub fn two_face_bound(n: usize, n1: usize, n2: usize) -> Result<f64, HypError> {
    check_faces(&[n1, n2])?;
    require(n >= 20, || format!("vertex count {n} below 20"))?;
    Ok((n as f64 - (n1 + n2) as f64) * 5.0 * v3() / 8.0)
}

/// Upper bound from faces `F1, F2, F3` where `F2` is adjacent to both others.
pub fn three_face_bound(n: usize, n1: usize, n2: usize, n3: usize) -> Result<f64, HypError> {
    check_faces(&[n1, n2, n3])?;
    require(n >= 20, || format!("vertex count {n} below 20"))?;
    Ok((n as f64 + 4.0 - (n1 + n2 + n3) as f64) * 5.0 * v3() / 8.0)
}

/// Upper bound for fullerenes with at least 24 vertices.
pub fn fullerene_bound(n: usize) -> Result<f64, HypError> {
    require(n >= 24, || format!("fullerene bound needs N >= 24, got {n}"))?;
    Ok((n as f64 - 14.0) * 5.0 * v3() / 8.0)
}

/// Bounds for ideal π/3-equiangular polyhedra:
/// `(lower, lower from the independence number, upper)`.
pub fn ideal_bounds(n: usize) -> Result<(f64, Option<f64>, f64), HypError> {
    require(n > 4, || format!("ideal polyhedra need more than 4 vertices, got {n}"))?;
    let nf = n as f64;
    let fullerene =
        (n >= 20).then(|| v3() * crate::indices::independence_lower_bound(n).ceil());
    Ok((nf * 3.0 * v3() / 8.0, fullerene, (3.0 * nf - 14.0) * v3() / 2.0))
}

fn check_radius(r: f64) -> Result<(), HypError> {
    if !r.is_finite() {
        return Err(HypError::NonFinite(r));
    }
    require(r > 0.0, || format!("radius must be positive, got {r}"))
}

pub fn ball_volume(r: f64) -> Result<f64, HypError> {
    check_radius(r)?;
    Ok(PI * ((2.0 * r).sinh() - 2.0 * r))
}

pub fn ball_area(r: f64) -> Result<f64, HypError> {
    check_radius(r)?;
    Ok(2.0 * PI * ((2.0 * r).cosh() - 1.0))
}

/// Denominator of the sphericity index for an `n`-vertex polyhedron.
pub fn sphericity_denominator(n: usize) -> Result<f64, HypError> {
    let x = (n as f64 - 4.0) / 4.0;
    require(x >= 1.0, || format!("(n - 4) / 4 = {x} is below 1"))?;
    let a = x.acosh();
    Ok(PI * (a.sinh() - a))
}

/// A computed volume together with the bounds that apply to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSandwich {
    pub lower: f64,
    pub upper_atkinson: f64,
    pub upper_two_face: f64,
    /// Absent below 24 vertices.
    pub upper_fullerene: Option<f64>,
    pub volume: Option<f64>,
}

impl BoundSandwich {
    pub const SLACK: f64 = 1e-9;

    /// `face_sizes` picks the two largest faces for the two-face bound.
    pub fn new(n: usize, face_sizes: &[usize], volume: Option<f64>) -> Result<Self, HypError> {
        let (lower, upper_atkinson) = atkinson_bounds(n)?;
        let mut sizes = face_sizes.to_vec();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        require(sizes.len() >= 2, || "need at least two faces".to_string())?;
        Ok(Self {
            lower,
            upper_atkinson,
            upper_two_face: two_face_bound(n, sizes[0], sizes[1])?,
            upper_fullerene: fullerene_bound(n).ok(),
            volume,
        })
    }

    pub fn upper(&self) -> f64 {
        let u = self.upper_atkinson.min(self.upper_two_face);
        self.upper_fullerene.map_or(u, |f| u.min(f))
    }

    /// True when there is no volume or it lies within the bounds.
    pub fn holds(&self) -> bool {
        self.volume.is_none_or(|v| {
            self.lower - Self::SLACK <= v && v <= self.upper() + Self::SLACK
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        // published constants are truncated, not rounded, to 6 decimals
        assert!((0.0..1e-6).contains(&(v3() - 1.014941)));
        assert!((0.0..1e-6).contains(&(v8() - 3.663862)));
        assert!((v3() - 1.0149416064096536).abs() < 1e-14);
        assert!((v8() - 3.6638623767088760).abs() < 1e-14);
    }

    #[test]
    fn special_values() {
        assert_eq!(lob(0.0), 0.0);
        assert!(lob(PI).abs() < 1e-14);
        assert!(lob(FRAC_PI_2).abs() < 1e-15);
        // maximum at pi/6
        let m = lob(PI / 6.0);
        assert!(m > lob(PI / 6.0 - 1e-4) && m > lob(PI / 6.0 + 1e-4));
        assert!(lobachevsky(f64::NAN).is_err());
        assert!(lobachevsky(f64::INFINITY).is_err());
    }

    #[test]
    fn dodecahedron() {
        let t = dodecahedron_theta();
        assert!((t - 0.666239).abs() < 1e-6);
        assert!((dodecahedron_volume_closed_form() - 4.306208).abs() < 1e-6);

        // the repeated "+π/5" variant gives something else
        let p = PI / 5.0;
        let repeated = 2.5 * (2.0 * lob(t) + 2.0 * lob(t + p) + lob(FRAC_PI_2 - 2.0 * t));
        assert!((repeated - 4.306208).abs() > 0.1);

        // and so does the angle read as arccos(cos(π/5) / 2)
        let t2 = FRAC_PI_2 - ((PI / 5.0).cos() / 2.0).acos();
        let other = 2.5 * (2.0 * lob(t2) + lob(t2 + p) + lob(t2 - p) + lob(FRAC_PI_2 - 2.0 * t2));
        assert!((other - 4.306208).abs() > 0.1);
    }

    #[test]
    fn atkinson() {
        let (lo, hi) = atkinson_bounds(20).unwrap();
        assert!((lo - 18.0 * v8() / 32.0).abs() < 1e-15);
        assert!((lo - 2.060922).abs() < 1e-6);
        // 6.343381 is 6.25 times the truncated v3
        assert!((hi - 6.343381).abs() < 1e-5);
        let vol = dodecahedron_volume_closed_form();
        assert!(lo < vol && vol < hi);
        assert!((atkinson_bounds(60).unwrap().0 - 6.640749).abs() < 2e-6);
        assert!(atkinson_bounds(19).is_err());
    }

    #[test]
    fn face_bounds() {
        assert!((fullerene_bound(24).unwrap() - 6.343381).abs() < 1e-5);
        assert!(fullerene_bound(24).unwrap() >= 6.023046);
        assert!(fullerene_bound(20).is_err());
        for n in (24..=100).step_by(2) {
            assert!(two_face_bound(n, 6, 6).unwrap() < atkinson_bounds(n).unwrap().1);
            assert_eq!(three_face_bound(n, 6, 6, 6).unwrap(), fullerene_bound(n).unwrap());
        }
        assert!(two_face_bound(30, 4, 6).is_err());
    }

    #[test]
    fn ideal() {
        let (atk, ful, up) = ideal_bounds(20).unwrap();
        assert!((ful.unwrap() - 7.0 * v3()).abs() < 1e-15);
        assert!((ful.unwrap() - 7.104587).abs() < 1e-5);
        assert!((atk - 7.612058).abs() < 1e-5);
        assert!(atk > ful.unwrap());
        assert!((up - 23.0 * v3()).abs() < 1e-12);
        let (_, ful5, up5) = ideal_bounds(5).unwrap();
        assert!(ful5.is_none());
        assert!((up5 - v3() / 2.0).abs() < 1e-15);
        assert!(ideal_bounds(4).is_err());
    }

    #[test]
    fn balls() {
        assert!((sphericity_denominator(20).unwrap() - 5.684855).abs() < 1e-5);
        assert!(sphericity_denominator(7).is_err());
        let r = 1e-3;
        let ratio = ball_area(r).unwrap() / ball_volume(r).unwrap();
        assert!((ratio - 3.0 / r).abs() / (3.0 / r) < 1e-4);
        assert!(ball_volume(0.0).is_err());
        assert!(ball_area(f64::NAN).is_err());
    }

    #[test]
    fn sandwich() {
        let mut sizes = vec![5; 12];
        sizes.extend([6; 20]);
        let s = BoundSandwich::new(60, &sizes, Some(21.531038)).unwrap();
        assert!(s.holds());
        assert_eq!(s.upper(), fullerene_bound(60).unwrap());
        let bad = BoundSandwich { volume: Some(100.0), ..s };
        assert!(!bad.holds());
    }
}
