//! Volume of a realized polyhedron.
//!
//! The polyhedron is coned from an interior apex over each face, and each
//! face is coned from a point on it, giving one tetrahedron per face-edge
//! incidence. A tetrahedron is split into signed orthoschemes by dropping
//! perpendiculars from the apex to the base plane and from there to the base
//! edges; orthoscheme volumes come from their dihedral angles.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::FullereneGraph;
use crate::hypfun::{lob, sphericity_denominator, BoundSandwich, HypError};
use crate::realize::{realize, MinkowskiVector, Realization, RealizeError, SolverConfig};

/// Largest accepted difference between volumes from two decomposition apexes.
pub const APEX_TOLERANCE: f64 = 1e-7;

// Gram-determinant threshold below which a tetrahedron counts as flat
/// Relative size of the coordinate determinant below which four points
/// count as coplanar.
const DEGENERATE_DET: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum VolumeError {
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Domain(#[from] HypError),
    #[error("{0}")]
    Decomposition(String),
    #[error("volume depends on the decomposition apex (difference {0:.3e})")]
    ApexDependence(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tetrahedron {
    pub vertices: [MinkowskiVector; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetraVolume {
    pub volume: f64,
    pub degenerate: bool,
}

impl Tetrahedron {
    pub fn new(a: MinkowskiVector, b: MinkowskiVector, c: MinkowskiVector, d: MinkowskiVector) -> Self {
        Self { vertices: [a, b, c, d] }
    }

    /// Determinant of the coordinate matrix; its sign is the orientation.
    pub fn orientation(&self) -> f64 {
        det(&self.vertices)
    }

    pub fn is_degenerate(&self) -> bool {
        let scale: f64 = self
            .vertices
            .iter()
            .map(|p| p.to_array().iter().map(|c| c * c).sum::<f64>().sqrt())
            .product();
        det(&self.vertices).abs() <= DEGENERATE_DET * scale
    }

    pub fn volume(&self) -> f64 {
        tetra_volume(self).volume
    }
}

fn det(p: &[MinkowskiVector; 4]) -> f64 {
    Matrix4::from_fn(|i, j| p[i].to_array()[j]).determinant()
}

fn distance(p: MinkowskiVector, q: MinkowskiVector) -> f64 {
    p.distance(q)
}

/// Foot of the perpendicular from `p` to the plane through `a, b, c`.
fn foot_on_plane(p: MinkowskiVector, a: MinkowskiVector, b: MinkowskiVector, c: MinkowskiVector) -> Option<MinkowskiVector> {
    let n = MinkowskiVector::orthogonal_complement(a, b, c);
    let nn = n.norm_sq();
    if !(nn > 0.0) {
        return None;
    }
    (p - n * (p.inner(n) / nn)).to_hyperboloid()
}

/// Foot of the perpendicular from `p` to the line through `x, y`.
fn foot_on_line(p: MinkowskiVector, x: MinkowskiVector, y: MinkowskiVector) -> Option<MinkowskiVector> {
    let (gxx, gxy, gyy) = (x.norm_sq(), x.inner(y), y.norm_sq());
    let (px, py) = (p.inner(x), p.inner(y));
    let d = gxx * gyy - gxy * gxy;
    if d == 0.0 {
        return None;
    }
    let alpha = (px * gyy - py * gxy) / d;
    let beta = (py * gxx - px * gxy) / d;
    (x * alpha + y * beta).to_hyperboloid()
}

/// Volume of the orthoscheme with essential dihedral angles `a1, a2, a3`.
pub fn orthoscheme_volume(a1: f64, a2: f64, a3: f64) -> f64 {
    let (c1, c3) = (a1.cos(), a3.cos());
    let s = (a2.cos().powi(2) - (a1.sin() * a3.sin()).powi(2)).max(0.0).sqrt();
    let delta = s.atan2(c1 * c3);
    0.25 * (lob(a1 + delta) - lob(a1 - delta) + lob(a3 + delta) - lob(a3 - delta)
        - lob(FRAC_PI_2 - a2 + delta)
        + lob(FRAC_PI_2 - a2 - delta)
        + 2.0 * lob(FRAC_PI_2 - delta))
}

/// Orthoscheme `p0 p1 p2 p3` with `p0p1` perpendicular to the plane
/// `p1p2p3` and `p1p2` perpendicular to `p2p3`, from its three edge lengths.
fn orthoscheme_from_points(p: [MinkowskiVector; 4]) -> f64 {
    let a = distance(p[0], p[1]);
    let b = distance(p[1], p[2]);
    let c = distance(p[2], p[3]);
    if a < 1e-14 || b < 1e-14 || c < 1e-14 {
        return 0.0;
    }
    let a3 = c.tanh().atan2(b.sinh());
    let a1 = a.tanh().atan2(b.sinh());
    let tan_beta = b.tanh() / c.sinh();
    let gamma = a.tanh().atan2(distance(p[1], p[3]).sinh());
    let a2 = tan_beta.atan2(gamma.sin());
    orthoscheme_volume(a1, a2, a3)
}

/// Volume of the orthoscheme `o h k x`, signed by the orientation of the
/// chain `(o, h, first, second)` it stands for.
fn signed_orthoscheme(o: MinkowskiVector, h: MinkowskiVector, k: MinkowskiVector, x: MinkowskiVector, chain: [MinkowskiVector; 2]) -> f64 {
    let s = det(&[o, h, chain[0], chain[1]]);
    if s == 0.0 {
        return 0.0;
    }
    s.signum() * orthoscheme_from_points([o, h, k, x])
}

/// Volume of a compact tetrahedron; flat ones give zero and are flagged.
pub fn tetra_volume(t: &Tetrahedron) -> TetraVolume {
    if t.is_degenerate() {
        return TetraVolume { volume: 0.0, degenerate: true };
    }
    let [o, a, b, c] = t.vertices;
    let Some(h) = foot_on_plane(o, a, b, c) else {
        return TetraVolume { volume: 0.0, degenerate: true };
    };
    let mut total = 0.0;
    for (x, y) in [(a, b), (b, c), (c, a)] {
        let Some(k) = foot_on_line(h, x, y) else {
            continue;
        };
        // triangle h x y splits at k into h x k and h k y
        total += signed_orthoscheme(o, h, k, x, [x, k]) + signed_orthoscheme(o, h, k, y, [k, y]);
    }
    TetraVolume { volume: total.abs(), degenerate: false }
}

/// One tetrahedron `(apex, face point, v_a, v_b)` per face edge.
pub fn decompose(r: &Realization, g: &FullereneGraph) -> Result<Vec<Tetrahedron>, VolumeError> {
    let sum = r
        .vertex_points
        .iter()
        .fold(MinkowskiVector::default(), |s, &p| s + p);
    let apex = sum
        .to_hyperboloid()
        .ok_or_else(|| VolumeError::Decomposition("vertex barycentre is not time-like".into()))?;
    decompose_from(r, g, apex)
}

fn decompose_from(r: &Realization, g: &FullereneGraph, apex: MinkowskiVector) -> Result<Vec<Tetrahedron>, VolumeError> {
    for (m, e) in r.face_normals.iter().enumerate() {
        if !(apex.inner(*e) < 0.0) {
            return Err(VolumeError::Decomposition(format!("apex is not inside face {m}")));
        }
    }
    let dual = g.dual();
    let mut out = Vec::with_capacity(3 * g.n_vertices());
    for (fi, face) in g.faces().iter().enumerate() {
        let e = r.face_normals[fi];
        let c = face
            .iter()
            .fold(MinkowskiVector::default(), |s, &v| s + r.vertex_points[v]);
        let f = (c - e * c.inner(e)).to_hyperboloid().ok_or_else(|| {
            VolumeError::Decomposition(format!("face {fi} barycentre is not time-like"))
        })?;
        for &m in dual.neighbors(fi) {
            if !(f.inner(r.face_normals[m]) < 0.0) {
                return Err(VolumeError::Decomposition(format!(
                    "face point of {fi} lies outside neighbouring face {m}"
                )));
            }
        }
        for k in 0..face.len() {
            let va = r.vertex_points[face[k]];
            let vb = r.vertex_points[face[(k + 1) % face.len()]];
            out.push(Tetrahedron::new(apex, f, va, vb));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypVolumeReport {
    pub graph_id: String,
    pub n_vertices: usize,
    pub volume: f64,
    pub volume_rounded: f64,
    pub sphericity: f64,
    pub sandwich: BoundSandwich,
    pub tetra_count: usize,
    pub decomposition_residual: f64,
    pub solver_iterations: usize,
}

pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// `volume / sphericity_denominator(n)`.
pub fn sphericity(volume: f64, n: usize) -> Result<f64, HypError> {
    if !(volume > 0.0) {
        return Err(HypError::Domain(format!("volume must be positive, got {volume}")));
    }
    if n < 20 {
        return Err(HypError::Domain(format!("sphericity needs N >= 20, got {n}")));
    }
    Ok(volume / sphericity_denominator(n)?)
}

/// Boundary area of a right-angled polyhedron with `n` vertices.
pub fn surface_area(n: usize) -> f64 {
    std::f64::consts::PI * ((n as f64 + 4.0) / 2.0 - 6.0)
}

fn sum_volumes(tets: &[Tetrahedron]) -> f64 {
    tets.iter().map(|t| tetra_volume(t).volume).sum()
}

/// Volume report for an existing realization.
pub fn volume_of_realization(r: &Realization, g: &FullereneGraph) -> Result<HypVolumeReport, VolumeError> {
    let tets = decompose(r, g)?;
    let volume = sum_volumes(&tets);
    let alt_apex = (tets[0].vertices[0] + r.vertex_points[0])
        .to_hyperboloid()
        .ok_or_else(|| VolumeError::Decomposition("alternative apex is not time-like".into()))?;
    let alt = sum_volumes(&decompose_from(r, g, alt_apex)?);
    let residual = (volume - alt).abs();
    if residual > APEX_TOLERANCE {
        return Err(VolumeError::ApexDependence(residual));
    }
    let n = g.n_vertices();
    let sandwich = BoundSandwich::new(n, &g.face_sizes(), Some(volume))?;
    Ok(HypVolumeReport {
        graph_id: g.id().to_string(),
        n_vertices: n,
        volume,
        volume_rounded: round6(volume),
        sphericity: sphericity(volume, n)?,
        sandwich,
        tetra_count: tets.len(),
        decomposition_residual: residual,
        solver_iterations: r.iterations,
    })
}

/// Realizes `g` and computes its volume.
pub fn polyhedron_volume(g: &FullereneGraph, cfg: &SolverConfig) -> Result<HypVolumeReport, VolumeError> {
    let r = realize(g, cfg)?;
    volume_of_realization(&r, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::dodecahedron;
    use crate::hypfun::dodecahedron_volume_closed_form;
    use std::f64::consts::PI;

    #[test]
    fn dodecahedral_orthoscheme() {
        let v = orthoscheme_volume(PI / 5.0, PI / 3.0, PI / 4.0);
        assert!((v - 4.306208 / 120.0).abs() < 1e-6);
        assert!((v * 120.0 - dodecahedron_volume_closed_form()).abs() < 1e-12);
    }

    #[test]
    fn repeated_vertex_is_degenerate() {
        let p = MinkowskiVector::ORIGIN;
        let q = crate::realize::from_ball([0.1, 0.2, 0.0]);
        let r = crate::realize::from_ball([0.0, 0.2, 0.3]);
        let t = tetra_volume(&Tetrahedron::new(p, q, r, q));
        assert_eq!(t, TetraVolume { volume: 0.0, degenerate: true });
    }

    #[test]
    fn dodecahedron_volume() {
        let g = dodecahedron();
        let rep = polyhedron_volume(&g, &SolverConfig::default()).unwrap();
        assert_eq!(rep.tetra_count, 60);
        assert!((rep.volume - dodecahedron_volume_closed_form()).abs() < 1e-8);
        assert!((rep.volume - 4.306208).abs() < 1e-5);
        assert!((rep.sphericity - 0.757488).abs() < 1e-5);
        assert!(rep.decomposition_residual < APEX_TOLERANCE);
        assert!(rep.sandwich.holds());
    }

    #[test]
    fn consistent_orientation() {
        let g = dodecahedron();
        let r = realize(&g, &SolverConfig::default()).unwrap();
        let tets = decompose(&r, &g).unwrap();
        let s0 = tets[0].orientation().signum();
        assert!(tets.iter().all(|t| t.orientation().signum() == s0));
    }

    #[test]
    fn sphericity_domain() {
        assert!(sphericity(0.0, 20).is_err());
        assert!(sphericity(1.0, 10).is_err());
        assert!((surface_area(20) - 6.0 * PI).abs() < 1e-15);
    }
}
