//! Right-angled realization of a fullerene in the hyperboloid model.
//!
//! Each face is a plane `{x : <x, e> = 0}` with space-like unit normal `e`,
//! oriented so that the polyhedron is `{x : <x, e> <= 0}` for every face.
//! Right dihedral angles mean `<e_i, e_j> = 0` for adjacent faces.

mod init;
mod minkowski;
mod solver;

use nalgebra::{Matrix3, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use minkowski::MinkowskiVector;

use crate::graph::FullereneGraph;
use solver::GramSystem;

/// Tolerance for the unit-norm and orthogonality invariants.
pub const GRAM_TOLERANCE: f64 = 1e-10;
/// Largest accepted condition number of a vertex's three face normals.
pub const CONDITION_LIMIT: f64 = 1e8;
// deviation of a vertex's face-normal triple from orthonormal
const TRIPLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error("invalid input graph {0}")]
    InvalidGraph(String),
    #[error("solver did not converge after {attempts} attempts (best residual {best_residual:.3e})")]
    NoConvergence { attempts: usize, best_residual: f64 },
    #[error("faces at vertex {vertex} are ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { vertex: usize, condition: f64 },
    #[error("faces at vertex {vertex} are not mutually orthogonal (deviation {deviation:.3e})")]
    NotOrthogonal { vertex: usize, deviation: f64 },
    #[error("vertex {vertex} lies outside face {face} (<v, e> = {value:.3e})")]
    Exterior { vertex: usize, face: usize, value: f64 },
    #[error("faces {0} and {1} are not disjoint")]
    Intersecting(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Maximum absolute residual of the Gram equations.
    pub tolerance: f64,
    /// Newton iterations per attempt.
    pub max_iterations: usize,
    /// Restarts after the first attempt.
    pub retries: usize,
    pub seed: u64,
    pub homotopy_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 400,
            retries: 6,
            seed: 0,
            homotopy_steps: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub graph_id: String,
    pub face_normals: Vec<MinkowskiVector>,
    pub vertex_points: Vec<MinkowskiVector>,
    pub residual: f64,
    pub gram: Vec<Vec<f64>>,
    pub iterations: usize,
    pub attempts: usize,
}

impl Realization {
    pub fn gram_matrix(normals: &[MinkowskiVector]) -> Vec<Vec<f64>> {
        normals
            .iter()
            .map(|a| normals.iter().map(|&b| a.inner(b)).collect())
            .collect()
    }

    /// Checks every invariant of a right-angled realization of `g`.
    pub fn check(&self, g: &FullereneGraph) -> Result<(), RealizeError> {
        let dual = g.dual();
        let f = self.face_normals.len();
        for i in 0..f {
            for j in i..f {
                let v = self.face_normals[i].inner(self.face_normals[j]);
                let ok = if i == j {
                    (v - 1.0).abs() <= GRAM_TOLERANCE
                } else if dual.are_adjacent(i, j) {
                    v.abs() <= GRAM_TOLERANCE
                } else {
                    v < -1.0
                };
                if !ok {
                    return Err(RealizeError::Intersecting(i, j));
                }
            }
        }
        let points = extract_vertices(&self.face_normals, g)?;
        for (a, b) in points.iter().zip(&self.vertex_points) {
            if (*a - *b).to_array().iter().any(|c| c.abs() > 1e-8) {
                return Err(RealizeError::InvalidGraph(format!(
                    "{}: stored vertices do not match the normals",
                    g.id()
                )));
            }
        }
        Ok(())
    }

    /// Conformal ball model coordinates of the vertices.
    pub fn to_ball_model(&self) -> Vec<[f64; 3]> {
        self.vertex_points.iter().map(|&p| to_ball(p)).collect()
    }

    pub fn edge_lengths(&self, g: &FullereneGraph) -> Vec<f64> {
        g.edges()
            .map(|(u, v)| self.vertex_points[u].distance(self.vertex_points[v]))
            .collect()
    }
}

/// Hyperboloid to conformal ball: `(x1, x2, x3) / (1 + x4)`.
pub fn to_ball(p: MinkowskiVector) -> [f64; 3] {
    let s = 1.0 + p.x4;
    [p.x1 / s, p.x2 / s, p.x3 / s]
}

/// Inverse of [`to_ball`] for points strictly inside the unit ball.
pub fn from_ball(b: [f64; 3]) -> MinkowskiVector {
    let r2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    let s = 1.0 / (1.0 - r2);
    MinkowskiVector::new(2.0 * b[0] * s, 2.0 * b[1] * s, 2.0 * b[2] * s, (1.0 + r2) * s)
}

/// Vertex points as the intersection of each vertex's three face planes,
/// followed by the interior check against all other faces.
pub fn extract_vertices(
    normals: &[MinkowskiVector],
    g: &FullereneGraph,
) -> Result<Vec<MinkowskiVector>, RealizeError> {
    let mut points = Vec::with_capacity(g.n_vertices());
    for v in 0..g.n_vertices() {
        let fs = g.vertex_faces(v);
        let e = fs.map(|f| normals[f]);
        let gram = Matrix3::from_fn(|i, j| e[i].inner(e[j]));
        let deviation = (gram - Matrix3::identity()).amax();
        let eig = SymmetricEigen::new(gram).eigenvalues;
        let (lo, hi) = (eig.amin(), eig.amax());
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition <= CONDITION_LIMIT) {
            return Err(RealizeError::IllConditioned { vertex: v, condition });
        }
        if deviation > TRIPLE_TOLERANCE {
            return Err(RealizeError::NotOrthogonal { vertex: v, deviation });
        }
        let w = MinkowskiVector::orthogonal_complement(e[0], e[1], e[2]);
        let p = w
            .to_hyperboloid()
            .ok_or(RealizeError::IllConditioned { vertex: v, condition })?;
        points.push(p);
    }
    for (v, p) in points.iter().enumerate() {
        let own = g.vertex_faces(v);
        for (m, e) in normals.iter().enumerate() {
            if own.contains(&m) {
                continue;
            }
            let value = p.inner(*e);
            if !(value < 0.0) {
                return Err(RealizeError::Exterior { vertex: v, face: m, value });
            }
        }
    }
    Ok(points)
}

/// Moves the vertex barycentre to the hyperboloid origin and aligns the
/// faces at vertex 0 with the coordinate axes (Gram-Schmidt), so that the
/// result is fixed and coordinates stay small.
fn fix_gauge(normals: &[MinkowskiVector], g: &FullereneGraph) -> Option<Vec<MinkowskiVector>> {
    let mut sum = MinkowskiVector::default();
    for v in 0..g.n_vertices() {
        let [a, b, c] = g.vertex_faces(v).map(|f| normals[f]);
        sum = sum + MinkowskiVector::orthogonal_complement(a, b, c).to_hyperboloid()?;
    }
    let b4 = sum.to_hyperboloid()?;
    let mut basis: Vec<MinkowskiVector> = Vec::with_capacity(3);
    for f in g.vertex_faces(0) {
        let mut u = normals[f] + b4 * normals[f].inner(b4);
        for &b in &basis {
            u = u - b * u.inner(b);
        }
        let n = u.norm_sq();
        if !(n > 0.0) {
            return None;
        }
        basis.push(u * (1.0 / n.sqrt()));
    }
    let map = |x: MinkowskiVector| {
        MinkowskiVector::new(x.inner(basis[0]), x.inner(basis[1]), x.inner(basis[2]), -x.inner(b4))
    };
    Some(normals.iter().map(|&e| map(e)).collect())
}

fn dual_pairs(g: &FullereneGraph) -> Vec<(usize, usize)> {
    let dual = g.dual();
    let mut pairs = Vec::with_capacity(dual.n_edges());
    for i in 0..dual.n_vertices() {
        for &j in dual.neighbors(i) {
            if i < j {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Solves for the right-angled realization of `g`.
pub fn realize(g: &FullereneGraph, cfg: &SolverConfig) -> Result<Realization, RealizeError> {
    let report = g.validate();
    if !report.is_valid() {
        let reasons: Vec<String> = report.failures().map(|c| c.detail.clone()).collect();
        return Err(RealizeError::InvalidGraph(format!("{}: {}", g.id(), reasons.join("; "))));
    }
    let system = GramSystem::new(g.n_faces(), dual_pairs(g));
    let mut best = f64::INFINITY;
    let mut iterations = 0;
    for attempt in 0..=cfg.retries {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(attempt as u64 * 0x9e37_79b9));
        let outer = (attempt * 7) % g.n_faces();
        let jitter = 0.1 + 0.1 * attempt as f64;
        let start = init::initial_normals(g, outer, jitter.min(0.6), &mut rng);
        let out = system.solve(start, cfg.homotopy_steps, cfg.tolerance, cfg.max_iterations);
        iterations += out.iterations;
        best = best.min(out.residual);
        if !out.converged {
            log::debug!("{}: attempt {attempt} stalled at residual {:.3e}", g.id(), out.residual);
            continue;
        }
        let Some(normals) = fix_gauge(&out.normals, g) else {
            continue;
        };
        // the gauge map is only approximately an isometry, so polish again
        let (normals, residual) = system.polish(normals, cfg.tolerance);
        if residual > cfg.tolerance {
            continue;
        }
        let Ok(vertex_points) = extract_vertices(&normals, g) else {
            log::debug!("{}: attempt {attempt} converged to a non-convex solution", g.id());
            continue;
        };
        let r = Realization {
            graph_id: g.id().to_string(),
            gram: Realization::gram_matrix(&normals),
            face_normals: normals,
            vertex_points,
            residual,
            iterations,
            attempts: attempt + 1,
        };
        if r.check(g).is_ok() {
            return Ok(r);
        }
    }
    Err(RealizeError::NoConvergence {
        attempts: cfg.retries + 1,
        best_residual: best,
    })
}
