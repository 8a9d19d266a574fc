//! Starting guess: a Tutte embedding lifted to the sphere, recentred by a
//! Möbius transformation, with each face replaced by its best-fit plane.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::MinkowskiVector;
use crate::graph::FullereneGraph;

/// Tutte embedding with `outer` on the unit circle and symmetric edge
/// weights `1 + jitter * U(-1, 1)`.
pub(crate) fn tutte_embedding(
    g: &FullereneGraph,
    outer: usize,
    jitter: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<[f64; 2]> {
    let n = g.n_vertices();
    let mut weight = vec![[1.0; 3]; n];
    for (u, v) in g.edges() {
        let w = 1.0 + jitter * rng.gen_range(-1.0..1.0);
        let iu = g.neighbors(u).iter().position(|&x| x == v).unwrap();
        let iv = g.neighbors(v).iter().position(|&x| x == u).unwrap();
        weight[u][iu] = w;
        weight[v][iv] = w;
    }

    let boundary = &g.faces()[outer];
    let mut pos = vec![[0.0; 2]; n];
    let mut index = vec![usize::MAX; n];
    for (k, &v) in boundary.iter().enumerate() {
        let a = std::f64::consts::TAU * k as f64 / boundary.len() as f64;
        pos[v] = [a.cos(), a.sin()];
    }
    let interior: Vec<usize> = (0..n).filter(|v| !boundary.contains(v)).collect();
    for (i, &v) in interior.iter().enumerate() {
        index[v] = i;
    }

    let m = interior.len();
    let mut lap = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DMatrix::<f64>::zeros(m, 2);
    for (i, &v) in interior.iter().enumerate() {
        for (k, &w) in g.neighbors(v).iter().enumerate() {
            let wt = weight[v][k];
            lap[(i, i)] += wt;
            if index[w] == usize::MAX {
                rhs[(i, 0)] += wt * pos[w][0];
                rhs[(i, 1)] += wt * pos[w][1];
            } else {
                lap[(i, index[w])] -= wt;
            }
        }
    }
    // the reduced Laplacian of a connected graph is positive definite
    let sol = lap
        .cholesky()
        .expect("reduced Laplacian is positive definite")
        .solve(&rhs);
    for (i, &v) in interior.iter().enumerate() {
        pos[v] = [sol[(i, 0)], sol[(i, 1)]];
    }
    pos
}

/// Inverse stereographic projection onto the unit sphere.
pub(crate) fn lift_to_sphere(points: &[[f64; 2]]) -> Vec<Vector3<f64>> {
    points
        .iter()
        .map(|&[x, y]| {
            let r2 = x * x + y * y;
            Vector3::new(2.0 * x, 2.0 * y, r2 - 1.0) / (r2 + 1.0)
        })
        .collect()
}

/// Applies Lorentz boosts (Möbius transformations of the sphere) until the
/// centroid of `points` is near the origin.
pub(crate) fn center_on_sphere(points: &mut [Vector3<f64>]) {
    for _ in 0..500 {
        let mean = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
        let m = mean.norm();
        if m < 1e-6 {
            break;
        }
        let dir = mean / m;
        let beta = (0.5 * m).min(0.9);
        let gamma = 1.0 / (1.0 - beta * beta).sqrt();
        for p in points.iter_mut() {
            let a = p.dot(&dir);
            let t = gamma * (1.0 - beta * a);
            let a2 = gamma * (a - beta);
            *p = (*p + dir * (a2 - a)) / t;
            *p /= p.norm();
        }
    }
}

/// Space-like unit normal of the plane through the face's sphere points,
/// oriented so that the ball centre is on the negative side.
pub(crate) fn face_normal(points: &[Vector3<f64>]) -> MinkowskiVector {
    let c = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - c;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let mut n: Vector3<f64> = eig.eigenvectors.column(k).into();
    if n.dot(&c) < 0.0 {
        n = -n;
    }
    let d = n.dot(&c).clamp(1e-6, 1.0 - 1e-6);
    let s = 1.0 / (1.0 - d * d).sqrt();
    MinkowskiVector::new(n.x * s, n.y * s, n.z * s, d * s)
}

pub(crate) fn initial_normals(
    g: &FullereneGraph,
    outer: usize,
    jitter: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<MinkowskiVector> {
    let mut sphere = lift_to_sphere(&tutte_embedding(g, outer, jitter, rng));
    center_on_sphere(&mut sphere);
    g.faces()
        .iter()
        .map(|face| {
            let pts: Vec<_> = face.iter().map(|&v| sphere[v]).collect();
            face_normal(&pts)
        })
        .collect()
}
