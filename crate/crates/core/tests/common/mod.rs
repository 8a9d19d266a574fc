//! Independent reference implementations used only by the tests.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::f64::consts::PI;

use hypfull::graph::{wind_spiral, FullereneGraph};
use hypfull::realize::MinkowskiVector;
use hypfull::volume::Tetrahedron;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// -∫_0^θ log|2 sin t| dt for θ in [0, π/2], splitting off the log t
/// singularity and integrating the smooth remainder numerically.
pub fn lobachevsky_quadrature(theta: f64) -> f64 {
    assert!((0.0..=PI / 2.0 + 1e-12).contains(&theta));
    if theta == 0.0 {
        return 0.0;
    }
    let singular = theta * theta.ln() - theta;
    let smooth: f64 = gauss_legendre(40)
        .iter()
        .map(|&(x, w)| {
            let t = 0.5 * theta * (x + 1.0);
            0.5 * theta * w * (2.0 * t.sin() / t).ln()
        })
        .sum();
    -(singular + smooth)
}

/// Truncated Fourier series ½ Σ sin(2kθ)/k²; the tail is below 1/(2K).
pub fn lobachevsky_fourier(theta: f64, terms: usize) -> f64 {
    0.5 * (1..=terms).map(|k| (2.0 * k as f64 * theta).sin() / (k * k) as f64).sum::<f64>()
}

fn klein(p: MinkowskiVector) -> [f64; 3] {
    [p.x1 / p.x4, p.x2 / p.x4, p.x3 / p.x4]
}

/// Volume of a compact geodesic tetrahedron by quadrature in the Poincaré
/// ball. Geodesic tetrahedra are straight in the Klein model, so the domain
/// is parametrized there (collapsed Gauss–Legendre on the simplex), pushed
/// to the ball and weighted with the ball density 8/(1-|b|^2)^3 times the
/// Jacobian of the Klein-to-ball map.
pub fn tetra_volume_ball_quadrature(v: &[MinkowskiVector; 4], order: usize) -> f64 {
    let k: Vec<[f64; 3]> = v.iter().map(|&p| klein(p)).collect();
    let e = |i: usize| [k[i][0] - k[0][0], k[i][1] - k[0][1], k[i][2] - k[0][2]];
    let (a, b, c) = (e(1), e(2), e(3));
    let det6 = (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]))
        .abs();
    let gl: Vec<(f64, f64)> = gauss_legendre(order).iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let mut sum = 0.0;
    for &(u, wu) in &gl {
        for &(s, ws) in &gl {
            for &(t, wt) in &gl {
                let l1 = u;
                let l2 = (1.0 - u) * s;
                let l3 = (1.0 - u) * (1.0 - s) * t;
                let jac = (1.0 - u) * (1.0 - u) * (1.0 - s);
                let x: Vec<f64> = (0..3).map(|d| k[0][d] + l1 * a[d] + l2 * b[d] + l3 * c[d]).collect();
                let r2: f64 = x.iter().map(|c| c * c).sum();
                let r = r2.sqrt();
                // b = k / (1 + sqrt(1 - |k|^2)), radial map f(r)
                let root = (1.0 - r2).sqrt();
                let f = r / (1.0 + root);
                let df = 1.0 / (root * (1.0 + root));
                let map_jac = if r > 1e-12 { df * (f / r) * (f / r) } else { 0.125 };
                let density = 8.0 / (1.0 - f * f).powi(3);
                sum += wu * ws * wt * jac * density * map_jac;
            }
        }
    }
    sum * det6
}

/// Point on the hyperboloid from ball coordinates.
pub fn from_ball(b: [f64; 3]) -> MinkowskiVector {
    let r2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    let s = 1.0 - r2;
    MinkowskiVector::new(2.0 * b[0] / s, 2.0 * b[1] / s, 2.0 * b[2] / s, (1.0 + r2) / s)
}

fn random_ball_point(rng: &mut impl Rng, radius: f64) -> [f64; 3] {
    loop {
        let p = [rng.gen_range(-radius..radius), rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)];
        if p.iter().map(|c| c * c).sum::<f64>() < radius * radius {
            return p;
        }
    }
}

fn klein_volume6(v: &[MinkowskiVector; 4]) -> f64 {
    let k: Vec<[f64; 3]> = v.iter().map(|p| [p.x1 / p.x4, p.x2 / p.x4, p.x3 / p.x4]).collect();
    let e = |i: usize| [k[i][0] - k[0][0], k[i][1] - k[0][1], k[i][2] - k[0][2]];
    let (a, b, c) = (e(1), e(2), e(3));
    (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]))
        .abs()
}

/// Seeded compact tetrahedra away from degeneracy.
pub fn random_tetrahedra(seed: u64, count: usize) -> Vec<Tetrahedron> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let v = [(); 4].map(|_| from_ball(random_ball_point(&mut rng, 0.8)));
        if klein_volume6(&v) > 0.05 {
            out.push(Tetrahedron::new(v[0], v[1], v[2], v[3]));
        }
    }
    out
}

/// All-pairs distances by Floyd–Warshall.
pub fn floyd(adjacency: &[Vec<usize>]) -> Vec<Vec<u64>> {
    let n = adjacency.len();
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (u, nb) in adjacency.iter().enumerate() {
        d[u][u] = 0;
        for &v in nb {
            d[u][v] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Face adjacency built directly from the face boundary cycles.
pub fn face_adjacency(g: &FullereneGraph) -> Vec<Vec<usize>> {
    let faces = g.faces();
    let mut owner = std::collections::HashMap::new();
    for (f, cycle) in faces.iter().enumerate() {
        for i in 0..cycle.len() {
            owner.insert((cycle[i], cycle[(i + 1) % cycle.len()]), f);
        }
    }
    let mut adj = vec![Vec::new(); faces.len()];
    for (&(u, v), &f) in &owner {
        let h = owner[&(v, u)];
        if !adj[f].contains(&h) {
            adj[f].push(h);
        }
    }
    adj
}

pub fn is_connected(adjacency: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adjacency.len()];
    let mut q = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = q.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                q.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn dodecahedron() -> FullereneGraph {
    wind_spiral(&"20: 1 2 3 4 5 6 7 8 9 10 11 12".parse().unwrap()).unwrap()
}

pub fn buckminsterfullerene() -> FullereneGraph {
    wind_spiral(&"60: 1 7 9 11 13 15 18 20 22 24 26 32".parse().unwrap()).unwrap()
}

/// Reference volume rows: (N, isomers, distinct volumes, min, max); empty
/// classes carry NaN volumes. The N = 20 volume is printed to 5 decimals.
pub const TABLE1: [(usize, usize, usize, f64, f64); 23] = [
    (20, 1, 1, 4.30620, 4.30620),
    (22, 0, 0, f64::NAN, f64::NAN),
    (24, 1, 1, 6.023046, 6.023046),
    (26, 1, 1, 6.967011, 6.967011),
    (28, 2, 2, 7.869948, 8.000234),
    (30, 3, 3, 8.612415, 8.946606),
    (32, 6, 6, 9.677265, 9.977170),
    (34, 6, 6, 10.753476, 10.986057),
    (36, 15, 15, 11.537549, 12.084191),
    (38, 17, 17, 12.380366, 13.138893),
    (40, 40, 40, 12.918623, 14.222648),
    (42, 45, 44, 14.582147, 15.300168),
    (44, 89, 88, 15.084432, 16.397833),
    (46, 116, 116, 16.489809, 17.486616),
    (48, 199, 19, 17.034558, 18.617604),
    (50, 271, 270, 17.224830, 19.767011),
    (52, 437, 437, 18.866563, 20.880946),
    (54, 580, 576, 20.308384, 22.001239),
    (56, 924, 922, 20.492318, 23.142929),
    (58, 1205, 1205, 22.217458, 24.326618),
    (60, 1812, 1805, 21.531038, 25.558609),
    (62, 2385, 2376, 25.558609, 26.588511),
    (64, 3465, 3455, 24.362347, 27.763266),
];
