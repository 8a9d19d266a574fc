//! Levenberg-Marquardt on the Gram equations, continued from the initial
//! Gram values of adjacent faces down to zero.

use nalgebra::{DMatrix, DVector};

use super::MinkowskiVector;

pub(crate) struct GramSystem {
    n_faces: usize,
    pairs: Vec<(usize, usize)>,
}

pub(crate) struct Outcome {
    pub normals: Vec<MinkowskiVector>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

// intermediate homotopy stages only need to stay near the path
const STAGE_TOLERANCE: f64 = 1e-7;
const MIN_STEP: f64 = 1.0 / 1024.0;

impl GramSystem {
    pub fn new(n_faces: usize, pairs: Vec<(usize, usize)>) -> Self {
        Self { n_faces, pairs }
    }

    fn residual(&self, x: &[MinkowskiVector], targets: &[f64]) -> DVector<f64> {
        let mut r = DVector::zeros(self.n_faces + self.pairs.len());
        for (i, e) in x.iter().enumerate() {
            r[i] = e.norm_sq() - 1.0;
        }
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            r[self.n_faces + k] = x[i].inner(x[j]) - targets[k];
        }
        r
    }

    fn jacobian(&self, x: &[MinkowskiVector]) -> DMatrix<f64> {
        let eta = |e: MinkowskiVector| [e.x1, e.x2, e.x3, -e.x4];
        let mut jac = DMatrix::zeros(self.n_faces + self.pairs.len(), 4 * self.n_faces);
        for (i, &e) in x.iter().enumerate() {
            for (c, v) in eta(e).into_iter().enumerate() {
                jac[(i, 4 * i + c)] = 2.0 * v;
            }
        }
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let row = self.n_faces + k;
            for c in 0..4 {
                jac[(row, 4 * i + c)] = eta(x[j])[c];
                jac[(row, 4 * j + c)] = eta(x[i])[c];
            }
        }
        jac
    }

    pub fn adjacent_gram(&self, x: &[MinkowskiVector]) -> Vec<f64> {
        self.pairs.iter().map(|&(i, j)| x[i].inner(x[j])).collect()
    }

    /// Damped minimum-norm Gauss-Newton steps. The system is
    /// underdetermined by the six-dimensional isometry group, so each step
    /// is `J^T (J J^T + λI)^{-1} (-r)`.
    fn newton(
        &self,
        x: &mut Vec<MinkowskiVector>,
        targets: &[f64],
        tol: f64,
        max_iter: usize,
    ) -> (f64, usize) {
        let mut r = self.residual(x, targets);
        let mut lambda = 1e-10;
        let mut it = 0;
        while it < max_iter && r.amax() > tol {
            it += 1;
            let jac = self.jacobian(x);
            let mut jjt = &jac * jac.transpose();
            let base = r.norm();
            loop {
                for d in 0..jjt.nrows() {
                    jjt[(d, d)] += lambda;
                }
                let step = jjt
                    .clone()
                    .cholesky()
                    .map(|ch| jac.transpose() * ch.solve(&(-&r)));
                for d in 0..jjt.nrows() {
                    jjt[(d, d)] -= lambda;
                }
                if let Some(step) = step {
                    let trial: Vec<MinkowskiVector> = x
                        .iter()
                        .enumerate()
                        .map(|(i, e)| {
                            *e + MinkowskiVector::new(
                                step[4 * i],
                                step[4 * i + 1],
                                step[4 * i + 2],
                                step[4 * i + 3],
                            )
                        })
                        .collect();
                    let rt = self.residual(&trial, targets);
                    if rt.norm() < base {
                        *x = trial;
                        r = rt;
                        lambda = (lambda * 0.1).max(1e-14);
                        break;
                    }
                }
                lambda *= 10.0;
                if lambda > 1e8 {
                    return (r.amax(), it);
                }
            }
        }
        (r.amax(), it)
    }

    /// A few Newton steps on the right-angled system.
    pub fn polish(&self, mut x: Vec<MinkowskiVector>, tol: f64) -> (Vec<MinkowskiVector>, f64) {
        let targets = vec![0.0; self.pairs.len()];
        let (res, _) = self.newton(&mut x, &targets, tol, 10);
        (x, res)
    }

    /// Continuation from the Gram values of `x` to the right-angled system.
    pub fn solve(
        &self,
        mut x: Vec<MinkowskiVector>,
        steps: usize,
        tol: f64,
        max_iterations: usize,
    ) -> Outcome {
        let start = self.adjacent_gram(&x);
        let stage_budget = (max_iterations / (steps.max(1) + 1)).max(10);
        let mut total = 0;
        let mut s = 0.0;
        let mut h = 1.0 / steps.max(1) as f64;
        while total < max_iterations {
            let next = (s + h).min(1.0);
            let last = next >= 1.0;
            let targets: Vec<f64> = start.iter().map(|g| g * (1.0 - next)).collect();
            let mut trial = x.clone();
            let stage_tol = if last { tol } else { STAGE_TOLERANCE };
            let (res, it) = self.newton(&mut trial, &targets, stage_tol, stage_budget);
            total += it;
            if res <= stage_tol {
                x = trial;
                s = next;
                if last {
                    return Outcome {
                        normals: x,
                        residual: res,
                        iterations: total,
                        converged: true,
                    };
                }
                h *= 1.5;
            } else {
                h *= 0.5;
                if h < MIN_STEP {
                    break;
                }
            }
        }
        let fin = self.residual(&x, &vec![0.0; start.len()]).amax();
        Outcome {
            normals: x,
            residual: fin,
            iterations: total,
            converged: false,
        }
    }
}
