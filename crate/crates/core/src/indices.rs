//! Distance-based and neighbour-signature topological indices.
//!
//! Pair sums (W, WW, W5) run over unordered pairs. With that convention
//! `WW = sum (d + d^2) / 2` and `W5 = sum d*^2` are always integers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bfs_distances, DualGraph, FullereneGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),
    #[error("independence search exceeded its budget of {0} nodes")]
    BudgetExceeded(u64),
    #[error("exact independence number supports at most 128 vertices, got {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexVector {
    pub n_vertices: usize,
    pub wiener: u64,
    pub hyper_wiener: u64,
    pub w5: u64,
    pub np: u32,
    pub h5: u32,
    pub h6: u32,
    pub p_signature: [u32; 6],
    pub h_signature: [u32; 7],
    pub transmissions: Vec<u64>,
    pub wiener_complexity: usize,
    pub independence_lower_bound: f64,
}

impl IndexVector {
    pub fn compute(g: &FullereneGraph) -> Result<Self, IndexError> {
        let dual = g.dual();
        let tr = transmissions(g)?;
        let p = pentagon_signature(&dual);
        let h = hexagon_signature(&dual);
        Ok(Self {
            n_vertices: g.n_vertices(),
            wiener: tr.iter().sum::<u64>() / 2,
            hyper_wiener: hyper_wiener(g)?,
            w5: w5(&dual)?,
            np: np_index(&p),
            h5: h5(&p),
            h6: h6(&h),
            p_signature: p,
            h_signature: h,
            wiener_complexity: wiener_complexity(&tr),
            transmissions: tr,
            independence_lower_bound: independence_lower_bound(g.n_vertices()),
        })
    }

    pub fn is_ipr(&self) -> bool {
        self.np == 0
    }
}

fn distance_rows(adjacency: &[Vec<usize>]) -> Result<Vec<Vec<u32>>, IndexError> {
    (0..adjacency.len())
        .map(|s| {
            bfs_distances(adjacency, s)
                .into_iter()
                .enumerate()
                .map(|(v, d)| d.ok_or(IndexError::Disconnected(v)))
                .collect()
        })
        .collect()
}

/// `tr(u)`: sum of distances from `u` to every other vertex.
pub fn transmissions(g: &FullereneGraph) -> Result<Vec<u64>, IndexError> {
    transmissions_of(&g.adjacency())
}

pub fn transmissions_of(adjacency: &[Vec<usize>]) -> Result<Vec<u64>, IndexError> {
    Ok(distance_rows(adjacency)?
        .iter()
        .map(|row| row.iter().map(|&d| d as u64).sum())
        .collect())
}

/// Number of distinct transmissions.
pub fn wiener_complexity(transmissions: &[u64]) -> usize {
    let mut t = transmissions.to_vec();
    t.sort_unstable();
    t.dedup();
    t.len()
}

pub fn wiener(g: &FullereneGraph) -> Result<u64, IndexError> {
    wiener_of(&g.adjacency())
}

pub fn wiener_of(adjacency: &[Vec<usize>]) -> Result<u64, IndexError> {
    Ok(transmissions_of(adjacency)?.iter().sum::<u64>() / 2)
}

pub fn hyper_wiener(g: &FullereneGraph) -> Result<u64, IndexError> {
    hyper_wiener_of(&g.adjacency())
}

/// Unordered-pair sum of `(d + d^2) / 2`.
pub fn hyper_wiener_of(adjacency: &[Vec<usize>]) -> Result<u64, IndexError> {
    let rows = distance_rows(adjacency)?;
    let ordered: u64 = rows
        .iter()
        .flatten()
        .map(|&d| (d as u64) * (d as u64 + 1) / 2)
        .sum();
    Ok(ordered / 2)
}

/// Unordered-pair sum of squared dual distances between pentagons.
pub fn w5(dual: &DualGraph) -> Result<u64, IndexError> {
    let degrees = dual.degrees();
    let mut total = 0u64;
    for (s, _) in degrees.iter().enumerate().filter(|(_, &k)| k == 5) {
        let dist = bfs_distances(dual.adjacency(), s);
        for (t, &k) in degrees.iter().enumerate() {
            if k == 5 && t > s {
                let d = dist[t].ok_or(IndexError::Disconnected(t))? as u64;
                total += d * d;
            }
        }
    }
    Ok(total)
}

fn signature<const K: usize>(dual: &DualGraph, size: usize) -> [u32; K] {
    let mut sig = [0u32; K];
    for v in (0..dual.n_vertices()).filter(|&v| dual.degree(v) == size) {
        let k = dual
            .neighbors(v)
            .iter()
            .filter(|&&w| dual.degree(w) == size)
            .count();
        sig[k.min(K - 1)] += 1;
    }
    sig
}

/// `p_k`: number of pentagons with exactly `k` pentagonal neighbours.
pub fn pentagon_signature(dual: &DualGraph) -> [u32; 6] {
    signature(dual, 5)
}

/// `h_k`: number of hexagons with exactly `k` hexagonal neighbours.
pub fn hexagon_signature(dual: &DualGraph) -> [u32; 7] {
    signature(dual, 6)
}

/// Number of adjacent pentagon pairs.
pub fn np_index(p: &[u32; 6]) -> u32 {
    p.iter().enumerate().map(|(k, &c)| k as u32 * c).sum::<u32>() / 2
}

pub fn h5(p: &[u32; 6]) -> u32 {
    p.iter().enumerate().map(|(k, &c)| (k * k) as u32 * c).sum()
}

pub fn h6(h: &[u32; 7]) -> u32 {
    h.iter().enumerate().map(|(k, &c)| (k * k) as u32 * c).sum()
}

/// Lower bound `N/2 - sqrt(3N/5)` on the independence number of a fullerene.
pub fn independence_lower_bound(n: usize) -> f64 {
    let n = n as f64;
    n / 2.0 - (3.0 * n / 5.0).sqrt()
}

/// Exact independence number by branch and bound on bitsets.
pub fn exact_independence(g: &FullereneGraph, budget: u64) -> Result<u32, IndexError> {
    let n = g.n_vertices();
    if n > 128 {
        return Err(IndexError::TooLarge(n));
    }
    let nbr: Vec<u128> = g
        .rotation()
        .iter()
        .map(|nb| nb.iter().fold(0u128, |m, &w| m | (1u128 << w)))
        .collect();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut search = Mis {
        nbr,
        best: 0,
        nodes: 0,
        budget,
    };
    search.run(all, 0)?;
    Ok(search.best)
}

struct Mis {
    nbr: Vec<u128>,
    best: u32,
    nodes: u64,
    budget: u64,
}

impl Mis {
    fn run(&mut self, mut alive: u128, mut size: u32) -> Result<(), IndexError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(IndexError::BudgetExceeded(self.budget));
        }
        // vertices of degree <= 1 can always be taken
        loop {
            let mut taken = false;
            let mut rest = alive;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if (self.nbr[v] & alive).count_ones() <= 1 {
                    alive &= !(self.nbr[v] | (1u128 << v));
                    rest &= alive;
                    size += 1;
                    taken = true;
                }
            }
            if !taken {
                break;
            }
        }
        if alive == 0 {
            self.best = self.best.max(size);
            return Ok(());
        }
        // min degree 2, max degree 3: an independent set I sends 2|I| edges
        // into the rest, which absorbs at most 3 each, so |I| <= 3n/5
        let remaining = alive.count_ones();
        if size + 3 * remaining / 5 <= self.best {
            return Ok(());
        }
        let mut pivot = alive.trailing_zeros() as usize;
        let mut pivot_deg = 0;
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.nbr[v] & alive).count_ones();
            if d > pivot_deg {
                pivot = v;
                pivot_deg = d;
            }
        }
        self.run(alive & !(self.nbr[pivot] | (1u128 << pivot)), size + 1)?;
        self.run(alive & !(1u128 << pivot), size)
    }
}
