//! Isomer enumeration by face spirals.
//!
//! Every sequence with twelve pentagons is wound depth-first (pruning as soon
//! as a partial winding fails) and kept only if it is the canonical spiral of
//! the graph it produces. Spiral enumeration is complete for all fullerenes
//! below 380 vertices, far beyond the supported range here.

use rayon::prelude::*;

use super::spiral::{is_canonical, Winder};
use super::{FullereneGraph, GraphError, SpiralCode};

pub const MAX_ENUMERATION_ORDER: usize = 70;

// prefix depth at which the search tree is split across worker threads
const SPLIT_DEPTH: usize = 10;

fn check_order(n: usize) -> Result<(), GraphError> {
    if n < 20 || n > MAX_ENUMERATION_ORDER || n % 2 != 0 {
        return Err(GraphError::UnsupportedOrder(n));
    }
    Ok(())
}

#[derive(Clone)]
struct Partial {
    winder: Winder,
    sizes: Vec<u8>,
    pentagons: usize,
}

impl Partial {
    fn new(f: usize) -> Self {
        Self {
            winder: Winder::new(f),
            sizes: Vec::with_capacity(f),
            pentagons: 0,
        }
    }

    fn extend(&self, size: u8, f: usize) -> Option<Partial> {
        let k = self.sizes.len();
        let pentagons = self.pentagons + usize::from(size == 5);
        let hexagons = k + 1 - pentagons;
        // the canonical spiral starts on a pentagon
        if (k == 0 && size != 5) || pentagons > 12 || hexagons > f - 12 {
            return None;
        }
        let mut next = self.clone();
        next.winder.add_face(size).ok()?;
        next.sizes.push(size);
        next.pentagons = pentagons;
        Some(next)
    }

    fn leaf(&self) -> Option<SpiralCode> {
        let code = SpiralCode::from_face_sizes(&self.sizes).ok()?;
        let graph = self.winder.to_graph(code.to_string()).ok()?;
        if !graph.validate().is_valid() {
            return None;
        }
        is_canonical(&graph.dual(), code.pentagons()).then_some(code)
    }
}

fn search(p: Partial, f: usize, out: &mut Vec<SpiralCode>, limit: Option<usize>) -> bool {
    if limit.is_some_and(|l| out.len() >= l) {
        return true;
    }
    if p.sizes.len() == f {
        if let Some(code) = p.leaf() {
            out.push(code);
        }
        return limit.is_some_and(|l| out.len() >= l);
    }
    for size in [5u8, 6] {
        if let Some(child) = p.extend(size, f) {
            if search(child, f, out, limit) {
                return true;
            }
        }
    }
    false
}

/// Canonical spirals of all isomers with `n` vertices, in lexicographic
/// order. With a `limit`, the search stops after that many (the smallest
/// ones, since depth-first order with pentagons first is lexicographic).
pub fn enumerate_spirals(n: usize, limit: Option<usize>) -> Result<Vec<SpiralCode>, GraphError> {
    check_order(n)?;
    let f = n / 2 + 2;
    if limit.is_some() {
        let mut out = Vec::new();
        search(Partial::new(f), f, &mut out, limit);
        return Ok(out);
    }

    let mut frontier = vec![Partial::new(f)];
    for _ in 0..SPLIT_DEPTH.min(f) {
        frontier = frontier
            .iter()
            .flat_map(|p| [5u8, 6].into_iter().filter_map(move |s| p.extend(s, f)))
            .collect();
    }
    let mut out: Vec<SpiralCode> = frontier
        .into_par_iter()
        .flat_map_iter(|p| {
            let mut local = Vec::new();
            search(p, f, &mut local, None);
            local
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// One graph per isomorphism class, ids set to the canonical spiral text.
pub fn enumerate_isomers(n: usize, limit: Option<usize>) -> Result<Vec<FullereneGraph>, GraphError> {
    enumerate_spirals(n, limit)?
        .iter()
        .map(super::wind_spiral)
        .collect()
}
