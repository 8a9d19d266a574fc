//! Face spirals: winding a pentagon/hexagon sequence into a fullerene,
//! unwinding an embedded fullerene from a start, and the canonical
//! (lexicographically minimal) spiral used as an isomorphism-invariant key.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use super::{DualGraph, FullereneGraph, GraphError};

/// Twelve 1-indexed pentagon positions among the `N/2 + 2` faces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpiralCode {
    n_vertices: usize,
    pentagons: [u16; 12],
}

impl SpiralCode {
    pub fn new(n_vertices: usize, pentagons: [u16; 12]) -> Result<Self, GraphError> {
        if n_vertices < 20 || n_vertices % 2 != 0 {
            return Err(GraphError::InvalidSpiral(format!(
                "vertex count {n_vertices} must be even and at least 20"
            )));
        }
        let f = (n_vertices / 2 + 2) as u16;
        if pentagons[0] < 1 || pentagons[11] > f {
            return Err(GraphError::InvalidSpiral(format!(
                "pentagon positions must lie in 1..={f}"
            )));
        }
        if pentagons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GraphError::InvalidSpiral(
                "pentagon positions must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            n_vertices,
            pentagons,
        })
    }

    pub fn from_face_sizes(sizes: &[u8]) -> Result<Self, GraphError> {
        let positions: Vec<u16> = sizes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 5)
            .map(|(i, _)| i as u16 + 1)
            .collect();
        let pentagons: [u16; 12] = positions.try_into().map_err(|p: Vec<u16>| {
            GraphError::InvalidSpiral(format!("{} pentagons, expected 12", p.len()))
        })?;
        Self::new(2 * sizes.len() - 4, pentagons)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_faces(&self) -> usize {
        self.n_vertices / 2 + 2
    }

    pub fn pentagons(&self) -> &[u16; 12] {
        &self.pentagons
    }

    pub fn face_sizes(&self) -> Vec<u8> {
        let mut sizes = vec![6u8; self.n_faces()];
        for &p in &self.pentagons {
            sizes[p as usize - 1] = 5;
        }
        sizes
    }

    /// Filesystem- and CSV-friendly key, e.g. `C20-1-2-3-4-5-6-7-8-9-10-11-12`.
    pub fn key(&self) -> String {
        let mut s = format!("C{}", self.n_vertices);
        for p in &self.pentagons {
            s.push('-');
            s.push_str(&p.to_string());
        }
        s
    }
}

impl fmt::Display for SpiralCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n_vertices)?;
        for p in &self.pentagons {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

impl FromStr for SpiralCode {
    type Err = GraphError;

    /// Parses `"N: p1 p2 ... p12"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| GraphError::InvalidSpiral(format!("{why} in {s:?}"));
        let (n, rest) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let n: usize = n.trim().parse().map_err(|_| bad("bad vertex count"))?;
        let positions = rest
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u16>().map_err(|_| bad("bad pentagon position")))
            .collect::<Result<Vec<_>, _>>()?;
        let pentagons: [u16; 12] = positions
            .try_into()
            .map_err(|_| bad("expected 12 pentagon positions"))?;
        Self::new(n, pentagons)
    }
}

/// Incremental spiral winder on the dual triangulation.
///
/// Face `k` is attached to the most recent face and to the oldest face of the
/// open boundary; saturated boundary faces are closed off as they appear.
#[derive(Debug, Clone)]
pub(crate) struct Winder {
    total: usize,
    open: Vec<i8>,
    adjacency: Vec<Vec<u16>>,
    boundary: VecDeque<u16>,
    triangles: Vec<[u16; 3]>,
    edges: Vec<(u16, u16)>,
}

impl Winder {
    pub(crate) fn new(total_faces: usize) -> Self {
        Self {
            total: total_faces,
            open: Vec::with_capacity(total_faces),
            adjacency: Vec::with_capacity(total_faces),
            boundary: VecDeque::with_capacity(total_faces),
            triangles: Vec::with_capacity(2 * total_faces),
            edges: Vec::with_capacity(3 * total_faces),
        }
    }

    pub(crate) fn placed(&self) -> usize {
        self.open.len()
    }

    pub(crate) fn edges(&self) -> &[(u16, u16)] {
        &self.edges
    }

    pub(crate) fn front(&self) -> Option<u16> {
        self.boundary.front().copied()
    }

    pub(crate) fn back(&self) -> Option<u16> {
        self.boundary.back().copied()
    }

    pub(crate) fn is_complete(&self) -> bool {
        self.placed() == self.total
    }

    fn connect(&mut self, a: u16, b: u16) -> Result<(), GraphError> {
        let (ai, bi) = (a as usize, b as usize);
        if a == b || self.open[ai] <= 0 || self.open[bi] <= 0 || self.adjacency[ai].contains(&b) {
            return Err(GraphError::SpiralDoesNotClose);
        }
        self.open[ai] -= 1;
        self.open[bi] -= 1;
        self.adjacency[ai].push(b);
        self.adjacency[bi].push(a);
        self.edges.push((a, b));
        Ok(())
    }

    /// Places the next face of the given size.
    pub(crate) fn add_face(&mut self, size: u8) -> Result<(), GraphError> {
        let k = self.open.len();
        if k >= self.total {
            return Err(GraphError::SpiralDoesNotClose);
        }
        self.open.push(size as i8);
        self.adjacency.push(Vec::with_capacity(size as usize));
        let kk = k as u16;
        match k {
            0 => {}
            1 => self.connect(0, 1)?,
            _ if k + 1 == self.total => return self.close(kk),
            _ => {
                let front = *self.boundary.front().unwrap();
                let back = *self.boundary.back().unwrap();
                self.connect(kk, back)?;
                self.connect(kk, front)?;
                self.triangles.push([front, back, kk]);
                loop {
                    let front = *self.boundary.front().unwrap();
                    let back = *self.boundary.back().unwrap();
                    if self.open[front as usize] == 0 {
                        self.boundary.pop_front();
                        let next = *self
                            .boundary
                            .front()
                            .ok_or(GraphError::SpiralDoesNotClose)?;
                        self.connect(kk, next)?;
                        self.triangles.push([front, kk, next]);
                    } else if self.open[back as usize] == 0 {
                        self.boundary.pop_back();
                        let prev = *self
                            .boundary
                            .back()
                            .ok_or(GraphError::SpiralDoesNotClose)?;
                        self.connect(kk, prev)?;
                        self.triangles.push([back, prev, kk]);
                    } else {
                        break;
                    }
                }
            }
        }
        if self.open[k] <= 0 {
            return Err(GraphError::SpiralDoesNotClose);
        }
        self.boundary.push_back(kk);
        Ok(())
    }

    fn close(&mut self, last: u16) -> Result<(), GraphError> {
        let ring: Vec<u16> = self.boundary.iter().copied().collect();
        if ring.len() != self.open[last as usize] as usize
            || ring.iter().any(|&x| self.open[x as usize] != 1)
        {
            return Err(GraphError::SpiralDoesNotClose);
        }
        for i in 0..ring.len() {
            self.connect(last, ring[i])?;
            self.triangles.push([ring[i], ring[(i + 1) % ring.len()], last]);
        }
        self.boundary.clear();
        if self.edges.len() != 3 * self.total - 6 {
            return Err(GraphError::SpiralDoesNotClose);
        }
        Ok(())
    }

    /// Primal cubic graph of the completed triangulation: one vertex per
    /// triangle, rotations induced from a coherent orientation.
    pub(crate) fn to_graph(&self, id: impl Into<String>) -> Result<FullereneGraph, GraphError> {
        if !self.is_complete() || !self.boundary.is_empty() {
            return Err(GraphError::SpiralDoesNotClose);
        }
        let rotation = primal_from_triangles(&self.triangles)?;
        FullereneGraph::from_rotation(id, rotation)
    }
}

fn primal_from_triangles(triangles: &[[u16; 3]]) -> Result<Vec<[usize; 3]>, GraphError> {
    let t = triangles.len();
    let key = |a: u16, b: u16| if a < b { (a, b) } else { (b, a) };
    let mut by_edge: HashMap<(u16, u16), Vec<usize>> = HashMap::with_capacity(3 * t / 2);
    for (i, tri) in triangles.iter().enumerate() {
        for j in 0..3 {
            by_edge
                .entry(key(tri[j], tri[(j + 1) % 3]))
                .or_default()
                .push(i);
        }
    }
    if by_edge.values().any(|v| v.len() != 2) {
        return Err(GraphError::SpiralDoesNotClose);
    }
    let across = |i: usize, a: u16, b: u16| -> usize {
        let pair = &by_edge[&key(a, b)];
        if pair[0] == i {
            pair[1]
        } else {
            pair[0]
        }
    };

    let mut oriented: Vec<Option<[u16; 3]>> = vec![None; t];
    oriented[0] = Some(triangles[0]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let tri = oriented[i].unwrap();
        for j in 0..3 {
            let (a, b) = (tri[j], tri[(j + 1) % 3]);
            let n = across(i, a, b);
            let other = triangles[n];
            let c = *other.iter().find(|&&x| x != a && x != b).unwrap();
            let want = [b, a, c];
            match oriented[n] {
                None => {
                    oriented[n] = Some(want);
                    queue.push_back(n);
                }
                Some(have) => {
                    if !same_cycle(&have, &want) {
                        return Err(GraphError::SpiralDoesNotClose);
                    }
                }
            }
        }
    }
    oriented
        .iter()
        .enumerate()
        .map(|(i, tri)| {
            let [a, b, c] = tri.ok_or(GraphError::SpiralDoesNotClose)?;
            Ok([across(i, a, b), across(i, b, c), across(i, c, a)])
        })
        .collect()
}

fn same_cycle(x: &[u16; 3], y: &[u16; 3]) -> bool {
    (0..3).any(|r| (0..3).all(|j| x[(j + r) % 3] == y[j]))
}

/// Winds a spiral into a fullerene graph. Failure to close is a normal
/// outcome reported as [`GraphError::SpiralDoesNotClose`].
pub fn wind_spiral(spiral: &SpiralCode) -> Result<FullereneGraph, GraphError> {
    let sizes = spiral.face_sizes();
    let mut w = Winder::new(sizes.len());
    for &s in &sizes {
        w.add_face(s)?;
    }
    let g = w.to_graph(spiral.to_string())?;
    if !g.validate().is_valid() {
        return Err(GraphError::SpiralDoesNotClose);
    }
    Ok(g)
}

pub(crate) enum Unwound {
    Spiral(Vec<u8>),
    Larger,
    NoSpiral,
}

/// Unwinds the dual starting with faces `first`, `second`, proceeding in
/// the given rotational sense. With `bound`, stops as soon as the pentagon
/// position sequence is known to be lexicographically larger.
pub(crate) fn unwind(
    dual: &DualGraph,
    first: usize,
    second: usize,
    forward: bool,
    bound: Option<&[u16; 12]>,
) -> Unwound {
    let f = dual.n_vertices();
    let mut order: Vec<usize> = Vec::with_capacity(f);
    let mut used = vec![false; f];
    let mut winder = Winder::new(f);
    let mut sizes = Vec::with_capacity(f);
    let mut pentagons = 0usize;
    let mut tie = true;

    for k in 0..f {
        let face = match k {
            0 => first,
            1 => second,
            _ if k + 1 == f => match used.iter().position(|u| !u) {
                Some(x) => x,
                None => return Unwound::NoSpiral,
            },
            _ => {
                let front = order[winder.front().unwrap() as usize];
                let back = order[winder.back().unwrap() as usize];
                match dual.next_around(front, back, forward) {
                    Some(x) => x,
                    None => return Unwound::NoSpiral,
                }
            }
        };
        if used[face] {
            return Unwound::NoSpiral;
        }
        used[face] = true;
        order.push(face);
        let size = dual.degree(face) as u8;
        sizes.push(size);

        if size == 5 {
            if let Some(b) = bound {
                if tie && pentagons < 12 {
                    let pos = k as u16 + 1;
                    if pos > b[pentagons] {
                        return Unwound::Larger;
                    }
                    if pos < b[pentagons] {
                        tie = false;
                    }
                }
            }
            pentagons += 1;
        } else if let Some(b) = bound {
            // a hexagon where the bound has a pentagon makes this spiral larger
            if tie && pentagons < 12 && b[pentagons] as usize == k + 1 {
                return Unwound::Larger;
            }
        }

        let before = winder.edges().len();
        if winder.add_face(size).is_err() {
            return Unwound::NoSpiral;
        }
        for &(a, b) in &winder.edges()[before..] {
            if !dual.are_adjacent(order[a as usize], order[b as usize]) {
                return Unwound::NoSpiral;
            }
        }
    }
    Unwound::Spiral(sizes)
}

/// Lexicographically minimal pentagon position vector over all spiral starts
/// (every ordered adjacent face pair, both rotational senses). `None` when
/// the graph has no face spiral at all.
pub fn canonical_spiral(g: &FullereneGraph) -> Option<SpiralCode> {
    let dual = g.dual();
    canonical_spiral_of_dual(&dual)
}

pub(crate) fn canonical_spiral_of_dual(dual: &DualGraph) -> Option<SpiralCode> {
    let mut best: Option<[u16; 12]> = None;
    // a pentagon start always beats a hexagon start, so hexagons are only
    // tried when no pentagon start winds
    for pentagon_starts in [true, false] {
        for first in 0..dual.n_vertices() {
            if (dual.degree(first) == 5) != pentagon_starts {
                continue;
            }
            for &second in dual.neighbors(first) {
                for forward in [true, false] {
                    if let Unwound::Spiral(sizes) =
                        unwind(dual, first, second, forward, best.as_ref())
                    {
                        let code = SpiralCode::from_face_sizes(&sizes).ok()?;
                        if best.map_or(true, |b| *code.pentagons() < b) {
                            best = Some(*code.pentagons());
                        }
                    }
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    best.map(|p| SpiralCode {
        n_vertices: 2 * dual.n_vertices() - 4,
        pentagons: p,
    })
}

/// True when no start yields a lexicographically smaller spiral than
/// `candidate`, i.e. `candidate` is the canonical spiral of `dual`.
pub(crate) fn is_canonical(dual: &DualGraph, candidate: &[u16; 12]) -> bool {
    let pentagons_only = candidate[0] == 1;
    for first in 0..dual.n_vertices() {
        if pentagons_only && dual.degree(first) != 5 {
            continue;
        }
        for &second in dual.neighbors(first) {
            for forward in [true, false] {
                if let Unwound::Spiral(sizes) = unwind(dual, first, second, forward, Some(candidate)) {
                    if let Ok(code) = SpiralCode::from_face_sizes(&sizes) {
                        if code.pentagons() < candidate {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::graph::is_isomorphic;

    fn spiral(n: usize, p: [u16; 12]) -> SpiralCode {
        SpiralCode::new(n, p).unwrap()
    }

    pub(crate) const C60_IH: [u16; 12] = [1, 7, 9, 11, 13, 15, 18, 20, 22, 24, 26, 32];

    #[test]
    fn all_pentagon_spiral_is_dodecahedron() {
        let g = wind_spiral(&spiral(20, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12])).unwrap();
        assert_eq!(g.n_vertices(), 20);
        assert!(is_isomorphic(&g, &fixtures::dodecahedron()));
    }

    #[test]
    fn buckminsterfullerene_winds() {
        let g = wind_spiral(&spiral(60, C60_IH)).unwrap();
        assert_eq!(g.n_faces(), 32);
        assert_eq!(g.face_sizes().iter().filter(|&&s| s == 6).count(), 20);
        let dual = g.dual();
        // isolated pentagons
        for v in 0..dual.n_vertices() {
            if dual.degree(v) == 5 {
                assert!(dual.neighbors(v).iter().all(|&w| dual.degree(w) == 6));
            }
        }
    }

    #[test]
    fn non_closing_spiral_fails() {
        let s = spiral(24, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 14]);
        assert_eq!(wind_spiral(&s).unwrap_err(), GraphError::SpiralDoesNotClose);
    }

    #[test]
    fn canonical_spiral_of_dodecahedron() {
        let c = canonical_spiral(&fixtures::dodecahedron()).unwrap();
        assert_eq!(c.pentagons(), &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]);
    }

    #[test]
    fn canonical_spiral_of_c60_is_known_one() {
        let g = wind_spiral(&spiral(60, C60_IH)).unwrap();
        assert_eq!(canonical_spiral(&g).unwrap().pentagons(), &C60_IH);
        assert_eq!(canonical_spiral(&g.mirror()).unwrap().pentagons(), &C60_IH);
    }

    #[test]
    fn spiral_text_round_trip() {
        let s = spiral(60, C60_IH);
        let text = s.to_string();
        assert_eq!(text, "60: 1 7 9 11 13 15 18 20 22 24 26 32");
        assert_eq!(text.parse::<SpiralCode>().unwrap(), s);
    }

    #[test]
    fn malformed_spirals_are_rejected() {
        assert!("60: 1 2 3".parse::<SpiralCode>().is_err());
        assert!("20 1 2 3 4 5 6 7 8 9 10 11 12".parse::<SpiralCode>().is_err());
        assert!(SpiralCode::new(20, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 11]).is_err());
        assert!(SpiralCode::new(20, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 13]).is_err());
    }
}
