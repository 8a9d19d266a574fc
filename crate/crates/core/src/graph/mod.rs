//! Cubic plane graphs stored as rotation systems, together with face
//! tracing, dual construction and the fullerene validity checks.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

pub mod enumerate;
pub mod nanotube;
pub mod planar_code;
pub mod spiral;

pub use enumerate::{enumerate_isomers, MAX_ENUMERATION_ORDER};
pub use nanotube::nanotube_a;
pub use planar_code::{parse_planar_code, write_planar_code};
pub use spiral::{canonical_spiral, wind_spiral, SpiralCode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid vertex count {0}: fullerenes have 20 or an even number >= 24 of vertices (odd/invalid vertex count)")]
    VertexCount(usize),
    #[error("planar code truncated at byte {offset} (graph {graph})")]
    Truncated { graph: usize, offset: usize },
    #[error("graph {graph}: vertex {vertex} lists neighbour {neighbour}, out of range 1..={n}")]
    VertexOutOfRange {
        graph: usize,
        vertex: usize,
        neighbour: usize,
        n: usize,
    },
    #[error("graph {graph}: vertex {vertex} has degree {degree}, expected 3")]
    Degree {
        graph: usize,
        vertex: usize,
        degree: usize,
    },
    #[error("unsupported planar code header (only the single-octet >>planar_code<< format is read)")]
    Header,
    #[error("inconsistent rotation system: {0}")]
    Inconsistent(String),
    #[error("face tracing did not close starting from directed edge {0}->{1}")]
    Unclosed(usize, usize),
    #[error("spiral does not close")]
    SpiralDoesNotClose,
    #[error("invalid spiral: {0}")]
    InvalidSpiral(String),
    #[error("vertex count {0} is outside the supported enumeration range (20, or even 22..=70)")]
    UnsupportedOrder(usize),
    #[error("nanotube stack count must be at least 1, got {0}")]
    StackCount(usize),
}

/// A cubic graph embedded in the sphere.
///
/// Neighbour triples are read as counterclockwise rotations seen from
/// outside the polyhedron. Construction only checks that the rotation system
/// is a consistent simple cubic graph; use [`FullereneGraph::validate`] for
/// the fullerene conditions.
#[derive(Debug, Clone)]
pub struct FullereneGraph {
    id: String,
    rotation: Vec<[usize; 3]>,
    faces: Vec<Vec<usize>>,
    // edge_face[v][i]: face traced through the directed edge v -> rotation[v][i]
    edge_face: Vec<[usize; 3]>,
}

impl FullereneGraph {
    pub fn from_rotation(
        id: impl Into<String>,
        rotation: Vec<[usize; 3]>,
    ) -> Result<Self, GraphError> {
        check_rotation(&rotation)?;
        let faces = trace_faces(&rotation)?;
        let edge_face = edge_faces(&rotation, &faces);
        Ok(Self {
            id: id.into(),
            rotation,
            faces,
            edge_face,
        })
    }

    /// Assembles a graph without any consistency checks. Intended for
    /// feeding deliberately broken data to [`FullereneGraph::validate`].
    pub fn from_raw_parts(
        id: impl Into<String>,
        rotation: Vec<[usize; 3]>,
        faces: Vec<Vec<usize>>,
    ) -> Self {
        let edge_face = edge_faces(&rotation, &faces);
        Self {
            id: id.into(),
            rotation,
            faces,
            edge_face,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn n_vertices(&self) -> usize {
        self.rotation.len()
    }

    pub fn n_edges(&self) -> usize {
        3 * self.rotation.len() / 2
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn rotation(&self) -> &[[usize; 3]] {
        &self.rotation
    }

    pub fn neighbors(&self, v: usize) -> &[usize; 3] {
        &self.rotation[v]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face_sizes(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    /// Undirected edges `(u, v)` with `u < v`, in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rotation
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// The three faces around vertex `v`, in rotation order.
    pub fn vertex_faces(&self, v: usize) -> [usize; 3] {
        self.edge_face[v]
    }

    /// Face traced through the directed edge `u -> v`.
    pub fn face_of_directed_edge(&self, u: usize, v: usize) -> Option<usize> {
        let slot = self.rotation[u].iter().position(|&w| w == v)?;
        Some(self.edge_face[u][slot])
    }

    /// Plain adjacency lists (rotation order), convenient for BFS.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.rotation.iter().map(|nb| nb.to_vec()).collect()
    }

    /// Same graph with every rotation reversed.
    pub fn mirror(&self) -> Self {
        let rotation = self
            .rotation
            .iter()
            .map(|&[a, b, c]| [a, c, b])
            .collect::<Vec<_>>();
        Self::from_rotation(format!("{}~mirror", self.id), rotation)
            .expect("mirror of a consistent rotation system is consistent")
    }

    pub fn validate(&self) -> ValidationReport {
        validate_fullerene(self)
    }

    pub fn dual(&self) -> DualGraph {
        build_dual(self)
    }

    pub fn is_isomorphic(&self, other: &FullereneGraph) -> bool {
        is_isomorphic(self, other)
    }
}

fn check_rotation(rotation: &[[usize; 3]]) -> Result<(), GraphError> {
    let n = rotation.len();
    for (u, nb) in rotation.iter().enumerate() {
        for (i, &v) in nb.iter().enumerate() {
            if v >= n {
                return Err(GraphError::Inconsistent(format!(
                    "vertex {u} has neighbour {v} but there are {n} vertices"
                )));
            }
            if v == u {
                return Err(GraphError::Inconsistent(format!("loop at vertex {u}")));
            }
            if nb[..i].contains(&v) {
                return Err(GraphError::Inconsistent(format!(
                    "multiple edge between {u} and {v}"
                )));
            }
            if !rotation[v].contains(&u) {
                return Err(GraphError::Inconsistent(format!(
                    "{u} lists {v} as a neighbour but {v} does not list {u}"
                )));
            }
        }
    }
    Ok(())
}

/// Traces the faces of a rotation system.
///
/// The successor of the directed edge `u -> v` is `v -> w`, where `w` is the
/// neighbour following `u` clockwise around `v`. Faces are emitted in the
/// order of their smallest directed edge `(vertex, slot)`.
pub fn trace_faces(rotation: &[[usize; 3]]) -> Result<Vec<Vec<usize>>, GraphError> {
    let n = rotation.len();
    let mut seen = vec![[false; 3]; n];
    let mut faces = Vec::new();
    for u0 in 0..n {
        for s0 in 0..3 {
            if seen[u0][s0] {
                continue;
            }
            let mut face = Vec::new();
            let (mut u, mut s) = (u0, s0);
            loop {
                if seen[u][s] {
                    return Err(GraphError::Unclosed(u0, rotation[u0][s0]));
                }
                seen[u][s] = true;
                face.push(u);
                let v = rotation[u][s];
                let back = rotation[v]
                    .iter()
                    .position(|&w| w == u)
                    .ok_or_else(|| {
                        GraphError::Inconsistent(format!("{v} does not list {u}"))
                    })?;
                let next = (back + 2) % 3;
                u = v;
                s = next;
                if u == u0 && s == s0 {
                    break;
                }
                if face.len() > 3 * n {
                    return Err(GraphError::Unclosed(u0, rotation[u0][s0]));
                }
            }
            faces.push(face);
        }
    }
    Ok(faces)
}

fn edge_faces(rotation: &[[usize; 3]], faces: &[Vec<usize>]) -> Vec<[usize; 3]> {
    let mut out = vec![[usize::MAX; 3]; rotation.len()];
    for (fi, face) in faces.iter().enumerate() {
        let k = face.len();
        for i in 0..k {
            let (u, v) = (face[i], face[(i + 1) % k]);
            if let Some(slot) = rotation.get(u).and_then(|nb| nb.iter().position(|&w| w == v)) {
                out[u][slot] = fi;
            }
        }
    }
    out
}

/// Outcome of one validity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub graph_id: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<14} {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// Checks the fullerene conditions: cubic simple graph, admissible order,
/// faces covering each directed edge once, Euler count, face sizes 5/6 and
/// exactly twelve pentagons.
///
/// Cyclic 5-connectivity is not re-checked; it follows for every fullerene.
pub fn validate_fullerene(g: &FullereneGraph) -> ValidationReport {
    let n = g.n_vertices();
    let mut checks = Vec::new();

    let cubic = check_rotation(g.rotation());
    checks.push(Check {
        name: "cubic",
        passed: cubic.is_ok(),
        detail: match cubic {
            Ok(()) => "simple 3-regular rotation system".into(),
            Err(e) => e.to_string(),
        },
    });

    let order_ok = n == 20 || (n >= 24 && n % 2 == 0);
    checks.push(Check {
        name: "vertex count",
        passed: order_ok,
        detail: format!("N = {n}"),
    });

    let mut cover = vec![[0u32; 3]; n];
    let mut stray = false;
    for face in g.faces() {
        let k = face.len();
        for i in 0..k {
            let (u, v) = (face[i], face[(i + 1) % k]);
            match g
                .rotation()
                .get(u)
                .and_then(|nb| nb.iter().position(|&w| w == v))
            {
                Some(slot) => cover[u][slot] += 1,
                None => stray = true,
            }
        }
    }
    let closes = !stray && cover.iter().flatten().all(|&c| c == 1);
    checks.push(Check {
        name: "face tracing",
        passed: closes,
        detail: if closes {
            "every directed edge lies in exactly one face".into()
        } else {
            "faces do not partition the directed edges".into()
        },
    });

    let f = g.n_faces();
    let euler = 2 * f == n + 4;
    checks.push(Check {
        name: "euler",
        passed: euler,
        detail: format!("{f} faces, expected N/2 + 2 = {}", n / 2 + 2),
    });

    let bad_face = g.faces().iter().map(Vec::len).find(|&s| s != 5 && s != 6);
    checks.push(Check {
        name: "face sizes",
        passed: bad_face.is_none(),
        detail: match bad_face {
            None => "all faces are pentagons or hexagons".into(),
            Some(s) => format!("face of size {s}"),
        },
    });

    let pentagons = g.faces().iter().filter(|f| f.len() == 5).count();
    checks.push(Check {
        name: "pentagons",
        passed: pentagons == 12,
        detail: format!("{pentagons} pentagonal faces, expected 12"),
    });

    ValidationReport {
        graph_id: g.id().to_string(),
        checks,
    }
}

/// Dual of an embedded cubic graph: one vertex per face, neighbours listed
/// in the cyclic order of the face boundary.
#[derive(Debug, Clone)]
pub struct DualGraph {
    rotation: Vec<Vec<usize>>,
}

impl DualGraph {
    pub fn from_rotation(rotation: Vec<Vec<usize>>) -> Self {
        Self { rotation }
    }

    pub fn n_vertices(&self) -> usize {
        self.rotation.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.rotation.iter().map(Vec::len).collect()
    }

    pub fn n_edges(&self) -> usize {
        self.rotation.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.rotation[a].contains(&b)
    }

    /// True when no two faces share more than one edge.
    pub fn is_simple(&self) -> bool {
        self.rotation.iter().enumerate().all(|(v, nb)| {
            nb.iter()
                .enumerate()
                .all(|(i, &w)| w != v && !nb[..i].contains(&w))
        })
    }

    /// Neighbour of `a` that follows `b` in `a`'s rotation (`dir = +1`) or
    /// precedes it (`dir = -1`).
    pub fn next_around(&self, a: usize, b: usize, forward: bool) -> Option<usize> {
        let nb = &self.rotation[a];
        let k = nb.len();
        let i = nb.iter().position(|&w| w == b)?;
        Some(if forward { nb[(i + 1) % k] } else { nb[(i + k - 1) % k] })
    }
}

pub fn build_dual(g: &FullereneGraph) -> DualGraph {
    let rotation = g
        .faces()
        .iter()
        .map(|face| {
            let k = face.len();
            (0..k)
                .map(|i| {
                    let (u, v) = (face[i], face[(i + 1) % k]);
                    g.face_of_directed_edge(v, u)
                        .expect("reverse edge lies in some face")
                })
                .collect()
        })
        .collect();
    DualGraph { rotation }
}

/// Breadth-first distances from `source`; `None` for unreachable vertices.
pub fn bfs_distances(adjacency: &[Vec<usize>], source: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adjacency.len()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &w in &adjacency[u] {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Canonical code of the embedding: minimum over all starting directed
/// edges and both orientations of the BFS relabelled rotation system.
/// Two graphs have equal codes iff their embeddings are isomorphic up to
/// reflection.
pub fn canonical_rotation_code(g: &FullereneGraph) -> Vec<u32> {
    let n = g.n_vertices();
    let mut best: Option<Vec<u32>> = None;
    let mut label = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut code = Vec::with_capacity(3 * n);
    for u0 in 0..n {
        for &v0 in g.neighbors(u0) {
            for forward in [true, false] {
                label.fill(u32::MAX);
                code.clear();
                queue.clear();
                label[u0] = 0;
                parent[u0] = v0;
                let mut next = 1u32;
                queue.push_back(u0);
                let mut worse = false;
                while let Some(x) = queue.pop_front() {
                    let nb = g.neighbors(x);
                    let start = nb.iter().position(|&w| w == parent[x]).unwrap();
                    for step in 0..3 {
                        let i = if forward { (start + step) % 3 } else { (start + 3 - step) % 3 };
                        let y = nb[i];
                        if label[y] == u32::MAX {
                            label[y] = next;
                            next += 1;
                            parent[y] = x;
                            queue.push_back(y);
                        }
                        code.push(label[y]);
                        if let Some(b) = &best {
                            let k = code.len() - 1;
                            if !worse {
                                match code[k].cmp(&b[k]) {
                                    std::cmp::Ordering::Greater if code[..k] == b[..k] => {
                                        worse = true;
                                    }
                                    _ => {}
                                }
                            }
                        }
                    }
                    if worse {
                        break;
                    }
                }
                if worse {
                    continue;
                }
                if best.as_ref().map_or(true, |b| code < *b) {
                    best = Some(code.clone());
                }
            }
        }
    }
    best.unwrap_or_default()
}

/// Isomorphism of embedded graphs, mirror images identified.
pub fn is_isomorphic(g1: &FullereneGraph, g2: &FullereneGraph) -> bool {
    g1.n_vertices() == g2.n_vertices()
        && g1.face_sizes().iter().filter(|&&s| s == 5).count()
            == g2.face_sizes().iter().filter(|&&s| s == 5).count()
        && canonical_rotation_code(g1) == canonical_rotation_code(g2)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::FullereneGraph;

    /// Dodecahedron drawn as an outer pentagon `o`, a ten-cycle `m` and an
    /// inner pentagon `i`; rotations are counterclockwise in that drawing.
    pub fn dodecahedron() -> FullereneGraph {
        let o = |i: usize| i % 5;
        let m = |j: usize| 5 + j % 10;
        let inner = |i: usize| 15 + i % 5;
        let mut rot = vec![[0usize; 3]; 20];
        for i in 0..5 {
            rot[o(i)] = [o(i + 1), m(2 * i), o(i + 4)];
            rot[m(2 * i)] = [o(i), m(2 * i + 1), m(2 * i + 9)];
            rot[m(2 * i + 1)] = [m(2 * i + 2), inner(i), m(2 * i)];
            rot[inner(i)] = [m(2 * i + 1), inner(i + 1), inner(i + 4)];
        }
        FullereneGraph::from_rotation("dodecahedron", rot).unwrap()
    }

    /// Cube graph (3-regular, quadrilateral faces).
    pub fn cube() -> FullereneGraph {
        // bottom 0..4 counterclockwise, top 4..8
        let rot = vec![
            [3, 4, 1],
            [0, 5, 2],
            [1, 6, 3],
            [2, 7, 0],
            [0, 7, 5],
            [1, 4, 6],
            [2, 5, 7],
            [3, 6, 4],
        ];
        FullereneGraph::from_rotation("cube", rot).unwrap()
    }
}
