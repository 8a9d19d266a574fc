//! Reader and writer for the single-octet `planar_code` binary format:
//! an optional `>>planar_code<<` header, then per graph the vertex count
//! followed by each vertex's 1-based neighbours in rotation order, each list
//! terminated by a zero octet.

use super::{FullereneGraph, GraphError};

pub const HEADER: &[u8; 15] = b">>planar_code<<";

/// Parses every graph in the stream. Graph ids are `"{source}#{index}"`
/// with 1-based indices; rotations are kept exactly as stored.
pub fn parse_planar_code(bytes: &[u8], source: &str) -> Result<Vec<FullereneGraph>, GraphError> {
    let mut pos = 0;
    if bytes.starts_with(b">>planar_code") {
        if !bytes.starts_with(HEADER) {
            return Err(GraphError::Header);
        }
        pos = HEADER.len();
    }
    let mut graphs = Vec::new();
    while pos < bytes.len() {
        let index = graphs.len() + 1;
        let n = bytes[pos] as usize;
        pos += 1;
        if !(n == 20 || (n >= 24 && n % 2 == 0)) {
            return Err(GraphError::VertexCount(n));
        }
        let mut rotation = Vec::with_capacity(n);
        for vertex in 1..=n {
            let mut nb = Vec::with_capacity(3);
            loop {
                let &b = bytes.get(pos).ok_or(GraphError::Truncated {
                    graph: index,
                    offset: pos,
                })?;
                pos += 1;
                if b == 0 {
                    break;
                }
                let w = b as usize;
                if w > n {
                    return Err(GraphError::VertexOutOfRange {
                        graph: index,
                        vertex,
                        neighbour: w,
                        n,
                    });
                }
                nb.push(w - 1);
            }
            let triple: [usize; 3] = nb.as_slice().try_into().map_err(|_| GraphError::Degree {
                graph: index,
                vertex,
                degree: nb.len(),
            })?;
            rotation.push(triple);
        }
        graphs.push(FullereneGraph::from_rotation(format!("{source}#{index}"), rotation)?);
    }
    Ok(graphs)
}

/// Encodes graphs with the header. Requires fewer than 256 vertices.
pub fn write_planar_code<'a>(graphs: impl IntoIterator<Item = &'a FullereneGraph>) -> Vec<u8> {
    let mut out = HEADER.to_vec();
    for g in graphs {
        let n = g.n_vertices();
        assert!(n < 256, "single-octet planar code needs N < 256, got {n}");
        out.push(n as u8);
        for nb in g.rotation() {
            out.extend(nb.iter().map(|&w| (w + 1) as u8));
            out.push(0);
        }
    }
    out
}
