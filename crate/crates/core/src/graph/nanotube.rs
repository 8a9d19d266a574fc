//! Nanotubes closed by two half-dodecahedral caps: `k` stacked copies of
//! the dodecahedron's lateral belt.

use super::{wind_spiral, FullereneGraph, GraphError, SpiralCode};

/// Tube with `N = 10(k + 1)` vertices: a pentagon, a ring of five
/// pentagons, `k - 1` rings of five hexagons, a ring of five pentagons and
/// a closing pentagon. `k = 1` is the dodecahedron.
pub fn nanotube_a(k: usize) -> Result<FullereneGraph, GraphError> {
    if k < 1 {
        return Err(GraphError::StackCount(k));
    }
    let n = 10 * (k + 1);
    let f = (n / 2 + 2) as u16;
    let mut pentagons = [0u16; 12];
    for i in 0..6u16 {
        pentagons[i as usize] = i + 1;
        pentagons[6 + i as usize] = f - 5 + i;
    }
    let spiral = SpiralCode::new(n, pentagons)?;
    Ok(wind_spiral(&spiral)?.with_id(format!("nanotube_a({k})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::dodecahedron;

    #[test]
    fn one_stack_is_dodecahedron() {
        let g = nanotube_a(1).unwrap();
        assert_eq!(g.n_vertices(), 20);
        assert!(g.is_isomorphic(&dodecahedron()));
    }

    #[test]
    fn face_vectors() {
        for (k, hexagons) in [(2, 5), (3, 10)] {
            let g = nanotube_a(k).unwrap();
            assert_eq!(g.n_vertices(), 10 * (k + 1));
            let sizes = g.face_sizes();
            assert_eq!(sizes.iter().filter(|&&s| s == 5).count(), 12);
            assert_eq!(sizes.iter().filter(|&&s| s == 6).count(), hexagons);
        }
    }

    #[test]
    fn zero_stacks_rejected() {
        assert_eq!(nanotube_a(0).unwrap_err(), GraphError::StackCount(0));
    }

    #[test]
    fn valid_up_to_ten_stacks() {
        for k in 1..=10 {
            let g = nanotube_a(k).unwrap();
            assert!(g.validate().is_valid(), "k = {k}");
        }
    }
}
