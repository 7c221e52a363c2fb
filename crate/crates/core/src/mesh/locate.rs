use super::{MeshKind, Point, PolytopalMesh, GEOMETRY_TOLERANCE};
use crate::error::{Error, Result};

impl PolytopalMesh {
    /// Returns the cell whose closure contains `p`. Points on shared faces or
    /// vertices resolve to the lowest incident cell id.
    pub fn locate_cell(&self, p: &Point) -> Result<usize> {
        let tol = GEOMETRY_TOLERANCE;
        if !(p.x >= -tol && p.x <= 1.0 + tol && p.y >= -tol && p.y <= 1.0 + tol) {
            return Err(Error::PointOutside { x: p.x, y: p.y });
        }
        let n = self.resolution();
        match self.kind() {
            MeshKind::Uniform => {
                let i = lowest_strip(p.x, n);
                let j = lowest_strip(p.y, n);
                Ok(j * n + i)
            }
            MeshKind::Triangular => {
                let per = self.cells_per_square;
                for j in strip_range(p.y, n) {
                    for i in strip_range(p.x, n) {
                        let first = (j * n + i) * per;
                        if let Some(k) = (first..first + per).find(|&k| self.triangle_contains(k, p)) {
                            return Ok(k);
                        }
                    }
                }
                // Only reachable through rounding right at the tolerance edge.
                Err(Error::PointOutside { x: p.x, y: p.y })
            }
        }
    }

    fn triangle_contains(&self, k: usize, p: &Point) -> bool {
        let v = &self.cell(k).vertices;
        let (a, b, c) = (self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]]);
        let cross = |u: Point, w: Point| u.x * w.y - u.y * w.x;
        let area = cross(b - a, c - a);
        let l1 = cross(c - b, p - b) / area;
        let l2 = cross(a - c, p - c) / area;
        let l0 = cross(b - a, p - a) / area;
        [l0, l1, l2].iter().all(|&l| l >= -GEOMETRY_TOLERANCE)
    }
}

/// Lowest index `i` with `i/n − tol ≤ x ≤ (i+1)/n + tol`.
fn lowest_strip(x: f64, n: usize) -> usize {
    let i = ((x - GEOMETRY_TOLERANCE) * n as f64).ceil() as i64 - 1;
    i.clamp(0, n as i64 - 1) as usize
}

fn strip_range(x: f64, n: usize) -> std::ops::RangeInclusive<usize> {
    let hi = ((x + GEOMETRY_TOLERANCE) * n as f64).floor() as i64;
    lowest_strip(x, n)..=hi.clamp(0, n as i64 - 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_triangular_mesh, build_uniform_rect_mesh, CellPointMode};

    #[test]
    fn uniform_interior_point() {
        let mesh = build_uniform_rect_mesh(2).unwrap();
        assert_eq!(mesh.locate_cell(&Point::new(0.1, 0.1)).unwrap(), 0);
        assert_eq!(mesh.locate_cell(&Point::new(0.9, 0.1)).unwrap(), 1);
        assert_eq!(mesh.locate_cell(&Point::new(0.1, 0.9)).unwrap(), 2);
    }

    #[test]
    fn uniform_tie_break_is_lowest_id() {
        let mesh = build_uniform_rect_mesh(2).unwrap();
        assert_eq!(mesh.locate_cell(&Point::new(0.5, 0.5)).unwrap(), 0);
        assert_eq!(mesh.locate_cell(&Point::new(0.75, 0.5)).unwrap(), 1);
        assert_eq!(mesh.locate_cell(&Point::new(1.0, 1.0)).unwrap(), 3);
        assert_eq!(mesh.locate_cell(&Point::new(0.0, 0.0)).unwrap(), 0);
    }

    #[test]
    fn rejects_outside_points() {
        let mesh = build_uniform_rect_mesh(2).unwrap();
        assert!(matches!(
            mesh.locate_cell(&Point::new(1.0 + 1e-9, 0.5)),
            Err(Error::PointOutside { .. })
        ));
        assert!(mesh.locate_cell(&Point::new(-1e-13, 0.5)).is_ok());
    }

    #[test]
    fn triangle_centroids_locate_to_their_cell() {
        let mesh = build_triangular_mesh(1, CellPointMode::Centroid).unwrap();
        for (k, cell) in mesh.cells().iter().enumerate() {
            // brute force over all cells
            let hits: Vec<usize> = (0..mesh.num_cells())
                .filter(|&c| mesh.triangle_contains(c, &cell.centroid))
                .collect();
            assert_eq!(hits, vec![k]);
            assert_eq!(mesh.locate_cell(&cell.centroid).unwrap(), k);
        }
    }

    #[test]
    fn triangular_vertices_resolve_to_lowest_incident_cell() {
        let mesh = build_triangular_mesh(3, CellPointMode::Circumcenter).unwrap();
        for p in mesh.vertices() {
            let lowest = (0..mesh.num_cells())
                .find(|&c| mesh.triangle_contains(c, p))
                .unwrap();
            assert_eq!(mesh.locate_cell(p).unwrap(), lowest);
        }
    }

    #[test]
    fn located_cell_contains_point() {
        let mesh = build_triangular_mesh(5, CellPointMode::Circumcenter).unwrap();
        for a in 0..=20 {
            for b in 0..=20 {
                let p = Point::new(a as f64 / 20.0, b as f64 / 20.0);
                let k = mesh.locate_cell(&p).unwrap();
                assert!(mesh.cell_contains(k, &p, 1e-12));
            }
        }
    }
}
