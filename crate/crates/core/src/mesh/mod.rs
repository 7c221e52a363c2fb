//! Two-dimensional polytopal meshes of the unit square.
//!
//! A mesh stores, for every cell, its measure, centroid, diameter and the
//! cell point `x_K` on which the finite-volume unknown lives, and for every
//! face its measure, centroid and, per adjacent cell, the outward unit normal
//! and the signed orthogonal distance `d_{K,σ} = (x̄_σ − x_K)·n_{K,σ}`.
//!
//! Meshes are never serialized. They are rebuilt from a [`MeshSpec`], which
//! is what persisted artifacts record.

mod diagnostics;
mod generate;
mod locate;

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use diagnostics::{compute_diagnostics, MeshDiagnostics};

pub type Point = Vector2<f64>;

/// Absolute tolerance for geometric predicates on the unit square.
pub const GEOMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Uniform,
    Triangular,
}

impl MeshKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeshKind::Uniform => "uniform",
            MeshKind::Triangular => "triangular",
        }
    }

    /// The cell point used by the experiments for this kind of mesh.
    pub fn default_cell_points(self) -> CellPointMode {
        match self {
            MeshKind::Uniform => CellPointMode::Centroid,
            MeshKind::Triangular => CellPointMode::Circumcenter,
        }
    }
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MeshKind::Uniform),
            "triangular" => Ok(MeshKind::Triangular),
            _ => Err(Error::InvalidArgument(format!("unknown mesh kind `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellPointMode {
    Centroid,
    Circumcenter,
}

impl CellPointMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CellPointMode::Centroid => "centroid",
            CellPointMode::Circumcenter => "circumcenter",
        }
    }
}

impl fmt::Display for CellPointMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CellPointMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centroid" => Ok(CellPointMode::Centroid),
            "circumcenter" => Ok(CellPointMode::Circumcenter),
            _ => Err(Error::InvalidArgument(format!("unknown cell point mode `{s}`"))),
        }
    }
}

/// The triple a mesh is rebuilt from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshSpec {
    pub kind: MeshKind,
    pub n: usize,
    pub cell_point_mode: CellPointMode,
}

impl MeshSpec {
    pub fn new(kind: MeshKind, n: usize, cell_point_mode: CellPointMode) -> Self {
        Self {
            kind,
            n,
            cell_point_mode,
        }
    }

    pub fn build(&self) -> Result<PolytopalMesh> {
        match self.kind {
            MeshKind::Uniform => generate::uniform(self.n, self.cell_point_mode),
            MeshKind::Triangular => generate::triangular(self.n, self.cell_point_mode),
        }
    }

    /// Number of cells the build produces.
    pub fn num_cells(&self) -> usize {
        let per = match self.kind {
            MeshKind::Uniform => 1,
            MeshKind::Triangular => generate::TRIANGLES_PER_SQUARE,
        };
        self.n * self.n * per
    }

    /// 64-bit FNV-1a over (kind, n, cell point mode).
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut bytes = Vec::with_capacity(24);
        bytes.extend_from_slice(self.kind.as_str().as_bytes());
        bytes.push(0);
        bytes.extend_from_slice(&(self.n as u64).to_le_bytes());
        bytes.extend_from_slice(self.cell_point_mode.as_str().as_bytes());
        bytes
            .iter()
            .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    /// Vertex indices in counter-clockwise order.
    pub vertices: Vec<usize>,
    pub measure: f64,
    /// The cell point `x_K` carrying the unknown.
    pub point: Point,
    pub centroid: Point,
    pub diameter: f64,
    /// Face indices, in the same order as the polygon edges.
    pub faces: Vec<usize>,
}

/// Geometry of a face as seen from one of its adjacent cells.
#[derive(Clone, Copy, Debug)]
pub struct FaceSide {
    pub cell: usize,
    /// Unit normal pointing out of `cell`.
    pub normal: Point,
    /// Signed orthogonal distance from the cell point to the face.
    pub distance: f64,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: [usize; 2],
    pub measure: f64,
    pub centroid: Point,
    /// One side for boundary faces, two for interior faces.
    pub sides: Vec<FaceSide>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.sides.len() == 1
    }

    pub fn side(&self, cell: usize) -> Option<&FaceSide> {
        self.sides.iter().find(|s| s.cell == cell)
    }

    /// The cell across the face from `cell`, if any.
    pub fn neighbor(&self, cell: usize) -> Option<usize> {
        self.sides.iter().map(|s| s.cell).find(|&c| c != cell)
    }
}

#[derive(Clone, Debug)]
pub struct PolytopalMesh {
    spec: MeshSpec,
    vertices: Vec<Point>,
    cells: Vec<Cell>,
    faces: Vec<Face>,
    mesh_size: f64,
    fingerprint: u64,
    /// Cells are stored parent square by parent square, this many per square.
    cells_per_square: usize,
}

impl PolytopalMesh {
    /// Builds the cell and face geometry from vertex coordinates and
    /// counter-clockwise cell vertex lists.
    fn from_cells(
        spec: MeshSpec,
        vertices: Vec<Point>,
        cell_vertices: Vec<Vec<usize>>,
        cells_per_square: usize,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(cell_vertices.len());
        let mut faces: Vec<Face> = Vec::new();
        let mut face_index: HashMap<(usize, usize), usize> = HashMap::new();

        for (k, verts) in cell_vertices.into_iter().enumerate() {
            let poly: Vec<Point> = verts.iter().map(|&v| vertices[v]).collect();
            let (measure, centroid) = polygon_area_centroid(&poly);
            let diameter = polygon_diameter(&poly);
            let point = match spec.cell_point_mode {
                CellPointMode::Centroid => centroid,
                CellPointMode::Circumcenter => circumcenter(&poly[0], &poly[1], &poly[2]),
            };

            let m = verts.len();
            let mut cell_faces = Vec::with_capacity(m);
            for e in 0..m {
                let (a, b) = (verts[e], verts[(e + 1) % m]);
                let key = (a.min(b), a.max(b));
                let f = *face_index.entry(key).or_insert_with(|| {
                    let (pa, pb) = (vertices[a], vertices[b]);
                    faces.push(Face {
                        vertices: [a, b],
                        measure: (pb - pa).norm(),
                        centroid: (pa + pb) * 0.5,
                        sides: Vec::with_capacity(2),
                    });
                    faces.len() - 1
                });
                let t = vertices[b] - vertices[a];
                let normal = Point::new(t.y, -t.x) / t.norm();
                let distance = (faces[f].centroid - point).dot(&normal);
                if distance <= GEOMETRY_TOLERANCE {
                    return Err(Error::DegenerateCell {
                        cell: k,
                        face: f,
                        distance,
                    });
                }
                faces[f].sides.push(FaceSide {
                    cell: k,
                    normal,
                    distance,
                });
                cell_faces.push(f);
            }

            cells.push(Cell {
                vertices: verts,
                measure,
                point,
                centroid,
                diameter,
                faces: cell_faces,
            });
        }

        let mesh_size = cells.iter().map(|c| c.diameter).fold(0.0, f64::max);
        Ok(Self {
            fingerprint: spec.fingerprint(),
            spec,
            vertices,
            cells,
            faces,
            mesh_size,
            cells_per_square,
        })
    }

    pub fn spec(&self) -> MeshSpec {
        self.spec
    }

    pub fn kind(&self) -> MeshKind {
        self.spec.kind
    }

    /// Number of parent squares per side.
    pub fn resolution(&self) -> usize {
        self.spec.n
    }

    pub fn cell_point_mode(&self) -> CellPointMode {
        self.spec.cell_point_mode
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn cell(&self, k: usize) -> &Cell {
        &self.cells[k]
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_interior_faces(&self) -> usize {
        self.faces.iter().filter(|f| !f.is_boundary()).count()
    }

    /// `h = max_K h_K`.
    pub fn mesh_size(&self) -> f64 {
        self.mesh_size
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Geometry of face `f` seen from `cell`. Panics if they are not adjacent.
    pub fn side(&self, f: usize, cell: usize) -> &FaceSide {
        self.faces[f]
            .side(cell)
            .unwrap_or_else(|| panic!("face {f} is not adjacent to cell {cell}"))
    }

    pub fn cell_measures(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.measure).collect()
    }

    /// The local grouping of cells: singletons on rectangular meshes, the
    /// triangles of each parent square on triangular meshes.
    pub fn groups(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        let per = self.cells_per_square;
        (0..self.cells.len() / per).map(move |g| g * per..(g + 1) * per)
    }

    /// Whether `p` lies in the closure of `cell`, up to `tol` in distance.
    /// Valid for convex cells, which both generators produce.
    pub fn cell_contains(&self, cell: usize, p: &Point, tol: f64) -> bool {
        self.cells[cell].faces.iter().all(|&f| {
            let face = &self.faces[f];
            (p - face.centroid).dot(&self.side(f, cell).normal) <= tol
        })
    }

    pub fn check_fingerprint(&self, found: u64) -> Result<()> {
        if found == self.fingerprint {
            Ok(())
        } else {
            Err(Error::FingerprintMismatch {
                expected: self.fingerprint,
                found,
            })
        }
    }
}

/// Uniform `n × n` grid of squares with centroid cell points.
pub fn build_uniform_rect_mesh(n: usize) -> Result<PolytopalMesh> {
    generate::uniform(n, CellPointMode::Centroid)
}

/// Structured acute triangulation; see [`generate`] for the pattern.
pub fn build_triangular_mesh(n: usize, mode: CellPointMode) -> Result<PolytopalMesh> {
    generate::triangular(n, mode)
}

fn polygon_area_centroid(poly: &[Point]) -> (f64, Point) {
    let m = poly.len();
    let origin = poly[0];
    let mut area2 = 0.0;
    let mut c = Point::zeros();
    for i in 0..m {
        let p = poly[i] - origin;
        let q = poly[(i + 1) % m] - origin;
        let cross = p.x * q.y - p.y * q.x;
        area2 += cross;
        c += (p + q) * cross;
    }
    let area = 0.5 * area2;
    (area, origin + c / (3.0 * area2))
}

fn polygon_diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in poly.iter().enumerate() {
        for q in &poly[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

fn circumcenter(a: &Point, b: &Point, c: &Point) -> Point {
    let (ab, ac) = (b - a, c - a);
    let det = 2.0 * (ab.x * ac.y - ab.y * ac.x);
    let (ab2, ac2) = (ab.norm_squared(), ac.norm_squared());
    a + Point::new(
        (ac.y * ab2 - ab.y * ac2) / det,
        (ab.x * ac2 - ac.x * ab2) / det,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn check_invariants(mesh: &PolytopalMesh) {
        let total: f64 = mesh.cells().iter().map(|c| c.measure).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);

        for face in mesh.faces() {
            let interior = face.centroid.iter().all(|&x| x > 1e-14 && x < 1.0 - 1e-14);
            assert_eq!(face.sides.len(), if interior { 2 } else { 1 });
            for s in &face.sides {
                assert_abs_diff_eq!(s.normal.norm(), 1.0, epsilon = 1e-14);
                assert!(s.distance > 0.0);
            }
            if face.sides.len() == 2 {
                assert_abs_diff_eq!((face.sides[0].normal + face.sides[1].normal).norm(), 0.0, epsilon = 1e-14);
            }
        }

        for (k, cell) in mesh.cells().iter().enumerate() {
            let mut closure = Point::zeros();
            let mut cones = 0.0;
            for &f in &cell.faces {
                let face = mesh.face(f);
                let side = mesh.side(f, k);
                closure += side.normal * face.measure;
                cones += face.measure * side.distance / 2.0;
            }
            assert_abs_diff_eq!(closure.norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(cones, cell.measure, epsilon = 1e-12);
        }
    }

    #[test]
    fn uniform_single_cell() {
        let mesh = build_uniform_rect_mesh(1).unwrap();
        assert_eq!(mesh.num_cells(), 1);
        assert_eq!(mesh.cell(0).measure, 1.0);
        assert_eq!(mesh.num_faces(), 4);
        assert_eq!(mesh.num_interior_faces(), 0);
    }

    #[test]
    fn uniform_two_by_two() {
        let mesh = build_uniform_rect_mesh(2).unwrap();
        assert_eq!(mesh.num_cells(), 4);
        assert!(mesh.cells().iter().all(|c| c.measure == 0.25));
        assert_eq!(mesh.num_interior_faces(), 4);
        assert_eq!(mesh.num_faces() - mesh.num_interior_faces(), 8);
        for face in mesh.faces() {
            for s in &face.sides {
                assert_abs_diff_eq!(s.distance, 0.25, epsilon = 1e-15);
            }
        }
        assert_abs_diff_eq!(mesh.mesh_size(), 2f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn uniform_four_partitions_unit_square() {
        let mesh = build_uniform_rect_mesh(4).unwrap();
        let total: f64 = mesh.cells().iter().map(|c| c.measure).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
        check_invariants(&mesh);
    }

    #[test]
    fn rejects_zero_resolution() {
        assert!(matches!(build_uniform_rect_mesh(0), Err(Error::InvalidArgument(_))));
        assert!(build_triangular_mesh(0, CellPointMode::Centroid).is_err());
    }

    #[test]
    fn triangular_invariants() {
        for n in [1, 2, 3, 8] {
            for mode in [CellPointMode::Centroid, CellPointMode::Circumcenter] {
                let mesh = build_triangular_mesh(n, mode).unwrap();
                assert_eq!(mesh.num_cells(), 14 * n * n);
                check_invariants(&mesh);
            }
        }
    }

    #[test]
    fn triangular_single_square_partition() {
        let mesh = build_triangular_mesh(1, CellPointMode::Centroid).unwrap();
        let total: f64 = mesh.cells().iter().map(|c| c.measure).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn circumcenter_is_equidistant() {
        let mesh = build_triangular_mesh(2, CellPointMode::Circumcenter).unwrap();
        for cell in mesh.cells() {
            let r: Vec<f64> = cell
                .vertices
                .iter()
                .map(|&v| (mesh.vertices()[v] - cell.point).norm())
                .collect();
            assert_abs_diff_eq!(r[0], r[1], epsilon = 1e-14);
            assert_abs_diff_eq!(r[0], r[2], epsilon = 1e-14);
        }
    }

    #[test]
    fn builds_are_deterministic() {
        for spec in [
            MeshSpec::new(MeshKind::Uniform, 5, CellPointMode::Centroid),
            MeshSpec::new(MeshKind::Triangular, 3, CellPointMode::Circumcenter),
        ] {
            let (a, b) = (spec.build().unwrap(), spec.build().unwrap());
            assert_eq!(a.fingerprint(), b.fingerprint());
            let bits = |m: &PolytopalMesh| -> Vec<u64> {
                m.vertices().iter().flat_map(|p| [p.x.to_bits(), p.y.to_bits()]).collect()
            };
            assert_eq!(bits(&a), bits(&b));
        }
    }

    #[test]
    fn fingerprints_distinguish_specs() {
        let a = MeshSpec::new(MeshKind::Uniform, 4, CellPointMode::Centroid).fingerprint();
        let b = MeshSpec::new(MeshKind::Uniform, 5, CellPointMode::Centroid).fingerprint();
        let c = MeshSpec::new(MeshKind::Triangular, 4, CellPointMode::Centroid).fingerprint();
        let d = MeshSpec::new(MeshKind::Triangular, 4, CellPointMode::Circumcenter).fingerprint();
        assert!(a != b && a != c && c != d);
    }

    #[test]
    fn uniform_meshes_nest() {
        let coarse = build_uniform_rect_mesh(3).unwrap();
        let fine = build_uniform_rect_mesh(6).unwrap();
        for cell in fine.cells() {
            let hits = (0..coarse.num_cells())
                .filter(|&k| coarse.cell_contains(k, &cell.centroid, 0.0))
                .count();
            assert_eq!(hits, 1);
            let parent = coarse.locate_cell(&cell.centroid).unwrap();
            assert_abs_diff_eq!(coarse.cell(parent).measure, 4.0 * cell.measure, epsilon = 1e-15);
        }
    }
}
