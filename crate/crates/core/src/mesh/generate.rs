//! Mesh generators.
//!
//! The triangular generator splits every parent square into 14 acute
//! triangles. In parent-square coordinates the pattern uses the corners
//! `C1..C4`, one point on each side (`Mb`, `Mr`, `Mt`, `Ml`) and four interior
//! points on the diagonals,
//!
//! ```text
//! D1 = (t, t)   D2 = (1 − s, s)   D3 = (1 − t, 1 − t)   D4 = (s, 1 − s)
//! ```
//!
//! with `t = 0.38`, `s = 0.33`. The interior points form a rhombus that is
//! split along its short diagonal `D1–D3`. Every interior vertex then has
//! degree at least 5 and every side point degree 3 per square, which is what
//! an all-acute triangulation needs; the largest angle is about 72.5°.
//!
//! Side points sit at the side midpoints, except on grid lines with an even
//! index where they are slid along the side by `δ = 0.1 / n`. The shift is
//! what makes the grouped circumcenter offset `e_G` non-zero (it vanishes for
//! any group with a symmetric boundary) while keeping it `O(H³)`.

use super::{CellPointMode, MeshKind, MeshSpec, Point, PolytopalMesh};
use crate::error::{Error, Result};

pub(super) const DIAGONAL_NEAR: f64 = 0.38;
pub(super) const DIAGONAL_FAR: f64 = 0.33;
pub(super) const TRIANGLES_PER_SQUARE: usize = 14;

pub(super) fn uniform(n: usize, mode: CellPointMode) -> Result<PolytopalMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("mesh resolution must be at least 1".into()));
    }
    let nf = n as f64;
    let vertices: Vec<Point> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Point::new(i as f64 / nf, j as f64 / nf)))
        .collect();
    let node = |i: usize, j: usize| j * (n + 1) + i;
    let cells = (0..n)
        .flat_map(|j| {
            (0..n).map(move |i| vec![node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)])
        })
        .collect();
    PolytopalMesh::from_cells(MeshSpec::new(MeshKind::Uniform, n, mode), vertices, cells, 1)
}

pub(super) fn triangular(n: usize, mode: CellPointMode) -> Result<PolytopalMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("mesh resolution must be at least 1".into()));
    }
    let nf = n as f64;
    let shift = |line: usize| if line.is_multiple_of(2) { 0.1 / nf } else { 0.0 };

    // Vertex blocks: grid nodes, points on horizontal sides, points on
    // vertical sides, interior diagonal points.
    let node = |i: usize, j: usize| j * (n + 1) + i;
    let h_base = (n + 1) * (n + 1);
    let h_side = |i: usize, j: usize| h_base + j * n + i;
    let v_base = h_base + (n + 1) * n;
    let v_side = |i: usize, j: usize| v_base + i * n + j;
    let d_base = v_base + (n + 1) * n;
    let diag = |i: usize, j: usize, k: usize| d_base + 4 * (j * n + i) + k;

    let mut vertices = Vec::with_capacity(d_base + 4 * n * n);
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point::new(i as f64 / nf, j as f64 / nf));
        }
    }
    for j in 0..=n {
        for i in 0..n {
            vertices.push(Point::new((i as f64 + 0.5 + shift(j)) / nf, j as f64 / nf));
        }
    }
    for i in 0..=n {
        for j in 0..n {
            vertices.push(Point::new(i as f64 / nf, (j as f64 + 0.5 + shift(i)) / nf));
        }
    }
    let (t, s) = (DIAGONAL_NEAR, DIAGONAL_FAR);
    let local = [(t, t), (1.0 - s, s), (1.0 - t, 1.0 - t), (s, 1.0 - s)];
    for j in 0..n {
        for i in 0..n {
            for &(x, y) in &local {
                vertices.push(Point::new((i as f64 + x) / nf, (j as f64 + y) / nf));
            }
        }
    }

    let mut cells = Vec::with_capacity(TRIANGLES_PER_SQUARE * n * n);
    for j in 0..n {
        for i in 0..n {
            let (c1, c2, c3, c4) = (node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
            let (mb, mt) = (h_side(i, j), h_side(i, j + 1));
            let (ml, mr) = (v_side(i, j), v_side(i + 1, j));
            let [d1, d2, d3, d4] = [0, 1, 2, 3].map(|k| diag(i, j, k));
            cells.extend([
                vec![c1, mb, d1],
                vec![mb, d2, d1],
                vec![mb, c2, d2],
                vec![c2, mr, d2],
                vec![mr, d3, d2],
                vec![mr, c3, d3],
                vec![c3, mt, d3],
                vec![mt, d4, d3],
                vec![mt, c4, d4],
                vec![c4, ml, d4],
                vec![ml, d1, d4],
                vec![ml, c1, d1],
                vec![d1, d2, d3],
                vec![d1, d3, d4],
            ]);
        }
    }
    PolytopalMesh::from_cells(
        MeshSpec::new(MeshKind::Triangular, n, mode),
        vertices,
        cells,
        TRIANGLES_PER_SQUARE,
    )
}
