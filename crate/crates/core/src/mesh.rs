//! Structured simplicial meshes of chart parameter domains.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Result, SpectraError};
use crate::geometry::Domain;

/// Vertices, cells and Dirichlet flags of a simplicial mesh in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<f64>,
    cells: Vec<usize>,
    boundary: Vec<bool>,
    h_max: f64,
}

impl Mesh {
    /// Builds a uniform mesh with `resolution` cells per axis (rings for disks).
    pub fn build_structured(domain: &Domain, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(SpectraError::Parameter(format!(
                "mesh resolution must be at least 2, got {resolution}"
            )));
        }
        domain.validate()?;
        let mut mesh = match domain {
            Domain::Interval { a, b } => interval(*a, *b, resolution),
            Domain::Rectangle { lo, hi } => rectangle(*lo, *hi, resolution),
            Domain::Disk { center, radius } => disk(*center, *radius, resolution),
        };
        mesh.h_max = (0..mesh.num_cells()).map(|c| mesh.cell_diameter(c)).fold(0.0, f64::max);
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.boundary.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i * self.dim..(i + 1) * self.dim]
    }

    /// Vertex indices of a cell, counterclockwise for triangles.
    pub fn cell(&self, c: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.cells[c * k..(c + 1) * k]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.iter().filter(|b| **b).count()
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Signed length or area of a cell in chart coordinates.
    pub fn cell_measure(&self, c: usize) -> f64 {
        let v = self.cell(c);
        if self.dim == 1 {
            self.vertex(v[1])[0] - self.vertex(v[0])[0]
        } else {
            let (p, q, r) = (self.vertex(v[0]), self.vertex(v[1]), self.vertex(v[2]));
            0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
        }
    }

    /// Longest edge of a cell.
    pub fn cell_diameter(&self, c: usize) -> f64 {
        let v = self.cell(c);
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let (p, q) = (self.vertex(v[i]), self.vertex(v[j]));
                let dist = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                d = d.max(dist);
            }
        }
        d
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_measure(c)).sum()
    }

    /// Plain-text listing: `v x1 [x2]`, `c i j [k]` and `b i` records.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.num_vertices() {
            out.push('v');
            for x in self.vertex(i) {
                let _ = write!(out, " {x:.16e}");
            }
            out.push('\n');
        }
        for c in 0..self.num_cells() {
            out.push('c');
            for i in self.cell(c) {
                let _ = write!(out, " {i}");
            }
            out.push('\n');
        }
        for (i, b) in self.boundary.iter().enumerate() {
            if *b {
                let _ = writeln!(out, "b {i}");
            }
        }
        out
    }
}

fn grid_coord(lo: f64, hi: f64, i: usize, res: usize) -> f64 {
    if i == res {
        hi
    } else {
        lo + (hi - lo) * i as f64 / res as f64
    }
}

fn interval(a: f64, b: f64, res: usize) -> Mesh {
    let vertices = (0..=res).map(|i| grid_coord(a, b, i, res)).collect();
    let cells = (0..res).flat_map(|i| [i, i + 1]).collect();
    let boundary = (0..=res).map(|i| i == 0 || i == res).collect();
    Mesh {
        dim: 1,
        vertices,
        cells,
        boundary,
        h_max: 0.0,
    }
}

fn rectangle(lo: [f64; 2], hi: [f64; 2], res: usize) -> Mesh {
    let row = res + 1;
    let mut vertices = Vec::with_capacity(2 * row * row);
    let mut boundary = Vec::with_capacity(row * row);
    for j in 0..=res {
        for i in 0..=res {
            vertices.push(grid_coord(lo[0], hi[0], i, res));
            vertices.push(grid_coord(lo[1], hi[1], j, res));
            boundary.push(i == 0 || j == 0 || i == res || j == res);
        }
    }
    let mut cells = Vec::with_capacity(6 * res * res);
    for j in 0..res {
        for i in 0..res {
            let v00 = j * row + i;
            let v10 = v00 + 1;
            let v01 = v00 + row;
            let v11 = v01 + 1;
            cells.extend_from_slice(&[v00, v10, v11, v00, v11, v01]);
        }
    }
    Mesh {
        dim: 2,
        vertices,
        cells,
        boundary,
        h_max: 0.0,
    }
}

/// Concentric rings: ring j has 6j vertices at radius j R / res, joined to
/// ring j - 1 by merging the two angle sequences.
fn disk(center: [f64; 2], radius: f64, res: usize) -> Mesh {
    let mut vertices = vec![center[0], center[1]];
    let mut boundary = vec![false];
    let mut ring_start = vec![0usize];
    for j in 1..=res {
        ring_start.push(boundary.len());
        let count = 6 * j;
        let r = if j == res {
            radius
        } else {
            radius * j as f64 / res as f64
        };
        for l in 0..count {
            let phi = 2.0 * PI * l as f64 / count as f64;
            vertices.push(center[0] + r * phi.cos());
            vertices.push(center[1] + r * phi.sin());
            boundary.push(j == res);
        }
    }
    let mut cells = Vec::with_capacity(18 * res * res);
    for j in 1..=res {
        let outer_n = 6 * j;
        let outer = |b: usize| ring_start[j] + b % outer_n;
        if j == 1 {
            for b in 0..outer_n {
                cells.extend_from_slice(&[0, outer(b), outer(b + 1)]);
            }
            continue;
        }
        let inner_n = 6 * (j - 1);
        let inner = |a: usize| ring_start[j - 1] + a % inner_n;
        let (mut a, mut b) = (0, 0);
        while a < inner_n || b < outer_n {
            // compare the angles (a+1)/inner_n and (b+1)/outer_n exactly
            let advance_outer = a == inner_n || (b < outer_n && (b + 1) * inner_n <= (a + 1) * outer_n);
            if advance_outer {
                cells.extend_from_slice(&[inner(a), outer(b), outer(b + 1)]);
                b += 1;
            } else {
                cells.extend_from_slice(&[inner(a), outer(b), inner(a + 1)]);
                a += 1;
            }
        }
    }
    Mesh {
        dim: 2,
        vertices,
        cells,
        boundary,
        h_max: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn on_boundary(domain: &Domain, p: &[f64]) -> bool {
        match domain {
            Domain::Interval { a, b } => (p[0] - a).abs() <= 1e-12 || (p[0] - b).abs() <= 1e-12,
            Domain::Rectangle { lo, hi } => {
                (0..2).any(|i| (p[i] - lo[i]).abs() <= 1e-12 || (p[i] - hi[i]).abs() <= 1e-12)
            }
            Domain::Disk { center, radius } => {
                (((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt() - radius).abs() <= 1e-12
            }
        }
    }

    fn check_invariants(domain: &Domain, mesh: &Mesh) {
        for c in 0..mesh.num_cells() {
            assert!(mesh.cell_measure(c) > 0.0, "cell {c} is not positively oriented");
        }
        for i in 0..mesh.num_vertices() {
            if mesh.is_boundary(i) {
                assert!(on_boundary(domain, mesh.vertex(i)), "vertex {i} flagged but interior");
            }
        }
        for i in 0..mesh.num_vertices() {
            for j in i + 1..mesh.num_vertices() {
                let d: f64 = mesh
                    .vertex(i)
                    .iter()
                    .zip(mesh.vertex(j))
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(d > 1e-14, "vertices {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn interval_counts() {
        let domain = Domain::unit_interval();
        let mesh = Mesh::build_structured(&domain, 4).unwrap();
        assert_eq!((mesh.num_vertices(), mesh.num_cells()), (5, 4));
        assert_eq!(mesh.boundary_mask(), &[true, false, false, false, true]);
        check_invariants(&domain, &mesh);
    }

    #[test]
    fn square_counts() {
        let domain = Domain::unit_square();
        let mesh = Mesh::build_structured(&domain, 2).unwrap();
        assert_eq!((mesh.num_vertices(), mesh.num_cells()), (9, 8));
        assert_eq!(mesh.num_boundary(), 8);
        assert!(!mesh.is_boundary(4));
        check_invariants(&domain, &mesh);
        assert!((mesh.total_measure() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn rectangle_area_and_refinement() {
        let domain = Domain::Rectangle {
            lo: [-1.0, 0.5],
            hi: [2.0, 1.25],
        };
        let coarse = Mesh::build_structured(&domain, 10).unwrap();
        let fine = Mesh::build_structured(&domain, 20).unwrap();
        check_invariants(&domain, &coarse);
        assert!((fine.total_measure() - 2.25).abs() <= 1e-10);
        assert_relative_eq!(coarse.h_max() / fine.h_max(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn disk_counts_and_flags() {
        let domain = Domain::unit_disk();
        let mesh = Mesh::build_structured(&domain, 3).unwrap();
        assert_eq!(mesh.num_vertices(), 1 + 6 + 12 + 18);
        assert_eq!(mesh.num_boundary(), 18);
        assert_eq!(mesh.num_cells(), 6 * 9);
        check_invariants(&domain, &mesh);
        assert!((mesh.total_measure() - PI).abs() <= 0.05 * PI);
    }

    #[test]
    fn disk_area_is_the_inscribed_polygon() {
        for res in [2, 5, 16] {
            let domain = Domain::Disk {
                center: [0.3, -0.2],
                radius: 1.5,
            };
            let mesh = Mesh::build_structured(&domain, res).unwrap();
            check_invariants(&domain, &mesh);
            let sides = 6.0 * res as f64;
            let polygon = 0.5 * sides * 1.5 * 1.5 * (2.0 * PI / sides).sin();
            assert_relative_eq!(mesh.total_measure(), polygon, max_relative = 1e-12);
            let h = mesh.h_max();
            assert!((mesh.total_measure() - PI * 2.25).abs() <= h * h);
        }
    }

    #[test]
    fn disk_refinement_halves_h() {
        let domain = Domain::unit_disk();
        for res in [4, 8, 16] {
            let a = Mesh::build_structured(&domain, res).unwrap().h_max();
            let b = Mesh::build_structured(&domain, 2 * res).unwrap().h_max();
            assert!((a / b - 2.0).abs() <= 0.2, "ratio {}", a / b);
        }
    }

    #[test]
    fn coarse_resolution_is_rejected() {
        assert!(Mesh::build_structured(&Domain::unit_square(), 1).is_err());
    }

    #[test]
    fn text_export_lists_records() {
        let mesh = Mesh::build_structured(&Domain::unit_interval(), 2).unwrap();
        let text = mesh.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3 + 2 + 2);
        assert!(lines[0].starts_with("v 0.0"));
        assert_eq!(lines[3], "c 0 1");
        assert_eq!(lines[6], "b 2");
    }
}
