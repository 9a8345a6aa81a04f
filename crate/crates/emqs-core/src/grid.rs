//! Structured staggered hexahedral grid: entity numbering, PEC boundary
//! classification, degree-of-freedom maps and the discrete gradient/curl
//! incidence matrices.
//!
//! Primal quantities live as integral values: scalar potentials on nodes,
//! line integrals on edges, and the magnetic field as line integrals on dual
//! edges, indexed by the primal faces they pierce. Edges and faces are
//! grouped by axis (all x-directed entities first, then y, then z).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::sparse::{Coo, Csr};
use crate::{Error, Result};

/// Axis of an edge direction or face normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

/// Uniform-spacing structured grid: `nx * ny * nz` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, nz: usize, dx: f64, dy: f64, dz: f64) -> Result<Self> {
        let spec = GridSpec { nx, ny, nz, dx, dy, dz };
        spec.validate()?;
        Ok(spec)
    }

    /// Cube grid with `n` cells per axis and spacing `h`.
    pub fn cube(n: usize, h: f64) -> Result<Self> {
        Self::new(n, n, n, h, h, h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 1 || self.ny < 1 || self.nz < 1 {
            return Err(Error::InvalidGrid(format!(
                "cell counts must be >= 1 (got {} x {} x {})",
                self.nx, self.ny, self.nz
            )));
        }
        if !(self.dx > 0.0 && self.dy > 0.0 && self.dz > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "spacings must be > 0 (got {}, {}, {})",
                self.dx, self.dy, self.dz
            )));
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1) * (self.nz + 1)
    }

    /// Edges directed along `axis`.
    pub fn num_edges_along(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.nx * (self.ny + 1) * (self.nz + 1),
            Axis::Y => (self.nx + 1) * self.ny * (self.nz + 1),
            Axis::Z => (self.nx + 1) * (self.ny + 1) * self.nz,
        }
    }

    pub fn num_edges(&self) -> usize {
        AXES.iter().map(|&a| self.num_edges_along(a)).sum()
    }

    /// Faces with normal along `axis`.
    pub fn num_faces_normal(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => (self.nx + 1) * self.ny * self.nz,
            Axis::Y => self.nx * (self.ny + 1) * self.nz,
            Axis::Z => self.nx * self.ny * (self.nz + 1),
        }
    }

    pub fn num_faces(&self) -> usize {
        AXES.iter().map(|&a| self.num_faces_normal(a)).sum()
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
            Axis::Z => self.dz,
        }
    }

    // ---- global entity ids (pre-elimination) ----

    pub fn node_id(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i <= self.nx && j <= self.ny && k <= self.nz);
        i + (self.nx + 1) * (j + (self.ny + 1) * k)
    }

    /// Global edge id; (i, j, k) indexes the edge's low-corner node and the
    /// edge extends one spacing along `axis`.
    pub fn edge_id(&self, axis: Axis, i: usize, j: usize, k: usize) -> usize {
        match axis {
            Axis::X => {
                debug_assert!(i < self.nx && j <= self.ny && k <= self.nz);
                i + self.nx * (j + (self.ny + 1) * k)
            }
            Axis::Y => {
                debug_assert!(i <= self.nx && j < self.ny && k <= self.nz);
                self.num_edges_along(Axis::X) + i + (self.nx + 1) * (j + self.ny * k)
            }
            Axis::Z => {
                debug_assert!(i <= self.nx && j <= self.ny && k < self.nz);
                self.num_edges_along(Axis::X)
                    + self.num_edges_along(Axis::Y)
                    + i
                    + (self.nx + 1) * (j + (self.ny + 1) * k)
            }
        }
    }

    /// Global face id; (i, j, k) indexes the face's low corner and `axis` is
    /// the face normal.
    pub fn face_id(&self, axis: Axis, i: usize, j: usize, k: usize) -> usize {
        match axis {
            Axis::X => {
                debug_assert!(i <= self.nx && j < self.ny && k < self.nz);
                i + (self.nx + 1) * (j + self.ny * k)
            }
            Axis::Y => {
                debug_assert!(i < self.nx && j <= self.ny && k < self.nz);
                self.num_faces_normal(Axis::X) + i + self.nx * (j + (self.ny + 1) * k)
            }
            Axis::Z => {
                debug_assert!(i < self.nx && j < self.ny && k <= self.nz);
                self.num_faces_normal(Axis::X)
                    + self.num_faces_normal(Axis::Y)
                    + i
                    + self.nx * (j + self.ny * k)
            }
        }
    }

    pub fn cell_id(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny && k < self.nz);
        i + self.nx * (j + self.ny * k)
    }

    // ---- boundary classification ----

    pub fn node_on_boundary(&self, i: usize, j: usize, k: usize) -> bool {
        i == 0 || i == self.nx || j == 0 || j == self.ny || k == 0 || k == self.nz
    }

    /// An edge is boundary (tangential to the PEC wall) when it lies inside a
    /// boundary plane. Edges pointing away from the wall are interior.
    pub fn edge_on_boundary(&self, axis: Axis, i: usize, j: usize, k: usize) -> bool {
        match axis {
            Axis::X => j == 0 || j == self.ny || k == 0 || k == self.nz,
            Axis::Y => i == 0 || i == self.nx || k == 0 || k == self.nz,
            Axis::Z => i == 0 || i == self.nx || j == 0 || j == self.ny,
        }
    }

    /// A face is boundary when it coincides with the domain surface.
    pub fn face_on_boundary(&self, axis: Axis, i: usize, _j: usize, _k: usize) -> bool {
        let (idx, n) = match axis {
            Axis::X => (i, self.nx),
            Axis::Y => (_j, self.ny),
            Axis::Z => (_k, self.nz),
        };
        idx == 0 || idx == n
    }
}

/// Selects the ground node of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroundSelector {
    /// The node closest to the grid center (default).
    Center,
    /// Explicit node coordinates.
    Node(usize, usize, usize),
}

/// Degree-of-freedom map after PEC elimination.
///
/// For each entity kind the map records the full-to-interior renumbering
/// (boundary entities map to `None`) together with the inverse listing, so
/// geometric data can be recovered from a reduced index.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub spec: GridSpec,
    /// full node id -> interior index
    pub node_interior: Vec<Option<usize>>,
    /// interior node index -> (i, j, k)
    pub nodes: Vec<[usize; 3]>,
    /// full edge id -> interior index
    pub edge_interior: Vec<Option<usize>>,
    /// interior edge index -> (axis, i, j, k)
    pub edges: Vec<(Axis, [usize; 3])>,
    /// full face id -> interior index
    pub face_interior: Vec<Option<usize>>,
    /// interior face index -> (axis, i, j, k)
    pub faces: Vec<(Axis, [usize; 3])>,
    /// Interior index of the ground node, if any interior node exists.
    pub ground: Option<usize>,
}

/// Builds the DOF map for `spec` with PEC elimination everywhere and the
/// given ground node. Rejects ground nodes on the boundary.
pub fn build_grid(spec: GridSpec, ground: GroundSelector) -> Result<DofMap> {
    spec.validate()?;

    let mut node_interior = vec![None; spec.num_nodes()];
    let mut nodes = Vec::new();
    for k in 0..=spec.nz {
        for j in 0..=spec.ny {
            for i in 0..=spec.nx {
                if !spec.node_on_boundary(i, j, k) {
                    node_interior[spec.node_id(i, j, k)] = Some(nodes.len());
                    nodes.push([i, j, k]);
                }
            }
        }
    }

    let mut edge_interior = vec![None; spec.num_edges()];
    let mut edges = Vec::new();
    for &axis in &AXES {
        let (ni, nj, nk) = edge_ranges(&spec, axis);
        for k in 0..nk {
            for j in 0..nj {
                for i in 0..ni {
                    if !spec.edge_on_boundary(axis, i, j, k) {
                        edge_interior[spec.edge_id(axis, i, j, k)] = Some(edges.len());
                        edges.push((axis, [i, j, k]));
                    }
                }
            }
        }
    }

    let mut face_interior = vec![None; spec.num_faces()];
    let mut faces = Vec::new();
    for &axis in &AXES {
        let (ni, nj, nk) = face_ranges(&spec, axis);
        for k in 0..nk {
            for j in 0..nj {
                for i in 0..ni {
                    if !spec.face_on_boundary(axis, i, j, k) {
                        face_interior[spec.face_id(axis, i, j, k)] = Some(faces.len());
                        faces.push((axis, [i, j, k]));
                    }
                }
            }
        }
    }

    let ground = match ground {
        GroundSelector::Center => {
            let (i, j, k) = (spec.nx.div_ceil(2), spec.ny.div_ceil(2), spec.nz.div_ceil(2));
            if spec.node_on_boundary(i, j, k) {
                // Degenerate grids (some axis has a single cell) have no
                // interior node at all; leave the ground unset.
                node_interior.iter().flatten().next().copied()
            } else {
                node_interior[spec.node_id(i, j, k)]
            }
        }
        GroundSelector::Node(i, j, k) => {
            if i > spec.nx || j > spec.ny || k > spec.nz {
                return Err(Error::InvalidGrid(format!(
                    "ground node ({i}, {j}, {k}) outside the grid"
                )));
            }
            if spec.node_on_boundary(i, j, k) {
                return Err(Error::GroundOnBoundary { node: [i, j, k] });
            }
            node_interior[spec.node_id(i, j, k)]
        }
    };

    Ok(DofMap {
        spec,
        node_interior,
        nodes,
        edge_interior,
        edges,
        face_interior,
        faces,
        ground,
    })
}

fn edge_ranges(spec: &GridSpec, axis: Axis) -> (usize, usize, usize) {
    match axis {
        Axis::X => (spec.nx, spec.ny + 1, spec.nz + 1),
        Axis::Y => (spec.nx + 1, spec.ny, spec.nz + 1),
        Axis::Z => (spec.nx + 1, spec.ny + 1, spec.nz),
    }
}

fn face_ranges(spec: &GridSpec, axis: Axis) -> (usize, usize, usize) {
    match axis {
        Axis::X => (spec.nx + 1, spec.ny, spec.nz),
        Axis::Y => (spec.nx, spec.ny + 1, spec.nz),
        Axis::Z => (spec.nx, spec.ny, spec.nz + 1),
    }
}

impl DofMap {
    pub fn num_interior_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_interior_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_interior_faces(&self) -> usize {
        self.faces.len()
    }

    /// Endpoint nodes (low, high) of an edge in full node ids.
    pub fn edge_endpoints(&self, axis: Axis, c: [usize; 3]) -> (usize, usize) {
        let [i, j, k] = c;
        let s = &self.spec;
        match axis {
            Axis::X => (s.node_id(i, j, k), s.node_id(i + 1, j, k)),
            Axis::Y => (s.node_id(i, j, k), s.node_id(i, j + 1, k)),
            Axis::Z => (s.node_id(i, j, k), s.node_id(i, j, k + 1)),
        }
    }

    /// The four edges bounding a face, with right-hand-rule signs about the
    /// face normal: `[(full edge id, sign); 4]`.
    pub fn face_edges(&self, axis: Axis, c: [usize; 3]) -> [(usize, f64); 4] {
        let [i, j, k] = c;
        let s = &self.spec;
        match axis {
            // circulation about +x: +Ey(k) +Ez(j+1) -Ey(k+1) -Ez(j)
            Axis::X => [
                (s.edge_id(Axis::Y, i, j, k), 1.0),
                (s.edge_id(Axis::Z, i, j + 1, k), 1.0),
                (s.edge_id(Axis::Y, i, j, k + 1), -1.0),
                (s.edge_id(Axis::Z, i, j, k), -1.0),
            ],
            // circulation about +y: +Ez(i) +Ex(k+1) -Ez(i+1) -Ex(k)
            Axis::Y => [
                (s.edge_id(Axis::Z, i, j, k), 1.0),
                (s.edge_id(Axis::X, i, j, k + 1), 1.0),
                (s.edge_id(Axis::Z, i + 1, j, k), -1.0),
                (s.edge_id(Axis::X, i, j, k), -1.0),
            ],
            // circulation about +z: +Ex(j) +Ey(i+1) -Ex(j+1) -Ey(i)
            Axis::Z => [
                (s.edge_id(Axis::X, i, j, k), 1.0),
                (s.edge_id(Axis::Y, i + 1, j, k), 1.0),
                (s.edge_id(Axis::X, i, j + 1, k), -1.0),
                (s.edge_id(Axis::Y, i, j, k), -1.0),
            ],
        }
    }

    /// Cells adjacent to an edge (up to four), as cell ids.
    pub fn edge_adjacent_cells(&self, axis: Axis, c: [usize; 3]) -> Vec<usize> {
        let [i, j, k] = c;
        let s = &self.spec;
        let mut cells = Vec::with_capacity(4);
        let (t1, n1, t2, n2) = match axis {
            Axis::X => (j, s.ny, k, s.nz),
            Axis::Y => (i, s.nx, k, s.nz),
            Axis::Z => (i, s.nx, j, s.ny),
        };
        for d1 in [t1.wrapping_sub(1), t1] {
            if d1 >= n1 {
                continue;
            }
            for d2 in [t2.wrapping_sub(1), t2] {
                if d2 >= n2 {
                    continue;
                }
                let id = match axis {
                    Axis::X => s.cell_id(i, d1, d2),
                    Axis::Y => s.cell_id(d1, j, d2),
                    Axis::Z => s.cell_id(d1, d2, k),
                };
                cells.push(id);
            }
        }
        cells
    }

    /// Cells adjacent to a face (up to two), as cell ids.
    pub fn face_adjacent_cells(&self, axis: Axis, c: [usize; 3]) -> Vec<usize> {
        let [i, j, k] = c;
        let s = &self.spec;
        let (t, n) = match axis {
            Axis::X => (i, s.nx),
            Axis::Y => (j, s.ny),
            Axis::Z => (k, s.nz),
        };
        let mut cells = Vec::with_capacity(2);
        for d in [t.wrapping_sub(1), t] {
            if d >= n {
                continue;
            }
            let id = match axis {
                Axis::X => s.cell_id(d, j, k),
                Axis::Y => s.cell_id(i, d, k),
                Axis::Z => s.cell_id(i, j, d),
            };
            cells.push(id);
        }
        cells
    }
}

/// Discrete gradient and curl incidence matrices on the interior entities.
#[derive(Debug, Clone)]
pub struct IncidenceOps {
    /// interior edges x interior nodes, entries in {-1, 0, +1}
    pub grad: Csr,
    /// interior faces x interior edges, entries in {-1, 0, +1}
    pub curl: Csr,
}

impl IncidenceOps {
    pub fn assemble(dofmap: &DofMap) -> Self {
        IncidenceOps {
            grad: assemble_gradient(dofmap),
            curl: assemble_curl(dofmap),
        }
    }
}

/// Edge-node incidence on interior entities, orientation `head - tail`.
pub fn assemble_gradient(dofmap: &DofMap) -> Csr {
    let mut coo = Coo::new(dofmap.num_interior_edges(), dofmap.num_interior_nodes());
    for (row, &(axis, c)) in dofmap.edges.iter().enumerate() {
        let (tail, head) = dofmap.edge_endpoints(axis, c);
        if let Some(col) = dofmap.node_interior[head] {
            coo.push(row, col, 1.0);
        }
        if let Some(col) = dofmap.node_interior[tail] {
            coo.push(row, col, -1.0);
        }
    }
    coo.to_csr()
}

/// Face-edge incidence on interior entities, right-hand-rule orientation.
pub fn assemble_curl(dofmap: &DofMap) -> Csr {
    let mut coo = Coo::new(dofmap.num_interior_faces(), dofmap.num_interior_edges());
    for (row, &(axis, c)) in dofmap.faces.iter().enumerate() {
        for (edge_id, sign) in dofmap.face_edges(axis, c) {
            if let Some(col) = dofmap.edge_interior[edge_id] {
                coo.push(row, col, sign);
            }
        }
    }
    coo.to_csr()
}

/// Pre-elimination gradient over all nodes and edges (boundary included).
/// Every row carries exactly one +1 and one -1.
pub fn full_gradient(spec: &GridSpec) -> Csr {
    let mut coo = Coo::new(spec.num_edges(), spec.num_nodes());
    for &axis in &AXES {
        let (ni, nj, nk) = edge_ranges(spec, axis);
        for k in 0..nk {
            for j in 0..nj {
                for i in 0..ni {
                    let row = spec.edge_id(axis, i, j, k);
                    let (di, dj, dk) = match axis {
                        Axis::X => (1, 0, 0),
                        Axis::Y => (0, 1, 0),
                        Axis::Z => (0, 0, 1),
                    };
                    coo.push(row, spec.node_id(i + di, j + dj, k + dk), 1.0);
                    coo.push(row, spec.node_id(i, j, k), -1.0);
                }
            }
        }
    }
    coo.to_csr()
}

/// Pre-elimination curl over all faces and edges.
pub fn full_curl(spec: &GridSpec) -> Csr {
    // Borrow the face-edge stencil from a throwaway DofMap; the stencil only
    // uses the spec.
    let dofmap = DofMap {
        spec: *spec,
        node_interior: Vec::new(),
        nodes: Vec::new(),
        edge_interior: Vec::new(),
        edges: Vec::new(),
        face_interior: Vec::new(),
        faces: Vec::new(),
        ground: None,
    };
    let mut coo = Coo::new(spec.num_faces(), spec.num_edges());
    for &axis in &AXES {
        let (ni, nj, nk) = face_ranges(spec, axis);
        for k in 0..nk {
            for j in 0..nj {
                for i in 0..ni {
                    let row = spec.face_id(axis, i, j, k);
                    for (edge_id, sign) in dofmap.face_edges(axis, [i, j, k]) {
                        coo.push(row, edge_id, sign);
                    }
                }
            }
        }
    }
    coo.to_csr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_counts() {
        let spec = GridSpec::cube(1, 1.0).unwrap();
        assert_eq!(spec.num_nodes(), 8);
        assert_eq!(spec.num_edges(), 12);
        assert_eq!(spec.num_faces(), 6);
        assert_eq!(spec.num_cells(), 1);
    }

    #[test]
    fn unit_cube_everything_on_boundary() {
        let dofmap = build_grid(GridSpec::cube(1, 1.0).unwrap(), GroundSelector::Center).unwrap();
        assert_eq!(dofmap.num_interior_nodes(), 0);
        assert_eq!(dofmap.num_interior_edges(), 0);
        assert!(dofmap.ground.is_none());
    }

    #[test]
    fn two_cube_interior_counts() {
        let dofmap = build_grid(GridSpec::cube(2, 1.0).unwrap(), GroundSelector::Center).unwrap();
        assert_eq!(dofmap.num_interior_nodes(), 1);
        assert_eq!(dofmap.num_interior_edges(), 6);
        assert_eq!(dofmap.num_interior_faces(), 12);
        assert_eq!(dofmap.ground, Some(0));
    }

    #[test]
    fn ground_on_boundary_rejected() {
        let err = build_grid(
            GridSpec::cube(2, 1.0).unwrap(),
            GroundSelector::Node(0, 1, 1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::GroundOnBoundary { .. }));
    }

    #[test]
    fn tensor_product_interior_counts() {
        // interior nodes (n-1)^3, interior edges 3n(n-1)^2, faces 3n^2(n-1)
        for n in 2..=4 {
            let dofmap = build_grid(GridSpec::cube(n, 0.5).unwrap(), GroundSelector::Center).unwrap();
            assert_eq!(dofmap.num_interior_nodes(), (n - 1).pow(3));
            assert_eq!(dofmap.num_interior_edges(), 3 * n * (n - 1) * (n - 1));
            assert_eq!(dofmap.num_interior_faces(), 3 * n * n * (n - 1));
        }
    }

    #[test]
    fn gradient_on_two_cube_is_six_by_one() {
        let dofmap = build_grid(GridSpec::cube(2, 1.0).unwrap(), GroundSelector::Center).unwrap();
        let g = assemble_gradient(&dofmap);
        assert_eq!((g.nrows, g.ncols), (6, 1));
        // every interior edge touches the center node with a single +-1
        for row in 0..6 {
            let entries: Vec<_> = g.row(row).collect();
            assert_eq!(entries.len(), 1);
            assert_eq!(entries[0].1.abs(), 1.0);
        }
    }

    #[test]
    fn full_gradient_rows_sum_to_zero() {
        let spec = GridSpec::new(2, 3, 1, 1.0, 0.5, 2.0).unwrap();
        let g = full_gradient(&spec);
        for row in 0..g.nrows {
            let sum: f64 = g.row(row).map(|(_, v)| v).sum();
            assert_eq!(sum, 0.0);
            assert_eq!(g.row(row).count(), 2);
        }
    }

    #[test]
    fn curl_grad_is_zero_full_and_interior() {
        for (nx, ny, nz) in [(1, 1, 1), (2, 2, 2), (3, 2, 1), (4, 3, 2)] {
            let spec = GridSpec::new(nx, ny, nz, 0.3, 0.4, 0.5).unwrap();
            let cg = full_curl(&spec).matmul(&full_gradient(&spec));
            assert_eq!(cg.max_abs(), 0.0);

            let dofmap = build_grid(spec, GroundSelector::Center).unwrap();
            let ops = IncidenceOps::assemble(&dofmap);
            assert_eq!(ops.curl.matmul(&ops.grad).max_abs(), 0.0);
        }
    }

    #[test]
    fn single_face_circulation_signs() {
        let spec = GridSpec::cube(1, 1.0).unwrap();
        let c = full_curl(&spec);
        // every face row has 4 entries, two +1 and two -1
        for row in 0..c.nrows {
            let vals: Vec<f64> = c.row(row).map(|(_, v)| v).collect();
            assert_eq!(vals.len(), 4);
            assert_eq!(vals.iter().filter(|&&v| v == 1.0).count(), 2);
            assert_eq!(vals.iter().filter(|&&v| v == -1.0).count(), 2);
        }
    }
}
