//! Block operator assembly for the quasistatic field formulations.
//!
//! Every formulation is a quadruple (E, J, R, B) over the state blocks
//! (a, phi, h) or (a, phi, h, lambda), where `a` holds edge line integrals of
//! the vector potential rate, `phi` nodal values of the electric scalar
//! potential, `h` dual line integrals of the magnetic field, and `lambda` an
//! auxiliary nodal gauge potential. The discrete dictionary is
//! grad -> G, primal curl -> C, dual curl -> C^T, -div -> G^T, and the
//! material coefficients become the diagonal Hodge matrices.

use alloc::vec::Vec;

use crate::grid::IncidenceOps;
use crate::linalg::symmetric_eigenvalues;
use crate::material::HodgeSet;
use crate::sparse::{Coo, Csr};
use crate::{Error, Result};

/// The field formulations this crate assembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulationTag {
    /// Full Maxwell in potentials; E carries the second time derivative of
    /// the vector potential.
    Maxwell,
    /// Darwin-Ampere plus Darwin continuity, no gauge: E is not self-adjoint.
    DarwinUngauged,
    /// Darwin with an artificial-conductivity gauge folded into R
    /// (R intentionally non-symmetric).
    DarwinKappaGauged,
    /// Darwin with an artificial-permittivity gauge folded into E
    /// (E intentionally non-symmetric).
    DarwinEpsGauged,
    /// Darwin-Ampere plus the full Maxwell continuity equation: symmetric E.
    EmqsSymmetrized,
    /// Symmetrized system with an explicit Coulomb-type gauge via a Lagrange
    /// multiplier coupled through E.
    EmqsLagrange,
    /// Split electric potential: the field is -a - grad(phi + lambda).
    EmqsSplit,
    /// Explicit Coulomb-type gauge enforced skew-symmetrically through J with
    /// the artificial conductivity.
    EmqsCoulombSkew,
}

pub const ALL_TAGS: [FormulationTag; 8] = [
    FormulationTag::Maxwell,
    FormulationTag::DarwinUngauged,
    FormulationTag::DarwinKappaGauged,
    FormulationTag::DarwinEpsGauged,
    FormulationTag::EmqsSymmetrized,
    FormulationTag::EmqsLagrange,
    FormulationTag::EmqsSplit,
    FormulationTag::EmqsCoulombSkew,
];

impl FormulationTag {
    pub fn name(&self) -> &'static str {
        match self {
            FormulationTag::Maxwell => "MAXWELL",
            FormulationTag::DarwinUngauged => "DARWIN_UNGAUGED",
            FormulationTag::DarwinKappaGauged => "DARWIN_KAPPA_GAUGED",
            FormulationTag::DarwinEpsGauged => "DARWIN_EPS_GAUGED",
            FormulationTag::EmqsSymmetrized => "EMQS_SYMMETRIZED",
            FormulationTag::EmqsLagrange => "EMQS_LAGRANGE",
            FormulationTag::EmqsSplit => "EMQS_SPLIT",
            FormulationTag::EmqsCoulombSkew => "EMQS_COULOMB_SKEW",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        ALL_TAGS.iter().copied().find(|t| t.name() == name)
    }

    /// Whether the state carries the auxiliary lambda block.
    pub fn has_lambda(&self) -> bool {
        matches!(
            self,
            FormulationTag::EmqsLagrange
                | FormulationTag::EmqsSplit
                | FormulationTag::EmqsCoulombSkew
        )
    }

    /// Whether E is self-adjoint by construction.
    pub fn symmetric_e(&self) -> bool {
        !matches!(
            self,
            FormulationTag::DarwinUngauged
                | FormulationTag::DarwinKappaGauged
                | FormulationTag::DarwinEpsGauged
        )
    }

    /// Whether R is symmetric positive semi-definite by construction.
    pub fn symmetric_r(&self) -> bool {
        !matches!(self, FormulationTag::DarwinKappaGauged)
    }
}

/// Block offsets of the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLayout {
    pub n_edges: usize,
    pub n_nodes: usize,
    pub n_faces: usize,
    pub has_lambda: bool,
}

impl StateLayout {
    pub fn dim(&self) -> usize {
        self.n_edges + self.n_nodes + self.n_faces + if self.has_lambda { self.n_nodes } else { 0 }
    }

    pub fn a_range(&self) -> core::ops::Range<usize> {
        0..self.n_edges
    }

    pub fn phi_range(&self) -> core::ops::Range<usize> {
        self.n_edges..self.n_edges + self.n_nodes
    }

    pub fn h_range(&self) -> core::ops::Range<usize> {
        let o = self.n_edges + self.n_nodes;
        o..o + self.n_faces
    }

    pub fn lambda_range(&self) -> Option<core::ops::Range<usize>> {
        if self.has_lambda {
            let o = self.n_edges + self.n_nodes + self.n_faces;
            Some(o..o + self.n_nodes)
        } else {
            None
        }
    }

    pub fn a<'x>(&self, x: &'x [f64]) -> &'x [f64] {
        &x[self.a_range()]
    }

    pub fn phi<'x>(&self, x: &'x [f64]) -> &'x [f64] {
        &x[self.phi_range()]
    }

    pub fn h<'x>(&self, x: &'x [f64]) -> &'x [f64] {
        &x[self.h_range()]
    }

    pub fn lambda<'x>(&self, x: &'x [f64]) -> Option<&'x [f64]> {
        self.lambda_range().map(|r| &x[r])
    }
}

/// Assembled sparse block system E dx/dt = (J - R) x + B u.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub tag: FormulationTag,
    pub layout: StateLayout,
    pub e: Csr,
    pub j: Csr,
    pub r: Csr,
    /// state dim x interior edges
    pub b: Csr,
}

/// Assembles the block system for `tag` from incidence and Hodge matrices.
pub fn assemble_system(tag: FormulationTag, ops: &IncidenceOps, hodges: &HodgeSet) -> Result<BlockSystem> {
    let n_edges = ops.grad.nrows;
    let n_nodes = ops.grad.ncols;
    let n_faces = ops.curl.nrows;
    if hodges.num_edges() != n_edges || hodges.num_faces() != n_faces {
        return Err(Error::DimensionMismatch { expected: n_edges, got: hodges.num_edges() });
    }
    match tag {
        FormulationTag::DarwinKappaGauged | FormulationTag::EmqsCoulombSkew => {
            if hodges.kappa_hat.iter().all(|&v| v == 0.0) {
                return Err(Error::MissingArtificialMaterial {
                    tag: tag.name(),
                    coefficient: "kappa_hat",
                });
            }
        }
        FormulationTag::DarwinEpsGauged
            if hodges.eps_hat.iter().all(|&v| v == 0.0) => {
                return Err(Error::MissingArtificialMaterial {
                    tag: tag.name(),
                    coefficient: "eps_hat",
                });
            }
        _ => {}
    }

    let layout = StateLayout { n_edges, n_nodes, n_faces, has_lambda: tag.has_lambda() };
    let dim = layout.dim();
    let (oa, op, oh) = (0, n_edges, n_edges + n_nodes);
    let ol = n_edges + n_nodes + n_faces; // only used with lambda

    let g = &ops.grad;
    let c = &ops.curl;
    let ct = c.transpose();
    let me_g = g.scale_rows(&hodges.eps); // Meps * G
    let gt_me = me_g.transpose(); // G^T * Meps
    let lap_e = g.sandwich(&hodges.eps); // G^T Meps G
    let mk_g = g.scale_rows(&hodges.kappa);
    let gt_mk = mk_g.transpose();
    let lap_k = g.sandwich(&hodges.kappa);

    let mut e = Coo::new(dim, dim);
    let mut j = Coo::new(dim, dim);
    let mut r = Coo::new(dim, dim);
    let mut b = Coo::new(dim, n_edges);

    // shared skeleton: J couples a and h, R carries the conduction terms,
    // B injects the source current into the Ampere and continuity rows
    j.push_csr(&ct, oa, oh, -1.0);
    j.push_csr(c, oh, oa, 1.0);
    r.push_diag(&hodges.kappa, oa, oa, 1.0);
    r.push_csr(&mk_g, oa, op, 1.0);
    r.push_csr(&gt_mk, op, oa, 1.0);
    r.push_csr(&lap_k, op, op, 1.0);
    b.push_eye(n_edges, oa, 0, 1.0);
    b.push_csr(&g.transpose(), op, 0, 1.0);

    // shared E skeleton: electric coupling in the a/phi rows, magnetic block
    e.push_csr(&me_g, oa, op, 1.0);
    e.push_csr(&lap_e, op, op, 1.0);
    e.push_diag(&hodges.mu, oh, oh, 1.0);

    match tag {
        FormulationTag::Maxwell => {
            e.push_diag(&hodges.eps, oa, oa, 1.0);
            e.push_csr(&gt_me, op, oa, 1.0);
        }
        FormulationTag::DarwinUngauged => {}
        FormulationTag::DarwinKappaGauged => {
            let mkh_g = g.scale_rows(&hodges.kappa_hat);
            r.push_csr(&mkh_g.transpose(), op, oa, 1.0);
        }
        FormulationTag::DarwinEpsGauged => {
            let meh_g = g.scale_rows(&hodges.eps_hat);
            e.push_csr(&meh_g.transpose(), op, oa, 1.0);
        }
        FormulationTag::EmqsSymmetrized => {
            e.push_csr(&gt_me, op, oa, 1.0);
        }
        FormulationTag::EmqsLagrange => {
            e.push_csr(&gt_me, op, oa, 1.0);
            e.push_csr(&me_g, oa, ol, 1.0);
            e.push_csr(&gt_me, ol, oa, 1.0);
        }
        FormulationTag::EmqsSplit => {
            e.push_csr(&gt_me, op, oa, 1.0);
            e.push_csr(&me_g, oa, ol, 1.0);
            e.push_csr(&lap_e, op, ol, 1.0);
            e.push_csr(&gt_me, ol, oa, 1.0);
            e.push_csr(&lap_e, ol, op, 1.0);
            e.push_csr(&lap_e, ol, ol, 1.0);
            b.push_csr(&g.transpose(), ol, 0, 1.0);
        }
        FormulationTag::EmqsCoulombSkew => {
            e.push_csr(&gt_me, op, oa, 1.0);
            let mkh_g = g.scale_rows(&hodges.kappa_hat);
            j.push_csr(&mkh_g, oa, ol, -1.0);
            j.push_csr(&mkh_g.transpose(), ol, oa, 1.0);
        }
    }

    Ok(BlockSystem {
        tag,
        layout,
        e: e.to_csr(),
        j: j.to_csr(),
        r: r.to_csr(),
        b: b.to_csr(),
    })
}

/// Structural property measurements of an assembled system.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub tag: FormulationTag,
    pub dim: usize,
    pub e_symmetry_defect: f64,
    pub j_skew_defect: f64,
    pub r_symmetry_defect: f64,
    /// Minimum eigenvalue of the symmetrized R; omitted above `dense_limit`.
    pub r_min_eigenvalue: Option<f64>,
}

/// Default state-dimension cap for the dense eigenvalue check.
pub const DENSE_EIG_LIMIT: usize = 2000;

pub fn structure_report(sys: &BlockSystem, dense_limit: usize) -> Result<StructureReport> {
    let dim = sys.layout.dim();
    let r_min_eigenvalue = if dim <= dense_limit {
        // eigenvalues of (R + R^T)/2
        let mut sym = Coo::new(dim, dim);
        sym.push_csr(&sys.r, 0, 0, 0.5);
        sym.push_csr(&sys.r.transpose(), 0, 0, 0.5);
        let ev = symmetric_eigenvalues(&sym.to_csr().to_dense())?;
        ev.first().copied()
    } else {
        None
    };
    Ok(StructureReport {
        tag: sys.tag,
        dim,
        e_symmetry_defect: sys.e.symmetry_defect(),
        j_skew_defect: sys.j.skew_defect(),
        r_symmetry_defect: sys.r.symmetry_defect(),
        r_min_eigenvalue,
    })
}

/// System output y = B^T x, the negative electric-field line integrals.
pub fn output(sys: &BlockSystem, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != sys.layout.dim() {
        return Err(Error::DimensionMismatch { expected: sys.layout.dim(), got: x.len() });
    }
    sys.b.t_matvec(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, GridSpec, GroundSelector};
    use crate::material::{GaugeRegion, MaterialField};
    use alloc::vec;
    use alloc::vec::Vec;

    fn setup(n: usize) -> (IncidenceOps, HodgeSet, MaterialField) {
        let spec = GridSpec::cube(n, 0.5).unwrap();
        let dofmap = build_grid(spec, GroundSelector::Center).unwrap();
        let ops = IncidenceOps::assemble(&dofmap);
        let mut mat = MaterialField::uniform(spec.num_cells(), 0.7, 2.0, 1.5);
        mat.set_kappa_hat_rule(0.5, GaugeRegion::Everywhere).unwrap();
        mat.set_eps_hat(0.3, GaugeRegion::Everywhere).unwrap();
        let hodges = HodgeSet::assemble(&dofmap, &mat).unwrap();
        (ops, hodges, mat)
    }

    #[test]
    fn j_skew_for_every_tag() {
        let (ops, hodges, _) = setup(3);
        for tag in ALL_TAGS {
            let sys = assemble_system(tag, &ops, &hodges).unwrap();
            assert_eq!(sys.j.skew_defect(), 0.0, "{}", tag.name());
        }
    }

    #[test]
    fn e_symmetry_profile() {
        let (ops, hodges, _) = setup(3);
        for tag in ALL_TAGS {
            let sys = assemble_system(tag, &ops, &hodges).unwrap();
            let defect = sys.e.symmetry_defect();
            if tag.symmetric_e() {
                assert_eq!(defect, 0.0, "{}", tag.name());
            } else {
                assert!(defect > 0.0, "{}", tag.name());
            }
        }
    }

    #[test]
    fn r_symmetry_profile() {
        let (ops, hodges, _) = setup(3);
        for tag in ALL_TAGS {
            let sys = assemble_system(tag, &ops, &hodges).unwrap();
            let defect = sys.r.symmetry_defect();
            if tag.symmetric_r() {
                assert_eq!(defect, 0.0, "{}", tag.name());
            } else {
                assert!(defect > 0.0, "{}", tag.name());
            }
        }
    }

    #[test]
    fn darwin_asymmetry_is_the_continuity_block() {
        let (ops, hodges, _) = setup(3);
        let sys = assemble_system(FormulationTag::DarwinUngauged, &ops, &hodges).unwrap();
        // the E(phi, a) block of the symmetrized system is exactly the
        // missing transpose partner of E(a, phi)
        let gt_me = ops.grad.scale_rows(&hodges.eps).transpose();
        assert_eq!(sys.e.symmetry_defect(), gt_me.max_abs());
    }

    #[test]
    fn missing_artificial_material_rejected() {
        let spec = GridSpec::cube(2, 1.0).unwrap();
        let dofmap = build_grid(spec, GroundSelector::Center).unwrap();
        let ops = IncidenceOps::assemble(&dofmap);
        let mat = MaterialField::uniform(spec.num_cells(), 0.0, 1.0, 1.0);
        let hodges = HodgeSet::assemble(&dofmap, &mat).unwrap();
        for tag in [
            FormulationTag::DarwinKappaGauged,
            FormulationTag::DarwinEpsGauged,
            FormulationTag::EmqsCoulombSkew,
        ] {
            assert!(matches!(
                assemble_system(tag, &ops, &hodges),
                Err(Error::MissingArtificialMaterial { .. })
            ));
        }
    }

    #[test]
    fn output_is_a_plus_grad_phi() {
        let (ops, hodges, _) = setup(2);
        let sys = assemble_system(FormulationTag::EmqsSplit, &ops, &hodges).unwrap();
        let layout = sys.layout;
        let dim = layout.dim();
        // deterministic pseudo-random state
        let x: Vec<f64> = (0..dim).map(|i| libm::sin(1.0 + i as f64 * 0.7)).collect();
        let y = output(&sys, &x).unwrap();
        let mut phi_plus_lambda = layout.phi(&x).to_vec();
        for (p, l) in phi_plus_lambda.iter_mut().zip(layout.lambda(&x).unwrap()) {
            *p += l;
        }
        let g_phi = ops.grad.matvec(&phi_plus_lambda).unwrap();
        for i in 0..layout.n_edges {
            assert!((y[i] - (layout.a(&x)[i] + g_phi[i])).abs() < 1e-14);
        }
    }

    #[test]
    fn output_vanishes_on_pure_gauge_states() {
        let (ops, hodges, _) = setup(3);
        let sys = assemble_system(FormulationTag::EmqsSymmetrized, &ops, &hodges).unwrap();
        let layout = sys.layout;
        let w: Vec<f64> = (0..layout.n_nodes).map(|i| (i as f64) * 0.3 - 1.0).collect();
        let mut x = vec![0.0; layout.dim()];
        let gw = ops.grad.matvec(&w).unwrap();
        x[layout.a_range()].copy_from_slice(&gw);
        for (xi, wi) in x[layout.phi_range()].iter_mut().zip(&w) {
            *xi = -wi;
        }
        let y = output(&sys, &x).unwrap();
        assert!(y.iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn row2_is_divergence_of_row1() {
        // continuity row = G^T times the Maxwell Ampere row, for E, R and B
        let (ops, hodges, _) = setup(2);
        let maxwell = assemble_system(FormulationTag::Maxwell, &ops, &hodges).unwrap();
        let emqs = assemble_system(FormulationTag::EmqsSymmetrized, &ops, &hodges).unwrap();
        let layout = maxwell.layout;
        let gt = ops.grad.transpose();
        for sys in [&maxwell, &emqs] {
            for (m, mx) in [(&sys.e, &maxwell.e), (&sys.r, &maxwell.r), (&sys.b, &maxwell.b)] {
                let row1 = extract_rows(mx, layout.a_range());
                let row2 = extract_rows(m, layout.phi_range());
                assert_eq!(row2.max_abs_diff(&gt.matmul(&row1)), 0.0);
            }
            // G^T applied to the J Ampere row vanishes (div curl = 0)
            let j_row1 = extract_rows(&sys.j, layout.a_range());
            assert_eq!(gt.matmul(&j_row1).max_abs(), 0.0);
        }
    }

    fn extract_rows(m: &Csr, rows: core::ops::Range<usize>) -> Csr {
        let mut coo = Coo::new(rows.len(), m.ncols);
        for (i, r) in rows.enumerate() {
            for (c, v) in m.row(r) {
                coo.push(i, c, v);
            }
        }
        coo.to_csr()
    }
}
