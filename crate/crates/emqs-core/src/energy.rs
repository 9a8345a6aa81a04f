//! Discrete energy functionals, their gradients, and the compatibility
//! residual `E^T x - grad H`.
//!
//! Each Hamiltonian has two evaluation routes: the quadratic form `x^T E x / 2`
//! through an assembled system, and a field-wise sum of Hodge-weighted inner
//! products that never touches E. The compatibility residual compares `E^T x`
//! against the analytic gradient of the field-wise route; agreement is the
//! discrete content of the port-Hamiltonian energy certificate.

use alloc::vec;
use alloc::vec::Vec;

use crate::formulation::{BlockSystem, FormulationTag, StateLayout};
use crate::grid::IncidenceOps;
use crate::material::HodgeSet;
use crate::{Error, Result};

/// Which energy expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// Electromagnetic energy including the vector-potential-rate term.
    FullMaxwell,
    /// Quasistatic energy: electric gradient, magnetic, and the mixed term.
    Emqs,
    /// Split-potential energy with both scalar potentials.
    EmqsSplit,
    /// Reduced quasistatic energy under an exact Coulomb-type gauge.
    EmqsReduced,
}

impl HamiltonianKind {
    pub fn name(&self) -> &'static str {
        match self {
            HamiltonianKind::FullMaxwell => "FULL_MAXWELL",
            HamiltonianKind::Emqs => "EMQS",
            HamiltonianKind::EmqsSplit => "EMQS_SPLIT",
            HamiltonianKind::EmqsReduced => "EMQS_REDUCED",
        }
    }

    pub fn requires_lambda(&self) -> bool {
        matches!(self, HamiltonianKind::EmqsSplit)
    }
}

/// The energy expression whose quadratic form matches a formulation's E.
pub fn matching_kind(tag: FormulationTag) -> HamiltonianKind {
    match tag {
        FormulationTag::Maxwell => HamiltonianKind::FullMaxwell,
        FormulationTag::EmqsSplit => HamiltonianKind::EmqsSplit,
        // the Darwin variants have no compatible Hamiltonian; EMQS is the
        // energy they approximate, and it is what the ledger reports
        _ => HamiltonianKind::Emqs,
    }
}

fn wdot(u: &[f64], w: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(w).zip(v).map(|((&u, &w), &v)| u * w * v).sum()
}

fn wnorm2(u: &[f64], w: &[f64]) -> f64 {
    wdot(u, w, u)
}

/// Field-wise Hamiltonian evaluation (joules).
pub fn hamiltonian(
    kind: HamiltonianKind,
    ops: &IncidenceOps,
    hodges: &HodgeSet,
    layout: &StateLayout,
    x: &[f64],
) -> Result<f64> {
    if x.len() != layout.dim() {
        return Err(Error::DimensionMismatch { expected: layout.dim(), got: x.len() });
    }
    if kind.requires_lambda() && !layout.has_lambda {
        return Err(Error::MissingBlock("lambda"));
    }
    let a = layout.a(x);
    let phi = layout.phi(x);
    let h = layout.h(x);
    let g_phi = ops.grad.matvec(phi)?;
    let magnetic = 0.5 * wnorm2(h, &hodges.mu);
    let value = match kind {
        HamiltonianKind::FullMaxwell => {
            0.5 * (wnorm2(&g_phi, &hodges.eps) + wnorm2(a, &hodges.eps))
                + magnetic
                + wdot(a, &hodges.eps, &g_phi)
        }
        HamiltonianKind::Emqs => {
            0.5 * wnorm2(&g_phi, &hodges.eps) + magnetic + wdot(a, &hodges.eps, &g_phi)
        }
        HamiltonianKind::EmqsSplit => {
            let lambda = layout.lambda(x).expect("lambda checked above");
            let g_lambda = ops.grad.matvec(lambda)?;
            let mut g_sum = g_phi.clone();
            for (s, l) in g_sum.iter_mut().zip(&g_lambda) {
                *s += l;
            }
            0.5 * (wnorm2(&g_phi, &hodges.eps) + wnorm2(&g_lambda, &hodges.eps))
                + magnetic
                + wdot(a, &hodges.eps, &g_sum)
                + wdot(&g_phi, &hodges.eps, &g_lambda)
        }
        HamiltonianKind::EmqsReduced => 0.5 * wnorm2(&g_phi, &hodges.eps) + magnetic,
    };
    Ok(value)
}

/// Quadratic-form evaluation `x^T E x / 2` through an assembled system.
pub fn quadratic_hamiltonian(sys: &BlockSystem, x: &[f64]) -> Result<f64> {
    if x.len() != sys.layout.dim() {
        return Err(Error::DimensionMismatch { expected: sys.layout.dim(), got: x.len() });
    }
    let ex = sys.e.matvec(x)?;
    Ok(0.5 * x.iter().zip(&ex).map(|(&a, &b)| a * b).sum::<f64>())
}

/// Gradient of the Hamiltonian through the system operator: `E^T x`.
///
/// Rejects formulations whose E is not self-adjoint; for those no energy
/// function satisfies the compatibility relation.
pub fn grad_hamiltonian(sys: &BlockSystem, x: &[f64]) -> Result<Vec<f64>> {
    if !sys.tag.symmetric_e() {
        return Err(Error::NoCompatibleHamiltonian { tag: sys.tag.name() });
    }
    if x.len() != sys.layout.dim() {
        return Err(Error::DimensionMismatch { expected: sys.layout.dim(), got: x.len() });
    }
    sys.e.t_matvec(x)
}

/// Analytic gradient of the field-wise Hamiltonian, independent of E.
pub fn fieldwise_gradient(
    kind: HamiltonianKind,
    ops: &IncidenceOps,
    hodges: &HodgeSet,
    layout: &StateLayout,
    x: &[f64],
) -> Result<Vec<f64>> {
    if x.len() != layout.dim() {
        return Err(Error::DimensionMismatch { expected: layout.dim(), got: x.len() });
    }
    if kind.requires_lambda() && !layout.has_lambda {
        return Err(Error::MissingBlock("lambda"));
    }
    let a = layout.a(x);
    let phi = layout.phi(x);
    let h = layout.h(x);
    let g_phi = ops.grad.matvec(phi)?;
    let mut grad = vec![0.0; layout.dim()];

    // magnetic block is common to every kind
    for (out, (&hi, &mi)) in grad[layout.h_range()].iter_mut().zip(h.iter().zip(&hodges.mu)) {
        *out = hi * mi;
    }

    let weight = |v: &[f64]| -> Vec<f64> {
        v.iter().zip(&hodges.eps).map(|(&x, &w)| x * w).collect()
    };

    match kind {
        HamiltonianKind::FullMaxwell => {
            let mut field = g_phi.clone();
            for (f, &ai) in field.iter_mut().zip(a) {
                *f += ai;
            }
            let weighted = weight(&field);
            grad[layout.a_range()].copy_from_slice(&weighted);
            grad[layout.phi_range()].copy_from_slice(&ops.grad.t_matvec(&weighted)?);
        }
        HamiltonianKind::Emqs => {
            grad[layout.a_range()].copy_from_slice(&weight(&g_phi));
            let mut field = g_phi.clone();
            for (f, &ai) in field.iter_mut().zip(a) {
                *f += ai;
            }
            grad[layout.phi_range()].copy_from_slice(&ops.grad.t_matvec(&weight(&field))?);
        }
        HamiltonianKind::EmqsSplit => {
            let lambda = layout.lambda(x).expect("lambda checked above");
            let g_lambda = ops.grad.matvec(lambda)?;
            let mut g_sum = g_phi.clone();
            for (s, &l) in g_sum.iter_mut().zip(&g_lambda) {
                *s += l;
            }
            grad[layout.a_range()].copy_from_slice(&weight(&g_sum));
            let mut field = g_sum;
            for (f, &ai) in field.iter_mut().zip(a) {
                *f += ai;
            }
            let div_term = ops.grad.t_matvec(&weight(&field))?;
            grad[layout.phi_range()].copy_from_slice(&div_term);
            let r = layout.lambda_range().expect("lambda checked above");
            grad[r].copy_from_slice(&div_term);
        }
        HamiltonianKind::EmqsReduced => {
            grad[layout.phi_range()].copy_from_slice(&ops.grad.t_matvec(&weight(&g_phi))?);
        }
    }
    Ok(grad)
}

/// Max-norm of `E^T x - grad H_fieldwise`. Zero (to roundoff) exactly when
/// the formulation's E is compatible with the chosen energy expression.
pub fn compatibility_residual(
    sys: &BlockSystem,
    kind: HamiltonianKind,
    ops: &IncidenceOps,
    hodges: &HodgeSet,
    x: &[f64],
) -> Result<f64> {
    let lhs = sys.e.t_matvec(x)?;
    let rhs = fieldwise_gradient(kind, ops, hodges, &sys.layout, x)?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .fold(0.0f64, |m, (&l, &r)| if libm::fabs(l - r) > m { libm::fabs(l - r) } else { m }))
}

/// Central finite differences of the field-wise Hamiltonian against the
/// analytic gradient; returns the max-norm deviation.
pub fn finite_difference_gradient_check(
    kind: HamiltonianKind,
    ops: &IncidenceOps,
    hodges: &HodgeSet,
    layout: &StateLayout,
    x: &[f64],
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidMaterial(alloc::format!("step must be > 0 (got {step})")));
    }
    let grad = fieldwise_gradient(kind, ops, hodges, layout, x)?;
    let mut probe = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        probe[i] = x[i] + step;
        let plus = hamiltonian(kind, ops, hodges, layout, &probe)?;
        probe[i] = x[i] - step;
        let minus = hamiltonian(kind, ops, hodges, layout, &probe)?;
        probe[i] = x[i];
        let fd = (plus - minus) / (2.0 * step);
        let dev = libm::fabs(fd - grad[i]);
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{assemble_system, ALL_TAGS};
    use crate::grid::{build_grid, GridSpec, GroundSelector};
    use crate::material::{GaugeRegion, MaterialField};

    fn setup(n: usize) -> (IncidenceOps, HodgeSet) {
        let spec = GridSpec::cube(n, 0.4).unwrap();
        let dofmap = build_grid(spec, GroundSelector::Center).unwrap();
        let ops = IncidenceOps::assemble(&dofmap);
        let mut mat = MaterialField::uniform(spec.num_cells(), 0.3, 1.2, 2.0);
        mat.set_kappa_hat_rule(2.0, GaugeRegion::Everywhere).unwrap();
        mat.set_eps_hat(0.4, GaugeRegion::Everywhere).unwrap();
        let hodges = HodgeSet::assemble(&dofmap, &mat).unwrap();
        (ops, hodges)
    }

    fn pseudo_random(dim: usize, seed: f64) -> Vec<f64> {
        (0..dim).map(|i| libm::sin(seed + 0.61803 * i as f64)).collect()
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let (ops, hodges) = setup(2);
        let layout = StateLayout {
            n_edges: hodges.num_edges(),
            n_nodes: ops.grad.ncols,
            n_faces: hodges.num_faces(),
            has_lambda: true,
        };
        let x = vec![0.0; layout.dim()];
        for kind in [
            HamiltonianKind::FullMaxwell,
            HamiltonianKind::Emqs,
            HamiltonianKind::EmqsSplit,
            HamiltonianKind::EmqsReduced,
        ] {
            assert_eq!(hamiltonian(kind, &ops, &hodges, &layout, &x).unwrap(), 0.0);
        }
    }

    #[test]
    fn pure_magnetic_state_is_half_h_mu_h() {
        let (ops, hodges) = setup(2);
        let layout = StateLayout {
            n_edges: hodges.num_edges(),
            n_nodes: ops.grad.ncols,
            n_faces: hodges.num_faces(),
            has_lambda: true,
        };
        let mut x = vec![0.0; layout.dim()];
        let h_range = layout.h_range();
        for (i, xi) in x[h_range].iter_mut().enumerate() {
            *xi = 1.0 + 0.1 * i as f64;
        }
        let expected = 0.5 * wnorm2(layout.h(&x), &hodges.mu);
        for kind in [
            HamiltonianKind::FullMaxwell,
            HamiltonianKind::Emqs,
            HamiltonianKind::EmqsSplit,
            HamiltonianKind::EmqsReduced,
        ] {
            let v = hamiltonian(kind, &ops, &hodges, &layout, &x).unwrap();
            assert!((v - expected).abs() <= 1e-15 * expected);
        }
    }

    #[test]
    fn quadratic_matches_fieldwise_for_matching_pairs() {
        let (ops, hodges) = setup(2);
        for tag in ALL_TAGS {
            if !tag.symmetric_e() || tag == FormulationTag::EmqsLagrange {
                continue;
            }
            let sys = assemble_system(tag, &ops, &hodges).unwrap();
            let x = pseudo_random(sys.layout.dim(), 0.9);
            let quad = quadratic_hamiltonian(&sys, &x).unwrap();
            let field = hamiltonian(matching_kind(tag), &ops, &hodges, &sys.layout, &x).unwrap();
            let scale = quad.abs().max(1.0);
            assert!((quad - field).abs() <= 1e-12 * scale, "{}", tag.name());
        }
    }

    #[test]
    fn lagrange_quadratic_carries_the_extra_mixed_term() {
        let (ops, hodges) = setup(2);
        let sys = assemble_system(FormulationTag::EmqsLagrange, &ops, &hodges).unwrap();
        let x = pseudo_random(sys.layout.dim(), 2.2);
        let quad = quadratic_hamiltonian(&sys, &x).unwrap();
        let field = hamiltonian(HamiltonianKind::Emqs, &ops, &hodges, &sys.layout, &x).unwrap();
        let g_lambda = ops.grad.matvec(sys.layout.lambda(&x).unwrap()).unwrap();
        let extra = wdot(sys.layout.a(&x), &hodges.eps, &g_lambda);
        assert!((quad - (field + extra)).abs() <= 1e-12 * quad.abs().max(1.0));

        // on the lambda = 0 manifold the two agree exactly
        let mut x0 = x.clone();
        for v in &mut x0[sys.layout.lambda_range().unwrap()] {
            *v = 0.0;
        }
        let quad0 = quadratic_hamiltonian(&sys, &x0).unwrap();
        let field0 = hamiltonian(HamiltonianKind::Emqs, &ops, &hodges, &sys.layout, &x0).unwrap();
        assert!((quad0 - field0).abs() <= 1e-13 * quad0.abs().max(1.0));
    }

    #[test]
    fn compatibility_holds_for_symmetric_pairs_and_fails_for_darwin() {
        let (ops, hodges) = setup(2);
        for tag in [
            FormulationTag::Maxwell,
            FormulationTag::EmqsSymmetrized,
            FormulationTag::EmqsSplit,
            FormulationTag::EmqsCoulombSkew,
        ] {
            let sys = assemble_system(tag, &ops, &hodges).unwrap();
            let x = pseudo_random(sys.layout.dim(), 1.4);
            let res = compatibility_residual(&sys, matching_kind(tag), &ops, &hodges, &x).unwrap();
            let scale = sys.e.max_abs() * x.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            assert!(res <= 1e-12 * scale.max(1.0), "{}: {res}", tag.name());
        }

        let sys = assemble_system(FormulationTag::DarwinUngauged, &ops, &hodges).unwrap();
        let x = pseudo_random(sys.layout.dim(), 1.4);
        let res =
            compatibility_residual(&sys, HamiltonianKind::Emqs, &ops, &hodges, &x).unwrap();
        assert!(res > 1e-6);
    }

    #[test]
    fn grad_rejects_non_self_adjoint_formulations() {
        let (ops, hodges) = setup(2);
        let sys = assemble_system(FormulationTag::DarwinUngauged, &ops, &hodges).unwrap();
        let x = vec![0.0; sys.layout.dim()];
        assert!(matches!(
            grad_hamiltonian(&sys, &x),
            Err(Error::NoCompatibleHamiltonian { .. })
        ));
    }

    #[test]
    fn maxwell_gradient_blocks_match_the_field_expressions() {
        let (ops, hodges) = setup(2);
        let sys = assemble_system(FormulationTag::Maxwell, &ops, &hodges).unwrap();
        let x = pseudo_random(sys.layout.dim(), 3.1);
        let grad = grad_hamiltonian(&sys, &x).unwrap();
        let layout = sys.layout;
        // block 1: Meps (a + grad phi); block 3: Mmu h
        let g_phi = ops.grad.matvec(layout.phi(&x)).unwrap();
        for i in 0..layout.n_edges {
            let expected = hodges.eps[i] * (layout.a(&x)[i] + g_phi[i]);
            assert!((grad[i] - expected).abs() < 1e-13);
        }
        for (i, gi) in grad[layout.h_range()].iter().enumerate() {
            assert!((gi - hodges.mu[i] * layout.h(&x)[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn finite_differences_confirm_the_gradient() {
        let (ops, hodges) = setup(2);
        let layout = StateLayout {
            n_edges: hodges.num_edges(),
            n_nodes: ops.grad.ncols,
            n_faces: hodges.num_faces(),
            has_lambda: true,
        };
        let x = pseudo_random(layout.dim(), 0.2);
        for kind in [
            HamiltonianKind::FullMaxwell,
            HamiltonianKind::Emqs,
            HamiltonianKind::EmqsSplit,
            HamiltonianKind::EmqsReduced,
        ] {
            let dev =
                finite_difference_gradient_check(kind, &ops, &hodges, &layout, &x, 1e-4).unwrap();
            assert!(dev <= 1e-8, "{}: {dev}", kind.name());
            // halving the step must not make things worse (quadratic H)
            let dev2 =
                finite_difference_gradient_check(kind, &ops, &hodges, &layout, &x, 5e-5).unwrap();
            assert!(dev2 <= dev.max(1e-10) * 4.0);
        }
    }
}
