//! Cell-wise material coefficients and their diagonal Hodge matrices.
//!
//! Material laws act on integral quantities: an edge matrix carries the
//! coefficient averaged over the adjacent cells times (dual area / primal
//! length); the face matrix carries the permeability average times
//! (primal area / dual length).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{Axis, DofMap};
use crate::{Error, Result};

/// Where an artificial gauge coefficient is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeRegion {
    Everywhere,
    /// Only in cells with vanishing physical conductivity.
    NonConducting,
}

/// Per-cell material coefficients.
///
/// `kappa` is the electric conductivity (S/m), `eps` the permittivity (F/m),
/// `nu` the reluctivity (m/H, the inverse permeability). `kappa_hat` and
/// `eps_hat` are the artificial gauge coefficients; `tau` is the time
/// constant of the rule `kappa_hat = eps / tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialField {
    pub kappa: Vec<f64>,
    pub eps: Vec<f64>,
    pub nu: Vec<f64>,
    pub kappa_hat: Vec<f64>,
    pub eps_hat: Vec<f64>,
    pub tau: f64,
}

impl MaterialField {
    /// Uniform materials, artificial coefficients off.
    pub fn uniform(num_cells: usize, kappa: f64, eps: f64, nu: f64) -> Self {
        MaterialField {
            kappa: vec![kappa; num_cells],
            eps: vec![eps; num_cells],
            nu: vec![nu; num_cells],
            kappa_hat: vec![0.0; num_cells],
            eps_hat: vec![0.0; num_cells],
            tau: 1.0,
        }
    }

    pub fn num_cells(&self) -> usize {
        self.eps.len()
    }

    fn active_cells(&self, region: GaugeRegion) -> impl Iterator<Item = usize> + '_ {
        let kappa = &self.kappa;
        (0..self.num_cells()).filter(move |&c| match region {
            GaugeRegion::Everywhere => true,
            GaugeRegion::NonConducting => kappa[c] == 0.0,
        })
    }

    /// Applies the rule `kappa_hat := eps / tau` on the active cells and
    /// zeroes it elsewhere.
    pub fn set_kappa_hat_rule(&mut self, tau: f64, region: GaugeRegion) -> Result<()> {
        if !(tau > 0.0) {
            return Err(Error::InvalidMaterial(format!("tau must be > 0 (got {tau})")));
        }
        self.tau = tau;
        self.kappa_hat = vec![0.0; self.num_cells()];
        let active: Vec<usize> = self.active_cells(region).collect();
        for c in active {
            self.kappa_hat[c] = self.eps[c] / tau;
        }
        Ok(())
    }

    /// Sets a constant artificial permittivity on the active cells.
    pub fn set_eps_hat(&mut self, value: f64, region: GaugeRegion) -> Result<()> {
        if value < 0.0 {
            return Err(Error::InvalidMaterial(format!("eps_hat must be >= 0 (got {value})")));
        }
        self.eps_hat = vec![0.0; self.num_cells()];
        let active: Vec<usize> = self.active_cells(region).collect();
        for c in active {
            self.eps_hat[c] = value;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_cells();
        for (name, v) in [("kappa", &self.kappa), ("nu", &self.nu), ("kappa_hat", &self.kappa_hat), ("eps_hat", &self.eps_hat)] {
            if v.len() != n {
                return Err(Error::InvalidMaterial(format!(
                    "{name} has {} cells, expected {n}",
                    v.len()
                )));
            }
        }
        for (c, &k) in self.kappa.iter().enumerate() {
            if k < 0.0 {
                return Err(Error::InvalidMaterial(format!("kappa < 0 in cell {c}")));
            }
        }
        for (c, &e) in self.eps.iter().enumerate() {
            if !(e > 0.0) {
                return Err(Error::InvalidMaterial(format!("eps must be > 0 in cell {c}")));
            }
        }
        for (c, &nu) in self.nu.iter().enumerate() {
            if !(nu > 0.0) {
                return Err(Error::InvalidMaterial(format!("nu must be > 0 in cell {c}")));
            }
        }
        for (c, &v) in self.kappa_hat.iter().chain(self.eps_hat.iter()).enumerate() {
            if v < 0.0 {
                return Err(Error::InvalidMaterial(format!(
                    "artificial coefficient < 0 in cell {}",
                    c % n
                )));
            }
        }
        Ok(())
    }
}

/// Which coefficient an edge Hodge matrix carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeCoefficient {
    Eps,
    Kappa,
    KappaHat,
    EpsHat,
}

/// Diagonal of an edge Hodge matrix over the interior edges.
pub fn assemble_edge_hodge(dofmap: &DofMap, mat: &MaterialField, which: EdgeCoefficient) -> Result<Vec<f64>> {
    mat.validate()?;
    if mat.num_cells() != dofmap.spec.num_cells() {
        return Err(Error::InvalidMaterial(format!(
            "material has {} cells but grid has {}",
            mat.num_cells(),
            dofmap.spec.num_cells()
        )));
    }
    let coeff = match which {
        EdgeCoefficient::Eps => &mat.eps,
        EdgeCoefficient::Kappa => &mat.kappa,
        EdgeCoefficient::KappaHat => &mat.kappa_hat,
        EdgeCoefficient::EpsHat => &mat.eps_hat,
    };
    let spec = &dofmap.spec;
    let mut diag = Vec::with_capacity(dofmap.num_interior_edges());
    for &(axis, c) in &dofmap.edges {
        let (len, da, db) = match axis {
            Axis::X => (spec.dx, spec.dy, spec.dz),
            Axis::Y => (spec.dy, spec.dz, spec.dx),
            Axis::Z => (spec.dz, spec.dx, spec.dy),
        };
        let quarter = da * db / 4.0;
        let mut acc = 0.0;
        for cell in dofmap.edge_adjacent_cells(axis, c) {
            acc += coeff[cell] * quarter;
        }
        diag.push(acc / len);
    }
    Ok(diag)
}

/// Diagonal of the permeability Hodge matrix over the interior faces.
pub fn assemble_face_hodge_mu(dofmap: &DofMap, mat: &MaterialField) -> Result<Vec<f64>> {
    mat.validate()?;
    if mat.num_cells() != dofmap.spec.num_cells() {
        return Err(Error::InvalidMaterial(format!(
            "material has {} cells but grid has {}",
            mat.num_cells(),
            dofmap.spec.num_cells()
        )));
    }
    let spec = &dofmap.spec;
    let mut diag = Vec::with_capacity(dofmap.num_interior_faces());
    for &(axis, c) in &dofmap.faces {
        let (len, da, db) = match axis {
            Axis::X => (spec.dx, spec.dy, spec.dz),
            Axis::Y => (spec.dy, spec.dz, spec.dx),
            Axis::Z => (spec.dz, spec.dx, spec.dy),
        };
        let half = len / 2.0;
        let mut mu_len = 0.0;
        let mut dual_len = 0.0;
        for cell in dofmap.face_adjacent_cells(axis, c) {
            mu_len += half / mat.nu[cell];
            dual_len += half;
        }
        let mu_avg = mu_len / dual_len;
        diag.push(mu_avg * da * db / dual_len);
    }
    Ok(diag)
}

/// The complete set of diagonal material matrices on the interior entities.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeSet {
    pub eps: Vec<f64>,
    pub kappa: Vec<f64>,
    pub kappa_hat: Vec<f64>,
    pub eps_hat: Vec<f64>,
    pub mu: Vec<f64>,
}

impl HodgeSet {
    pub fn assemble(dofmap: &DofMap, mat: &MaterialField) -> Result<Self> {
        Ok(HodgeSet {
            eps: assemble_edge_hodge(dofmap, mat, EdgeCoefficient::Eps)?,
            kappa: assemble_edge_hodge(dofmap, mat, EdgeCoefficient::Kappa)?,
            kappa_hat: assemble_edge_hodge(dofmap, mat, EdgeCoefficient::KappaHat)?,
            eps_hat: assemble_edge_hodge(dofmap, mat, EdgeCoefficient::EpsHat)?,
            mu: assemble_face_hodge_mu(dofmap, mat)?,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.eps.len()
    }

    pub fn num_faces(&self) -> usize {
        self.mu.len()
    }
}
