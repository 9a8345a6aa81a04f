//! Consistent initialization and theta-method time stepping of the
//! differential-algebraic system E dx/dt = (J - R) x + B u.
//!
//! The step matrix K = E - theta*dt*(J - R) is factored once per run. For the
//! full Maxwell formulation the continuity rows of K are the exact divergence
//! of the Ampere rows, so K is structurally rank-deficient by the gauge
//! freedom of the potentials; the stepper replaces those redundant rows with
//! the discrete Coulomb slice G^T Meps (a+ - a-) = 0. Any solution of the
//! remaining rows satisfies the replaced rows identically, so the stepped
//! trajectory still solves the original system exactly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, fabs, sin};

use crate::energy::{hamiltonian, matching_kind, quadratic_hamiltonian};
use crate::formulation::{BlockSystem, FormulationTag};
use crate::grid::IncidenceOps;
use crate::linalg::{lu_factor, LuFactors};
use crate::material::HodgeSet;
use crate::sparse::{Coo, Csr};
use crate::{Error, Result};

/// Time profile of the source current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemporalProfile {
    Sine { frequency: f64 },
    GaussianPulse { t0: f64, sigma: f64 },
    /// C^1 ramp from 0 to 1 over `t_rise`, constant afterwards.
    SmoothRamp { t_rise: f64 },
}

impl TemporalProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TemporalProfile::Sine { frequency } => {
                sin(2.0 * core::f64::consts::PI * frequency * t)
            }
            TemporalProfile::GaussianPulse { t0, sigma } => {
                let s = (t - t0) / sigma;
                exp(-0.5 * s * s)
            }
            TemporalProfile::SmoothRamp { t_rise } => {
                if t <= 0.0 {
                    0.0
                } else if t >= t_rise {
                    1.0
                } else {
                    let s = t / t_rise;
                    s * s * (3.0 - 2.0 * s)
                }
            }
        }
    }
}

/// Edge-integrated source current: spatial pattern times a bounded profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceWaveform {
    pub pattern: Vec<f64>,
    pub amplitude: f64,
    pub profile: TemporalProfile,
}

impl SourceWaveform {
    pub fn off(n_edges: usize) -> Self {
        SourceWaveform {
            pattern: vec![0.0; n_edges],
            amplitude: 0.0,
            profile: TemporalProfile::SmoothRamp { t_rise: 1.0 },
        }
    }

    pub fn scalar(&self, t: f64) -> f64 {
        self.amplitude * self.profile.value(t)
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let s = self.scalar(t);
        self.pattern.iter().map(|&p| p * s).collect()
    }
}

/// Linear solver choice for the step equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearSolver {
    /// Dense LU with partial pivoting (desk-scale direct factorization).
    Direct,
    /// BiCGStab with a Jacobi preconditioner.
    Iterative { tolerance: f64, max_iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    /// theta in [1/2, 1]; 1/2 is implicit midpoint, 1 is implicit Euler.
    pub theta: f64,
    pub steps: usize,
    pub solver: LinearSolver,
    pub record_stride: usize,
}

impl StepperConfig {
    pub fn midpoint(dt: f64, steps: usize) -> Self {
        StepperConfig { dt, theta: 0.5, steps, solver: LinearSolver::Direct, record_stride: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be > 0 (got {})", self.dt)));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::InvalidGrid(format!(
                "theta must lie in [1/2, 1] (got {})",
                self.theta
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidGrid("record stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// State of a run: the DAE state x, the accumulated vector-potential line
/// integrals, and the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub x: Vec<f64>,
    pub a_acc: Vec<f64>,
    pub t: f64,
}

/// Consistent initialization: h satisfies the discrete flux constraint
/// Mmu h = C A0 exactly, the rate state starts at rest, lambda at zero.
pub fn consistent_init(
    sys: &BlockSystem,
    ops: &IncidenceOps,
    hodges: &HodgeSet,
    a0: &[f64],
    phi0: &[f64],
) -> Result<SimState> {
    let layout = sys.layout;
    if a0.len() != layout.n_edges {
        return Err(Error::DimensionMismatch { expected: layout.n_edges, got: a0.len() });
    }
    if phi0.len() != layout.n_nodes {
        return Err(Error::DimensionMismatch { expected: layout.n_nodes, got: phi0.len() });
    }
    let curl_a0 = ops.curl.matvec(a0)?;
    let mut x = vec![0.0; layout.dim()];
    x[layout.phi_range()].copy_from_slice(phi0);
    for ((xh, &ca), &mu) in x[layout.h_range()].iter_mut().zip(&curl_a0).zip(&hodges.mu) {
        *xh = ca / mu;
    }
    Ok(SimState { x, a_acc: a0.to_vec(), t: 0.0 })
}

enum Factorization {
    Direct(LuFactors),
    Iterative { k: Csr, tolerance: f64, max_iterations: usize },
}

/// Prepared theta-method stepper with a cached factorization.
pub struct ThetaStepper<'s> {
    sys: &'s BlockSystem,
    cfg: StepperConfig,
    /// E + (1 - theta) dt (J - R), applied to the old state.
    explicit_part: Csr,
    factorization: Factorization,
    /// G^T Meps rows used by the Maxwell gauge slice and the gauge residual.
    gt_meps: Csr,
}

impl<'s> ThetaStepper<'s> {
    pub fn new(
        sys: &'s BlockSystem,
        ops: &IncidenceOps,
        hodges: &HodgeSet,
        cfg: StepperConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let layout = sys.layout;
        let dim = layout.dim();
        let th_dt = cfg.theta * cfg.dt;

        let gt_meps = ops.grad.scale_rows(&hodges.eps).transpose();

        let mut k = Coo::new(dim, dim);
        k.push_csr(&sys.e, 0, 0, 1.0);
        k.push_csr(&sys.j, 0, 0, -th_dt);
        k.push_csr(&sys.r, 0, 0, th_dt);
        let mut k = k.to_csr();

        if sys.tag == FormulationTag::Maxwell {
            k = replace_rows(&k, layout.phi_range(), &gt_meps, 0);
        }

        let mut explicit_part = Coo::new(dim, dim);
        let ex_dt = (1.0 - cfg.theta) * cfg.dt;
        explicit_part.push_csr(&sys.e, 0, 0, 1.0);
        explicit_part.push_csr(&sys.j, 0, 0, ex_dt);
        explicit_part.push_csr(&sys.r, 0, 0, -ex_dt);
        let explicit_part = explicit_part.to_csr();

        let factorization = match cfg.solver {
            LinearSolver::Direct => {
                let ctx = format!(
                    "step matrix of {} (theta = {}, dt = {:e}); if this formulation is \
                     ungauged, enable a gauge (kappa_hat/eps_hat) or ground the potentials",
                    sys.tag.name(),
                    cfg.theta,
                    cfg.dt
                );
                Factorization::Direct(lu_factor(&k.to_dense(), &ctx)?)
            }
            LinearSolver::Iterative { tolerance, max_iterations } => {
                Factorization::Iterative { k, tolerance, max_iterations }
            }
        };

        Ok(ThetaStepper { sys, cfg, explicit_part, factorization, gt_meps })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    /// Advances one step, returning the new state.
    pub fn step(&self, state: &SimState, source: &SourceWaveform) -> Result<SimState> {
        let layout = self.sys.layout;
        if state.x.len() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), got: state.x.len() });
        }
        let cfg = &self.cfg;
        let t_eval = state.t + cfg.theta * cfg.dt;
        let u = source.eval(t_eval);

        let mut rhs = self.explicit_part.matvec(&state.x)?;
        let bu = self.sys.b.matvec(&u)?;
        for (r, v) in rhs.iter_mut().zip(&bu) {
            *r += cfg.dt * v;
        }
        if self.sys.tag == FormulationTag::Maxwell {
            // gauge slice: G^T Meps a+ = G^T Meps a-
            let gauge = self.gt_meps.matvec(layout.a(&state.x))?;
            rhs[layout.phi_range()].copy_from_slice(&gauge);
        }

        let x_new = match &self.factorization {
            Factorization::Direct(lu) => lu.solve(&rhs)?,
            Factorization::Iterative { k, tolerance, max_iterations } => {
                bicgstab(k, &rhs, *tolerance, *max_iterations)?
            }
        };

        let mut a_acc = state.a_acc.clone();
        let a_old = layout.a(&state.x);
        let a_new = layout.a(&x_new);
        for ((acc, &an), &ao) in a_acc.iter_mut().zip(a_new).zip(a_old) {
            *acc += cfg.dt * (cfg.theta * an + (1.0 - cfg.theta) * ao);
        }
        Ok(SimState { x: x_new, a_acc, t: state.t + cfg.dt })
    }

    /// Max-norm of the implicit-gauge increment G^T Meps (a+ - a-).
    pub fn gauge_residual(&self, old: &SimState, new: &SimState) -> Result<f64> {
        let layout = self.sys.layout;
        let diff: Vec<f64> = layout
            .a(&new.x)
            .iter()
            .zip(layout.a(&old.x))
            .map(|(&n, &o)| n - o)
            .collect();
        let r = self.gt_meps.matvec(&diff)?;
        Ok(max_abs(&r))
    }
}

fn replace_rows(k: &Csr, rows: core::ops::Range<usize>, block: &Csr, block_col_off: usize) -> Csr {
    let mut coo = Coo::new(k.nrows, k.ncols);
    for r in 0..k.nrows {
        if rows.contains(&r) {
            continue;
        }
        for (c, v) in k.row(r) {
            coo.push(r, c, v);
        }
    }
    for (i, r) in rows.clone().enumerate() {
        for (c, v) in block.row(i) {
            coo.push(r, block_col_off + c, v);
        }
    }
    coo.to_csr()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| if fabs(x) > m { fabs(x) } else { m })
}

fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|&x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Solves K x = b with the configured solver; the direct path factors on the
/// spot, so prefer [`ThetaStepper`] inside time loops.
pub fn solve_linear(k: &Csr, b: &[f64], solver: LinearSolver) -> Result<Vec<f64>> {
    if k.nrows != k.ncols {
        return Err(Error::DimensionMismatch { expected: k.nrows, got: k.ncols });
    }
    match solver {
        LinearSolver::Direct => lu_factor(&k.to_dense(), "solve_linear")?.solve(b),
        LinearSolver::Iterative { tolerance, max_iterations } => {
            bicgstab(k, b, tolerance, max_iterations)
        }
    }
}

/// Jacobi-preconditioned BiCGStab.
fn bicgstab(k: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = k.nrows;
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    // Jacobi preconditioner; unit fallback on zero diagonal
    let mut inv_diag = vec![1.0; n];
    for r in 0..n {
        for (c, v) in k.row(r) {
            if c == r && v != 0.0 {
                inv_diag[r] = 1.0 / v;
            }
        }
    }
    let precond = |v: &[f64]| -> Vec<f64> {
        v.iter().zip(&inv_diag).map(|(&x, &d)| x * d).collect()
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for _ in 0..max_iter {
        let rho_new = dot(&r0, &r);
        if fabs(rho_new) < 1e-300 {
            return Err(Error::SolverStagnated { residual: norm2(&r) / b_norm, tolerance: tol });
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let ph = precond(&p);
        v = k.matvec(&ph)?;
        alpha = rho / dot(&r0, &v);
        let s: Vec<f64> = r.iter().zip(&v).map(|(&ri, &vi)| ri - alpha * vi).collect();
        if norm2(&s) / b_norm <= tol {
            for i in 0..n {
                x[i] += alpha * ph[i];
            }
            return Ok(x);
        }
        let sh = precond(&s);
        let t = k.matvec(&sh)?;
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return Err(Error::SolverStagnated { residual: norm2(&s) / b_norm, tolerance: tol });
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        if norm2(&r) / b_norm <= tol {
            return Ok(x);
        }
        if omega == 0.0 {
            return Err(Error::SolverStagnated { residual: norm2(&r) / b_norm, tolerance: tol });
        }
    }
    Err(Error::SolverStagnated { residual: norm2(&r) / b_norm, tolerance: tol })
}

/// One ledger row per step; step 0 carries the initial energies and zeros for
/// the per-step quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub step: usize,
    pub t: f64,
    pub h_quadratic: f64,
    pub h_fieldwise: f64,
    pub dissipation: f64,
    pub port_power: f64,
    pub balance_residual: f64,
    pub gauge_residual: f64,
    pub lambda_max: f64,
    pub flux_residual: f64,
}

/// Recorded trajectory: states and outputs at the record stride (step 0
/// included), plus the per-step energy ledger.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub record_steps: Vec<usize>,
    pub states: Vec<SimState>,
    pub outputs: Vec<Vec<f64>>,
    pub ledger: Vec<LedgerRow>,
}

/// Runs `cfg.steps` theta steps from `init`, recording states and the energy
/// ledger. The flux constraint Mmu h - C A_acc is monitored every step.
pub fn run(
    sys: &BlockSystem,
    ops: &IncidenceOps,
    hodges: &HodgeSet,
    init: SimState,
    cfg: StepperConfig,
    source: &SourceWaveform,
) -> Result<Trajectory> {
    let stepper = ThetaStepper::new(sys, ops, hodges, cfg)?;
    let layout = sys.layout;
    let kind = matching_kind(sys.tag);

    let flux_residual = |s: &SimState| -> Result<f64> {
        let curl_acc = ops.curl.matvec(&s.a_acc)?;
        let h = layout.h(&s.x);
        let mut worst = 0.0f64;
        for ((&hi, &mu), &ca) in h.iter().zip(&hodges.mu).zip(&curl_acc) {
            let r = fabs(hi * mu - ca);
            if r > worst {
                worst = r;
            }
        }
        Ok(worst)
    };
    let lambda_max = |s: &SimState| layout.lambda(&s.x).map(max_abs).unwrap_or(0.0);

    let mut ledger = Vec::with_capacity(cfg.steps + 1);
    ledger.push(LedgerRow {
        step: 0,
        t: init.t,
        h_quadratic: quadratic_hamiltonian(sys, &init.x)?,
        h_fieldwise: hamiltonian(kind, ops, hodges, &layout, &init.x)?,
        dissipation: 0.0,
        port_power: 0.0,
        balance_residual: 0.0,
        gauge_residual: 0.0,
        lambda_max: lambda_max(&init),
        flux_residual: flux_residual(&init)?,
    });

    let mut record_steps = vec![0];
    let mut states = vec![init.clone()];
    let mut outputs = vec![sys.b.t_matvec(&init.x)?];

    let mut current = init;
    for step in 1..=cfg.steps {
        let next = stepper.step(&current, source)?;

        let x_mid: Vec<f64> = current
            .x
            .iter()
            .zip(&next.x)
            .map(|(&o, &n)| 0.5 * (o + n))
            .collect();
        let dissipation = dot(&x_mid, &sys.r.matvec(&x_mid)?);
        let y_mid = sys.b.t_matvec(&x_mid)?;
        let u_mid = source.eval(current.t + cfg.theta * cfg.dt);
        let port_power = dot(&y_mid, &u_mid);
        let h_prev = ledger.last().expect("nonempty").h_quadratic;
        let h_quadratic = quadratic_hamiltonian(sys, &next.x)?;
        let balance_residual =
            fabs(h_quadratic - h_prev - cfg.dt * (-dissipation + port_power));

        ledger.push(LedgerRow {
            step,
            t: next.t,
            h_quadratic,
            h_fieldwise: hamiltonian(kind, ops, hodges, &layout, &next.x)?,
            dissipation,
            port_power,
            balance_residual,
            gauge_residual: stepper.gauge_residual(&current, &next)?,
            lambda_max: lambda_max(&next),
            flux_residual: flux_residual(&next)?,
        });

        if step % cfg.record_stride == 0 || step == cfg.steps {
            record_steps.push(step);
            states.push(next.clone());
            outputs.push(sys.b.t_matvec(&next.x)?);
        }
        current = next;
    }

    Ok(Trajectory { record_steps, states, outputs, ledger })
}
