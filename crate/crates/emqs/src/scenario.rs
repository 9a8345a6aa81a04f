//! Scenario files: a single TOML document describing grid, materials, gauge
//! coefficients, source, stepper, and the formulations to run. Parsing
//! applies all defaults and validates eagerly with field-path error
//! messages; the canonical echo of a parsed scenario re-parses to an
//! identical value.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use emqs_core::formulation::{FormulationTag, ALL_TAGS};
use emqs_core::grid::{build_grid, DofMap, GridSpec, GroundSelector, IncidenceOps};
use emqs_core::integrator::{LinearSolver, SourceWaveform, StepperConfig, TemporalProfile};
use emqs_core::material::{GaugeRegion, HodgeSet, MaterialField};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error(transparent)]
    Core(#[from] emqs_core::Error),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Invalid { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroundSpec {
    Named(String),
    Node([usize; 3]),
}

impl Default for GroundSpec {
    fn default() -> Self {
        GroundSpec::Named("center".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    #[serde(default)]
    pub ground: GroundSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRegion {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// inclusive cell index ranges
    pub min: [usize; 3],
    pub max: [usize; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub kappa: f64,
    pub eps: f64,
    pub nu: f64,
    #[serde(default, rename = "box", skip_serializing_if = "Vec::is_empty")]
    pub boxes: Vec<BoxRegion>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RegionSelector {
    #[default]
    Everywhere,
    Nonconducting,
}

impl From<RegionSelector> for GaugeRegion {
    fn from(r: RegionSelector) -> GaugeRegion {
        match r {
            RegionSelector::Everywhere => GaugeRegion::Everywhere,
            RegionSelector::Nonconducting => GaugeRegion::NonConducting,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GaugeSection {
    /// relaxation time constant for the kappa_hat = eps/tau rule; defaulted
    /// from the source when absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default)]
    pub kappa_hat_region: RegionSelector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_hat: Option<f64>,
    #[serde(default)]
    pub eps_hat_region: RegionSelector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Sine { frequency: f64 },
    GaussianPulse { t0: f64, sigma: f64 },
    SmoothRamp { t_rise: f64 },
}

impl From<&ProfileSpec> for TemporalProfile {
    fn from(p: &ProfileSpec) -> TemporalProfile {
        match *p {
            ProfileSpec::Sine { frequency } => TemporalProfile::Sine { frequency },
            ProfileSpec::GaussianPulse { t0, sigma } => TemporalProfile::GaussianPulse { t0, sigma },
            ProfileSpec::SmoothRamp { t_rise } => TemporalProfile::SmoothRamp { t_rise },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatternSpec {
    /// every `step`-th interior edge carries a unit entry
    Stride { step: usize },
    /// explicit interior edge indices
    Edges { indices: Vec<usize> },
    /// all interior edges along `axis` whose lattice coordinate lies in the
    /// inclusive box
    Box { min: [usize; 3], max: [usize; 3], axis: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    pub profile: ProfileSpec,
    pub pattern: PatternSpec,
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SolverSpec {
    Named(String),
    Iterative { tolerance: f64, max_iterations: usize },
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec::Named("direct".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    pub dt: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub steps: usize,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub solver: SolverSpec,
}

fn default_theta() -> f64 {
    0.5
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub grid: GridSection,
    pub material: MaterialSection,
    #[serde(default)]
    pub gauge: GaugeSection,
    pub source: SourceSection,
    pub stepper: StepperSection,
    pub formulations: Vec<String>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, Error> {
    let text = fs::read_to_string(path)
        .map_err(|source| Error::Read { path: path.display().to_string(), source })?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, Error> {
    let mut scenario: Scenario = toml::from_str(text)?;
    scenario.apply_defaults();
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    /// Fills every optional knob so the echoed form is self-contained.
    fn apply_defaults(&mut self) {
        if self.gauge.tau.is_none() {
            self.gauge.tau = Some(match self.source.profile {
                ProfileSpec::Sine { frequency } if frequency > 0.0 => {
                    1.0 / (2.0 * std::f64::consts::PI * frequency)
                }
                _ => 10.0 * self.stepper.dt,
            });
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let g = &self.grid;
        GridSpec::new(g.nx, g.ny, g.nz, g.dx, g.dy, g.dz)
            .map_err(|e| invalid("grid", e.to_string()))?;
        match &g.ground {
            GroundSpec::Named(name) if name == "center" => {}
            GroundSpec::Named(name) => {
                return Err(invalid("grid.ground", format!("unknown selector `{name}` (use \"center\" or [i, j, k])")));
            }
            GroundSpec::Node([i, j, k]) => {
                if *i > g.nx || *j > g.ny || *k > g.nz {
                    return Err(invalid(
                        "grid.ground",
                        format!("node [{i}, {j}, {k}] outside the {} x {} x {} node lattice", g.nx + 1, g.ny + 1, g.nz + 1),
                    ));
                }
            }
        }

        let m = &self.material;
        for (field, value, floor) in [("kappa", m.kappa, 0.0), ("eps", m.eps, f64::MIN_POSITIVE), ("nu", m.nu, f64::MIN_POSITIVE)] {
            if !(value >= floor) {
                return Err(invalid(format!("material.{field}"), format!("must be {} (got {value})", if floor == 0.0 { ">= 0" } else { "> 0" })));
            }
        }
        for (i, b) in m.boxes.iter().enumerate() {
            let label = match &b.name {
                Some(n) => format!("material.box[{i}] (\"{n}\")"),
                None => format!("material.box[{i}]"),
            };
            let dims = [g.nx, g.ny, g.nz];
            for d in 0..3 {
                if b.min[d] > b.max[d] {
                    return Err(invalid(&label, format!("min {:?} exceeds max {:?}", b.min, b.max)));
                }
                if b.max[d] >= dims[d] {
                    return Err(invalid(&label, format!("cell range {:?}..={:?} outside the {} x {} x {} cell grid", b.min, b.max, g.nx, g.ny, g.nz)));
                }
            }
            if let Some(k) = b.kappa {
                if !(k >= 0.0) {
                    return Err(invalid(&label, format!("kappa must be >= 0 (got {k})")));
                }
            }
            for (field, v) in [("eps", b.eps), ("nu", b.nu)] {
                if let Some(v) = v {
                    if !(v > 0.0) {
                        return Err(invalid(&label, format!("{field} must be > 0 (got {v})")));
                    }
                }
            }
        }

        let tau = self.gauge.tau.expect("defaulted");
        if !(tau > 0.0) {
            return Err(invalid("gauge.tau", format!("must be > 0 (got {tau})")));
        }
        if let Some(eh) = self.gauge.eps_hat {
            if !(eh >= 0.0) {
                return Err(invalid("gauge.eps_hat", format!("must be >= 0 (got {eh})")));
            }
        }

        if !(self.source.amplitude.is_finite()) {
            return Err(invalid("source.amplitude", "must be finite"));
        }
        match &self.source.profile {
            ProfileSpec::Sine { frequency } if !(*frequency > 0.0) => {
                return Err(invalid("source.profile.frequency", "must be > 0"));
            }
            ProfileSpec::GaussianPulse { sigma, .. } if !(*sigma > 0.0) => {
                return Err(invalid("source.profile.sigma", "must be > 0"));
            }
            ProfileSpec::SmoothRamp { t_rise } if !(*t_rise > 0.0) => {
                return Err(invalid("source.profile.t_rise", "must be > 0"));
            }
            _ => {}
        }
        match &self.source.pattern {
            PatternSpec::Stride { step } if *step == 0 => {
                return Err(invalid("source.pattern.step", "must be >= 1"));
            }
            PatternSpec::Box { axis, .. }
                if !matches!(axis.as_str(), "x" | "y" | "z") => {
                    return Err(invalid("source.pattern.axis", format!("unknown axis `{axis}` (use x, y, or z)")));
                }
            _ => {}
        }

        let s = &self.stepper;
        StepperConfig {
            dt: s.dt,
            theta: s.theta,
            steps: s.steps,
            solver: LinearSolver::Direct,
            record_stride: s.record_stride,
        }
        .validate()
        .map_err(|e| invalid("stepper", e.to_string()))?;
        if !s.steps.is_multiple_of(s.record_stride) {
            return Err(invalid("stepper.record_stride", format!("must divide steps (got stride {} for {} steps)", s.record_stride, s.steps)));
        }
        if let SolverSpec::Named(name) = &s.solver {
            if name != "direct" {
                return Err(invalid("stepper.solver", format!("unknown solver `{name}` (use \"direct\" or {{ tolerance, max_iterations }})")));
            }
        }
        if let SolverSpec::Iterative { tolerance, max_iterations } = &s.solver {
            if !(*tolerance > 0.0) || *max_iterations == 0 {
                return Err(invalid("stepper.solver", "tolerance must be > 0 and max_iterations >= 1"));
            }
        }

        if self.formulations.is_empty() {
            return Err(invalid("formulations", "at least one formulation required"));
        }
        for (i, name) in self.formulations.iter().enumerate() {
            if FormulationTag::from_name(name).is_none() {
                let valid: Vec<&str> = ALL_TAGS.iter().map(|t| t.name()).collect();
                return Err(invalid(format!("formulations[{i}]"), format!("unknown formulation `{name}` (valid: {})", valid.join(", "))));
            }
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        let g = &self.grid;
        GridSpec::new(g.nx, g.ny, g.nz, g.dx, g.dy, g.dz).expect("validated")
    }

    pub fn ground_selector(&self) -> GroundSelector {
        match &self.grid.ground {
            GroundSpec::Named(_) => GroundSelector::Center,
            GroundSpec::Node([i, j, k]) => GroundSelector::Node(*i, *j, *k),
        }
    }

    pub fn tags(&self) -> Vec<FormulationTag> {
        self.formulations
            .iter()
            .map(|n| FormulationTag::from_name(n).expect("validated"))
            .collect()
    }

    pub fn material_field(&self, spec: &GridSpec) -> Result<MaterialField, Error> {
        let m = &self.material;
        let mut mat = MaterialField::uniform(spec.num_cells(), m.kappa, m.eps, m.nu);
        for b in &m.boxes {
            for k in b.min[2]..=b.max[2] {
                for j in b.min[1]..=b.max[1] {
                    for i in b.min[0]..=b.max[0] {
                        let c = spec.cell_id(i, j, k);
                        if let Some(v) = b.kappa {
                            mat.kappa[c] = v;
                        }
                        if let Some(v) = b.eps {
                            mat.eps[c] = v;
                        }
                        if let Some(v) = b.nu {
                            mat.nu[c] = v;
                        }
                    }
                }
            }
        }
        let gauge = &self.gauge;
        mat.set_kappa_hat_rule(gauge.tau.expect("defaulted"), gauge.kappa_hat_region.into())?;
        if let Some(eh) = gauge.eps_hat {
            mat.set_eps_hat(eh, gauge.eps_hat_region.into())?;
        }
        mat.validate()?;
        Ok(mat)
    }

    pub fn stepper_config(&self) -> StepperConfig {
        let s = &self.stepper;
        StepperConfig {
            dt: s.dt,
            theta: s.theta,
            steps: s.steps,
            solver: match &s.solver {
                SolverSpec::Named(_) => LinearSolver::Direct,
                SolverSpec::Iterative { tolerance, max_iterations } => LinearSolver::Iterative {
                    tolerance: *tolerance,
                    max_iterations: *max_iterations,
                },
            },
            record_stride: s.record_stride,
        }
    }

    pub fn source_waveform(&self, dofmap: &DofMap) -> Result<SourceWaveform, Error> {
        let n_edges = dofmap.num_interior_edges();
        let mut pattern = vec![0.0; n_edges];
        match &self.source.pattern {
            PatternSpec::Stride { step } => {
                for (i, p) in pattern.iter_mut().enumerate() {
                    if i % step == 0 {
                        *p = 1.0;
                    }
                }
            }
            PatternSpec::Edges { indices } => {
                for (k, &e) in indices.iter().enumerate() {
                    if e >= n_edges {
                        return Err(invalid(
                            format!("source.pattern.indices[{k}]"),
                            format!("edge index {e} outside 0..{n_edges} interior edges"),
                        ));
                    }
                    pattern[e] = 1.0;
                }
            }
            PatternSpec::Box { min, max, axis } => {
                let want = match axis.as_str() {
                    "x" => emqs_core::grid::Axis::X,
                    "y" => emqs_core::grid::Axis::Y,
                    _ => emqs_core::grid::Axis::Z,
                };
                for (row, &(a, c)) in dofmap.edges.iter().enumerate() {
                    if a == want && (0..3).all(|d| min[d] <= c[d] && c[d] <= max[d]) {
                        pattern[row] = 1.0;
                    }
                }
                if pattern.iter().all(|&p| p == 0.0) {
                    return Err(invalid("source.pattern", "box selects no interior edges"));
                }
            }
        }
        Ok(SourceWaveform {
            pattern,
            amplitude: self.source.amplitude,
            profile: (&self.source.profile).into(),
        })
    }

    /// Deterministic canonical form with every default filled in.
    pub fn canonical_echo(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Grid, connectivity, and materials resolved from a scenario.
#[derive(Debug)]
pub struct ResolvedScenario {
    pub scenario: Scenario,
    pub spec: GridSpec,
    pub dofmap: DofMap,
    pub ops: IncidenceOps,
    pub hodges: HodgeSet,
    pub source: SourceWaveform,
}

pub fn resolve(scenario: Scenario) -> Result<ResolvedScenario, Error> {
    let spec = scenario.grid_spec();
    let dofmap = build_grid(spec, scenario.ground_selector())
        .map_err(|e| invalid("grid.ground", e.to_string()))?;
    let ops = IncidenceOps::assemble(&dofmap);
    let mat = scenario.material_field(&spec)?;
    let hodges = HodgeSet::assemble(&dofmap, &mat)?;
    let source = scenario.source_waveform(&dofmap)?;
    Ok(ResolvedScenario { scenario, spec, dofmap, ops, hodges, source })
}

/// Max-norm of the weighted source divergence; nonzero means the source
/// forces the potential equations.
pub fn source_divergence(ops: &IncidenceOps, pattern: &[f64]) -> f64 {
    match ops.grad.t_matvec(pattern) {
        Ok(div) => div.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
        Err(_) => f64::NAN,
    }
}
