//! Serializable trajectory comparison built on the core block comparison,
//! extended with per-step rows and the output signal.

use serde::Serialize;

use emqs_core::diagnostics::compare_runs;
use emqs_core::formulation::StateLayout;
use emqs_core::integrator::Trajectory;

#[derive(Debug, Clone, Serialize)]
pub struct StepDiscrepancy {
    pub step: usize,
    pub a: f64,
    pub phi: f64,
    pub h: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSummary {
    pub block: String,
    pub max_abs: f64,
    pub max_rel: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonDocument {
    pub reference: String,
    pub candidate: String,
    pub states_compared: usize,
    /// per recorded step, relative to the per-block scale across both runs
    pub steps: Vec<StepDiscrepancy>,
    pub blocks: Vec<BlockSummary>,
    pub max_rel: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// absent in informational mode
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

fn block_scale(
    a: &Trajectory,
    la: &StateLayout,
    b: &Trajectory,
    lb: &StateLayout,
    extract: impl Fn(&StateLayout, &[f64]) -> Vec<f64>,
) -> f64 {
    let mut scale = 0.0f64;
    for s in &a.states {
        for v in extract(la, &s.x) {
            scale = scale.max(v.abs());
        }
    }
    for s in &b.states {
        for v in extract(lb, &s.x) {
            scale = scale.max(v.abs());
        }
    }
    scale
}

pub fn compare_trajectories(
    ref_name: &str,
    a: &Trajectory,
    la: &StateLayout,
    cand_name: &str,
    b: &Trajectory,
    lb: &StateLayout,
    tolerance: Option<f64>,
) -> Result<ComparisonDocument, emqs_core::Error> {
    let core = compare_runs(a, la, b, lb, tolerance)?;

    let extract_a = |l: &StateLayout, x: &[f64]| l.a(x).to_vec();
    let extract_phi = |l: &StateLayout, x: &[f64]| l.phi(x).to_vec();
    let extract_h = |l: &StateLayout, x: &[f64]| l.h(x).to_vec();
    let scales = [
        block_scale(a, la, b, lb, extract_a).max(1e-300),
        block_scale(a, la, b, lb, extract_phi).max(1e-300),
        block_scale(a, la, b, lb, extract_h).max(1e-300),
    ];
    let mut y_scale = 0.0f64;
    for y in a.outputs.iter().chain(&b.outputs) {
        for v in y {
            y_scale = y_scale.max(v.abs());
        }
    }
    let y_scale = y_scale.max(1e-300);

    let max_diff = |va: &[f64], vb: &[f64]| -> f64 {
        va.iter().zip(vb).fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs()))
    };

    let mut steps = Vec::with_capacity(a.record_steps.len());
    for (i, &step) in a.record_steps.iter().enumerate() {
        let (sa, sb) = (&a.states[i], &b.states[i]);
        steps.push(StepDiscrepancy {
            step,
            a: max_diff(la.a(&sa.x), lb.a(&sb.x)) / scales[0],
            phi: max_diff(la.phi(&sa.x), lb.phi(&sb.x)) / scales[1],
            h: max_diff(la.h(&sa.x), lb.h(&sb.x)) / scales[2],
            y: max_diff(&a.outputs[i], &b.outputs[i]) / y_scale,
        });
    }

    Ok(ComparisonDocument {
        reference: ref_name.to_string(),
        candidate: cand_name.to_string(),
        states_compared: core.states_compared,
        steps,
        blocks: core
            .blocks
            .iter()
            .map(|b| BlockSummary {
                block: b.block.to_string(),
                max_abs: b.max_abs,
                max_rel: b.max_rel,
                rms: b.rms,
            })
            .collect(),
        max_rel: core.max_rel,
        tolerance,
        pass: core.pass,
    })
}
