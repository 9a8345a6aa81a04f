//! Command-line front end: scenario-driven checking, simulation, comparison,
//! quasistatic sweeps, and operator export.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use emqs::compare::compare_trajectories;
use emqs::ledger::write_csv_file;
use emqs::matrix_market;
use emqs::scenario::{parse_scenario, resolve, source_divergence, ResolvedScenario, Scenario};
use emqs::verdict::{from_oracle, from_structure, to_json, Verdict};

use emqs_core::diagnostics::{dense_oracle_check, quasistatic_sweep, run_structure_suite};
use emqs_core::formulation::{assemble_system, FormulationTag};
use emqs_core::integrator::{consistent_init, run as run_steps, TemporalProfile};

#[derive(Parser)]
#[command(name = "emqs", about = "Quasistatic electromagnetic field simulation toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// scenario file (TOML)
    scenario: PathBuf,
    /// override grid as NX,NY,NZ
    #[arg(long, value_delimiter = ',', num_args = 3)]
    grid: Option<Vec<usize>>,
    /// override time step
    #[arg(long)]
    dt: Option<f64>,
    /// override theta (1/2 = implicit midpoint, 1 = implicit Euler)
    #[arg(long)]
    theta: Option<f64>,
    /// override step count
    #[arg(long)]
    steps: Option<usize>,
    /// seed recorded in the run manifest
    #[arg(long)]
    seed: Option<u64>,
    /// output directory (default: scenario output.dir, else "out")
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Structural audits and the dense assembly oracle; exit 0 iff all pass
    Check(Common),
    /// Time integration; writes one CSV ledger per formulation
    Run(Common),
    /// Trajectory comparison across the scenario's formulations
    Compare {
        #[command(flatten)]
        common: Common,
        /// pass/fail tolerance on the max relative discrepancy; informational when absent
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Full-Maxwell vs quasistatic discrepancy over slowed time scales
    Sweep {
        #[command(flatten)]
        common: Common,
        /// time-scale slowdown factors
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0])]
        factors: Vec<f64>,
    },
    /// Matrix Market export of E, J, R, B per formulation plus a manifest
    Export(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(c) => cmd_check(&c),
        Command::Run(c) => cmd_run(&c),
        Command::Compare { common, tolerance } => cmd_compare(&common, tolerance),
        Command::Sweep { common, factors } => cmd_sweep(&common, &factors),
        Command::Export(c) => cmd_export(&c),
    };
    match result {
        Ok(all_good) if all_good => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(common: &Common) -> anyhow::Result<ResolvedScenario> {
    let mut scenario: Scenario = parse_scenario(&common.scenario)?;
    if let Some(grid) = &common.grid {
        scenario.grid.nx = grid[0];
        scenario.grid.ny = grid[1];
        scenario.grid.nz = grid[2];
    }
    if let Some(dt) = common.dt {
        scenario.stepper.dt = dt;
    }
    if let Some(theta) = common.theta {
        scenario.stepper.theta = theta;
    }
    if let Some(steps) = common.steps {
        scenario.stepper.steps = steps;
    }
    if let Some(seed) = common.seed {
        scenario.seed = Some(seed);
    }
    scenario.validate().context("after command-line overrides")?;
    let resolved = resolve(scenario)?;
    let div = source_divergence(&resolved.ops, &resolved.source.pattern);
    if div > 1e-12 {
        eprintln!(
            "warning: source pattern is not solenoidal (max weighted divergence {div:.3e}); \
             it will force the potential equations"
        );
    }
    Ok(resolved)
}

fn out_dir(common: &Common, resolved: &ResolvedScenario, command: &str) -> anyhow::Result<PathBuf> {
    let base = common
        .out
        .clone()
        .or_else(|| resolved.scenario.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let dir = base.join(command);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    // reproducibility: the canonical scenario next to the outputs
    fs::write(dir.join("scenario.toml"), resolved.scenario.canonical_echo())?;
    let manifest = serde_json::json!({
        "command": command,
        "scenario": common.scenario.display().to_string(),
        "seed": resolved.scenario.seed,
        "formulations": resolved.scenario.formulations,
    });
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(dir)
}

fn cmd_check(common: &Common) -> anyhow::Result<bool> {
    let resolved = load(common)?;
    let dir = out_dir(common, &resolved, "check")?;
    let structure = run_structure_suite(&resolved.ops, &resolved.hodges)?;
    let mut verdicts: Vec<Verdict> = from_structure(&structure);
    for sv in &structure {
        let sys = assemble_system(sv.tag, &resolved.ops, &resolved.hodges)?;
        let report = dense_oracle_check(&sys, &resolved.dofmap, &resolved.hodges)?;
        verdicts.push(from_oracle(&report));
    }
    fs::write(dir.join("verdicts.json"), to_json(&verdicts))?;
    let all = verdicts.iter().all(|v| v.pass);
    for v in &verdicts {
        println!(
            "{:<20} {:<50} {}",
            v.tag,
            v.check,
            if v.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(all)
}

fn run_one(
    resolved: &ResolvedScenario,
    tag: FormulationTag,
) -> anyhow::Result<(emqs_core::formulation::BlockSystem, emqs_core::integrator::Trajectory)> {
    let sys = assemble_system(tag, &resolved.ops, &resolved.hodges)?;
    let init = consistent_init(
        &sys,
        &resolved.ops,
        &resolved.hodges,
        &vec![0.0; sys.layout.n_edges],
        &vec![0.0; sys.layout.n_nodes],
    )?;
    let traj = run_steps(
        &sys,
        &resolved.ops,
        &resolved.hodges,
        init,
        resolved.scenario.stepper_config(),
        &resolved.source,
    )
    .with_context(|| format!("integrating {}", tag.name()))?;
    Ok((sys, traj))
}

fn cmd_run(common: &Common) -> anyhow::Result<bool> {
    let resolved = load(common)?;
    let dir = out_dir(common, &resolved, "run")?;
    let stride = resolved.scenario.stepper.record_stride;
    for tag in resolved.scenario.tags() {
        let (_, traj) = run_one(&resolved, tag)?;
        let path = dir.join(format!("{}.csv", tag.name().to_lowercase()));
        write_csv_file(&path, &traj.ledger, stride)?;
        println!("{}: {} steps -> {}", tag.name(), traj.ledger.len() - 1, path.display());
    }
    Ok(true)
}

fn cmd_compare(common: &Common, tolerance: Option<f64>) -> anyhow::Result<bool> {
    let resolved = load(common)?;
    let tags = resolved.scenario.tags();
    if tags.len() < 2 {
        bail!("compare needs at least two formulations (scenario lists {})", tags.len());
    }
    let dir = out_dir(common, &resolved, "compare")?;
    let (ref_sys, ref_traj) = run_one(&resolved, tags[0])?;
    let mut docs = Vec::new();
    let mut all = true;
    for &tag in &tags[1..] {
        let (sys, traj) = run_one(&resolved, tag)?;
        let doc = compare_trajectories(
            tags[0].name(),
            &ref_traj,
            &ref_sys.layout,
            tag.name(),
            &traj,
            &sys.layout,
            tolerance,
        )
        .with_context(|| format!("comparing {} against {}", tag.name(), tags[0].name()))?;
        println!(
            "{} vs {}: max relative discrepancy {:.3e}{}",
            tags[0].name(),
            tag.name(),
            doc.max_rel,
            match doc.pass {
                Some(true) => " PASS",
                Some(false) => " FAIL",
                None => " (informational)",
            }
        );
        if doc.pass == Some(false) {
            all = false;
        }
        docs.push(doc);
    }
    fs::write(dir.join("comparison.json"), serde_json::to_string_pretty(&docs)?)?;
    Ok(all)
}

fn cmd_sweep(common: &Common, factors: &[f64]) -> anyhow::Result<bool> {
    if factors.is_empty() {
        bail!("sweep needs at least one factor");
    }
    let resolved = load(common)?;
    let dir = out_dir(common, &resolved, "sweep")?;
    let stepper = resolved.scenario.stepper_config();
    // characteristic excitation time scale the factors stretch
    let t_rise = match resolved.source.profile {
        TemporalProfile::SmoothRamp { t_rise } => t_rise,
        TemporalProfile::Sine { frequency } => 1.0 / frequency,
        TemporalProfile::GaussianPulse { sigma, .. } => 4.0 * sigma,
    };
    let rows = quasistatic_sweep(
        &resolved.ops,
        &resolved.hodges,
        &resolved.source.pattern,
        resolved.source.amplitude,
        t_rise,
        stepper.dt,
        stepper.steps,
        factors,
    )?;
    let mut csv = String::from("slowdown,t_rise,dt,discrepancy\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.slowdown, r.t_rise, r.dt, r.discrepancy));
        println!("slowdown {:>8}: discrepancy {:.6e}", r.slowdown, r.discrepancy);
    }
    fs::write(dir.join("sweep.csv"), csv)?;
    if rows.len() < 2 {
        println!("single factor: no monotonicity verdict");
        return Ok(true);
    }
    let monotone = rows.windows(2).all(|w| w[1].discrepancy < w[0].discrepancy);
    println!(
        "discrepancy decreases with slower excitation: {}",
        if monotone { "PASS" } else { "FAIL" }
    );
    Ok(monotone)
}

fn cmd_export(common: &Common) -> anyhow::Result<bool> {
    let resolved = load(common)?;
    let dir = out_dir(common, &resolved, "export")?;
    for tag in resolved.scenario.tags() {
        let sys = assemble_system(tag, &resolved.ops, &resolved.hodges)?;
        let sub = dir.join(tag.name().to_lowercase());
        fs::create_dir_all(&sub)?;
        let blocks = [("E", &sys.e), ("J", &sys.j), ("R", &sys.r), ("B", &sys.b)];
        let mut manifest = String::new();
        for (name, m) in blocks {
            let file = format!("{name}.mtx");
            matrix_market::write_file(&sub.join(&file), m)
                .with_context(|| format!("writing {}", sub.join(&file).display()))?;
            manifest.push_str(&format!(
                "{name} {file} {} {} {}\n",
                m.nrows,
                m.ncols,
                m.nnz()
            ));
        }
        fs::write(sub.join("manifest.txt"), manifest)?;
        println!("{} -> {}", tag.name(), sub.display());
    }
    Ok(true)
}
