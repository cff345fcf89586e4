//! Pipelines behind the subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use psh_core::envelope::{
    candidate_generator, envelope_disc_average, envelope_obstacle_1d, CandidateOptions, EnvelopeResult,
};
use psh_core::geodesics::{boundary_continuity_check, weak_geodesic, GeodesicProblem, Initialization};
use psh_core::geometry::io::{from_csv, mask_to_csv, summarize, to_csv};
use psh_core::geometry::{ScalarField, TorusGrid};
use psh_core::monge_ampere::{ma_measure, volume_of};
use psh_core::regularize::{
    estimate_k, hessian_floor_check, kiselman_transform_trig, lelong_estimate, monotone_transform,
    RegularizationParams, SmoothingKernel,
};
use psh_core::supercanonical::{
    equality_probe, supercanonical_envelope, GreenTable, KltWeight, OptimizerOptions, Supercanonical,
    SupercanonicalProblem,
};
use psh_core::{Error, Result};
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, SolverKind};
use crate::output::{version_string, OutputDir, SCHEMA_VERSION};
use crate::suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Envelope,
    MaCheck,
    Volume,
    Regularize,
    Geodesic,
    Supercanonical,
    AcceptanceSuite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Envelope => "envelope",
            Command::MaCheck => "ma-check",
            Command::Volume => "volume",
            Command::Regularize => "regularize",
            Command::Geodesic => "geodesic",
            Command::Supercanonical => "supercanonical",
            Command::AcceptanceSuite => "acceptance-suite",
        }
    }
}

/// Extra inputs that do not belong in the config file.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    /// Envelope CSV for `ma-check` (solved afresh when absent).
    pub phi: Option<std::path::PathBuf>,
}

/// Exit status for a library error: 1 validation, 2 non-convergence,
/// 3 precondition.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::GridTooSmall { .. } => 1,
        Error::NonConvergence { .. } => 2,
        Error::NotPseudoEffective { .. } | Error::KltViolation { .. } | Error::Precondition(_) => 3,
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Validation(_) => "validation",
        Error::GridTooSmall { .. } => "grid-too-small",
        Error::NonConvergence { .. } => "non-convergence",
        Error::NotPseudoEffective { .. } => "not-pseudo-effective",
        Error::KltViolation { .. } => "klt-violation",
        Error::Precondition(_) => "precondition",
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Validation(format!("output: {e}"))
}

/// Runs one pipeline and writes its artifacts plus `manifest.json`. Returns
/// the text printed on stdout.
pub fn run(cmd: Command, cfg: &RunConfig, inputs: &Inputs, out: &Path) -> Result<String> {
    let start = Instant::now();
    let mut dir = OutputDir::create(out).map_err(io)?;
    let stdout = match cmd {
        Command::Envelope => envelope(cfg, &mut dir)?,
        Command::MaCheck => ma_check(cfg, inputs, &mut dir)?,
        Command::Volume => volume(cfg, &mut dir)?,
        Command::Regularize => regularize(cfg, &mut dir)?,
        Command::Geodesic => geodesic(cfg, &mut dir)?,
        Command::Supercanonical => supercanonical(cfg, &mut dir)?,
        Command::AcceptanceSuite => acceptance(cfg, &mut dir)?,
    };
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "version": version_string(),
        "command": cmd.name(),
        "seed": cfg.seed,
        "threads": cfg.threads,
        "config": cfg.raw.echo(),
        "files": dir.files(),
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    dir.write_json("manifest.json", &manifest).map_err(io)?;
    Ok(stdout)
}

pub fn write_error(out: &Path, e: &Error) -> std::io::Result<String> {
    std::fs::create_dir_all(out)?;
    let body = json!({ "code": exit_code(e), "kind": error_kind(e), "message": e.to_string() });
    let text = serde_json::to_string_pretty(&body).map_err(std::io::Error::other)? + "\n";
    std::fs::write(out.join("error.json"), &text)?;
    Ok(text)
}

fn grid(cfg: &RunConfig) -> Result<TorusGrid> {
    TorusGrid::new(cfg.n, cfg.nodes)
}

fn solve_envelope(cfg: &RunConfig) -> Result<EnvelopeResult> {
    let g = grid(cfg)?;
    let mass = cfg.alpha.class_mass();
    if mass < 0.0 {
        return Err(Error::NotPseudoEffective { mass });
    }
    match cfg.method {
        SolverKind::Obstacle => envelope_obstacle_1d(&cfg.alpha, g, &cfg.solver),
        SolverKind::Disc => envelope_disc_average(&cfg.alpha, &ScalarField::zeros(g), &cfg.solver),
    }
}

fn envelope(cfg: &RunConfig, dir: &mut OutputDir) -> Result<String> {
    let env = solve_envelope(cfg)?;
    dir.write("phi.csv", to_csv(&env.phi).as_bytes()).map_err(io)?;
    dir.write("contact.csv", mask_to_csv(env.phi.grid(), &env.contact, "contact").as_bytes()).map_err(io)?;
    let report = json!({
        "method": env.method,
        "iterations": env.iterations,
        "residual": env.residual,
        "tol_solve": env.tol_solve,
        "contact_tol": env.contact_tol(),
        "contact_fraction": env.contact_fraction(),
        "phi": summarize(&env.phi),
    });
    dir.write_json("report.json", &report).map_err(io)?;
    Ok(format!("envelope: {} sweeps, contact fraction {:.6}\n", env.iterations, env.contact_fraction()))
}

fn ma_check(cfg: &RunConfig, inputs: &Inputs, dir: &mut OutputDir) -> Result<String> {
    let (phi, tol) = match &inputs.phi {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Validation(format!("{}: {e}", p.display())))?;
            (from_csv(&text, cfg.n, 1.0)?, cfg.solver.tol)
        }
        None => {
            let env = solve_envelope(cfg)?;
            (env.phi, env.tol_solve)
        }
    };
    cfg.alpha.check_grid(phi.grid())?;
    let contact = psh_core::envelope::contact_set(&phi, 10.0 * tol);
    let rep = ma_measure(&cfg.alpha, &phi, &contact, None)?;
    if let Some(d) = &rep.density {
        dir.write("ma_density.csv", to_csv(d).as_bytes()).map_err(io)?;
    }
    dir.write_json("ma_report.json", &rep).map_err(io)?;
    Ok(format!(
        "total {:.12e} contact {:.12e} off-contact (dilated) {:.12e}\n",
        rep.total_mass, rep.contact_mass, rep.off_dilated_mass
    ))
}

fn volume(cfg: &RunConfig, dir: &mut OutputDir) -> Result<String> {
    let env = solve_envelope(cfg)?;
    let v = volume_of(&cfg.alpha, &env)?;
    dir.write_json("volume.json", &v).map_err(io)?;
    Ok(format!("{:.12e}\n", v.volume))
}

fn regularize(cfg: &RunConfig, dir: &mut OutputDir) -> Result<String> {
    let g = grid(cfg)?;
    let psi = match &cfg.regularize.psi {
        Some(p) => p.clone(),
        None => candidate_generator(&cfg.alpha, g, cfg.seed, 1, &CandidateOptions::default())?
            .remove(0)
            .psi,
    };
    let k = match cfg.regularize.k {
        Some(k) => k,
        None => estimate_k(&cfg.alpha, g)?,
    };
    let params = RegularizationParams::new(k, cfg.regularize.c, cfg.regularize.delta)?;
    let kernel = SmoothingKernel::new(cfg.n);
    let res = kiselman_transform_trig(&psi, g, &params, &kernel)?;
    let floor = hessian_floor_check(&res, &params, &cfg.alpha)?;
    let x = cfg.regularize.point;
    let table = monotone_transform(&psi, &x, &params, &kernel);
    let lelong = lelong_estimate(&psi, &x, &params, &kernel, params.t_grid[0])?;
    dir.write("psi_c_delta.csv", to_csv(&res.field).as_bytes()).map_err(io)?;
    dir.write("psi.csv", to_csv(&psi.to_field(g)).as_bytes()).map_err(io)?;
    let report = json!({
        "k": k,
        "c": params.c,
        "delta": params.delta,
        "fraction_at_delta": res.fraction_at_delta(params.delta),
        "unbounded_nodes": res.unbounded.iter().filter(|&&u| u).count(),
        "floor": floor,
        "monotone": table,
        "lelong": lelong,
    });
    dir.write_json("regularize.json", &report).map_err(io)?;
    Ok(format!("min eigenvalue {:.6e}, floor violation {:.3e}\n", floor.min_eigenvalue, floor.worst_violation))
}

fn geodesic(cfg: &RunConfig, dir: &mut OutputDir) -> Result<String> {
    let g = grid(cfg)?;
    let problem = GeodesicProblem {
        alpha: cfg.alpha.clone(),
        f0: cfg.geodesic.f0.to_field(g),
        f1: cfg.geodesic.f1.to_field(g),
        nt: cfg.geodesic.nt,
    };
    let res = weak_geodesic(&problem, Initialization::LowerBarrier, &cfg.solver)?;
    for j in 0..=problem.nt {
        dir.write(&format!("phi_t{j:04}.csv"), to_csv(&res.phi.slice(j)).as_bytes()).map_err(io)?;
    }
    let report = json!({
        "iterations": res.iterations,
        "residual": res.residual,
        "tol_solve": res.tol_solve,
        "report": res.report,
        "boundary_continuity": boundary_continuity_check(&problem, &res.phi),
    });
    dir.write_json("geodesic.json", &report).map_err(io)?;
    Ok(format!(
        "boundary error {:.3e}, MA residual median {:.3e}, eigen cap {:.6e}\n",
        res.report.boundary_error, res.report.interior_ma_median, res.report.eigen_cap
    ))
}

fn supercanonical(cfg: &RunConfig, dir: &mut OutputDir) -> Result<String> {
    let g = grid(cfg)?;
    if g.n() != 1 {
        return Err(Error::Validation("supercanonical envelopes are implemented on curves".into()));
    }
    let s = &cfg.supercanonical;
    let mut poles = Vec::new();
    for &(x, y, c) in &s.poles {
        if x >= g.nodes() || y >= g.nodes() {
            return Err(Error::Validation(format!("pole ({x}, {y}) outside the grid")));
        }
        poles.push((g.index(&[x, y]), c));
    }
    let gamma = KltWeight { poles, normalize: s.normalize };
    gamma.validate(g)?;
    let problem = SupercanonicalProblem { lambda: s.lambda, gamma, p: s.p, source_stride: s.source_stride };
    let table = Arc::new(GreenTable::new(g)?);
    let solver = Supercanonical::new(table, problem)?;
    let opts = OptimizerOptions { max_iter: s.max_iter, gap_tol: s.gap_tol };
    let sols = supercanonical_envelope(&solver, s.eval_stride, &opts);
    let mut phi = String::from("x1,y1,value,green_max\n");
    let mut rho = String::from("x1,y1,source_x1,source_y1,weight\n");
    for sol in &sols {
        let x = g.point(sol.node);
        let _ = writeln!(phi, "{:.16e},{:.16e},{:.16e},{:.16e}", x[0], x[1], sol.value, sol.green_max);
        for &(a, w) in &sol.rho {
            let y = g.point(a);
            let _ = writeln!(rho, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", x[0], x[1], y[0], y[1], w);
        }
    }
    dir.write("phi_can.csv", phi.as_bytes()).map_err(io)?;
    dir.write("rho.csv", rho.as_bytes()).map_err(io)?;
    let probe = equality_probe(&sols);
    let report = json!({
        "constraint_residual": sols.iter().map(|s| s.constraint_residual).fold(0.0, f64::max),
        "green_gap": probe.green_gap,
        "rho_support": probe.max_support,
        "duality_gap": probe.max_duality_gap,
        "points": sols.len(),
    });
    dir.write_json("supercanonical.json", &report).map_err(io)?;
    Ok(format!(
        "green gap {:.6e}, support {}, duality gap {:.3e}\n",
        probe.green_gap, probe.max_support, probe.max_duality_gap
    ))
}

fn acceptance(cfg: &RunConfig, dir: &mut OutputDir) -> Result<String> {
    let outcomes = suite::run_all(cfg.scale, cfg.seed, &(1..=10).collect::<Vec<_>>())?;
    let mut text = String::new();
    let mut table: BTreeMap<String, &suite::Outcome> = BTreeMap::new();
    for o in &outcomes {
        text.push_str(&o.line());
        text.push('\n');
        table.insert(format!("{:02}", o.id), o);
    }
    dir.write("acceptance.txt", text.as_bytes()).map_err(io)?;
    dir.write_json("acceptance.json", &table).map_err(io)?;
    Ok(text)
}
