//! Command implementations. Every data command reads the shared config,
//! runs the corresponding library routines and writes one pretty-printed
//! JSON document (`<command>.json`, inputs echoed, solver diagnostics
//! included) plus headerless CSV grids into the output directory. Output is
//! byte-stable across runs apart from the `timestamp_unix` field.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde_json::{json, Value};

use cpx_core::domain::{BoundaryGrid, DiscreteCompact, DiscreteMeasure};
use cpx_core::extremal::{
    chebyshev_family, delta_zaharjuta, envelope_field, l2_monic_family, orthonormal_family,
    product_grid, robin_direct, robin_field, vdm_difference_family, FamilyProvenance,
    PolynomialFamily, SolveStats,
};
use cpx_core::io::{write_field_csv, write_nodes_csv};
use cpx_core::lattice::{HypotenuseDirection, MultiIndexBasis, TriangleBody};
use cpx_core::minimax::{tau_direction_with, MonicContext};
use cpx_core::nodes::{delta_estimate_vdm, greedy_fekete, leja_sequence, NodeSet};
use cpx_core::validate::criteria;

use crate::config::RunConfig;

/// Everything a data command needs besides its own parameters.
pub struct CommandContext {
    pub config: RunConfig,
    /// Directory of the config file; relative paths inside the config
    /// resolve against it.
    pub config_dir: PathBuf,
    pub out_dir: PathBuf,
    pub strict: bool,
}

impl CommandContext {
    fn body(&self) -> anyhow::Result<TriangleBody> {
        self.config.body()
    }

    fn set(&self) -> anyhow::Result<DiscreteCompact> {
        self.config.build_set(&self.config_dir)
    }

    fn write_json(&self, command: &str, result: Value) -> anyhow::Result<()> {
        let envelope = json!({
            "command": command,
            "timestamp_unix": SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            "config": self.config,
            "result": result,
        });
        let path = self.out_dir.join(format!("{command}.json"));
        let text = serde_json::to_string_pretty(&envelope)?;
        fs::write(&path, text + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
    }

    fn write_csv(&self, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
        let path = self.out_dir.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
    }

    /// Exit code for a command whose solves may not have converged: data is
    /// always written, but `--strict` turns silent non-convergence into a
    /// nonzero exit.
    fn convergence_exit(&self, all_converged: bool) -> i32 {
        if all_converged || !self.strict {
            0
        } else {
            3
        }
    }
}

/// Ordered basis table: `basis.csv` rows `index,j,k,deg` plus the dimension
/// and degree-sum summary.
pub fn cmd_basis(ctx: &CommandContext) -> anyhow::Result<i32> {
    let body = ctx.body()?;
    let basis = MultiIndexBasis::new(body, ctx.config.degree);
    let mut csv = String::new();
    let mut rows = Vec::with_capacity(basis.len());
    for (i, alpha) in basis.indices().iter().enumerate() {
        let deg = body.c_degree(*alpha);
        csv.push_str(&format!("{},{},{},{}\n", i, alpha.j, alpha.k, deg));
        rows.push(json!({"index": i, "j": alpha.j, "k": alpha.k, "deg": deg}));
    }
    ctx.write_csv("basis.csv", &csv)?;
    ctx.write_json(
        "basis",
        json!({
            "a": body.a(),
            "b": body.b(),
            "n": ctx.config.degree,
            "dimension": basis.len(),
            "degree_sum": basis.degree_sum(),
            "rows": rows,
        }),
    )?;
    Ok(0)
}

fn node_selection(
    ctx: &CommandContext,
    command: &str,
    select: impl Fn(&DiscreteCompact, &MultiIndexBasis) -> cpx_core::error::Result<NodeSet>,
) -> anyhow::Result<i32> {
    let body = ctx.body()?;
    let set = ctx.set()?;
    let basis = MultiIndexBasis::new(body, ctx.config.degree);
    let nodes = select(&set, &basis)?;
    let mut buf = Vec::new();
    write_nodes_csv(&mut buf, &nodes.points, &nodes.pivot_logs)?;
    ctx.write_csv(&format!("{command}_nodes.csv"), &buf)?;
    let delta = if basis.degree_sum() > 0 {
        Some(delta_estimate_vdm(nodes.log_vdm, &basis)?)
    } else {
        None
    };
    ctx.write_json(
        command,
        json!({
            "set_label": set.label(),
            "candidates": set.len(),
            "basis_size": basis.len(),
            "log_vdm": nodes.log_vdm,
            "delta_estimate": delta,
            "candidate_indices": nodes.candidate_indices,
        }),
    )?;
    Ok(0)
}

pub fn cmd_fekete(ctx: &CommandContext) -> anyhow::Result<i32> {
    node_selection(ctx, "fekete", greedy_fekete)
}

pub fn cmd_leja(ctx: &CommandContext) -> anyhow::Result<i32> {
    node_selection(ctx, "leja", leja_sequence)
}

/// Monic Chebyshev solve per basis position, with the full residual history
/// of each solve in the JSON and a compact per-position `cheb.csv`
/// (`index,j,k,deg,value,t_value,iterations,converged`; `t_value` is empty
/// for the constant position).
pub fn cmd_cheb(ctx: &CommandContext) -> anyhow::Result<i32> {
    let body = ctx.body()?;
    let set = ctx.set()?;
    let mctx = MonicContext::new(body, &set, ctx.config.degree)?;
    let opts = ctx.config.solver.options();
    let mut csv = String::new();
    let mut rows = Vec::new();
    let mut all_converged = true;
    for pos in 0..mctx.basis().len() {
        let alpha = mctx.basis().indices()[pos];
        let deg = body.c_degree(alpha);
        let sol = mctx.solve_position(pos, opts)?;
        let t_value = (deg > 0).then(|| sol.value.powf(1.0 / deg as f64));
        all_converged &= sol.converged;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            pos,
            alpha.j,
            alpha.k,
            deg,
            sol.value,
            t_value.map(|t| t.to_string()).unwrap_or_default(),
            sol.iterations,
            sol.converged,
        ));
        rows.push(json!({
            "index": pos,
            "j": alpha.j,
            "k": alpha.k,
            "deg": deg,
            "value": sol.value,
            "t_value": t_value,
            "iterations": sol.iterations,
            "converged": sol.converged,
            "certified_gap": sol.certified_gap,
            "residual_history": sol.residual_history,
            "polynomial": sol.polynomial,
        }));
    }
    ctx.write_csv("cheb.csv", &csv)?;
    ctx.write_json(
        "cheb",
        json!({
            "set_label": set.label(),
            "candidates": set.len(),
            "n": ctx.config.degree,
            "all_converged": all_converged,
            "rows": rows,
        }),
    )?;
    Ok(ctx.convergence_exit(all_converged))
}

/// Directional Chebyshev constants on midpoint directions: `tau.csv` rows
/// `t,tau`, per-degree solve details in JSON.
pub fn cmd_tau(ctx: &CommandContext) -> anyhow::Result<i32> {
    let body = ctx.body()?;
    let set = ctx.set()?;
    let k_list = ctx.config.tau_degree_list();
    let mctx = MonicContext::new(body, &set, *k_list.last().unwrap())?;
    let opts = ctx.config.solver.options();
    let mut csv = String::new();
    let mut directions = Vec::new();
    let mut all_converged = true;
    for i in 0..ctx.config.directions {
        let t = (i as f64 + 0.5) / ctx.config.directions as f64;
        let theta = HypotenuseDirection::new(t)?;
        let est = tau_direction_with(&mctx, &theta, &k_list, opts)?;
        let (th1, th2) = theta.theta(&body);
        csv.push_str(&format!("{},{}\n", t, est.tau));
        let per_k: Vec<Value> = est
            .per_k
            .iter()
            .map(|mc| {
                all_converged &= mc.solution.converged;
                json!({
                    "k": mc.k,
                    "edge_j": mc.alpha.j,
                    "edge_k": mc.alpha.k,
                    "value": mc.solution.value,
                    "t_value": mc.t_value,
                    "iterations": mc.solution.iterations,
                    "converged": mc.solution.converged,
                    "certified_gap": mc.solution.certified_gap,
                })
            })
            .collect();
        directions.push(json!({
            "t": t,
            "theta": [th1, th2],
            "tau": est.tau,
            "per_k": per_k,
        }));
    }
    ctx.write_csv("tau.csv", &csv)?;
    ctx.write_json(
        "tau",
        json!({
            "set_label": set.label(),
            "candidates": set.len(),
            "degrees": k_list,
            "all_converged": all_converged,
            "directions": directions,
        }),
    )?;
    Ok(ctx.convergence_exit(all_converged))
}

/// Both transfinite-diameter estimates: the determinant-root value on greedy
/// Fekete nodes and the geometric mean of directional constants. Writes the
/// node set (`delta_nodes.csv`) and the direction profile (`delta.csv`,
/// rows `t,tau`).
pub fn cmd_delta(ctx: &CommandContext) -> anyhow::Result<i32> {
    let body = ctx.body()?;
    let set = ctx.set()?;
    let n = ctx.config.degree.max(1);
    let basis = MultiIndexBasis::new(body, n);
    let nodes = greedy_fekete(&set, &basis)?;
    let delta_vdm = delta_estimate_vdm(nodes.log_vdm, &basis)?;
    let opts = ctx.config.solver.options();
    let dir_est = delta_zaharjuta(body, &set, ctx.config.directions, n, opts)?;
    let all_converged = dir_est
        .directions
        .iter()
        .flat_map(|d| d.per_k.iter())
        .all(|mc| mc.solution.converged);

    let mut buf = Vec::new();
    write_nodes_csv(&mut buf, &nodes.points, &nodes.pivot_logs)?;
    ctx.write_csv("delta_nodes.csv", &buf)?;
    let mut csv = String::new();
    for d in &dir_est.directions {
        csv.push_str(&format!("{},{}\n", d.theta_t, d.tau));
    }
    ctx.write_csv("delta.csv", &csv)?;
    ctx.write_json(
        "delta",
        json!({
            "set_label": set.label(),
            "candidates": set.len(),
            "n": n,
            "vdm": {
                "log_vdm": nodes.log_vdm,
                "delta": delta_vdm,
                "log_delta": delta_vdm.ln(),
            },
            "directional": {
                "directions": dir_est.directions.len(),
                "delta": dir_est.delta,
                "log_delta": dir_est.log_delta,
                "per_direction": dir_est
                    .directions
                    .iter()
                    .map(|d| json!({"t": d.theta_t, "tau": d.tau}))
                    .collect::<Vec<_>>(),
            },
            "all_converged": all_converged,
        }),
    )?;
    Ok(ctx.convergence_exit(all_converged))
}

fn build_family(
    ctx: &CommandContext,
    body: TriangleBody,
    set: &DiscreteCompact,
) -> anyhow::Result<(PolynomialFamily, Option<Vec<SolveStats>>)> {
    let n = ctx.config.degree;
    match ctx.config.family_provenance()? {
        FamilyProvenance::Chebyshev => {
            let (family, stats) = chebyshev_family(body, n, set, ctx.config.solver.options())?;
            Ok((family, Some(stats)))
        }
        FamilyProvenance::Orthonormal => {
            let mu = DiscreteMeasure::uniform(set.clone());
            Ok((orthonormal_family(body, n, &mu)?, None))
        }
        FamilyProvenance::L2Monic => {
            let mu = DiscreteMeasure::uniform(set.clone());
            Ok((l2_monic_family(body, n, &mu)?, None))
        }
        FamilyProvenance::VdmDifference => {
            let basis = MultiIndexBasis::new(body, n);
            let nodes = greedy_fekete(set, &basis)?;
            Ok((vdm_difference_family(body, n, set, &nodes.points)?, None))
        }
    }
}

fn family_json(family: &PolynomialFamily, stats: &Option<Vec<SolveStats>>) -> Value {
    json!({
        "members": family.len(),
        "norms": family
            .members
            .iter()
            .map(|m| json!({"degree_used": m.degree_used, "norm_on_k": m.norm_on_k}))
            .collect::<Vec<_>>(),
        "solver_stats": stats.as_ref().map(|ss| {
            ss.iter()
                .map(|s| {
                    json!({
                        "position": s.position,
                        "iterations": s.iterations,
                        "converged": s.converged,
                        "certified_gap": s.certified_gap,
                    })
                })
                .collect::<Vec<_>>()
        }),
    })
}

fn family_converged(stats: &Option<Vec<SolveStats>>) -> bool {
    stats
        .as_ref()
        .map_or(true, |ss| ss.iter().all(|s| s.converged))
}

/// Family-envelope lower bound for the extremal function, sampled on the
/// log-spaced evaluation grid (`extremal_field.csv` rows
/// `re1,im1,re2,im2,value`).
pub fn cmd_extremal(ctx: &CommandContext) -> anyhow::Result<i32> {
    let body = ctx.body()?;
    let set = ctx.set()?;
    let (family, stats) = build_family(ctx, body, &set)?;
    let g = &ctx.config.eval_grid;
    let grid = product_grid(g.r_min, g.r_max, g.n_radii, g.n_phases)?;
    let field = envelope_field(&family, &grid);
    let mut buf = Vec::new();
    write_field_csv(&mut buf, &field.points, &field.values)?;
    ctx.write_csv("extremal_field.csv", &buf)?;
    let finite = field.values.iter().filter(|v| v.is_finite());
    ctx.write_json(
        "extremal",
        json!({
            "set_label": set.label(),
            "candidates": set.len(),
            "n": ctx.config.degree,
            "family": family_json(&family, &stats),
            "field": {
                "points": field.points.len(),
                "min": finite.clone().copied().fold(f64::INFINITY, f64::min),
                "max": finite.copied().fold(f64::NEG_INFINITY, f64::max),
            },
        }),
    )?;
    Ok(ctx.convergence_exit(family_converged(&stats)))
}

/// Top-line (Robin-style) envelope of the family on the unit boundary grid
/// (`robin_boundary.csv`), plus the direct scaling-ladder estimate for the
/// highest-degree member with a nonzero top line.
pub fn cmd_robin(ctx: &CommandContext) -> anyhow::Result<i32> {
    let body = ctx.body()?;
    let set = ctx.set()?;
    let (family, stats) = build_family(ctx, body, &set)?;
    let boundary = BoundaryGrid::new(ctx.config.boundary_m)?;
    let off_axis: Vec<_> = boundary.off_axis_points().copied().collect();
    let field = robin_field(&family, &off_axis);
    let mut buf = Vec::new();
    write_field_csv(&mut buf, &field.points, &field.values)?;
    ctx.write_csv("robin_boundary.csv", &buf)?;

    let ladder_member = family
        .members
        .iter()
        .rev()
        .find(|m| m.polynomial.c_degree() > 0 && !m.polynomial.hat().is_zero());
    let ladder = match (ladder_member, off_axis.first()) {
        (Some(member), Some(z)) => {
            let l = robin_direct(&member.polynomial, *z, &ctx.config.lambda_ladder)?;
            json!({
                "member_degree": member.polynomial.c_degree(),
                "at": [z.z1.re, z.z1.im, z.z2.re, z.z2.im],
                "estimates": l
                    .estimates
                    .iter()
                    .map(|(lambda, v)| json!({"lambda": lambda, "estimate": v}))
                    .collect::<Vec<_>>(),
                "hat_value": l.hat_value,
            })
        }
        _ => Value::Null,
    };
    let max_abs = field
        .values
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max);
    ctx.write_json(
        "robin",
        json!({
            "set_label": set.label(),
            "candidates": set.len(),
            "n": ctx.config.degree,
            "family": family_json(&family, &stats),
            "boundary": {
                "m": boundary.m(),
                "off_axis_points": off_axis.len(),
                "max_abs": max_abs,
            },
            "ladder": ladder,
        }),
    )?;
    Ok(ctx.convergence_exit(family_converged(&stats)))
}

/// Runs the acceptance battery (optionally filtered to one suite), prints
/// the pass/fail table and returns exit code 1 when any suite fails. When a
/// config is given it is validated first, so a broken config fails the run
/// before any suite starts.
pub fn cmd_validate(
    config: Option<&Path>,
    out: Option<&Path>,
    suite: Option<&str>,
) -> anyhow::Result<i32> {
    if let Some(path) = config {
        RunConfig::load(path)?;
    }
    let reports = criteria::run_all(suite);
    if reports.is_empty() {
        println!("no suite matches {:?}", suite.unwrap_or(""));
        return Ok(1);
    }
    for r in &reports {
        println!("{}", r.summary_line());
        for line in &r.lines {
            let mark = if line.pass { "ok" } else { "FAIL" };
            println!(
                "    [{}] {}: measured {:e} (tolerance {:e})",
                mark, line.label, line.measured, line.tolerance
            );
        }
    }
    let pass = criteria::overall_pass(&reports);
    println!(
        "{}: {} of {} suites pass",
        if pass { "PASS" } else { "FAIL" },
        reports.iter().filter(|r| r.pass).count(),
        reports.len()
    );
    if let Some(dir) = out {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let envelope = json!({
            "command": "validate",
            "timestamp_unix": SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            "pass": pass,
            "suites": reports,
        });
        let path = dir.join("validate.json");
        fs::write(&path, serde_json::to_string_pretty(&envelope)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(if pass { 0 } else { 1 })
}
