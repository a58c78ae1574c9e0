//! Run configuration: one JSON document drives every subcommand. Unknown
//! fields are rejected and parse errors carry serde_json's line/column
//! information. Fields a command does not use are ignored by it but still
//! validated, so a config that works for one command round-trips unchanged
//! for all of them.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use cpx_core::domain::DiscreteCompact;
use cpx_core::extremal::FamilyProvenance;
use cpx_core::lattice::TriangleBody;
use cpx_core::minimax::SolverOptions;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub a: u32,
    pub b: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Torus { r1: f64, r2: f64, m: u32 },
    Reinhardt { profile: Vec<(f64, f64)>, m: u32 },
    PointCloud { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalGridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_radii: u32,
    pub n_phases: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverOptions::default();
        SolverSpec {
            tol: d.tol,
            max_iter: d.max_iter,
        }
    }
}

impl SolverSpec {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

fn default_degree() -> u32 {
    6
}
fn default_directions() -> u32 {
    16
}
fn default_lambda_ladder() -> Vec<f64> {
    vec![1e1, 1e2, 1e3, 1e4, 1e5, 1e6]
}
fn default_eval_grid() -> EvalGridSpec {
    EvalGridSpec {
        r_min: 1.1,
        r_max: 4.0,
        n_radii: 5,
        n_phases: 8,
    }
}
fn default_boundary_m() -> u32 {
    12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub body: BodySpec,
    pub set: SetSpec,
    #[serde(default = "default_degree")]
    pub degree: u32,
    /// Degree ladder for directional constants; defaults to `1..=degree`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_degrees: Option<Vec<u32>>,
    #[serde(default = "default_directions")]
    pub directions: u32,
    #[serde(default = "default_lambda_ladder")]
    pub lambda_ladder: Vec<f64>,
    #[serde(default = "default_eval_grid")]
    pub eval_grid: EvalGridSpec,
    #[serde(default = "default_boundary_m")]
    pub boundary_m: u32,
    /// Family construction for `extremal`/`robin`: one of `chebyshev`,
    /// `orthonormal`, `l2_monic`, `vdm_difference`. Required by `extremal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Output directory; the `--out` flag wins when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub solver: SolverSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            body: BodySpec { a: 1, b: 1 },
            set: SetSpec::Torus {
                r1: 1.0,
                r2: 1.0,
                m: 32,
            },
            degree: default_degree(),
            tau_degrees: None,
            directions: default_directions(),
            lambda_ladder: default_lambda_ladder(),
            eval_grid: default_eval_grid(),
            boundary_m: default_boundary_m(),
            family: None,
            output: None,
            solver: SolverSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<(RunConfig, PathBuf)> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("config {} is not valid", path.display()))?;
        config.validate()?;
        let dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((config, dir))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.body()?;
        match &self.set {
            SetSpec::Torus { r1, r2, m } => {
                if !(*r1 > 0.0) || !(*r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
                    bail!("set.r1/set.r2 must be positive finite, got ({r1}, {r2})");
                }
                if *m < 4 {
                    bail!("set.m must be at least 4, got {m}");
                }
            }
            SetSpec::Reinhardt { profile, m } => {
                if profile.is_empty() {
                    bail!("set.profile must list at least one radius pair");
                }
                for (i, (r1, r2)) in profile.iter().enumerate() {
                    if !(*r1 > 0.0) || !(*r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
                        bail!("set.profile[{i}] must be positive finite, got ({r1}, {r2})");
                    }
                }
                if *m < 4 {
                    bail!("set.m must be at least 4, got {m}");
                }
            }
            SetSpec::PointCloud { path } => {
                if path.is_empty() {
                    bail!("set.path must not be empty");
                }
            }
        }
        if let Some(ks) = &self.tau_degrees {
            if ks.is_empty() {
                bail!("tau_degrees must not be an empty list");
            }
            if ks.windows(2).any(|w| w[0] >= w[1]) || ks[0] == 0 {
                bail!("tau_degrees must be strictly ascending positive integers");
            }
        }
        if self.directions == 0 {
            bail!("directions must be at least 1");
        }
        for (i, l) in self.lambda_ladder.iter().enumerate() {
            if !(*l > 1.0) || !l.is_finite() {
                bail!("lambda_ladder[{i}] must be finite and > 1, got {l}");
            }
        }
        let g = &self.eval_grid;
        if !(g.r_min > 0.0) || !(g.r_max >= g.r_min) || !g.r_max.is_finite() {
            bail!(
                "eval_grid radial range [{}, {}] must be positive, finite and ordered",
                g.r_min,
                g.r_max
            );
        }
        if g.n_radii == 0 || g.n_phases == 0 {
            bail!("eval_grid.n_radii and eval_grid.n_phases must be at least 1");
        }
        if self.boundary_m < 4 {
            bail!("boundary_m must be at least 4, got {}", self.boundary_m);
        }
        if let Some(f) = &self.family {
            self.family_provenance()
                .with_context(|| format!("family {f:?} is not recognised"))?;
        }
        if !(self.solver.tol > 0.0) || !self.solver.tol.is_finite() {
            bail!("solver.tol must be positive finite, got {}", self.solver.tol);
        }
        if self.solver.max_iter == 0 {
            bail!("solver.max_iter must be at least 1");
        }
        Ok(())
    }

    pub fn body(&self) -> anyhow::Result<TriangleBody> {
        TriangleBody::new(self.body.a, self.body.b)
            .with_context(|| format!("body ({}, {})", self.body.a, self.body.b))
    }

    /// Materialises the discrete set; relative point-cloud paths resolve
    /// against the config file's directory.
    pub fn build_set(&self, config_dir: &Path) -> anyhow::Result<DiscreteCompact> {
        match &self.set {
            SetSpec::Torus { r1, r2, m } => Ok(DiscreteCompact::torus(*r1, *r2, *m)?),
            SetSpec::Reinhardt { profile, m } => Ok(DiscreteCompact::reinhardt(profile, *m)?),
            SetSpec::PointCloud { path } => {
                let p = PathBuf::from(path);
                let resolved = if p.is_absolute() {
                    p
                } else {
                    config_dir.join(p)
                };
                let file = fs::File::open(&resolved)
                    .with_context(|| format!("cannot open point cloud {}", resolved.display()))?;
                let (points, _) = cpx_core::io::read_points_csv(file)?;
                Ok(DiscreteCompact::from_points(
                    points,
                    false,
                    resolved.display().to_string(),
                )?)
            }
        }
    }

    pub fn family_provenance(&self) -> anyhow::Result<FamilyProvenance> {
        match self.family.as_deref() {
            Some("chebyshev") => Ok(FamilyProvenance::Chebyshev),
            Some("orthonormal") => Ok(FamilyProvenance::Orthonormal),
            Some("l2_monic") => Ok(FamilyProvenance::L2Monic),
            Some("vdm_difference") => Ok(FamilyProvenance::VdmDifference),
            Some(other) => bail!(
                "family {other:?} is not one of chebyshev, orthonormal, l2_monic, vdm_difference"
            ),
            None => bail!("this command needs a family entry in the config"),
        }
    }

    pub fn tau_degree_list(&self) -> Vec<u32> {
        match &self.tau_degrees {
            Some(ks) => ks.clone(),
            None => (1..=self.degree.max(1)).collect(),
        }
    }
}
