//! Config file loading and the per-command parameter sets.
//!
//! Files are TOML or JSON, chosen by extension, and unknown keys are
//! rejected everywhere so a typo cannot silently fall back to a default.
//! A previous run's `manifest.json` is also accepted: its embedded resolved
//! config is extracted (after checking it came from the same subcommand),
//! which makes every run reproducible from its own manifest.

use std::path::Path;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use spinbus_core::{
    make_with_boundary, Boundary, DisorderConfig, SolverOptions, SpinSystemSpec, SweepParameter,
};

fn one() -> f64 {
    1.0
}

/// Load a command config, unwrapping a manifest when given one.
pub fn load<T: DeserializeOwned>(path: &Path, command: &str) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext.to_ascii_lowercase().as_str() {
        "toml" => toml::from_str(&text)
            .with_context(|| format!("invalid TOML in {}", path.display())),
        "json" => {
            let value: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("invalid JSON in {}", path.display()))?;
            let payload = match (value.get("command"), value.get("config")) {
                (Some(cmd), Some(cfg)) => {
                    let written_by = cmd.as_str().unwrap_or("?");
                    if written_by != command {
                        bail!(
                            "{} is a manifest of the '{written_by}' command, \
                             not '{command}'",
                            path.display()
                        );
                    }
                    cfg.clone()
                }
                _ => value,
            };
            serde_json::from_value(payload)
                .with_context(|| format!("invalid config in {}", path.display()))
        }
        other => bail!(
            "config file {} must end in .toml or .json, got '.{other}'",
            path.display()
        ),
    }
}

/// One system in a config file. Uniform values by default; per-bond
/// couplings and per-site fields may be listed explicitly. Sites are
/// 1-based everywhere a config or report names them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub n_sites: usize,
    #[serde(default)]
    pub boundary: Boundary,
    /// Uniform exchange coupling, used when `couplings` is absent.
    #[serde(default = "one")]
    pub j0: f64,
    /// Uniform field, used when `fields` is absent.
    #[serde(default)]
    pub b0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
}

impl SystemSection {
    pub fn build(&self) -> anyhow::Result<SpinSystemSpec> {
        Ok(self.build_with_field(None)?)
    }

    /// Build the spec, optionally overriding the uniform field (for sweeps).
    pub fn build_with_field(&self, b_override: Option<f64>) -> anyhow::Result<SpinSystemSpec> {
        let n_bonds = self.boundary.bond_count(self.n_sites);
        let j = match &self.couplings {
            Some(v) => v.clone(),
            None => vec![self.j0; n_bonds],
        };
        let b = match (b_override, &self.fields) {
            (Some(b0), None) => vec![b0; self.n_sites],
            (Some(_), Some(_)) => {
                bail!("a field sweep varies the uniform field; remove the explicit `fields` list")
            }
            (None, Some(v)) => v.clone(),
            (None, None) => vec![self.b0; self.n_sites],
        };
        Ok(make_with_boundary(self.boundary, self.n_sites, &j, &b)?)
    }

    /// Convert a 1-based site label to the internal 0-based index.
    pub fn site_index(&self, label: usize, what: &str) -> anyhow::Result<usize> {
        if label == 0 || label > self.n_sites {
            bail!(
                "{what} = {label} is out of range: sites are labeled 1..={}",
                self.n_sites
            );
        }
        Ok(label - 1)
    }
}

/// Optional solver tuning; anything absent keeps the library default.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_dense_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub krylov_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SolverSection {
    pub fn to_options(&self) -> SolverOptions {
        let mut o = SolverOptions::default();
        if let Some(v) = self.dense_cap {
            o.dense_cap = v;
        }
        if let Some(v) = self.small_dense_dim {
            o.small_dense_dim = v;
        }
        if let Some(v) = self.residual_tol {
            o.residual_tol = v;
        }
        if let Some(v) = self.degeneracy_tol {
            o.degeneracy_tol = v;
        }
        if let Some(v) = self.krylov_dim {
            o.krylov_dim = v;
        }
        if let Some(v) = self.max_restarts {
            o.max_restarts = v;
        }
        if let Some(v) = self.seed {
            o.seed = v;
        }
        o
    }
}

fn solver_options(section: &Option<SolverSection>) -> SolverOptions {
    section.as_ref().map(SolverSection::to_options).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// spectrum

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub system: SystemSection,
    /// Number of levels to keep; absent = the complete spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Write the retained eigenvectors as a binary sidecar.
    #[serde(default)]
    pub vectors: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
}

impl SpectrumConfig {
    pub fn solver_options(&self) -> SolverOptions {
        solver_options(&self.solver)
    }
}

fn default_sweep_levels() -> usize {
    4
}

fn default_crossing_tol() -> f64 {
    1e-2
}

/// Uniform-field sweep: solve the lowest `levels` at every grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub b_min: f64,
    pub b_max: f64,
    /// Number of grid points, at least 2.
    pub steps: usize,
    #[serde(default = "default_sweep_levels")]
    pub levels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing: Option<CrossingSection>,
}

/// Detect where two levels cross: the field at which their gap dips below
/// `tol`, with the vertex position interpolated from the neighbors of the
/// grid minimum.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingSection {
    /// Level indices into the sorted spectrum, 0-based like the E_k labels.
    pub level_a: usize,
    pub level_b: usize,
    #[serde(default = "default_crossing_tol")]
    pub tol: f64,
}

// ---------------------------------------------------------------------------
// effective

fn default_site_a() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveConfig {
    pub system: SystemSection,
    /// First probe attachment site, 1-based. Defaults to the first site.
    #[serde(default = "default_site_a")]
    pub site_a: usize,
    /// Second probe attachment site, 1-based. Defaults to the last site.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_b: Option<usize>,
    /// Probe exchange couplings; the second-order coupling scales with both.
    #[serde(default = "one")]
    pub j_a: f64,
    #[serde(default = "one")]
    pub j_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
}

impl EffectiveConfig {
    pub fn solver_options(&self) -> SolverOptions {
        solver_options(&self.solver)
    }

    /// Resolved (site_a, site_b) as 0-based indices.
    pub fn sites(&self) -> anyhow::Result<(usize, usize)> {
        let a = self.system.site_index(self.site_a, "site_a")?;
        let b = self
            .system
            .site_index(self.site_b.unwrap_or(self.system.n_sites), "site_b")?;
        if a == b {
            bail!("site_a and site_b must differ, both are {}", a + 1);
        }
        Ok((a, b))
    }
}

// ---------------------------------------------------------------------------
// ensemble

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    /// Per-sample observable table plus summary statistics.
    #[default]
    Samples,
    /// Flip fraction on a (b0, sigma_b) grid.
    FlipGrid,
    /// Observable spread versus disorder strength, with linear fits.
    Sensitivity,
    /// Doublet-splitting statistics against the half-normal prediction.
    Splitting,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipGridSection {
    pub b0_values: Vec<f64>,
    pub sigma_b_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySection {
    pub parameter: SweepParameter,
    pub strengths: Vec<f64>,
}

fn default_mc_draws() -> usize {
    100_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingSection {
    /// Monte Carlo draws for the independent half-normal mean estimate.
    #[serde(default = "default_mc_draws")]
    pub mc_draws: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_sites: usize,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub b0: f64,
    #[serde(default)]
    pub sigma_j: f64,
    #[serde(default)]
    pub sigma_b: f64,
    pub n_samples: usize,
    /// Resolved at run time: the --seed flag overrides this, and one of the
    /// two must be present — ensembles never draw a seed from the clock.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    /// Column names, e.g. "e0", "d01", "m5", "k_zz_1_5" (sites 1-based).
    #[serde(default)]
    pub observables: Vec<String>,
    #[serde(default)]
    pub mode: EnsembleMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip_grid: Option<FlipGridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
}

impl EnsembleConfig {
    pub fn solver_options(&self) -> SolverOptions {
        solver_options(&self.solver)
    }

    pub fn disorder(&self, master_seed: u64) -> DisorderConfig {
        DisorderConfig {
            n_sites: self.n_sites,
            boundary: self.boundary,
            b0: self.b0,
            sigma_j: self.sigma_j,
            sigma_b: self.sigma_b,
            n_samples: self.n_samples,
            master_seed,
        }
    }
}

// ---------------------------------------------------------------------------
// scaling

fn default_n_min() -> usize {
    2
}

fn default_n_max() -> usize {
    14
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
}

impl ScalingConfig {
    pub fn solver_options(&self) -> SolverOptions {
        solver_options(&self.solver)
    }
}

// ---------------------------------------------------------------------------
// validate

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    /// The bus the probes attach to.
    pub system: SystemSection,
    #[serde(default = "default_site_a")]
    pub site_a: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_b: Option<usize>,
    /// Probe couplings to test, applied to both probes. Two or more expose
    /// the error scaling through consecutive discrepancy ratios.
    pub couplings: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
}

impl ValidateConfig {
    pub fn solver_options(&self) -> SolverOptions {
        solver_options(&self.solver)
    }

    pub fn sites(&self) -> anyhow::Result<(usize, usize)> {
        let a = self.system.site_index(self.site_a, "site_a")?;
        let b = self
            .system
            .site_index(self.site_b.unwrap_or(self.system.n_sites), "site_b")?;
        if a == b {
            bail!("site_a and site_b must differ, both are {}", a + 1);
        }
        Ok((a, b))
    }
}
