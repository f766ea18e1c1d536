//! Disorder ensembles: seeded sampling, parallel evaluation, statistics.
//!
//! Coupling disorder draws every bond from `Normal(1, sigma_j)` (in units of
//! the reference coupling) and every site field from `Normal(b0, sigma_b)`.
//! Couplings must stay positive; a draw that produces any non-positive
//! coupling rejects the whole sample and redraws it, so the accepted
//! distribution is the correlated truncation of the joint one, not a
//! per-bond truncation.
//!
//! Reproducibility contract: sample `i` consumes only stream `i + 1` of a
//! counter-based generator seeded with `master_seed` (stream 0 is reserved
//! for auxiliary draws such as the Monte Carlo oracle below). Results are
//! therefore independent of thread count and of which other samples ran;
//! aggregation walks samples in index order, so ensemble artifacts are
//! byte-identical across runs and thread pools.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::couplings::{
    detect_flip, fidelity, gap_decomposition, j2_exact, local_moments, FlipState, J2Component,
};
use crate::error::{Error, Result};
use crate::fmt::sig15;
use crate::model::{make_uniform, make_with_boundary, Boundary, SpinSystemSpec};
use crate::solve::{full_spectrum, lowest_k, SolverOptions, Spectrum};

/// Maximum whole-sample redraws before sampling gives up. Hitting this means
/// the requested `sigma_j` makes positive couplings too rare to be a
/// meaningful model, which is a configuration problem, not bad luck.
pub const MAX_REDRAWS: usize = 1000;

/// Ensemble description. Unknown keys are rejected on parse so a typo in a
/// config file cannot silently fall back to a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    pub n_sites: usize,
    #[serde(default)]
    pub boundary: Boundary,
    /// Nominal uniform field (dimensionless).
    #[serde(default)]
    pub b0: f64,
    /// Standard deviation of the bond couplings around 1.
    #[serde(default)]
    pub sigma_j: f64,
    /// Standard deviation of the site fields around `b0`.
    #[serde(default)]
    pub sigma_b: f64,
    pub n_samples: usize,
    /// Seed of the whole ensemble; sample `i` derives its stream from it.
    pub master_seed: u64,
}

impl DisorderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 || self.n_sites > crate::basis::MAX_SITES {
            return Err(Error::Config(format!(
                "n_sites must be in 1..={}, got {}",
                crate::basis::MAX_SITES,
                self.n_sites
            )));
        }
        if self.boundary == Boundary::Ring && self.n_sites < 3 {
            return Err(Error::Config("a ring needs at least 3 sites".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be at least 1".into()));
        }
        for (name, v) in [("b0", self.b0), ("sigma_j", self.sigma_j), ("sigma_b", self.sigma_b)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.sigma_j < 0.0 || self.sigma_b < 0.0 {
            return Err(Error::Config("disorder strengths must be non-negative".into()));
        }
        Ok(())
    }
}

/// Draw sample `index` of the ensemble. Deterministic in (config, index).
pub fn sample_spec(config: &DisorderConfig, index: usize) -> Result<SpinSystemSpec> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.master_seed);
    rng.set_stream(index as u64 + 1);
    let n_bonds = config.boundary.bond_count(config.n_sites);
    let dist_j = Normal::new(1.0, config.sigma_j)
        .map_err(|e| Error::Config(format!("bad sigma_j: {e}")))?;
    let dist_b = Normal::new(config.b0, config.sigma_b)
        .map_err(|e| Error::Config(format!("bad sigma_b: {e}")))?;
    for _ in 0..MAX_REDRAWS {
        let j: Vec<f64> = (0..n_bonds).map(|_| dist_j.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..config.n_sites).map(|_| dist_b.sample(&mut rng)).collect();
        if j.iter().all(|&x| x > 0.0) {
            let mut spec = make_with_boundary(config.boundary, config.n_sites, &j, &b)?;
            spec.label = Some(format!("sample-{index}"));
            return Ok(spec);
        }
    }
    Err(Error::Sampling(format!(
        "sample {index}: no all-positive coupling draw in {MAX_REDRAWS} attempts \
         (sigma_j = {} is too large for the positive-coupling model)",
        config.sigma_j
    )))
}

/// A quantity evaluated on every sample. Site labels in the string form are
/// 1-based, matching reports; internally they are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Level energy E_0 .. E_3.
    Energy(usize),
    /// Gap E_1 - E_0.
    D01,
    /// Gap E_2 - E_1.
    D12,
    /// Ground local moment of one site (0-based inside).
    Moment(usize),
    /// Sum of ground moments (= 2 S_z of the ground level).
    MomentTotal,
    /// Exact second-order structure factor, zz component, 0-based sites.
    Kzz(usize, usize),
    /// Same, xx component.
    Kxx(usize, usize),
    /// |overlap| of the sample ground state with the clean system's.
    Fidelity,
    /// 1 if the collective moment flipped, 0 if parallel, 1/2 if undefined.
    Flip,
    /// Exchange part of E_0.
    Ej0,
    /// Zeeman part of E_0.
    Ez0,
    /// Exchange part of E_1.
    Ej1,
    /// Zeeman part of E_1.
    Ez1,
}

impl Observable {
    /// Parse the canonical column name: `e0..e3`, `d01`, `d12`, `m<site>`,
    /// `m_total`, `k_zz_<i>_<j>` / `k_xx_<i>_<j>` (1-based sites),
    /// `fidelity`, `flip`, `ej0`, `ez0`, `ej1`, `ez1`.
    pub fn parse(name: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "unknown observable '{name}'; expected e0..e3, d01, d12, m<site>, m_total, \
                 k_zz_<i>_<j>, k_xx_<i>_<j>, fidelity, flip, ej0, ez0, ej1 or ez1"
            ))
        };
        match name {
            "d01" => return Ok(Observable::D01),
            "d12" => return Ok(Observable::D12),
            "m_total" => return Ok(Observable::MomentTotal),
            "fidelity" => return Ok(Observable::Fidelity),
            "flip" => return Ok(Observable::Flip),
            "ej0" => return Ok(Observable::Ej0),
            "ez0" => return Ok(Observable::Ez0),
            "ej1" => return Ok(Observable::Ej1),
            "ez1" => return Ok(Observable::Ez1),
            _ => {}
        }
        if let Some(rest) = name.strip_prefix('e') {
            if let Ok(k) = rest.parse::<usize>() {
                if k <= 3 {
                    return Ok(Observable::Energy(k));
                }
                return Err(bad());
            }
        }
        if let Some(rest) = name.strip_prefix('m') {
            if let Ok(site) = rest.parse::<usize>() {
                if site == 0 {
                    return Err(Error::Config(format!(
                        "observable '{name}': sites are labeled from 1"
                    )));
                }
                return Ok(Observable::Moment(site - 1));
            }
        }
        for (prefix, xx) in [("k_zz_", false), ("k_xx_", true)] {
            if let Some(rest) = name.strip_prefix(prefix) {
                let parts: Vec<&str> = rest.split('_').collect();
                if parts.len() == 2 {
                    if let (Ok(i), Ok(j)) = (parts[0].parse::<usize>(), parts[1].parse::<usize>())
                    {
                        if i == 0 || j == 0 {
                            return Err(Error::Config(format!(
                                "observable '{name}': sites are labeled from 1"
                            )));
                        }
                        return Ok(if xx {
                            Observable::Kxx(i - 1, j - 1)
                        } else {
                            Observable::Kzz(i - 1, j - 1)
                        });
                    }
                }
            }
        }
        Err(bad())
    }

    /// Canonical column name; inverse of [`parse`](Self::parse).
    pub fn name(&self) -> String {
        match self {
            Observable::Energy(k) => format!("e{k}"),
            Observable::D01 => "d01".into(),
            Observable::D12 => "d12".into(),
            Observable::Moment(i) => format!("m{}", i + 1),
            Observable::MomentTotal => "m_total".into(),
            Observable::Kzz(i, j) => format!("k_zz_{}_{}", i + 1, j + 1),
            Observable::Kxx(i, j) => format!("k_xx_{}_{}", i + 1, j + 1),
            Observable::Fidelity => "fidelity".into(),
            Observable::Flip => "flip".into(),
            Observable::Ej0 => "ej0".into(),
            Observable::Ez0 => "ez0".into(),
            Observable::Ej1 => "ej1".into(),
            Observable::Ez1 => "ez1".into(),
        }
    }

    /// How many sorted levels the evaluation reads.
    fn levels_needed(&self) -> usize {
        match self {
            Observable::Energy(k) => k + 1,
            Observable::D01 => 2,
            Observable::D12 => 3,
            Observable::Moment(_) | Observable::MomentTotal => 1,
            Observable::Kzz(..) | Observable::Kxx(..) => usize::MAX, // full spectrum
            Observable::Fidelity => 1,
            Observable::Flip => 2,
            Observable::Ej0 | Observable::Ez0 => 1,
            Observable::Ej1 | Observable::Ez1 => 2,
        }
    }

    fn validate_against(&self, config: &DisorderConfig) -> Result<()> {
        let check_site = |s: usize| {
            if s >= config.n_sites {
                Err(Error::Config(format!(
                    "observable {} references site {} of a {}-site system",
                    self.name(),
                    s + 1,
                    config.n_sites
                )))
            } else {
                Ok(())
            }
        };
        match self {
            Observable::Moment(i) => check_site(*i),
            Observable::Kzz(i, j) | Observable::Kxx(i, j) => {
                check_site(*i)?;
                check_site(*j)
            }
            _ => Ok(()),
        }
    }
}

/// Ensemble output: the per-sample table plus its column statistics. The raw
/// values are kept so the statistics are recomputable by any consumer.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub config: DisorderConfig,
    pub observable_names: Vec<String>,
    /// `values[sample][column]`, sample index order.
    pub values: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    /// Sample standard deviation, (n - 1) divisor; 0 for a single sample.
    pub stds: Vec<f64>,
}

impl EnsembleResult {
    /// CSV table `sample_index,<columns...>`, values at 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_index");
        for name in &self.observable_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, row) in self.values.iter().enumerate() {
            out.push_str(&i.to_string());
            for v in row {
                out.push(',');
                out.push_str(&sig15(*v));
            }
            out.push('\n');
        }
        out
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.observable_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::state(format!("ensemble has no '{name}' column")))
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

struct SampleContext {
    needs_full: bool,
    k_levels: usize,
    needs_vectors: bool,
    reference_ground: Option<crate::solve::Level>,
}

fn build_context(
    config: &DisorderConfig,
    observables: &[Observable],
    opts: &SolverOptions,
) -> Result<SampleContext> {
    let needs_full = observables
        .iter()
        .any(|o| matches!(o, Observable::Kzz(..) | Observable::Kxx(..)));
    let k_levels = observables
        .iter()
        .map(|o| {
            let k = o.levels_needed();
            if k == usize::MAX {
                0
            } else {
                k
            }
        })
        .max()
        .unwrap_or(1)
        .max(2); // flip classification wants to see a possible tie partner
    let needs_vectors = observables.iter().any(|o| {
        matches!(
            o,
            Observable::Moment(_)
                | Observable::MomentTotal
                | Observable::Fidelity
                | Observable::Ej0
                | Observable::Ez0
                | Observable::Ej1
                | Observable::Ez1
        )
    });
    let reference_ground = if observables.contains(&Observable::Fidelity) {
        let clean = make_uniform(config.boundary, config.n_sites, 1.0, config.b0)?;
        let mut ref_opts = opts.clone();
        ref_opts.keep_vectors = true;
        let sp = lowest_k(&clean, 1, None, &ref_opts)?;
        Some(sp.levels[0].clone())
    } else {
        None
    };
    Ok(SampleContext { needs_full, k_levels, needs_vectors, reference_ground })
}

fn evaluate_sample(
    spec: &SpinSystemSpec,
    observables: &[Observable],
    ctx: &SampleContext,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let mut solve_opts = opts.clone();
    solve_opts.keep_vectors = ctx.needs_full || ctx.needs_vectors;
    let spectrum: Spectrum = if ctx.needs_full {
        full_spectrum(spec, &solve_opts)?
    } else {
        lowest_k(spec, ctx.k_levels, None, &solve_opts)?
    };
    let need_levels = ctx.k_levels.min(
        spectrum.sector_dims.iter().sum::<usize>(),
    );
    if spectrum.levels.len() < need_levels {
        return Err(Error::state(format!(
            "solver returned {} levels, needed {need_levels}",
            spectrum.levels.len()
        )));
    }
    let n = spec.n_sites;
    let mut moments: Option<Vec<f64>> = None;
    let mut decomposition = None;
    let mut row = Vec::with_capacity(observables.len());
    for obs in observables {
        let value = match obs {
            Observable::Energy(k) => spectrum.levels[*k].energy,
            Observable::D01 => spectrum.gap(0, 1)?,
            Observable::D12 => spectrum.gap(1, 2)?,
            Observable::Moment(i) => {
                if moments.is_none() {
                    moments = Some(local_moments(&spectrum.levels[0], n)?);
                }
                moments.as_ref().unwrap()[*i]
            }
            Observable::MomentTotal => {
                if moments.is_none() {
                    moments = Some(local_moments(&spectrum.levels[0], n)?);
                }
                moments.as_ref().unwrap().iter().sum()
            }
            Observable::Kzz(i, j) => {
                j2_exact(&spectrum, *i, *j, J2Component::Zz, opts.degeneracy_tol)?.value
            }
            Observable::Kxx(i, j) => {
                j2_exact(&spectrum, *i, *j, J2Component::Xx, opts.degeneracy_tol)?.value
            }
            Observable::Fidelity => {
                let reference = ctx
                    .reference_ground
                    .as_ref()
                    .expect("context carries a reference when fidelity is requested");
                fidelity(&spectrum.levels[0], reference)?
            }
            Observable::Flip => match detect_flip(&spectrum, opts.degeneracy_tol) {
                FlipState::Parallel => 0.0,
                FlipState::Flipped => 1.0,
                FlipState::Undefined => 0.5,
            },
            Observable::Ej0 | Observable::Ez0 | Observable::Ej1 | Observable::Ez1 => {
                if decomposition.is_none() {
                    decomposition = Some(gap_decomposition(spec, &spectrum)?);
                }
                let d = decomposition.as_ref().unwrap();
                match obs {
                    Observable::Ej0 => d.ej0,
                    Observable::Ez0 => d.ez0,
                    Observable::Ej1 => d.ej1,
                    Observable::Ez1 => d.ez1,
                    _ => unreachable!(),
                }
            }
        };
        row.push(value);
    }
    Ok(row)
}

/// Run the ensemble: sample, solve and evaluate every index in parallel,
/// then aggregate in index order.
pub fn run_ensemble(
    config: &DisorderConfig,
    observables: &[Observable],
    opts: &SolverOptions,
) -> Result<EnsembleResult> {
    config.validate()?;
    if observables.is_empty() {
        return Err(Error::Config("at least one observable is required".into()));
    }
    for obs in observables {
        obs.validate_against(config)?;
    }
    let ctx = build_context(config, observables, opts)?;
    let values: Vec<Vec<f64>> = (0..config.n_samples)
        .into_par_iter()
        .map(|i| {
            let spec = sample_spec(config, i)?;
            evaluate_sample(&spec, observables, &ctx, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut means = Vec::with_capacity(observables.len());
    let mut stds = Vec::with_capacity(observables.len());
    for col in 0..observables.len() {
        let (m, s) = mean_std(values.iter().map(|row| row[col]));
        means.push(m);
        stds.push(s);
    }
    Ok(EnsembleResult {
        config: config.clone(),
        observable_names: observables.iter().map(|o| o.name()).collect(),
        values,
        means,
        stds,
    })
}

/// Fraction of samples whose collective moment flipped against the nominal
/// field. Reads the `flip` column (ambiguous samples count half).
pub fn flipped_fraction(result: &EnsembleResult) -> Result<f64> {
    let col = result.column("flip")?;
    let (mean, _) = mean_std(result.values.iter().map(|row| row[col]));
    Ok(mean)
}

/// Cross-check of the half-normal statistics of the doublet splitting.
#[derive(Debug, Clone)]
pub struct HalfNormalCheck {
    /// Mean splitting over the actual diagonalized ensemble.
    pub ensemble_mean_gap: f64,
    /// First-order prediction `sigma_b * sqrt(sum_i m_i^2) * sqrt(2/pi)`.
    pub predicted_mean: f64,
    /// Monte Carlo mean of `|Normal(0, sigma_b * sqrt(sum m^2))|`,
    /// an independent numeric check of the half-normal mean itself.
    pub mc_mean: f64,
    /// `ensemble_mean_gap / predicted_mean`.
    pub ratio: f64,
    /// `sum_i m_i^2` of the clean chain's ground member used in the scale.
    pub moment_norm2: f64,
}

/// At zero nominal field on an odd chain, field disorder splits the ground
/// doublet by `|sum_i B_i m_i|`, a half-normal variate. Compare the
/// diagonalized ensemble mean against the first-order prediction and against
/// a direct Monte Carlo of the half-normal mean (drawn from stream 0, which
/// no ensemble sample uses).
pub fn halfnormal_gap_check(
    config: &DisorderConfig,
    mc_draws: usize,
    opts: &SolverOptions,
) -> Result<HalfNormalCheck> {
    config.validate()?;
    if config.n_sites % 2 == 0 {
        return Err(Error::Config("the doublet splitting check needs an odd chain".into()));
    }
    if config.b0 != 0.0 || config.sigma_j != 0.0 {
        return Err(Error::Config(
            "the first-order prediction holds at b0 = 0 with clean couplings; \
             set b0 = 0 and sigma_j = 0"
                .into(),
        ));
    }
    if config.sigma_b <= 0.0 {
        return Err(Error::Config("sigma_b must be positive for this check".into()));
    }
    if mc_draws == 0 {
        return Err(Error::param("mc_draws must be positive"));
    }

    // Moment profile of the clean chain's +1/2 ground member.
    let clean = make_uniform(config.boundary, config.n_sites, 1.0, 0.0)?;
    let mut v_opts = opts.clone();
    v_opts.keep_vectors = true;
    let sp = lowest_k(&clean, 1, None, &v_opts)?;
    let m = local_moments(&sp.levels[0], config.n_sites)?;
    let norm2: f64 = m.iter().map(|x| x * x).sum();
    let sigma_eff = config.sigma_b * norm2.sqrt();
    let predicted = sigma_eff * (2.0 / std::f64::consts::PI).sqrt();

    let ensemble = run_ensemble(config, &[Observable::D01], opts)?;
    let ensemble_mean = ensemble.means[0];

    let mut rng = ChaCha12Rng::seed_from_u64(config.master_seed);
    rng.set_stream(0);
    let dist = Normal::new(0.0, sigma_eff).map_err(|e| Error::Config(e.to_string()))?;
    let mc_mean =
        (0..mc_draws).map(|_| dist.sample(&mut rng).abs()).sum::<f64>() / mc_draws as f64;

    Ok(HalfNormalCheck {
        ensemble_mean_gap: ensemble_mean,
        predicted_mean: predicted,
        mc_mean,
        ratio: ensemble_mean / predicted,
        moment_norm2: norm2,
    })
}

/// Which disorder strength a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    SigmaJ,
    SigmaB,
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParameter::SigmaJ => "sigma_j",
            SweepParameter::SigmaB => "sigma_b",
        })
    }
}

/// Sensitivity of observables to a disorder strength: per-strength means and
/// spreads, plus a linear fit of spread versus strength.
#[derive(Debug, Clone)]
pub struct SensitivitySweep {
    pub parameter: SweepParameter,
    pub strengths: Vec<f64>,
    pub observable_names: Vec<String>,
    /// `means[point][column]`.
    pub means: Vec<Vec<f64>>,
    /// `stds[point][column]`.
    pub stds: Vec<Vec<f64>>,
    /// Least-squares slope of std vs strength, per column.
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
    /// Coefficient of determination of each fit.
    pub r2: Vec<f64>,
}

/// Run the ensemble at every strength on the grid (same master seed per
/// point, so strengths differ only by the disorder amplitude) and fit how
/// each observable's spread grows. The grid must have at least 4 points for
/// the fit to say anything about linearity.
pub fn sensitivity_sweep(
    base: &DisorderConfig,
    parameter: SweepParameter,
    strengths: &[f64],
    observables: &[Observable],
    opts: &SolverOptions,
) -> Result<SensitivitySweep> {
    if strengths.len() < 4 {
        return Err(Error::Config(format!(
            "sensitivity grid needs at least 4 strengths, got {}",
            strengths.len()
        )));
    }
    let mut sorted = strengths.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    for &s in &sorted {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::Config(format!("disorder strength must be >= 0, got {s}")));
        }
    }
    let mut means = Vec::with_capacity(sorted.len());
    let mut stds = Vec::with_capacity(sorted.len());
    let mut names = None;
    for &s in &sorted {
        let mut config = base.clone();
        match parameter {
            SweepParameter::SigmaJ => config.sigma_j = s,
            SweepParameter::SigmaB => config.sigma_b = s,
        }
        let result = run_ensemble(&config, observables, opts)?;
        if names.is_none() {
            names = Some(result.observable_names.clone());
        }
        means.push(result.means);
        stds.push(result.stds);
    }
    let n_obs = observables.len();
    let mut slopes = Vec::with_capacity(n_obs);
    let mut intercepts = Vec::with_capacity(n_obs);
    let mut r2 = Vec::with_capacity(n_obs);
    for col in 0..n_obs {
        let ys: Vec<f64> = stds.iter().map(|row| row[col]).collect();
        let (a, b, r) = linear_fit(&sorted, &ys);
        slopes.push(a);
        intercepts.push(b);
        r2.push(r);
    }
    Ok(SensitivitySweep {
        parameter,
        strengths: sorted,
        observable_names: names.unwrap(),
        means,
        stds,
        slopes,
        intercepts,
        r2,
    })
}

/// Ordinary least squares y = a x + b; returns (a, b, R^2).
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(u, v)| {
        let p = a * u + b;
        (v - p) * (v - p)
    }).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (a, b, r2)
}
