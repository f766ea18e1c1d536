//! `spinbus ensemble`: disorder-ensemble statistics. Four modes share the
//! same base configuration: per-sample tables, a flip-fraction grid, a
//! disorder-strength sensitivity sweep, and the doublet-splitting check.

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use spinbus_core::{
    flipped_fraction, halfnormal_gap_check, run_ensemble, sensitivity_sweep, sig15, Observable,
    SweepParameter, F64,
};

use crate::config::{self, EnsembleConfig, EnsembleMode};
use crate::output::RunWriter;
use crate::RunArgs;

#[derive(Serialize)]
struct SummaryReport {
    n_samples: usize,
    observables: Vec<String>,
    means: Vec<F64>,
    stds: Vec<F64>,
}

#[derive(Serialize)]
struct FlipGridReport {
    b0_values: Vec<F64>,
    sigma_b_values: Vec<F64>,
    /// `fractions[b0_index][sigma_b_index]`.
    fractions: Vec<Vec<F64>>,
}

#[derive(Serialize)]
struct SensitivityReport {
    parameter: SweepParameter,
    strengths: Vec<F64>,
    observables: Vec<String>,
    /// `means[strength_index][observable_index]`, same for stds.
    means: Vec<Vec<F64>>,
    stds: Vec<Vec<F64>>,
    /// Per observable: linear fit of std versus strength.
    slopes: Vec<F64>,
    intercepts: Vec<F64>,
    r2: Vec<F64>,
}

#[derive(Serialize)]
struct SplittingReport {
    ensemble_mean_gap: F64,
    predicted_mean: F64,
    mc_mean: F64,
    ratio: F64,
    moment_norm2: F64,
    mc_draws: usize,
}

fn parse_observables(names: &[String]) -> anyhow::Result<Vec<Observable>> {
    if names.is_empty() {
        bail!("the observables list must not be empty");
    }
    names.iter().map(|n| Ok(Observable::parse(n)?)).collect()
}

pub fn run(args: &RunArgs) -> anyhow::Result<()> {
    let mut cfg: EnsembleConfig = config::load(&args.config, "ensemble")?;
    let seed = args.seed.or(cfg.master_seed).ok_or_else(|| {
        anyhow!("ensemble runs need an explicit seed: pass --seed or set master_seed")
    })?;
    // The manifest must carry the resolved seed so a rerun needs no flag.
    cfg.master_seed = Some(seed);

    let mut writer = RunWriter::new(&args.out, args.format)?;
    let opts = cfg.solver_options();
    let base = cfg.disorder(seed);

    match cfg.mode {
        EnsembleMode::Samples => {
            let observables = parse_observables(&cfg.observables)?;
            let result = run_ensemble(&base, &observables, &opts)?;
            writer.csv("ensemble.csv", &result.to_csv())?;
            writer.json(
                "summary.json",
                &SummaryReport {
                    n_samples: result.values.len(),
                    observables: result.observable_names.clone(),
                    means: result.means.iter().copied().map(F64).collect(),
                    stds: result.stds.iter().copied().map(F64).collect(),
                },
            )?;
        }
        EnsembleMode::FlipGrid => {
            let grid = cfg
                .flip_grid
                .as_ref()
                .ok_or_else(|| anyhow!("flip_grid mode needs a [flip_grid] section"))?;
            if grid.b0_values.is_empty() || grid.sigma_b_values.is_empty() {
                bail!("flip_grid axes must not be empty");
            }
            let mut csv = String::from("b0,sigma_b,flip_fraction\n");
            let mut fractions = Vec::with_capacity(grid.b0_values.len());
            for &b0 in &grid.b0_values {
                let mut row = Vec::with_capacity(grid.sigma_b_values.len());
                for &sigma_b in &grid.sigma_b_values {
                    let mut point = base.clone();
                    point.b0 = b0;
                    point.sigma_b = sigma_b;
                    let result = run_ensemble(&point, &[Observable::Flip], &opts)
                        .with_context(|| format!("grid point b0={b0}, sigma_b={sigma_b}"))?;
                    let fraction = flipped_fraction(&result)?;
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        sig15(b0),
                        sig15(sigma_b),
                        sig15(fraction)
                    ));
                    row.push(F64(fraction));
                }
                fractions.push(row);
            }
            writer.csv("flip_grid.csv", &csv)?;
            writer.json(
                "flip_grid.json",
                &FlipGridReport {
                    b0_values: grid.b0_values.iter().copied().map(F64).collect(),
                    sigma_b_values: grid.sigma_b_values.iter().copied().map(F64).collect(),
                    fractions,
                },
            )?;
        }
        EnsembleMode::Sensitivity => {
            let section = cfg
                .sensitivity
                .as_ref()
                .ok_or_else(|| anyhow!("sensitivity mode needs a [sensitivity] section"))?;
            let observables = parse_observables(&cfg.observables)?;
            let sweep =
                sensitivity_sweep(&base, section.parameter, &section.strengths, &observables, &opts)?;

            let mut csv = String::from("strength");
            for name in &sweep.observable_names {
                csv.push_str(&format!(",{name}_mean,{name}_std"));
            }
            csv.push('\n');
            for (i, s) in sweep.strengths.iter().enumerate() {
                csv.push_str(&sig15(*s));
                for col in 0..sweep.observable_names.len() {
                    csv.push(',');
                    csv.push_str(&sig15(sweep.means[i][col]));
                    csv.push(',');
                    csv.push_str(&sig15(sweep.stds[i][col]));
                }
                csv.push('\n');
            }
            writer.csv("sensitivity.csv", &csv)?;
            writer.json(
                "sensitivity.json",
                &SensitivityReport {
                    parameter: sweep.parameter,
                    strengths: sweep.strengths.iter().copied().map(F64).collect(),
                    observables: sweep.observable_names.clone(),
                    means: sweep
                        .means
                        .iter()
                        .map(|row| row.iter().copied().map(F64).collect())
                        .collect(),
                    stds: sweep
                        .stds
                        .iter()
                        .map(|row| row.iter().copied().map(F64).collect())
                        .collect(),
                    slopes: sweep.slopes.iter().copied().map(F64).collect(),
                    intercepts: sweep.intercepts.iter().copied().map(F64).collect(),
                    r2: sweep.r2.iter().copied().map(F64).collect(),
                },
            )?;
        }
        EnsembleMode::Splitting => {
            let mc_draws = cfg.splitting.as_ref().map(|s| s.mc_draws).unwrap_or(100_000);
            let check = halfnormal_gap_check(&base, mc_draws, &opts)?;
            writer.json(
                "splitting.json",
                &SplittingReport {
                    ensemble_mean_gap: F64(check.ensemble_mean_gap),
                    predicted_mean: F64(check.predicted_mean),
                    mc_mean: F64(check.mc_mean),
                    ratio: F64(check.ratio),
                    moment_norm2: F64(check.moment_norm2),
                    mc_draws,
                },
            )?;
        }
    }

    writer.finish("ensemble", &cfg, Some(seed))
}
