//! `spinbus validate`: solve the bus with two attached probe qubits exactly
//! and compare against the second-order projected effective Hamiltonian and
//! the display-form spin model, over a sequence of probe couplings.

use anyhow::bail;
use serde::Serialize;
use spinbus_core::{
    sig15, validate_effective, validation_scaling, EffectiveValidation, F64,
    PERTURBATION_WARN_THRESHOLD,
};

use crate::config::{self, ValidateConfig};
use crate::output::RunWriter;
use crate::RunArgs;

#[derive(Serialize)]
struct ValidationRow {
    coupling: F64,
    /// Lowest-manifold energies of the exact combined system.
    exact: Vec<F64>,
    /// Eigenvalues of the projected effective Hamiltonian.
    projection: Vec<F64>,
    /// Eigenvalues of the display-form spin model.
    display: Vec<F64>,
    projection_discrepancy: F64,
    display_discrepancy: F64,
    j1: Vec<F64>,
    j2: F64,
    perturbation_ratios: Vec<F64>,
}

#[derive(Serialize)]
struct ValidateReport {
    site_a: usize,
    site_b: usize,
    results: Vec<ValidationRow>,
    /// Consecutive discrepancy ratios; absent for a single coupling.
    #[serde(skip_serializing_if = "Option::is_none")]
    projection_ratios: Option<Vec<F64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    display_ratios: Option<Vec<F64>>,
}

fn row(coupling: f64, r: &EffectiveValidation) -> ValidationRow {
    ValidationRow {
        coupling: F64(coupling),
        exact: r.exact.iter().copied().map(F64).collect(),
        projection: r.projection.iter().copied().map(F64).collect(),
        display: r.display.iter().copied().map(F64).collect(),
        projection_discrepancy: F64(r.projection_discrepancy),
        display_discrepancy: F64(r.display_discrepancy),
        j1: r.j1.iter().copied().map(F64).collect(),
        j2: F64(r.j2),
        perturbation_ratios: r.perturbation_ratios.iter().copied().map(F64).collect(),
    }
}

pub fn run(args: &RunArgs) -> anyhow::Result<()> {
    let cfg: ValidateConfig = config::load(&args.config, "validate")?;
    let mut writer = RunWriter::new(&args.out, args.format)?;
    let (a, b) = cfg.sites()?;
    let bus = cfg.system.build()?;
    let opts = cfg.solver_options();

    if cfg.couplings.is_empty() {
        bail!("the couplings list must not be empty");
    }
    let (rows, projection_ratios, display_ratios) = if cfg.couplings.len() == 1 {
        let j = cfg.couplings[0];
        let r = validate_effective(&bus, a, b, j, j, &opts)?;
        (vec![row(j, &r)], None, None)
    } else {
        let scaling = validation_scaling(&bus, a, b, &cfg.couplings, &opts)?;
        let rows: Vec<ValidationRow> = scaling
            .couplings
            .iter()
            .zip(&scaling.results)
            .map(|(&j, r)| row(j, r))
            .collect();
        (
            rows,
            Some(scaling.projection_ratios.iter().copied().map(F64).collect()),
            Some(scaling.display_ratios.iter().copied().map(F64).collect()),
        )
    };

    for r in &rows {
        for ratio in &r.perturbation_ratios {
            if ratio.0 >= PERTURBATION_WARN_THRESHOLD {
                writer.warn(format!(
                    "perturbation ratio {} at probe coupling {} is not small; \
                     the effective models are out of their depth there",
                    sig15(ratio.0),
                    sig15(r.coupling.0)
                ));
            }
        }
    }

    let mut csv = String::from("coupling,projection_discrepancy,display_discrepancy\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            sig15(r.coupling.0),
            sig15(r.projection_discrepancy.0),
            sig15(r.display_discrepancy.0)
        ));
    }
    writer.csv("validate.csv", &csv)?;
    writer.json(
        "validate.json",
        &ValidateReport {
            site_a: a + 1,
            site_b: b + 1,
            results: rows,
            projection_ratios,
            display_ratios,
        },
    )?;

    writer.finish("validate", &cfg, args.seed)
}
