//! `spinbus scaling`: clean-system finite-size sweep (energy per bond, gap,
//! end moment) and the derived fits.

use serde::Serialize;
use spinbus_core::{combined_sweep, fit_gap_scaling, fit_moment_scaling, scaling_to_csv, F64};

use crate::config::{self, ScalingConfig};
use crate::output::RunWriter;
use crate::RunArgs;

#[derive(Serialize)]
struct GapFitReport {
    /// Coefficient of the fitted `gap = c / N` law.
    c: F64,
    rms_residual: F64,
    n_points: usize,
}

#[derive(Serialize)]
struct MomentFitReport {
    /// Log-log slope of the end moment versus N.
    exponent: F64,
    amplitude: F64,
    r2: F64,
    n_points: usize,
}

#[derive(Serialize)]
struct FitsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_fit: Option<GapFitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moment_fit: Option<MomentFitReport>,
}

pub fn run(args: &RunArgs) -> anyhow::Result<()> {
    let cfg: ScalingConfig = config::load(&args.config, "scaling")?;
    let mut writer = RunWriter::new(&args.out, args.format)?;
    let opts = cfg.solver_options();

    let rows = combined_sweep(cfg.n_min, cfg.n_max, cfg.boundary, &opts)?;
    writer.csv("scaling.csv", &scaling_to_csv(&rows))?;

    let gap_fit = match fit_gap_scaling(&rows) {
        Ok(f) => Some(GapFitReport {
            c: F64(f.c),
            rms_residual: F64(f.rms_residual),
            n_points: f.n_points,
        }),
        Err(e) => {
            writer.warn(format!("no gap fit: {e}"));
            None
        }
    };
    let moment_fit = match fit_moment_scaling(&rows) {
        Ok(f) => Some(MomentFitReport {
            exponent: F64(f.exponent),
            amplitude: F64(f.amplitude),
            r2: F64(f.r2),
            n_points: f.n_points,
        }),
        Err(e) => {
            writer.warn(format!("no end-moment fit: {e}"));
            None
        }
    };
    writer.json("fits.json", &FitsReport { gap_fit, moment_fit })?;

    writer.finish("scaling", &cfg, args.seed)
}
