//! Finite-size scaling of clean chains: ground energy per bond, spin gap,
//! and end-site moment, as functions of the site count.
//!
//! All sweeps run on uniform couplings at zero field, where the ground
//! sector is known (total S_z = 0 for even N, +-1/2 for odd N), so each
//! system costs one restricted eigensolve instead of a scan over all
//! sectors. The gap tracked is the one that controls the effective-coupling
//! formulas: the singlet-triplet gap E_1 - E_0 for even N and the
//! doublet-to-excited gap E_2 - E_1 for odd N.

use serde::Serialize;

use crate::couplings::local_moments;
use crate::disorder::linear_fit;
use crate::error::{Error, Result};
use crate::fmt::sig15;
use crate::model::{make_uniform, Boundary};
use crate::solve::{lowest_k, SolverOptions};

/// Hard cap on swept system sizes; beyond this the half-filled sector
/// outgrows what the iterative path is tuned for.
pub const SWEEP_MAX_SITES: usize = 20;

/// One system size in a sweep. Fields that a given sweep does not measure
/// stay `None` and serialize to empty CSV cells.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub boundary: Boundary,
    pub e0: f64,
    pub e0_per_bond: f64,
    pub gap: Option<f64>,
    pub m_end: Option<f64>,
}

fn check_range(n_min: usize, n_max: usize, boundary: Boundary) -> Result<()> {
    let floor = match boundary {
        Boundary::Open => 2,
        Boundary::Ring => 3,
    };
    if n_min < floor {
        return Err(Error::param(format!(
            "{boundary} sweeps start at {floor} sites, got n_min = {n_min}"
        )));
    }
    if n_min > n_max {
        return Err(Error::param(format!("n_min ({n_min}) exceeds n_max ({n_max})")));
    }
    if n_max > SWEEP_MAX_SITES {
        return Err(Error::param(format!(
            "n_max = {n_max} exceeds the sweep cap of {SWEEP_MAX_SITES} sites"
        )));
    }
    Ok(())
}

/// Solve one clean system and fill a row. The ground sector is pinned by
/// parity; gaps widen the sector list so the relevant excitation is seen.
fn survey(
    n: usize,
    boundary: Boundary,
    want_gap: bool,
    want_moment: bool,
    opts: &SolverOptions,
) -> Result<ScalingRow> {
    let spec = make_uniform(boundary, n, 1.0, 0.0)?;
    let odd = n % 2 == 1;
    let sectors: Vec<usize> = if odd && want_gap {
        vec![(n - 1) / 2, (n + 1) / 2]
    } else if odd {
        vec![(n + 1) / 2]
    } else {
        vec![n / 2]
    };
    let k = if want_gap {
        if odd {
            3
        } else {
            2
        }
    } else {
        1
    };
    let mut solve_opts = opts.clone();
    solve_opts.keep_vectors = want_moment;
    let sp = lowest_k(&spec, k, Some(&sectors), &solve_opts)?;
    let e0 = sp.ground_energy();
    let gap = if want_gap {
        Some(if odd { sp.gap(1, 2)? } else { sp.gap(0, 1)? })
    } else {
        None
    };
    let m_end = if want_moment {
        Some(local_moments(&sp.levels[0], n)?[0])
    } else {
        None
    };
    Ok(ScalingRow {
        n,
        boundary,
        e0,
        e0_per_bond: e0 / boundary.bond_count(n) as f64,
        gap,
        m_end,
    })
}

/// Ground energy per bond of uniform zero-field systems for
/// `n_min..=n_max`. Open chains converge to the infinite-chain value from
/// below: the free ends strengthen the correlations on nearby bonds.
pub fn energy_per_bond_sweep(
    n_min: usize,
    n_max: usize,
    boundary: Boundary,
    opts: &SolverOptions,
) -> Result<Vec<ScalingRow>> {
    check_range(n_min, n_max, boundary)?;
    (n_min..=n_max).map(|n| survey(n, boundary, false, false, opts)).collect()
}

/// Parity-resolved gap of uniform open chains for `n_min..=n_max`:
/// the singlet-triplet gap for even N, the doublet-to-excited gap for odd N.
pub fn gap_sweep(n_min: usize, n_max: usize, opts: &SolverOptions) -> Result<Vec<ScalingRow>> {
    check_range(n_min, n_max, Boundary::Open)?;
    (n_min..=n_max).map(|n| survey(n, Boundary::Open, true, false, opts)).collect()
}

/// End-site ground moment of uniform zero-field odd open chains, taken on
/// the S_z = +1/2 doublet member. `ns` must be odd sizes within the cap.
pub fn end_moment_sweep(ns: &[usize], opts: &SolverOptions) -> Result<Vec<ScalingRow>> {
    if ns.is_empty() {
        return Err(Error::param("end moment sweep needs at least one size"));
    }
    for &n in ns {
        if n % 2 == 0 {
            return Err(Error::param(format!(
                "end moments are defined on odd chains; {n} is even"
            )));
        }
        if !(3..=SWEEP_MAX_SITES).contains(&n) {
            return Err(Error::param(format!(
                "end moment sizes must be in 3..={SWEEP_MAX_SITES}, got {n}"
            )));
        }
    }
    ns.iter().map(|&n| survey(n, Boundary::Open, false, true, opts)).collect()
}

/// Everything the scaling study measures per size, one restricted solve per
/// system: energy always, gap and (odd N) end moment for open chains.
pub fn combined_sweep(
    n_min: usize,
    n_max: usize,
    boundary: Boundary,
    opts: &SolverOptions,
) -> Result<Vec<ScalingRow>> {
    check_range(n_min, n_max, boundary)?;
    (n_min..=n_max)
        .map(|n| {
            let open = boundary == Boundary::Open;
            survey(n, boundary, open, open && n % 2 == 1, opts)
        })
        .collect()
}

/// No-intercept fit `gap ~ c / N` over the rows that carry a gap.
#[derive(Debug, Clone, Serialize)]
pub struct GapFit {
    /// Fitted coefficient of the 1/N law.
    pub c: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
    pub n_points: usize,
}

pub fn fit_gap_scaling(rows: &[ScalingRow]) -> Result<GapFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.gap.map(|g| (1.0 / r.n as f64, g)))
        .collect();
    if pts.len() < 2 {
        return Err(Error::param("gap fit needs at least two rows with gaps"));
    }
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let c = sxy / sxx;
    let ss: f64 = pts.iter().map(|(x, y)| (y - c * x) * (y - c * x)).sum();
    Ok(GapFit { c, rms_residual: (ss / pts.len() as f64).sqrt(), n_points: pts.len() })
}

/// Power-law fit `m_end ~ amplitude * N^exponent` over the rows that carry
/// an end moment, done in log-log coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct MomentFit {
    pub exponent: f64,
    pub amplitude: f64,
    /// Coefficient of determination of the log-log line.
    pub r2: f64,
    pub n_points: usize,
}

pub fn fit_moment_scaling(rows: &[ScalingRow]) -> Result<MomentFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.m_end.and_then(|m| (m > 0.0).then(|| ((r.n as f64).ln(), m.ln()))))
        .collect();
    if pts.len() < 2 {
        return Err(Error::param("moment fit needs at least two rows with positive moments"));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(MomentFit { exponent: slope, amplitude: intercept.exp(), r2, n_points: pts.len() })
}

/// CSV table `N,boundary,E0,E0_per_bond,gap,m_end`; unmeasured cells are
/// empty, numbers carry 15 significant digits.
pub fn scaling_to_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("N,boundary,E0,E0_per_bond,gap,m_end\n");
    for r in rows {
        let gap = r.gap.map(sig15).unwrap_or_default();
        let m = r.m_end.map(sig15).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.boundary,
            sig15(r.e0),
            sig15(r.e0_per_bond),
            gap,
            m
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::full_spectrum;
    use approx::assert_abs_diff_eq;

    #[test]
    fn energy_rows_match_unrestricted_solves() {
        // The sweep solves only the parity-pinned sector; the full spectrum
        // is the independent route.
        let opts = SolverOptions::default();
        let rows = energy_per_bond_sweep(2, 6, Boundary::Open, &opts).unwrap();
        for row in &rows {
            let spec = make_uniform(Boundary::Open, row.n, 1.0, 0.0).unwrap();
            let sp = full_spectrum(&spec, &opts).unwrap();
            assert_abs_diff_eq!(row.e0, sp.ground_energy(), epsilon = 1e-10);
            assert_abs_diff_eq!(
                row.e0_per_bond,
                sp.ground_energy() / (row.n as f64 - 1.0),
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(rows[0].e0_per_bond, -0.75, epsilon = 1e-12);
    }

    #[test]
    fn ring_energy_rows() {
        let opts = SolverOptions::default();
        let rows = energy_per_bond_sweep(3, 6, Boundary::Ring, &opts).unwrap();
        for row in &rows {
            let spec = make_uniform(Boundary::Ring, row.n, 1.0, 0.0).unwrap();
            let sp = full_spectrum(&spec, &opts).unwrap();
            assert_abs_diff_eq!(row.e0, sp.ground_energy(), epsilon = 1e-10);
        }
        // The 4-ring ground energy is exactly -2.
        assert_abs_diff_eq!(rows[1].e0, -2.0, epsilon = 1e-10);
    }

    #[test]
    fn gap_values_match_the_frozen_table() {
        let rows = gap_sweep(2, 7, &SolverOptions::default()).unwrap();
        let expect = [1.0, 1.0, 0.658919, 0.720779, 0.491582, 0.557335];
        for (row, e) in rows.iter().zip(expect) {
            assert_abs_diff_eq!(row.gap.unwrap(), e, epsilon = 1e-6);
        }
    }

    #[test]
    fn end_moments_match_the_frozen_table() {
        let rows = end_moment_sweep(&[3, 5, 7, 9], &SolverOptions::default()).unwrap();
        let expect = [2.0 / 3.0, 0.511666, 0.420265, 0.359175];
        for (row, e) in rows.iter().zip(expect) {
            assert_abs_diff_eq!(row.m_end.unwrap(), e, epsilon = 1e-6);
        }
    }

    #[test]
    fn combined_sweep_fills_by_parity() {
        let rows = combined_sweep(4, 7, Boundary::Open, &SolverOptions::default()).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.gap.is_some()));
        assert!(rows[0].m_end.is_none(), "even N has no doublet end moment");
        assert!(rows[1].m_end.is_some());
        let ring = combined_sweep(4, 6, Boundary::Ring, &SolverOptions::default()).unwrap();
        assert!(ring.iter().all(|r| r.gap.is_none() && r.m_end.is_none()));
    }

    #[test]
    fn gap_fit_recovers_a_synthetic_law() {
        let rows: Vec<ScalingRow> = (4..=12)
            .map(|n| ScalingRow {
                n,
                boundary: Boundary::Open,
                e0: 0.0,
                e0_per_bond: 0.0,
                gap: Some(3.3 / n as f64),
                m_end: None,
            })
            .collect();
        let fit = fit_gap_scaling(&rows).unwrap();
        assert_abs_diff_eq!(fit.c, 3.3, epsilon = 1e-12);
        assert!(fit.rms_residual < 1e-12);
        assert_eq!(fit.n_points, 9);
    }

    #[test]
    fn moment_fit_recovers_a_synthetic_power_law() {
        let rows: Vec<ScalingRow> = [5usize, 7, 9, 11, 13]
            .iter()
            .map(|&n| ScalingRow {
                n,
                boundary: Boundary::Open,
                e0: 0.0,
                e0_per_bond: 0.0,
                gap: None,
                m_end: Some(0.8 * (n as f64).powf(-0.5)),
            })
            .collect();
        let fit = fit_moment_scaling(&rows).unwrap();
        assert_abs_diff_eq!(fit.exponent, -0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.amplitude, 0.8, epsilon = 1e-10);
        assert!(fit.r2 > 0.999999);
    }

    #[test]
    fn sweep_guards() {
        let opts = SolverOptions::default();
        assert!(energy_per_bond_sweep(4, 25, Boundary::Open, &opts).is_err());
        assert!(energy_per_bond_sweep(6, 4, Boundary::Open, &opts).is_err());
        assert!(energy_per_bond_sweep(2, 4, Boundary::Ring, &opts).is_err());
        assert!(gap_sweep(1, 4, &opts).is_err());
        assert!(end_moment_sweep(&[4], &opts).is_err());
        assert!(end_moment_sweep(&[], &opts).is_err());
    }

    #[test]
    fn csv_cells_go_empty_where_nothing_was_measured() {
        let rows = vec![ScalingRow {
            n: 4,
            boundary: Boundary::Open,
            e0: -1.5,
            e0_per_bond: -0.5,
            gap: None,
            m_end: None,
        }];
        let csv = scaling_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "N,boundary,E0,E0_per_bond,gap,m_end");
        assert_eq!(
            lines.next().unwrap(),
            "4,open,-1.50000000000000e0,-5.00000000000000e-1,,"
        );
    }
}
