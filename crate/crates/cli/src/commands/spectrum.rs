//! `spinbus spectrum`: energy levels of one system, with an optional sweep
//! of the uniform field and level-crossing detection on the sweep.

use anyhow::{bail, Context};
use serde::Serialize;
use spinbus_core::{full_spectrum, lowest_k, sig15, Completeness, Spectrum, F64};

use crate::config::{self, SpectrumConfig};
use crate::output::RunWriter;
use crate::RunArgs;

#[derive(Serialize)]
struct LevelRow {
    level: usize,
    energy: F64,
    sz: F64,
    n_up: usize,
    sector_dim: usize,
}

#[derive(Serialize)]
struct SpectrumReport {
    n_sites: usize,
    complete: bool,
    levels: Vec<LevelRow>,
    max_residual: F64,
}

fn report(spectrum: &Spectrum) -> SpectrumReport {
    SpectrumReport {
        n_sites: spectrum.n_sites,
        complete: spectrum.completeness == Completeness::Full,
        levels: spectrum
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| LevelRow {
                level: i,
                energy: F64(l.energy),
                sz: F64(l.sz()),
                n_up: l.n_up,
                sector_dim: spectrum.sector_dims[l.n_up],
            })
            .collect(),
        max_residual: F64(spectrum.max_residual),
    }
}

#[derive(Serialize)]
struct CrossingEntry {
    /// Field of the gap minimum: the interpolated vertex of the V formed by
    /// the two linear branches around an interior grid minimum, or the grid
    /// point itself at the sweep edges.
    b0: F64,
    /// Smallest gap sampled around this minimum.
    min_gap: F64,
}

#[derive(Serialize)]
struct CrossingReport {
    level_a: usize,
    level_b: usize,
    tol: F64,
    /// Every local gap minimum that dipped below `tol`, in field order. A
    /// degenerate pair at the start of the sweep and a genuine crossing
    /// further along both appear here.
    crossings: Vec<CrossingEntry>,
}

/// Indices of the local minima of the gap curve (plateaus count once).
fn local_minima(gaps: &[f64]) -> Vec<usize> {
    let n = gaps.len();
    (0..n)
        .filter(|&m| {
            let falling_into = m == 0 || gaps[m - 1] > gaps[m];
            let not_falling_out = m + 1 == n || gaps[m + 1] >= gaps[m];
            falling_into && not_falling_out
        })
        .collect()
}

/// Interpolate the vertex of a V-shaped dip from the neighbors of grid
/// minimum `m`. Two levels crossing linearly in the field give
/// `gap = s |b - b*|`, so `g[m-1] / g[m+1] = (b* - b[m-1]) / (b[m+1] - b*)`.
fn vertex(bs: &[f64], gaps: &[f64], m: usize) -> f64 {
    if m == 0 || m + 1 == gaps.len() {
        return bs[m];
    }
    let (gl, gr) = (gaps[m - 1], gaps[m + 1]);
    if gl + gr <= 0.0 {
        return bs[m];
    }
    (gl * bs[m + 1] + gr * bs[m - 1]) / (gl + gr)
}

pub fn run(args: &RunArgs) -> anyhow::Result<()> {
    let mut cfg: SpectrumConfig = config::load(&args.config, "spectrum")?;
    let mut writer = RunWriter::new(&args.out, args.format)?;
    let opts = cfg.solver_options();

    let spec = cfg.system.build()?;
    let total_states = 1usize << spec.n_sites;
    if let Some(k) = cfg.k {
        if k > total_states {
            writer.warn(format!(
                "k = {k} exceeds the {total_states} states of a {}-site system; clamped",
                spec.n_sites
            ));
            cfg.k = Some(total_states);
        }
    }

    let mut solve_opts = opts.clone();
    solve_opts.keep_vectors = cfg.vectors;
    let spectrum = match cfg.k {
        None => full_spectrum(&spec, &solve_opts)?,
        Some(k) => lowest_k(&spec, k, None, &solve_opts)?,
    };
    writer.csv("spectrum.csv", &spectrum.to_csv())?;
    writer.json("spectrum.json", &report(&spectrum))?;
    if cfg.vectors {
        writer.binary("vectors.bin", &spectrum.vectors_to_binary())?;
    }

    if let Some(sweep) = &cfg.sweep {
        if sweep.steps < 2 {
            bail!("sweep.steps must be at least 2, got {}", sweep.steps);
        }
        if sweep.levels == 0 {
            bail!("sweep.levels must be at least 1");
        }
        if !(sweep.b_min.is_finite() && sweep.b_max.is_finite()) || sweep.b_min >= sweep.b_max {
            bail!("sweep needs finite b_min < b_max");
        }
        if let Some(c) = &sweep.crossing {
            if c.level_a >= sweep.levels || c.level_b >= sweep.levels {
                bail!(
                    "crossing levels ({}, {}) must be below sweep.levels = {}",
                    c.level_a,
                    c.level_b,
                    sweep.levels
                );
            }
            if c.level_a == c.level_b {
                bail!("crossing levels must differ");
            }
        }

        let bs: Vec<f64> = (0..sweep.steps)
            .map(|i| {
                sweep.b_min
                    + (sweep.b_max - sweep.b_min) * i as f64 / (sweep.steps - 1) as f64
            })
            .collect();
        let sweep_opts = opts.clone();
        let mut table: Vec<Vec<f64>> = Vec::with_capacity(bs.len());
        for &b in &bs {
            let point = cfg.system.build_with_field(Some(b))?;
            let sp = lowest_k(&point, sweep.levels, None, &sweep_opts)
                .with_context(|| format!("sweep point b0 = {b}"))?;
            if sp.levels.len() < sweep.levels {
                bail!(
                    "system has only {} levels but the sweep asked for {}",
                    sp.levels.len(),
                    sweep.levels
                );
            }
            table.push(sp.levels.iter().take(sweep.levels).map(|l| l.energy).collect());
        }

        let mut csv = String::from("b0");
        for k in 0..sweep.levels {
            csv.push_str(&format!(",E{k}"));
        }
        csv.push('\n');
        for (b, row) in bs.iter().zip(&table) {
            csv.push_str(&sig15(*b));
            for e in row {
                csv.push(',');
                csv.push_str(&sig15(*e));
            }
            csv.push('\n');
        }
        writer.csv("sweep.csv", &csv)?;

        if let Some(c) = &sweep.crossing {
            let gaps: Vec<f64> =
                table.iter().map(|row| (row[c.level_b] - row[c.level_a]).abs()).collect();
            let crossings: Vec<CrossingEntry> = local_minima(&gaps)
                .into_iter()
                .filter(|&m| gaps[m] < c.tol)
                .map(|m| CrossingEntry { b0: F64(vertex(&bs, &gaps, m)), min_gap: F64(gaps[m]) })
                .collect();
            if crossings.is_empty() {
                let m = (0..gaps.len())
                    .min_by(|&a, &b| gaps[a].total_cmp(&gaps[b]))
                    .expect("sweep grids are non-empty");
                writer.warn(format!(
                    "levels {} and {} never came within {} of each other \
                     (closest gap {} at b0 = {})",
                    c.level_a,
                    c.level_b,
                    c.tol,
                    sig15(gaps[m]),
                    sig15(bs[m])
                ));
            }
            writer.json(
                "crossings.json",
                &CrossingReport {
                    level_a: c.level_a,
                    level_b: c.level_b,
                    tol: F64(c.tol),
                    crossings,
                },
            )?;
        }
    }

    writer.finish("spectrum", &cfg, args.seed)
}
