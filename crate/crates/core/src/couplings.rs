//! Effective qubit-qubit couplings mediated by a spin chain (a "spin bus"),
//! and the observables that characterize a bus state.
//!
//! A probe qubit exchange-coupled to bus site `i` sees, to first order in
//! the probe coupling, an effective field set by the local moment
//! `m_i = <0| sigma_iz |0>` of the bus ground state. Two probes at sites
//! `i` and `j` acquire a second-order effective exchange whose
//! bus-structure factor is
//!
//! ```text
//! K_{i,j} = (1/2) sum_{n excluded}' <0|sigma_i mu|n><n|sigma_j mu|0> / (E_0 - E_n)
//! ```
//!
//! per Pauli component `mu` (the probe couplings are divided out, so
//! `J2 = J_A J_B K` in reference-coupling units). The sum excludes the
//! ground manifold; see [`j2_exact`] for the finite-field refinement.
//!
//! Everything here works on real sector-basis eigenvectors produced by
//! [`crate::solve`]. Pauli conventions: sigma = 2 s, and `sigma_y` never
//! enters these formulas (at the fields considered, `xx` and `yy` elements
//! coincide by the reality of the eigenbasis).

use crate::basis::{spin_z, Axis, SectorBasis};
use crate::error::{Error, Result};
use crate::model::{attach_qubits, SectorHamiltonian, SpinSystemSpec};
use crate::solve::{full_spectrum, lowest_k, Completeness, Level, SolverOptions, Spectrum};

/// Pauli component of a second-order coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum J2Component {
    Zz,
    Xx,
}

fn level_vector<'a>(level: &'a Level, what: &str) -> Result<&'a Vec<f64>> {
    level
        .vector
        .as_ref()
        .map(|v| v.as_ref())
        .ok_or_else(|| Error::state(format!("{what} needs eigenvectors, but they were dropped")))
}

/// `sigma_mu(site)` applied to a sector-basis vector, expanded per target
/// sector as (n_up, vector) pairs. `Z` stays in place; `X` splits the image
/// across the two neighboring sectors (bounds permitting).
fn sigma_images(
    basis: &SectorBasis,
    v: &[f64],
    site: usize,
    axis: Axis,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let n = basis.n_sites();
    let n_up = basis.n_up();
    match axis {
        Axis::Z => {
            let mut w = vec![0.0; basis.dim()];
            for (k, x) in v.iter().enumerate() {
                w[k] = x * 2.0 * spin_z(basis.state(k), site);
            }
            Ok(vec![(n_up, w)])
        }
        Axis::X => {
            let mut out = Vec::new();
            let down_target = if n_up > 0 {
                Some(SectorBasis::build(n, n_up - 1)?)
            } else {
                None
            };
            let up_target = if n_up < n {
                Some(SectorBasis::build(n, n_up + 1)?)
            } else {
                None
            };
            let mut w_down = down_target.as_ref().map(|b| vec![0.0; b.dim()]);
            let mut w_up = up_target.as_ref().map(|b| vec![0.0; b.dim()]);
            for (k, &x) in v.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let s = basis.state(k);
                let flipped = s ^ (1 << site);
                if s >> site & 1 == 1 {
                    let b = down_target.as_ref().expect("lowering from n_up >= 1");
                    w_down.as_mut().unwrap()[b.rank(flipped)] += x;
                } else {
                    let b = up_target.as_ref().expect("raising from n_up <= n - 1");
                    w_up.as_mut().unwrap()[b.rank(flipped)] += x;
                }
            }
            if let (Some(b), Some(w)) = (down_target, w_down) {
                out.push((b.n_up(), w));
            }
            if let (Some(b), Some(w)) = (up_target, w_up) {
                out.push((b.n_up(), w));
            }
            Ok(out)
        }
        Axis::Y => Err(Error::param(
            "sigma_y images are not needed by any coupling formula here",
        )),
    }
}

/// Local Pauli moments `m_i = <v| sigma_iz |v>` of a level, all sites.
pub fn local_moments(level: &Level, n_sites: usize) -> Result<Vec<f64>> {
    let v = level_vector(level, "local_moments")?;
    let basis = SectorBasis::build(n_sites, level.n_up)?;
    if v.len() != basis.dim() {
        return Err(Error::state(format!(
            "vector length {} does not match sector dimension {}",
            v.len(),
            basis.dim()
        )));
    }
    let mut m = vec![0.0; n_sites];
    for (k, &x) in v.iter().enumerate() {
        let w = x * x;
        let s = basis.state(k);
        for (i, mi) in m.iter_mut().enumerate() {
            *mi += w * 2.0 * spin_z(s, i);
        }
    }
    Ok(m)
}

/// Two-point longitudinal correlator `<v| sigma_iz sigma_jz |v>`.
pub fn sigma_zz_correlation(level: &Level, n_sites: usize, i: usize, j: usize) -> Result<f64> {
    let v = level_vector(level, "sigma_zz_correlation")?;
    let basis = SectorBasis::build(n_sites, level.n_up)?;
    if i >= n_sites || j >= n_sites {
        return Err(Error::param(format!("sites ({i}, {j}) out of range for {n_sites} sites")));
    }
    let mut c = 0.0;
    for (k, &x) in v.iter().enumerate() {
        let s = basis.state(k);
        c += x * x * 4.0 * spin_z(s, i) * spin_z(s, j);
    }
    Ok(c)
}

/// Transition element `<a| sigma_ix |b>`; `None` when the sectors are not
/// adjacent so the element vanishes identically.
pub fn sigma_x_element(a: &Level, b: &Level, n_sites: usize, site: usize) -> Result<Option<f64>> {
    let va = level_vector(a, "sigma_x_element")?;
    let vb = level_vector(b, "sigma_x_element")?;
    if a.n_up.abs_diff(b.n_up) != 1 {
        return Ok(None);
    }
    let basis_b = SectorBasis::build(n_sites, b.n_up)?;
    let images = sigma_images(&basis_b, vb, site, Axis::X)?;
    for (n_up, w) in images {
        if n_up == a.n_up {
            return Ok(Some(va.iter().zip(&w).map(|(x, y)| x * y).sum()));
        }
    }
    Ok(None)
}

/// First-order coupling structure per bus site, from the two lowest levels.
///
/// `z[i] = (<0|sigma_iz|0> - <1|sigma_iz|1>) / 2` resolves the effective
/// longitudinal moment on the lowest pair; `x[i] = <0|sigma_ix|1>` is the
/// transverse transition moment. When the two levels are not in adjacent
/// sectors the `x` element vanishes identically and `x_valid` is false.
/// For an odd chain at zero field the pair is the ground doublet and
/// `z = x = m` site by site.
#[derive(Debug, Clone)]
pub struct J1Components {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub x_valid: bool,
}

pub fn j1_components(level0: &Level, level1: &Level, n_sites: usize) -> Result<J1Components> {
    let m0 = local_moments(level0, n_sites)?;
    let m1 = local_moments(level1, n_sites)?;
    let z: Vec<f64> = m0.iter().zip(&m1).map(|(a, b)| (a - b) / 2.0).collect();
    let mut x = vec![0.0; n_sites];
    let mut x_valid = true;
    for (site, xi) in x.iter_mut().enumerate() {
        match sigma_x_element(level0, level1, n_sites, site)? {
            Some(v) => *xi = v,
            None => {
                x_valid = false;
                break;
            }
        }
    }
    if !x_valid {
        x = vec![0.0; n_sites];
    }
    Ok(J1Components { z, x, x_valid })
}

/// Exact second-order coupling structure factor between bus sites, with the
/// bookkeeping of which levels were excluded from the sum.
#[derive(Debug, Clone)]
pub struct J2Exact {
    /// `K_{i,j}` for the requested component, probe couplings divided out.
    pub value: f64,
    /// Sorted level indices left out of the sum.
    pub excluded_levels: Vec<usize>,
    /// True when the sum additionally excluded a quasi-degenerate partner:
    /// on an odd chain at finite field the split-off other half of the zero
    /// field doublet sits a tiny denominator away and would dominate the sum
    /// with a term the perturbation theory does not license.
    pub quasi_degenerate_exclusion: bool,
}

/// Exact `K_{i,j}` by explicit summation over the full spectrum.
///
/// Excludes every level within `degeneracy_tol` of the ground energy. If the
/// chain has an odd site count and only the ground level itself fell in that
/// window, the first excited level is excluded as well (and flagged): it is
/// the field-split partner of the ground doublet.
pub fn j2_exact(
    spectrum: &Spectrum,
    i: usize,
    j: usize,
    component: J2Component,
    degeneracy_tol: f64,
) -> Result<J2Exact> {
    if spectrum.completeness != Completeness::Full {
        return Err(Error::state(
            "j2_exact sums over all levels and needs a full spectrum",
        ));
    }
    let n = spectrum.n_sites;
    if i >= n || j >= n {
        return Err(Error::param(format!("sites ({i}, {j}) out of range for {n} sites")));
    }
    let ground = &spectrum.levels[0];
    let gv = level_vector(ground, "j2_exact")?;
    let basis0 = SectorBasis::build(n, ground.n_up)?;
    let axis = match component {
        J2Component::Zz => Axis::Z,
        J2Component::Xx => Axis::X,
    };
    let wi = sigma_images(&basis0, gv, i, axis)?;
    let wj = sigma_images(&basis0, gv, j, axis)?;

    let mut excluded = spectrum.degenerate_ground_manifold(degeneracy_tol);
    let mut quasi = false;
    if n % 2 == 1 && excluded.len() == 1 && spectrum.levels.len() > 1 {
        excluded.push(1);
        quasi = true;
    }

    let e0 = ground.energy;
    let mut value = 0.0;
    for (idx, level) in spectrum.levels.iter().enumerate() {
        if excluded.contains(&idx) {
            continue;
        }
        let wi_match = wi.iter().find(|(u, _)| *u == level.n_up);
        let wj_match = wj.iter().find(|(u, _)| *u == level.n_up);
        let (wi_v, wj_v) = match (wi_match, wj_match) {
            (Some((_, a)), Some((_, b))) => (a, b),
            _ => continue,
        };
        let vn = level_vector(level, "j2_exact")?;
        let ci: f64 = vn.iter().zip(wi_v).map(|(x, y)| x * y).sum();
        if ci == 0.0 {
            continue;
        }
        let cj: f64 = vn.iter().zip(wj_v).map(|(x, y)| x * y).sum();
        value += 0.5 * ci * cj / (e0 - level.energy);
    }
    Ok(J2Exact { value, excluded_levels: excluded, quasi_degenerate_exclusion: quasi })
}

/// Closed-form estimate of `K_{i,j}` for an odd chain, using only ground
/// moments, the ground longitudinal correlator and the doublet-to-excited
/// gap: `K ~ (m_i m_j - <sigma_iz sigma_jz>) / (2 (E_2 - E_1))`.
pub fn j2_approx_odd(spectrum: &Spectrum, i: usize, j: usize) -> Result<f64> {
    if spectrum.n_sites % 2 == 0 {
        return Err(Error::param("the odd-chain estimate needs an odd site count"));
    }
    if spectrum.levels.len() < 3 {
        return Err(Error::state("need at least the three lowest levels"));
    }
    let ground = &spectrum.levels[0];
    let m = local_moments(ground, spectrum.n_sites)?;
    let corr = sigma_zz_correlation(ground, spectrum.n_sites, i, j)?;
    let d12 = spectrum.gap(1, 2)?;
    if d12 <= 0.0 {
        return Err(Error::state("levels 1 and 2 are degenerate; the estimate diverges"));
    }
    Ok((m[i] * m[j] - corr) / (2.0 * d12))
}

/// Closed-form estimate for an even chain (unique singlet-like ground
/// state): `K ~ -<sigma_iz sigma_jz> / (2 (E_1 - E_0))`.
pub fn j2_approx_even(spectrum: &Spectrum, i: usize, j: usize) -> Result<f64> {
    if spectrum.n_sites % 2 == 1 {
        return Err(Error::param("the even-chain estimate needs an even site count"));
    }
    if spectrum.levels.len() < 2 {
        return Err(Error::state("need at least the two lowest levels"));
    }
    let ground = &spectrum.levels[0];
    let corr = sigma_zz_correlation(ground, spectrum.n_sites, i, j)?;
    let d01 = spectrum.gap(0, 1)?;
    if d01 <= 0.0 {
        return Err(Error::state("levels 0 and 1 are degenerate; the estimate diverges"));
    }
    Ok(-corr / (2.0 * d01))
}

/// Exchange/Zeeman split of the two lowest level energies.
#[derive(Debug, Clone, Copy)]
pub struct GapDecomposition {
    pub ej0: f64,
    pub ez0: f64,
    pub ej1: f64,
    pub ez1: f64,
}

/// `E_k = <k|H_J|k> + <k|H_Z|k>` for levels 0 and 1. The exchange part of a
/// gap is what survives at zero field; the Zeeman part tracks the fields.
pub fn gap_decomposition(spec: &SpinSystemSpec, spectrum: &Spectrum) -> Result<GapDecomposition> {
    if spectrum.levels.len() < 2 {
        return Err(Error::state("need at least two levels to decompose a gap"));
    }
    let mut parts = [0.0f64; 4];
    for (k, slot) in [0usize, 1].iter().zip(parts.chunks_mut(2)) {
        let level = &spectrum.levels[*k];
        let v = level_vector(level, "gap_decomposition")?;
        let op = SectorHamiltonian::new(spec, level.n_up)?;
        if v.len() != op.dim() {
            return Err(Error::state("level vector does not match the system"));
        }
        slot[0] = op.exchange_expectation(v);
        slot[1] = op.zeeman_expectation(v);
    }
    Ok(GapDecomposition { ej0: parts[0], ez0: parts[1], ej1: parts[2], ez1: parts[3] })
}

/// `|<a|b>|`, zero when the levels live in different sectors (orthogonal by
/// magnetization). Both levels must carry vectors of equal length.
pub fn fidelity(a: &Level, b: &Level) -> Result<f64> {
    if a.n_up != b.n_up {
        return Ok(0.0);
    }
    let va = level_vector(a, "fidelity")?;
    let vb = level_vector(b, "fidelity")?;
    if va.len() != vb.len() {
        return Err(Error::state("fidelity of vectors from different systems"));
    }
    Ok(va.iter().zip(vb).map(|(x, y)| x * y).sum::<f64>().abs())
}

/// Orientation of an odd chain's ground moment relative to the field axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipState {
    /// Ground level has S_z > 0: moment along the nominal field.
    Parallel,
    /// Ground level has S_z < 0: disorder flipped the collective moment.
    Flipped,
    /// No orientation to speak of: even site count, or the ground manifold
    /// still contains both signs (zero net field).
    Undefined,
}

/// Classify the ground level orientation. `tol` is the degeneracy window
/// used to decide whether both doublet members are still tied.
pub fn detect_flip(spectrum: &Spectrum, tol: f64) -> FlipState {
    if spectrum.n_sites % 2 == 0 {
        return FlipState::Undefined;
    }
    let manifold = spectrum.degenerate_ground_manifold(tol);
    let first = spectrum.levels[manifold[0]].sz2;
    if manifold.iter().any(|&i| spectrum.levels[i].sz2.signum() != first.signum()) {
        return FlipState::Undefined;
    }
    if first > 0 {
        FlipState::Parallel
    } else {
        FlipState::Flipped
    }
}

/// Everything [`validate_effective`] measures for one probe coupling value.
#[derive(Debug, Clone)]
pub struct EffectiveValidation {
    /// Lowest-manifold energies of the exactly solved bus + probes system.
    pub exact: Vec<f64>,
    /// Eigenvalues of the projected second-order effective Hamiltonian.
    pub projection: Vec<f64>,
    /// Eigenvalues of the display-form spin model built from first- and
    /// second-order couplings (three spins for an odd bus, two for even).
    pub display: Vec<f64>,
    /// `max_k |exact_k - projection_k|`, absolute energies.
    pub projection_discrepancy: f64,
    /// `max_k |(exact_k - exact_0) - (display_k - display_0)|`; the display
    /// model carries no absolute offset, so it is compared on level spacings.
    pub display_discrepancy: f64,
    /// First-order couplings used in the display model, one per probe.
    pub j1: Vec<f64>,
    /// Second-order probe-probe coupling used in the display model.
    pub j2: f64,
    /// Perturbation ratios of the attachments (see [`attach_qubits`]).
    pub perturbation_ratios: Vec<f64>,
}

/// Build the second-order projected effective Hamiltonian of two probes on
/// `bus` and compare it, together with the display-form model, against the
/// exact low manifold of the combined system.
///
/// The projection works in the basis {bus ground manifold} x {probe
/// configurations}: with `P` that projector, `H1` the probe-bus exchange and
/// `E_0` the bus ground energy,
///
/// ```text
/// H_eff = P H P + P H1 (E_0 - H_0)^(-1) H1 P   (off-manifold resolvent)
/// ```
///
/// whose error is third order in the probe coupling over the bus gap. The
/// display model keeps only the named couplings (`J1` per probe to a
/// collective bus spin, `J2` between probes), which costs it one order.
pub fn validate_effective(
    bus: &SpinSystemSpec,
    site_a: usize,
    site_b: usize,
    j_a: f64,
    j_b: f64,
    opts: &SolverOptions,
) -> Result<EffectiveValidation> {
    bus.validate()?;
    let n = bus.n_sites;
    if site_a >= n || site_b >= n {
        return Err(Error::param(format!(
            "probe sites ({site_a}, {site_b}) out of range for a {n}-site bus"
        )));
    }
    let mut bus_opts = opts.clone();
    bus_opts.keep_vectors = true;
    let bus_spectrum = full_spectrum(bus, &bus_opts)?;
    let manifold = bus_spectrum.degenerate_ground_manifold(opts.degeneracy_tol);
    if manifold.len() > 2 {
        return Err(Error::state(format!(
            "bus ground manifold has {} members; only non-degenerate or doublet \
             ground states are supported",
            manifold.len()
        )));
    }
    let g_count = manifold.len();
    let e0 = bus_spectrum.ground_energy();

    // --- projected effective Hamiltonian ------------------------------
    // Compound states |g, q>: bus manifold member g, probe configuration
    // q in 0..4 with bit 0 = probe on site_a, bit 1 = probe on site_b,
    // set bit = up. H1 = sum_alpha j_alpha s_(site_alpha) . S_alpha expands
    // a compound state over bus sectors and probe configurations; the
    // expansion is then resolved in the bus eigenbasis.
    let attach: [(usize, f64); 2] = [(site_a, j_a), (site_b, j_b)];
    let dim_eff = 4 * g_count;
    let n_levels = bus_spectrum.levels.len();
    // Per compound basis state: coefficients on (probe config, bus level).
    let mut coeff: Vec<Vec<f64>> = Vec::with_capacity(dim_eff);

    // Basis vectors per sector, built on demand.
    let mut sector_basis: Vec<Option<SectorBasis>> = vec![None; n + 1];
    let get_basis = |n_up: usize, store: &mut Vec<Option<SectorBasis>>| -> Result<SectorBasis> {
        if store[n_up].is_none() {
            store[n_up] = Some(SectorBasis::build(n, n_up)?);
        }
        Ok(store[n_up].clone().unwrap())
    };

    for &g_idx in &manifold {
        let g_level = &bus_spectrum.levels[g_idx];
        let gv = level_vector(g_level, "validate_effective")?;
        let gu = g_level.n_up;
        let gb = get_basis(gu, &mut sector_basis)?;
        for q in 0..4u8 {
            // Accumulate H1 |g, q> as vectors per (bus n_up, probe config).
            let mut image: Vec<((usize, u8), Vec<f64>)> = Vec::new();
            let add = |key: (usize, u8), idx: usize, val: f64, dim: usize,
                           image: &mut Vec<((usize, u8), Vec<f64>)>| {
                if let Some(slot) = image.iter_mut().find(|(k, _)| *k == key) {
                    slot.1[idx] += val;
                } else {
                    let mut v = vec![0.0; dim];
                    v[idx] = val;
                    image.push((key, v));
                }
            };
            for (alpha, &(site, j)) in attach.iter().enumerate() {
                let probe_up = q >> alpha & 1 == 1;
                let s_q = if probe_up { 0.5 } else { -0.5 };
                // Longitudinal part: j * S_alpha_z * s_(site)z acting on the bus.
                for (k, &x) in gv.iter().enumerate() {
                    let val = j * s_q * spin_z(gb.state(k), site) * x;
                    if val != 0.0 {
                        add((gu, q), k, val, gb.dim(), &mut image);
                    }
                }
                // Flip-flop: j/2 (s+ S- + s- S+). A probe flip pairs with the
                // opposite bus flip on `site`.
                let q_flipped = q ^ (1 << alpha);
                if probe_up {
                    // S- on the probe, s+ on the bus site: bus n_up + 1.
                    if gu < n {
                        let tb = get_basis(gu + 1, &mut sector_basis)?;
                        for (k, &x) in gv.iter().enumerate() {
                            let s = gb.state(k);
                            if s >> site & 1 == 0 {
                                let t = tb.rank(s ^ (1 << site));
                                add((gu + 1, q_flipped), t, 0.5 * j * x, tb.dim(), &mut image);
                            }
                        }
                    }
                } else if gu > 0 {
                    // S+ on the probe, s- on the bus site: bus n_up - 1.
                    let tb = get_basis(gu - 1, &mut sector_basis)?;
                    for (k, &x) in gv.iter().enumerate() {
                        let s = gb.state(k);
                        if s >> site & 1 == 1 {
                            let t = tb.rank(s ^ (1 << site));
                            add((gu - 1, q_flipped), t, 0.5 * j * x, tb.dim(), &mut image);
                        }
                    }
                }
            }
            // Resolve the image in the bus eigenbasis: c[(q', level)].
            let mut c = vec![0.0f64; 4 * n_levels];
            for ((u, qc), w) in &image {
                for (lvl_idx, level) in bus_spectrum.levels.iter().enumerate() {
                    if level.n_up != *u {
                        continue;
                    }
                    let vn = level_vector(level, "validate_effective")?;
                    let dot: f64 = vn.iter().zip(w).map(|(x, y)| x * y).sum();
                    c[*qc as usize * n_levels + lvl_idx] = dot;
                }
            }
            coeff.push(c);
        }
    }

    // H_eff[a][b] = E0 delta + <b|H1|a> + sum_(n off manifold, q)
    //               c_a[q, n] c_b[q, n] / (E0 - E_n).
    let mut h_eff = nalgebra::DMatrix::<f64>::zeros(dim_eff, dim_eff);
    let in_manifold = |lvl: usize| manifold.contains(&lvl);
    for a in 0..dim_eff {
        for b in 0..dim_eff {
            let (gb_idx, qb) = (manifold[b / 4], (b % 4) as u8);
            let mut val = if a == b { e0 } else { 0.0 };
            // First order: coefficient of |g_b, q_b> in H1|g_a, q_a>.
            val += coeff[a][qb as usize * n_levels + gb_idx];
            // Second order through every off-manifold level.
            let mut second = 0.0;
            for lvl in 0..n_levels {
                if in_manifold(lvl) {
                    continue;
                }
                let den = e0 - bus_spectrum.levels[lvl].energy;
                for q in 0..4usize {
                    let ca = coeff[a][q * n_levels + lvl];
                    if ca == 0.0 {
                        continue;
                    }
                    second += ca * coeff[b][q * n_levels + lvl] / den;
                }
            }
            val += second;
            h_eff[(a, b)] = val;
        }
    }
    let se = h_eff.symmetric_eigen();
    let mut projection: Vec<f64> = se.eigenvalues.iter().copied().collect();
    projection.sort_by(|x, y| x.total_cmp(y));

    // --- exact low manifold of the combined system ---------------------
    let attached = attach_qubits(bus, &attach, 0.0)?;
    let exact_spectrum = lowest_k(&attached.spec, dim_eff, None, opts)?;
    let exact: Vec<f64> = exact_spectrum.levels.iter().map(|l| l.energy).collect();

    // --- display-form model --------------------------------------------
    let k_zz = j2_exact(&bus_spectrum, site_a, site_b, J2Component::Zz, opts.degeneracy_tol)?;
    let j2 = j_a * j_b * k_zz.value;
    let (display, j1) = if g_count == 2 {
        // Odd bus: probes couple to the collective doublet spin with
        // J1_alpha = j_alpha * m_(site_alpha), plus the direct J2 term.
        let m = local_moments(&bus_spectrum.levels[manifold[0]], n)?;
        let j1a = j_a * m[site_a];
        let j1b = j_b * m[site_b];
        let three = SpinSystemSpec {
            n_sites: 3,
            bonds: vec![(0, 2, j1a), (1, 2, j1b), (0, 1, j2)],
            fields: vec![0.0; 3],
            label: None,
        };
        let sp = full_spectrum(&three, &SolverOptions::default())?;
        (sp.levels.iter().map(|l| l.energy).collect::<Vec<f64>>(), vec![j1a, j1b])
    } else {
        // Even bus: the collective spin is inert; only J2 remains.
        let two = SpinSystemSpec {
            n_sites: 2,
            bonds: vec![(0, 1, j2)],
            fields: vec![0.0; 2],
            label: None,
        };
        let sp = full_spectrum(&two, &SolverOptions::default())?;
        (sp.levels.iter().map(|l| l.energy).collect::<Vec<f64>>(), vec![0.0, 0.0])
    };

    let projection_discrepancy = exact
        .iter()
        .zip(&projection)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    let display_discrepancy = exact
        .iter()
        .zip(&display)
        .map(|(x, y)| ((x - exact[0]) - (y - display[0])).abs())
        .fold(0.0f64, f64::max);

    Ok(EffectiveValidation {
        exact,
        projection,
        display,
        projection_discrepancy,
        display_discrepancy,
        j1,
        j2,
        perturbation_ratios: attached.perturbation_ratios,
    })
}

/// Discrepancy-vs-coupling table for a sequence of probe couplings (applied
/// symmetrically to both probes). The consecutive ratios expose the error
/// order: the projection rides at third order (ratio ~8 per halving), the
/// display form at second (~4).
#[derive(Debug, Clone)]
pub struct ValidationScaling {
    pub couplings: Vec<f64>,
    pub results: Vec<EffectiveValidation>,
    /// display_discrepancy[k] / display_discrepancy[k+1].
    pub display_ratios: Vec<f64>,
    /// projection_discrepancy[k] / projection_discrepancy[k+1].
    pub projection_ratios: Vec<f64>,
}

pub fn validation_scaling(
    bus: &SpinSystemSpec,
    site_a: usize,
    site_b: usize,
    couplings: &[f64],
    opts: &SolverOptions,
) -> Result<ValidationScaling> {
    if couplings.len() < 2 {
        return Err(Error::param("need at least two coupling values to expose scaling"));
    }
    let mut results = Vec::with_capacity(couplings.len());
    for &j in couplings {
        if j <= 0.0 || !j.is_finite() {
            return Err(Error::param(format!("probe coupling must be positive, got {j}")));
        }
        results.push(validate_effective(bus, site_a, site_b, j, j, opts)?);
    }
    let ratio = |f: fn(&EffectiveValidation) -> f64| -> Vec<f64> {
        results.windows(2).map(|w| f(&w[0]) / f(&w[1])).collect()
    };
    Ok(ValidationScaling {
        couplings: couplings.to_vec(),
        display_ratios: ratio(|r| r.display_discrepancy),
        projection_ratios: ratio(|r| r.projection_discrepancy),
        results,
    })
}
