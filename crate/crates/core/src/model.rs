//! System description and Hamiltonian assembly.
//!
//! A [`SpinSystemSpec`] is a plain description of a spin-1/2 system:
//!
//! ```text
//! H = sum_bonds J_ij  s_i . s_j  -  sum_i b_i s_iz
//! ```
//!
//! with exchange couplings `J_ij` in units of a reference coupling and the
//! per-site longitudinal fields `b_i` already made dimensionless (field
//! energy over reference exchange energy). Site indices are 0-based here;
//! human-facing layers translate from 1-based labels at their boundary.
//!
//! The spec serializes to a stable JSON shape and round-trips bit exactly:
//! floats are written with the shortest representation that parses back to
//! the identical IEEE value.

use crate::basis::{spin_z, SectorBasis, MAX_SITES};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Largest sector dimension the dense matrix builder will materialize.
/// A 20000^2 matrix of f64 is 3.2 GB; anything above must go through the
/// matrix-free path.
pub const DENSE_DIM_CAP: usize = 20_000;

/// Coupling-strength ratio above which attaching a probe spin is no longer
/// a small perturbation of the bus spectrum.
pub const PERTURBATION_WARN_THRESHOLD: f64 = 0.1;

/// Full description of a spin system: sites, exchange bonds, local fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSystemSpec {
    /// Number of spin-1/2 sites.
    pub n_sites: usize,
    /// Exchange bonds as (site, site, coupling) triples, 0-based sites.
    pub bonds: Vec<(usize, usize, f64)>,
    /// Dimensionless longitudinal field on every site, length `n_sites`.
    pub fields: Vec<f64>,
    /// Optional free-form tag carried through outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SpinSystemSpec {
    /// Check internal consistency: index ranges, lengths, finiteness, and
    /// that no unordered site pair carries two bonds.
    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 || self.n_sites > MAX_SITES {
            return Err(Error::Config(format!(
                "n_sites must be in 1..={MAX_SITES}, got {}",
                self.n_sites
            )));
        }
        if self.fields.len() != self.n_sites {
            return Err(Error::Config(format!(
                "fields has length {}, expected n_sites = {}",
                self.fields.len(),
                self.n_sites
            )));
        }
        for &b in &self.fields {
            if !b.is_finite() {
                return Err(Error::Config("fields must be finite".into()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for &(i, j, j_ij) in &self.bonds {
            if i >= self.n_sites || j >= self.n_sites {
                return Err(Error::Config(format!(
                    "bond ({i}, {j}) references a site outside 0..{}",
                    self.n_sites
                )));
            }
            if i == j {
                return Err(Error::Config(format!("bond ({i}, {j}) joins a site to itself")));
            }
            if !j_ij.is_finite() {
                return Err(Error::Config(format!("bond ({i}, {j}) has non-finite coupling")));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::Config(format!("duplicate bond on sites ({i}, {j})")));
            }
        }
        Ok(())
    }

    /// Serialize to pretty JSON. Floats use the shortest round-tripping form.
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parse from JSON, rejecting unknown keys, then validate.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: SpinSystemSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Mean absolute exchange coupling; the natural scale of the spectrum.
    /// Zero when the system has no bonds.
    pub fn typical_exchange(&self) -> f64 {
        if self.bonds.is_empty() {
            return 0.0;
        }
        self.bonds.iter().map(|&(_, _, j)| j.abs()).sum::<f64>() / self.bonds.len() as f64
    }
}

/// Open chain of `n_sites` spins: bonds (i, i+1) with couplings `j`
/// (length `n_sites - 1`) and fields `b` (length `n_sites`).
pub fn make_chain(n_sites: usize, j: &[f64], b: &[f64]) -> Result<SpinSystemSpec> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::param(format!("n_sites must be in 1..={MAX_SITES}, got {n_sites}")));
    }
    if j.len() + 1 != n_sites {
        return Err(Error::param(format!(
            "a {n_sites}-site chain has {} bonds, got {} couplings",
            n_sites - 1,
            j.len()
        )));
    }
    if b.len() != n_sites {
        return Err(Error::param(format!(
            "need {n_sites} field values, got {}",
            b.len()
        )));
    }
    let bonds = j.iter().enumerate().map(|(i, &jv)| (i, i + 1, jv)).collect();
    let spec = SpinSystemSpec { n_sites, bonds, fields: b.to_vec(), label: None };
    spec.validate().map_err(|e| Error::param(e.to_string()))?;
    Ok(spec)
}

/// Closed ring of `n_sites >= 3` spins: the chain bonds plus the closing
/// bond (n_sites - 1, 0). Couplings `j` have length `n_sites`, the last one
/// being the closing bond.
pub fn make_ring(n_sites: usize, j: &[f64], b: &[f64]) -> Result<SpinSystemSpec> {
    if n_sites < 3 || n_sites > MAX_SITES {
        return Err(Error::param(format!(
            "a ring needs 3..={MAX_SITES} sites (2 sites would duplicate the bond), got {n_sites}"
        )));
    }
    if j.len() != n_sites {
        return Err(Error::param(format!(
            "a {n_sites}-site ring has {n_sites} bonds, got {} couplings",
            j.len()
        )));
    }
    if b.len() != n_sites {
        return Err(Error::param(format!(
            "need {n_sites} field values, got {}",
            b.len()
        )));
    }
    let mut bonds: Vec<(usize, usize, f64)> =
        j[..n_sites - 1].iter().enumerate().map(|(i, &jv)| (i, i + 1, jv)).collect();
    bonds.push((n_sites - 1, 0, j[n_sites - 1]));
    let spec = SpinSystemSpec { n_sites, bonds, fields: b.to_vec(), label: None };
    spec.validate().map_err(|e| Error::param(e.to_string()))?;
    Ok(spec)
}

/// Uniform open chain with every coupling equal to `j0` and every field `b0`.
pub fn make_uniform_chain(n_sites: usize, j0: f64, b0: f64) -> Result<SpinSystemSpec> {
    make_chain(n_sites, &vec![j0; n_sites.saturating_sub(1)], &vec![b0; n_sites])
}

/// Uniform closed ring.
pub fn make_uniform_ring(n_sites: usize, j0: f64, b0: f64) -> Result<SpinSystemSpec> {
    make_ring(n_sites, &vec![j0; n_sites], &vec![b0; n_sites])
}

/// Chain topology selector used by ensembles and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Ring,
}

impl Boundary {
    /// Bonds of an `n`-site system with this topology.
    pub fn bond_count(self, n_sites: usize) -> usize {
        match self {
            Boundary::Open => n_sites.saturating_sub(1),
            Boundary::Ring => n_sites,
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Ring => "ring",
        })
    }
}

/// Chain or ring from explicit couplings, routed by `boundary`.
pub fn make_with_boundary(
    boundary: Boundary,
    n_sites: usize,
    j: &[f64],
    b: &[f64],
) -> Result<SpinSystemSpec> {
    match boundary {
        Boundary::Open => make_chain(n_sites, j, b),
        Boundary::Ring => make_ring(n_sites, j, b),
    }
}

/// Uniform chain or ring.
pub fn make_uniform(boundary: Boundary, n_sites: usize, j0: f64, b0: f64) -> Result<SpinSystemSpec> {
    match boundary {
        Boundary::Open => make_uniform_chain(n_sites, j0, b0),
        Boundary::Ring => make_uniform_ring(n_sites, j0, b0),
    }
}

/// Result of grafting probe spins onto a bus system.
#[derive(Debug, Clone)]
pub struct AttachedSystem {
    /// Combined system: bus sites keep their indices, probe spins are
    /// appended after them in attachment order.
    pub spec: SpinSystemSpec,
    /// Indices of the appended probe sites in `spec`.
    pub qubit_sites: Vec<usize>,
    /// `N_bus * |J_attach| / (pi^2 * J_typ)` per attachment; the size of the
    /// first perturbative correction relative to the bus level spacing.
    pub perturbation_ratios: Vec<f64>,
    /// Human-readable warnings for attachments whose ratio is not small.
    pub warnings: Vec<String>,
}

/// Graft probe spins (qubits) onto `bus`. Each attachment is
/// `(bus_site, coupling)`: one new spin bonded to `bus_site` with the given
/// exchange coupling. Probe sites get the local field `qubit_field`
/// (normally zero: an idle qubit has no Zeeman term of its own here).
///
/// Attachments are treated perturbatively downstream, so every one is scored
/// with `N_bus |J| / (pi^2 J_typ)`; ratios at or above
/// [`PERTURBATION_WARN_THRESHOLD`] produce a warning but not an error.
pub fn attach_qubits(
    bus: &SpinSystemSpec,
    attachments: &[(usize, f64)],
    qubit_field: f64,
) -> Result<AttachedSystem> {
    bus.validate()?;
    if attachments.is_empty() {
        return Err(Error::param("at least one attachment is required"));
    }
    let n_total = bus.n_sites + attachments.len();
    if n_total > MAX_SITES {
        return Err(Error::Resource(format!(
            "bus of {} sites plus {} probes exceeds the {MAX_SITES}-site cap",
            bus.n_sites,
            attachments.len()
        )));
    }
    if !qubit_field.is_finite() {
        return Err(Error::param("qubit_field must be finite"));
    }
    let j_typ = bus.typical_exchange();
    // A single-site bus has no bonds; fall back to unit scale so the ratio
    // stays defined (and is huge, which is the honest signal).
    let j_scale = if j_typ > 0.0 { j_typ } else { 1.0 };

    let mut spec = bus.clone();
    spec.n_sites = n_total;
    let mut qubit_sites = Vec::with_capacity(attachments.len());
    let mut ratios = Vec::with_capacity(attachments.len());
    let mut warnings = Vec::new();
    for (k, &(site, j)) in attachments.iter().enumerate() {
        if site >= bus.n_sites {
            return Err(Error::param(format!(
                "attachment {k} targets bus site {site}, but the bus has {} sites",
                bus.n_sites
            )));
        }
        if !j.is_finite() {
            return Err(Error::param(format!("attachment {k} has non-finite coupling")));
        }
        let qubit = bus.n_sites + k;
        spec.bonds.push((site, qubit, j));
        spec.fields.push(qubit_field);
        qubit_sites.push(qubit);
        let ratio = bus.n_sites as f64 * j.abs() / (std::f64::consts::PI.powi(2) * j_scale);
        if ratio >= PERTURBATION_WARN_THRESHOLD {
            warnings.push(format!(
                "attachment {k} (bus site {site}, coupling {j}): perturbation ratio {ratio:.3} \
                 is not small; effective-coupling formulas lose accuracy"
            ));
        }
        ratios.push(ratio);
    }
    spec.validate()?;
    Ok(AttachedSystem { spec, qubit_sites, perturbation_ratios: ratios, warnings })
}

/// Matrix-free Hamiltonian restricted to one magnetization sector.
///
/// The diagonal (bond alignment terms plus Zeeman terms) is precomputed per
/// basis state; off-diagonal action enumerates anti-aligned bonds and ranks
/// the pair-swapped pattern on the fly, costing O(n_bonds * N) per state.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    basis: SectorBasis,
    bonds: Vec<(usize, usize, f64)>,
    diag_bonds: Vec<f64>,
    diag_fields: Vec<f64>,
}

impl SectorHamiltonian {
    pub fn new(spec: &SpinSystemSpec, n_up: usize) -> Result<Self> {
        spec.validate()?;
        let basis = SectorBasis::build(spec.n_sites, n_up)?;
        let dim = basis.dim();
        let mut diag_bonds = vec![0.0; dim];
        let mut diag_fields = vec![0.0; dim];
        for idx in 0..dim {
            let s = basis.state(idx);
            let mut db = 0.0;
            for &(i, j, jv) in &spec.bonds {
                // s_iz s_jz on a product state: +1/4 aligned, -1/4 otherwise.
                if (s >> i ^ s >> j) & 1 == 0 {
                    db += 0.25 * jv;
                } else {
                    db -= 0.25 * jv;
                }
            }
            diag_bonds[idx] = db;
            let mut dz = 0.0;
            for (site, &b) in spec.fields.iter().enumerate() {
                dz -= b * spin_z(s, site);
            }
            diag_fields[idx] = dz;
        }
        Ok(SectorHamiltonian { basis, bonds: spec.bonds.clone(), diag_bonds, diag_fields })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    /// out = H v. Panics only on length mismatch (programmer error).
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        for idx in 0..v.len() {
            out[idx] = (self.diag_bonds[idx] + self.diag_fields[idx]) * v[idx];
        }
        self.apply_offdiag(v, out);
    }

    /// out = H_J v with only the exchange part (bond diagonal + flip-flop).
    pub fn apply_exchange(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        for idx in 0..v.len() {
            out[idx] = self.diag_bonds[idx] * v[idx];
        }
        self.apply_offdiag(v, out);
    }

    fn apply_offdiag(&self, v: &[f64], out: &mut [f64]) {
        for idx in 0..v.len() {
            let x = v[idx];
            if x == 0.0 {
                continue;
            }
            let s = self.basis.state(idx);
            for &(i, j, jv) in &self.bonds {
                if (s >> i ^ s >> j) & 1 == 1 {
                    let t = self.basis.rank(s ^ (1 << i) ^ (1 << j));
                    out[t] += 0.5 * jv * x;
                }
            }
        }
    }

    /// <v|H_J|v>: exchange (bond) part of the energy of a normalized vector.
    pub fn exchange_expectation(&self, v: &[f64]) -> f64 {
        let mut hv = vec![0.0; self.dim()];
        self.apply_exchange(v, &mut hv);
        v.iter().zip(&hv).map(|(a, b)| a * b).sum()
    }

    /// <v|H_Z|v>: Zeeman (field) part, diagonal so no matvec needed.
    pub fn zeeman_expectation(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.diag_fields).map(|(a, d)| a * a * d).sum()
    }
}

/// Dense sector Hamiltonian as a symmetric matrix. Errors with a resource
/// message when the sector dimension exceeds [`DENSE_DIM_CAP`].
pub fn build_sector_matrix(spec: &SpinSystemSpec, n_up: usize) -> Result<DMatrix<f64>> {
    let op = SectorHamiltonian::new(spec, n_up)?;
    let dim = op.dim();
    if dim > DENSE_DIM_CAP {
        return Err(Error::Resource(format!(
            "sector ({}, {n_up}) has dimension {dim}, above the dense cap {DENSE_DIM_CAP}; \
             use the matrix-free path",
            spec.n_sites
        )));
    }
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for idx in 0..dim {
        m[(idx, idx)] = op.diag_bonds[idx] + op.diag_fields[idx];
        let s = op.basis.state(idx);
        for &(i, j, jv) in &op.bonds {
            if (s >> i ^ s >> j) & 1 == 1 {
                let t = op.basis.rank(s ^ (1 << i) ^ (1 << j));
                m[(t, idx)] += 0.5 * jv;
            }
        }
    }
    Ok(m)
}

/// One-shot matrix-free application: H restricted to the `n_up` sector,
/// applied to `v`. Builds the operator each call; hot paths should hold a
/// [`SectorHamiltonian`] instead.
pub fn apply_hamiltonian(spec: &SpinSystemSpec, n_up: usize, v: &[f64]) -> Result<Vec<f64>> {
    let op = SectorHamiltonian::new(spec, n_up)?;
    if v.len() != op.dim() {
        return Err(Error::state(format!(
            "vector length {} does not match sector dimension {}",
            v.len(),
            op.dim()
        )));
    }
    let mut out = vec![0.0; op.dim()];
    op.apply(v, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_half_sector_matrix() {
        let spec = make_uniform_chain(2, 1.0, 0.0).unwrap();
        let m = build_sector_matrix(&spec, 1).unwrap();
        let expect = [[-0.25, 0.5], [0.5, -0.25]];
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(m[(r, c)], expect[r][c]);
            }
        }
    }

    #[test]
    fn three_site_two_up_sector_matrix() {
        let spec = make_uniform_chain(3, 1.0, 0.0).unwrap();
        let m = build_sector_matrix(&spec, 2).unwrap();
        let expect = [[0.0, 0.5, 0.0], [0.5, -0.5, 0.5], [0.0, 0.5, 0.0]];
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(m[(r, c)], expect[r][c], "entry ({r}, {c})");
            }
        }
    }

    #[test]
    fn zeeman_signs() {
        // H_Z = -sum_i b_i s_iz; state |up down> has s_0z = +1/2, s_1z = -1/2.
        let spec = make_chain(2, &[0.0], &[0.3, 0.7]).unwrap();
        let m = build_sector_matrix(&spec, 1).unwrap();
        // Sector states in numeric order: 0b01 (site 0 up), 0b10 (site 1 up).
        assert_abs_diff_eq!(m[(0, 0)], -(0.3 * 0.5 - 0.7 * 0.5), epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)], -(-0.3 * 0.5 + 0.7 * 0.5), epsilon = 1e-15);
    }

    #[test]
    fn sector_matrices_are_symmetric_and_traceless_overall() {
        let spec = make_ring(5, &[1.0, 0.9, 1.1, 0.95, 1.05], &[0.1, -0.2, 0.0, 0.3, 0.05])
            .unwrap();
        let mut trace = 0.0;
        for n_up in 0..=5 {
            let m = build_sector_matrix(&spec, n_up).unwrap();
            assert_abs_diff_eq!((m.clone() - m.transpose()).norm(), 0.0, epsilon = 0.0);
            trace += m.trace();
        }
        // Both the bond and Zeeman diagonals are odd under global spin flip,
        // so the full-space trace vanishes identically.
        assert_abs_diff_eq!(trace, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn matrix_free_apply_matches_dense() {
        let spec = make_chain(
            6,
            &[1.0, 0.85, 1.2, 0.9, 1.05],
            &[0.05, -0.1, 0.2, 0.0, -0.05, 0.15],
        )
        .unwrap();
        for n_up in [1usize, 3] {
            let m = build_sector_matrix(&spec, n_up).unwrap();
            let dim = m.nrows();
            // A deterministic, structureless probe vector.
            let v: Vec<f64> = (0..dim).map(|k| ((k * 37 + 11) % 101) as f64 / 101.0 - 0.5).collect();
            let hv = apply_hamiltonian(&spec, n_up, &v).unwrap();
            let dense = &m * nalgebra::DVector::from_column_slice(&v);
            for k in 0..dim {
                assert_abs_diff_eq!(hv[k], dense[k], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn exchange_and_zeeman_parts_add_up() {
        let spec = make_chain(5, &[1.0, 0.8, 1.1, 0.95], &[0.2, -0.1, 0.3, 0.0, 0.1]).unwrap();
        let op = SectorHamiltonian::new(&spec, 2).unwrap();
        let dim = op.dim();
        let mut v: Vec<f64> = (0..dim).map(|k| (k as f64 * 0.7).sin()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let mut hv = vec![0.0; dim];
        op.apply(&v, &mut hv);
        let total: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
        let parts = op.exchange_expectation(&v) + op.zeeman_expectation(&v);
        assert_abs_diff_eq!(total, parts, epsilon = 1e-13);
    }

    #[test]
    fn spec_json_round_trip_is_bit_exact() {
        let spec = SpinSystemSpec {
            n_sites: 3,
            bonds: vec![(0, 1, 0.1 + 0.2), (1, 2, 1.0 / 3.0)],
            fields: vec![0.1f64.next_up(), -0.0, 2.5e-300],
            label: Some("probe".into()),
        };
        let json = spec.to_json_string().unwrap();
        let back = SpinSystemSpec::from_json_str(&json).unwrap();
        assert_eq!(back.n_sites, spec.n_sites);
        for (a, b) in back.bonds.iter().zip(&spec.bonds) {
            assert_eq!(a.2.to_bits(), b.2.to_bits(), "coupling must round-trip bit exactly");
        }
        for (a, b) in back.fields.iter().zip(&spec.fields) {
            assert_eq!(a.to_bits(), b.to_bits(), "field must round-trip bit exactly");
        }
        assert_eq!(back.label, spec.label);
    }

    #[test]
    fn spec_json_rejects_unknown_keys_and_bad_shapes() {
        let bad = r#"{"n_sites": 2, "bonds": [[0, 1, 1.0]], "fields": [0.0, 0.0], "extra": 1}"#;
        assert!(SpinSystemSpec::from_json_str(bad).is_err());
        let short = r#"{"n_sites": 3, "bonds": [], "fields": [0.0]}"#;
        assert!(matches!(SpinSystemSpec::from_json_str(short), Err(Error::Config(_))));
        let dup = r#"{"n_sites": 2, "bonds": [[0, 1, 1.0], [1, 0, 0.5]], "fields": [0.0, 0.0]}"#;
        assert!(matches!(SpinSystemSpec::from_json_str(dup), Err(Error::Config(_))));
    }

    #[test]
    fn builders_check_lengths() {
        assert!(make_chain(4, &[1.0, 1.0], &[0.0; 4]).is_err());
        assert!(make_chain(4, &[1.0; 3], &[0.0; 3]).is_err());
        assert!(make_ring(2, &[1.0, 1.0], &[0.0, 0.0]).is_err());
        assert!(make_ring(4, &[1.0; 3], &[0.0; 4]).is_err());
        assert!(make_chain(1, &[], &[0.0]).is_ok(), "a single free spin is legal");
    }

    #[test]
    fn attach_scores_the_perturbation() {
        let bus = make_uniform_chain(7, 1.0, 0.0).unwrap();
        let weak = attach_qubits(&bus, &[(0, 0.0072), (6, 0.0072)], 0.0).unwrap();
        assert_eq!(weak.spec.n_sites, 9);
        assert_eq!(weak.qubit_sites, vec![7, 8]);
        assert_eq!(weak.spec.bonds.len(), 6 + 2);
        assert_eq!(weak.spec.fields[7], 0.0);
        assert!(weak.warnings.is_empty());
        assert_abs_diff_eq!(
            weak.perturbation_ratios[0],
            7.0 * 0.0072 / std::f64::consts::PI.powi(2),
            epsilon = 1e-15
        );
        assert!(weak.perturbation_ratios[0] < 0.006);

        let strong = attach_qubits(&bus, &[(0, 1.35)], 0.0).unwrap();
        assert_eq!(strong.warnings.len(), 1, "ratio near 1 must warn");
        assert!(strong.perturbation_ratios[0] > PERTURBATION_WARN_THRESHOLD);
    }

    #[test]
    fn attach_rejects_bad_sites_and_caps() {
        let bus = make_uniform_chain(7, 1.0, 0.0).unwrap();
        assert!(matches!(attach_qubits(&bus, &[(7, 0.01)], 0.0), Err(Error::Parameter(_))));
        assert!(matches!(attach_qubits(&bus, &[], 0.0), Err(Error::Parameter(_))));
        let big = make_uniform_chain(23, 1.0, 0.0).unwrap();
        assert!(matches!(
            attach_qubits(&big, &[(0, 0.01), (22, 0.01)], 0.0),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn dense_cap_is_enforced() {
        // 22 choose 11 = 705432 is far above the cap; the builder must refuse
        // rather than allocate.
        let spec = make_uniform_chain(22, 1.0, 0.0).unwrap();
        assert!(matches!(build_sector_matrix(&spec, 11), Err(Error::Resource(_))));
    }
}
