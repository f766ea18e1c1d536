//! Sector-wise eigensolvers with certified residuals.
//!
//! Every Hamiltonian here commutes with total S_z, so diagonalization runs
//! independently per magnetization sector and the results are merged. Small
//! sectors go through a dense symmetric eigendecomposition; large ones
//! through a Lanczos iteration with full reorthogonalization and
//! lock-and-restart deflation. Both paths end the same way: each retained
//! eigenpair is certified by an explicit matrix-free residual
//! `||H v - E v|| <= residual_tol`, so downstream code never needs to trust
//! solver internals.
//!
//! Determinism: Lanczos start vectors come from a counter-based generator
//! seeded by (solver seed, sector, restart round) only. Results are
//! bit-identical for any thread count.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fmt::sig15;
use crate::model::{build_sector_matrix, SectorHamiltonian, SpinSystemSpec, DENSE_DIM_CAP};

/// Tunable knobs for both solver paths. The defaults are what every study in
/// this crate runs with; tests tighten or loosen them deliberately.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Largest sector solved densely by [`full_spectrum`].
    pub dense_cap: usize,
    /// Sectors at or below this dimension are solved densely even inside
    /// [`lowest_k`]; Lanczos has no advantage there.
    pub small_dense_dim: usize,
    /// Certified bound on `||H v - E v||` for every retained eigenpair.
    pub residual_tol: f64,
    /// Two levels closer than this count as one degenerate manifold.
    pub degeneracy_tol: f64,
    /// Maximum Krylov basis size per Lanczos round.
    pub krylov_dim: usize,
    /// Maximum restart rounds per sector before giving up.
    pub max_restarts: usize,
    /// Seed for Lanczos start vectors. Affects iteration counts, never
    /// certified results.
    pub seed: u64,
    /// Keep eigenvectors on the returned levels. Turning this off saves
    /// memory; residuals are still certified before vectors are dropped.
    pub keep_vectors: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            dense_cap: DENSE_DIM_CAP,
            small_dense_dim: 512,
            residual_tol: 1e-10,
            degeneracy_tol: 1e-9,
            krylov_dim: 300,
            max_restarts: 40,
            seed: 0x5eed,
            keep_vectors: true,
        }
    }
}

/// How much of the spectrum a [`Spectrum`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    /// Every eigenvalue of every sector.
    Full,
    /// The k lowest levels of the searched sectors.
    LowestK(usize),
}

/// One eigenpair, tagged with its sector.
#[derive(Debug, Clone)]
pub struct Level {
    pub energy: f64,
    /// Up-spin count of the sector this level lives in.
    pub n_up: usize,
    /// Twice the total magnetization (exact integer).
    pub sz2: i64,
    /// Eigenvector in the sector basis ordering, unit norm, sign-fixed so
    /// the largest-magnitude component is positive. `None` if the caller
    /// asked vectors to be dropped.
    pub vector: Option<Arc<Vec<f64>>>,
}

impl Level {
    pub fn sz(&self) -> f64 {
        self.sz2 as f64 / 2.0
    }
}

/// Sorted eigenlevels of one system, with certification metadata.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub n_sites: usize,
    /// Ascending energy; ties broken by descending S_z (so at zero field the
    /// +1/2 member of a Kramers pair is level 0), then ascending sector.
    pub levels: Vec<Level>,
    /// Dimension of every n_up sector, index = n_up. Sectors that were not
    /// searched still appear here; their dimension is a property of N alone.
    pub sector_dims: Vec<usize>,
    pub completeness: Completeness,
    /// Largest certified residual among retained eigenpairs.
    pub max_residual: f64,
    pub residual_tol: f64,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.levels[0].energy
    }

    /// E_b - E_a for level indices into the sorted list.
    pub fn gap(&self, a: usize, b: usize) -> Result<f64> {
        if a >= self.levels.len() || b >= self.levels.len() {
            return Err(Error::param(format!(
                "gap({a}, {b}) out of range for {} retained levels",
                self.levels.len()
            )));
        }
        Ok(self.levels[b].energy - self.levels[a].energy)
    }

    /// Indices of every level within `tol` of the ground energy. With
    /// `Completeness::LowestK` this is of course only the retained part of
    /// the manifold.
    pub fn degenerate_ground_manifold(&self, tol: f64) -> Vec<usize> {
        let e0 = self.ground_energy();
        self.levels
            .iter()
            .enumerate()
            .take_while(|(_, l)| l.energy - e0 <= tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// CSV table `level,energy,sz,sector_dim`, energies at 15 significant
    /// digits, one row per retained level in sorted order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,energy,sz,sector_dim\n");
        for (i, l) in self.levels.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.1},{}\n",
                i,
                sig15(l.energy),
                l.sz(),
                self.sector_dims[l.n_up]
            ));
        }
        out
    }

    /// Eigenvectors in a flat binary layout (all little-endian):
    /// `u64` level count, then per level `u64 level index`, `u64 n_up`,
    /// `u64 dim`, `dim * f64` components. Levels without vectors are skipped.
    pub fn vectors_to_binary(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let with_vecs: Vec<(usize, &Level)> = self
            .levels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.vector.is_some())
            .collect();
        out.extend_from_slice(&(with_vecs.len() as u64).to_le_bytes());
        for (idx, l) in with_vecs {
            let v = l.vector.as_ref().unwrap();
            out.extend_from_slice(&(idx as u64).to_le_bytes());
            out.extend_from_slice(&(l.n_up as u64).to_le_bytes());
            out.extend_from_slice(&(v.len() as u64).to_le_bytes());
            for &x in v.iter() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    fn sort_levels(&mut self, tol: f64) {
        self.levels.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then(b.sz2.cmp(&a.sz2))
                .then(a.n_up.cmp(&b.n_up))
        });
        // Degenerate partners from different sectors agree only to rounding,
        // so the exact tie-breaks above almost never fire across sectors.
        // Re-order each near-degenerate group so membership order is set by
        // S_z (descending, then n_up) instead of sub-picoscale noise.
        let mut start = 0;
        while start < self.levels.len() {
            let head = self.levels[start].energy;
            let mut end = start + 1;
            while end < self.levels.len() && self.levels[end].energy - head <= tol {
                end += 1;
            }
            self.levels[start..end].sort_by(|a, b| {
                b.sz2
                    .cmp(&a.sz2)
                    .then(a.n_up.cmp(&b.n_up))
                    .then(a.energy.total_cmp(&b.energy))
            });
            start = end;
        }
    }
}

/// Flip each vector so its largest-magnitude component (first such index on
/// ties) is positive. Removes the solver's sign ambiguity.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut mag = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > mag {
            mag = x.abs();
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn certify(op: &SectorHamiltonian, energy: f64, v: &[f64], tol: f64) -> Result<f64> {
    let mut hv = vec![0.0; v.len()];
    op.apply(v, &mut hv);
    let mut r2 = 0.0;
    for (a, b) in hv.iter().zip(v) {
        let d = a - energy * b;
        r2 += d * d;
    }
    let r = r2.sqrt();
    if r > tol {
        return Err(Error::Convergence {
            msg: format!("eigenpair at energy {energy} failed certification (tol {tol:.1e})"),
            best_residual: r,
        });
    }
    Ok(r)
}

/// Dense solve of one sector: all `take` lowest pairs (or the whole sector),
/// certified. Returns (energy, vector) ascending.
fn dense_sector(
    spec: &SpinSystemSpec,
    n_up: usize,
    take: Option<usize>,
    opts: &SolverOptions,
) -> Result<(Vec<(f64, Vec<f64>)>, f64)> {
    let op = SectorHamiltonian::new(spec, n_up)?;
    let m = build_sector_matrix(spec, n_up)?;
    let dim = m.nrows();
    let se = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let keep = take.unwrap_or(dim).min(dim);
    let mut out = Vec::with_capacity(keep);
    let mut max_res = 0.0f64;
    for &col in order.iter().take(keep) {
        let mut v: Vec<f64> = se.eigenvectors.column(col).iter().copied().collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        fix_sign(&mut v);
        let e = se.eigenvalues[col];
        let r = certify(&op, e, &v, opts.residual_tol)?;
        max_res = max_res.max(r);
        out.push((e, v));
    }
    Ok((out, max_res))
}

/// Lanczos with full reorthogonalization and lock-and-restart deflation.
///
/// Each round builds one Krylov space orthogonal to all locked vectors and
/// locks the converged prefix of its Ritz pairs (lowest first). After a
/// productive round the next start vector is fresh randomness, which is what
/// exposes the remaining copies of a degenerate level: a single Krylov space
/// can only ever see one vector of an eigenspace. After a stalled round the
/// best unconverged Ritz vector is reused so progress is not thrown away.
fn lanczos_sector(
    op: &SectorHamiltonian,
    k: usize,
    opts: &SolverOptions,
) -> Result<(Vec<(f64, Vec<f64>)>, f64)> {
    let dim = op.dim();
    let want = k.min(dim);
    let n_up = op.basis().n_up() as u64;

    let mut locked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut carry: Option<Vec<f64>> = None; // best unconverged Ritz vector
    let mut best_residual = f64::INFINITY;
    let mut max_res = 0.0f64;

    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let norm = |a: &[f64]| -> f64 { dot(a, a).sqrt() };

    for round in 0..opts.max_restarts {
        if locked.len() >= want {
            break;
        }
        // Start vector: carried Ritz estimate after a stall, fresh noise
        // otherwise; always projected off the locked set.
        let mut v0 = match carry.take() {
            Some(v) => v,
            None => {
                let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
                rng.set_stream((n_up << 16) | round as u64);
                (0..dim).map(|_| rng.random::<f64>() - 0.5).collect::<Vec<f64>>()
            }
        };
        for _ in 0..2 {
            for (_, u) in &locked {
                let c = dot(&v0, u);
                v0.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n0 = norm(&v0);
        if n0 < 1e-12 {
            continue; // degenerate draw; next round uses a different stream
        }
        v0.iter_mut().for_each(|x| *x /= n0);

        let m_max = opts.krylov_dim.min(dim - locked.len());
        let mut basis: Vec<Vec<f64>> = vec![v0];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![0.0; dim];

        for j in 0..m_max {
            op.apply(&basis[j], &mut w);
            if j > 0 {
                let b = beta[j - 1];
                let prev = &basis[j - 1];
                w.iter_mut().zip(prev).for_each(|(x, y)| *x -= b * y);
            }
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            {
                let vj = &basis[j];
                w.iter_mut().zip(vj).for_each(|(x, y)| *x -= a * y);
            }
            // Full reorthogonalization, two passes, against locked + basis.
            for _ in 0..2 {
                for (_, u) in &locked {
                    let c = dot(&w, u);
                    w.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
                }
                for u in &basis {
                    let c = dot(&w, u);
                    w.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            let scale = 1.0 + alpha.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            if b < 1e-13 * scale {
                break; // Krylov space exhausted: T is exact on this subspace
            }
            beta.push(b);
            if j + 1 < m_max {
                let mut next = w.clone();
                next.iter_mut().for_each(|x| *x /= b);
                basis.push(next);
            }
            // Cheap interior convergence test via the Ritz residual bound
            // beta * |last tridiagonal eigenvector entry|.
            if (j + 1) % 10 == 0 && j + 1 >= want - locked.len() {
                let (vals, vecs) = tridiag_eigen(&alpha, &beta[..j]);
                let need = want - locked.len();
                let ok = (0..need.min(vals.len())).all(|r| {
                    (beta[j] * vecs[(j, r)]).abs() <= 0.3 * opts.residual_tol
                });
                if ok {
                    break;
                }
            }
        }

        // Ritz pairs of the final tridiagonal matrix, ascending.
        let steps = alpha.len();
        let (vals, vecs) = tridiag_eigen(&alpha, &beta[..steps.saturating_sub(1).min(beta.len())]);
        let mut advanced = false;
        let mut first_unconverged: Option<Vec<f64>> = None;
        for r in 0..vals.len() {
            if locked.len() >= want {
                break;
            }
            // Assemble the Ritz vector y = sum_i s_i v_i.
            let mut y = vec![0.0; dim];
            for (i, u) in basis.iter().enumerate().take(steps) {
                let s = vecs[(i, r)];
                if s != 0.0 {
                    y.iter_mut().zip(u).for_each(|(x, b)| *x += s * b);
                }
            }
            // Clean against locked, renormalize; a collapse means this Ritz
            // direction was (numerically) already locked.
            for (_, u) in &locked {
                let c = dot(&y, u);
                y.iter_mut().zip(u).for_each(|(x, b)| *x -= c * b);
            }
            let ny = norm(&y);
            if ny < 0.5 {
                continue;
            }
            y.iter_mut().for_each(|x| *x /= ny);
            let mut hy = vec![0.0; dim];
            op.apply(&y, &mut hy);
            let e = dot(&y, &hy);
            let mut r2 = 0.0;
            for (a, b) in hy.iter().zip(&y) {
                let d = a - e * b;
                r2 += d * d;
            }
            let res = r2.sqrt();
            best_residual = best_residual.min(res);
            if res <= opts.residual_tol {
                fix_sign(&mut y);
                max_res = max_res.max(res);
                locked.push((e, y));
                advanced = true;
            } else {
                // Prefix rule: do not lock a higher level past an
                // unconverged lower one, or the "k lowest" claim breaks.
                first_unconverged = Some(y);
                break;
            }
        }
        if !advanced {
            carry = first_unconverged;
        }
    }

    if locked.len() < want {
        return Err(Error::Convergence {
            msg: format!(
                "sector n_up={} (dim {dim}): locked {} of {want} requested levels \
                 after {} rounds",
                op.basis().n_up(),
                locked.len(),
                opts.max_restarts
            ),
            best_residual: if best_residual.is_finite() { best_residual } else { f64::NAN },
        });
    }
    locked.sort_by(|a, b| a.0.total_cmp(&b.0));
    locked.truncate(want);
    Ok((locked, max_res))
}

/// Eigendecomposition of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, values ascending. Matrix columns of the
/// returned eigenvector matrix follow the value order.
fn tridiag_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let n = alpha.len();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = alpha[i];
        if i + 1 < n && i < beta.len() {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let se = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<f64>::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

fn merge_into_spectrum(
    spec: &SpinSystemSpec,
    per_sector: Vec<(usize, Vec<(f64, Vec<f64>)>, f64)>,
    completeness: Completeness,
    opts: &SolverOptions,
) -> Spectrum {
    let n = spec.n_sites;
    let sector_dims: Vec<usize> =
        (0..=n).map(|k| crate::basis::binomial(n, k)).collect();
    let mut levels = Vec::new();
    let mut max_residual = 0.0f64;
    for (n_up, pairs, res) in per_sector {
        max_residual = max_residual.max(res);
        let sz2 = 2 * n_up as i64 - n as i64;
        for (e, v) in pairs {
            levels.push(Level {
                energy: e,
                n_up,
                sz2,
                vector: if opts.keep_vectors { Some(Arc::new(v)) } else { None },
            });
        }
    }
    let mut spectrum = Spectrum {
        n_sites: n,
        levels,
        sector_dims,
        completeness,
        max_residual,
        residual_tol: opts.residual_tol,
    };
    spectrum.sort_levels(opts.degeneracy_tol);
    spectrum
}

/// Every eigenpair of every sector, dense per sector, certified. Errors with
/// a resource message when any sector exceeds `opts.dense_cap`; that is what
/// [`lowest_k`] is for.
pub fn full_spectrum(spec: &SpinSystemSpec, opts: &SolverOptions) -> Result<Spectrum> {
    spec.validate()?;
    let n = spec.n_sites;
    let worst = crate::basis::binomial(n, n / 2);
    if worst > opts.dense_cap {
        return Err(Error::Resource(format!(
            "full spectrum of {n} sites needs a dense solve of dimension {worst}, \
             above the cap {}; use lowest_k",
            opts.dense_cap
        )));
    }
    let per_sector: Vec<(usize, Vec<(f64, Vec<f64>)>, f64)> = (0..=n)
        .into_par_iter()
        .map(|n_up| {
            let (pairs, res) = dense_sector(spec, n_up, None, opts)?;
            Ok((n_up, pairs, res))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_into_spectrum(spec, per_sector, Completeness::Full, opts))
}

/// The `k` lowest levels of the system (or of the sectors listed in
/// `sectors`, as up-spin counts). Small sectors are solved densely, large
/// ones by Lanczos; every retained pair is certified. If fewer than `k`
/// levels exist in the searched sectors, all of them are returned.
pub fn lowest_k(
    spec: &SpinSystemSpec,
    k: usize,
    sectors: Option<&[usize]>,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let n = spec.n_sites;
    let searched: Vec<usize> = match sectors {
        Some(list) => {
            if list.is_empty() {
                return Err(Error::param("sector list must not be empty"));
            }
            let mut v = list.to_vec();
            v.sort_unstable();
            v.dedup();
            for &s in &v {
                if s > n {
                    return Err(Error::param(format!(
                        "sector n_up={s} out of range for {n} sites"
                    )));
                }
            }
            v
        }
        None => (0..=n).collect(),
    };

    let per_sector: Vec<(usize, Vec<(f64, Vec<f64>)>, f64)> = searched
        .into_par_iter()
        .map(|n_up| {
            let dim = crate::basis::binomial(n, n_up);
            let take = k.min(dim);
            // Lanczos cannot ask for most of a space; near-complete requests
            // fall back to the dense path.
            let (pairs, res) = if dim <= opts.small_dense_dim || 3 * take >= dim {
                if dim > opts.dense_cap {
                    return Err(Error::Resource(format!(
                        "sector n_up={n_up} has dimension {dim} above the dense cap, \
                         but {take} levels were requested from it"
                    )));
                }
                dense_sector(spec, n_up, Some(take), opts)?
            } else {
                let op = SectorHamiltonian::new(spec, n_up)?;
                lanczos_sector(&op, take, opts)?
            };
            Ok((n_up, pairs, res))
        })
        .collect::<Result<Vec<_>>>()?;

    // A request spanning every sector and at least the full dimension retains
    // the entire spectrum; label it as such rather than as a truncation.
    let completeness = if sectors.is_none() && k >= (1usize << n) {
        Completeness::Full
    } else {
        Completeness::LowestK(k)
    };
    let mut spectrum = merge_into_spectrum(spec, per_sector, completeness, opts);
    spectrum.levels.truncate(k);
    Ok(spectrum)
}
