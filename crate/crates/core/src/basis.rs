//! Computational basis for chains of spin-1/2 sites.
//!
//! A basis state is a bitstring: bit `i` is site `i`, a set bit is spin up
//! (the +1/2 eigenstate of `s_z` on that site). The total magnetization
//! `S_z = sum_i s_iz` is conserved by every Hamiltonian in this crate, so the
//! full 2^N space is partitioned into sectors of fixed up-spin count `n_up`
//! with `S_z = n_up - N/2` and dimension `C(N, n_up)`.
//!
//! Two operator normalizations coexist and are easy to mix up:
//! Hamiltonians are written with spin operators `s` (eigenvalues +-1/2),
//! while observables are reported in Pauli operators `sigma = 2 s`
//! (eigenvalues +-1). The factor of two crosses that boundary in exactly one
//! place, [`spin_z`]; everything else stays on its own side.

use crate::error::{Error, Result};

/// Hard cap on the number of sites. Keeps every sector dimension, and the
/// `u32` state patterns, comfortably inside machine-word arithmetic.
pub const MAX_SITES: usize = 24;

/// Binomial coefficient C(n, k) for n <= MAX_SITES, exact in u64 arithmetic.
///
/// Returns 0 for k > n, matching the combinatorial convention used by the
/// ranking formula below.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u64 = 1;
    for i in 0..k {
        // Multiply before dividing; the running product is always an exact
        // binomial times a small factor, so u64 never overflows for n <= 24.
        num = num * (n - i) as u64 / (i + 1) as u64;
    }
    num as usize
}

/// Pauli axis selector for single-site operator applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// One term of an operator application in a sector basis: `amplitude` times
/// the basis state at `target`, multiplied by the imaginary unit when
/// `imaginary` is set. Amplitudes of the operators in this crate are real or
/// purely imaginary, never mixed, so a flag is enough to carry the phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorTerm {
    pub target: usize,
    pub amplitude: f64,
    pub imaginary: bool,
}

impl OperatorTerm {
    fn real(target: usize, amplitude: f64) -> Self {
        OperatorTerm { target, amplitude, imaginary: false }
    }
}

/// The spin-z eigenvalue (+-1/2) of `site` in the bitstring `state`.
///
/// This is the single point where the +-1 bit convention is converted to the
/// +-1/2 spin convention; Pauli `sigma_z` values are `2 * spin_z`.
#[inline]
pub fn spin_z(state: u32, site: usize) -> f64 {
    if state >> site & 1 == 1 {
        0.5
    } else {
        -0.5
    }
}

/// An enumerated fixed-`n_up` sector of the 2^N space.
///
/// States are stored in increasing numeric (lexicographic) order, and the
/// position of a pattern is recoverable in O(N) without search through a
/// combinatorial ranking, so the struct never holds a hash map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n_sites: usize,
    n_up: usize,
    states: Vec<u32>,
}

impl SectorBasis {
    /// Enumerate the sector with `n_up` up spins out of `n_sites`.
    pub fn build(n_sites: usize, n_up: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::param(format!(
                "n_sites must be in 1..={MAX_SITES}, got {n_sites}"
            )));
        }
        if n_up > n_sites {
            return Err(Error::param(format!(
                "n_up ({n_up}) exceeds n_sites ({n_sites})"
            )));
        }
        let dim = binomial(n_sites, n_up);
        let mut states = Vec::with_capacity(dim);
        if n_up == 0 {
            states.push(0);
        } else {
            // Gosper's hack walks all n_sites-bit patterns with fixed
            // popcount in increasing numeric order.
            let mut v: u32 = (1u32 << n_up) - 1;
            let limit: u32 = ((1u64 << n_sites) - 1) as u32;
            loop {
                states.push(v);
                if states.len() == dim {
                    break;
                }
                let t = v | (v - 1);
                v = (t + 1) | (((!t & t.wrapping_add(1)) - 1) >> (v.trailing_zeros() + 1));
                debug_assert!(v <= limit);
            }
        }
        debug_assert_eq!(states.len(), dim);
        Ok(SectorBasis { n_sites, n_up, states })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    /// Sector dimension C(n_sites, n_up).
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Twice the total magnetization, `2 S_z = 2 n_up - N`. Exact integer,
    /// so callers can compare sectors without float tolerance.
    pub fn sz2(&self) -> i64 {
        2 * self.n_up as i64 - self.n_sites as i64
    }

    /// Total magnetization S_z of every state in this sector.
    pub fn sz(&self) -> f64 {
        self.sz2() as f64 / 2.0
    }

    /// The bit pattern of basis state `index`.
    #[inline]
    pub fn state(&self, index: usize) -> u32 {
        self.states[index]
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    /// Position of `pattern` in this sector, via the combinadic rank
    /// `sum_k C(p_k, k)` over the ascending set-bit positions `p_1 < p_2 ...`.
    /// O(N), no lookup table. The pattern must belong to the sector.
    #[inline]
    pub fn rank(&self, pattern: u32) -> usize {
        debug_assert_eq!(pattern.count_ones() as usize, self.n_up);
        debug_assert!(pattern < (1u64 << self.n_sites) as u32);
        let mut r = 0usize;
        let mut rest = pattern;
        let mut k = 1usize;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            r += binomial(p, k);
            rest &= rest - 1;
            k += 1;
        }
        r
    }

    /// Checked variant of [`rank`](Self::rank) for callers handling
    /// externally supplied patterns.
    pub fn index_of(&self, pattern: u32) -> Result<usize> {
        if pattern.count_ones() as usize != self.n_up
            || u64::from(pattern) >= 1u64 << self.n_sites
        {
            return Err(Error::state(format!(
                "pattern {pattern:#b} is not a member of the ({}, {}) sector",
                self.n_sites, self.n_up
            )));
        }
        Ok(self.rank(pattern))
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites {
            return Err(Error::param(format!(
                "site {site} out of range for {} sites",
                self.n_sites
            )));
        }
        Ok(())
    }

    /// Apply the exchange bond operator `s_i . s_j` to basis state `index`.
    ///
    /// Returns the expansion in this same sector: a diagonal term of +1/4
    /// (aligned pair) or -1/4 (anti-aligned pair), plus an off-diagonal +1/2
    /// term to the pair-swapped state when the pair is anti-aligned. The bond
    /// operator conserves `n_up`, so no target sector is needed.
    pub fn apply_exchange_bond(&self, i: usize, j: usize, index: usize) -> Result<Vec<OperatorTerm>> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::param(format!("bond endpoints must differ, got ({i}, {j})")));
        }
        if index >= self.dim() {
            return Err(Error::param(format!(
                "state index {index} out of range for sector of dimension {}",
                self.dim()
            )));
        }
        let s = self.states[index];
        let bi = s >> i & 1;
        let bj = s >> j & 1;
        if bi == bj {
            Ok(vec![OperatorTerm::real(index, 0.25)])
        } else {
            let flipped = s ^ (1 << i) ^ (1 << j);
            Ok(vec![
                OperatorTerm::real(index, -0.25),
                OperatorTerm::real(self.rank(flipped), 0.5),
            ])
        }
    }

    /// Apply a single-site Pauli operator to basis state `index` of `self`,
    /// expanding the result in the `target` sector.
    ///
    /// `sigma_z` is diagonal (`target` must be the same sector and the term
    /// is +-1 on the state itself). `sigma_x` and `sigma_y` flip the site
    /// spin, so `target` must be the sector with `n_up` one higher (site was
    /// down) or one lower (site was up); a mismatch is a state error.
    /// `sigma_y` terms carry `imaginary = true` with amplitude +1 when
    /// raising a down spin and -1 when lowering an up spin.
    pub fn apply_sigma(
        &self,
        target: &SectorBasis,
        site: usize,
        axis: Axis,
        index: usize,
    ) -> Result<Vec<OperatorTerm>> {
        self.check_site(site)?;
        if index >= self.dim() {
            return Err(Error::param(format!(
                "state index {index} out of range for sector of dimension {}",
                self.dim()
            )));
        }
        if target.n_sites != self.n_sites {
            return Err(Error::state(format!(
                "target sector is over {} sites, source over {}",
                target.n_sites, self.n_sites
            )));
        }
        let s = self.states[index];
        let up = s >> site & 1 == 1;
        match axis {
            Axis::Z => {
                if target.n_up != self.n_up {
                    return Err(Error::state(format!(
                        "sigma_z conserves n_up but target has n_up {} vs source {}",
                        target.n_up, self.n_up
                    )));
                }
                let value = if up { 1.0 } else { -1.0 };
                Ok(vec![OperatorTerm::real(index, value)])
            }
            Axis::X | Axis::Y => {
                let expect = if up { self.n_up - 1 } else { self.n_up + 1 };
                if target.n_up != expect {
                    return Err(Error::state(format!(
                        "flipping site {site} of a state with n_up {} lands in n_up {expect}, \
                         but the target sector has n_up {}",
                        self.n_up, target.n_up
                    )));
                }
                let flipped = s ^ (1 << site);
                let idx = target.rank(flipped);
                match axis {
                    Axis::X => Ok(vec![OperatorTerm::real(idx, 1.0)]),
                    // sigma_y |up> = -i |down>, sigma_y |down> = +i |up>.
                    Axis::Y => Ok(vec![OperatorTerm {
                        target: idx,
                        amplitude: if up { -1.0 } else { 1.0 },
                        imaginary: true,
                    }]),
                    Axis::Z => unreachable!(),
                }
            }
        }
    }
}

/// All sectors of an N-site system, smallest `n_up` first. Convenience for
/// whole-spectrum drivers.
pub fn all_sectors(n_sites: usize) -> Result<Vec<SectorBasis>> {
    (0..=n_sites).map(|n_up| SectorBasis::build(n_sites, n_up)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_site_half_filled_sector_is_enumerated_in_order() {
        let b = SectorBasis::build(4, 2).unwrap();
        assert_eq!(b.dim(), 6);
        assert_eq!(b.states(), &[0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        for (k, &s) in b.states().iter().enumerate() {
            assert_eq!(b.rank(s), k, "rank must invert enumeration for {s:#06b}");
            assert_eq!(b.index_of(s).unwrap(), k);
        }
        assert_eq!(b.sz2(), 0);
    }

    #[test]
    fn edge_sectors() {
        let full = SectorBasis::build(3, 3).unwrap();
        assert_eq!(full.states(), &[0b111]);
        assert_eq!(full.sz(), 1.5);
        let empty = SectorBasis::build(3, 0).unwrap();
        assert_eq!(empty.states(), &[0b000]);
        assert_eq!(empty.sz(), -1.5);
        let one = SectorBasis::build(1, 1).unwrap();
        assert_eq!(one.dim(), 1);
    }

    #[test]
    fn fourteen_site_half_filled_dimension() {
        let b = SectorBasis::build(14, 7).unwrap();
        assert_eq!(b.dim(), 3432);
        // Spot-check ranking far from the ends.
        let mid = b.state(1717);
        assert_eq!(b.rank(mid), 1717);
    }

    #[test]
    fn sector_dimensions_sum_to_full_space() {
        for n in 1..=12 {
            let total: usize = (0..=n).map(|k| SectorBasis::build(n, k).unwrap().dim()).sum();
            assert_eq!(total, 1 << n, "sectors of {n} sites must tile the full space");
        }
    }

    #[test]
    fn max_sites_cap_is_enforced() {
        assert!(SectorBasis::build(MAX_SITES, 1).is_ok());
        assert!(matches!(SectorBasis::build(MAX_SITES + 1, 1), Err(Error::Parameter(_))));
        assert!(matches!(SectorBasis::build(0, 0), Err(Error::Parameter(_))));
        assert!(matches!(SectorBasis::build(4, 5), Err(Error::Parameter(_))));
    }

    #[test]
    fn binomial_matches_pascal() {
        for n in 0..=MAX_SITES {
            for k in 0..=n {
                let pascal = if k == 0 || k == n {
                    1
                } else {
                    binomial(n - 1, k - 1) + binomial(n - 1, k)
                };
                assert_eq!(binomial(n, k), pascal);
            }
        }
        assert_eq!(binomial(24, 12), 2_704_156);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn bond_on_aligned_pair_is_diagonal_quarter() {
        // |up up> is the single state of the (2, 2) sector.
        let b = SectorBasis::build(2, 2).unwrap();
        let terms = b.apply_exchange_bond(0, 1, 0).unwrap();
        assert_eq!(terms, vec![OperatorTerm::real(0, 0.25)]);
    }

    #[test]
    fn bond_on_antialigned_pair_swaps_with_half_amplitude() {
        // |up down> = pattern 0b01 in the (2, 1) sector [0b01, 0b10].
        let b = SectorBasis::build(2, 1).unwrap();
        let idx = b.index_of(0b01).unwrap();
        let terms = b.apply_exchange_bond(0, 1, idx).unwrap();
        assert_eq!(
            terms,
            vec![
                OperatorTerm::real(idx, -0.25),
                OperatorTerm::real(b.index_of(0b10).unwrap(), 0.5),
            ]
        );
    }

    #[test]
    fn bond_example_on_three_sites() {
        // |up down up> = 0b101; bond (1, 2) gives -1/4 itself + 1/2 |up up down>.
        let b = SectorBasis::build(3, 2).unwrap();
        let idx = b.index_of(0b101).unwrap();
        let terms = b.apply_exchange_bond(1, 2, idx).unwrap();
        assert_eq!(
            terms,
            vec![
                OperatorTerm::real(idx, -0.25),
                OperatorTerm::real(b.index_of(0b011).unwrap(), 0.5),
            ]
        );
    }

    #[test]
    fn bond_stays_inside_sector_for_every_state() {
        let b = SectorBasis::build(6, 3).unwrap();
        for idx in 0..b.dim() {
            for (i, j) in [(0usize, 1usize), (2, 5), (4, 3)] {
                for t in b.apply_exchange_bond(i, j, idx).unwrap() {
                    assert!(t.target < b.dim());
                    assert!(!t.imaginary);
                    assert!(
                        t.amplitude == 0.25 || t.amplitude == -0.25 || t.amplitude == 0.5,
                        "unexpected amplitude {}",
                        t.amplitude
                    );
                }
            }
        }
    }

    #[test]
    fn bond_rejects_bad_arguments() {
        let b = SectorBasis::build(4, 2).unwrap();
        assert!(matches!(b.apply_exchange_bond(1, 1, 0), Err(Error::Parameter(_))));
        assert!(matches!(b.apply_exchange_bond(0, 4, 0), Err(Error::Parameter(_))));
        assert!(matches!(b.apply_exchange_bond(0, 1, 6), Err(Error::Parameter(_))));
    }

    #[test]
    fn sigma_z_is_diagonal_with_pauli_eigenvalues() {
        // sigma_z on site 1 of |up down up>.
        let b = SectorBasis::build(3, 2).unwrap();
        let idx = b.index_of(0b101).unwrap();
        let terms = b.apply_sigma(&b, 1, Axis::Z, idx).unwrap();
        assert_eq!(terms, vec![OperatorTerm::real(idx, -1.0)]);
        let terms = b.apply_sigma(&b, 0, Axis::Z, idx).unwrap();
        assert_eq!(terms, vec![OperatorTerm::real(idx, 1.0)]);
    }

    #[test]
    fn sigma_x_moves_between_adjacent_sectors() {
        // sigma_x on site 0 of |up down> lands on |down down>.
        let from = SectorBasis::build(2, 1).unwrap();
        let to = SectorBasis::build(2, 0).unwrap();
        let idx = from.index_of(0b01).unwrap();
        let terms = from.apply_sigma(&to, 0, Axis::X, idx).unwrap();
        assert_eq!(terms, vec![OperatorTerm::real(0, 1.0)]);
        // Wrong target sector is a state error, not a panic.
        assert!(matches!(
            from.apply_sigma(&from, 0, Axis::X, idx),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn sigma_y_phases_follow_the_flip_direction() {
        let from = SectorBasis::build(2, 1).unwrap();
        let down = SectorBasis::build(2, 0).unwrap();
        let up = SectorBasis::build(2, 2).unwrap();
        let idx = from.index_of(0b01).unwrap();
        // Lowering the up spin at site 0: amplitude -i.
        let t = from.apply_sigma(&down, 0, Axis::Y, idx).unwrap();
        assert_eq!(t, vec![OperatorTerm { target: 0, amplitude: -1.0, imaginary: true }]);
        // Raising the down spin at site 1: amplitude +i.
        let t = from.apply_sigma(&up, 1, Axis::Y, idx).unwrap();
        assert_eq!(t, vec![OperatorTerm { target: 0, amplitude: 1.0, imaginary: true }]);
    }

    #[test]
    fn sigma_x_is_an_involution() {
        let a = SectorBasis::build(5, 2).unwrap();
        let bup = SectorBasis::build(5, 3).unwrap();
        for idx in 0..a.dim() {
            for site in 0..5 {
                let s = a.state(idx);
                let target = if s >> site & 1 == 1 { continue } else { &bup };
                let t1 = a.apply_sigma(target, site, Axis::X, idx).unwrap();
                let t2 = target.apply_sigma(&a, site, Axis::X, t1[0].target).unwrap();
                assert_eq!(t2[0].target, idx, "sigma_x twice must return to the start");
                assert_eq!(t1[0].amplitude * t2[0].amplitude, 1.0);
            }
        }
    }

    #[test]
    fn spin_z_halves_the_bit() {
        assert_eq!(spin_z(0b10, 1), 0.5);
        assert_eq!(spin_z(0b10, 0), -0.5);
    }
}
