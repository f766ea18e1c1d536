//! Property-based invariants of the basis, the solver and the serialization
//! layer, checked over randomly generated systems.

use proptest::prelude::*;
use spinbus_core::{
    all_sectors, binomial, full_spectrum, gap_decomposition, local_moments, lowest_k, make_chain,
    make_ring, Axis, SectorBasis, SolverOptions, SpinSystemSpec,
};

/// Chains and rings with moderate couplings and fields, sized for dense
/// whole-spectrum solves.
fn arb_solvable_spec() -> impl Strategy<Value = SpinSystemSpec> {
    (2usize..=7, any::<bool>())
        .prop_flat_map(|(n, want_ring)| {
            let ring = want_ring && n >= 3;
            let n_bonds = if ring { n } else { n - 1 };
            (
                Just(n),
                Just(ring),
                prop::collection::vec(0.1f64..2.0, n_bonds),
                prop::collection::vec(-1.0f64..1.0, n),
            )
        })
        .prop_map(|(n, ring, j, b)| {
            if ring {
                make_ring(n, &j, &b).unwrap()
            } else {
                make_chain(n, &j, &b).unwrap()
            }
        })
}

/// Any finite double, including negative zero, subnormals and huge values.
fn arb_finite() -> impl Strategy<Value = f64> {
    any::<u64>().prop_map(f64::from_bits).prop_filter("finite", |x| x.is_finite())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Both transverse exchange parts and the field term are traceless, so
    /// the energies of the whole space must sum to zero.
    #[test]
    fn spectrum_is_traceless_and_certified(spec in arb_solvable_spec()) {
        let spectrum = full_spectrum(&spec, &SolverOptions::default()).unwrap();
        prop_assert_eq!(spectrum.levels.len(), 1usize << spec.n_sites);
        let trace: f64 = spectrum.levels.iter().map(|l| l.energy).sum();
        prop_assert!(trace.abs() < 1e-8, "trace {} should vanish", trace);
        prop_assert!(spectrum.max_residual <= spectrum.residual_tol);
    }

    /// The exchange/field split of an energy must add back to the energy.
    #[test]
    fn energies_decompose_into_exchange_and_field_parts(spec in arb_solvable_spec()) {
        let spectrum = lowest_k(&spec, 2, None, &SolverOptions::default()).unwrap();
        let d = gap_decomposition(&spec, &spectrum).unwrap();
        prop_assert!((d.ej0 + d.ez0 - spectrum.levels[0].energy).abs() < 1e-9);
        prop_assert!((d.ej1 + d.ez1 - spectrum.levels[1].energy).abs() < 1e-9);
    }

    /// Local moments are Pauli expectations, so they sum to twice the
    /// conserved S_z of the level's sector — exactly, not on average.
    #[test]
    fn moments_sum_to_twice_sz(spec in arb_solvable_spec()) {
        let spectrum = lowest_k(&spec, 1, None, &SolverOptions::default()).unwrap();
        let level = &spectrum.levels[0];
        let total: f64 = local_moments(level, spec.n_sites).unwrap().iter().sum();
        prop_assert!(
            (total - level.sz2 as f64).abs() < 1e-9,
            "moment sum {} vs 2 S_z = {}", total, level.sz2
        );
    }

    /// The truncated solve must reproduce the head of the full solve.
    #[test]
    fn lowest_k_is_a_prefix_of_the_full_spectrum(spec in arb_solvable_spec()) {
        let opts = SolverOptions::default();
        let full = full_spectrum(&spec, &opts).unwrap();
        let head = lowest_k(&spec, 5, None, &opts).unwrap();
        for (a, b) in head.levels.iter().take(5).zip(full.levels.iter()) {
            prop_assert!((a.energy - b.energy).abs() < 1e-10);
            prop_assert_eq!(a.n_up, b.n_up);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// JSON serialization must round-trip every finite double bit for bit.
    #[test]
    fn spec_json_round_trip_is_bit_exact(
        n in 1usize..=24,
        seed_j in prop::collection::vec(arb_finite(), 23),
        seed_b in prop::collection::vec(arb_finite(), 24),
        label in prop::option::of(".*"),
    ) {
        let mut spec = make_chain(n, &seed_j[..n - 1], &seed_b[..n]).unwrap();
        spec.label = label;
        let text = spec.to_json_string().unwrap();
        let back = SpinSystemSpec::from_json_str(&text).unwrap();
        prop_assert_eq!(back.n_sites, spec.n_sites);
        prop_assert_eq!(back.label, spec.label);
        for (a, b) in back.bonds.iter().zip(&spec.bonds) {
            prop_assert_eq!((a.0, a.1), (b.0, b.1));
            prop_assert_eq!(a.2.to_bits(), b.2.to_bits());
        }
        for (a, b) in back.fields.iter().zip(&spec.fields) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    /// Sector enumeration is sorted and its rank function inverts it.
    #[test]
    fn sector_enumeration_inverts(n in 1usize..=16, pick in any::<u64>()) {
        let n_up = (pick as usize) % (n + 1);
        let basis = SectorBasis::build(n, n_up).unwrap();
        prop_assert_eq!(basis.dim(), binomial(n, n_up));
        for idx in 0..basis.dim() {
            let s = basis.state(idx);
            prop_assert_eq!(s.count_ones() as usize, n_up);
            prop_assert_eq!(basis.index_of(s).unwrap(), idx);
            if idx > 0 {
                prop_assert!(basis.state(idx - 1) < s, "states must ascend");
            }
        }
    }

    /// The exchange bond never leaves its sector and expands with the fixed
    /// amplitude set: +1/4 alone, or -1/4 plus 1/2 on the swapped state.
    #[test]
    fn exchange_bond_stays_in_sector(
        n in 2usize..=10,
        raw_up in any::<u64>(),
        raw_idx in any::<u64>(),
        raw_i in any::<u64>(),
        raw_j in any::<u64>(),
    ) {
        let n_up = (raw_up as usize) % (n + 1);
        let basis = SectorBasis::build(n, n_up).unwrap();
        let idx = (raw_idx as usize) % basis.dim();
        let i = (raw_i as usize) % n;
        let j = (raw_j as usize) % n;
        prop_assume!(i != j);
        let terms = basis.apply_exchange_bond(i, j, idx).unwrap();
        match terms.as_slice() {
            [t] => {
                prop_assert_eq!(t.target, idx);
                prop_assert_eq!(t.amplitude, 0.25);
            }
            [d, o] => {
                prop_assert_eq!(d.target, idx);
                prop_assert_eq!(d.amplitude, -0.25);
                prop_assert_eq!(o.amplitude, 0.5);
                let swapped = basis.state(o.target);
                prop_assert_eq!(swapped.count_ones() as usize, n_up);
                prop_assert_eq!(swapped, basis.state(idx) ^ (1 << i) ^ (1 << j));
            }
            other => prop_assert!(false, "unexpected expansion {:?}", other),
        }
    }

    /// sigma_x hops to the adjacent sector and back to the same state.
    #[test]
    fn sigma_x_round_trips(
        n in 1usize..=12,
        raw_up in any::<u64>(),
        raw_idx in any::<u64>(),
        raw_site in any::<u64>(),
    ) {
        let n_up = (raw_up as usize) % (n + 1);
        let basis = SectorBasis::build(n, n_up).unwrap();
        let idx = (raw_idx as usize) % basis.dim();
        let site = (raw_site as usize) % n;
        let up = basis.state(idx) >> site & 1 == 1;
        let target_up = if up { n_up - 1 } else { n_up + 1 };
        let target = SectorBasis::build(n, target_up).unwrap();
        let hop = basis.apply_sigma(&target, site, Axis::X, idx).unwrap();
        prop_assert_eq!(hop.len(), 1);
        prop_assert_eq!(hop[0].amplitude, 1.0);
        prop_assert!(!hop[0].imaginary);
        let back = target.apply_sigma(&basis, site, Axis::X, hop[0].target).unwrap();
        prop_assert_eq!(back[0].target, idx);
        prop_assert_eq!(back[0].amplitude, 1.0);
    }
}

#[test]
fn sector_dimensions_tile_the_whole_space() {
    for n in 1..=24usize {
        let total: usize = all_sectors(n).unwrap().iter().map(SectorBasis::dim).sum();
        assert_eq!(total, 1usize << n, "sectors of {n} sites must tile 2^{n}");
    }
}
