use lpmhd_core::littlewood_paley::{besov_norm, block_norms, chemin_lerner_norm, lebesgue_besov_norm};
use lpmhd_core::mhd::{select_time_horizon, MhdInitialData};
use lpmhd_core::paraproduct::{bony_decomposition, remainder};
use lpmhd_core::random::{random_band_limited, random_solenoidal, seeded};
use lpmhd_core::spectral::{
    divergence, heat_semigroup, inner_product, leray_project, lp_norm, spectral_derivative, tensor_divergence,
};
use lpmhd_core::*;
use proptest::prelude::*;

fn grid(n: usize) -> FrequencyGrid {
    FrequencyGrid::periodic(2, n).unwrap()
}

fn band_limited(n: usize, comps: usize, k_hi: f64, seed: u64) -> Field {
    random_band_limited(&grid(n), comps, 1.0, k_hi, &mut seeded(seed))
}

fn l2(f: &Field) -> f64 {
    lp_norm(f, 2.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(seed in any::<u64>(), k_hi in 2.0f64..10.0) {
        let f = band_limited(32, 2, k_hi, seed);
        let back = f.to_spectral().to_physical();
        prop_assert!(l2(&back.sub(&f).unwrap()) <= 1e-12 * l2(&f));
    }

    #[test]
    fn leray_is_idempotent_and_solenoidal(seed in any::<u64>()) {
        let f = band_limited(32, 2, 10.0, seed);
        let once = leray_project(&f.to_spectral()).unwrap();
        let twice = leray_project(&once).unwrap();
        let (once, twice) = (once.to_physical(), twice.to_physical());
        prop_assert!(l2(&twice.sub(&once).unwrap()) <= 1e-12 * l2(&f));
        prop_assert!(l2(&divergence(&once).unwrap()) <= 1e-10 * l2(&f));
    }

    #[test]
    fn heat_contracts_lebesgue_norms(seed in any::<u64>(), t1 in 0.0f64..0.2, dt in 0.0f64..0.2) {
        let f = band_limited(32, 1, 8.0, seed).to_spectral();
        let a = heat_semigroup(&f, t1).unwrap().to_physical();
        let b = heat_semigroup(&f, t1 + dt).unwrap().to_physical();
        for p in [1.0, 2.0, f64::INFINITY] {
            let (na, nb) = (lp_norm(&a, p).unwrap(), lp_norm(&b, p).unwrap());
            prop_assert!(nb <= na * (1.0 + 1e-12), "p = {}: {} > {}", p, nb, na);
        }
    }

    #[test]
    fn derivative_commutes_with_heat(seed in any::<u64>(), t in 0.0f64..0.5, axis in 0usize..2) {
        let f = band_limited(32, 1, 8.0, seed).to_spectral();
        let a = spectral_derivative(&heat_semigroup(&f, t).unwrap(), axis).unwrap().to_physical();
        let b = heat_semigroup(&spectral_derivative(&f, axis).unwrap(), t).unwrap().to_physical();
        prop_assert!(l2(&a.sub(&b).unwrap()) <= 1e-12 * l2(&a).max(1e-300));
    }

    #[test]
    fn advection_is_energy_neutral(seed in any::<u64>()) {
        let a = random_solenoidal(&grid(32), 1.0, 8.0, &mut seeded(seed));
        let flux = inner_product(&tensor_divergence(&a, &a).unwrap(), &a).unwrap();
        prop_assert!(flux.abs() <= 1e-8 * l2(&a).powi(3));
    }

    #[test]
    fn partition_of_unity_on_interior_band(log2n in 5u32..8, length in 1.0f64..20.0) {
        let g = FrequencyGrid::new(2, 1 << log2n, length).unwrap();
        let Ok(bank) = FilterBank::resolved(g) else { return Ok(()); };
        prop_assert!(bank.partition_error(bank.interior_band()) <= 1e-12);
    }

    #[test]
    fn separated_blocks_are_disjoint(seed in any::<u64>()) {
        let bank = FilterBank::resolved(grid(64)).unwrap();
        let f = band_limited(64, 1, 30.0, seed).to_spectral();
        for j in bank.indices() {
            for k in bank.indices().filter(|k| (j - k).abs() >= 2) {
                let inner = bank.block_spectral(k, &f).unwrap();
                let both = bank.block_spectral(j, &inner).unwrap().to_physical();
                prop_assert!(both.samples().iter().all(|x| *x == 0.0), "j = {}, k = {}", j, k);
            }
        }
    }

    #[test]
    fn l2_besov_equivalence(seed in any::<u64>()) {
        let bank = FilterBank::resolved(grid(64)).unwrap();
        let (lo, hi) = bank.interior_band();
        let f = random_band_limited(bank.grid(), 1, lo, hi, &mut seeded(seed));
        let b = besov_norm(&f, &BesovSpec::new(0.0, 2.0, 2.0).unwrap(), &bank).unwrap();
        let n = l2(&f);
        prop_assert!(b <= n * (1.0 + 1e-12) && b >= n / 2f64.sqrt() * (1.0 - 1e-12), "{} vs {}", b, n);
    }

    #[test]
    fn besov_monotone_in_regularity(seed in any::<u64>(), s in -2.0f64..2.0, ds in 0.0f64..1.0) {
        let bank = FilterBank::resolved(grid(32)).unwrap();
        let f = random_band_limited(bank.grid(), 1, 1.4, 10.0, &mut seeded(seed));
        let norms = block_norms(&bank, &f, 2.0).unwrap();
        for r in [1.0, 2.0, f64::INFINITY] {
            prop_assert!(norms.besov(s, r) <= norms.besov(s + ds, r) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn single_snapshot_chemin_lerner_is_besov(seed in any::<u64>(), s in -1.0f64..2.0) {
        let bank = FilterBank::resolved(grid(32)).unwrap();
        let f = band_limited(32, 1, 10.0, seed);
        let series = TimeSeriesField::new(vec![0.0], vec![f.clone()]).unwrap();
        let spec = BesovSpec::new(s, 2.0, 1.0).unwrap();
        let cl = chemin_lerner_norm(&series, &spec.with_time(f64::INFINITY).unwrap(), &bank).unwrap();
        let b = besov_norm(&f, &spec, &bank).unwrap();
        prop_assert!((cl - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn minkowski_ordering(seed in any::<u64>(), q in 1.0f64..4.0) {
        let bank = FilterBank::resolved(grid(32)).unwrap();
        let f = band_limited(32, 1, 10.0, seed).to_spectral();
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.02).collect();
        let snaps = times.iter().map(|&t| heat_semigroup(&f, t).unwrap().to_physical()).collect();
        let series = TimeSeriesField::new(times, snaps).unwrap();
        // r ≥ q puts the Chemin-Lerner norm below the Bochner norm; r ≤ q reverses it.
        let high = BesovSpec::new(0.5, 2.0, q + 1.0).unwrap().with_time(q).unwrap();
        prop_assert!(chemin_lerner_norm(&series, &high, &bank).unwrap()
            <= lebesgue_besov_norm(&series, &high, &bank).unwrap() * (1.0 + 1e-12));
        let low = BesovSpec::new(0.5, 2.0, 1.0).unwrap().with_time(q).unwrap();
        prop_assert!(chemin_lerner_norm(&series, &low, &bank).unwrap()
            >= lebesgue_besov_norm(&series, &low, &bank).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn bony_identity_and_symmetry(seed in any::<u64>()) {
        let bank = FilterBank::resolved(grid(64)).unwrap();
        let mut rng = seeded(seed);
        let (lo, hi) = bank.exact_band();
        let u = random_band_limited(bank.grid(), 1, lo, hi, &mut rng);
        let v = random_band_limited(bank.grid(), 1, lo, hi, &mut rng);
        let parts = bony_decomposition(&bank, &u, &v).unwrap();
        let exact = spectral::dealiased_product_physical(&u, &v).unwrap();
        prop_assert!(l2(&parts.reconstruct().sub(&exact).unwrap()) <= 1e-10 * l2(&u) * l2(&v));
        prop_assert_eq!(remainder(&bank, &u, &v).unwrap(), remainder(&bank, &v, &u).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn horizon_is_monotone_under_shrinking(seed in any::<u64>(), alpha in 0.05f64..1.0) {
        let bank = FilterBank::resolved(grid(32)).unwrap();
        let u0 = random_solenoidal(bank.grid(), 1.0, 8.0, &mut seeded(seed));
        let u0 = lpmhd_core::random::normalized(&u0, 0.05);
        let big = select_time_horizon(&bank, &u0, 2.0, 0.1, 1e-2, 0.5).unwrap();
        let small = select_time_horizon(&bank, &u0.scaled(alpha), 2.0, 0.1, 1e-2, 0.5).unwrap();
        prop_assert!(small.horizon >= big.horizon);
    }

    #[test]
    fn initial_data_accepts_solenoidal_pairs(seed in any::<u64>()) {
        let g = grid(32);
        let mut rng = seeded(seed);
        let u0 = random_solenoidal(&g, 1.0, 8.0, &mut rng);
        let b0 = random_solenoidal(&g, 1.0, 8.0, &mut rng);
        prop_assert!(MhdInitialData::new(u0.clone(), b0).is_ok());
        let raw = random_band_limited(&g, 2, 1.0, 8.0, &mut rng);
        prop_assert!(MhdInitialData::new(u0, raw).is_err());
    }
}
