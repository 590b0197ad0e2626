use keygraph_core::analytic::{
    alpha_for, ell_gamma_for, lambda_for, p_link, p_shared_exact, prob_min_degree_at_least, solve_min_ring_size,
    MinDegreePmf, ModelParams,
};
use proptest::prelude::*;

/// All `k`-subsets of `{0..pool}` as bitmasks.
fn subsets(pool: u32, k: u32) -> Vec<u32> {
    (0u32..(1 << pool)).filter(|m| m.count_ones() == k).collect()
}

/// `P[|S_i ∩ S_j| >= q]` by enumerating every ordered pair of rings.
fn enumerate_shared(ring: u32, pool: u32, q: u32) -> f64 {
    let rings = subsets(pool, ring);
    let mut hits = 0u64;
    for &a in &rings {
        for &b in &rings {
            if (a & b).count_ones() >= q {
                hits += 1;
            }
        }
    }
    hits as f64 / (rings.len() as f64 * rings.len() as f64)
}

#[test]
fn shared_probability_matches_enumeration() {
    for pool in 1..=8u32 {
        for ring in 1..=pool.min(3) {
            for q in 1..=ring {
                let want = enumerate_shared(ring, pool, q);
                let got = p_shared_exact::<f64>(ring as usize, pool as usize, q as usize).unwrap();
                assert!((got - want).abs() <= 1e-12, "K={ring} P={pool} q={q}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn small_pools_still_exact() {
    // P < 2K: some overlap sizes are impossible; enumeration covers it
    for (ring, pool) in [(3u32, 4u32), (3, 5), (4, 6), (5, 8)] {
        for q in 1..=ring {
            let want = enumerate_shared(ring, pool, q);
            let got = p_shared_exact::<f64>(ring as usize, pool as usize, q as usize).unwrap();
            assert!((got - want).abs() <= 1e-12, "K={ring} P={pool} q={q}");
        }
    }
}

#[test]
fn solver_agrees_with_scan_on_a_grid() {
    for &(pool, p, q) in &[(500usize, 0.9, 1usize), (2000, 0.5, 2), (3000, 0.3, 3)] {
        for &threshold in &[1e-4, 1e-3, 5e-3, 0.05, 0.2] {
            let scan = (q..=pool).find(|&k| p * p_shared_exact::<f64>(k, pool, q).unwrap() >= threshold);
            let solved = solve_min_ring_size(pool, p, q, threshold).ok().map(|s| s.ring_size);
            assert_eq!(solved, scan, "P={pool} p={p} q={q} t={threshold}");
        }
    }
}

fn ulps_apart(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

proptest! {
    #[test]
    fn shared_probability_monotone_in_ring(pool in 20usize..3000, q in 1usize..4, frac in 0.0f64..0.45) {
        let ring = ((pool as f64 * frac) as usize).max(1);
        let a = p_shared_exact::<f64>(ring, pool, q).unwrap();
        let b = p_shared_exact::<f64>(ring + 1, pool, q).unwrap();
        prop_assert!(b >= a, "K={} -> {}, {} -> {}", ring, a, ring + 1, b);
    }

    #[test]
    fn shared_probability_monotone_in_q(pool in 10usize..5000, ring in 1usize..60, q in 1usize..6) {
        prop_assume!(ring <= pool);
        let a = p_shared_exact::<f64>(ring, pool, q).unwrap();
        let b = p_shared_exact::<f64>(ring, pool, q + 1).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a);
    }

    #[test]
    fn alpha_reconstructs_link_probability(n in 3usize..2_000_000, k in 1u32..12, scale in 0.5f64..4.0) {
        let ln_n = (n as f64).ln();
        let lnln = ln_n.ln();
        let p = (scale * ln_n + f64::from(k - 1) * lnln) / n as f64;
        let alpha = alpha_for(n, p, k).unwrap();
        let back = (ln_n + f64::from(k - 1) * lnln + alpha) / n as f64;
        prop_assert!(ulps_apart(back, p) <= 4, "{} vs {} ({} ulps)", back, p, ulps_apart(back, p));
    }

    #[test]
    fn alpha_reconstruction_error_is_bounded_everywhere(n in 3usize..2_000_000, k in 1u32..12, p in 1e-9f64..1.0) {
        let ln_n = (n as f64).ln();
        let lnln = ln_n.ln();
        let alpha = alpha_for(n, p, k).unwrap();
        let back = (ln_n + f64::from(k - 1) * lnln + alpha) / n as f64;
        let scale = (ln_n + f64::from(k - 1) * lnln + alpha.abs()) / n as f64;
        prop_assert!((back - p).abs() <= 8.0 * f64::EPSILON * scale);
    }

    #[test]
    fn gamma_reconstructs_and_is_closest(n in 3usize..2_000_000, pos in -6.0f64..12.0) {
        let ln_n = (n as f64).ln();
        let lnln = ln_n.ln();
        let p = (ln_n + pos * lnln) / n as f64;
        prop_assume!(p > 0.0 && p <= 1.0);
        let (ell, gamma) = ell_gamma_for(n, p).unwrap();
        let back = (ln_n + (ell - 1) as f64 * lnln + gamma) / n as f64;
        prop_assert!((back - p).abs() <= 8.0 * f64::EPSILON * (ln_n + (ell - 1).unsigned_abs() as f64 * lnln + gamma.abs()) / n as f64);
        prop_assert!(gamma.abs() <= lnln / 2.0 + 1e-7 * (1.0 + pos.abs()) * lnln);
        let resid = |l: i64| (p - (ln_n + (l - 1) as f64 * lnln) / n as f64).abs();
        prop_assert!(resid(ell) <= resid(ell - 1) * (1.0 + 1e-9) + 1e-18);
        prop_assert!(resid(ell) <= resid(ell + 1) * (1.0 + 1e-9) + 1e-18);
    }

    #[test]
    fn pmf_is_normalised(ell in -5i64..12, gamma in -2.0f64..2.0) {
        let pmf = MinDegreePmf::from_level(ell, gamma);
        let total: f64 = pmf.support.iter().map(|(_, p)| *p).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(pmf.support.len() <= 2);
        prop_assert!(pmf.support.iter().all(|(_, p)| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn at_least_law_increases_in_alpha(k in 1u32..10, a in -3.0f64..4.0, step in 1e-3f64..2.0) {
        prop_assert!(prob_min_degree_at_least(k, a + step) > prob_min_degree_at_least(k, a));
    }

    #[test]
    fn at_least_law_matches_pmf_top_mass(n in 100usize..100_000, ring in 5usize..60, pool in 2_000usize..20_000, p in 0.05f64..1.0) {
        let params = ModelParams::new(n, ring, pool, p, 2).unwrap();
        let link = p_link(&params).unwrap().p_link;
        let (ell, gamma) = ell_gamma_for(n, link).unwrap();
        prop_assume!(ell >= 1);
        let alpha = alpha_for(n, link, ell as u32).unwrap();
        let pmf = MinDegreePmf::from_level(ell, gamma);
        prop_assert_eq!(alpha, gamma);
        prop_assert_eq!(prob_min_degree_at_least(ell as u32, alpha), pmf.prob(ell as u64));
    }

    #[test]
    fn lambda_is_nonnegative_and_finite(n in 3usize..1_000_000, p in 0.0f64..0.05, h in 0u32..20) {
        let l = lambda_for(n, p, h);
        prop_assert!(l >= 0.0 && l.is_finite());
    }
}
