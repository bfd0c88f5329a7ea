use hvase_core::braid::{
    build_bhv, build_w_profiles, choose_p_sequence, intersection_heights, verify_independence, verify_profile_conditions,
    BhvScene,
};
use hvase_core::presentation::{GeneratorId, Letter, Sign, Word};
use hvase_core::relator_path::{build_alpha, decode_path, decode_word, verify_monotone, wall_residual};
use hvase_core::roots::{bisect, sign_change_roots};
use hvase_core::vase::{inner_heights, VaseParams};
use hvase_core::PI;
use rand::{Rng, SeedableRng};

fn scene(n: usize, z_min: f64) -> BhvScene {
    let mut ps = choose_p_sequence(n);
    let r = verify_independence(&ps, 80, 1e-9);
    assert!(ps.mark_verified(&r));
    let profiles = build_w_profiles(&ps, z_min, 1e-9).unwrap();
    build_bhv(&ps, &profiles, z_min, 1e-9).unwrap()
}

#[test]
fn inner_heights_match_bisection() {
    for p in [2f64.sqrt(), 3f64.sqrt()] {
        let v = VaseParams::new(1.0, p).unwrap();
        let closed = inner_heights(&v, 12);
        // minima of sin(πp/h) are the zeros of cos(πp/h) where sin < 0
        let lo = closed.last().unwrap() * 0.9;
        let grid: Vec<f64> = (0..=20_000).map(|k| 1.0 - (1.0 - lo) * k as f64 / 20_000.0).collect();
        let roots: Vec<f64> = sign_change_roots(|h| (PI * p / h).cos(), &grid, 0.0)
            .into_iter()
            .filter(|&h| (PI * p / h).sin() < 0.0)
            .take(12)
            .collect();
        assert_eq!(roots.len(), closed.len());
        for (a, b) in roots.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn intersection_heights_match_a_scan() {
    let ps = choose_p_sequence(3);
    for i in 2..=3 {
        for j in 1..i {
            let (pi, pj) = (ps.p(i), ps.p(j));
            let f = |u: f64| (PI * pi * u).sin() - (PI * pj * u).sin();
            let (u_lo, u_hi) = (i as f64, 1.0 / 0.05);
            let steps = ((u_hi - u_lo) / 1e-4) as usize;
            let grid: Vec<f64> = (0..=steps).map(|k| u_lo + (u_hi - u_lo) * k as f64 / steps as f64).collect();
            let mut scanned: Vec<f64> = sign_change_roots(f, &grid, 0.0).into_iter().map(|u| 1.0 / u).collect();
            scanned.sort_by(|a, b| b.total_cmp(a));
            let closed = intersection_heights(pi, pj, i, 0.05).unwrap();
            assert_eq!(scanned.len(), closed.len(), "pair ({i}, {j})");
            for (a, b) in scanned.iter().zip(&closed) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn bisection_refines_to_machine_precision() {
    let r = bisect(|x: f64| x.cos(), 1.0, 2.0, 0.0).unwrap();
    assert!((r - PI / 2.0).abs() < 1e-15);
}

#[test]
fn profiles_pass_for_three_vases() {
    let mut ps = choose_p_sequence(3);
    let r = verify_independence(&ps, 60, 1e-9);
    ps.mark_verified(&r);
    let profiles = build_w_profiles(&ps, 0.01, 1e-9).unwrap();
    let report = verify_profile_conditions(&ps, &profiles, 0.01, 1e-9);
    assert!(report.pass, "{:?}", report.failures);
}

fn random_word(rng: &mut impl Rng, gens: u32, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    Word::new(
        (0..len)
            .map(|_| {
                let g = GeneratorId::new(rng.gen_range(1..=gens)).unwrap();
                Letter::new(g, if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus })
            })
            .collect(),
    )
}

#[test]
fn decode_inverts_build() {
    let s = scene(3, 0.01);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10 {
        let w = random_word(&mut rng, 3, 5);
        let a = build_alpha(&s, &w, 0.95, 32).unwrap();
        assert!(verify_monotone(&a.polyline).pass);
        assert!(wall_residual(&s, &a) < 1e-12);
        assert_eq!(decode_path(&s, &a).unwrap(), w);
    }
}

#[test]
fn decode_ignores_segment_metadata() {
    let s = scene(2, 0.01);
    let w = Word::from_pairs(&[(2, 1), (1, -1), (2, -1)]);
    let a = build_alpha(&s, &w, 0.95, 16).unwrap();
    let cart: Vec<[f64; 4]> = a.polyline.iter().map(|p| p.to_cartesian()).collect();
    assert_eq!(decode_word(&s, &cart).unwrap(), w);
    let vertical: Vec<[f64; 4]> = (0..10).map(|k| [2.0, 0.0, 0.9 - 0.05 * k as f64, 0.0]).collect();
    assert!(decode_word(&s, &vertical).unwrap().is_empty());
}
