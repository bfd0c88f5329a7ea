use std::sync::OnceLock;

use hvase_core::braid::{build_bhv, build_w_profiles, choose_p_sequence, verify_independence, w_eval, BhvScene};
use hvase_core::config::{BuildConfig, Resolution};
use hvase_core::disc::{build_disc, disc_point_f, left_edge, BumpG};
use hvase_core::presentation::{parse_presentation, Presentation, Word};
use hvase_core::realize::{build_space, truncate};
use hvase_core::relator_path::{build_alpha, decode_path, verify_monotone, wall_residual};
use hvase_core::vase::{inner_heights, sample_wall, wall_radius, VaseParams};
use hvase_core::PI;
use proptest::prelude::*;

fn scene() -> &'static BhvScene {
    static SCENE: OnceLock<BhvScene> = OnceLock::new();
    SCENE.get_or_init(|| {
        let mut ps = choose_p_sequence(4);
        let r = verify_independence(&ps, 80, 1e-9);
        assert!(ps.mark_verified(&r));
        let profiles = build_w_profiles(&ps, 0.01, 1e-9).unwrap();
        build_bhv(&ps, &profiles, 0.01, 1e-9).unwrap()
    })
}

fn word(max_gen: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=max_gen, prop_oneof![Just(1i32), Just(-1i32)]), 1..=max_len)
        .prop_map(|pairs| Word::from_pairs(&pairs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radius_is_bounded_and_even(p in 0.1f64..10.0, phi in -PI..=PI, z in 1e-3f64..1.0) {
        let r = wall_radius(p, phi, z).unwrap();
        prop_assert!((1.0..=3.0).contains(&r));
        prop_assert_eq!(r, wall_radius(p, -phi, z).unwrap());
    }

    #[test]
    fn inner_heights_are_innermost(p in 0.1f64..10.0, phi in -PI..=PI) {
        let hs = inner_heights(&VaseParams::new(1.0, p).unwrap(), 20);
        for h in &hs {
            prop_assert!((wall_radius(p, phi, *h).unwrap() - (2.0 - phi.abs() / PI)).abs() < 1e-12);
        }
        let k0 = ((2.0 * p / hs[0] - 3.0) / 4.0).round() as usize;
        for (k, w) in hs.windows(2).enumerate() {
            let k = (k + k0) as f64;
            prop_assert!((w[1] / w[0] - (4.0 * k + 3.0) / (4.0 * k + 7.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn wall_samples_satisfy_the_equation(p in 0.5f64..3.0, m in 0.3f64..1.0) {
        let v = VaseParams::new(m, p).unwrap();
        let mesh = sample_wall(&v, None, 1, Resolution { phi_steps: 8, oversample: 4 }, 0.05, 1_000_000).unwrap();
        for pt in &mesh.points {
            prop_assert!((pt.r - wall_radius(p, pt.phi, pt.z).unwrap()).abs() <= 1e-12);
            prop_assert!(pt.z > 0.05 && pt.z <= m && pt.w == 0.0);
        }
    }

    #[test]
    fn braiding_stays_below_the_diagonal(i in 1usize..=4, u in 0.0f64..1.0) {
        let s = scene();
        let top = 1.0 / i as f64;
        let z = 0.01 + (top - 0.01) * u;
        let w = w_eval(&s.vase(i).unwrap().profile, z.max(0.0101)).unwrap();
        prop_assert!(PI * w <= z.max(0.0101) / (i as f64 + 1.0) + 1e-15);
        prop_assert!(w >= 0.0);
    }

    #[test]
    fn alpha_paths_descend_on_the_walls(w in word(4, 6)) {
        let s = scene();
        let a = build_alpha(s, &w, 0.95, 16).unwrap();
        prop_assert!(verify_monotone(&a.polyline).pass);
        prop_assert!(wall_residual(s, &a) <= 1e-12);
        prop_assert!(a.terminal > s.z_min && a.terminal < 0.95);
        prop_assert_eq!(decode_path(s, &a).unwrap(), w);
    }

    #[test]
    fn disc_map_properties(w in word(3, 3), s in 0.0f64..=1.0, tau in 0u32..=1024) {
        let sc = scene();
        let a = build_alpha(sc, &w, 0.9, 16).unwrap();
        let g = BumpG::default();
        // dyadic τ so that 1/2 ± τ are exact
        let tau = tau as f64 / 2048.0;
        let down = left_edge(sc, &a, 0.5 - tau).unwrap();
        let up = left_edge(sc, &a, 0.5 + tau).unwrap();
        prop_assert_eq!(down.z, up.z);
        let f = disc_point_f(sc, &a, &g, s, 0.5 + tau).unwrap();
        let z = f[2];
        prop_assert!(g.eval(s, 0.5 + tau, z) < z);
        prop_assert!(f[0] * f[0] + f[1] * f[1] <= 9.0 && (0.0..=0.9).contains(&z) && f[3] >= 0.0 && f[3] <= z);
        for (bs, bt) in [(0.0, 0.5 + tau), (1.0, 0.5 + tau), (s, 0.5), (s, 1.0)] {
            prop_assert_eq!(g.eval(bs, bt, z), 0.0);
        }
    }
}

fn presentation() -> impl Strategy<Value = Presentation> {
    (1usize..=3).prop_flat_map(|n| {
        prop::collection::vec(word(n as u32, 4), 1..=3).prop_map(move |rels| {
            Presentation::new((0..n).map(|k| format!("x{k}")).collect(), rels).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn truncations_exhaust_monotonically(p in presentation(), e1 in 0.02f64..1.0, e2 in 0.02f64..1.0) {
        let config = BuildConfig { disc_resolution: 8, ..BuildConfig::default() };
        let scene = build_space(&p, &config).unwrap();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let (big, small) = (truncate(&scene, lo).unwrap(), truncate(&scene, hi).unwrap());
        prop_assert!(big.generators >= small.generators);
        prop_assert!(small.discs.iter().all(|d| big.discs.contains(d)));
        for (k, d) in small.discs.iter().enumerate() {
            let j = big.discs.iter().position(|x| x == d).unwrap();
            prop_assert_eq!(&big.words[j], &small.words[k]);
        }
        for (k, d) in scene.discs.iter().enumerate() {
            let mesh = build_disc(&scene.bhv, &d.alpha, 8, k).unwrap();
            prop_assert_eq!(mesh.euler_characteristic(), 1);
        }
    }
}

#[test]
fn determinism_of_builds() {
    let p = parse_presentation("gens: a b c\nrel: a b a' b'\nrel: c c").unwrap();
    let c = BuildConfig::default();
    assert_eq!(build_space(&p, &c).unwrap(), build_space(&p, &c).unwrap());
}
