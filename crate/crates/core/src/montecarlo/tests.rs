use super::*;
use crate::surrogates::{gamma_p, hitczenko_lower};
use proptest::prelude::*;
use rand::SeedableRng;

fn settings(n: usize) -> McSettings {
    McSettings::new(n, 20260101)
}

fn cv(v: &[f64]) -> CoefficientVector {
    CoefficientVector::new(v.to_vec()).unwrap()
}

fn families(n: usize) -> Vec<DistributionFamily> {
    vec![
        DistributionFamily::exponential(n).unwrap(),
        DistributionFamily::gaussian(n).unwrap(),
        DistributionFamily::cube(n).unwrap(),
        DistributionFamily::uniform_ball(n, 1.0).unwrap(),
        DistributionFamily::uniform_ball(n, 2.0).unwrap(),
        DistributionFamily::uniform_ball(n, 3.5).unwrap(),
        DistributionFamily::parse("product:gauss,gnorm:1.5", n).unwrap(),
    ]
}

#[test]
fn samplers_are_isotropic_and_centred() {
    let n = 3;
    let draws = 1_000_000;
    for family in families(n) {
        let sampler = FamilySampler::new(&family);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut x = vec![0.0; n];
        let mut sum = vec![0.0; n];
        let mut sq = vec![0.0; n];
        for _ in 0..draws {
            sampler.sample_into(&mut rng, &mut x);
            for i in 0..n {
                sum[i] += x[i];
                sq[i] += x[i] * x[i];
            }
        }
        for i in 0..n {
            let mean = sum[i] / draws as f64;
            let var = sq[i] / draws as f64 - mean * mean;
            assert!(mean.abs() < 0.005, "{family:?} mean {mean}");
            assert!((var - 1.0).abs() < 0.01, "{family:?} var {var}");
        }
    }
}

#[test]
fn ball_samples_stay_inside_and_fill_by_volume() {
    let family = DistributionFamily::uniform_ball(2, 1.0).unwrap();
    let DistributionFamily::UniformBall(ball) = &family else { unreachable!() };
    let sampler = FamilySampler::new(&family);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut x = [0.0; 2];
    let draws = 1_000_000;
    let mut inner = 0usize;
    for _ in 0..draws {
        sampler.sample_into(&mut rng, &mut x);
        assert!(ball.contains(&x));
        inner += usize::from(x[0].abs() + x[1].abs() <= ball.r() / 2.0);
    }
    let frac = inner as f64 / draws as f64;
    assert!((frac - 0.25).abs() < 0.01, "{frac}");
}

#[test]
fn independent_marginals_match_the_ball_coordinate() {
    let family = DistributionFamily::uniform_ball(3, 1.0).unwrap();
    let DistributionFamily::UniformBall(ball) = &family else { unreachable!() };
    let sampler = IndependentMarginals::new(ball.marginal().unwrap(), 3);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let mut x = [0.0; 3];
    let draws = 400_000;
    let mut sq = 0.0;
    for _ in 0..draws {
        sampler.sample_into(&mut rng, &mut x);
        assert!(x.iter().all(|v| v.abs() <= ball.r()));
        sq += x[1] * x[1];
    }
    assert!((sq / draws as f64 - 1.0).abs() < 0.02);
}

fn within(rec: &EstimateRecord, target: f64, k: f64) -> bool {
    (rec.value - target).abs() <= k * rec.stderr
}

#[test]
fn pnorm_examples() {
    let s = settings(1_000_000);
    let one = cv(&[1.0]);
    let g = estimate_pnorm(&DistributionFamily::gaussian(1).unwrap(), &one, 4.0, &s).unwrap();
    assert!(within(&g, 3f64.powf(0.25), 3.0), "{g:?}");
    let e = DistributionFamily::exponential(1).unwrap();
    let r2 = estimate_pnorm(&e, &one, 2.0, &s).unwrap();
    assert!(within(&r2, 1.0, 3.0), "{r2:?}");
    let r4 = estimate_pnorm(&e, &one, 4.0, &s).unwrap();
    assert!(within(&r4, 6f64.powf(0.25), 3.0), "{r4:?}");
    assert!(r4.stderr > 0.0);
    assert_eq!((r4.n_samples, r4.batches, r4.seed), (1_000_000, 64, 20260101));
}

#[test]
fn pnorm_errors() {
    let e = DistributionFamily::exponential(2).unwrap();
    let a = cv(&[1.0, 1.0]);
    let s = settings(10_000);
    assert!(matches!(estimate_pnorm(&e, &a, 33.0, &s), Err(Error::OutOfRange(_))));
    assert!(matches!(estimate_pnorm(&e, &a, 1.5, &s), Err(Error::InvalidArgument(_))));
    assert!(matches!(
        estimate_pnorm(&e, &cv(&[0.0, 0.0]), 4.0, &s),
        Err(Error::InvalidArgument(_))
    ));
    assert!(estimate_pnorm(&e, &a, 4.0, &settings(9_999)).is_err());
    assert!(estimate_pnorm(&e, &cv(&[1.0]), 4.0, &s).is_err());
    assert!(estimate_pnorm(&e, &a, 4.0, &s.with_batches(16)).is_err());
}

#[test]
fn reproducible_across_worker_counts_and_sign() {
    let family = DistributionFamily::uniform_ball(5, 1.5).unwrap();
    let a = cv(&[0.3, -1.0, 0.2, 0.0, 2.0]);
    let neg = cv(&[-0.3, 1.0, -0.2, 0.0, -2.0]);
    let s = settings(50_000);
    let run = |threads: usize, a: &CoefficientVector| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_pnorm(&family, a, 7.0, &s).unwrap())
    };
    let one = run(1, &a);
    assert_eq!(one, run(3, &a));
    assert_eq!(one, run(8, &a));
    assert_eq!(one, run(2, &neg));
}

#[test]
fn shared_draws_match_single_estimates() {
    let family = DistributionFamily::cube(3).unwrap();
    let a = cv(&[1.0, 2.0, 3.0]);
    let b = cv(&[1.0, 0.0, 0.0]);
    let s = settings(20_000);
    let key = StreamKey::new(s.seed, DOMAIN_PNORM);
    let all = estimate_pnorms(&family, &[&a, &b], &[2.0, 5.0], &s, key).unwrap();
    assert_eq!(all[0][1], estimate_pnorm(&family, &a, 5.0, &s).unwrap());
    assert_eq!(all[1][0], estimate_pnorm(&family, &b, 2.0, &s).unwrap());
}

#[test]
fn pnorm_is_monotone_in_p_within_error() {
    for family in families(4) {
        let a = cv(&[1.0, 0.5, 0.25, 0.125]);
        let ps = [2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0];
        let s = settings(100_000);
        let rows = estimate_pnorms(&family, &[&a], &ps, &s, StreamKey::new(1, 2)).unwrap();
        for w in rows[0].windows(2) {
            assert!(w[1].value >= w[0].value - 3.0 * w[0].stderr.hypot(w[1].stderr), "{family:?}");
        }
    }
}

#[test]
fn moment4_examples() {
    let s = settings(1_000_000);
    let e = estimate_moment4(&DistributionFamily::exponential(2).unwrap(), 1, &s).unwrap();
    assert!(within(&e, 6.0, 3.0), "{e:?}");
    let c = estimate_moment4(&DistributionFamily::cube(2).unwrap(), 0, &s).unwrap();
    assert!(within(&c, 1.8, 3.0), "{c:?}");
    let g = estimate_moment4(&DistributionFamily::gaussian(2).unwrap(), 0, &s).unwrap();
    assert!(within(&g, 3.0, 3.0), "{g:?}");
    assert!(estimate_moment4(&DistributionFamily::gaussian(2).unwrap(), 2, &s).is_err());
}

#[test]
fn joint_tail_examples() {
    let s = settings(1_000_000);
    let e = DistributionFamily::exponential(3).unwrap();
    assert_eq!(estimate_joint_tail(&e, &[0.0; 3], &s).unwrap().value, 1.0);
    let sv = 0.2;
    let rec = estimate_joint_tail(&e, &[sv; 3], &s).unwrap();
    assert!(within(&rec, (-2f64.sqrt() * 3.0 * sv).exp(), 3.0), "{rec:?}");

    let ball = DistributionFamily::uniform_ball(2, 1.0).unwrap();
    let DistributionFamily::UniformBall(b) = &ball else { unreachable!() };
    let r = b.r();
    let t = [0.3, 0.5];
    let rec = estimate_joint_tail(&ball, &t, &s).unwrap();
    let exact = ((r - t[0] - t[1]) / r).powi(2);
    assert!(within(&rec, exact, 3.0), "{rec:?} vs {exact}");

    assert!(matches!(
        estimate_joint_tail(&e, &[3.0; 3], &s),
        Err(Error::OutOfRange(_))
    ));
    let big = DistributionFamily::exponential(9).unwrap();
    assert!(matches!(
        estimate_joint_tail(&big, &[0.1; 9], &s),
        Err(Error::OutOfRange(_))
    ));
    assert!(estimate_joint_tail(&e, &[-0.1, 0.0, 0.0], &s).is_err());
}

#[test]
fn na_compare_examples() {
    let s = settings(1_000_000);
    let ball = DistributionFamily::uniform_ball(3, 1.0).unwrap();
    let cmp = na_compare(&ball, &cv(&[1.0, 1.0, 1.0]), 4.0, &s).unwrap();
    assert!(cmp.holds_within(3.0), "{cmp:?}");
    let single = na_compare(&ball, &cv(&[1.0, 0.0, 0.0]), 4.0, &s).unwrap();
    assert!((single.dependent.value - single.independent.value).abs() <= 3.0 * single.combined_stderr());
    let disk = DistributionFamily::uniform_ball(2, 2.0).unwrap();
    let cmp = na_compare(&disk, &cv(&[1.0, 1.0]), 4.0, &s).unwrap();
    assert!(cmp.dependent.value < cmp.independent.value, "{cmp:?}");

    assert!(matches!(
        na_compare(&ball, &cv(&[1.0, 1.0, 1.0]), 2.5, &s),
        Err(Error::InvalidArgument(_))
    ));
    assert!(na_compare(&DistributionFamily::uniform_ball(1, 2.0).unwrap(), &cv(&[1.0]), 4.0, &s).is_err());
    assert!(na_compare(&DistributionFamily::cube(3).unwrap(), &cv(&[1.0; 3]), 4.0, &s).is_err());
}

#[test]
fn rademacher_examples() {
    let v = brute_force_rademacher_pnorm(&cv(&[1.0, 1.0]), 2.0).unwrap();
    assert!((v - 2f64.sqrt()).abs() < 1e-14);
    let v = brute_force_rademacher_pnorm(&cv(&[1.0, 1.0]), 4.0).unwrap();
    assert!((v - 8f64.powf(0.25)).abs() < 1e-14);
    let v = brute_force_rademacher_pnorm(&cv(&[1.0, 1.0, 1.0]), 3.0).unwrap();
    assert!((v - 7.5f64.cbrt()).abs() < 1e-14);
    assert!(matches!(
        brute_force_rademacher_pnorm(&cv(&[1.0; 21]), 2.0),
        Err(Error::OutOfRange(_))
    ));
    assert!(brute_force_rademacher_pnorm(&cv(&[1.0]), 0.5).is_err());
    assert_eq!(brute_force_rademacher_pnorm(&cv(&[0.0, 0.0]), 3.0).unwrap(), 0.0);
}

proptest! {
    #[test]
    fn rademacher_second_moment_is_l2(v in prop::collection::vec(-3.0f64..3.0, 1..12)) {
        let a = cv(&v);
        let m = brute_force_rademacher_pnorm(&a, 2.0).unwrap();
        prop_assert!((m - a.l2()).abs() <= 1e-12 * (1.0 + a.l2()));
    }

    #[test]
    fn khintchine_with_optimal_constant(v in prop::collection::vec(-3.0f64..3.0, 1..=12), p in 2.0f64..16.0) {
        let a = cv(&v);
        let m = brute_force_rademacher_pnorm(&a, p).unwrap();
        prop_assert!(m <= gamma_p(p).unwrap() * a.l2() + 1e-12 * (1.0 + a.l2()));
    }

    #[test]
    fn hitczenko_two_sided_at_rademacher_level(v in prop::collection::vec(0.01f64..3.0, 1..=12), p in 2.0f64..16.0) {
        let a = cv(&v);
        let ratio = hitczenko_lower(&a, p).unwrap() / brute_force_rademacher_pnorm(&a, p).unwrap();
        prop_assert!((1.0 / 5.0..=5.0).contains(&ratio), "{}", ratio);
    }
}
