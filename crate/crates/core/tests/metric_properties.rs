use mbgan::metrics::{fit_moments, frechet_distance, intra_fid, mode_coverage, GaussianMoments};
use mbgan::ndcore::Matrix;
use mbgan::synthdata::RingMixture;
use mbgan::RunRng;
use proptest::prelude::*;
use rand::SeedableRng;

fn psd() -> impl Strategy<Value = [[f64; 2]; 2]> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(a, b, c, d)| [[a * a + b * b, a * c + b * d], [a * c + b * d, c * c + d * d]])
}

fn moments() -> impl Strategy<Value = GaussianMoments> {
    (-5.0..5.0f64, -5.0..5.0f64, psd()).prop_map(|(x, y, cov)| GaussianMoments {
        mean: [x, y],
        cov,
        n: 100,
    })
}

fn points(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), n)
}

proptest! {
    #[test]
    fn frechet_is_symmetric_and_nonnegative(a in moments(), b in moments()) {
        let ab = frechet_distance(&a, &b).unwrap();
        let ba = frechet_distance(&b, &a).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-10 * (1.0 + ab.abs()), "{ab} vs {ba}");
        prop_assert!(frechet_distance(&a, &a).unwrap() < 1e-6);
    }

    #[test]
    fn shifting_one_gaussian_adds_the_squared_shift(a in moments(), tx in -4.0..4.0f64, ty in -4.0..4.0f64) {
        let b = GaussianMoments { mean: [a.mean[0] + tx, a.mean[1] + ty], ..a };
        let d = frechet_distance(&a, &b).unwrap();
        let want = tx * tx + ty * ty;
        prop_assert!((d - want).abs() < 1e-6 * (1.0 + want), "{d} vs {want}");
    }

    #[test]
    fn fitted_moments_are_translation_equivariant(rows in points(20), tx in -2.0..2.0f64) {
        let m = Matrix::from_rows(&rows).unwrap();
        let shifted: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] + tx, r[1]]).collect();
        let a = fit_moments(&m).unwrap();
        let b = fit_moments(&Matrix::from_rows(&shifted).unwrap()).unwrap();
        prop_assert!((b.mean[0] - a.mean[0] - tx).abs() < 1e-9);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((a.cov[i][j] - b.cov[i][j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mode_shares_sum_to_the_high_quality_fraction(rows in points(64)) {
        let mix = RingMixture { mode_std: 0.3, ..RingMixture::default() };
        let cov = mode_coverage(&Matrix::from_rows(&rows).unwrap(), &mix, 3.0);
        let total: f64 = cov.per_mode_share.iter().sum();
        prop_assert!((total - cov.hq_fraction).abs() < 1e-12);
        prop_assert!(cov.modes_captured <= mix.n_modes);
        prop_assert!((0.0..=1.0).contains(&cov.hq_fraction));
    }

    #[test]
    fn intra_fid_is_nonnegative(rows in points(40), seed in 0u64..1000) {
        let mut rng = RunRng::seed_from_u64(seed);
        let d = intra_fid(&Matrix::from_rows(&rows).unwrap(), 20, &mut rng).unwrap();
        prop_assert!(d >= 0.0 && d.is_finite());
    }
}
