use geofront::region::{bhattacharyya_coefficient, fit_mixture, region_histograms};
use geofront::{Grid, ImageGrid, LabelMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn em_log_likelihood_never_decreases(seed in any::<u64>(), k in 1usize..4, dim in prop::sample::select(vec![1usize, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 200;
        let centres: Vec<f64> = (0..3 * dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        let noise = Normal::new(0.0, 0.05).unwrap();
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            let c = i % 3;
            for d in 0..dim {
                data.push(centres[c * dim + d] + noise.sample(&mut rng));
            }
        }
        let (_, history) = fit_mixture(&data, dim, k, 15, None, &mut rng).unwrap();
        prop_assert_eq!(history.len(), 16);
        for w in history.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0), "{:?}", history);
        }
    }
}

/// Two halves whose intensities are Gaussian around `0.5 ∓ gap / 2`.
fn split_image(gap: f64, seed: u64) -> (ImageGrid, LabelMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let field = Grid::from_fn(64, 32, |x, _| {
        let m = if x < 32 { 0.5 - gap / 2.0 } else { 0.5 + gap / 2.0 };
        (m + noise.sample(&mut rng)).clamp(0.0, 1.0)
    });
    let labels = LabelMap::new(Grid::from_fn(64, 32, |x, _| if x < 32 { 1 } else { 2 })).unwrap();
    (ImageGrid::from_gray(&field).unwrap(), labels)
}

#[test]
fn coefficient_drops_as_means_separate() {
    let mut prev = f64::INFINITY;
    for gap in [0.0, 0.05, 0.1, 0.2, 0.4] {
        let (img, labels) = split_image(gap, 5);
        let h = region_histograms(&img, &labels, 2.0, 64).unwrap();
        let b = bhattacharyya_coefficient(&h[0], &h[1]);
        assert!((0.0..=1.0).contains(&b));
        assert!(b < prev, "gap {gap}: {b} after {prev}");
        prev = b;
        let same = bhattacharyya_coefficient(&h[0], &h[0]);
        assert!((same - 1.0).abs() <= 1e-9);
    }
}
