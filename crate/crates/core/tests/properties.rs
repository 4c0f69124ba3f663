use proptest::prelude::*;

use windeval::dataset::{decode_wfb, encode_wfb};
use windeval::distribution::{wasserstein1, wasserstein1_cdf, wasserstein1_sorted_pairs};
use windeval::fidelity::{mae, psnr, ssim, MetricConfig};
use windeval::grid::{compute_stats, denormalize, normalize};
use windeval::resample::{decimate, upsample, ResampleFactor, UpsampleMethod};
use windeval::spectral::{melr, power_spectrum_2d, rapsd, MelrOptions};
use windeval::{Field2D, FieldSeries, GridSpec, VelocitySample};

fn grid(rows: usize, cols: usize) -> GridSpec {
    GridSpec::new(rows, cols, 50.0, 2.0, -0.2, 0.2, 20.0).unwrap()
}

prop_compose! {
    fn field(rows: usize, cols: usize)(values in prop::collection::vec(-20.0f64..20.0, rows * cols)) -> Field2D {
        Field2D::new(grid(rows, cols), values).unwrap()
    }
}

prop_compose! {
    fn series(rows: usize, cols: usize, max_len: usize)
        (pairs in prop::collection::vec((field(rows, cols), field(rows, cols)), 1..=max_len)) -> FieldSeries {
        let samples = pairs
            .into_iter()
            .enumerate()
            .map(|(k, (u, v))| VelocitySample::new(u, v, 3600 * k as i64).unwrap())
            .collect();
        FieldSeries::new(samples, 3600).unwrap()
    }
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_round_trips(s in series(6, 5, 4)) {
        let stats = compute_stats(&s).unwrap();
        let back = denormalize(&normalize(&s, &stats).unwrap(), &stats).unwrap();
        for (a, b) in s.samples().iter().zip(back.samples()) {
            for (x, y) in a.u().values().iter().zip(b.u().values()).chain(a.v().values().iter().zip(b.v().values())) {
                prop_assert!((x - y).abs() <= 1e-12 * 40.0);
            }
        }
    }

    #[test]
    fn normalized_training_data_spans_unit_range(s in series(4, 4, 3)) {
        let stats = compute_stats(&s).unwrap();
        let n = normalize(&s, &stats).unwrap();
        let lo = n.samples().iter().flat_map(|x| x.u().values().iter().copied()).fold(f64::INFINITY, f64::min);
        let hi = n.samples().iter().flat_map(|x| x.u().values().iter().copied()).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((hi - lo - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_is_a_metric(a in samples(), b in samples(), c in samples()) {
        let ab = wasserstein1(&a, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, wasserstein1(&b, &a).unwrap());
        prop_assert_eq!(wasserstein1(&a, &a).unwrap(), 0.0);
        let (ac, cb) = (wasserstein1(&a, &c).unwrap(), wasserstein1(&c, &b).unwrap());
        prop_assert!(ab <= ac + cb + 1e-9);
    }

    #[test]
    fn wasserstein_paths_agree(pairs in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..40)) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let sorted = wasserstein1_sorted_pairs(&a, &b);
        let cdf = wasserstein1_cdf(&a, &b);
        prop_assert!((sorted - cdf).abs() <= 1e-9 * (1.0 + sorted));
    }

    #[test]
    fn wasserstein_of_shift_is_the_shift(a in samples(), shift in -10.0f64..10.0) {
        let b: Vec<f64> = a.iter().map(|x| x + shift).collect();
        prop_assert!((wasserstein1(&a, &b).unwrap() - shift.abs()).abs() <= 1e-9);
    }

    #[test]
    fn pixel_metrics_are_symmetric(f in field(6, 7), g in field(6, 7)) {
        let cfg = MetricConfig { peak: 40.0, ..MetricConfig::default() };
        prop_assert_eq!(psnr(&f, &g, &cfg).unwrap(), psnr(&g, &f, &cfg).unwrap());
        prop_assert_eq!(mae(&f, &g).unwrap(), mae(&g, &f).unwrap());
        prop_assert!((ssim(&f, &g, &cfg).unwrap() - ssim(&g, &f, &cfg).unwrap()).abs() <= 1e-12);
        prop_assert!(ssim(&f, &g, &cfg).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn upsampling_then_decimating_is_identity(f in field(5, 6), factor in 2usize..5) {
        let factor = ResampleFactor::new(factor).unwrap();
        for method in [UpsampleMethod::Bicubic, UpsampleMethod::Bilinear, UpsampleMethod::Nearest] {
            let back = decimate(&upsample(&f, method, factor).unwrap(), factor).unwrap();
            prop_assert_eq!(back.values(), f.values());
        }
    }

    #[test]
    fn spectrum_is_nonnegative_and_bins_cover_the_disk(f in field(8, 12)) {
        let spec = power_spectrum_2d(&f);
        prop_assert!(spec.power().iter().all(|&p| p >= 0.0));
        let r = rapsd(&f).unwrap();
        let cells: usize = r.counts.iter().sum::<usize>() + r.skipped_cells;
        prop_assert_eq!(cells, 8 * 12 - 1);
    }

    #[test]
    fn melr_is_symmetric_and_zero_on_itself(f in field(8, 8), g in field(8, 8)) {
        let opts = MelrOptions::default();
        prop_assert_eq!(melr(&f, &f, opts).unwrap().value, 0.0);
        let (fg, gf) = (melr(&f, &g, opts).unwrap().value, melr(&g, &f, opts).unwrap().value);
        prop_assert!((fg - gf).abs() <= 1e-12);
    }

    #[test]
    fn wfb_round_trips_f32_values(values in prop::collection::vec(-1e4f32..1e4, 24)) {
        let u = Field2D::new(grid(4, 6), values.iter().map(|&x| x as f64).collect()).unwrap();
        let v = u.map(|x| -x).unwrap();
        let sample = VelocitySample::new(u.clone(), v.clone(), 0).unwrap();
        let (rows, cols, du, dv) = decode_wfb(&encode_wfb(&sample)).unwrap();
        prop_assert_eq!((rows, cols), (4, 6));
        prop_assert_eq!(du.as_slice(), u.values());
        prop_assert_eq!(dv.as_slice(), v.values());
    }
}
