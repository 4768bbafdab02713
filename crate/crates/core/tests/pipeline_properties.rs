use leafscan::pipeline::{clip_background, emit_region_histograms, segment_faulty};
use leafscan::synthetic::{generate, SyntheticLeafSpec};
use leafscan::{analyze, LesionClass, PipelineConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec_strategy() -> impl Strategy<Value = SyntheticLeafSpec> {
    (24usize..64, 0.15f64..0.6, 0.0f64..0.4, 0u8..12, any::<u64>()).prop_map(|(size, disk, lesion, noise, seed)| {
        SyntheticLeafSpec {
            size,
            disk_fraction: disk,
            lesion_fraction: lesion,
            noise,
            seed,
            ..Default::default()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn masks_partition_the_frame(spec in spec_strategy(), seed in any::<u64>()) {
        let leaf = generate(&spec).unwrap();
        let config = PipelineConfig { seed, ..Default::default() };
        let r = analyze(&leaf.image, &config).unwrap();

        prop_assert_eq!(r.background_mask.complement(), r.leaf_mask.clone());
        prop_assert!(r.faulty_mask.is_subset_of(&r.leaf_mask).unwrap());
        prop_assert_eq!(r.faulty_mask.or(&r.normal_mask).unwrap(), r.leaf_mask.clone());
        prop_assert!(r.faulty_mask.and(&r.normal_mask).unwrap().is_clear());
        prop_assert_eq!(
            r.background_mask.count_ones() + r.faulty_mask.count_ones() + r.normal_mask.count_ones(),
            spec.size * spec.size
        );
        let expected = r.faulty_mask.count_ones() as f64 / r.leaf_mask.count_ones() as f64;
        prop_assert_eq!(r.fault_ratio, expected);
        prop_assert!((0.0..=1.0).contains(&r.fault_ratio));

        for image in [&leaf.image, &r.equalized] {
            let h = emit_region_histograms(image, &r).unwrap();
            prop_assert_eq!(&h.sample, &(&h.faulty + &h.normal));
            prop_assert_eq!(h.sample.total() as usize, r.leaf_mask.count_ones());
        }
    }

    #[test]
    fn same_seed_same_result(spec in spec_strategy(), seed in any::<u64>()) {
        let leaf = generate(&spec).unwrap();
        let config = PipelineConfig { seed, ..Default::default() };
        prop_assert_eq!(analyze(&leaf.image, &config).unwrap(), analyze(&leaf.image, &config).unwrap());
    }

    #[test]
    fn refinement_never_grows_the_fault_mask(spec in spec_strategy(), cap in 1usize..6) {
        let leaf = generate(&spec).unwrap();
        let mut sizes = Vec::new();
        for max_refine_iters in 1..=cap {
            let config = PipelineConfig { max_refine_iters, ..Default::default() };
            let clip = clip_background(&leaf.image, &config).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let r = segment_faulty(&leaf.image, &clip, &config, &mut rng).unwrap();
            prop_assert!(r.refine_iterations <= max_refine_iters);
            sizes.push(r.faulty_mask.count_ones());
        }
        prop_assert!(sizes.windows(2).all(|w| w[1] <= w[0]), "{:?}", sizes);
    }

    #[test]
    fn lighter_lesion_class_stays_a_leaf_partition(spec in spec_strategy()) {
        let leaf = generate(&spec).unwrap();
        let config = PipelineConfig { lesion_class: LesionClass::Lighter, ..Default::default() };
        let r = analyze(&leaf.image, &config).unwrap();
        prop_assert!(r.faulty_mask.is_subset_of(&r.leaf_mask).unwrap());
        prop_assert_eq!(r.faulty_mask.count_ones() + r.normal_mask.count_ones(), r.leaf_mask.count_ones());
    }
}

#[test]
fn recovers_lesions_across_noise_levels() {
    for noise in [0u8, 4, 10] {
        for seed in 0..3 {
            let leaf = generate(&SyntheticLeafSpec { size: 96, noise, seed, ..Default::default() }).unwrap();
            let r = analyze(&leaf.image, &PipelineConfig::default()).unwrap();
            assert!(r.faulty_mask.is_subset_of(&leaf.disk_mask).unwrap());
            assert!(
                (r.fault_ratio - leaf.true_fault_ratio()).abs() <= 0.02,
                "noise {noise} seed {seed}: {} vs {}",
                r.fault_ratio,
                leaf.true_fault_ratio()
            );
        }
    }
}
