use glyphspec_core::fusion::{fuse, CalibratedClassifier, FusionModel, ProbMatrix};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_prob(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; n]; n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = col.iter().sum();
        for (row, v) in rows.iter_mut().zip(&col) {
            row[j] = v / s;
        }
    }
    rows
}

fn model(mats: &[Vec<Vec<f64>>]) -> FusionModel {
    FusionModel::new(
        (0..mats[0].len() as u32).collect(),
        mats.iter()
            .enumerate()
            .map(|(l, m)| CalibratedClassifier {
                tag: format!("c{l}"),
                probabilities: ProbMatrix::from_rows(m.clone()).unwrap(),
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn belief_is_a_distribution(seed in any::<u64>(), n in 2usize..=10, l in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<_> = (0..l).map(|_| random_prob(&mut rng, n)).collect();
        let preds: Vec<usize> = (0..l).map(|_| rng.gen_range(0..n)).collect();
        let f = fuse(&model(&mats), &preds).unwrap();
        prop_assert!(f.belief.iter().all(|&b| b >= 0.0));
        prop_assert!((f.belief.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn scaling_one_matrix_keeps_argmax(seed in any::<u64>(), n in 2usize..=6, k in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<_> = (0..3).map(|_| random_prob(&mut rng, n)).collect();
        let preds: Vec<usize> = (0..3).map(|_| rng.gen_range(0..n)).collect();
        let mut scaled = mats.clone();
        let which = rng.gen_range(0..3);
        for row in &mut scaled[which] {
            for v in row {
                *v *= k;
            }
        }
        let a = fuse(&model(&mats), &preds).unwrap();
        let b = fuse(&model(&scaled), &preds).unwrap();
        prop_assert_eq!(a.class_index, b.class_index);
        for (x, y) in a.belief.iter().zip(&b.belief) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_classifier_reduces_to_column_argmax(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_prob(&mut rng, n);
        let fm = model(std::slice::from_ref(&m));
        for j in 0..n {
            let f = fuse(&fm, &[j]).unwrap();
            let col: Vec<f64> = m.iter().map(|row| row[j]).collect();
            let best = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(f.class_index, col.iter().position(|&v| v == best).unwrap());
            for (b, c) in f.belief.iter().zip(&col) {
                prop_assert!((b - c).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn classifier_order_is_irrelevant(seed in any::<u64>(), n in 2usize..=6, l in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<_> = (0..l).map(|_| random_prob(&mut rng, n)).collect();
        let preds: Vec<usize> = (0..l).map(|_| rng.gen_range(0..n)).collect();
        let mut order: Vec<usize> = (0..l).collect();
        order.shuffle(&mut rng);
        let perm_mats: Vec<_> = order.iter().map(|&i| mats[i].clone()).collect();
        let perm_preds: Vec<usize> = order.iter().map(|&i| preds[i]).collect();
        let a = fuse(&model(&mats), &preds).unwrap();
        let b = fuse(&model(&perm_mats), &perm_preds).unwrap();
        for (x, y) in a.belief.iter().zip(&b.belief) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}
