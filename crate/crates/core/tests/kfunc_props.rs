use majorant::gen::{k_dominated_pair, trial_rng};
use majorant::kfunc::{k_dominates, k_l1_linf, k_l1_lq, Couple};
use majorant::{Scalar, Seq};
use proptest::prelude::*;

fn exact_seq(max_len: usize) -> impl Strategy<Value = Seq> {
    prop::collection::vec((-20i64..=20, 1i64..=4), 1..=max_len)
        .prop_map(|v| Seq::new(v.into_iter().map(|(n, d)| Scalar::ratio(n, d)).collect()))
}

fn l1(x: &Seq) -> Scalar {
    x.abs().values().iter().sum()
}

proptest! {
    #[test]
    fn l1_linf_is_concave_nondecreasing_and_saturates(x in exact_seq(12)) {
        let ts: Vec<Scalar> = (0..=4 * (x.len() as i64 + 2)).map(|k| Scalar::ratio(k, 4)).collect();
        let ks: Vec<Scalar> = ts.iter().map(|t| k_l1_linf(t, &x)).collect();
        prop_assert!(ks[0].is_zero());
        for w in ks.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        // Equal spacing, so concavity is a statement about second differences.
        for w in ks.windows(3) {
            prop_assert!(&w[1] - &w[0] >= &w[2] - &w[1]);
        }
        let support = Scalar::from_index(x.support_len());
        prop_assert_eq!(k_l1_linf(&support, &x), l1(&x));
        prop_assert_eq!(k_l1_linf(&(support + Scalar::int(3)), &x), l1(&x));
    }

    #[test]
    fn l1_lq_certificate_brackets_and_is_monotone(x in exact_seq(10), q in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let mut previous = 0.0;
        for k in -6..=6 {
            let t = 2f64.powi(k);
            let est = k_l1_lq(t, &x, q, 1e-12).unwrap();
            let (lo, hi) = est.certified();
            prop_assert!(lo <= est.value + 1e-9 && est.value <= hi + 1e-9);
            prop_assert!(est.value + 1e-9 >= previous);
            prop_assert!(est.value <= l1(&x).to_f64() + 1e-9);
            previous = est.value;
        }
    }

    #[test]
    fn contraction_images_are_k_dominated(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let (x, y, _) = k_dominated_pair(&mut rng, 12, true);
        prop_assert!(k_dominates(&x, &y, &Couple::L1Linf, None).holds());
        let grid: Vec<f64> = (-4..=4).map(|k| 2f64.powi(k)).collect();
        prop_assert!(k_dominates(&x, &y, &Couple::L1Lq(2.0), Some(&grid)).holds());
    }
}

#[test]
fn larger_target_is_not_dominated() {
    let x = Seq::from_ints(&[1, 1]);
    let y = Seq::from_ints(&[3]);
    assert!(!k_dominates(&x, &y, &Couple::L1Linf, None).holds());
}
