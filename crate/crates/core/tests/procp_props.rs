use majorant::gen::{k_dominated_pair, procp_pair, trial_rng};
use majorant::procp::{
    compute_regions, procedure_p, split_functions, theorem_main_pipeline, verify_decomposition,
    verify_phis_psis, PipelineConfig,
};
use majorant::spaces::{SequenceNorm, SpaceSpec};
use majorant::{Scalar, Seq};
use proptest::prelude::*;

fn spaces() -> Vec<SpaceSpec> {
    ["l1", "lp:3/2", "weak-lp:6/5"].iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn pipeline_bound_holds_on_contraction_images() {
    let owned = spaces();
    let refs: Vec<&dyn SequenceNorm> = owned.iter().map(|s| s as &dyn SequenceNorm).collect();
    let config = PipelineConfig::default();
    for trial in 0..60u64 {
        let mut rng = trial_rng(2024, trial);
        let (x, y, _) = k_dominated_pair(&mut rng, 12, trial % 3 != 0);
        let outcome = theorem_main_pipeline(&x, &y, &config, &refs).unwrap();
        assert!(outcome.bound_holds, "trial {trial}: {:?}", outcome.norms);
        assert_eq!(outcome.norms.len(), 3);
        assert_eq!(outcome.certificate.is_none(), y.is_zero());
    }
}

#[test]
fn zero_target_needs_no_certificate() {
    let l1: SpaceSpec = "l1".parse().unwrap();
    let x = Seq::from_ints(&[2, 1]);
    let outcome = theorem_main_pipeline(&x, &Seq::zeros(2), &PipelineConfig::default(), &[&l1]).unwrap();
    assert!(outcome.bound_holds && outcome.certificate.is_none());
}

#[test]
fn pipeline_rejects_bad_constants() {
    let l1: SpaceSpec = "l1".parse().unwrap();
    let x = Seq::from_ints(&[1]);
    let config = PipelineConfig { c1: Scalar::ratio(1, 2), ..PipelineConfig::default() };
    assert!(theorem_main_pipeline(&x, &x, &config, &[&l1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn procedure_decomposes_generated_pairs(seed in any::<u64>(), q in 2u32..=3) {
        let mut rng = trial_rng(seed, 0);
        let (f, g) = procp_pair(&mut rng, 32, q);
        let regions = compute_regions(&f, &g, &Scalar::int(i64::from(q))).unwrap();
        let decomp = procedure_p(&regions).unwrap();
        prop_assert!(!decomp.steps.is_empty() || regions.b_only().is_empty());
        verify_decomposition(&regions, &decomp).unwrap();
        let split = split_functions(&regions, &decomp).unwrap();
        verify_phis_psis(&split).unwrap();
    }
}
