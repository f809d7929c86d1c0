use majorant::harness::{verify_thm_easy, verify_thm_main, Trials};
use majorant::spaces::SpaceSpec;
use majorant::Scalar;

fn space(s: &str) -> SpaceSpec {
    s.parse().unwrap()
}

#[test]
fn windows_replay_single_trials() {
    let one = Scalar::one();
    let l1 = space("l1");
    let whole = verify_thm_main(&l1, &Scalar::int(2), &one, &one, Trials::new(12, 5));
    let tail = verify_thm_main(&l1, &Scalar::int(2), &one, &one, Trials::new(12, 5).only(7));
    assert!(whole.pass && tail.pass);
    assert_eq!(tail.trials, 1);
}

#[test]
fn easy_report_lists_parameters() {
    let report = verify_thm_easy(&space("lp:3/2"), 1.5, 2.0, 1.0, Trials::new(50, 4));
    assert!(report.pass);
    assert_eq!(report.theorem, "thm-easy");
    assert_eq!(report.params["q"], 2.0);
}
