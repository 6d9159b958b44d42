//! Runs every verify group (quick budgets) and checks each outcome.
//!
//! Exactly one check is expected to fail: the strict theta-oracle
//! equality-in-law comparison, which gates a conditional-independence
//! resampling that is exact only to leading order (see the check's detail
//! string and the criterion-07 notes in the acceptance suite). Everything
//! else must pass.

use kakutani_core::harness::DEFAULT_SEED;
use kakutani_core::verify::{self, VerifyConfig};

const EXPECTED_FAILURE: &str = "theta-oracle K vs direct K (two-sample KS; strict law equality)";

#[test]
fn all_groups_pass_except_the_known_law_gap() {
    let cfg = VerifyConfig { seed: DEFAULT_SEED, threads: 0, quick: true };
    let results = verify::run_all(&cfg);
    assert!(results.len() > 50, "expected a full sweep, got {}", results.len());
    let mut saw_expected_failure = false;
    for check in &results {
        if check.name == EXPECTED_FAILURE {
            saw_expected_failure = true;
            assert!(
                !check.passed,
                "the strict law-equality check unexpectedly passed: {}",
                check.detail
            );
            continue;
        }
        assert!(
            check.passed,
            "{} :: {} failed ({})",
            check.group, check.name, check.detail
        );
    }
    assert!(saw_expected_failure, "strict law-equality check missing from the sweep");
}
