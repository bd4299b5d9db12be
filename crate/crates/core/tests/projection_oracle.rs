//! Genotype-specific and modified non-carrier risks against Monte-Carlo
//! cumulative incidence of simulated yearly lifetimes.

mod common;

use common::projection::check_configs;

#[test]
fn projections_match_monte_carlo() {
    let params = common::params();
    let failures = check_configs(&params, 0x5eed + 1);
    assert!(failures.is_empty(), "{failures:#?}");
}
