//! Module-level invariants that run on slightly wider grids than the unit
//! tests: classification totality up to S_7 and labeling agreement up to
//! S_6.

use mahonian::verify::{run_suite, SuiteGrid};

#[test]
fn partition_is_total_up_to_s7() {
    let grid = SuiteGrid {
        n_max: 7,
        g_max: 6,
        ell_max: 6,
        r_max: 6,
    };
    for report in run_suite("partition", &grid, 9).unwrap() {
        assert!(report.pass, "{}", report.render_line());
    }
}

#[test]
fn labelings_agree_up_to_s6() {
    let grid = SuiteGrid {
        n_max: 6,
        g_max: 5,
        ell_max: 5,
        r_max: 6,
    };
    for report in run_suite("remark-4.1", &grid, 9).unwrap() {
        assert!(report.pass, "{}", report.render_line());
    }
}
