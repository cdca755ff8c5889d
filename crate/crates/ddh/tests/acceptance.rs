//! One line per acceptance criterion; exits non-zero on an unexpected result.
//!
//! Criterion 6 asks the 10-symbol sphere decoder to sit 5x below the Case III
//! error floor at 40 dB. Its own union bound is only about 3.9x below the
//! floor there, and simulation lands near 2.4x, so the criterion is reported
//! as failing rather than asserted.

use std::process::ExitCode;

use ddh::validate::{run_criterion, ValidationConfig};

const KNOWN_SHORTFALLS: [u8; 1] = [6];

fn main() -> ExitCode {
    let cfg = ValidationConfig::default();
    let mut unexpected = Vec::new();
    for id in 1..=10u8 {
        let report = run_criterion(id, &cfg);
        println!("{report}");
        let expected_fail = KNOWN_SHORTFALLS.contains(&id);
        if report.passed == expected_fail {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected (known shortfall: 6)");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
