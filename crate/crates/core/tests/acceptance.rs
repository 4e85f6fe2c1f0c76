//! One PASS/FAIL line per acceptance criterion; exits non-zero on any failure.

mod common;

use std::time::Instant;

fn main() {
    let checks: [(&str, fn() -> common::Check); 9] = [
        ("reference oracles", common::check_oracles),
        ("svm solver optimality", common::check_svm),
        ("head gradient", common::check_gradient),
        (
            "feedback modification properties",
            common::check_modify_properties,
        ),
        (
            "similarity scale invariance",
            common::check_scale_invariance,
        ),
        ("protocol conformance", common::check_protocol),
        ("end-to-end separability", common::check_end_to_end),
        ("co-adaptation", common::check_coadaptation),
        ("determinism and replay", common::check_determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let t = Instant::now();
        let secs = || t.elapsed().as_secs_f64();
        match std::panic::catch_unwind(check) {
            Ok(Ok(msg)) => println!("PASS {name} ({:.1}s): {msg}", secs()),
            Ok(Err(msg)) => {
                failed += 1;
                println!("FAIL {name} ({:.1}s): {msg}", secs());
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name} ({:.1}s): panicked", secs());
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
