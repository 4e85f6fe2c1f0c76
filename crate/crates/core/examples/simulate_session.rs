//! Runs the full protocol headless against a synthetic subject and prints
//! the analysis.
//!
//! ```sh
//! cargo run --release --example simulate_session -- modified 3
//! ```

use myotrain::metrics::analyze;
use myotrain::session::{FeedbackCondition, ScriptedSubject, Session, SessionConfig, SharedLog};
use myotrain::sources::{SyntheticProfile, SyntheticSource};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let condition = match args.next().as_deref() {
        Some("control") => FeedbackCondition::Control,
        Some("veridical") | None => FeedbackCondition::Veridical,
        Some("modified") => FeedbackCondition::Modified,
        Some(other) => return Err(format!("unknown condition `{other}`").into()),
    };
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let profile = SyntheticProfile::coadaptive();
    let mut config = SessionConfig::with_condition(condition);
    config.seed = seed;
    config.model.head.seed = seed;

    let log = SharedLog::without_frames();
    let source = SyntheticSource::new(profile, seed)?;
    let started = std::time::Instant::now();
    let mut session = Session::new(config, source)?.with_sink(log.clone());
    let outcome = session.run(&mut ScriptedSubject::new(seed))?;
    println!(
        "{} trials in {:.1?}",
        outcome.records.len(),
        started.elapsed()
    );

    let report = analyze(&log.entries())?;
    for b in &report.blocks {
        println!(
            "block {}: {} trials, accuracy {:?}",
            b.block, b.trials, b.accuracy
        );
    }
    let d = &report.baseline;
    println!(
        "acc baseline {:.3} free {:.3} (delta {:+.3}); d_sep baseline {:.3} free {:.3} (delta {:+.3})",
        d.acc_baseline, d.acc_free, d.d_acc, d.dsep_baseline, d.dsep_free, d.d_dsep
    );
    Ok(())
}
