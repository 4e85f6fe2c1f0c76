//! Records a synthetic stream to disk, replays it, and shows that a
//! session over the replay reproduces the original decisions exactly.

use myotrain::session::{FeedbackCondition, Session, SessionConfig};
use myotrain::sources::{RecordingTee, ReplaySource, SyntheticProfile, SyntheticSource};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("myotrain_record_replay");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("recording.emgr");
    let config = SessionConfig::with_condition(FeedbackCondition::Control);

    let live = SyntheticSource::new(SyntheticProfile::default(), 5)?;
    let mut session = Session::new(config.clone(), RecordingTee::create(live, &path)?)?;
    let (first, _) = session.run_block1()?;
    session.into_source().finish()?;
    println!(
        "recorded {} bytes to {}",
        std::fs::metadata(&path)?.len(),
        path.display()
    );

    let replay = ReplaySource::open(&path, Some(1926.0))?;
    let mut session = Session::new(config, replay)?;
    let (second, _) = session.run_block1()?;
    let same = first
        .iter()
        .zip(&second)
        .all(|(a, b)| a.features == b.features && a.decision == b.decision);
    println!("{} trials replayed, identical: {same}", second.len());
    Ok(())
}
