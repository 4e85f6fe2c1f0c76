//! Fits the full model (standardizer, 36 pairwise SVMs, softmax head) on
//! synthetic calibration windows and scores it on fresh ones.

use myotrain::classifier::{decide, train_full, GestureModel, ModelConfig, Outcome};
use myotrain::signal::{extract_features, FeatureVector, SampleWindow, SAMPLE_RATE_HZ};
use myotrain::sources::{SignalSource, SyntheticProfile, SyntheticSource};
use myotrain::Gesture;

fn windows(
    src: &mut SyntheticSource,
    reps: usize,
) -> Result<(Vec<FeatureVector>, Vec<Gesture>), Box<dyn std::error::Error>> {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for _ in 0..reps {
        for g in Gesture::ALL {
            src.set_class(g);
            let mut samples = vec![Vec::new(); src.channels()];
            while samples[0].len() < 963 {
                for (ch, s) in samples.iter_mut().zip(src.next_packet()?.unwrap().samples) {
                    ch.extend(s);
                }
            }
            samples.iter_mut().for_each(|c| c.truncate(963));
            x.push(extract_features(&SampleWindow::new(
                samples,
                SAMPLE_RATE_HZ,
            )?)?);
            y.push(g);
        }
    }
    Ok((x, y))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = SyntheticProfile {
        jitter: 0.3,
        ..SyntheticProfile::default()
    };
    let mut src = SyntheticSource::new(profile, 7)?.manual();
    let (x, y) = windows(&mut src, 5)?;
    let model = train_full(&x, &y, &ModelConfig::with_seed(7))?;
    println!(
        "trained on {} windows; head loss {:.3} -> {:.3}",
        model.metadata.samples, model.metadata.initial_loss, model.metadata.final_loss
    );

    let (tx, ty) = windows(&mut src, 3)?;
    let mut correct = 0;
    for (f, g) in tx.iter().zip(&ty) {
        let d = decide(&model.predict(f)?, 0.5)?;
        correct += (d.outcome == Outcome::Label(*g)) as usize;
    }
    println!("held-out accuracy {:.3}", correct as f64 / tx.len() as f64);

    let path = std::env::temp_dir().join("myotrain_model.json");
    model.save(&path)?;
    let back = GestureModel::load(&path)?;
    assert_eq!(back.predict(&tx[0])?, model.predict(&tx[0])?);
    println!("saved and reloaded {}", path.display());
    Ok(())
}
