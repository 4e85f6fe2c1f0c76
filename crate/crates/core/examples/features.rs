//! Feature extraction on one 0.5 s window of synthetic EMG, plus the frame
//! count of a 30 s live trial.

use myotrain::signal::{extract_features, frame_count, SampleWindow, SAMPLE_RATE_HZ};
use myotrain::sources::{SignalSource, SyntheticProfile, SyntheticSource};
use myotrain::Gesture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut src = SyntheticSource::new(SyntheticProfile::default(), 1)?.manual();
    for g in [Gesture::Rest, Gesture::Up, Gesture::Left, Gesture::Fist] {
        src.set_class(g);
        let mut samples = vec![Vec::new(); src.channels()];
        while samples[0].len() < 963 {
            let p = src.next_packet()?.expect("synthetic source never ends");
            for (ch, s) in samples.iter_mut().zip(p.samples) {
                ch.extend(s);
            }
        }
        for ch in &mut samples {
            ch.truncate(963);
        }
        let f = extract_features(&SampleWindow::new(samples, SAMPLE_RATE_HZ)?)?;
        let fmt = |v: &[f64], prec: usize| {
            v.iter()
                .map(|x| format!("{x:7.prec$}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!("{g:<6} rms  {}", fmt(f.rms(), 3));
        println!("{:<6} mdf  {}", "", fmt(f.med_freq(), 1));
    }
    println!("30 s trial: {} frames", frame_count(30 * 1926, 963, 26));
    Ok(())
}
