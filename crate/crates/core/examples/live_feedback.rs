//! The per-frame feedback path: raw prediction, EMA smoothing, the modified
//! display transform for several exponents, and the thresholded decision.

use myotrain::classifier::{decide, modify, EmaSmoother, ProbabilityVector};

fn show(label: &str, p: &[f64]) {
    let cells: Vec<String> = p.iter().map(|v| format!("{v:.3}")).collect();
    println!("{label:<14} [{}]", cells.join(" "));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a classifier that is fairly sure of class 2 on every frame
    let raw = ProbabilityVector::new(vec![0.05, 0.05, 0.45, 0.1, 0.05, 0.1, 0.05, 0.1, 0.05])?;
    let mut ema = EmaSmoother::new(9, 0.9)?;
    for frame in 0..40 {
        let s = ema.update(&raw)?.clone();
        if frame % 10 == 9 {
            show(&format!("smoothed @{}", frame + 1), s.as_slice());
        }
    }
    let s = ema.current().clone();
    for m in [1.0, 0.75, 0.5] {
        show(&format!("m = {m}"), modify(s.as_slice(), m)?.as_slice());
    }
    for t in [0.3, 0.5] {
        println!("threshold {t}: {}", decide(&s, t)?.outcome);
    }
    Ok(())
}
