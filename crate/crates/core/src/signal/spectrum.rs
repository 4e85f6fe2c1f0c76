use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::SignalError;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Root-mean-square amplitude.
pub fn rms(x: &[f64]) -> Result<f64, SignalError> {
    if x.is_empty() {
        return Err(SignalError::EmptyInput);
    }
    let sum_sq: f64 = x.iter().map(|v| v * v).sum();
    Ok((sum_sq / x.len() as f64).sqrt())
}

/// One-sided periodogram of the mean-removed signal, bins `0..=N/2`.
///
/// Bin `k` sits at `k * sample_rate / N`. Interior bins are doubled so the
/// bins sum to the signal's mean-removed power.
pub fn periodogram(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));

    let half = n / 2;
    let scale = 1.0 / (n as f64 * n as f64);
    (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() * scale;
            let nyquist = n % 2 == 0 && k == half;
            if k == 0 || nyquist {
                p
            } else {
                2.0 * p
            }
        })
        .collect()
}

/// Frequency splitting the periodogram into two halves of equal power.
///
/// Each bin is treated as uniform power over `[f_k - df/2, f_k + df/2]`
/// (clipped to `[0, fs/2]`) and the crossing point is interpolated linearly
/// inside the bin where cumulative power reaches half the total.
pub fn median_frequency(x: &[f64], sample_rate: f64) -> Result<f64, SignalError> {
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        return Err(SignalError::InvalidSampleRate(sample_rate));
    }
    if x.len() < 4 {
        return Err(SignalError::TooShort {
            len: x.len(),
            min: 4,
        });
    }
    let power = periodogram(x);
    let total: f64 = power.iter().sum();
    let raw_power = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    // rounding residue from mean removal of a constant signal
    if !(total > 1e-24 * raw_power) {
        return Err(SignalError::DegenerateSpectrum);
    }
    median_of_power(&power, x.len(), sample_rate)
}

pub(crate) fn median_of_power(
    power: &[f64],
    n: usize,
    sample_rate: f64,
) -> Result<f64, SignalError> {
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return Err(SignalError::DegenerateSpectrum);
    }
    let df = sample_rate / n as f64;
    let nyquist = sample_rate / 2.0;
    let target = total / 2.0;

    let mut cum = 0.0;
    for (k, &p) in power.iter().enumerate() {
        if p > 0.0 && cum + p >= target {
            let centre = k as f64 * df;
            let lo = (centre - df / 2.0).max(0.0);
            let hi = (centre + df / 2.0).min(nyquist);
            let frac = ((target - cum) / p).clamp(0.0, 1.0);
            return Ok(lo + frac * (hi - lo));
        }
        cum += p;
    }
    // unreachable for finite positive totals, kept for rounding safety
    Ok(nyquist)
}
