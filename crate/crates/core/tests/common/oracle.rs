//! Direct-evaluation reference implementations, written independently of
//! the library code they check.

use myotrain::Gesture;

pub fn rms(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for v in x {
        s += v * v;
    }
    (s / x.len() as f64).sqrt()
}

/// Naive O(n²) DFT power, one-sided, mean removed, interior bins doubled.
pub fn periodogram(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * (k * t % n) as f64 / n as f64;
                re += (v - mean) * phase.cos();
                im += (v - mean) * phase.sin();
            }
            let p = (re * re + im * im) / (n * n) as f64;
            if k == 0 || (n % 2 == 0 && k == n / 2) {
                p
            } else {
                2.0 * p
            }
        })
        .collect()
}

/// Half-power frequency by bisection on the piecewise-linear cumulative
/// spectrum (each bin spread over its own width).
pub fn median_frequency(x: &[f64], fs: f64) -> f64 {
    let p = periodogram(x);
    let n = x.len();
    let df = fs / n as f64;
    let cdf = |f: f64| -> f64 {
        let mut c = 0.0;
        for (k, pk) in p.iter().enumerate() {
            let lo = (k as f64 * df - df / 2.0).max(0.0);
            let hi = (k as f64 * df + df / 2.0).min(fs / 2.0);
            if hi <= lo {
                continue;
            }
            c += pk * ((f - lo) / (hi - lo)).clamp(0.0, 1.0);
        }
        c
    };
    let half = p.iter().sum::<f64>() / 2.0;
    let (mut a, mut b) = (0.0, fs / 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if cdf(mid) < half {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

pub fn rbf(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let mut d = 0.0;
    for i in 0..x.len() {
        d += (x[i] - y[i]).powi(2);
    }
    (-gamma * d).exp()
}

fn sqd(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `1 / median` over distinct unordered pairs.
pub fn median_heuristic(points: &[Vec<f64>]) -> f64 {
    let mut d = Vec::new();
    for i in 0..points.len() {
        for j in 0..i {
            d.push(sqd(&points[i], &points[j]));
        }
    }
    d.sort_by(f64::total_cmp);
    let n = d.len();
    let med = if n % 2 == 1 {
        d[n / 2]
    } else {
        (d[n / 2 - 1] + d[n / 2]) / 2.0
    };
    1.0 / med
}

/// Mean pairwise kernel between class members, then min-max over the lower
/// triangle. Rows follow canonical order of the classes present.
pub fn class_similarity(points: &[Vec<f64>], labels: &[Gesture], gamma: f64) -> Vec<Vec<f64>> {
    let classes: Vec<Gesture> = Gesture::ALL
        .into_iter()
        .filter(|g| labels.contains(g))
        .collect();
    let n = classes.len();
    let mut raw = vec![vec![0.0; n]; n];
    for (i, a) in classes.iter().enumerate() {
        for (j, b) in classes.iter().enumerate() {
            let (mut s, mut c) = (0.0, 0.0);
            for (p, la) in points.iter().zip(labels) {
                for (q, lb) in points.iter().zip(labels) {
                    if la == a && lb == b {
                        s += rbf(p, q, gamma);
                        c += 1.0;
                    }
                }
            }
            raw[i][j] = s / c;
        }
    }
    let tri: Vec<f64> = (0..n)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .map(|(i, j)| raw[i][j])
        .collect();
    let lo = tri.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tri.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    raw.iter()
        .map(|r| {
            r.iter()
                .map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 1.0 })
                .collect()
        })
        .collect()
}

pub fn separation(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let within: f64 = (0..n).map(|i| d[i][i]).sum::<f64>() / n as f64;
    let mut between = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                between.push(d[i][j]);
            }
        }
    }
    let b = between.iter().sum::<f64>() / between.len() as f64;
    within / b.max(1e-9)
}

pub fn ema(prev: &[f64], raw: &[f64], lambda: f64) -> Vec<f64> {
    prev.iter()
        .zip(raw)
        .map(|(p, r)| lambda * p + (1.0 - lambda) * r)
        .collect()
}

pub fn modify(p: &[f64], m: f64) -> Vec<f64> {
    let w: Vec<f64> = p
        .iter()
        .map(|v| if *v == 0.0 { 0.0 } else { (m * v.ln()).exp() })
        .collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

pub fn entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|v| **v > 0.0)
        .map(|v| v * v.ln())
        .sum::<f64>()
}

/// Mean cross-entropy of `softmax(W s + c)`, straight from the definition.
pub fn cross_entropy(w: &[Vec<f64>], c: &[f64], latents: &[Vec<f64>], labels: &[usize]) -> f64 {
    let mut total = 0.0;
    for (s, &y) in latents.iter().zip(labels) {
        let z: Vec<f64> = w
            .iter()
            .zip(c)
            .map(|(row, b)| row.iter().zip(s).map(|(a, x)| a * x).sum::<f64>() + b)
            .collect();
        let denom: f64 = z.iter().map(|v| v.exp()).sum();
        total -= (z[y].exp() / denom).ln();
    }
    total / latents.len() as f64
}

/// Soft-margin primal `½‖w‖² + C Σ max(0, 1 − y(w·x − b))`.
pub fn svm_objective(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64], c: f64) -> f64 {
    let reg: f64 = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * (w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b)).max(0.0))
        .sum();
    reg + c * hinge
}

/// Hinge objective minimised over the bias, which for fixed `w` is
/// attained at one of the points where some hinge term kinks.
fn best_over_bias(w: &[f64], xs: &[Vec<f64>], ys: &[f64], c: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| {
            let b = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - y;
            svm_objective(w, b, xs, ys, c)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Coarse-to-fine search over `w`; the reduced objective is convex in `w`.
pub fn svm_grid_search(xs: &[Vec<f64>], ys: &[f64], c: f64) -> f64 {
    let mut centre = [0.0, 0.0];
    let mut half = 16.0;
    let steps = 60;
    let mut best = f64::INFINITY;
    for _ in 0..40 {
        let mut arg = centre;
        for i in 0..=steps {
            let w0 = centre[0] - half + 2.0 * half * i as f64 / steps as f64;
            for j in 0..=steps {
                let w1 = centre[1] - half + 2.0 * half * j as f64 / steps as f64;
                let o = best_over_bias(&[w0, w1], xs, ys, c);
                if o < best {
                    best = o;
                    arg = [w0, w1];
                }
            }
        }
        centre = arg;
        half *= 0.5;
    }
    best
}
