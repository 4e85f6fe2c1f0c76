//! Shared fixtures and the checks behind the acceptance report.
//!
//! Every `check_*` returns a one-line summary on success and the reason on
//! failure, so both the acceptance runner and ordinary tests can use them.
#![allow(dead_code)]

pub mod oracle;

use std::collections::HashMap;
use std::path::Path;

use myotrain::classifier::{
    decide, ema_smooth, modify, train_full, train_ovo, ModelConfig, Outcome, ProbabilityVector,
    SoftmaxHead, SolverConfig,
};
use myotrain::gateway::{run_persisted, SessionDir};
use myotrain::metrics::{
    analyze, class_similarity, median_heuristic, rbf, separation, AnalysisReport, PairSet,
    SimilarityMatrix,
};
use myotrain::session::{
    apply_gesture, read_log, records, replay_games, FeedbackCondition, LogEntry, MoveEffect,
    ScriptedSubject, Session, SessionConfig, SessionControl, SessionEvent, SharedLog,
};
use myotrain::signal::{median_frequency, rms, FeatureVector, SAMPLE_RATE_HZ};
use myotrain::sources::{ReplaySource, SyntheticProfile, SyntheticSource};
use myotrain::Gesture;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

pub type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

fn random_simplex(r: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| Exp1.sample(r)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn random_points(r: &mut ChaCha8Rng, n: usize, dim: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| scale * normal(r)).collect())
        .collect()
}

/// Labels covering at least two classes.
fn random_labels(r: &mut ChaCha8Rng, n: usize) -> Vec<Gesture> {
    loop {
        let k = r.random_range(2..=9);
        let l: Vec<Gesture> = (0..n).map(|_| Gesture::ALL[r.random_range(0..k)]).collect();
        if l.iter().any(|g| *g != l[0]) {
            return l;
        }
    }
}

fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn check_oracles() -> Check {
    let mut r = rng(2024);
    let n = 120;
    let mut worst = HashMap::new();
    let mut note = |name: &'static str, err: f64| {
        let e = worst.entry(name).or_insert(0.0f64);
        *e = e.max(err);
    };
    for _ in 0..n {
        let len = r.random_range(4..200);
        let x: Vec<f64> = (0..len).map(|_| normal(&mut r) + 0.3).collect();
        note("rms", (rms(&x).unwrap() - oracle::rms(&x)).abs());
        let mf = median_frequency(&x, SAMPLE_RATE_HZ).unwrap();
        note(
            "median_frequency",
            (mf - oracle::median_frequency(&x, SAMPLE_RATE_HZ)).abs(),
        );

        let dim = r.random_range(1..6);
        let (np, scale) = (r.random_range(4..14), r.random_range(0.1..5.0));
        let pts = random_points(&mut r, np, dim, scale);
        let gamma = r.random_range(0.01..3.0);
        note(
            "rbf",
            (rbf(&pts[0], &pts[1], gamma).unwrap() - oracle::rbf(&pts[0], &pts[1], gamma)).abs(),
        );
        let mh = median_heuristic(&pts, PairSet::Distinct).unwrap();
        let mo = oracle::median_heuristic(&pts);
        note("median_heuristic", (mh - mo).abs() / mo);
        let labels = random_labels(&mut r, pts.len());
        let d = class_similarity(&pts, &labels, gamma).unwrap();
        note(
            "class_similarity",
            max_abs_diff(&d.values, &oracle::class_similarity(&pts, &labels, gamma)),
        );
        if d.size() >= 2 {
            let o = oracle::separation(&d.values);
            note(
                "separation",
                (separation(&d).unwrap() - o).abs() / o.abs().max(1.0),
            );
        }

        let prev = random_simplex(&mut r, 9);
        let raw = random_simplex(&mut r, 9);
        let lambda = r.random_range(0.0..1.0);
        let e = ema_smooth(
            &ProbabilityVector::new(prev.clone()).unwrap(),
            &ProbabilityVector::new(raw.clone()).unwrap(),
            lambda,
        )
        .unwrap();
        note(
            "ema_smooth",
            max_abs_diff(
                &[e.as_slice().to_vec()],
                &[oracle::ema(&prev, &raw, lambda)],
            ),
        );
        let m = r.random_range(0.2..2.0);
        let md = modify(&raw, m).unwrap();
        note(
            "modify",
            max_abs_diff(&[md.as_slice().to_vec()], &[oracle::modify(&raw, m)]),
        );
    }
    let limits = [
        ("rms", 1e-9),
        ("median_frequency", 1e-3),
        ("rbf", 1e-9),
        ("median_heuristic", 1e-9),
        ("class_similarity", 1e-9),
        ("separation", 1e-9),
        ("ema_smooth", 1e-9),
        ("modify", 1e-9),
    ];
    let mut parts = Vec::new();
    for (name, tol) in limits {
        let w = *worst.get(name).ok_or(format!("{name} never evaluated"))?;
        ensure(w <= tol, || {
            format!("{name}: worst error {w:.3e} > {tol:e}")
        })?;
        parts.push(format!("{name} {w:.1e}"));
    }
    Ok(format!(
        "{n} instances each, worst errors: {}",
        parts.join(", ")
    ))
}

pub fn check_svm() -> Check {
    let solver = SolverConfig::default();
    // two points at ±1: the maximum-margin separator is w = 1, b = 0
    let pos = [1.0];
    let neg = [-1.0];
    let s = train_ovo(&[&pos, &neg], &[0, 1], (0, 1), 1.0, &solver).map_err(|e| e.to_string())?;
    ensure(
        (s.svm.w[0] - 1.0).abs() < 1e-12 && s.svm.b.abs() < 1e-12,
        || format!("two-point fixture gave w = {:?}, b = {}", s.svm.w, s.svm.b),
    )?;

    let mut r = rng(77);
    let mut worst: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    let mut worst_violation: f64 = 0.0;
    let instances = 40;
    for _ in 0..instances {
        let n = r.random_range(2..=4);
        let xs = random_points(&mut r, n, 2, 1.5);
        let mut ys: Vec<usize> = (0..n).map(|_| r.random_range(0..2)).collect();
        ys[0] = 0;
        ys[1] = 1;
        let c = [0.1, 1.0, 5.0][r.random_range(0..3)];
        let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let sol = train_ovo(&refs, &ys, (0, 1), c, &solver).map_err(|e| e.to_string())?;
        let signs: Vec<f64> = ys
            .iter()
            .map(|&y| if y == 0 { 1.0 } else { -1.0 })
            .collect();
        let obj = oracle::svm_objective(&sol.svm.w, sol.svm.b, &xs, &signs, c);
        let grid = oracle::svm_grid_search(&xs, &signs, c);
        ensure(obj <= grid + 1e-9, || {
            format!("solver objective {obj} above grid optimum {grid}")
        })?;
        worst = worst.max(grid - obj);
        for ((x, y), xi) in xs.iter().zip(&signs).zip(&sol.slack) {
            min_slack = min_slack.min(*xi);
            worst_violation = worst_violation.max(1.0 - xi - y * sol.svm.margin(x));
        }
    }
    ensure(worst < 1e-3, || {
        format!("grid objective differs by {worst:.2e}")
    })?;
    ensure(min_slack >= -1e-9, || {
        format!("negative slack {min_slack:e}")
    })?;
    ensure(worst_violation <= 1e-9, || {
        format!("margin constraint violated by {worst_violation:e}")
    })?;
    Ok(format!(
        "2-point fixture exact; {instances} grid instances within {worst:.1e}; min slack {min_slack:.1e}"
    ))
}

pub fn check_gradient() -> Check {
    let mut r = rng(5);
    let (classes, dim, n) = (3, 4, 12);
    let head = SoftmaxHead::random(classes, dim, &mut r);
    let latents = random_points(&mut r, n, dim, 1.0);
    let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let refs: Vec<&[f64]> = latents.iter().map(Vec::as_slice).collect();
    let (_, grad) = head.loss_and_gradient(&refs, &labels);
    let h = 1e-5;
    let mut num = Vec::new();
    let mut ana = Vec::new();
    for k in 0..classes {
        for j in 0..=dim {
            let eval = |delta: f64| {
                let mut w = head.weights.clone();
                let mut c = head.bias.clone();
                if j < dim {
                    w[k][j] += delta;
                } else {
                    c[k] += delta;
                }
                oracle::cross_entropy(&w, &c, &latents, &labels)
            };
            num.push((eval(h) - eval(-h)) / (2.0 * h));
            ana.push(if j < dim {
                grad.weights[k][j]
            } else {
                grad.bias[k]
            });
        }
    }
    let diff: f64 = num
        .iter()
        .zip(&ana)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = ana.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rel = diff / norm;
    ensure(rel < 1e-4, || format!("relative gradient error {rel:.2e}"))?;
    Ok(format!(
        "relative error {rel:.1e} over {} parameters",
        ana.len()
    ))
}

pub fn check_modify_properties() -> Check {
    let mut r = rng(9);
    let mut composition: f64 = 0.0;
    let points: Vec<Vec<f64>> = (0..1000).map(|_| random_simplex(&mut r, 9)).collect();
    for m in [0.5, 0.75, 0.9] {
        for p in &points {
            let pv = ProbabilityVector::new(p.clone()).unwrap();
            let q = modify(p, m).unwrap();
            ensure(q.argmax() == pv.argmax(), || {
                format!("argmax moved for m = {m}")
            })?;
            ensure(
                oracle::entropy(q.as_slice()) >= oracle::entropy(p) - 1e-12,
                || format!("entropy decreased for m = {m}"),
            )?;
            let m2 = 0.8;
            let twice = modify(q.as_slice(), m2).unwrap();
            let once = modify(p, m * m2).unwrap();
            composition = composition.max(max_abs_diff(
                &[twice.as_slice().to_vec()],
                &[once.as_slice().to_vec()],
            ));
        }
        let u = ProbabilityVector::uniform(9);
        let mu = modify(u.as_slice(), m).unwrap();
        ensure(mu == u, || {
            format!("uniform not fixed for m = {m}: {:?}", mu.as_slice())
        })?;
    }
    ensure(composition <= 1e-12, || {
        format!("composition error {composition:.2e}")
    })?;
    Ok(format!(
        "3000 cases: argmax and entropy 100%, composition {composition:.1e}, uniform exact"
    ))
}

pub fn check_scale_invariance() -> Check {
    let mut r = rng(31);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let pts = random_points(&mut r, 30, 16, 1.0);
        let labels: Vec<Gesture> = (0..30).map(|i| Gesture::ALL[i % 9]).collect();
        let sim = |s: f64| -> SimilarityMatrix {
            let scaled: Vec<Vec<f64>> = pts
                .iter()
                .map(|p| p.iter().map(|v| v * s).collect())
                .collect();
            let g = median_heuristic(&scaled, PairSet::Distinct).unwrap();
            class_similarity(&scaled, &labels, g).unwrap()
        };
        let base = sim(1.0);
        for s in [1e-3, 1e3] {
            worst = worst.max(max_abs_diff(&base.values, &sim(s).values));
        }
    }
    ensure(worst <= 1e-9, || format!("matrices differ by {worst:.2e}"))?;
    Ok(format!(
        "20 datasets × s ∈ {{1e-3, 1, 1e3}}: max difference {worst:.1e}"
    ))
}

/// One persisted synthetic session.
pub fn persisted_session(
    dir: &Path,
    condition: FeedbackCondition,
    profile: SyntheticProfile,
    seed: u64,
) -> Result<AnalysisReport, String> {
    let mut config = SessionConfig::with_condition(condition);
    config.seed = seed;
    config.model.head.seed = seed;
    let source = SyntheticSource::new(profile, seed).map_err(|e| e.to_string())?;
    let sd = SessionDir::create(dir).map_err(|e| e.to_string())?;
    let (_, report) = run_persisted(
        &config,
        source,
        &format!("synthetic:{seed}"),
        &sd,
        &mut ScriptedSubject::new(seed),
        SessionControl::new(),
        Vec::new(),
    )
    .map_err(|e| e.to_string())?;
    Ok(report)
}

/// In-memory session without live frames.
pub fn quick_session(
    config: SessionConfig,
    profile: SyntheticProfile,
    seed: u64,
) -> Result<Vec<LogEntry>, String> {
    let log = SharedLog::without_frames();
    let source = SyntheticSource::new(profile, seed).map_err(|e| e.to_string())?;
    let mut s = Session::new(config, source)
        .map_err(|e| e.to_string())?
        .with_sink(log.clone());
    s.run(&mut ScriptedSubject::new(seed))
        .map_err(|e| e.to_string())?;
    Ok(log.entries())
}

pub fn check_protocol() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    persisted_session(
        tmp.path(),
        FeedbackCondition::Modified,
        SyntheticProfile::coadaptive(),
        0,
    )?;
    // from here on only the files are consulted
    let entries = read_log(tmp.path().join("trials.jsonl")).map_err(|e| e.to_string())?;
    let recs = records(&entries);
    let block = |b: u8| recs.iter().filter(|r| r.block == b).collect::<Vec<_>>();

    let b1 = block(1);
    ensure(b1.len() == 48 && b1.iter().all(|r| !r.aborted), || {
        format!("block 1 has {} trials", b1.len())
    })?;
    for g in Gesture::ALL {
        let want = if g == Gesture::Rest { 8 } else { 5 };
        let got = b1.iter().filter(|r| r.intended == g).count();
        ensure(got == want, || {
            format!("block 1 has {got} {g} trials, want {want}")
        })?;
    }

    let b2 = block(2);
    ensure(b2.len() == 24, || {
        format!("block 2 has {} trials", b2.len())
    })?;
    for g in Gesture::ACTIVE {
        let got = b2.iter().filter(|r| r.intended == g).count();
        ensure(got == 3, || format!("block 2 instructs {g} {got} times"))?;
    }
    let games: std::collections::BTreeSet<_> = b2.iter().filter_map(|r| r.game).collect();
    ensure(games.len() == 4, || {
        format!("block 2 spans {} games", games.len())
    })?;

    let retrain = entries
        .iter()
        .find_map(|e| match &e.event {
            SessionEvent::ModelTrained { block: 2, model } => Some(model.metadata.samples),
            _ => None,
        })
        .ok_or("no block-2 model in log")?;
    ensure(retrain == 72, || {
        format!("retrain set has {retrain} samples")
    })?;

    let b3 = block(3);
    ensure(b3.len() == 8, || format!("block 3 has {} trials", b3.len()))?;
    let mut frame_counts = Vec::new();
    for r in &b3 {
        let n = entries
            .iter()
            .filter(|e| matches!(&e.event, SessionEvent::ProbabilityFrame(f) if f.block == 3 && f.trial == r.trial))
            .count();
        ensure((n as i64 - 2186).abs() <= 1 && r.frames == Some(n), || {
            format!(
                "block-3 trial {} has {n} frames (record says {:?})",
                r.trial, r.frames
            )
        })?;
        frame_counts.push(n);
    }

    replay_games(&entries).map_err(|e| format!("game replay: {e}"))?;
    let mut state = None;
    let (mut moved, mut still) = (0, 0);
    for e in &entries {
        match &e.event {
            SessionEvent::GameSnapshot {
                block: 4,
                trial: None,
                state: s,
                ..
            } => state = Some(*s),
            SessionEvent::TrialResult(r) if r.block == 4 => {
                let before = state.ok_or("block-4 trial before any game")?;
                let outcome = r.outcome().ok_or("block-4 trial without decision")?;
                let expected = match outcome {
                    Outcome::NoClass => before,
                    Outcome::Label(g) => apply_gesture(&before, g).0,
                };
                state = Some(expected);
                let changed = expected != before;
                ensure(
                    changed == (r.game_move == Some(MoveEffect::Applied)),
                    || {
                        format!(
                            "block-4 trial {} move flag disagrees with the state",
                            r.trial
                        )
                    },
                )?;
                ensure(!(outcome == Outcome::NoClass && changed), || {
                    "NoClass moved the avatar".into()
                })?;
                if changed {
                    moved += 1;
                } else {
                    still += 1;
                }
            }
            SessionEvent::GameSnapshot {
                block: 4,
                trial: Some(_),
                state: s,
                ..
            } => {
                ensure(Some(*s) == state, || {
                    "logged snapshot differs from replayed state".into()
                })?;
            }
            _ => {}
        }
    }
    let nc = block(4)
        .iter()
        .filter(|r| r.outcome() == Some(Outcome::NoClass))
        .count();
    Ok(format!(
        "48 / 24 (3 per gesture) / retrain 72 / block-3 frames {:?} / block 4: {moved} moves, {still} no-ops ({nc} NoClass)",
        frame_counts
    ))
}

/// Forced-choice accuracy of a block-1 model on 90 fresh calibration trials.
fn chance_accuracy(profile: &SyntheticProfile, seed: u64) -> Result<(f64, f64), String> {
    let mut cfg = SessionConfig::with_condition(FeedbackCondition::Control);
    cfg.seed = seed;
    let source = SyntheticSource::new(profile.clone(), seed).map_err(|e| e.to_string())?;
    let (train, _) = Session::new(cfg.clone(), source)
        .and_then(|mut s| s.run_block1())
        .map_err(|e| e.to_string())?;
    let x: Vec<FeatureVector> = train.iter().map(|r| r.features.clone().unwrap()).collect();
    let y: Vec<Gesture> = train.iter().map(|r| r.intended).collect();
    let model = train_full(&x, &y, &ModelConfig::with_seed(seed)).map_err(|e| e.to_string())?;

    cfg.block1_repetitions = 10;
    cfg.block1_rest = 10;
    cfg.seed = seed + 1000;
    let source = SyntheticSource::new(profile.clone(), seed + 1000).map_err(|e| e.to_string())?;
    let (test, _) = Session::new(cfg, source)
        .and_then(|mut s| s.run_block1())
        .map_err(|e| e.to_string())?;
    let (mut forced, mut thresholded) = (0usize, 0usize);
    for r in &test {
        let p = model
            .predict(r.features.as_ref().unwrap())
            .map_err(|e| e.to_string())?;
        forced += (decide(&p, 0.0).unwrap().outcome == Outcome::Label(r.intended)) as usize;
        thresholded += (decide(&p, 0.5).unwrap().outcome == Outcome::Label(r.intended)) as usize;
    }
    let n = test.len() as f64;
    if test.len() != 90 {
        return Err(format!("expected 90 test trials, got {}", test.len()));
    }
    Ok((forced as f64 / n, thresholded as f64 / n))
}

pub fn check_end_to_end() -> Check {
    let high = SyntheticProfile {
        jitter: 0.05,
        ..SyntheticProfile::with_separation(1.0)
    };
    let cfg = SessionConfig::with_condition(FeedbackCondition::Veridical);
    let report = analyze(&quick_session(cfg, high, 1)?).map_err(|e| e.to_string())?;
    let acc4 = report
        .blocks
        .iter()
        .find(|b| b.block == 4)
        .and_then(|b| b.accuracy)
        .ok_or("no block-4 accuracy")?;
    let (forced, thresholded) = chance_accuracy(&SyntheticProfile::with_separation(0.0), 2)?;
    ensure(acc4 >= 0.95, || {
        format!("high separation block-4 accuracy {acc4:.3}")
    })?;
    ensure((forced - 1.0 / 9.0).abs() <= 0.1, || {
        format!("zero separation forced-choice accuracy {forced:.3} outside 1/9 ± 0.1")
    })?;
    Ok(format!(
        "high separation block 4 {acc4:.3}; zero separation over 90 trials {forced:.3} forced choice ({thresholded:.3} at the 0.5 threshold)"
    ))
}

pub fn check_coadaptation() -> Check {
    let seeds: Vec<u64> = (0..10).collect();
    let results: Vec<Result<(f64, f64, f64, f64), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                s.spawn(move || {
                    let run = |c: FeedbackCondition| -> Result<AnalysisReport, String> {
                        let mut cfg = SessionConfig::with_condition(c);
                        cfg.seed = seed;
                        analyze(&quick_session(cfg, SyntheticProfile::coadaptive(), seed)?)
                            .map_err(|e| e.to_string())
                    };
                    let c = run(FeedbackCondition::Control)?;
                    let m = run(FeedbackCondition::Modified)?;
                    Ok((
                        m.baseline.d_acc,
                        c.baseline.d_acc,
                        m.baseline.d_dsep,
                        c.baseline.d_dsep,
                    ))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("session thread"))
            .collect()
    });
    let mut acc_wins = 0;
    let mut dsep_wins = 0;
    let mut rows = Vec::new();
    for (seed, r) in seeds.iter().zip(results) {
        let (ma, ca, md, cd) = r?;
        acc_wins += (ma > ca) as usize;
        dsep_wins += (md > cd) as usize;
        rows.push(format!("{seed}:{:+.2}/{:+.2}", ma - ca, md - cd));
    }
    let summary = format!(
        "Modified beats Control on ΔAcc in {acc_wins}/10, on Δd_sep in {dsep_wins}/10 (per seed M−C ΔAcc/Δd_sep: {})",
        rows.join(" ")
    );
    if acc_wins >= 8 && dsep_wins >= 8 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

pub fn check_determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ra = persisted_session(
        a.path(),
        FeedbackCondition::Modified,
        SyntheticProfile::coadaptive(),
        4,
    )?;
    persisted_session(
        b.path(),
        FeedbackCondition::Modified,
        SyntheticProfile::coadaptive(),
        4,
    )?;
    let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
    let (la, lb) = (
        read(&a.path().join("trials.jsonl"))?,
        read(&b.path().join("trials.jsonl"))?,
    );
    ensure(la == lb, || {
        "trial logs differ between identical runs".into()
    })?;
    ensure(
        read(&a.path().join("recording.emgr"))? == read(&b.path().join("recording.emgr"))?,
        || "recordings differ between identical runs".into(),
    )?;

    // replay the recording through a fresh session
    let c = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut config = SessionConfig::with_condition(FeedbackCondition::Modified);
    config.seed = 4;
    config.model.head.seed = 4;
    let replay = ReplaySource::open(a.path().join("recording.emgr"), Some(SAMPLE_RATE_HZ))
        .map_err(|e| e.to_string())?;
    let sd = SessionDir::create(c.path()).map_err(|e| e.to_string())?;
    let (_, rc) = run_persisted(
        &config,
        replay,
        "replay",
        &sd,
        &mut ScriptedSubject::new(4),
        SessionControl::new(),
        Vec::new(),
    )
    .map_err(|e| e.to_string())?;
    ensure(ra.to_json() == rc.to_json(), || {
        "replayed report differs".into()
    })?;
    let from_disk =
        std::fs::read_to_string(a.path().join("report.json")).map_err(|e| e.to_string())?;
    ensure(from_disk == rc.to_json(), || {
        "persisted report differs from replayed one".into()
    })?;
    Ok(format!(
        "{} byte logs identical; replayed report identical",
        la.len()
    ))
}
