use std::collections::HashMap;
use std::time::{Duration, Instant};

use myotrain::gateway::{
    Client, Command, Role, ServeOptions, Server, ServerHandle, SessionDir, SubjectMode, WireKind,
};
use myotrain::session::{records, FeedbackCondition, GameState, SessionConfig, SessionEvent};
use myotrain::sources::SyntheticProfile;
use myotrain::Gesture;
use serde_json::json;

fn short_config(condition: FeedbackCondition) -> SessionConfig {
    let mut c = SessionConfig::with_condition(condition);
    c.block3_order = vec![Gesture::Up, Gesture::Fist];
    c.block4_games = 1;
    c.block4_trial_cap = 3;
    c
}

fn spawn(opts: ServeOptions) -> ServerHandle {
    Server::bind("127.0.0.1:0", opts).unwrap().spawn()
}

fn addr(h: &ServerHandle) -> String {
    h.addr().to_string()
}

const T: Duration = Duration::from_secs(2);

#[test]
fn unknown_kinds_and_versions_get_error_replies() {
    let h = spawn(ServeOptions::default());
    let mut c = Client::connect(&addr(&h), Role::Participant, false).unwrap();
    c.send_raw(r#"{"v":1,"kind":"Teleport","session_id":"x","frame":0,"payload":{}}"#)
        .unwrap();
    let m = c.recv(T).unwrap().unwrap();
    assert_eq!(m.kind, WireKind::Error);
    assert!(m.payload["message"].as_str().unwrap().contains("Teleport"));
    c.send_raw(
        r#"{"v":7,"kind":"Command","session_id":"x","frame":1,"payload":{"action":"start"}}"#,
    )
    .unwrap();
    assert_eq!(c.recv(T).unwrap().unwrap().kind, WireKind::Error);
    c.send(WireKind::ProbabilityFrame, json!({})).unwrap();
    assert_eq!(c.recv(T).unwrap().unwrap().kind, WireKind::Error);
    // still connected and served
    c.command(&Command::Start).unwrap();
    let m = c.recv(T).unwrap().unwrap();
    assert_eq!(
        m.kind,
        WireKind::Error,
        "participant must not control: {m:?}"
    );
}

#[test]
fn one_controller_and_commands_only_from_it() {
    let h = spawn(ServeOptions::default());
    let a = Client::connect(&addr(&h), Role::Operator, true).unwrap();
    let mut b = Client::connect(&addr(&h), Role::Operator, true).unwrap();
    assert!(a.controller);
    assert!(!b.controller);
    b.command(&Command::Pause).unwrap();
    assert_eq!(b.recv(T).unwrap().unwrap().kind, WireKind::Error);
    assert!(!h.control().is_paused());
    // the first controller leaving frees the slot and pauses
    a.close();
    let t0 = Instant::now();
    while !h.control().is_paused() && t0.elapsed() < T {
        std::thread::sleep(Duration::from_millis(10));
    }
    assert!(h.control().is_paused());
    let c = Client::connect(&addr(&h), Role::Operator, true).unwrap();
    assert!(c.controller);
}

#[test]
fn intent_rejected_unless_awaiting() {
    let h = spawn(ServeOptions {
        operator_intents: true,
        ..ServeOptions::default()
    });
    let mut op = Client::connect(&addr(&h), Role::Operator, true).unwrap();
    op.intent(Gesture::Up).unwrap();
    let m = op.recv(T).unwrap().unwrap();
    assert_eq!(m.kind, WireKind::Error);
    assert!(m.payload["message"].as_str().unwrap().contains("awaiting"));
    let mut p = Client::connect(&addr(&h), Role::Participant, false).unwrap();
    p.intent(Gesture::Up).unwrap();
    assert_eq!(p.recv(T).unwrap().unwrap().kind, WireKind::Error);
}

#[test]
fn select_gesture_needs_manual_subject() {
    let h = spawn(ServeOptions::default());
    let mut op = Client::connect(&addr(&h), Role::Operator, true).unwrap();
    op.command(&Command::SelectGesture {
        gesture: Gesture::Fist,
    })
    .unwrap();
    assert_eq!(op.recv(T).unwrap().unwrap().kind, WireKind::Error);
    let h = spawn(ServeOptions {
        subject: SubjectMode::Manual,
        ..ServeOptions::default()
    });
    let mut op = Client::connect(&addr(&h), Role::Operator, true).unwrap();
    op.command(&Command::SelectGesture {
        gesture: Gesture::Fist,
    })
    .unwrap();
    let m = op.recv(T).unwrap().unwrap();
    assert_eq!(
        (m.kind, m.payload["status"].as_str()),
        (WireKind::BlockStatus, Some("accepted"))
    );
}

#[test]
fn busy_port_fails_at_bind() {
    let h = spawn(ServeOptions::default());
    assert!(Server::bind(&addr(&h), ServeOptions::default()).is_err());
}

/// Full modified-condition session: participants see only the published
/// vector, and the persisted log keeps every frame whatever the clients
/// manage to read.
#[test]
fn live_session_blinding_and_lossless_persistence() {
    let dir = tempfile::tempdir().unwrap();
    let h = spawn(ServeOptions {
        config: short_config(FeedbackCondition::Modified),
        profile: SyntheticProfile::with_separation(1.0),
        speed: 0.0,
        out_dir: Some(dir.path().to_path_buf()),
        queue_capacity: 64,
        ..ServeOptions::default()
    });
    let mut op = Client::connect(&addr(&h), Role::Operator, true).unwrap();
    let mut part = Client::connect(&addr(&h), Role::Participant, false).unwrap();
    // connected but never reads
    let slow = Client::connect(&addr(&h), Role::Participant, false).unwrap();
    op.command(&Command::Start).unwrap();

    let mut op_frames = HashMap::new();
    let mut part_frames = HashMap::new();
    let mut finished = false;
    let deadline = Instant::now() + Duration::from_secs(120);
    while !finished && Instant::now() < deadline {
        if let Some(m) = op.recv(Duration::from_millis(20)).unwrap() {
            if m.kind == WireKind::ProbabilityFrame {
                let key = (
                    m.payload["trial"].as_u64().unwrap(),
                    m.payload["frame"].as_u64().unwrap(),
                );
                op_frames.insert(key, m.payload.clone());
            }
            if m.kind == WireKind::BlockStatus && m.payload["status"] == "session_finished" {
                finished = true;
            }
        }
        while let Some(m) = part.recv(Duration::from_millis(1)).unwrap() {
            let text = m.to_text();
            assert!(
                !text.contains("\"raw\"")
                    && !text.contains("\"smoothed\"")
                    && !text.contains("features"),
                "{text}"
            );
            assert!(!text.contains("modified-condition source vector"));
            if m.kind == WireKind::ProbabilityFrame {
                let key = (
                    m.payload["trial"].as_u64().unwrap(),
                    m.payload["frame"].as_u64().unwrap(),
                );
                part_frames.insert(key, m.payload.clone());
            }
        }
    }
    assert!(finished, "session did not finish");
    let outcome = h.wait(Some(Duration::from_secs(10))).unwrap().unwrap();
    assert!(outcome.report.is_some());

    let mut compared = 0;
    for (k, p) in &part_frames {
        if let Some(o) = op_frames.get(k) {
            assert_eq!(p["probabilities"], o["probabilities"]);
            assert_ne!(
                o["probabilities"], o["smoothed"],
                "modified vector equals veridical one"
            );
            compared += 1;
        }
    }
    assert!(compared > 0);

    let sd = SessionDir::open(dir.path()).unwrap();
    let entries = sd.entries().unwrap();
    let logged = entries
        .iter()
        .filter(|e| matches!(e.event, SessionEvent::ProbabilityFrame(_)))
        .count();
    let expected: usize = records(&entries)
        .iter()
        .filter(|r| r.block == 3)
        .filter_map(|r| r.frames)
        .sum();
    assert_eq!(logged, expected);
    assert_eq!(logged, 2 * 2186);
    for f in [
        "config.toml",
        "recording.emgr",
        "trials.jsonl",
        "model_block1.json",
        "model_block2.json",
        "report.json",
        "confusion_block4.csv",
    ] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    drop(slow);
}

#[test]
fn operator_supplies_block4_intents() {
    let h = spawn(ServeOptions {
        config: short_config(FeedbackCondition::Control),
        speed: 0.0,
        operator_intents: true,
        ..ServeOptions::default()
    });
    let mut op = Client::connect(&addr(&h), Role::Operator, true).unwrap();
    op.command(&Command::Start).unwrap();
    let mut state: Option<GameState> = None;
    let mut sent = Vec::new();
    let mut results = Vec::new();
    let deadline = Instant::now() + Duration::from_secs(120);
    while results.len() < 3 && Instant::now() < deadline {
        let Some(m) = op.recv(Duration::from_millis(50)).unwrap() else {
            continue;
        };
        match m.kind {
            WireKind::GameSnapshot if m.payload["block"] == 4 => {
                state = Some(serde_json::from_value(m.payload["state"].clone()).unwrap());
            }
            WireKind::Instruction if m.payload["block"] == 4 => {
                let g = state.unwrap().useful_gestures()[0];
                // the trial runs unpaced, so the server is already waiting
                std::thread::sleep(Duration::from_millis(20));
                op.intent(g).unwrap();
                sent.push(g);
            }
            WireKind::TrialResult if m.payload["block"] == 4 => {
                results.push(m.payload["intended"].clone());
                if h.control().is_aborted() {
                    break;
                }
            }
            WireKind::Error => panic!("{}", m.to_text()),
            _ => {}
        }
        if results.len() == 3 || state.is_some_and(|s| s.is_complete()) {
            break;
        }
    }
    assert!(!results.is_empty());
    for (r, g) in results.iter().zip(&sent) {
        assert_eq!(r, &json!(g));
    }
}
