//! Starts a gateway on a free port, connects an operator console and a
//! participant display, and prints what each of them receives.

use std::time::Duration;

use myotrain::gateway::{Client, Command, Role, ServeOptions, Server, WireKind};
use myotrain::session::{FeedbackCondition, SessionConfig};
use myotrain::Gesture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = SessionConfig::with_condition(FeedbackCondition::Modified);
    config.block3_order = vec![Gesture::Up];
    config.block4_games = 1;
    let handle = Server::bind(
        "127.0.0.1:0",
        ServeOptions {
            config,
            speed: 0.0,
            ..ServeOptions::default()
        },
    )?
    .spawn();
    println!("gateway at {}", handle.url());
    let addr = handle.addr().to_string();

    let mut operator = Client::connect(&addr, Role::Operator, true)?;
    let mut participant = Client::connect(&addr, Role::Participant, false)?;
    operator.command(&Command::Start)?;

    let mut shown = 0;
    while let Some(m) = participant.recv(Duration::from_secs(20))? {
        let finished = m.kind == WireKind::BlockStatus && m.payload["status"] == "session_finished";
        if m.kind == WireKind::ProbabilityFrame && m.payload["frame"].as_u64() == Some(500) {
            println!("participant frame: {}", m.to_text());
        } else if m.kind != WireKind::ProbabilityFrame
            && m.kind != WireKind::PhaseUpdate
            && shown < 12
        {
            println!("participant: {} {}", m.kind.name(), m.payload);
            shown += 1;
        }
        if finished {
            break;
        }
    }
    while let Some(m) = operator.recv(Duration::from_millis(200))? {
        if m.kind == WireKind::ProbabilityFrame && m.payload["frame"].as_u64() == Some(500) {
            println!("operator frame: {}", m.to_text());
        }
    }
    let outcome = handle
        .wait(Some(Duration::from_secs(10)))
        .ok_or("session still running")??;
    println!("session finished after {} trials", outcome.trials);
    Ok(())
}
