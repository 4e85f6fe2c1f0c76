//! Everything between a running session and the outside world: the wire
//! protocol spoken to UI clients, the WebSocket server, on-disk session
//! directories and the command-line interface.

pub mod cli;
mod client;
mod persist;
mod server;
pub mod wire;

pub use client::Client;
pub use persist::{run_block1_persisted, run_persisted, PersistSink, SessionDir};
pub use server::{EngineOutcome, ServeOptions, Server, ServerHandle, SubjectMode};
pub use wire::{Command, IntentEntry, Role, WireError, WireKind, WireMessage, WIRE_VERSION};

use crate::metrics::MetricsError;
use crate::session::SessionError;
use crate::sources::SourceError;

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("websocket: {0}")]
    WebSocket(String),
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl From<tungstenite::Error> for GatewayError {
    fn from(e: tungstenite::Error) -> Self {
        GatewayError::WebSocket(e.to_string())
    }
}

impl GatewayError {
    /// Process exit status: 2 for bad invocations, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            GatewayError::Usage(_) | GatewayError::Config(_) => 2,
            GatewayError::Session(SessionError::Config(_)) => 2,
            _ => 3,
        }
    }
}
