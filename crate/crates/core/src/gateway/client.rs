use std::net::TcpStream;
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use tungstenite::{Message, WebSocket};

use super::wire::{Command, Role, WireKind, WireMessage};
use super::GatewayError;
use crate::gesture::Gesture;

/// Minimal blocking client, used by tests and examples in place of a UI.
pub struct Client {
    ws: WebSocket<TcpStream>,
    session_id: String,
    frame: u64,
    /// Whether the server made this client the controller.
    pub controller: bool,
}

impl Client {
    /// Connects and greets. Fails if the greeting is not acknowledged within
    /// a few seconds.
    pub fn connect(addr: &str, role: Role, control: bool) -> Result<Client, GatewayError> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        let (ws, _) = tungstenite::client(format!("ws://{addr}/"), stream)
            .map_err(|e| GatewayError::WebSocket(e.to_string()))?;
        let mut client = Client {
            ws,
            session_id: String::new(),
            frame: 0,
            controller: false,
        };
        client.command(&Command::Hello { role, control })?;
        let reply = client
            .recv(Duration::from_secs(5))?
            .ok_or_else(|| GatewayError::WebSocket("no greeting from server".into()))?;
        if reply.kind != WireKind::BlockStatus || reply.payload["status"] != "connected" {
            return Err(GatewayError::WebSocket(format!(
                "unexpected greeting {}",
                reply.to_text()
            )));
        }
        client.session_id = reply.session_id.clone();
        client.controller = reply.payload["detail"] == "controller";
        Ok(client)
    }

    pub fn send(&mut self, kind: WireKind, payload: Value) -> Result<(), GatewayError> {
        let msg = WireMessage::new(kind, &self.session_id, self.frame, payload);
        self.frame += 1;
        self.send_raw(&msg.to_text())
    }

    /// Sends text as-is, for exercising the server's validation.
    pub fn send_raw(&mut self, text: &str) -> Result<(), GatewayError> {
        self.ws.send(Message::text(text))?;
        Ok(())
    }

    pub fn command(&mut self, cmd: &Command) -> Result<(), GatewayError> {
        self.send(
            WireKind::Command,
            serde_json::to_value(cmd).expect("commands serialize"),
        )
    }

    pub fn intent(&mut self, gesture: Gesture) -> Result<(), GatewayError> {
        self.send(WireKind::IntentEntry, json!({ "gesture": gesture }))
    }

    /// Next message, or `None` after `timeout`.
    pub fn recv(&mut self, timeout: Duration) -> Result<Option<WireMessage>, GatewayError> {
        let deadline = Instant::now() + timeout;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                return Ok(None);
            }
            self.ws.get_ref().set_read_timeout(Some(left))?;
            match self.ws.read() {
                Ok(Message::Text(t)) => return Ok(Some(WireMessage::parse(t.as_str())?)),
                Ok(_) => {}
                Err(tungstenite::Error::Io(e))
                    if matches!(
                        e.kind(),
                        std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut
                    ) =>
                {
                    return Ok(None)
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    /// Reads until `pred` holds, discarding other messages.
    pub fn recv_until(
        &mut self,
        timeout: Duration,
        mut pred: impl FnMut(&WireMessage) -> bool,
    ) -> Result<Option<WireMessage>, GatewayError> {
        let deadline = Instant::now() + timeout;
        while let Some(m) = self.recv(deadline.saturating_duration_since(Instant::now()))? {
            if pred(&m) {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    pub fn close(mut self) {
        let _ = self.ws.close(None);
        let _ = self.ws.flush();
    }
}
