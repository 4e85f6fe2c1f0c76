//! Live WebSocket gateway.
//!
//! One thread accepts connections, one thread per client moves messages in
//! both directions, and the session engine runs on its own thread once the
//! controlling client sends `start`. Each client has a bounded outgoing
//! queue; when a slow client falls behind, its oldest probability frames
//! are dropped first. The session log is written by the engine thread itself
//! and never drops anything.
//!
//! Gateway-level notices travel as `BlockStatus` with `block: 0`.

use std::collections::VecDeque;
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::Sender;
use std::sync::{Arc, Condvar, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use serde_json::{json, Value};
use tungstenite::{Message, WebSocket};

use super::wire::{encode_event, Command, IntentEntry, Role, WireKind, WireMessage};
use super::{run_persisted, GatewayError, SessionDir};
use crate::classifier::ProbabilityVector;
use crate::gesture::Gesture;
use crate::metrics::AnalysisReport;
use crate::session::{
    EventSink, IntentProvider, LogEntry, QueuedIntents, ScriptedSubject, Session, SessionConfig,
    SessionControl, SessionError,
};
use crate::sources::{
    Cue, Paced, SignalSource, SourceError, SourcePacket, SyntheticProfile, SyntheticSource,
};

const POLL: Duration = Duration::from_millis(5);

/// How the synthetic subject picks what to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubjectMode {
    /// Follows the session cues.
    #[default]
    Scripted,
    /// Produces whatever the controller last selected.
    Manual,
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub config: SessionConfig,
    pub profile: SyntheticProfile,
    pub seed: u64,
    pub subject: SubjectMode,
    /// Block-4 intents typed by an operator instead of scripted.
    pub operator_intents: bool,
    /// Playback speed; 1 is real time, 0 runs unpaced.
    pub speed: f64,
    pub out_dir: Option<PathBuf>,
    pub session_id: String,
    pub queue_capacity: usize,
}

impl Default for ServeOptions {
    fn default() -> Self {
        ServeOptions {
            config: SessionConfig::default(),
            profile: SyntheticProfile::default(),
            seed: 0,
            subject: SubjectMode::Scripted,
            operator_intents: false,
            speed: 1.0,
            out_dir: None,
            session_id: "session".into(),
            queue_capacity: 1024,
        }
    }
}

/// How the engine thread ended.
#[derive(Debug, Clone)]
pub struct EngineOutcome {
    pub trials: usize,
    pub report: Option<AnalysisReport>,
}

struct OutQueue {
    items: Mutex<VecDeque<(WireKind, Value)>>,
    capacity: usize,
    dropped: AtomicU64,
}

impl OutQueue {
    fn new(capacity: usize) -> Self {
        OutQueue {
            items: Mutex::new(VecDeque::with_capacity(capacity)),
            capacity: capacity.max(1),
            dropped: AtomicU64::new(0),
        }
    }

    fn push(&self, item: (WireKind, Value)) {
        let mut q = self.items.lock().expect("queue lock");
        if q.len() >= self.capacity {
            let victim = q
                .iter()
                .position(|(k, _)| *k == WireKind::ProbabilityFrame)
                .unwrap_or(0);
            q.remove(victim);
            self.dropped.fetch_add(1, Ordering::Relaxed);
        }
        q.push_back(item);
    }

    fn drain(&self) -> Vec<(WireKind, Value)> {
        self.items.lock().expect("queue lock").drain(..).collect()
    }
}

struct ClientSlot {
    id: u64,
    role: Role,
    queue: Arc<OutQueue>,
}

#[derive(Default)]
struct EngineState {
    started: bool,
    handle: Option<JoinHandle<()>>,
    result: Option<Result<EngineOutcome, String>>,
}

struct Hub {
    opts: ServeOptions,
    control: SessionControl,
    clients: Mutex<Vec<ClientSlot>>,
    controller: Mutex<Option<u64>>,
    selection: Arc<Mutex<Option<Gesture>>>,
    intents: Mutex<Option<Sender<Gesture>>>,
    engine: Mutex<EngineState>,
    done: Condvar,
    shutdown: AtomicBool,
    next_id: AtomicU64,
}

fn status(detail: &str, status: &str) -> (WireKind, Value) {
    (
        WireKind::BlockStatus,
        json!({ "block": 0, "status": status, "detail": detail }),
    )
}

fn error(message: impl Into<String>) -> (WireKind, Value) {
    (WireKind::Error, json!({ "message": message.into() }))
}

impl Hub {
    fn broadcast(&self, entry: &LogEntry) {
        for c in self.clients.lock().expect("clients lock").iter() {
            if let Some(msg) = encode_event(entry, c.role) {
                c.queue.push(msg);
            }
        }
    }

    fn broadcast_raw(&self, msg: (WireKind, Value)) {
        for c in self.clients.lock().expect("clients lock").iter() {
            c.queue.push(msg.clone());
        }
    }

    fn is_controller(&self, id: u64) -> bool {
        *self.controller.lock().expect("controller lock") == Some(id)
    }

    fn start_engine(self: &Arc<Self>) -> Result<(), String> {
        let mut engine = self.engine.lock().expect("engine lock");
        if engine.started {
            return Err("session already started".into());
        }
        engine.started = true;
        let hub = Arc::clone(self);
        engine.handle = Some(thread::spawn(move || {
            let result = run_engine(&hub).map_err(|e| e.to_string());
            if let Err(e) = &result {
                hub.broadcast_raw(error(format!("session ended: {e}")));
            }
            let mut engine = hub.engine.lock().expect("engine lock");
            engine.result = Some(result);
            hub.done.notify_all();
        }));
        Ok(())
    }

    /// Replies owed to the sender of `text`.
    fn handle(
        self: &Arc<Self>,
        slot: &mut Option<ClientSlot>,
        text: &str,
    ) -> Vec<(WireKind, Value)> {
        let msg = match WireMessage::parse(text) {
            Ok(m) => m,
            Err(e) => return vec![error(e.to_string())],
        };
        match msg.kind {
            WireKind::Command => match Command::from_message(&msg) {
                Ok(cmd) => self.command(slot, cmd),
                Err(e) => vec![error(e.to_string())],
            },
            WireKind::IntentEntry => {
                let Some(c) = slot.as_ref() else {
                    return vec![error("send hello first")];
                };
                if c.role != Role::Operator {
                    return vec![error("only operators may enter intents")];
                }
                let entry = match IntentEntry::from_message(&msg) {
                    Ok(e) => e,
                    Err(e) => return vec![error(e.to_string())],
                };
                if !self.control.awaiting_intent() {
                    return vec![error("no trial is awaiting an intent")];
                }
                match self.intents.lock().expect("intents lock").as_ref() {
                    Some(tx) if tx.send(entry.gesture).is_ok() => Vec::new(),
                    _ => vec![error("intents are not operator-entered in this session")],
                }
            }
            other => vec![error(format!(
                "{} is a server-to-client message",
                other.name()
            ))],
        }
    }

    fn command(
        self: &Arc<Self>,
        slot: &mut Option<ClientSlot>,
        cmd: Command,
    ) -> Vec<(WireKind, Value)> {
        if let Command::Hello { role, control } = cmd {
            if slot.is_some() {
                return vec![error("already greeted")];
            }
            let id = self.next_id.fetch_add(1, Ordering::Relaxed);
            let queue = Arc::new(OutQueue::new(self.opts.queue_capacity));
            let mut controls = false;
            if control && role == Role::Operator {
                let mut ctl = self.controller.lock().expect("controller lock");
                if ctl.is_none() {
                    *ctl = Some(id);
                    controls = true;
                }
            }
            self.clients.lock().expect("clients lock").push(ClientSlot {
                id,
                role,
                queue: Arc::clone(&queue),
            });
            *slot = Some(ClientSlot { id, role, queue });
            let mut reply = status(
                if controls { "controller" } else { "observer" },
                "connected",
            );
            reply.1["role"] = json!(role);
            reply.1["session_id"] = json!(self.opts.session_id);
            return vec![reply];
        }
        let Some(c) = slot.as_ref() else {
            return vec![error("send hello first")];
        };
        if !self.is_controller(c.id) {
            return vec![error("only the controlling client may send commands")];
        }
        match cmd {
            Command::Hello { .. } => unreachable!(),
            Command::Start => match self.start_engine() {
                Ok(()) => vec![status("start", "accepted")],
                Err(e) => vec![error(e)],
            },
            Command::Pause => {
                self.control.pause();
                vec![status("pause", "accepted")]
            }
            Command::Resume => {
                self.control.resume();
                vec![status("resume", "accepted")]
            }
            Command::Abort => {
                self.control.abort();
                vec![status("abort", "accepted")]
            }
            Command::SelectGesture { gesture } => {
                if self.opts.subject != SubjectMode::Manual {
                    return vec![error("the subject is not manually steered")];
                }
                *self.selection.lock().expect("selection lock") = Some(gesture);
                vec![status(gesture.name(), "accepted")]
            }
        }
    }

    fn disconnect(&self, slot: Option<ClientSlot>) {
        let Some(slot) = slot else { return };
        self.clients
            .lock()
            .expect("clients lock")
            .retain(|c| c.id != slot.id);
        let mut ctl = self.controller.lock().expect("controller lock");
        if *ctl == Some(slot.id) {
            *ctl = None;
            // nobody can resume or abort until a new controller connects
            self.control.pause();
        }
    }
}

struct HubSink(Arc<Hub>);

impl EventSink for HubSink {
    fn emit(&mut self, entry: &LogEntry) -> Result<(), SessionError> {
        self.0.broadcast(entry);
        Ok(())
    }
}

/// Synthetic subject whose class the controller may set.
struct Steered {
    inner: SyntheticSource,
    selection: Option<Arc<Mutex<Option<Gesture>>>>,
}

impl SignalSource for Steered {
    fn channels(&self) -> usize {
        self.inner.channels()
    }
    fn sample_rate(&self) -> f64 {
        self.inner.sample_rate()
    }
    fn packet_len(&self) -> usize {
        self.inner.packet_len()
    }
    fn next_packet(&mut self) -> Result<Option<SourcePacket>, SourceError> {
        if let Some(sel) = &self.selection {
            if let Some(g) = sel.lock().expect("selection lock").take() {
                self.inner.set_class(g);
            }
        }
        self.inner.next_packet()
    }
    fn cue(&mut self, cue: &Cue) {
        self.inner.cue(cue)
    }
    fn feedback(&mut self, displayed: &ProbabilityVector, target: Gesture) {
        self.inner.feedback(displayed, target)
    }
}

fn run_engine(hub: &Arc<Hub>) -> Result<EngineOutcome, GatewayError> {
    let opts = &hub.opts;
    let synthetic = SyntheticSource::new(opts.profile.clone(), opts.seed)?;
    let source = match opts.subject {
        SubjectMode::Scripted => Steered {
            inner: synthetic,
            selection: None,
        },
        SubjectMode::Manual => Steered {
            inner: synthetic.manual(),
            selection: Some(Arc::clone(&hub.selection)),
        },
    };
    let source = Paced::new(source, opts.speed);
    let mut scripted;
    let mut queued;
    let intents: &mut dyn IntentProvider = if opts.operator_intents {
        let (tx, q) = QueuedIntents::channel(hub.control.clone());
        *hub.intents.lock().expect("intents lock") = Some(tx);
        queued = q;
        &mut queued
    } else {
        scripted = ScriptedSubject::new(opts.seed);
        &mut scripted
    };
    let name = format!("synthetic:{}", opts.seed);
    let sink = Box::new(HubSink(Arc::clone(hub)));
    match &opts.out_dir {
        Some(dir) => {
            let dir = SessionDir::create(dir)?;
            let (outcome, report) = run_persisted(
                &opts.config,
                source,
                &name,
                &dir,
                intents,
                hub.control.clone(),
                vec![sink],
            )?;
            Ok(EngineOutcome {
                trials: outcome.records.len(),
                report: Some(report),
            })
        }
        None => {
            let mut session = Session::new(opts.config.clone(), source)?
                .with_sink(HubSink(Arc::clone(hub)))
                .with_control(hub.control.clone())
                .with_source_name(name);
            let outcome = session.run(intents)?;
            Ok(EngineOutcome {
                trials: outcome.records.len(),
                report: None,
            })
        }
    }
}

fn send(ws: &mut WebSocket<TcpStream>, msg: WireMessage) -> Result<(), GatewayError> {
    ws.send(Message::text(msg.to_text()))?;
    Ok(())
}

fn serve_client(hub: Arc<Hub>, stream: TcpStream) -> Result<(), GatewayError> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    let mut ws = tungstenite::accept(stream).map_err(|e| GatewayError::WebSocket(e.to_string()))?;
    ws.get_ref().set_read_timeout(Some(POLL))?;
    let sid = hub.opts.session_id.clone();
    let mut frame = 0u64;
    let mut slot: Option<ClientSlot> = None;
    let result = loop {
        if hub.shutdown.load(Ordering::Relaxed) {
            let _ = ws.close(None);
            let _ = ws.flush();
            break Ok(());
        }
        let pending = slot.as_ref().map(|c| c.queue.drain()).unwrap_or_default();
        let mut failed = None;
        for (kind, payload) in pending {
            if let Err(e) = send(&mut ws, WireMessage::new(kind, &sid, frame, payload)) {
                failed = Some(e);
                break;
            }
            frame += 1;
        }
        if let Some(e) = failed {
            break Err(e);
        }
        let replies = match ws.read() {
            Ok(Message::Text(text)) => hub.handle(&mut slot, text.as_str()),
            Ok(Message::Binary(_)) => vec![error("binary frames are not part of the protocol")],
            Ok(Message::Close(_)) => break Ok(()),
            Ok(_) => Vec::new(),
            Err(tungstenite::Error::Io(e))
                if matches!(
                    e.kind(),
                    std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut
                ) =>
            {
                Vec::new()
            }
            Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => {
                break Ok(())
            }
            Err(e) => break Err(e.into()),
        };
        let mut failed = None;
        for (kind, payload) in replies {
            if let Err(e) = send(&mut ws, WireMessage::new(kind, &sid, frame, payload)) {
                failed = Some(e);
                break;
            }
            frame += 1;
        }
        if let Some(e) = failed {
            break Err(e);
        }
    };
    hub.disconnect(slot);
    result
}

pub struct Server {
    listener: TcpListener,
    hub: Arc<Hub>,
}

impl Server {
    /// Validates the options, then binds. A busy port fails here.
    pub fn bind(addr: &str, opts: ServeOptions) -> Result<Server, GatewayError> {
        opts.config.validate()?;
        opts.profile.validate()?;
        if !(opts.speed >= 0.0) || !opts.speed.is_finite() {
            return Err(GatewayError::Config(format!(
                "speed must be finite and non-negative, got {}",
                opts.speed
            )));
        }
        let listener = TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let hub = Arc::new(Hub {
            opts,
            control: SessionControl::new(),
            clients: Mutex::new(Vec::new()),
            controller: Mutex::new(None),
            selection: Arc::new(Mutex::new(None)),
            intents: Mutex::new(None),
            engine: Mutex::new(EngineState::default()),
            done: Condvar::new(),
            shutdown: AtomicBool::new(false),
            next_id: AtomicU64::new(0),
        });
        Ok(Server { listener, hub })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener
            .local_addr()
            .expect("bound listener has an address")
    }

    pub fn spawn(self) -> ServerHandle {
        let addr = self.local_addr();
        let hub = Arc::clone(&self.hub);
        let accept = thread::spawn(move || {
            let mut workers = Vec::new();
            while !self.hub.shutdown.load(Ordering::Relaxed) {
                match self.listener.accept() {
                    Ok((stream, _)) => {
                        let hub = Arc::clone(&self.hub);
                        workers.push(thread::spawn(move || {
                            let _ = serve_client(hub, stream);
                        }));
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => thread::sleep(POLL),
                    Err(_) => thread::sleep(POLL),
                }
            }
            for w in workers {
                let _ = w.join();
            }
        });
        ServerHandle {
            addr,
            hub,
            accept: Some(accept),
        }
    }
}

/// A running gateway. Dropping it aborts the session and closes all
/// connections.
pub struct ServerHandle {
    addr: SocketAddr,
    hub: Arc<Hub>,
    accept: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("ws://{}", self.addr)
    }

    pub fn control(&self) -> SessionControl {
        self.hub.control.clone()
    }

    /// Starts the session without waiting for a controller.
    pub fn start(&self) -> Result<(), GatewayError> {
        self.hub.start_engine().map_err(GatewayError::Usage)
    }

    /// Messages dropped so far across all connected clients.
    pub fn dropped(&self) -> u64 {
        self.hub
            .clients
            .lock()
            .expect("clients lock")
            .iter()
            .map(|c| c.queue.dropped.load(Ordering::Relaxed))
            .sum()
    }

    /// Blocks until the session ends or `timeout` passes.
    pub fn wait(&self, timeout: Option<Duration>) -> Option<Result<EngineOutcome, String>> {
        let mut engine = self.hub.engine.lock().expect("engine lock");
        let deadline = timeout.map(|t| std::time::Instant::now() + t);
        while engine.result.is_none() {
            match deadline {
                None => engine = self.hub.done.wait(engine).expect("engine lock"),
                Some(d) => {
                    let now = std::time::Instant::now();
                    if now >= d {
                        return None;
                    }
                    engine = self
                        .hub
                        .done
                        .wait_timeout(engine, d - now)
                        .expect("engine lock")
                        .0;
                }
            }
        }
        engine.result.clone()
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        self.hub.control.abort();
        self.hub.shutdown.store(true, Ordering::Relaxed);
        if let Some(a) = self.accept.take() {
            let _ = a.join();
        }
        let handle = self.hub.engine.lock().expect("engine lock").handle.take();
        if let Some(h) = handle {
            let _ = h.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop();
    }
}
