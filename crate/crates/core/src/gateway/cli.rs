//! `myotrain` command line.
//!
//! Exit status: 0 on success, 2 for usage or configuration errors, 3 when a
//! session or analysis fails at run time.

use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::server::{ServeOptions, Server, SubjectMode};
use super::{run_block1_persisted, run_persisted, GatewayError, SessionDir};
use crate::gesture::Gesture;
use crate::metrics::{analyze, AnalysisReport};
use crate::session::{
    read_log, FeedbackCondition, IntentProvider, QueuedIntents, ScriptedSubject, Session,
    SessionConfig, SessionControl, SharedLog,
};
use crate::signal::SAMPLE_RATE_HZ;
use crate::sources::{
    Degraded, Paced, ReplaySource, SignalSource, SocketSource, SyntheticProfile, SyntheticSource,
};

#[derive(Debug, Parser)]
#[command(name = "myotrain", version, about = "sEMG gesture training sessions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Block 1 only: record labelled trials and fit the calibration model.
    Calibrate(CalibrateArgs),
    /// The full four-block protocol.
    Session(SessionArgs),
    /// Score one or more recorded sessions from their logs.
    Analyze(AnalyzeArgs),
    /// Headless run against a synthetic subject.
    Simulate(SimulateArgs),
    /// Live WebSocket gateway for UI clients.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolArgs {
    /// Session configuration (TOML); flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub condition: Option<FeedbackCondition>,
    /// Feedback exponent; only meaningful with `--condition modified`.
    #[arg(long)]
    pub m: Option<f64>,
    /// EMA smoothing factor.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ProtocolArgs {
    pub fn resolve(&self) -> Result<SessionConfig, GatewayError> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| GatewayError::Usage(format!("{}: {e}", p.display())))?;
                SessionConfig::from_toml(&text).map_err(|e| GatewayError::Config(e.to_string()))?
            }
            None => SessionConfig::default(),
        };
        if let Some(c) = self.condition {
            cfg.condition = c;
        }
        if let Some(m) = self.m {
            if cfg.condition != FeedbackCondition::Modified {
                return Err(GatewayError::Usage(format!(
                    "--m only applies to the modified condition (condition is {})",
                    cfg.condition.name()
                )));
            }
            cfg.m = m;
        }
        if let Some(l) = self.lambda {
            cfg.lambda = l;
        }
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
            cfg.model.head.seed = s;
        }
        cfg.validate()
            .map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Synthetic subject profile (TOML or JSON). The default source.
    #[arg(long, conflicts_with_all = ["replay", "socket"])]
    pub profile: Option<PathBuf>,
    /// Replay a recording instead.
    #[arg(long, conflicts_with = "socket")]
    pub replay: Option<PathBuf>,
    /// Connect to a packet stream at HOST:PORT.
    #[arg(long)]
    pub socket: Option<String>,
    /// Playback speed for synthetic and replayed sources; 0 runs unpaced.
    #[arg(long, default_value_t = 0.0)]
    pub speed: f64,
    /// Add white noise at this signal-to-noise ratio.
    #[arg(long)]
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntentMode {
    /// A scripted subject picks useful moves.
    Scripted,
    /// One gesture name per line on standard input.
    Stdin,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to stdin for socket sources, scripted otherwise.
    #[arg(long, value_enum)]
    pub intents: Option<IntentMode>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Session directories or `trials.jsonl` files.
    #[arg(required = true)]
    pub logs: Vec<PathBuf>,
    /// Where to write reports; defaults to each session directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Persist the session here; otherwise only the report is printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8765)]
    pub port: u16,
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
    /// The controller steers the synthetic subject with `select_gesture`.
    #[arg(long)]
    pub manual: bool,
    /// Block-4 intents are entered by an operator client.
    #[arg(long)]
    pub operator_intents: bool,
    /// Start immediately instead of waiting for the controller.
    #[arg(long)]
    pub auto_start: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "session")]
    pub session_id: String,
}

pub fn load_profile(path: Option<&Path>) -> Result<SyntheticProfile, GatewayError> {
    let Some(path) = path else {
        return Ok(SyntheticProfile::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| GatewayError::Usage(format!("{}: {e}", path.display())))?;
    let profile: SyntheticProfile = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text)
            .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?
    } else {
        toml::from_str(&text)
            .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?
    };
    profile
        .validate()
        .map_err(|e| GatewayError::Config(e.to_string()))?;
    Ok(profile)
}

fn open_source(
    args: &SourceArgs,
    seed: u64,
) -> Result<(Box<dyn SignalSource>, String), GatewayError> {
    if !(args.speed >= 0.0) || !args.speed.is_finite() {
        return Err(GatewayError::Usage(format!(
            "--speed must be non-negative, got {}",
            args.speed
        )));
    }
    let (source, name): (Box<dyn SignalSource>, String) = if let Some(path) = &args.replay {
        let replay = ReplaySource::open(path, Some(SAMPLE_RATE_HZ))?;
        (
            Box::new(Paced::new(replay, args.speed)),
            format!("replay:{}", path.display()),
        )
    } else if let Some(addr) = &args.socket {
        (
            Box::new(SocketSource::connect(addr.as_str(), Some(SAMPLE_RATE_HZ))?),
            format!("socket:{addr}"),
        )
    } else {
        let profile = load_profile(args.profile.as_deref())?;
        let synthetic = SyntheticSource::new(profile, seed)?;
        (
            Box::new(Paced::new(synthetic, args.speed)),
            format!("synthetic:{seed}"),
        )
    };
    match args.snr_db {
        Some(snr) => Ok((
            Box::new(Degraded::new(source, snr, seed ^ 0x5eed)),
            format!("{name}+snr{snr}"),
        )),
        None => Ok((source, name)),
    }
}

fn stdin_intents(control: SessionControl) -> QueuedIntents {
    let (tx, queue) = QueuedIntents::channel(control);
    std::thread::spawn(move || {
        for line in std::io::stdin().lock().lines() {
            let Ok(line) = line else { break };
            match line.trim().parse::<Gesture>() {
                Ok(g) => {
                    if tx.send(g).is_err() {
                        break;
                    }
                }
                Err(e) => eprintln!("ignored: {e}"),
            }
        }
    });
    queue
}

fn print_report(report: &AnalysisReport) {
    println!(
        "{}",
        serde_json::to_string(report).expect("report serializes")
    );
}

fn calibrate(args: &CalibrateArgs) -> Result<(), GatewayError> {
    let config = args.protocol.resolve()?;
    let (source, name) = open_source(&args.source, config.seed)?;
    let dir = SessionDir::create(&args.out)?;
    let (records, model) =
        run_block1_persisted(&config, source, &name, &dir, SessionControl::new())?;
    eprintln!(
        "calibrated on {} trials, final head loss {:.4}; model in {}",
        records.len(),
        model.metadata.final_loss,
        dir.model_path(1).display()
    );
    Ok(())
}

fn session(args: &SessionArgs) -> Result<(), GatewayError> {
    let config = args.protocol.resolve()?;
    let (source, name) = open_source(&args.source, config.seed)?;
    let dir = SessionDir::create(&args.out)?;
    let control = SessionControl::new();
    let mode = args.intents.unwrap_or(if args.source.socket.is_some() {
        IntentMode::Stdin
    } else {
        IntentMode::Scripted
    });
    let mut scripted;
    let mut queued;
    let intents: &mut dyn IntentProvider = match mode {
        IntentMode::Scripted => {
            scripted = ScriptedSubject::new(config.seed);
            &mut scripted
        }
        IntentMode::Stdin => {
            queued = stdin_intents(control.clone());
            &mut queued
        }
    };
    let (_, report) = run_persisted(&config, source, &name, &dir, intents, control, Vec::new())?;
    print_report(&report);
    Ok(())
}

fn analyze_logs(args: &AnalyzeArgs) -> Result<(), GatewayError> {
    for path in &args.logs {
        let (log, default_out) = if path.is_dir() {
            (SessionDir::open(path)?.log_path(), Some(path.clone()))
        } else {
            (path.clone(), None)
        };
        let entries = read_log(&log)?;
        let report = analyze(&entries)?;
        let out = match (&args.out, default_out) {
            (Some(root), _) if args.logs.len() > 1 => {
                let stem = path
                    .file_stem()
                    .map(|s| s.to_os_string())
                    .unwrap_or_default();
                Some(root.join(stem))
            }
            (Some(root), _) => Some(root.clone()),
            (None, dir) => dir,
        };
        if let Some(out) = out {
            report.write(&out)?;
        }
        print_report(&report);
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<(), GatewayError> {
    let config = args.protocol.resolve()?;
    let profile = load_profile(args.profile.as_deref())?;
    let source = SyntheticSource::new(profile, config.seed)?;
    let name = format!("synthetic:{}", config.seed);
    let mut intents = ScriptedSubject::new(config.seed);
    let report = match &args.out {
        Some(out) => {
            let dir = SessionDir::create(out)?;
            run_persisted(
                &config,
                source,
                &name,
                &dir,
                &mut intents,
                SessionControl::new(),
                Vec::new(),
            )?
            .1
        }
        None => {
            let log = SharedLog::without_frames();
            let mut s = Session::new(config, source)?
                .with_sink(log.clone())
                .with_source_name(name);
            s.run(&mut intents)?;
            analyze(&log.entries())?
        }
    };
    print_report(&report);
    Ok(())
}

fn serve(args: &ServeArgs) -> Result<(), GatewayError> {
    let config = args.protocol.resolve()?;
    let opts = ServeOptions {
        seed: config.seed,
        config,
        profile: load_profile(args.profile.as_deref())?,
        subject: if args.manual {
            SubjectMode::Manual
        } else {
            SubjectMode::Scripted
        },
        operator_intents: args.operator_intents,
        speed: args.speed,
        out_dir: args.out.clone(),
        session_id: args.session_id.clone(),
        ..ServeOptions::default()
    };
    let server = Server::bind(&format!("{}:{}", args.host, args.port), opts)?;
    let handle = server.spawn();
    eprintln!("listening on {}", handle.url());
    if args.auto_start {
        handle.start()?;
    }
    let result = handle.wait(None).expect("waiting without a timeout");
    // let clients drain their queues before the sockets close
    std::thread::sleep(Duration::from_millis(500));
    handle.shutdown();
    match result {
        Ok(outcome) => {
            eprintln!("session finished after {} trials", outcome.trials);
            if let Some(r) = outcome.report {
                print_report(&r);
            }
            Ok(())
        }
        Err(e) => Err(GatewayError::WebSocket(e)),
    }
}

pub fn run(cli: &Cli) -> Result<(), GatewayError> {
    match &cli.command {
        Verb::Calibrate(a) => calibrate(a),
        Verb::Session(a) => session(a),
        Verb::Analyze(a) => analyze_logs(a),
        Verb::Simulate(a) => simulate(a),
        Verb::Serve(a) => serve(a),
    }
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("myotrain: {e}");
            e.exit_code()
        }
    }
}
