//! Scripted runs of keyserver, edge and client against one scripted clock.
//!
//! A script is a list of lines. `set <key> <value>` lines come first; every
//! other line is `<action> <tick> [args]`, with ticks non-decreasing. Tick
//! `T` is the middle of epoch `T`. Blank lines and `#` comments are skipped.
//!
//! | action | args | effect |
//! |---|---|---|
//! | `tick` | | one keyserver step |
//! | `crash-keyserver` | `after-queue` or `after-update` | a step that dies at that point |
//! | `connect` | `[skew=S] [id=NAME]` | one client handshake |
//! | `skew-clock` | `S` | default client skew, in epochs |
//! | `kill-edge` / `start-edge` | | stop the edge (keys are lost) / start a fresh one |
//! | `stale-edge` | `on` or `off` | edge keeps and signs with expired keys |
//!
//! Settings: `epochs`, `epoch-length`, `window`, `identity`, `seed`, `t0`.

use std::fmt;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use tbids_core::{EpochConfig, IdentityVector, SchemeKind, TbidsParams, VerifyingKey};
use thiserror::Error;

use crate::auth::PresharedKey;
use crate::client::{self, ClientConfig, Outcome};
use crate::clock::ManualClock;
use crate::edge::{EdgeConfig, EdgeServer};
use crate::keyserver::{init_state, CrashPoint, Keyserver, KeyserverConfig, KeyserverError};
use crate::messages::pk_fingerprint;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("keyserver: {0}")]
    Keyserver(#[from] KeyserverError),
    #[error("setup: {0}")]
    Core(#[from] tbids_core::Error),
    #[error("persisted epoch went from {from} to {to}")]
    EpochRegressed { from: u64, to: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub epochs: u64,
    pub epoch_length: u64,
    pub window: u32,
    pub identity: String,
    pub seed: u64,
    pub t0: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            epochs: 16,
            epoch_length: 60,
            window: 1,
            identity: "edge.example".into(),
            seed: 1,
            t0: 1_700_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Tick,
    CrashKeyserver(CrashPoint),
    Connect { skew: Option<i64>, identity: Option<String> },
    SkewClock(i64),
    KillEdge,
    StartEdge,
    StaleEdge(bool),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub tick: u64,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub settings: Settings,
    pub steps: Vec<Step>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse { line, msg: msg.into() }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut settings = Settings::default();
        let mut steps: Vec<Step> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            if words[0] == "set" {
                if !steps.is_empty() {
                    return Err(parse_err(n, "settings must precede actions"));
                }
                let [_, key, value] = words[..] else {
                    return Err(parse_err(n, "expected `set <key> <value>`"));
                };
                let num = |v: &str| v.parse::<u64>().map_err(|_| parse_err(n, format!("bad number `{v}`")));
                match key {
                    "epochs" => settings.epochs = num(value)?,
                    "epoch-length" => settings.epoch_length = num(value)?,
                    "window" => {
                        settings.window =
                            u32::try_from(num(value)?).map_err(|_| parse_err(n, "window too large"))?
                    }
                    "identity" => settings.identity = value.to_string(),
                    "seed" => settings.seed = num(value)?,
                    "t0" => settings.t0 = num(value)?,
                    other => return Err(parse_err(n, format!("unknown setting `{other}`"))),
                }
                continue;
            }
            let Some(tick) = words.get(1) else {
                return Err(parse_err(n, "missing tick"));
            };
            let tick: u64 = tick.parse().map_err(|_| parse_err(n, format!("bad tick `{tick}`")))?;
            if steps.last().is_some_and(|s| s.tick > tick) {
                return Err(parse_err(n, "ticks must not decrease"));
            }
            let args = &words[2..];
            let action = match (words[0], args) {
                ("tick", []) => Action::Tick,
                ("crash-keyserver", [point]) => Action::CrashKeyserver(match *point {
                    "after-queue" => CrashPoint::AfterQueue,
                    "after-update" => CrashPoint::AfterUpdate,
                    other => return Err(parse_err(n, format!("unknown crash point `{other}`"))),
                }),
                ("connect", args) => {
                    let (mut skew, mut identity) = (None, None);
                    for arg in args {
                        match arg.split_once('=') {
                            Some(("skew", v)) => {
                                skew = Some(v.parse().map_err(|_| parse_err(n, format!("bad skew `{v}`")))?)
                            }
                            Some(("id", v)) => identity = Some(v.to_string()),
                            _ => return Err(parse_err(n, format!("unknown connect argument `{arg}`"))),
                        }
                    }
                    Action::Connect { skew, identity }
                }
                ("skew-clock", [s]) => {
                    Action::SkewClock(s.parse().map_err(|_| parse_err(n, format!("bad skew `{s}`")))?)
                }
                ("kill-edge", []) => Action::KillEdge,
                ("start-edge", []) => Action::StartEdge,
                ("stale-edge", ["on"]) => Action::StaleEdge(true),
                ("stale-edge", ["off"]) => Action::StaleEdge(false),
                (name, _) => return Err(parse_err(n, format!("unknown action or arguments `{name}`"))),
            };
            steps.push(Step { tick, action });
        }
        if settings.epoch_length == 0 {
            return Err(parse_err(0, "epoch-length must be positive"));
        }
        if settings.identity.is_empty() {
            return Err(parse_err(0, "identity must not be empty"));
        }
        Ok(Self { settings, steps })
    }

    pub fn run(&self) -> Result<Report, ScenarioError> {
        Runner::new(&self.settings)?.run(&self.steps)
    }
}

/// Line-oriented `key=value` outcome records.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<String>,
    pub accepts: usize,
    pub rejects: usize,
    pub network_errors: usize,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        writeln!(
            f,
            "summary accepts={} rejects={} network_errors={}",
            self.accepts, self.rejects, self.network_errors
        )
    }
}

struct Runner {
    settings: Settings,
    _dir: tempfile::TempDir,
    clock: ManualClock,
    edge_cfg: EdgeConfig,
    edge: Option<EdgeServer>,
    edge_addr: SocketAddr,
    stale: bool,
    keyserver: Keyserver,
    client: ClientConfig,
    rng: ChaCha20Rng,
    skew: i64,
    last_state_epoch: u64,
}

impl Runner {
    fn new(s: &Settings) -> Result<Self, ScenarioError> {
        let mut rng = ChaCha20Rng::seed_from_u64(s.seed);
        let params = Arc::new(TbidsParams::setup(s.epochs, 1, &mut rng)?);
        let epochs = EpochConfig::new(s.t0, s.epoch_length, s.window)?;
        let identity = IdentityVector::single(s.identity.as_bytes().to_vec())?;
        let dir = tempfile::tempdir()?;
        let state_path = dir.path().join("fs-state.tbids");
        let pk = init_state(&state_path, &params, &mut rng)?;
        let clock = ManualClock::new(s.t0);
        let mut psk = [0u8; 32];
        rand_core::RngCore::fill_bytes(&mut rng, &mut psk);
        let auth = Arc::new(PresharedKey::new(psk));
        let edge_cfg = EdgeConfig {
            params: params.clone(),
            epochs,
            pk_ref: pk_fingerprint(&pk),
            clock: Arc::new(clock.clone()),
            auth: auth.clone(),
        };
        let edge = EdgeServer::spawn("127.0.0.1:0", edge_cfg.clone())?;
        let edge_addr = edge.addr();
        let keyserver = Keyserver::new(
            KeyserverConfig {
                params: params.clone(),
                epochs,
                identity: identity.clone(),
                edge: edge_addr,
                auth,
                push_attempts: 3,
                backoff: Duration::from_millis(5),
                timeout: Duration::from_secs(2),
            },
            state_path,
        );
        let client = ClientConfig {
            params: TbidsParams::clone(&params),
            vk: VerifyingKey { scheme: SchemeKind::ForwardSecure, pk },
            epochs,
            expected: identity,
            timeout: Duration::from_secs(2),
        };
        Ok(Self {
            settings: s.clone(),
            _dir: dir,
            clock,
            edge_cfg,
            edge: Some(edge),
            edge_addr,
            stale: false,
            keyserver,
            client,
            rng,
            skew: 0,
            last_state_epoch: 0,
        })
    }

    fn time_at(&self, tick: u64) -> u64 {
        self.settings.t0 + tick * self.settings.epoch_length + self.settings.epoch_length / 2
    }

    fn held(&self) -> String {
        let held = self
            .edge
            .as_ref()
            .map(|e| e.held_epochs(&self.client.expected))
            .unwrap_or_default();
        if held.is_empty() {
            "-".into()
        } else {
            held.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        }
    }

    fn keyserver_step(&mut self, now: u64, crash: Option<CrashPoint>) -> Result<String, ScenarioError> {
        let report = self.keyserver.step(now, &mut self.rng, crash)?;
        let persisted = self.keyserver.load_state()?.current_epoch();
        if persisted < self.last_state_epoch {
            return Err(ScenarioError::EpochRegressed { from: self.last_state_epoch, to: persisted });
        }
        self.last_state_epoch = persisted;
        Ok(format!("{report} edge_holds={}", self.held()))
    }

    fn run(mut self, steps: &[Step]) -> Result<Report, ScenarioError> {
        let mut report = Report::default();
        for step in steps {
            let now = self.time_at(step.tick);
            self.clock.set(now);
            let prefix = format!("tick={}", step.tick);
            let line = match &step.action {
                Action::Tick => format!("{prefix} action=tick {}", self.keyserver_step(now, None)?),
                Action::CrashKeyserver(point) => {
                    format!("{prefix} action=crash-keyserver {}", self.keyserver_step(now, Some(*point))?)
                }
                Action::Connect { skew, identity } => {
                    let skew = skew.unwrap_or(self.skew);
                    let client_now =
                        now.saturating_add_signed(skew * self.settings.epoch_length as i64);
                    let mut cfg = self.client.clone();
                    if let Some(id) = identity {
                        cfg.expected = IdentityVector::single(id.as_bytes().to_vec())?;
                    }
                    let outcome = client::connect(self.edge_addr, &cfg, client_now, &mut self.rng);
                    match &outcome {
                        Outcome::Accept { .. } => report.accepts += 1,
                        Outcome::Reject(_) => report.rejects += 1,
                        Outcome::NetworkError(_) => report.network_errors += 1,
                    }
                    format!("{prefix} action=connect skew={skew} {outcome}")
                }
                Action::SkewClock(s) => {
                    self.skew = *s;
                    format!("{prefix} action=skew-clock skew={s}")
                }
                Action::KillEdge => {
                    if let Some(edge) = self.edge.take() {
                        edge.shutdown();
                    }
                    format!("{prefix} action=kill-edge")
                }
                Action::StartEdge => {
                    if self.edge.is_none() {
                        let edge = EdgeServer::spawn(self.edge_addr, self.edge_cfg.clone())?;
                        edge.set_stale(self.stale);
                        self.edge = Some(edge);
                    }
                    format!("{prefix} action=start-edge")
                }
                Action::StaleEdge(on) => {
                    self.stale = *on;
                    if let Some(edge) = &self.edge {
                        edge.set_stale(*on);
                    }
                    format!("{prefix} action=stale-edge {}", if *on { "on" } else { "off" })
                }
            };
            report.lines.push(line);
        }
        Ok(report)
    }
}
