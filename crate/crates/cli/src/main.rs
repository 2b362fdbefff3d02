mod bench;
mod error;
mod files;
mod keys;
mod net;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use tbids_core::tbids::epoch::{DEFAULT_EPOCHS, DEFAULT_EPOCH_LENGTH};
use tbids_core::{EpochConfig, IdentityVector, SchemeKind};

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "tbids", version, about = "Time-bound identity-based signatures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Mapping from wall-clock seconds to epochs.
#[derive(Args, Clone, Copy)]
pub struct EpochArgs {
    /// Unix time at which epoch 0 starts.
    #[arg(long, default_value_t = 0)]
    pub t0: u64,
    /// Epoch length in seconds.
    #[arg(long, default_value_t = DEFAULT_EPOCH_LENGTH)]
    pub epoch_length: u64,
}

impl EpochArgs {
    pub fn config(&self, window: u32) -> CliResult<EpochConfig> {
        Ok(EpochConfig::new(self.t0, self.epoch_length, window)?)
    }
}

/// Which epoch an operation refers to.
#[derive(Args, Clone, Copy)]
#[group(required = true, multiple = false)]
pub struct When {
    /// An explicit epoch index.
    #[arg(long)]
    pub epoch: Option<u64>,
    /// The epoch containing the current system time.
    #[arg(long)]
    pub now: bool,
    /// The epoch containing the given unix time.
    #[arg(long, value_name = "UNIX_SECONDS")]
    pub at: Option<u64>,
}

impl When {
    /// Timestamp for clock-based selection, `None` for an explicit epoch.
    pub fn timestamp(&self) -> Option<u64> {
        if self.now {
            Some(unix_now())
        } else {
            self.at
        }
    }

    pub fn resolve(&self, epochs: &EpochArgs) -> CliResult<u64> {
        match (self.epoch, self.timestamp()) {
            (Some(e), _) => Ok(e),
            (None, Some(ts)) => Ok(epochs.config(0)?.epoch_at(ts)?),
            (None, None) => unreachable!("clap requires one of --epoch, --now, --at"),
        }
    }
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn identity(levels: &[String]) -> CliResult<IdentityVector> {
    IdentityVector::new(levels.iter().map(|l| l.as_bytes().to_vec()))
        .map_err(|e| CliError::Validation(format!("--id: {e}")))
}

pub fn psk(hex_key: &str) -> CliResult<[u8; 32]> {
    let mut key = [0u8; 32];
    hex::decode_to_slice(hex_key, &mut key)
        .map_err(|e| CliError::Validation(format!("--psk must be 64 hex digits: {e}")))?;
    Ok(key)
}

#[derive(Subcommand)]
enum Command {
    /// Generate public parameters.
    Setup {
        /// Identity levels below the epoch.
        #[arg(long, default_value_t = 1)]
        levels: usize,
        /// Number of epochs; rounded up to a power of two.
        #[arg(long, default_value_t = DEFAULT_EPOCHS)]
        epochs: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write base64 text instead of binary.
        #[arg(long)]
        armor: bool,
    },
    /// Generate a master key pair. For `fs` the secret is the evolving state.
    Keygen {
        #[arg(long, default_value_t = SchemeKind::ForwardSecure)]
        scheme: SchemeKind,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out_pk: PathBuf,
        #[arg(long)]
        out_sk: PathBuf,
        #[arg(long)]
        armor: bool,
    },
    /// Show the epoch for a time, or the time span of an epoch.
    Epoch {
        #[command(flatten)]
        when: When,
        #[command(flatten)]
        epochs: EpochArgs,
        /// Also list the epochs a verifier with this window accepts.
        #[arg(long, default_value_t = 0)]
        window: u32,
    },
    /// Derive the signing key for one identity and epoch.
    Delegate {
        #[arg(long)]
        params: PathBuf,
        /// Flat-scheme master secret.
        #[arg(long, conflicts_with = "state", required_unless_present = "state")]
        sk: Option<PathBuf>,
        /// Forward-secure state; only its current epoch can be delegated.
        #[arg(long)]
        state: Option<PathBuf>,
        #[command(flatten)]
        when: When,
        #[command(flatten)]
        epochs: EpochArgs,
        /// Identity levels, outermost first.
        #[arg(long, num_args = 1.., required = true)]
        id: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        armor: bool,
    },
    /// Advance a forward-secure state by one epoch, erasing the old one.
    Update {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Sign the raw bytes of a file or standard input.
    Sign {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value = "-")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        armor: bool,
    },
    /// Verify a signature. Prints VALID or INVALID.
    Verify {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        #[arg(long, default_value_t = SchemeKind::ForwardSecure)]
        scheme: SchemeKind,
        #[arg(long, num_args = 1.., required = true)]
        id: Vec<String>,
        #[command(flatten)]
        when: When,
        #[command(flatten)]
        epochs: EpochArgs,
        /// Neighbouring epochs accepted on each side. Defaults to 0 with
        /// --epoch and 1 with --now or --at.
        #[arg(long)]
        window: Option<u32>,
        #[arg(long, default_value = "-")]
        r#in: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Time delegate, sign and verify. Prints metric=value lines.
    Bench {
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long, default_value_t = SchemeKind::ForwardSecure)]
        scheme: SchemeKind,
        #[arg(long, default_value_t = DEFAULT_EPOCHS)]
        epochs: u64,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Decode any envelope and print its fields.
    Inspect { file: PathBuf },
    /// Run the origin keyserver that pushes per-epoch keys to an edge.
    Keyserver {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// Create the state first and write the public key here.
        #[arg(long, value_name = "PK_OUT")]
        init: Option<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        id: Vec<String>,
        #[arg(long)]
        edge: SocketAddr,
        /// Push authentication key, 64 hex digits.
        #[arg(long)]
        psk: String,
        #[command(flatten)]
        epochs: EpochArgs,
        /// Run a single step and exit.
        #[arg(long)]
        once: bool,
        /// Clock reading for --once instead of the system time.
        #[arg(long, requires = "once", value_name = "UNIX_SECONDS")]
        at: Option<u64>,
        /// Seconds between steps.
        #[arg(long, default_value_t = 5)]
        poll: u64,
    },
    /// Run an edge signer that serves handshakes with pushed keys.
    Edge {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        #[arg(long, default_value = "127.0.0.1:0")]
        listen: SocketAddr,
        #[arg(long)]
        psk: String,
        #[command(flatten)]
        epochs: EpochArgs,
    },
    /// Perform one client handshake against an edge.
    Connect {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        addr: SocketAddr,
        #[arg(long, num_args = 1.., required = true)]
        id: Vec<String>,
        #[command(flatten)]
        epochs: EpochArgs,
        #[arg(long, default_value_t = 1)]
        window: u32,
        /// Client clock reading instead of the system time.
        #[arg(long, value_name = "UNIX_SECONDS")]
        at: Option<u64>,
        /// Seconds before the handshake is abandoned.
        #[arg(long, default_value_t = 5)]
        timeout: u64,
    },
    /// Run a scripted keyserver/edge/client scenario.
    Scenario {
        /// Script file.
        #[arg(conflicts_with_all = ["bundled", "list"], required_unless_present_any = ["bundled", "list"])]
        script: Option<PathBuf>,
        /// Run one of the bundled scripts by name.
        #[arg(long)]
        bundled: Option<String>,
        /// List the bundled scripts.
        #[arg(long)]
        list: bool,
        /// Compare the report with this file; a difference exits 1.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Setup { levels, epochs, out, armor } => keys::setup(levels, epochs, &out, armor),
        Command::Keygen { scheme, params, out_pk, out_sk, armor } => {
            keys::keygen(scheme, &params, &out_pk, &out_sk, armor)
        }
        Command::Epoch { when, epochs, window } => keys::epoch(when, epochs, window),
        Command::Delegate { params, sk, state, when, epochs, id, out, armor } => {
            let source = match (sk, state) {
                (Some(sk), _) => keys::Source::Flat(sk),
                (None, Some(state)) => keys::Source::Fs(state),
                (None, None) => unreachable!("clap requires --sk or --state"),
            };
            keys::delegate(&params, source, when.resolve(&epochs)?, &identity(&id)?, &out, armor)
        }
        Command::Update { params, state } => keys::update(&params, &state),
        Command::Sign { key, r#in, out, armor } => keys::sign(&key, &r#in, &out, armor),
        Command::Verify { params, pk, scheme, id, when, epochs, window, r#in, sig } => {
            let window = window.unwrap_or(if when.epoch.is_some() { 0 } else { 1 });
            let current = when.resolve(&epochs)?;
            keys::verify(&params, &pk, scheme, &identity(&id)?, current, window, &r#in, &sig)
        }
        Command::Bench { iters, scheme, epochs, levels } => bench::run(iters, scheme, epochs, levels),
        Command::Inspect { file } => keys::inspect(&file),
        Command::Keyserver { params, state, init, id, edge, psk: key, epochs, once, at, poll } => {
            net::keyserver(net::KeyserverArgs {
                params,
                state,
                init,
                id: identity(&id)?,
                edge,
                psk: psk(&key)?,
                epochs: epochs.config(0)?,
                once,
                at,
                poll,
            })
        }
        Command::Edge { params, pk, listen, psk: key, epochs } => {
            net::edge(&params, &pk, listen, psk(&key)?, epochs.config(0)?)
        }
        Command::Connect { params, pk, addr, id, epochs, window, at, timeout } => {
            net::connect(&params, &pk, addr, identity(&id)?, epochs.config(window)?, at, timeout)
        }
        Command::Scenario { script, bundled, list, expect } => {
            net::scenario(script.as_deref(), bundled.as_deref(), list, expect.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
