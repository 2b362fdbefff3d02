//! Network roles and scripted scenarios.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Duration;

use rand_core::OsRng;
use tbids_core::hibe::PublicKey;
use tbids_core::{EpochConfig, IdentityVector, SchemeKind, TbidsParams, VerifyingKey};
use tbids_harness::auth::PresharedKey;
use tbids_harness::client::{self, ClientConfig, Outcome};
use tbids_harness::clock::SystemClock;
use tbids_harness::edge::{EdgeConfig, EdgeServer};
use tbids_harness::keyserver::{init_state, Keyserver, KeyserverConfig, KeyserverError};
use tbids_harness::messages::pk_fingerprint;
use tbids_harness::scenario::{Scenario, ScenarioError};
use tbids_harness::{bundled_scenario, BUNDLED_SCENARIOS};

use crate::error::{CliError, CliResult};
use crate::files::{self, load};
use crate::unix_now;

impl From<KeyserverError> for CliError {
    fn from(e: KeyserverError) -> Self {
        match e {
            KeyserverError::Io { .. } => Self::Io(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

pub struct KeyserverArgs {
    pub params: PathBuf,
    pub state: PathBuf,
    pub init: Option<PathBuf>,
    pub id: IdentityVector,
    pub edge: SocketAddr,
    pub psk: [u8; 32],
    pub epochs: EpochConfig,
    pub once: bool,
    pub at: Option<u64>,
    pub poll: u64,
}

pub fn keyserver(args: KeyserverArgs) -> CliResult {
    let params: TbidsParams = load(&args.params)?;
    params.check_identity(&args.id)?;
    if let Some(pk_out) = &args.init {
        let pk = init_state(&args.state, &params, &mut OsRng)?;
        files::save_public(pk_out, &pk, false)?;
    }
    let ks = Keyserver::new(
        KeyserverConfig {
            params: Arc::new(params),
            epochs: args.epochs,
            identity: args.id,
            edge: args.edge,
            auth: Arc::new(PresharedKey::new(args.psk)),
            push_attempts: 3,
            backoff: Duration::from_millis(200),
            timeout: Duration::from_secs(5),
        },
        &args.state,
    );
    if args.once {
        let report = ks.step(args.at.unwrap_or_else(unix_now), &mut OsRng, None)?;
        println!("{report}");
        return Ok(());
    }
    let stop = AtomicBool::new(false);
    ks.run(&SystemClock, &mut OsRng, &stop, Duration::from_secs(args.poll.max(1)), |step| {
        match step {
            Ok(report) => println!("{report}"),
            Err(e) => eprintln!("{}", CliError::from(e)),
        }
        let _ = std::io::stdout().flush();
    });
    Ok(())
}

pub fn edge(params: &Path, pk: &Path, listen: SocketAddr, psk: [u8; 32], epochs: EpochConfig) -> CliResult {
    let params: TbidsParams = load(params)?;
    let pk: PublicKey = load(pk)?;
    let server = EdgeServer::spawn(
        listen,
        EdgeConfig {
            params: Arc::new(params),
            epochs,
            pk_ref: pk_fingerprint(&pk),
            clock: Arc::new(SystemClock),
            auth: Arc::new(PresharedKey::new(psk)),
        },
    )
    .map_err(|e| CliError::Io(format!("{listen}: {e}")))?;
    println!("listening={}", server.addr());
    let _ = std::io::stdout().flush();
    loop {
        std::thread::park();
    }
}

pub fn connect(
    params: &Path,
    pk: &Path,
    addr: SocketAddr,
    expected: IdentityVector,
    epochs: EpochConfig,
    at: Option<u64>,
    timeout: u64,
) -> CliResult {
    let params: TbidsParams = load(params)?;
    let pk: PublicKey = load(pk)?;
    let cfg = ClientConfig {
        params,
        vk: VerifyingKey { scheme: SchemeKind::ForwardSecure, pk },
        epochs,
        expected,
        timeout: Duration::from_secs(timeout),
    };
    let outcome = client::connect(addr, &cfg, at.unwrap_or_else(unix_now), &mut OsRng);
    println!("{outcome}");
    match outcome {
        Outcome::Accept { .. } => Ok(()),
        Outcome::Reject(_) => Err(CliError::Invalid(outcome.to_string())),
        Outcome::NetworkError(e) => Err(CliError::Io(format!("{addr}: {e}"))),
    }
}

fn scenario_error(e: ScenarioError) -> CliError {
    match e {
        ScenarioError::Io(_) => CliError::Io(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

pub fn scenario(script: Option<&Path>, bundled: Option<&str>, list: bool, expect: Option<&Path>) -> CliResult {
    if list {
        for (name, _, _) in BUNDLED_SCENARIOS {
            println!("{name}");
        }
        return Ok(());
    }
    let scenario = match (script, bundled) {
        (Some(path), _) => Scenario::load(path).map_err(scenario_error)?,
        (None, Some(name)) => {
            let (text, _) = bundled_scenario(name)
                .ok_or_else(|| CliError::Validation(format!("no bundled scenario named {name:?}")))?;
            Scenario::parse(text).map_err(scenario_error)?
        }
        (None, None) => unreachable!("clap requires a script, --bundled or --list"),
    };
    let report = scenario.run().map_err(scenario_error)?.to_string();
    print!("{report}");
    if let Some(path) = expect {
        let expected = files::read_bytes(path)?;
        if expected != report.as_bytes() {
            return Err(CliError::Invalid(format!("report differs from {}", path.display())));
        }
    }
    Ok(())
}
