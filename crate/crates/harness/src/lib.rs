//! Three-role simulation of short-lived key delegation.
//!
//! * [`keyserver`]: owns the forward-secure state, derives a key for each
//!   epoch and pushes it to the edge ahead of time.
//! * [`edge`]: signs handshake transcripts with the key of the current
//!   epoch, and never sees anything but delegated epoch keys.
//! * [`client`]: verifies against its own clock with a tolerance window.
//!
//! [`scenario`] drives all three from a script with a scripted clock.

pub mod auth;
pub mod client;
pub mod clock;
pub mod edge;
pub mod keyserver;
pub mod messages;
pub mod scenario;
pub mod store;
pub mod transcript;
pub mod wire;

/// Scripts shipped with the crate, with their expected reports.
pub const BUNDLED_SCENARIOS: &[(&str, &str, &str)] = &[
    (
        "happy-path",
        include_str!("../scenarios/happy-path.scenario"),
        include_str!("../scenarios/happy-path.expected"),
    ),
    (
        "expiry",
        include_str!("../scenarios/expiry.scenario"),
        include_str!("../scenarios/expiry.expected"),
    ),
    (
        "skew",
        include_str!("../scenarios/skew.scenario"),
        include_str!("../scenarios/skew.expected"),
    ),
    (
        "keyserver-crash",
        include_str!("../scenarios/keyserver-crash.scenario"),
        include_str!("../scenarios/keyserver-crash.expected"),
    ),
];

pub fn bundled_scenario(name: &str) -> Option<(&'static str, &'static str)> {
    BUNDLED_SCENARIOS.iter().find(|(n, ..)| *n == name).map(|(_, s, e)| (*s, *e))
}
