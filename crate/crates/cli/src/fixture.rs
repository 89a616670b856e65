//! The T fixture: both method values, the settings that produced them,
//! and a content hash embedded into downstream reports so that a report
//! can be traced to the fixture that pinned it.

use crate::CmdError;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    /// The pinned critical parameter (bisection value).
    pub t: f64,
    pub t_bisection: f64,
    pub t_separatrix: f64,
    /// Bisection tolerance used.
    pub tol: f64,
    /// Separatrix extent used for the limit fit.
    pub qmax: f64,
    /// FNV-1a hash of the payload fields above.
    pub hash: String,
}

/// 64-bit FNV-1a over a byte string, rendered as fixed-width hex.
pub fn fnv1a64(data: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

impl Fixture {
    pub fn new(t_bisection: f64, t_separatrix: f64, tol: f64, qmax: f64) -> Fixture {
        let payload = format!("{t_bisection}|{t_separatrix}|{tol}|{qmax}");
        Fixture {
            t: t_bisection,
            t_bisection,
            t_separatrix,
            tol,
            qmax,
            hash: fnv1a64(payload.as_bytes()),
        }
    }

    /// Recompute the hash of the stored payload.
    fn expected_hash(&self) -> String {
        let payload =
            format!("{}|{}|{}|{}", self.t_bisection, self.t_separatrix, self.tol, self.qmax);
        fnv1a64(payload.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Fixture, CmdError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CmdError(format!("cannot read fixture {}: {e}", path.display())))?;
        let fixture: Fixture = serde_json::from_str(&text)
            .map_err(|e| CmdError(format!("malformed fixture {}: {e}", path.display())))?;
        if fixture.hash != fixture.expected_hash() {
            return Err(CmdError(format!(
                "fixture {} hash mismatch: stored {}, recomputed {}",
                path.display(),
                fixture.hash,
                fixture.expected_hash()
            )));
        }
        Ok(fixture)
    }

    pub fn save(&self, path: &Path) -> Result<(), CmdError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)
            .map_err(|e| CmdError(format!("cannot write fixture {}: {e}", path.display())))
    }
}

/// Resolve the pinned T: from an explicit fixture file when given,
/// otherwise from the internal high-precision computation. Returns the
/// value and the hash recorded in reports.
pub fn resolve_t(fixture: Option<&Path>) -> Result<(f64, String), CmdError> {
    match fixture {
        Some(path) => {
            let f = Fixture::load(path)?;
            Ok((f.t, f.hash))
        }
        None => {
            let t = s2cubic::critical::critical_profile().t;
            Ok((t, format!("internal:{}", fnv1a64(format!("{t}").as_bytes()))))
        }
    }
}
