use std::collections::BTreeMap;
use std::path::Path;

use hfk_core::gf2::BigradedRanks;
use hfk_core::invariants::TopGroup;
use hfk_core::ledger::{Irreducibility, LedgerEntry, PosRationalFunction};
use hfk_core::murasugi::{CablePrediction, VerificationReport};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub result: RunResult,
    /// Generators per doubled Alexander level, for the levels built.
    pub level_sizes: BTreeMap<i32, u64>,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Bottom,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Tilde,
    Hat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunResult {
    Ranks {
        flavor: Flavor,
        window: Window,
        components: usize,
        ranks: BigradedRanks,
        total: u64,
    },
    Murasugi {
        reports: Vec<VerificationReport>,
        pass: bool,
    },
    LedgerAdd {
        entry: LedgerEntry,
    },
    LedgerP {
        names: Vec<String>,
        value: PosRationalFunction,
        trivial: bool,
    },
    LedgerIndep {
        names: Vec<String>,
        independent: bool,
    },
    LedgerCor6 {
        name: String,
        obstructed: bool,
        irreducibility: Irreducibility,
    },
    LedgerB1Check {
        names: [String; 3],
        consistent: bool,
    },
    Cable {
        prediction: CablePrediction,
        direct: Option<TopGroup>,
        matches: Option<bool>,
    },
}

impl RunResult {
    /// False for verifications that ran but did not hold.
    pub fn passed(&self) -> bool {
        match self {
            RunResult::Murasugi { pass, .. } => *pass,
            RunResult::Cable { matches, .. } => matches.unwrap_or(true),
            _ => true,
        }
    }
}
