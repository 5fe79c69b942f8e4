//! Uniform entry point over all unravelling procedures.

use std::fmt;
use std::str::FromStr;

use crate::ballots::Profile;
use crate::certificates::{Certificate, OutcomeVector};
use crate::error::Result;
use crate::greedy::{enumerate_random_branches, UpdateKind, DEFAULT_BRANCH_CAP};
use crate::optimal::{minmax_exact, minmax_liquid, minsum_exact, minsum_liquid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Procedure {
    Greedy(UpdateKind),
    MinSum,
    MinMax,
    MinSumLiquid,
    MinMaxLiquid,
}

impl Procedure {
    /// The four greedy rules followed by MinSum and MinMax.
    pub const STANDARD: [Procedure; 6] = [
        Procedure::Greedy(UpdateKind::U),
        Procedure::Greedy(UpdateKind::DU),
        Procedure::Greedy(UpdateKind::RU),
        Procedure::Greedy(UpdateKind::DRU),
        Procedure::MinSum,
        Procedure::MinMax,
    ];

    /// Every (certificate, outcome) pair the procedure may return, sorted.
    pub fn possible_results(self, profile: &Profile) -> Result<Vec<(Certificate, OutcomeVector)>> {
        Ok(match self {
            Procedure::Greedy(kind) => enumerate_random_branches(profile, kind, DEFAULT_BRANCH_CAP)?
                .into_iter()
                .map(|b| (b.certificate, b.outcome))
                .collect(),
            Procedure::MinSum => minsum_exact(profile)?.solutions,
            Procedure::MinMax => minmax_exact(profile)?.solutions,
            Procedure::MinSumLiquid => {
                let r = minsum_liquid(profile)?;
                vec![(r.certificate, r.outcome)]
            }
            Procedure::MinMaxLiquid => {
                let r = minmax_liquid(profile)?;
                vec![(r.certificate, r.outcome)]
            }
        })
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Procedure::Greedy(k) => write!(f, "{}", k.to_string().to_ascii_lowercase()),
            Procedure::MinSum => f.write_str("minsum"),
            Procedure::MinMax => f.write_str("minmax"),
            Procedure::MinSumLiquid => f.write_str("minsum-liquid"),
            Procedure::MinMaxLiquid => f.write_str("minmax-liquid"),
        }
    }
}

impl FromStr for Procedure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "minsum" => Ok(Procedure::MinSum),
            "minmax" => Ok(Procedure::MinMax),
            "minsum-liquid" => Ok(Procedure::MinSumLiquid),
            "minmax-liquid" => Ok(Procedure::MinMaxLiquid),
            other => other.parse().map(Procedure::Greedy).map_err(|_| format!("unknown procedure `{s}`")),
        }
    }
}
