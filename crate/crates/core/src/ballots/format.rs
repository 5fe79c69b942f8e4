//! JSON profile format.
//!
//! ```json
//! {
//!   "domain": ["0", "1"],
//!   "agents": ["a", "b", "c"],
//!   "ballots": {
//!     "a": [{"delegates": ["b", "c"], "fn": {"kind": "dnf", "expr": "b&c"}}, {"vote": "1"}],
//!     "b": [{"delegates": ["c"], "fn": {"kind": "id", "of": "c"}}, {"vote": "0"}],
//!     "c": [{"vote": "1"}]
//!   }
//! }
//! ```
//!
//! Formulas may be given in any DNF; they are completed on load and each
//! rewrite is reported in [`Loaded::rewritten`].

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Agent, Alternative, DelegationFunction, Domain, PreferenceLevel, Profile, ProfileError, SmartBallot};
use crate::dnf;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("ballot of `{agent}`, level {level}: {message}")]
    Level { agent: String, level: usize, message: String },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("cannot serialise level {level} of `{agent}`: extension functions have no file form")]
    Unserialisable { agent: String, level: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub domain: Vec<String>,
    pub agents: Vec<String>,
    pub ballots: IndexMap<String, Vec<LevelFile>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelFile {
    Vote {
        vote: String,
    },
    Delegation {
        delegates: Vec<String>,
        #[serde(rename = "fn")]
        function: FunctionFile,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionFile {
    Id { of: String },
    Dnf { expr: String },
}

/// A formula that was not already in complete DNF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub agent: Agent,
    pub level: usize,
    pub original: String,
    pub completed: String,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub profile: Profile,
    pub rewritten: Vec<Rewrite>,
}

pub fn from_json(text: &str) -> Result<Profile, FormatError> {
    load(text).map(|l| l.profile)
}

pub fn load(text: &str) -> Result<Loaded, FormatError> {
    let file: ProfileFile = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_file(&file)
}

pub fn from_file(file: &ProfileFile) -> Result<Loaded, FormatError> {
    let domain = Domain::from_tokens(&file.domain)?;
    let lookup: HashMap<&str, Agent> = file.agents.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if lookup.len() != file.agents.len() {
        let dup = file.agents.iter().enumerate().find(|(i, s)| lookup[s.as_str()] != *i).map(|(_, s)| s.clone());
        return Err(ProfileError::DuplicateAgent(dup.unwrap_or_default()).into());
    }
    for owner in file.ballots.keys() {
        if !lookup.contains_key(owner.as_str()) {
            return Err(ProfileError::UnknownAgent(owner.clone()).into());
        }
    }
    let mut ballots = Vec::with_capacity(file.agents.len());
    let mut rewritten = Vec::new();
    for (a, name) in file.agents.iter().enumerate() {
        let levels = file.ballots.get(name).ok_or_else(|| ProfileError::MissingBallot(name.clone()))?;
        let mut out = Vec::with_capacity(levels.len());
        for (h, level) in levels.iter().enumerate() {
            let err = |message: String| FormatError::Level { agent: name.clone(), level: h + 1, message };
            out.push(match level {
                LevelFile::Vote { vote } => PreferenceLevel::Direct(Alternative::new(vote.as_str())),
                LevelFile::Delegation { delegates, function } => {
                    let mut declared = BTreeSet::new();
                    for d in delegates {
                        let i = *lookup.get(d.as_str()).ok_or_else(|| err(format!("unknown delegate `{d}`")))?;
                        declared.insert(i);
                    }
                    // Delegates are checked against the formula as written;
                    // completion may drop variables the function ignores.
                    let mut written = BTreeSet::new();
                    let f = match function {
                        FunctionFile::Id { of } => {
                            let b = *lookup.get(of.as_str()).ok_or_else(|| err(format!("unknown agent `{of}`")))?;
                            written.insert(b);
                            DelegationFunction::Identity(b)
                        }
                        FunctionFile::Dnf { expr } => {
                            let cubes = dnf::parse_cubes(expr, |n| lookup.get(n).copied()).map_err(|e| err(e.to_string()))?;
                            written.extend(cubes.iter().flat_map(|c| c.literals().iter().map(|l| l.var)));
                            let given: BTreeSet<dnf::Cube> = cubes.iter().cloned().collect();
                            let f = dnf::complete(cubes).map_err(|e| err(e.to_string()))?;
                            if given != f.cubes().iter().cloned().collect() {
                                rewritten.push(Rewrite {
                                    agent: a,
                                    level: h + 1,
                                    original: expr.clone(),
                                    completed: f.display(&file.agents).to_string(),
                                });
                            }
                            DelegationFunction::Dnf(f)
                        }
                    };
                    if written != declared {
                        return Err(err("`delegates` does not match the variables of the function".into()));
                    }
                    PreferenceLevel::Delegation(f)
                }
            });
        }
        ballots.push(SmartBallot::new(out).map_err(|message| ProfileError::MalformedBallot { agent: name.clone(), message })?);
    }
    let profile = Profile::new(file.agents.clone(), domain, ballots)?;
    Ok(Loaded { profile, rewritten })
}

pub fn to_file(profile: &Profile) -> Result<ProfileFile, FormatError> {
    let names = profile.agents();
    let mut ballots = IndexMap::new();
    for (a, ballot) in profile.ballots().iter().enumerate() {
        let mut levels = Vec::with_capacity(ballot.len());
        for (h, level) in ballot.levels().iter().enumerate() {
            levels.push(match level {
                PreferenceLevel::Direct(v) => LevelFile::Vote { vote: v.to_string() },
                PreferenceLevel::Delegation(f) => {
                    let function = match f {
                        DelegationFunction::Identity(b) => FunctionFile::Id { of: names[*b].clone() },
                        DelegationFunction::Dnf(d) => FunctionFile::Dnf { expr: d.display(names).to_string() },
                        DelegationFunction::Extension(_) => {
                            return Err(FormatError::Unserialisable { agent: names[a].clone(), level: h + 1 })
                        }
                    };
                    LevelFile::Delegation { delegates: f.delegates().iter().map(|&d| names[d].clone()).collect(), function }
                }
            });
        }
        ballots.insert(names[a].clone(), levels);
    }
    Ok(ProfileFile {
        domain: profile.domain().alternatives().iter().map(|a| a.to_string()).collect(),
        agents: names.to_vec(),
        ballots,
    })
}

pub fn to_json(profile: &Profile) -> Result<String, FormatError> {
    let file = to_file(profile)?;
    Ok(serde_json::to_string_pretty(&file).expect("profile file serialises"))
}
