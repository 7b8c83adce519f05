use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Agent, HeuristicAgent, HybridAgent, SimpleAgent, Style};
use crate::protocol::{ExternalAgent, LineTransport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgentDescriptor {
    pub id: &'static str,
    pub label: &'static str,
    pub description: &'static str,
}

pub const AGENT_CATALOG: &[AgentDescriptor] = &[
    AgentDescriptor {
        id: "simple",
        label: "Simple",
        description: "Buys any property it can afford. Never trades or builds, and declares bankruptcy instead of selling or mortgaging.",
    },
    AgentDescriptor {
        id: "h1",
        label: "Heuristic 1",
        description: "Buys while keeping a cash reserve, builds houses and hotels evenly on full color groups, mortgages before going bankrupt and sells a property for cash when short.",
    },
    AgentDescriptor {
        id: "h2",
        label: "Heuristic 2",
        description: "Everything Heuristic 1 does, plus two-way property trades aimed at completing its color groups, sent to several players at once.",
    },
    AgentDescriptor {
        id: "hybrid",
        label: "Hybrid",
        description: "Heuristic 2 play with a pluggable buy policy, and raises the novelty signal when the board or dice differ from the first game it saw.",
    },
];

/// Where a seat's decisions come from: a built-in agent id, a command
/// speaking the agent protocol on its standard streams (`exec:CMD`), or a
/// TCP endpoint (`tcp:HOST:PORT`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AgentBinding {
    Builtin(String),
    Exec(String),
    Tcp(String),
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("unknown agent '{0}' (known: simple, h1, h2, hybrid, exec:CMD, tcp:HOST:PORT)")]
    Unknown(String),
    #[error("empty agent endpoint in '{0}'")]
    EmptyEndpoint(String),
    #[error("cannot start agent command '{command}': {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot reach agent at {address}: {source}")]
    Connect {
        address: String,
        #[source]
        source: std::io::Error,
    },
}

impl FromStr for AgentBinding {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, AgentError> {
        let s = s.trim();
        let endpoint = |rest: &str| {
            if rest.trim().is_empty() {
                Err(AgentError::EmptyEndpoint(s.to_string()))
            } else {
                Ok(rest.trim().to_string())
            }
        };
        if let Some(rest) = s.strip_prefix("exec:") {
            return endpoint(rest).map(AgentBinding::Exec);
        }
        if let Some(rest) = s.strip_prefix("tcp:") {
            return endpoint(rest).map(AgentBinding::Tcp);
        }
        if AGENT_CATALOG.iter().any(|d| d.id == s) {
            Ok(AgentBinding::Builtin(s.to_string()))
        } else {
            Err(AgentError::Unknown(s.to_string()))
        }
    }
}

impl TryFrom<String> for AgentBinding {
    type Error = AgentError;

    fn try_from(s: String) -> Result<Self, AgentError> {
        s.parse()
    }
}

impl From<AgentBinding> for String {
    fn from(b: AgentBinding) -> String {
        b.to_string()
    }
}

impl fmt::Display for AgentBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentBinding::Builtin(id) => write!(f, "{id}"),
            AgentBinding::Exec(cmd) => write!(f, "exec:{cmd}"),
            AgentBinding::Tcp(addr) => write!(f, "tcp:{addr}"),
        }
    }
}

/// Builds a fresh agent for one seat. External endpoints are contacted
/// here, so an unreachable agent is reported before any game starts.
pub fn build_agent(binding: &AgentBinding, timeout: Duration) -> Result<Box<dyn Agent>, AgentError> {
    let name = binding.to_string();
    Ok(match binding {
        AgentBinding::Builtin(id) => match id.as_str() {
            "simple" => Box::new(SimpleAgent),
            "h1" => Box::new(HeuristicAgent::new(Style::H1)),
            "h2" => Box::new(HeuristicAgent::new(Style::H2)),
            "hybrid" => Box::new(HybridAgent::default()),
            other => return Err(AgentError::Unknown(other.to_string())),
        },
        AgentBinding::Exec(command) => {
            let transport = LineTransport::spawn(command).map_err(|source| AgentError::Spawn {
                command: command.clone(),
                source,
            })?;
            Box::new(ExternalAgent::new(name, Box::new(transport), timeout))
        }
        AgentBinding::Tcp(address) => {
            let transport = LineTransport::connect(address, timeout).map_err(|source| AgentError::Connect {
                address: address.clone(),
                source,
            })?;
            Box::new(ExternalAgent::new(name, Box::new(transport), timeout))
        }
    })
}
