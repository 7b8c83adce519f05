//! Wire protocol for agents running outside the simulator process.
//!
//! Messages are single-line JSON objects with a `type` tag and a
//! `protocol_version` field, exchanged over a child's standard streams or a
//! TCP connection.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{Agent, AgentAction, AgentFault, DecisionRequest};
use crate::board::BoardSchema;
use crate::engine::{GameResult, PlayerId};

pub const PROTOCOL_VERSION: u32 = 1;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_millis(1000);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub protocol_version: u32,
    #[serde(flatten)]
    pub message: Message,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Message {
    GameStart { seat: PlayerId, schema: BoardSchema },
    DecisionRequest { id: u64, request: DecisionRequest },
    ActionResponse { id: u64, action: AgentAction },
    NoveltyDetected,
    GameEnd { result: GameResult },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("protocol version {got} not supported (expected {expected})")]
    Version { got: u32, expected: u32 },
}

pub fn encode(message: &Message) -> String {
    let envelope = Envelope {
        protocol_version: PROTOCOL_VERSION,
        message: message.clone(),
    };
    serde_json::to_string(&envelope).expect("messages serialize")
}

/// Decodes one line. The version is checked before the body so that a
/// newer peer gets a version error rather than a parse error.
pub fn decode(line: &str) -> Result<Message, ProtocolError> {
    let value: serde_json::Value =
        serde_json::from_str(line.trim()).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    let got = value
        .get("protocol_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| ProtocolError::Malformed("missing protocol_version".into()))?;
    if got != u64::from(PROTOCOL_VERSION) {
        return Err(ProtocolError::Version {
            got: got.min(u64::from(u32::MAX)) as u32,
            expected: PROTOCOL_VERSION,
        });
    }
    serde_json::from_value::<Envelope>(value)
        .map(|e| e.message)
        .map_err(|e| ProtocolError::Malformed(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecvError {
    #[error("timed out")]
    Timeout,
    #[error("connection closed: {0}")]
    Closed(String),
}

/// A bidirectional line channel to one agent.
pub trait Transport: Send {
    fn send(&mut self, line: &str) -> io::Result<()>;
    fn recv(&mut self, timeout: Duration) -> Result<String, RecvError>;
}

/// Lines read on a background thread so that receives can time out.
pub struct LineTransport {
    writer: Box<dyn Write + Send>,
    lines: Receiver<io::Result<String>>,
    child: Option<Child>,
}

impl LineTransport {
    pub fn new(reader: impl Read + Send + 'static, writer: impl Write + Send + 'static) -> Self {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                let failed = line.is_err();
                if tx.send(line).is_err() || failed {
                    break;
                }
            }
        });
        LineTransport {
            writer: Box::new(writer),
            lines: rx,
            child: None,
        }
    }

    /// Runs `command` through the shell and talks to its standard streams.
    pub fn spawn(command: &str) -> io::Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut transport = Self::new(stdout, stdin);
        transport.child = Some(child);
        Ok(transport)
    }

    pub fn connect(address: &str, timeout: Duration) -> io::Result<Self> {
        let addr = address
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "address did not resolve"))?;
        let stream = TcpStream::connect_timeout(&addr, timeout)?;
        stream.set_nodelay(true)?;
        let reader = stream.try_clone()?;
        Ok(Self::new(reader, stream))
    }
}

impl Transport for LineTransport {
    fn send(&mut self, line: &str) -> io::Result<()> {
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()
    }

    fn recv(&mut self, timeout: Duration) -> Result<String, RecvError> {
        match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(RecvError::Closed(e.to_string())),
            Err(RecvTimeoutError::Timeout) => Err(RecvError::Timeout),
            Err(RecvTimeoutError::Disconnected) => Err(RecvError::Closed("end of stream".into())),
        }
    }
}

impl Drop for LineTransport {
    fn drop(&mut self) {
        if let Some(child) = &mut self.child {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// Adapts a remote agent to the [`Agent`] trait. Every failure becomes an
/// [`AgentFault`]; nothing here can stop a game.
pub struct ExternalAgent {
    name: String,
    transport: Box<dyn Transport>,
    timeout: Duration,
    next_id: u64,
    detected: bool,
    lost: Option<String>,
}

impl ExternalAgent {
    pub fn new(name: impl Into<String>, transport: Box<dyn Transport>, timeout: Duration) -> Self {
        ExternalAgent {
            name: name.into(),
            transport,
            timeout,
            next_id: 0,
            detected: false,
            lost: None,
        }
    }

    fn send(&mut self, message: &Message) -> Result<(), AgentFault> {
        if let Some(reason) = &self.lost {
            return Err(AgentFault::ConnectionLost(reason.clone()));
        }
        self.transport.send(&encode(message)).map_err(|e| {
            self.lost = Some(e.to_string());
            AgentFault::ConnectionLost(e.to_string())
        })
    }
}

impl Agent for ExternalAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn game_start(&mut self, seat: PlayerId, schema: &Arc<BoardSchema>) {
        let _ = self.send(&Message::GameStart {
            seat,
            schema: (**schema).clone(),
        });
    }

    fn decide(&mut self, request: &DecisionRequest) -> Result<AgentAction, AgentFault> {
        self.next_id += 1;
        let id = self.next_id;
        self.send(&Message::DecisionRequest {
            id,
            request: request.clone(),
        })?;
        let deadline = Instant::now() + self.timeout;
        loop {
            let remaining = deadline.saturating_duration_since(Instant::now());
            let line = match self.transport.recv(remaining) {
                Ok(line) => line,
                Err(RecvError::Timeout) => return Err(AgentFault::Timeout(self.timeout)),
                Err(RecvError::Closed(reason)) => {
                    self.lost = Some(reason.clone());
                    return Err(AgentFault::ConnectionLost(reason));
                }
            };
            match decode(&line) {
                Err(ProtocolError::Version { got, expected }) => {
                    return Err(AgentFault::VersionMismatch { got, expected })
                }
                Err(ProtocolError::Malformed(m)) => return Err(AgentFault::Malformed(m)),
                Ok(Message::NoveltyDetected) => self.detected = true,
                // A late answer to a request that already timed out.
                Ok(Message::ActionResponse { id: other, .. }) if other != id => {}
                Ok(Message::ActionResponse { mut action, .. }) => {
                    self.detected |= action.novelty_detected;
                    action.novelty_detected = self.detected;
                    if !request.menu.permits(&action.kind) {
                        return Err(AgentFault::IllegalAction(action.kind.label().to_string()));
                    }
                    return Ok(action);
                }
                Ok(other) => return Err(AgentFault::Malformed(format!("unexpected message {other:?}"))),
            }
        }
    }

    fn game_end(&mut self, result: &GameResult) {
        let _ = self.send(&Message::GameEnd { result: result.clone() });
    }
}

/// Answers protocol messages from `reader` with decisions from `agent` until
/// the stream ends. Lets any in-process agent act as an external one.
pub fn serve_agent(agent: &mut dyn Agent, reader: impl BufRead, mut writer: impl Write) -> io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match decode(&line) {
            Ok(Message::GameStart { seat, schema }) => agent.game_start(seat, &Arc::new(schema)),
            Ok(Message::DecisionRequest { id, request }) => {
                if let Ok(action) = agent.decide(&request) {
                    writeln!(writer, "{}", encode(&Message::ActionResponse { id, action }))?;
                    writer.flush()?;
                }
            }
            Ok(Message::GameEnd { result }) => agent.game_end(&result),
            Ok(_) | Err(_) => {}
        }
    }
    Ok(())
}
