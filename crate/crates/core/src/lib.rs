//! Monopoly simulator for studying how game-playing agents cope with
//! novelty: changes to the board, dice or rules injected mid-tournament.
//!
//! * [`board`]: board schemas, validation and the default US board.
//! * [`engine`]: deterministic game runner producing event logs.
//! * [`agents`]: the decision interface and built-in agents.
//! * [`play`]: one configured game with its artifacts.
//! * [`protocol`]: wire protocol for out-of-process agents.
//! * [`novelty`]: novelty specs and schema transforms.
//! * [`tournament`]: the pre/post-novelty evaluation protocol and metrics.
//! * [`replay`]: replay frames folded from event logs.

pub mod agents;
pub mod board;
pub mod engine;
pub mod novelty;
pub mod play;
pub mod protocol;
pub mod replay;
pub mod tournament;
