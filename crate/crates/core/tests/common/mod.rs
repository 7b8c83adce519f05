//! Independent checks over a finished game's log.

#![allow(dead_code)]

use std::collections::BTreeSet;

use novelty_board::board::{BoardSchema, SlotKind};
use novelty_board::engine::{EventKind, GameEvent, GameState, Party, PlayerId};

fn group_of<'a>(schema: &'a BoardSchema, property: &str) -> &'a [String] {
    let color = match schema.slots.iter().find(|s| s.name == property).map(|s| &s.kind) {
        Some(SlotKind::Street(s)) => &s.color,
        _ => return &[],
    };
    schema.color_groups.get(color).map_or(&[], Vec::as_slice)
}

fn build_costs<'a>(schema: &'a BoardSchema, property: &str) -> &'a [i64] {
    match schema.slots.iter().find(|s| s.name == property).map(|s| &s.kind) {
        Some(SlotKind::Street(s)) => &s.build_costs,
        _ => &[],
    }
}

fn player_delta(t: Option<(Party, Party, i64)>) -> i64 {
    match t {
        None => 0,
        Some((payer, payee, amount)) => {
            let out = if matches!(payer, Party::Player(_)) { amount } else { 0 };
            let inn = if matches!(payee, Party::Player(_)) { amount } else { 0 };
            inn - out
        }
    }
}

/// Every rule violation found while folding `events`; empty for a sound game.
pub fn audit_game(schema: &BoardSchema, seats: usize, events: &[GameEvent]) -> Vec<String> {
    let mut out = Vec::new();
    let mut state = GameState::new(schema, seats);
    let mut bankrupt: BTreeSet<PlayerId> = BTreeSet::new();
    for (i, event) in events.iter().enumerate() {
        let before: i64 = state.players.iter().map(|p| p.cash).sum();
        if let Some(actor) = event.player {
            if bankrupt.contains(&actor) {
                out.push(format!("event {i}: bankrupt P{actor} acts ({})", event.kind.label()));
            }
        }
        for p in event.kind.referenced_players() {
            if bankrupt.contains(&p) {
                out.push(format!("event {i}: bankrupt P{p} referenced ({})", event.kind.label()));
            }
        }
        match &event.kind {
            EventKind::Improve {
                property,
                level,
                amount,
                ..
            } => {
                let owner = event.player;
                let group = group_of(schema, property);
                let levels: Vec<u8> = group.iter().map(|s| state.properties[s].level).collect();
                let held = group.iter().all(|s| state.properties[s].owner == owner);
                let mortgaged = group.iter().any(|s| state.properties[s].mortgaged);
                let current = state.properties[property].level;
                let costs = build_costs(schema, property);
                if !held || mortgaged || group.is_empty() {
                    out.push(format!("event {i}: improving {property} without a clean full group"));
                }
                if Some(&current) != levels.iter().min() || *level != current + 1 {
                    out.push(format!("event {i}: uneven build on {property}"));
                }
                if costs.get(current as usize) != Some(amount) {
                    out.push(format!("event {i}: {property} improved for {amount}"));
                }
            }
            EventKind::SellImprovement { property, level, .. } => {
                let group = group_of(schema, property);
                let current = state.properties[property].level;
                let max = group.iter().map(|s| state.properties[s].level).max();
                if Some(current) != max || *level + 1 != current {
                    out.push(format!("event {i}: uneven sale on {property}"));
                }
            }
            EventKind::Bankruptcy { .. } => {
                bankrupt.extend(event.player);
            }
            _ => {}
        }
        let transfer = event.kind.transfer().map(|t| (t.payer, t.payee, t.amount));
        if let Err(e) = state.apply(schema, event) {
            out.push(format!("event {i}: does not apply: {e}"));
            return out;
        }
        let after: i64 = state.players.iter().map(|p| p.cash).sum();
        if after - before != player_delta(transfer) {
            out.push(format!("event {i}: cash moved by {} but transfer says {}", after - before, player_delta(transfer)));
        }
        if let Some(p) = state.players.iter().position(|p| p.cash < 0) {
            out.push(format!("event {i}: P{p} cash negative"));
        }
        for group in schema.color_groups.values() {
            let levels: Vec<u8> = group.iter().map(|s| state.properties[s].level).collect();
            let (lo, hi) = (levels.iter().min().unwrap(), levels.iter().max().unwrap());
            if hi - lo > 1 {
                out.push(format!("event {i}: group levels {levels:?} uneven"));
            }
            if *hi > 0 && group.iter().any(|s| state.properties[s].owner != state.properties[&group[0]].owner) {
                out.push(format!("event {i}: improved group split between owners"));
            }
        }
    }
    out
}
