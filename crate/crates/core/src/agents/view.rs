use crate::board::Money;
use crate::engine::{Board, PlayerId};

use super::Snapshot;

/// Read-only questions a built-in agent asks about a snapshot.
#[derive(Clone, Copy)]
pub struct View<'a> {
    pub board: &'a Board,
    pub snapshot: &'a Snapshot,
    pub seat: PlayerId,
}

impl<'a> View<'a> {
    pub fn new(board: &'a Board, snapshot: &'a Snapshot, seat: PlayerId) -> Self {
        View { board, snapshot, seat }
    }

    pub fn cash(&self) -> Money {
        self.cash_of(self.seat)
    }

    pub fn cash_of(&self, player: PlayerId) -> Money {
        self.snapshot.players.get(player).map_or(0, |p| p.cash)
    }

    pub fn owner(&self, property: &str) -> Option<PlayerId> {
        self.snapshot.properties.get(property).and_then(|p| p.owner)
    }

    pub fn level(&self, property: &str) -> u8 {
        self.snapshot.properties.get(property).map_or(0, |p| p.level)
    }

    pub fn mortgaged(&self, property: &str) -> bool {
        self.snapshot.properties.get(property).is_some_and(|p| p.mortgaged)
    }

    /// Properties owned by `player`, in board order.
    pub fn owned_by(&self, player: PlayerId) -> impl Iterator<Item = &'a str> + 'a {
        let snapshot = self.snapshot;
        self.board
            .properties()
            .iter()
            .filter(move |name| snapshot.properties.get(*name).and_then(|p| p.owner) == Some(player))
            .map(String::as_str)
    }

    pub fn unowned_count(&self) -> usize {
        self.snapshot.properties.values().filter(|p| p.owner.is_none()).count()
    }

    pub fn opponents(&self) -> impl Iterator<Item = PlayerId> + 'a {
        let seat = self.seat;
        self.snapshot
            .players
            .iter()
            .enumerate()
            .filter(move |(i, p)| *i != seat && p.alive)
            .map(|(i, _)| i)
    }

    pub fn richest_opponent(&self) -> Option<PlayerId> {
        // Ties go to the lowest seat.
        self.opponents().max_by_key(|&p| (self.cash_of(p), std::cmp::Reverse(p)))
    }

    /// Whether `player` would hold every street of `property`'s group after
    /// gaining `gained` and losing `lost`.
    pub fn holds_group_after(&self, player: PlayerId, property: &str, gained: &[String], lost: &[String]) -> bool {
        self.board.group_of(property).is_some_and(|group| {
            group.iter().all(|s| {
                !lost.contains(s) && (gained.contains(s) || self.owner(s) == Some(player))
            })
        })
    }

    pub fn holds_group(&self, player: PlayerId, property: &str) -> bool {
        self.holds_group_after(player, property, &[], &[])
    }

    /// Full color groups `player` would hold after the exchange.
    pub fn monopolies_after(&self, player: PlayerId, gained: &[String], lost: &[String]) -> usize {
        self.board
            .groups()
            .values()
            .filter(|group| {
                group.iter().all(|s| !lost.contains(s) && (gained.contains(s) || self.owner(s) == Some(player)))
            })
            .count()
    }

    pub fn monopolies(&self, player: PlayerId) -> usize {
        self.monopolies_after(player, &[], &[])
    }

    /// Whether acquiring `property` completes its group for `player`.
    pub fn completes_group(&self, player: PlayerId, property: &str) -> bool {
        self.board.street(property).is_some() && self.holds_group_after(player, property, &[property.to_string()], &[])
    }

    /// Streets whose group carries improvements cannot be traded.
    pub fn tradeable(&self, owner: PlayerId, property: &str) -> bool {
        if self.owner(property) != Some(owner) {
            return false;
        }
        match self.board.group_of(property) {
            Some(group) => group.iter().all(|s| self.level(s) == 0),
            None => true,
        }
    }

    pub fn price(&self, property: &str) -> Money {
        self.board.price(property).unwrap_or(0)
    }

    /// Cost of the next improvement on `property`.
    pub fn build_cost(&self, property: &str) -> Option<Money> {
        let street = self.board.street(property)?;
        street.build_costs.get(self.level(property) as usize).copied()
    }
}
