//! Game state and the event fold. The engine mutates state only by
//! applying the events it logs, so folding a log over the initial state
//! reproduces the final state exactly.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::events::{EventKind, GameEvent, Party, PlayerId};
use crate::board::{BoardSchema, Deck, Money};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerState {
    pub position: usize,
    pub cash: Money,
    /// Retained get-out-of-jail-free cards as (deck, card index).
    pub jail_cards: Vec<(Deck, usize)>,
    pub in_jail: bool,
    pub jail_turns: u8,
    pub round_trips: u32,
    pub alive: bool,
    pub novelty_signaled: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyState {
    pub owner: Option<PlayerId>,
    pub level: u8,
    pub mortgaged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub players: Vec<PlayerState>,
    pub properties: BTreeMap<String, PropertyState>,
    /// Card indices; the front is drawn next.
    pub chance: VecDeque<usize>,
    pub community_chest: VecDeque<usize>,
    pub turn: u64,
    pub last_roll: Vec<u32>,
    pub finished: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApplyError {
    #[error("unknown player {0}")]
    UnknownPlayer(PlayerId),
    #[error("player {0} is not alive")]
    DeadPlayer(PlayerId),
    #[error("unknown property '{0}'")]
    UnknownProperty(String),
    #[error("player {player} cannot pay {amount} with {cash}")]
    Overdraft { player: PlayerId, amount: Money, cash: Money },
    #[error("negative transfer amount {0}")]
    NegativeAmount(Money),
    #[error("inconsistent event: {0}")]
    Inconsistent(String),
}

fn inconsistent(msg: impl Into<String>) -> ApplyError {
    ApplyError::Inconsistent(msg.into())
}

impl GameState {
    pub fn new(schema: &BoardSchema, seats: usize) -> Self {
        let player = PlayerState {
            position: 0,
            cash: schema.constants.starting_cash,
            jail_cards: Vec::new(),
            in_jail: false,
            jail_turns: 0,
            round_trips: 0,
            alive: true,
            novelty_signaled: false,
        };
        GameState {
            players: vec![player; seats],
            properties: schema
                .properties()
                .into_iter()
                .map(|s| (s.name.clone(), PropertyState::default()))
                .collect(),
            chance: VecDeque::new(),
            community_chest: VecDeque::new(),
            turn: 0,
            last_roll: Vec::new(),
            finished: false,
        }
    }

    pub fn alive_players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        self.players.iter().enumerate().filter(|(_, p)| p.alive).map(|(i, _)| i)
    }

    pub fn owned_by(&self, player: PlayerId) -> impl Iterator<Item = (&String, &PropertyState)> + '_ {
        self.properties.iter().filter(move |(_, p)| p.owner == Some(player))
    }

    pub fn deck(&self, deck: Deck) -> &VecDeque<usize> {
        match deck {
            Deck::Chance => &self.chance,
            Deck::CommunityChest => &self.community_chest,
        }
    }

    fn deck_mut(&mut self, deck: Deck) -> &mut VecDeque<usize> {
        match deck {
            Deck::Chance => &mut self.chance,
            Deck::CommunityChest => &mut self.community_chest,
        }
    }

    fn player_mut(&mut self, id: PlayerId) -> Result<&mut PlayerState, ApplyError> {
        self.players.get_mut(id).ok_or(ApplyError::UnknownPlayer(id))
    }

    fn live_player_mut(&mut self, id: PlayerId) -> Result<&mut PlayerState, ApplyError> {
        let p = self.player_mut(id)?;
        if p.alive {
            Ok(p)
        } else {
            Err(ApplyError::DeadPlayer(id))
        }
    }

    fn property_mut(&mut self, name: &str) -> Result<&mut PropertyState, ApplyError> {
        self.properties
            .get_mut(name)
            .ok_or_else(|| ApplyError::UnknownProperty(name.to_string()))
    }

    fn transfer(&mut self, payer: Party, payee: Party, amount: Money) -> Result<(), ApplyError> {
        if amount < 0 {
            return Err(ApplyError::NegativeAmount(amount));
        }
        if let Party::Player(p) = payer {
            let state = self.live_player_mut(p)?;
            if state.cash < amount {
                return Err(ApplyError::Overdraft {
                    player: p,
                    amount,
                    cash: state.cash,
                });
            }
            state.cash -= amount;
        }
        if let Party::Player(p) = payee {
            self.live_player_mut(p)?.cash += amount;
        }
        Ok(())
    }

    /// Applies one event. Fails without a partial update only for the
    /// validation checks performed before mutation; callers treat any error
    /// as a corrupt log.
    pub fn apply(&mut self, schema: &BoardSchema, event: &GameEvent) -> Result<(), ApplyError> {
        self.turn = event.turn;
        let actor = event.player;
        let need_actor = || actor.ok_or_else(|| inconsistent("event needs an acting player"));
        if let Some(p) = actor {
            if p >= self.players.len() {
                return Err(ApplyError::UnknownPlayer(p));
            }
        }
        match &event.kind {
            EventKind::GameStart {
                seats,
                starting_cash,
                slots,
                jail,
                chance_order,
                community_chest_order,
            } => {
                let names_match = slots.len() == schema.slots.len()
                    && slots.iter().zip(&schema.slots).all(|(a, b)| *a == b.name);
                if seats.len() != self.players.len() || !names_match || Some(*jail) != schema.jail_index() {
                    return Err(inconsistent("game-start does not match the board"));
                }
                for (order, deck) in [(chance_order, Deck::Chance), (community_chest_order, Deck::CommunityChest)] {
                    let mut sorted = order.clone();
                    sorted.sort_unstable();
                    if sorted != (0..schema.card_decks.deck(deck).len()).collect::<Vec<_>>() {
                        return Err(inconsistent(format!("{deck} order is not a permutation")));
                    }
                    *self.deck_mut(deck) = order.iter().copied().collect();
                }
                for p in &mut self.players {
                    p.cash = *starting_cash;
                }
            }
            EventKind::Roll { dice } => self.last_roll = dice.clone(),
            EventKind::Move { from, to } => {
                let p = need_actor()?;
                if *to >= schema.slots.len() {
                    return Err(inconsistent("move beyond the board"));
                }
                let player = self.live_player_mut(p)?;
                if player.position != *from {
                    return Err(inconsistent("move does not start at the player's position"));
                }
                player.position = *to;
            }
            EventKind::PassGo {
                laps,
                payer,
                payee,
                amount,
            } => {
                self.transfer(*payer, *payee, *amount)?;
                self.live_player_mut(need_actor()?)?.round_trips += laps;
            }
            EventKind::Buy {
                property,
                payer,
                payee,
                amount,
            } => {
                let buyer = payer.player().ok_or_else(|| inconsistent("bank cannot buy"))?;
                if self.property_mut(property)?.owner.is_some() {
                    return Err(inconsistent(format!("{property} already owned")));
                }
                self.transfer(*payer, *payee, *amount)?;
                self.property_mut(property)?.owner = Some(buyer);
            }
            EventKind::RentPaid { payer, payee, amount, .. }
            | EventKind::TaxPaid { payer, payee, amount, .. }
            | EventKind::CardEffect { payer, payee, amount, .. } => {
                self.transfer(*payer, *payee, *amount)?;
            }
            EventKind::CardDrawn { deck, card, .. } => {
                let p = need_actor()?;
                self.live_player_mut(p)?;
                if self.deck(*deck).front() != Some(card) {
                    return Err(inconsistent(format!("{deck} card {card} is not on top")));
                }
                self.deck_mut(*deck).pop_front();
                let retained = schema.card_decks.deck(*deck).get(*card).is_some_and(|c| c.retained);
                if retained {
                    self.players[p].jail_cards.push((*deck, *card));
                } else {
                    self.deck_mut(*deck).push_back(*card);
                }
            }
            EventKind::TradeAccepted {
                offer,
                payer,
                payee,
                amount,
            } => {
                for name in &offer.offered {
                    if self.property_mut(name)?.owner != Some(offer.proposer) {
                        return Err(inconsistent(format!("{name} not owned by proposer")));
                    }
                }
                for name in &offer.requested {
                    if self.property_mut(name)?.owner != Some(offer.responder) {
                        return Err(inconsistent(format!("{name} not owned by responder")));
                    }
                }
                self.transfer(*payer, *payee, *amount)?;
                for name in &offer.offered {
                    self.property_mut(name)?.owner = Some(offer.responder);
                }
                for name in &offer.requested {
                    self.property_mut(name)?.owner = Some(offer.proposer);
                }
            }
            EventKind::Improve {
                property,
                level,
                payer,
                payee,
                amount,
            } => {
                if self.property_mut(property)?.level + 1 != *level {
                    return Err(inconsistent("improve must raise the level by one"));
                }
                self.transfer(*payer, *payee, *amount)?;
                self.property_mut(property)?.level = *level;
            }
            EventKind::SellImprovement {
                property,
                level,
                payer,
                payee,
                amount,
            } => {
                if self.property_mut(property)?.level != level + 1 {
                    return Err(inconsistent("sell must lower the level by one"));
                }
                self.transfer(*payer, *payee, *amount)?;
                self.property_mut(property)?.level = *level;
            }
            EventKind::Mortgage {
                property,
                payer,
                payee,
                amount,
            } => {
                let prop = self.property_mut(property)?;
                if prop.mortgaged || prop.level > 0 {
                    return Err(inconsistent(format!("{property} cannot be mortgaged")));
                }
                self.transfer(*payer, *payee, *amount)?;
                self.property_mut(property)?.mortgaged = true;
            }
            EventKind::Unmortgage {
                property,
                payer,
                payee,
                amount,
            } => {
                if !self.property_mut(property)?.mortgaged {
                    return Err(inconsistent(format!("{property} is not mortgaged")));
                }
                self.transfer(*payer, *payee, *amount)?;
                self.property_mut(property)?.mortgaged = false;
            }
            EventKind::JailEnter { .. } => {
                let jail = schema.jail_index().ok_or_else(|| inconsistent("board has no jail"))?;
                let player = self.live_player_mut(need_actor()?)?;
                player.position = jail;
                player.in_jail = true;
                player.jail_turns = 0;
            }
            EventKind::JailStay { jail_turns } => {
                self.live_player_mut(need_actor()?)?.jail_turns = *jail_turns;
            }
            EventKind::JailExit {
                card,
                payer,
                payee,
                amount,
                ..
            } => {
                let p = need_actor()?;
                self.transfer(*payer, *payee, *amount)?;
                let player = self.live_player_mut(p)?;
                player.in_jail = false;
                player.jail_turns = 0;
                if let Some(deck) = card {
                    let pos = player
                        .jail_cards
                        .iter()
                        .position(|(d, _)| d == deck)
                        .ok_or_else(|| inconsistent("no retained card from that deck"))?;
                    let (deck, idx) = player.jail_cards.remove(pos);
                    self.deck_mut(deck).push_back(idx);
                }
            }
            EventKind::Bankruptcy {
                creditor,
                properties,
                returned_cards,
                payer,
                payee,
                amount,
            } => {
                let p = need_actor()?;
                self.transfer(*payer, *payee, *amount)?;
                if self.players[p].cash != 0 {
                    return Err(inconsistent("bankrupt player kept cash"));
                }
                for name in properties {
                    let prop = self.property_mut(name)?;
                    if prop.owner != Some(p) || prop.level > 0 {
                        return Err(inconsistent(format!("{name} cannot pass to the creditor")));
                    }
                    match creditor {
                        Party::Player(c) => prop.owner = Some(*c),
                        Party::Bank => *prop = PropertyState::default(),
                    }
                }
                if self.owned_by(p).next().is_some() {
                    return Err(inconsistent("bankrupt player still owns property"));
                }
                for &(deck, idx) in returned_cards {
                    self.deck_mut(deck).push_back(idx);
                }
                let player = &mut self.players[p];
                player.jail_cards.clear();
                player.alive = false;
                player.in_jail = false;
            }
            EventKind::NoveltySignal => {
                self.player_mut(need_actor()?)?.novelty_signaled = true;
            }
            EventKind::GameEnd { .. } => self.finished = true,
            EventKind::Decline { .. }
            | EventKind::TradeProposed { .. }
            | EventKind::TradeRejected { .. }
            | EventKind::InvalidActionSubstituted { .. } => {}
        }
        Ok(())
    }

    /// Folds a whole log over a fresh state.
    pub fn replay(schema: &BoardSchema, seats: usize, events: &[GameEvent]) -> Result<GameState, (usize, ApplyError)> {
        let mut state = GameState::new(schema, seats);
        for (i, e) in events.iter().enumerate() {
            state.apply(schema, e).map_err(|err| (i, err))?;
        }
        Ok(state)
    }
}
